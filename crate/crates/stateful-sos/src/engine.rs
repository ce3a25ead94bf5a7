use std::collections::{BTreeMap, BTreeSet};

use core_syntax::{substitute, Node, Substitution, Term};

use crate::spec::{ResolvedConclusion, SpecError, StatefulSpec, Trigger};

/// One transition of a closed term: either a successor configuration or
/// termination in a final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LStep {
    Continue(Term, usize),
    Done(usize),
}

/// Run every subterm one step in the current state to build the
/// trigger, resolve it, and instantiate the conclusion.
pub fn l_step(spec: &StatefulSpec, t: &Term, s: usize) -> Result<LStep, SpecError> {
    let op = match &t.node {
        Node::Op(f) => spec.op_id(f)?,
        other => return Err(SpecError::IllFormedTerm(format!("cannot step {other:?}"))),
    };
    let mut writes = BTreeSet::new();
    let mut succ = Vec::with_capacity(t.children.len());
    let mut ys = BTreeMap::new();
    for (i, child) in t.children.iter().enumerate() {
        match l_step(spec, child, s)? {
            LStep::Continue(next, s_i) => {
                writes.insert(i);
                succ.push(s_i);
                ys.insert(i + 1, next);
            }
            LStep::Done(s_i) => succ.push(s_i),
        }
    }
    let trig = Trigger { writes, state: s, succ };
    match spec.resolve_rule(op, &trig)? {
        ResolvedConclusion::Step { term, state } => {
            let subst = Substitution { xs: t.children.clone(), ys };
            let next = substitute(&term, &subst)
                .map_err(|e| SpecError::IllFormedTerm(e.to_string()))?;
            Ok(LStep::Continue(next, state))
        }
        ResolvedConclusion::Stop { state } => Ok(LStep::Done(state)),
    }
}

/// A bounded run: the state after each step, and the final state when
/// the run terminated within the budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TraceOutcome {
    Finished { emitted: Vec<usize>, final_state: usize },
    Cut { emitted: Vec<usize> },
}

impl TraceOutcome {
    pub fn emitted(&self) -> &[usize] {
        match self {
            TraceOutcome::Finished { emitted, .. } | TraceOutcome::Cut { emitted } => emitted,
        }
    }
}

pub fn l_trace(spec: &StatefulSpec, t: &Term, s0: usize, fuel: usize) -> Result<TraceOutcome, SpecError> {
    let mut cur = t.clone();
    let mut s = s0;
    let mut emitted = Vec::new();
    for _ in 0..fuel {
        match l_step(spec, &cur, s)? {
            LStep::Continue(next, s2) => {
                emitted.push(s2);
                cur = next;
                s = s2;
            }
            LStep::Done(s2) => return Ok(TraceOutcome::Finished { emitted, final_state: s2 }),
        }
    }
    Ok(TraceOutcome::Cut { emitted })
}
