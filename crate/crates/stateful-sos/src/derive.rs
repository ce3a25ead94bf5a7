use std::collections::HashMap;

use core_syntax::{substitute, Node, Substitution, Term};

use crate::cool::{check_cool, CoolReport, OpClass};
use crate::engine::{l_trace, TraceOutcome};
use crate::spec::{ResolvedConclusion, SpecError, StatefulSpec};

/// The reader-writer form of a rule system: the base system plus the
/// operator classification and the two lookup tables driving it.
#[derive(Debug, Clone)]
pub struct RWSpec {
    pub base: StatefulSpec,
    pub classes: Vec<OpClass>,
    /// (passive operator, observed state) -> conclusion.
    passive: HashMap<(usize, usize), ResolvedConclusion>,
    /// (active operator, state its argument finished in) -> continuation.
    active: HashMap<(usize, usize), ResolvedConclusion>,
}

/// Writer-sorted configurations of the derived system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GWriter {
    /// A reader paired with the state to run it in.
    Run(Term, usize),
    /// Terminated in a state.
    Ret(usize),
    /// Announce a state, then continue.
    Emit(usize, Box<GWriter>),
    /// An active operator whose receiving argument is already running.
    Bar { op: usize, args: Vec<Term>, inner: Box<GWriter> },
}

impl GWriter {
    pub fn run(t: Term, s: usize) -> Self {
        GWriter::Run(t, s)
    }
}

/// One writer transition: silent, state-announcing, or terminating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GStep {
    Silent(GWriter),
    Output(GWriter, usize),
    Done(usize),
}

pub fn derive_rw(spec: &StatefulSpec) -> Result<RWSpec, Box<CoolReport>> {
    let report = check_cool(spec);
    if !report.cool {
        return Err(Box::new(report));
    }
    Ok(RWSpec {
        base: spec.clone(),
        classes: report.classes.into_iter().map(|c| c.expect("all classified")).collect(),
        passive: report.passive_table,
        active: report.active_table,
    })
}

impl RWSpec {
    pub fn display_writer(&self, c: &GWriter) -> String {
        match c {
            GWriter::Run(t, s) => format!("[{t}]@{}", self.base.states()[*s]),
            GWriter::Ret(s) => format!("ret@{}", self.base.states()[*s]),
            GWriter::Emit(s, c) => format!("{}.{}", self.base.states()[*s], self.display_writer(c)),
            GWriter::Bar { op, args, inner } => {
                let OpClass::Active { j } = self.classes[*op] else {
                    unreachable!("bar of a passive operator")
                };
                let parts: Vec<String> = args
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        if i == j {
                            format!("({})", self.display_writer(inner))
                        } else {
                            a.to_string()
                        }
                    })
                    .collect();
                format!("{}^({})", self.base.ops()[*op].name, parts.join(", "))
            }
        }
    }

    pub fn passive_entries(&self) -> impl Iterator<Item = (&(usize, usize), &ResolvedConclusion)> {
        self.passive.iter()
    }

    pub fn active_entries(&self) -> impl Iterator<Item = (&(usize, usize), &ResolvedConclusion)> {
        self.active.iter()
    }
}

/// Dispatch a reader: passive operators resolve from the table at the
/// current state, active operators start running their receiving
/// argument in place.
pub fn rw_reader_step(rw: &RWSpec, t: &Term, s: usize) -> Result<GWriter, SpecError> {
    let op = match &t.node {
        Node::Op(f) => rw.base.op_id(f)?,
        other => return Err(SpecError::IllFormedTerm(format!("cannot step {other:?}"))),
    };
    match rw.classes[op] {
        OpClass::Passive => match rw.passive.get(&(op, s)).expect("total table") {
            ResolvedConclusion::Step { term, state } => {
                let subst = Substitution { xs: t.children.clone(), ys: Default::default() };
                let next = substitute(term, &subst)
                    .map_err(|e| SpecError::IllFormedTerm(e.to_string()))?;
                Ok(GWriter::Emit(*state, Box::new(GWriter::Run(next, *state))))
            }
            ResolvedConclusion::Stop { state } => Ok(GWriter::Ret(*state)),
        },
        OpClass::Active { j } => Ok(GWriter::Bar {
            op,
            args: t.children.clone(),
            inner: Box::new(GWriter::Run(t.children[j].clone(), s)),
        }),
    }
}

pub fn rw_writer_step(rw: &RWSpec, c: &GWriter) -> Result<GStep, SpecError> {
    match c {
        GWriter::Run(t, s) => Ok(GStep::Silent(rw_reader_step(rw, t, *s)?)),
        GWriter::Ret(s) => Ok(GStep::Done(*s)),
        GWriter::Emit(s, inner) => Ok(GStep::Output((**inner).clone(), *s)),
        GWriter::Bar { op, args, inner } => match rw_writer_step(rw, inner)? {
            GStep::Silent(next) => Ok(GStep::Silent(GWriter::Bar {
                op: *op,
                args: args.clone(),
                inner: Box::new(next),
            })),
            GStep::Output(next, s) => Ok(GStep::Output(
                GWriter::Bar { op: *op, args: args.clone(), inner: Box::new(next) },
                s,
            )),
            GStep::Done(s_inner) => {
                match rw.active.get(&(*op, s_inner)).expect("total table") {
                    ResolvedConclusion::Step { term, state } => {
                        let subst = Substitution { xs: args.clone(), ys: Default::default() };
                        let next = substitute(term, &subst)
                            .map_err(|e| SpecError::IllFormedTerm(e.to_string()))?;
                        Ok(GStep::Output(GWriter::Run(next, *state), *state))
                    }
                    ResolvedConclusion::Stop { state } => Ok(GStep::Done(*state)),
                }
            }
        },
    }
}

/// Run the derived system from a reader, collecting announced states.
/// Fuel counts writer transitions.
pub fn rw_trace(rw: &RWSpec, t: &Term, s0: usize, fuel: usize) -> Result<TraceOutcome, SpecError> {
    let mut cur = GWriter::Run(t.clone(), s0);
    let mut emitted = Vec::new();
    for _ in 0..fuel {
        match rw_writer_step(rw, &cur)? {
            GStep::Silent(next) => cur = next,
            GStep::Output(next, s) => {
                emitted.push(s);
                cur = next;
            }
            GStep::Done(s) => return Ok(TraceOutcome::Finished { emitted, final_state: s }),
        }
    }
    Ok(TraceOutcome::Cut { emitted })
}

#[derive(Debug, Clone)]
pub struct PreservationMismatch {
    pub term: Term,
    pub state: usize,
    pub base: TraceOutcome,
    pub derived: TraceOutcome,
}

#[derive(Debug, Clone, Default)]
pub struct PreservationReport {
    pub matches: usize,
    pub cut_agreements: usize,
    pub mismatches: Vec<PreservationMismatch>,
}

impl PreservationReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn prefix_compatible(a: &[usize], b: &[usize]) -> bool {
    let n = a.len().min(b.len());
    a[..n] == b[..n]
}

/// Compare the base run against the derived run on one configuration.
/// The derived system needs at most `4*fuel + 4` transitions to mirror
/// `fuel` base steps; if it still runs out, it is retried once with a
/// larger budget before a mismatch is declared.
pub fn verify_preservation_one(
    rw: &RWSpec,
    t: &Term,
    s0: usize,
    fuel: usize,
) -> Result<Result<bool, PreservationMismatch>, SpecError> {
    let base = l_trace(&rw.base, t, s0, fuel)?;
    let mut derived = rw_trace(rw, t, s0, 4 * fuel + 4)?;
    if matches!(base, TraceOutcome::Finished { .. }) && matches!(derived, TraceOutcome::Cut { .. }) {
        derived = rw_trace(rw, t, s0, 16 * fuel + 16)?;
    }
    let verdict = match (&base, &derived) {
        (
            TraceOutcome::Finished { emitted: be, final_state: bf },
            TraceOutcome::Finished { emitted: de, final_state: df },
        ) => {
            if be == de && bf == df {
                Ok(true)
            } else {
                Err(())
            }
        }
        (TraceOutcome::Cut { emitted: be }, TraceOutcome::Finished { emitted: de, .. }) => {
            // The base ran out of budget; the derived run completed. The
            // base prefix must agree with the full derived sequence.
            if be.len() <= de.len() && prefix_compatible(be, de) {
                Ok(false)
            } else {
                Err(())
            }
        }
        (TraceOutcome::Finished { .. }, TraceOutcome::Cut { .. }) => Err(()),
        (TraceOutcome::Cut { emitted: be }, TraceOutcome::Cut { emitted: de }) => {
            if prefix_compatible(be, de) {
                Ok(false)
            } else {
                Err(())
            }
        }
    };
    Ok(verdict.map_err(|_| PreservationMismatch {
        term: t.clone(),
        state: s0,
        base,
        derived,
    }))
}

pub fn verify_preservation(
    rw: &RWSpec,
    cases: impl IntoIterator<Item = (Term, usize)>,
    fuel: usize,
) -> Result<PreservationReport, SpecError> {
    let mut report = PreservationReport::default();
    for (t, s0) in cases {
        match verify_preservation_one(rw, &t, s0, fuel)? {
            Ok(true) => report.matches += 1,
            Ok(false) => report.cut_agreements += 1,
            Err(m) => report.mismatches.push(m),
        }
    }
    Ok(report)
}
