use core_syntax::{ImpExpr, Term, VarStore};
use imp::{cost_of_trace, imp_trace, seq, while_, CostResult, TraceResult};
use stateful_sos::{l_trace, StatefulSpec, TraceOutcome};

use crate::simulation::Flavor;

/// Outcome of one congruence trial. `Skipped` records that some run hit
/// the fuel bound, so no equivalence claim could be certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrialResult {
    Pass,
    Skipped,
    Violation(String),
}

/// One-hole constructors of the imperative reader language.
#[derive(Debug, Clone)]
pub enum ImpCtor {
    /// p ; q from two component slots.
    Seq,
    /// while e { hole } with a fixed guard.
    While(ImpExpr),
}

/// The flavour's datum of a terminating bounded run.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Datum {
    Trace(Vec<VarStore>, VarStore),
    Cost(usize, VarStore),
    Ter(VarStore),
}

/// None when the run was cut or overflowed: nothing is certified.
fn imp_datum(p: &Term, s: &VarStore, flavor: Flavor, fuel: usize) -> Option<Datum> {
    let trace = imp_trace(p, s, fuel).ok()?;
    match trace {
        TraceResult::Finished { emitted, final_store } => Some(match flavor {
            Flavor::Trace => Datum::Trace(emitted, final_store),
            Flavor::Cost => match cost_of_trace(&TraceResult::Finished {
                emitted: emitted.clone(),
                final_store: final_store.clone(),
            }) {
                CostResult::Finished { steps, final_store } => Datum::Cost(steps, final_store),
                CostResult::Cut => return None,
            },
            Flavor::Termination => Datum::Ter(final_store),
        }),
        TraceResult::Cut { .. } => None,
    }
}

/// Certify the component pairs equivalent at the flavour on every
/// store, compose them under the constructor, and re-check. Component
/// tuples that cannot be certified (cut, or simply not equivalent)
/// skip the trial rather than producing a spurious violation.
pub fn imp_congruence_trial(
    ctor: &ImpCtor,
    pairs: &[(Term, Term)],
    stores: &[VarStore],
    flavor: Flavor,
    fuel: usize,
) -> TrialResult {
    let arity = match ctor {
        ImpCtor::Seq => 2,
        ImpCtor::While(_) => 1,
    };
    assert_eq!(pairs.len(), arity, "constructor arity mismatch");
    for (l, r) in pairs {
        for s in stores {
            match (imp_datum(l, s, flavor, fuel), imp_datum(r, s, flavor, fuel)) {
                (Some(a), Some(b)) if a == b => {}
                _ => return TrialResult::Skipped,
            }
        }
    }
    let compose = |side: &dyn Fn(&(Term, Term)) -> Term| match ctor {
        ImpCtor::Seq => seq(side(&pairs[0]), side(&pairs[1])),
        ImpCtor::While(e) => while_(e.clone(), side(&pairs[0])),
    };
    let left = compose(&|p| p.0.clone());
    let right = compose(&|p| p.1.clone());
    let mut checked = 0usize;
    for s in stores {
        match (imp_datum(&left, s, flavor, fuel), imp_datum(&right, s, flavor, fuel)) {
            (Some(a), Some(b)) => {
                if a != b {
                    return TrialResult::Violation(format!(
                        "{} and {} differ on {s}: {a:?} vs {b:?}",
                        imp::to_source(&left),
                        imp::to_source(&right)
                    ));
                }
                checked += 1;
            }
            _ => {}
        }
    }
    if checked == 0 {
        TrialResult::Skipped
    } else {
        TrialResult::Pass
    }
}

fn spec_datum(
    spec: &StatefulSpec,
    t: &Term,
    s: usize,
    flavor: Flavor,
    fuel: usize,
) -> Option<(Vec<usize>, usize)> {
    match l_trace(spec, t, s, fuel).ok()? {
        TraceOutcome::Finished { emitted, final_state } => Some(match flavor {
            Flavor::Trace => (emitted, final_state),
            Flavor::Cost => (vec![emitted.len()], final_state),
            Flavor::Termination => (vec![], final_state),
        }),
        TraceOutcome::Cut { .. } => None,
    }
}

/// The same trial for a rule-system language: one component pair in a
/// chosen hole of an operator, other slots fixed.
pub fn spec_congruence_trial(
    spec: &StatefulSpec,
    op: &str,
    hole: usize,
    fillers: &[Term],
    pair: &(Term, Term),
    flavor: Flavor,
    fuel: usize,
) -> TrialResult {
    let Ok(op_id) = spec.op_id(op) else {
        return TrialResult::Violation(format!("unknown operator `{op}`"));
    };
    let arity = spec.ops()[op_id].arity;
    assert!(hole < arity && fillers.len() == arity);
    let nstates = spec.states().len();
    for s in 0..nstates {
        match (
            spec_datum(spec, &pair.0, s, flavor, fuel),
            spec_datum(spec, &pair.1, s, flavor, fuel),
        ) {
            (Some(a), Some(b)) if a == b => {}
            _ => return TrialResult::Skipped,
        }
    }
    let plug = |t: &Term| Term {
        node: core_syntax::Node::Op(op.to_string()),
        children: (0..arity)
            .map(|i| if i == hole { t.clone() } else { fillers[i].clone() })
            .collect(),
    };
    let (left, right) = (plug(&pair.0), plug(&pair.1));
    let mut checked = 0usize;
    for s in 0..nstates {
        match (
            spec_datum(spec, &left, s, flavor, fuel),
            spec_datum(spec, &right, s, flavor, fuel),
        ) {
            (Some(a), Some(b)) => {
                if a != b {
                    return TrialResult::Violation(format!(
                        "{left} and {right} differ from {}: {a:?} vs {b:?}",
                        spec.states()[s]
                    ));
                }
                checked += 1;
            }
            _ => {}
        }
    }
    if checked == 0 {
        TrialResult::Skipped
    } else {
        TrialResult::Pass
    }
}
