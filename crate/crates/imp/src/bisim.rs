use std::collections::BTreeSet;

use core_syntax::{Term, VarStore};

use crate::semantics::{imp_step, ImpError, ImpStepResult};

/// Which bisimulation clause failed. The semantics is deterministic, so the
/// step/step clauses reduce to comparing the two unique steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimClause {
    /// Both sides step but reach different stores.
    StepStoreMismatch { left: VarStore, right: VarStore },
    /// Both sides terminate but in different stores.
    FinalStoreMismatch { left: VarStore, right: VarStore },
    /// Left steps while right terminates.
    StepVsStop,
    /// Left terminates while right steps.
    StopVsStep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimCounterexample {
    pub left: Term,
    pub right: Term,
    pub store: VarStore,
    /// 1-based level of the probe that failed (1 = the given pairs themselves).
    pub depth: usize,
    pub clause: BisimClause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimVerdict {
    /// No violation found probing every pair against every sampled store for
    /// `depth` levels. Sound only up to the sample; refutations are exact.
    HoldsUpToSample,
    Fails(BisimCounterexample),
}

/// Bounded check of resumption bisimulation: between any two steps the
/// observer may rewrite the store, so every successor pair is probed against
/// the whole store sample again, `depth` levels deep.
pub fn check_resumption_bisim(
    pairs: &[(Term, Term)],
    stores: &[VarStore],
    depth: usize,
) -> Result<BisimVerdict, ImpError> {
    let mut current: BTreeSet<(Term, Term)> = pairs.iter().cloned().collect();
    let mut visited: BTreeSet<(Term, Term)> = BTreeSet::new();
    for level in 0..depth {
        let mut next = BTreeSet::new();
        for (p, q) in &current {
            if !visited.insert((p.clone(), q.clone())) {
                continue;
            }
            for s in stores {
                let clause = match (imp_step(p, s)?, imp_step(q, s)?) {
                    (ImpStepResult::Continue(p2, s1), ImpStepResult::Continue(q2, s2)) => {
                        if s1 != s2 {
                            Some(BisimClause::StepStoreMismatch { left: s1, right: s2 })
                        } else {
                            next.insert((p2, q2));
                            None
                        }
                    }
                    (ImpStepResult::Done(s1), ImpStepResult::Done(s2)) => {
                        if s1 != s2 {
                            Some(BisimClause::FinalStoreMismatch { left: s1, right: s2 })
                        } else {
                            None
                        }
                    }
                    (ImpStepResult::Continue(..), ImpStepResult::Done(_)) => {
                        Some(BisimClause::StepVsStop)
                    }
                    (ImpStepResult::Done(_), ImpStepResult::Continue(..)) => {
                        Some(BisimClause::StopVsStep)
                    }
                };
                if let Some(clause) = clause {
                    return Ok(BisimVerdict::Fails(BisimCounterexample {
                        left: p.clone(),
                        right: q.clone(),
                        store: s.clone(),
                        depth: level + 1,
                        clause,
                    }));
                }
            }
        }
        current = next;
    }
    Ok(BisimVerdict::HoldsUpToSample)
}
