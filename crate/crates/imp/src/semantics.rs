use core_syntax::{ImpExpr, Term, VarStore};
use thiserror::Error;

use crate::ast::{seq, view, ImpView};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ImpError {
    #[error("arithmetic overflow during expression evaluation")]
    Overflow,
    #[error("ill-formed program term: {0}")]
    IllFormed(String),
}

/// Expression evaluation over a total store. Arithmetic is 64-bit and
/// overflow is reported, never wrapped.
pub fn eev(e: &ImpExpr, s: &VarStore) -> Result<i64, ImpError> {
    match e {
        ImpExpr::Const(n) => Ok(*n),
        ImpExpr::Var(x) => Ok(s.get(x)),
        ImpExpr::Add(a, b) => eev(a, s)?.checked_add(eev(b, s)?).ok_or(ImpError::Overflow),
        ImpExpr::Sub(a, b) => eev(a, s)?.checked_sub(eev(b, s)?).ok_or(ImpError::Overflow),
        ImpExpr::Mul(a, b) => eev(a, s)?.checked_mul(eev(b, s)?).ok_or(ImpError::Overflow),
    }
}

/// Result of one small step: the program either continues in a new store or
/// terminates with a final store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImpStepResult {
    Continue(Term, VarStore),
    Done(VarStore),
}

/// The unique small step from `(p, s)`:
/// - `skip, s ↓ s`
/// - `x := e, s ↓ s[x := eev(e,s)]`
/// - `while e p` exits when the guard reads 0 and unfolds to `p; while e p`
///   (store unchanged) otherwise
/// - `p; q` steps inside `p`, or hands over to `q` when `p` terminates.
pub fn imp_step(p: &Term, s: &VarStore) -> Result<ImpStepResult, ImpError> {
    match view(p)? {
        ImpView::Skip => Ok(ImpStepResult::Done(s.clone())),
        ImpView::Assign { var, expr } => {
            let n = eev(expr, s)?;
            Ok(ImpStepResult::Done(s.with(var, n)))
        }
        ImpView::While { guard, body } => {
            if eev(guard, s)? == 0 {
                Ok(ImpStepResult::Done(s.clone()))
            } else {
                Ok(ImpStepResult::Continue(seq(body.clone(), p.clone()), s.clone()))
            }
        }
        ImpView::Seq(p1, q) => match imp_step(p1, s)? {
            ImpStepResult::Continue(p1_next, s_next) => {
                Ok(ImpStepResult::Continue(seq(p1_next, q.clone()), s_next))
            }
            ImpStepResult::Done(s_next) => Ok(ImpStepResult::Continue(q.clone(), s_next)),
        },
    }
}

/// A bounded run: the stores after each step, plus the final store when the
/// run finished within fuel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceResult {
    Finished { emitted: Vec<VarStore>, final_store: VarStore },
    Cut { emitted: Vec<VarStore> },
}

pub fn imp_trace(p: &Term, s: &VarStore, fuel: usize) -> Result<TraceResult, ImpError> {
    let mut current = p.clone();
    let mut store = s.clone();
    let mut emitted = Vec::new();
    for _ in 0..fuel {
        match imp_step(&current, &store)? {
            ImpStepResult::Continue(next, s_next) => {
                emitted.push(s_next.clone());
                current = next;
                store = s_next;
            }
            ImpStepResult::Done(final_store) => {
                return Ok(TraceResult::Finished { emitted, final_store });
            }
        }
    }
    Ok(TraceResult::Cut { emitted })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostResult {
    Finished { steps: usize, final_store: VarStore },
    Cut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerResult {
    Finished(VarStore),
    Cut,
}

/// Step count plus final store; the count is the number of emitted states.
pub fn cost_of_trace(t: &TraceResult) -> CostResult {
    match t {
        TraceResult::Finished { emitted, final_store } => {
            CostResult::Finished { steps: emitted.len(), final_store: final_store.clone() }
        }
        TraceResult::Cut { .. } => CostResult::Cut,
    }
}

pub fn ter_of_trace(t: &TraceResult) -> TerResult {
    match t {
        TraceResult::Finished { final_store, .. } => TerResult::Finished(final_store.clone()),
        TraceResult::Cut { .. } => TerResult::Cut,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{assign, skip, while_};

    fn x_times_y_plus_3_minus_y() -> ImpExpr {
        ImpExpr::sub(
            ImpExpr::mul(ImpExpr::var("x"), ImpExpr::add(ImpExpr::var("y"), ImpExpr::Const(3))),
            ImpExpr::var("y"),
        )
    }

    #[test]
    fn eev_reads_variables_from_the_store() {
        let s = VarStore::from_pairs([("x", 2), ("y", 1)]);
        assert_eq!(eev(&x_times_y_plus_3_minus_y(), &s), Ok(7));
        assert_eq!(eev(&ImpExpr::Const(0), &VarStore::new()), Ok(0));
    }

    #[test]
    fn eev_reports_overflow() {
        let e = ImpExpr::mul(ImpExpr::Const(i64::MAX), ImpExpr::Const(2));
        assert_eq!(eev(&e, &VarStore::new()), Err(ImpError::Overflow));
    }

    #[test]
    fn skip_terminates_with_the_same_store() {
        let s = VarStore::from_pairs([("x", 5)]);
        assert_eq!(imp_step(&skip(), &s), Ok(ImpStepResult::Done(s)));
    }

    #[test]
    fn seq_hands_over_on_termination_of_the_head() {
        // x := 1; x := 2 makes one step to (x := 2) in s[x := 1].
        let s0 = VarStore::new();
        let p = seq(assign("x", ImpExpr::Const(1)), assign("x", ImpExpr::Const(2)));
        assert_eq!(
            imp_step(&p, &s0),
            Ok(ImpStepResult::Continue(assign("x", ImpExpr::Const(2)), s0.with("x", 1)))
        );
    }

    #[test]
    fn while_exits_on_zero_guard() {
        let p = while_(ImpExpr::var("x"), assign("x", ImpExpr::sub(ImpExpr::var("x"), ImpExpr::Const(1))));
        let s = VarStore::new(); // x reads 0
        assert_eq!(imp_step(&p, &s), Ok(ImpStepResult::Done(s)));
    }

    #[test]
    fn two_assignments_trace() {
        let s0 = VarStore::new();
        let p = seq(assign("x", ImpExpr::Const(1)), assign("x", ImpExpr::Const(2)));
        assert_eq!(
            imp_trace(&p, &s0, 10),
            Ok(TraceResult::Finished {
                emitted: vec![s0.with("x", 1)],
                final_store: s0.with("x", 2),
            })
        );
    }

    #[test]
    fn countdown_loop_trace() {
        let p = while_(ImpExpr::var("x"), assign("x", ImpExpr::sub(ImpExpr::var("x"), ImpExpr::Const(1))));
        let s = VarStore::from_pairs([("x", 1)]);
        let s_zero = VarStore::new();
        assert_eq!(
            imp_trace(&p, &s, 10),
            Ok(TraceResult::Finished {
                emitted: vec![s.clone(), s_zero.clone()],
                final_store: s_zero,
            })
        );
    }

    #[test]
    fn diverging_loop_is_cut() {
        let p = while_(ImpExpr::Const(1), skip());
        match imp_trace(&p, &VarStore::new(), 5) {
            Ok(TraceResult::Cut { emitted }) => assert_eq!(emitted.len(), 5),
            other => panic!("expected Cut, got {other:?}"),
        }
    }

    #[test]
    fn cost_and_ter_extractors() {
        let s = VarStore::from_pairs([("x", 1)]);
        let t = TraceResult::Finished { emitted: vec![s.clone()], final_store: s.clone() };
        assert_eq!(cost_of_trace(&t), CostResult::Finished { steps: 1, final_store: s.clone() });
        assert_eq!(ter_of_trace(&t), TerResult::Finished(s.clone()));
        let immediate = TraceResult::Finished { emitted: vec![], final_store: s.clone() };
        assert_eq!(cost_of_trace(&immediate), CostResult::Finished { steps: 0, final_store: s });
        assert_eq!(cost_of_trace(&TraceResult::Cut { emitted: vec![] }), CostResult::Cut);
        assert_eq!(ter_of_trace(&TraceResult::Cut { emitted: vec![] }), TerResult::Cut);
    }
}
