use core_syntax::{Term, VarStore};
use imp::{eev, seq as rseq, view, ImpError, ImpView, TraceResult};
use thiserror::Error;

use crate::writer::{RWTerm, Writer};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Imp2Error {
    #[error(transparent)]
    Imp(#[from] ImpError),
    #[error("{0}")]
    ArgMismatch(String),
}

/// One writer step: silent, state-emitting, or terminating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WriterStep {
    Silent(Writer),
    Output(Writer, VarStore),
    Done(VarStore),
}

/// The unique writer `c` with `p,s → c`:
/// - `p;q, s → [p]_s ; q`
/// - `skip, s → ret_s`
/// - `x := e, s → ret_{s[x := eev(e,s)]}`
/// - `while e p, s → ret_s` when the guard reads 0, and
///   `while e p, s → s.[p; while e p]_s` otherwise.
pub fn reader_step(p: &Term, s: &VarStore) -> Result<Writer, Imp2Error> {
    match view(p)? {
        ImpView::Seq(p1, q) => Ok(Writer::seq(Writer::run(p1.clone(), s.clone()), q.clone())),
        ImpView::Skip => Ok(Writer::Ret(s.clone())),
        ImpView::Assign { var, expr } => {
            let n = eev(expr, s)?;
            Ok(Writer::Ret(s.with(var, n)))
        }
        ImpView::While { guard, .. } => {
            if eev(guard, s)? == 0 {
                Ok(Writer::Ret(s.clone()))
            } else {
                Ok(Writer::emit(s.clone(), Writer::run(rseq(p.children[1].clone(), p.clone()), s.clone())))
            }
        }
    }
}

/// The unique step of a writer:
/// - `[p]_s` delegates to the reader step of `p` at `s`
/// - `ret_s ↓ s`
/// - `s.c →ˢ c`
/// - `c;q` propagates `c`'s silent and emitting steps, and when `c ↓ s'`
///   emits `s'` and starts `q` on it: `c;q →^{s'} [q]_{s'}`.
pub fn writer_step(c: &Writer) -> Result<WriterStep, Imp2Error> {
    match c {
        Writer::Run(p, s) => Ok(WriterStep::Silent(reader_step(p, s)?)),
        Writer::Ret(s) => Ok(WriterStep::Done(s.clone())),
        Writer::Emit(s, d) => Ok(WriterStep::Output((**d).clone(), s.clone())),
        Writer::Seq(c1, q) => match writer_step(c1)? {
            WriterStep::Silent(d) => Ok(WriterStep::Silent(Writer::seq(d, q.clone()))),
            WriterStep::Output(d, s) => Ok(WriterStep::Output(Writer::seq(d, q.clone()), s)),
            WriterStep::Done(s) => {
                Ok(WriterStep::Output(Writer::run(q.clone(), s.clone()), s))
            }
        },
    }
}

/// Bounded trace of a term of either sort; `s` must be supplied exactly for
/// readers. Fuel counts writer steps (silent ones included).
pub fn imp2_trace(x: &RWTerm, s: Option<&VarStore>, fuel: usize) -> Result<TraceResult, Imp2Error> {
    let mut current = match (x, s) {
        (RWTerm::Reader(p), Some(s)) => reader_step(p, s)?,
        (RWTerm::Writer(c), None) => c.clone(),
        (RWTerm::Reader(_), None) => {
            return Err(Imp2Error::ArgMismatch("reader term needs an input store".into()))
        }
        (RWTerm::Writer(_), Some(_)) => {
            return Err(Imp2Error::ArgMismatch("writer term takes no input store".into()))
        }
    };
    let mut emitted = Vec::new();
    for _ in 0..fuel {
        match writer_step(&current)? {
            WriterStep::Silent(d) => current = d,
            WriterStep::Output(d, s) => {
                emitted.push(s);
                current = d;
            }
            WriterStep::Done(final_store) => {
                return Ok(TraceResult::Finished { emitted, final_store })
            }
        }
    }
    Ok(TraceResult::Cut { emitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use imp::{assign, skip, while_};
    use core_syntax::ImpExpr;

    fn s0() -> VarStore {
        VarStore::from_pairs([("x", 3)])
    }

    #[test]
    fn seq_reader_rule() {
        let p = rseq(skip(), assign("x", ImpExpr::Const(1)));
        assert_eq!(
            reader_step(&p, &s0()),
            Ok(Writer::seq(Writer::run(skip(), s0()), assign("x", ImpExpr::Const(1))))
        );
    }

    #[test]
    fn skip_and_assign_reader_rules() {
        assert_eq!(reader_step(&skip(), &s0()), Ok(Writer::Ret(s0())));
        assert_eq!(
            reader_step(&assign("x", ImpExpr::Const(1)), &s0()),
            Ok(Writer::Ret(s0().with("x", 1)))
        );
    }

    #[test]
    fn while_reader_rules() {
        let w = while_(ImpExpr::var("x"), skip());
        let zero = VarStore::new();
        assert_eq!(reader_step(&w, &zero), Ok(Writer::Ret(zero)));
        let unfolded = rseq(skip(), w.clone());
        assert_eq!(
            reader_step(&w, &s0()),
            Ok(Writer::emit(s0(), Writer::run(unfolded, s0())))
        );
    }

    #[test]
    fn derived_ret_seq_rule_emits() {
        // ret_s ; q →ˢ [q]_s
        let q = assign("x", ImpExpr::Const(2));
        let c = Writer::seq(Writer::Ret(s0()), q.clone());
        assert_eq!(writer_step(&c), Ok(WriterStep::Output(Writer::run(q, s0()), s0())));
    }

    #[test]
    fn ret_and_emit_writer_rules() {
        assert_eq!(writer_step(&Writer::Ret(s0())), Ok(WriterStep::Done(s0())));
        let c = Writer::emit(s0(), Writer::Ret(VarStore::new()));
        assert_eq!(
            writer_step(&c),
            Ok(WriterStep::Output(Writer::Ret(VarStore::new()), s0()))
        );
    }

    #[test]
    fn trace_of_two_assignments_matches_base_language() {
        let p = rseq(assign("x", ImpExpr::Const(1)), assign("x", ImpExpr::Const(2)));
        let s = VarStore::new();
        assert_eq!(
            imp2_trace(&RWTerm::Reader(p), Some(&s), 50),
            Ok(TraceResult::Finished {
                emitted: vec![s.with("x", 1)],
                final_store: s.with("x", 2)
            })
        );
    }

    #[test]
    fn trace_of_ret_is_immediate() {
        assert_eq!(
            imp2_trace(&RWTerm::Writer(Writer::Ret(s0())), None, 5),
            Ok(TraceResult::Finished { emitted: vec![], final_store: s0() })
        );
    }

    #[test]
    fn diverging_loop_is_cut() {
        let w = while_(ImpExpr::Const(1), skip());
        match imp2_trace(&RWTerm::Reader(w), Some(&VarStore::new()), 20) {
            Ok(TraceResult::Cut { .. }) => {}
            other => panic!("expected Cut, got {other:?}"),
        }
    }

    #[test]
    fn store_argument_is_validated() {
        assert!(imp2_trace(&RWTerm::Reader(skip()), None, 5).is_err());
        assert!(imp2_trace(&RWTerm::Writer(Writer::Ret(s0())), Some(&s0()), 5).is_err());
    }
}
