use std::fmt;

use crate::ast::{Loc, RefExpr, RefReader, RefStore, RefWriter};
use crate::semantics::{certified_run, certified_run_writer, TermStatus};

/// A reader-sorted context with a single reader hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RCtx {
    Hole,
    While(RefExpr, Box<RCtx>),
    Assign(RefExpr, Box<RCtx>),
    IfThen(RefExpr, Box<RCtx>, RefReader),
    IfElse(RefExpr, RefReader, Box<RCtx>),
    SeqL(Box<RCtx>, RefReader),
    SeqR(RefReader, Box<RCtx>),
    Alloc(Box<RCtx>),
    Proc(Box<RCtx>),
}

/// A writer-sorted context with a single reader hole. The hole can sit
/// under a run `[·]_s`, inside the reader tail of a sequencer, in the value
/// slot of `ret`, or below a writer frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WCtx {
    Run(RCtx, RefStore),
    RetVal(RCtx, RefStore),
    Assign(RefExpr, Box<WCtx>),
    SeqW(Box<WCtx>, RefReader),
    SeqTail(RefWriter, RCtx),
    Alloc(Box<WCtx>),
    Announce(RefStore, Box<WCtx>),
}

impl RCtx {
    pub fn apply(&self, p: &RefReader) -> RefReader {
        match self {
            RCtx::Hole => p.clone(),
            RCtx::While(e, c) => RefReader::while_(e.clone(), c.apply(p)),
            RCtx::Assign(e, c) => RefReader::assign(e.clone(), c.apply(p)),
            RCtx::IfThen(e, c, r) => RefReader::if_(e.clone(), c.apply(p), r.clone()),
            RCtx::IfElse(e, r, c) => RefReader::if_(e.clone(), r.clone(), c.apply(p)),
            RCtx::SeqL(c, r) => RefReader::seq(c.apply(p), r.clone()),
            RCtx::SeqR(r, c) => RefReader::seq(r.clone(), c.apply(p)),
            RCtx::Alloc(c) => RefReader::alloc(c.apply(p)),
            RCtx::Proc(c) => RefReader::proc(c.apply(p)),
        }
    }
}

impl WCtx {
    pub fn apply(&self, p: &RefReader) -> RefWriter {
        match self {
            WCtx::Run(c, s) => RefWriter::run(c.apply(p), s.clone()),
            WCtx::RetVal(c, s) => {
                RefWriter::RetVal(crate::ast::RefValue::Reader(c.apply(p)), s.clone())
            }
            WCtx::Assign(e, w) => RefWriter::assign(e.clone(), w.apply(p)),
            WCtx::SeqW(w, r) => RefWriter::seq(w.apply(p), r.clone()),
            WCtx::SeqTail(w, c) => RefWriter::seq(w.clone(), c.apply(p)),
            WCtx::Alloc(w) => RefWriter::alloc(w.apply(p)),
            WCtx::Announce(s, w) => RefWriter::announce(s.clone(), w.apply(p)),
        }
    }
}

impl fmt::Display for RCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RCtx::Hole => write!(f, "·"),
            RCtx::While(e, c) => write!(f, "while {e} {{ {c} }}"),
            RCtx::Assign(e, c) => write!(f, "{e} := ({c})"),
            RCtx::IfThen(e, c, r) => write!(f, "if {e} {{ {c} }} else {{ {r} }}"),
            RCtx::IfElse(e, r, c) => write!(f, "if {e} {{ {r} }} else {{ {c} }}"),
            RCtx::SeqL(c, r) => write!(f, "({c}) ; {r}"),
            RCtx::SeqR(r, c) => write!(f, "{r} ; {c}"),
            RCtx::Alloc(c) => write!(f, "&({c})"),
            RCtx::Proc(c) => write!(f, "proc {{ {c} }}"),
        }
    }
}

impl fmt::Display for WCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WCtx::Run(c, s) => write!(f, "[{c}]@{s}"),
            WCtx::RetVal(c, s) => write!(f, "ret({c})@{s}"),
            WCtx::Assign(e, w) => write!(f, "{e} := ({w})"),
            WCtx::SeqW(w, r) => write!(f, "({w}) ; {r}"),
            WCtx::SeqTail(w, c) => write!(f, "({w}) ; {c}"),
            WCtx::Alloc(w) => write!(f, "&({w})"),
            WCtx::Announce(s, w) => write!(f, "{s}.({w})"),
        }
    }
}

/// Fixed leaf pool for context expressions: small constants, two locations,
/// their dereferences, and two countdown shapes. Each entry carries its
/// node count.
fn expr_pool() -> Vec<(RefExpr, usize)> {
    let l0 = RefExpr::Loc(Loc(0));
    let l1 = RefExpr::Loc(Loc(1));
    let mut pool = vec![
        (RefExpr::Int(0), 1),
        (RefExpr::Int(1), 1),
        (RefExpr::Int(2), 1),
        (l0.clone(), 1),
        (l1.clone(), 1),
        (RefExpr::deref(l0.clone()), 2),
        (RefExpr::deref(l1), 2),
    ];
    pool.push((RefExpr::sub(RefExpr::deref(l0.clone()), RefExpr::Int(1)), 4));
    pool.push((RefExpr::sub(RefExpr::deref(l0), RefExpr::Int(2)), 4));
    pool
}

fn filler_pool() -> Vec<(RefReader, usize)> {
    vec![(RefReader::Skip, 1)]
}

fn rctxs_of_size(n: usize) -> Vec<RCtx> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(RCtx::Hole);
        return out;
    }
    for inner in rctxs_of_size(n - 1) {
        out.push(RCtx::Alloc(Box::new(inner.clone())));
        out.push(RCtx::Proc(Box::new(inner)));
    }
    for (e, k) in expr_pool() {
        if n > 1 + k {
            for inner in rctxs_of_size(n - 1 - k) {
                out.push(RCtx::While(e.clone(), Box::new(inner.clone())));
                out.push(RCtx::Assign(e.clone(), Box::new(inner)));
            }
        }
        for (r, m) in filler_pool() {
            if n > 1 + k + m {
                for inner in rctxs_of_size(n - 1 - k - m) {
                    out.push(RCtx::IfThen(e.clone(), Box::new(inner.clone()), r.clone()));
                    out.push(RCtx::IfElse(e.clone(), r.clone(), Box::new(inner)));
                }
            }
        }
    }
    for (r, m) in filler_pool() {
        if n > 1 + m {
            for inner in rctxs_of_size(n - 1 - m) {
                out.push(RCtx::SeqL(Box::new(inner.clone()), r.clone()));
                out.push(RCtx::SeqR(r.clone(), Box::new(inner)));
            }
        }
    }
    out
}

fn wctxs_of_size(n: usize, stores: &[RefStore]) -> Vec<WCtx> {
    let mut out = Vec::new();
    // A store slot counts one node.
    if n >= 3 {
        for s in stores {
            for inner in rctxs_of_size(n - 2) {
                out.push(WCtx::Run(inner.clone(), s.clone()));
                out.push(WCtx::RetVal(inner, s.clone()));
            }
            for inner in wctxs_of_size(n - 2, stores) {
                out.push(WCtx::Announce(s.clone(), Box::new(inner)));
            }
        }
    }
    if n >= 2 {
        for inner in wctxs_of_size(n - 1, stores) {
            out.push(WCtx::Alloc(Box::new(inner)));
        }
    }
    for (e, k) in expr_pool() {
        if n > 1 + k {
            for inner in wctxs_of_size(n - 1 - k, stores) {
                out.push(WCtx::Assign(e.clone(), Box::new(inner)));
            }
        }
    }
    for (r, m) in filler_pool() {
        if n > 1 + m {
            for inner in wctxs_of_size(n - 1 - m, stores) {
                out.push(WCtx::SeqW(Box::new(inner), r.clone()));
            }
        }
    }
    // Hole in the reader tail, behind a concrete writer of weight 3.
    if n > 4 {
        for s in stores {
            for inner in rctxs_of_size(n - 4) {
                out.push(WCtx::SeqTail(RefWriter::run(RefReader::Skip, s.clone()), inner));
            }
        }
    }
    out
}

/// Result of a refutation attempt: the first context (and store, for reader
/// contexts) on which the two programs' certified termination behaviours
/// disagree, or `NotFound` with the number of contexts tried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CtxOutcome {
    Counterexample {
        context: String,
        store: Option<RefStore>,
        left: TermStatus,
        right: TermStatus,
    },
    NotFound {
        contexts_tried: usize,
    },
}

impl CtxOutcome {
    pub fn found(&self) -> bool {
        matches!(self, CtxOutcome::Counterexample { .. })
    }
}

/// A disagreement needs one side to terminate and the other to be
/// *certifiably* non-terminating; fuel exhaustion never counts.
fn distinguishes(left: &TermStatus, right: &TermStatus) -> bool {
    matches!(left, TermStatus::Terminates(_)) && right.certified_nontermination()
        || matches!(right, TermStatus::Terminates(_)) && left.certified_nontermination()
}

/// Search all single-hole contexts of node count at most `max_size` (reader
/// and writer sorted, smallest first) for one that distinguishes `p` from
/// `q` by termination. Reader contexts are run on every sampled store.
pub fn ctx_refute(
    p: &RefReader,
    q: &RefReader,
    max_size: usize,
    store_sample: &[RefStore],
    fuel: usize,
) -> CtxOutcome {
    let mut tried = 0;
    for n in 1..=max_size {
        for ctx in rctxs_of_size(n) {
            tried += 1;
            let cp = ctx.apply(p);
            let cq = ctx.apply(q);
            for s in store_sample {
                let left = certified_run(&cp, s, fuel);
                let right = certified_run(&cq, s, fuel);
                if distinguishes(&left, &right) {
                    return CtxOutcome::Counterexample {
                        context: ctx.to_string(),
                        store: Some(s.clone()),
                        left,
                        right,
                    };
                }
            }
        }
        for ctx in wctxs_of_size(n, store_sample) {
            tried += 1;
            let left = certified_run_writer(&ctx.apply(p), fuel);
            let right = certified_run_writer(&ctx.apply(q), fuel);
            if distinguishes(&left, &right) {
                return CtxOutcome::Counterexample {
                    context: ctx.to_string(),
                    store: None,
                    left,
                    right,
                };
            }
        }
    }
    CtxOutcome::NotFound { contexts_tried: tried }
}
