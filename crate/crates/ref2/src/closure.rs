use std::collections::{BTreeSet, VecDeque};

use crate::ast::{RefStore, RefValue, RefWriter};
use crate::semantics::{ref_writer_steps, RefWriterStep};

/// The weak closure of a writer: everything reachable through `⇒`, which
/// absorbs silent *and* announcing steps alike, together with the observable
/// terminations `⇓ s` and `⇓ v, s` along the way. Allocation contributes its
/// canonical representative only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeakClosure {
    pub silent_reach: BTreeSet<RefWriter>,
    pub terminations_store: BTreeSet<RefStore>,
    pub terminations_val: BTreeSet<(RefValue, RefStore)>,
    /// Set when `fuel` ran out before the frontier emptied; the sets are
    /// then under-approximations.
    pub truncated: bool,
}

/// Explore `⇒` from `c` breadth-first, visiting at most `fuel` distinct
/// configurations.
pub fn ref_weak_closure(c: &RefWriter, fuel: usize) -> WeakClosure {
    let mut out = WeakClosure::default();
    let mut queue = VecDeque::new();
    queue.push_back(c.clone());
    let mut budget = fuel;
    while let Some(d) = queue.pop_front() {
        if !out.silent_reach.insert(d.clone()) {
            continue;
        }
        if budget == 0 {
            out.truncated = true;
            // Leave the configuration in the reach set (d ⇒ d holds), but
            // do not expand it.
            continue;
        }
        budget -= 1;
        for step in ref_writer_steps(&d).steps {
            match step {
                RefWriterStep::Silent(d2) | RefWriterStep::Output(d2, _) => {
                    if !out.silent_reach.contains(&d2) {
                        queue.push_back(d2);
                    }
                }
                RefWriterStep::DoneStore(s) => {
                    out.terminations_store.insert(s);
                }
                RefWriterStep::DoneVal(v, s) => {
                    out.terminations_val.insert((v, s));
                }
            }
        }
    }
    out
}
