use std::collections::BTreeSet;

use core_syntax::VarStore;

use crate::semantics::{writer_step, Imp2Error, WriterStep};
use crate::writer::Writer;

/// Observation level for weak transitions: level 1 closes over silent steps
/// only (emitted states are observable); level 2 also absorbs emitting steps,
/// ignoring the states they produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    One,
    Two,
}

/// The weak-transition data of one writer:
/// - `silent_reach`: the ⇒-targets (always contains the source),
/// - `outputs`: pairs (s, d) reachable by a weak path ending in one emitting
///   step — no trailing silent closure,
/// - `terminations`: stores reachable by ⇒ followed by ↓.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakClosure {
    pub silent_reach: BTreeSet<Writer>,
    pub outputs: BTreeSet<(VarStore, Writer)>,
    pub terminations: BTreeSet<VarStore>,
    pub level: Level,
    pub truncated: bool,
}

/// Worklist exploration of the weak transitions from `c`; `fuel` bounds the
/// number of distinct writers expanded, and `truncated` reports an
/// incomplete closure instead of silently dropping states.
pub fn weak_closure(c: &Writer, fuel: usize, level: Level) -> Result<WeakClosure, Imp2Error> {
    let mut silent_reach = BTreeSet::new();
    let mut outputs = BTreeSet::new();
    let mut terminations = BTreeSet::new();
    let mut queue = vec![c.clone()];
    silent_reach.insert(c.clone());
    let mut expanded = 0usize;
    let mut truncated = false;
    while let Some(d) = queue.pop() {
        if expanded >= fuel {
            truncated = true;
            break;
        }
        expanded += 1;
        match writer_step(&d)? {
            WriterStep::Silent(e) => {
                if silent_reach.insert(e.clone()) {
                    queue.push(e);
                }
            }
            WriterStep::Output(e, s) => {
                outputs.insert((s, e.clone()));
                if level == Level::Two && silent_reach.insert(e.clone()) {
                    queue.push(e);
                }
            }
            WriterStep::Done(s) => {
                terminations.insert(s);
            }
        }
    }
    Ok(WeakClosure { silent_reach, outputs, terminations, level, truncated })
}
