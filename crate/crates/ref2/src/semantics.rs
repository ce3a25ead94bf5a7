use std::collections::HashSet;

use crate::ast::{RefExpr, RefReader, RefStore, RefValue, RefWriter};

/// Partial expression evaluation. `None` means the expression is undefined
/// on this store: a dereference of a non-location or unmapped location, an
/// arithmetic operand that is not an integer, or integer overflow.
pub fn ref_eev(e: &RefExpr, s: &RefStore) -> Option<RefValue> {
    match e {
        RefExpr::Loc(l) => Some(RefValue::Loc(*l)),
        RefExpr::Int(n) => Some(RefValue::Int(*n)),
        RefExpr::Deref(e) => match ref_eev(e, s)? {
            RefValue::Loc(l) => s.get(l).cloned(),
            _ => None,
        },
        RefExpr::Add(a, b) => match (ref_eev(a, s)?, ref_eev(b, s)?) {
            (RefValue::Int(x), RefValue::Int(y)) => x.checked_add(y).map(RefValue::Int),
            _ => None,
        },
        RefExpr::Sub(a, b) => match (ref_eev(a, s)?, ref_eev(b, s)?) {
            (RefValue::Int(x), RefValue::Int(y)) => x.checked_sub(y).map(RefValue::Int),
            _ => None,
        },
    }
}

/// A reader with no applicable rule: some side condition evaluated to
/// `Undefined` or to a value of the wrong kind. Carries the failing premise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stuck {
    pub premise: String,
}

fn wrong_guard(what: &str, e: &RefExpr, s: &RefStore) -> Stuck {
    let premise = match ref_eev(e, s) {
        None => format!("{what}: eev({e}, {s}) is undefined"),
        Some(v) => format!("{what}: eev({e}, {s}) = {v} is not an integer"),
    };
    Stuck { premise }
}

/// One reader transition `p, s → c`. Deterministic and partial: each reader
/// shape has at most one applicable rule.
pub fn ref_reader_step(p: &RefReader, s: &RefStore) -> Result<RefWriter, Stuck> {
    match p {
        RefReader::Skip => Ok(RefWriter::RetStore(s.clone())),
        RefReader::While(e, body) => match ref_eev(e, s) {
            Some(RefValue::Int(0)) => Ok(RefWriter::RetStore(s.clone())),
            Some(RefValue::Int(_)) => {
                let unfold = RefReader::seq((**body).clone(), p.clone());
                Ok(RefWriter::announce(s.clone(), RefWriter::run(unfold, s.clone())))
            }
            _ => Err(wrong_guard("while guard", e, s)),
        },
        RefReader::Assign(e, p) => {
            Ok(RefWriter::assign(e.clone(), RefWriter::run((**p).clone(), s.clone())))
        }
        RefReader::If(e, p, q) => match ref_eev(e, s) {
            Some(RefValue::Int(0)) => {
                Ok(RefWriter::announce(s.clone(), RefWriter::run((**q).clone(), s.clone())))
            }
            Some(RefValue::Int(_)) => {
                Ok(RefWriter::announce(s.clone(), RefWriter::run((**p).clone(), s.clone())))
            }
            _ => Err(wrong_guard("if guard", e, s)),
        },
        RefReader::Seq(p, q) => {
            Ok(RefWriter::seq(RefWriter::run((**p).clone(), s.clone()), (**q).clone()))
        }
        RefReader::Alloc(p) => Ok(RefWriter::alloc(RefWriter::run((**p).clone(), s.clone()))),
        RefReader::Expr(e) => match ref_eev(e, s) {
            Some(RefValue::Reader(p)) => {
                Ok(RefWriter::announce(s.clone(), RefWriter::run(p, s.clone())))
            }
            Some(v) => Ok(RefWriter::RetVal(v, s.clone())),
            None => Err(Stuck { premise: format!("expr: eev({e}, {s}) is undefined") }),
        },
        RefReader::Proc(p) => {
            Ok(RefWriter::RetVal(RefValue::Reader((**p).clone()), s.clone()))
        }
    }
}

/// One writer transition: a silent step, a state-announcing step, or a
/// termination with a store (and possibly a value).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RefWriterStep {
    Silent(RefWriter),
    Output(RefWriter, RefStore),
    DoneStore(RefStore),
    DoneVal(RefValue, RefStore),
}

/// The step set of a writer. Allocation may finish at any fresh location;
/// the set holds only the canonical choice (the least unused location) and
/// `alloc_family` records that it stands for the whole fresh-location
/// family. Every other rule contributes at most one step, so `steps` always
/// has at most one element and is empty exactly when the writer is stuck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriterSteps {
    pub steps: Vec<RefWriterStep>,
    pub alloc_family: bool,
}

impl WriterSteps {
    fn stuck() -> WriterSteps {
        WriterSteps { steps: Vec::new(), alloc_family: false }
    }

    fn one(step: RefWriterStep) -> WriterSteps {
        WriterSteps { steps: vec![step], alloc_family: false }
    }
}

pub fn ref_writer_steps(c: &RefWriter) -> WriterSteps {
    match c {
        RefWriter::Run(p, s) => match ref_reader_step(p, s) {
            Ok(d) => WriterSteps::one(RefWriterStep::Silent(d)),
            Err(_) => WriterSteps::stuck(),
        },
        RefWriter::RetVal(v, s) => WriterSteps::one(RefWriterStep::DoneVal(v.clone(), s.clone())),
        RefWriter::RetStore(s) => WriterSteps::one(RefWriterStep::DoneStore(s.clone())),
        RefWriter::Announce(s, c) => {
            WriterSteps::one(RefWriterStep::Output((**c).clone(), s.clone()))
        }
        RefWriter::Alloc(c) => {
            let inner = ref_writer_steps(c);
            let mut out = WriterSteps { steps: Vec::new(), alloc_family: inner.alloc_family };
            for step in inner.steps {
                match step {
                    RefWriterStep::Silent(d) => {
                        out.steps.push(RefWriterStep::Silent(RefWriter::alloc(d)));
                    }
                    RefWriterStep::Output(d, s) => {
                        out.steps.push(RefWriterStep::Output(RefWriter::alloc(d), s));
                    }
                    RefWriterStep::DoneVal(v, s) => {
                        let l = s.min_unused();
                        out.steps.push(RefWriterStep::DoneVal(
                            RefValue::Loc(l),
                            s.update(l, v),
                        ));
                        out.alloc_family = true;
                    }
                    // `&c` has no rule for a store-only termination of `c`.
                    RefWriterStep::DoneStore(_) => {}
                }
            }
            out
        }
        RefWriter::Seq(c, q) => {
            let inner = ref_writer_steps(c);
            let mut out = WriterSteps { steps: Vec::new(), alloc_family: inner.alloc_family };
            for step in inner.steps {
                match step {
                    RefWriterStep::Silent(d) => {
                        out.steps.push(RefWriterStep::Silent(RefWriter::seq(d, q.clone())));
                    }
                    RefWriterStep::Output(d, s) => {
                        out.steps.push(RefWriterStep::Output(RefWriter::seq(d, q.clone()), s));
                    }
                    // A value termination announces the handover store and
                    // discards the value; a store termination is silent.
                    RefWriterStep::DoneVal(_, s) => {
                        out.steps.push(RefWriterStep::Output(
                            RefWriter::run(q.clone(), s.clone()),
                            s,
                        ));
                    }
                    RefWriterStep::DoneStore(s) => {
                        out.steps.push(RefWriterStep::Silent(RefWriter::run(q.clone(), s)));
                    }
                }
            }
            out
        }
        RefWriter::Assign(e, c) => {
            let inner = ref_writer_steps(c);
            let mut out = WriterSteps { steps: Vec::new(), alloc_family: inner.alloc_family };
            for step in inner.steps {
                match step {
                    RefWriterStep::Silent(d) => {
                        out.steps
                            .push(RefWriterStep::Silent(RefWriter::assign(e.clone(), d)));
                    }
                    RefWriterStep::Output(d, s) => {
                        out.steps
                            .push(RefWriterStep::Output(RefWriter::assign(e.clone(), d), s));
                    }
                    // The target location is read off the final store.
                    RefWriterStep::DoneVal(v, s) => {
                        if let Some(RefValue::Loc(l)) = ref_eev(e, &s) {
                            out.steps.push(RefWriterStep::DoneStore(s.update(l, v)));
                        }
                    }
                    // No rule lets an assignment finish without a value.
                    RefWriterStep::DoneStore(_) => {}
                }
            }
            out
        }
    }
}

/// Result of driving a reader to completion with the canonical step choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefOutcome {
    Value(RefValue, RefStore),
    Store(RefStore),
    Stuck(String),
    Cut,
}

/// Run `p` on `s`, taking canonical writer steps until termination,
/// stuckness, or `fuel` writer transitions have been spent.
pub fn ref_run(p: &RefReader, s: &RefStore, fuel: usize) -> RefOutcome {
    let mut c = match ref_reader_step(p, s) {
        Ok(c) => c,
        Err(stuck) => return RefOutcome::Stuck(stuck.premise),
    };
    for _ in 0..fuel {
        let next = ref_writer_steps(&c);
        match next.steps.into_iter().next() {
            None => return RefOutcome::Stuck(format!("no rule applies to {c}")),
            Some(RefWriterStep::Silent(d)) | Some(RefWriterStep::Output(d, _)) => c = d,
            Some(RefWriterStep::DoneStore(s1)) => return RefOutcome::Store(s1),
            Some(RefWriterStep::DoneVal(v, s1)) => return RefOutcome::Value(v, s1),
        }
    }
    RefOutcome::Cut
}

/// Termination status with certification. `Diverges` is only reported when
/// the canonical run revisits a configuration, which proves divergence;
/// `Stuck` likewise proves the program never terminates. `Unknown` means the
/// fuel ran out before either a termination or a certificate was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermStatus {
    Terminates(usize),
    Diverges(usize),
    Stuck(String),
    Unknown,
}

impl TermStatus {
    /// Certified to never terminate.
    pub fn certified_nontermination(&self) -> bool {
        matches!(self, TermStatus::Diverges(_) | TermStatus::Stuck(_))
    }
}

/// Certified termination check for a writer. The canonical run is
/// deterministic, so a revisited configuration certifies divergence.
pub fn certified_run_writer(start: &RefWriter, fuel: usize) -> TermStatus {
    let mut c = start.clone();
    let mut seen: HashSet<RefWriter> = HashSet::new();
    for k in 0..fuel {
        if !seen.insert(c.clone()) {
            return TermStatus::Diverges(k);
        }
        let next = ref_writer_steps(&c);
        match next.steps.into_iter().next() {
            None => return TermStatus::Stuck(format!("no rule applies to {c}")),
            Some(RefWriterStep::Silent(d)) | Some(RefWriterStep::Output(d, _)) => c = d,
            Some(RefWriterStep::DoneStore(_)) | Some(RefWriterStep::DoneVal(..)) => {
                return TermStatus::Terminates(k + 1)
            }
        }
    }
    TermStatus::Unknown
}

/// Certified termination check for `p, s ⇓`.
pub fn certified_run(p: &RefReader, s: &RefStore, fuel: usize) -> TermStatus {
    match ref_reader_step(p, s) {
        Ok(c) => certified_run_writer(&c, fuel),
        Err(stuck) => TermStatus::Stuck(stuck.premise),
    }
}
