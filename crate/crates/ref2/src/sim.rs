use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{RefReader, RefStore, RefValue, RefWriter};
use crate::closure::ref_weak_closure;
use crate::semantics::{certified_run, ref_reader_step, ref_writer_steps, RefWriterStep, TermStatus};

/// A two-sorted relation on readers and writers, given by finite sets of
/// explicit pairs plus an optional identity part (needed because the paper
/// examples all contain the full diagonal Δ).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefRelation {
    pub readers: BTreeSet<(RefReader, RefReader)>,
    pub writers: BTreeSet<(RefWriter, RefWriter)>,
    pub identity: bool,
}

impl RefRelation {
    pub fn identity_only() -> RefRelation {
        RefRelation { identity: true, ..RefRelation::default() }
    }

    pub fn related_r(&self, p: &RefReader, q: &RefReader) -> bool {
        (self.identity && p == q) || self.readers.contains(&(p.clone(), q.clone()))
    }

    pub fn related_w(&self, c: &RefWriter, d: &RefWriter) -> bool {
        (self.identity && c == d) || self.writers.contains(&(c.clone(), d.clone()))
    }

    /// Swap every pair (the converse relation).
    pub fn converse(&self) -> RefRelation {
        RefRelation {
            readers: self.readers.iter().map(|(p, q)| (q.clone(), p.clone())).collect(),
            writers: self.writers.iter().map(|(c, d)| (d.clone(), c.clone())).collect(),
            identity: self.identity,
        }
    }

    /// Union with the converse (symmetrization).
    pub fn symmetrize(&self) -> RefRelation {
        let conv = self.converse();
        RefRelation {
            readers: self.readers.union(&conv.readers).cloned().collect(),
            writers: self.writers.union(&conv.writers).cloned().collect(),
            identity: self.identity,
        }
    }

    pub fn merge(&self, other: &RefRelation) -> RefRelation {
        RefRelation {
            readers: self.readers.union(&other.readers).cloned().collect(),
            writers: self.writers.union(&other.writers).cloned().collect(),
            identity: self.identity || other.identity,
        }
    }
}

/// `V(R)`: equal locations, equal integers, or readers related by `R_r`.
pub fn value_related(rel: &RefRelation, v: &RefValue, w: &RefValue) -> bool {
    match (v, w) {
        (RefValue::Loc(a), RefValue::Loc(b)) => a == b,
        (RefValue::Int(a), RefValue::Int(b)) => a == b,
        (RefValue::Reader(p), RefValue::Reader(q)) => rel.related_r(p, q),
        _ => false,
    }
}

/// `S(R)`: equal domains and pointwise `V(R)`-related values.
pub fn store_related(rel: &RefRelation, s: &RefStore, t: &RefStore) -> bool {
    s.0.len() == t.0.len()
        && s.0.iter().all(|(l, v)| t.get(*l).is_some_and(|w| value_related(rel, v, w)))
}

/// One side of a `value_store_related` query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueOrStore {
    Value(RefValue),
    Store(RefStore),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot relate a value to a store")]
pub struct KindMismatch;

/// Relate two values or two stores under `V(R)` / `S(R)`.
pub fn value_store_related(
    rel: &RefRelation,
    lhs: &ValueOrStore,
    rhs: &ValueOrStore,
) -> Result<bool, KindMismatch> {
    match (lhs, rhs) {
        (ValueOrStore::Value(v), ValueOrStore::Value(w)) => Ok(value_related(rel, v, w)),
        (ValueOrStore::Store(s), ValueOrStore::Store(t)) => Ok(store_related(rel, s, t)),
        _ => Err(KindMismatch),
    }
}

/// Which sort a failing pair lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefSort {
    Reader,
    Writer,
}

impl fmt::Display for RefSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefSort::Reader => write!(f, "reader"),
            RefSort::Writer => write!(f, "writer"),
        }
    }
}

/// Outcome of a simulation check. `Fails` pinpoints the pair, the violated
/// clause (1 reader step, 2 writer step, 3 store termination, 4 value
/// termination), and a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefVerdict {
    Holds,
    Fails { sort: RefSort, lhs: String, rhs: String, clause: u8, witness: String },
}

impl RefVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, RefVerdict::Holds)
    }

    fn fail(
        sort: RefSort,
        lhs: &dyn fmt::Display,
        rhs: &dyn fmt::Display,
        clause: u8,
        witness: String,
    ) -> RefVerdict {
        RefVerdict::Fails {
            sort,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            clause,
            witness,
        }
    }
}

impl fmt::Display for RefVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefVerdict::Holds => write!(f, "Holds"),
            RefVerdict::Fails { sort, lhs, rhs, clause, witness } => write!(
                f,
                "Fails at clause ({clause}) on {sort} pair\n  left:  {lhs}\n  right: {rhs}\n  {witness}"
            ),
        }
    }
}

/// Check that `rel` is a higher-order termination simulation on the sampled
/// stores.
///
/// Clause (1) ranges over ordered pairs of sampled stores related by
/// `S(R_r)`; stuckness must match on both sides (a strengthening needed to
/// certify symmetrized relations, where a one-sided stuck start would
/// otherwise break the converse direction silently). Clauses (2)–(4) match
/// single steps of the left writer against the weak closure of the right.
pub fn check_ho_termination_sim(
    rel: &RefRelation,
    store_sample: &[RefStore],
    fuel: usize,
) -> RefVerdict {
    for (p, q) in &rel.readers {
        if rel.identity && p == q {
            continue;
        }
        for s in store_sample {
            for s2 in store_sample {
                if !store_related(rel, s, s2) {
                    continue;
                }
                match (ref_reader_step(p, s), ref_reader_step(q, s2)) {
                    (Ok(c), Ok(d)) => {
                        if !rel.related_w(&c, &d) {
                            return RefVerdict::fail(
                                RefSort::Reader,
                                p,
                                q,
                                1,
                                format!("started writers are unrelated: {c} vs {d}"),
                            );
                        }
                    }
                    (Ok(c), Err(stuck)) => {
                        return RefVerdict::fail(
                            RefSort::Reader,
                            p,
                            q,
                            1,
                            format!(
                                "left starts as {c} on {s} but right is stuck on {s2}: {}",
                                stuck.premise
                            ),
                        );
                    }
                    (Err(stuck), Ok(d)) => {
                        return RefVerdict::fail(
                            RefSort::Reader,
                            p,
                            q,
                            1,
                            format!(
                                "left is stuck on {s} ({}) but right starts as {d}",
                                stuck.premise
                            ),
                        );
                    }
                    (Err(_), Err(_)) => {}
                }
            }
        }
    }

    for (c, d) in &rel.writers {
        if rel.identity && c == d {
            continue;
        }
        let closure = ref_weak_closure(d, fuel);
        let trunc = if closure.truncated { " (right closure truncated)" } else { "" };
        for step in ref_writer_steps(c).steps {
            match step {
                RefWriterStep::Silent(c2) | RefWriterStep::Output(c2, _) => {
                    if !closure.silent_reach.iter().any(|d2| rel.related_w(&c2, d2)) {
                        return RefVerdict::fail(
                            RefSort::Writer,
                            c,
                            d,
                            2,
                            format!("left steps to {c2}, unmatched by any d ⇒ d′{trunc}"),
                        );
                    }
                }
                RefWriterStep::DoneStore(s) => {
                    if !closure
                        .terminations_store
                        .iter()
                        .any(|s2| store_related(rel, &s, s2))
                    {
                        return RefVerdict::fail(
                            RefSort::Writer,
                            c,
                            d,
                            3,
                            format!("left finishes in {s}, unmatched by any d ⇓ s′{trunc}"),
                        );
                    }
                }
                RefWriterStep::DoneVal(v, s) => {
                    if !closure.terminations_val.iter().any(|(v2, s2)| {
                        value_related(rel, &v, v2) && store_related(rel, &s, s2)
                    }) {
                        return RefVerdict::fail(
                            RefSort::Writer,
                            c,
                            d,
                            4,
                            format!(
                                "left finishes with {v} in {s}, unmatched by any d ⇓ v′,s′{trunc}"
                            ),
                        );
                    }
                }
            }
        }
    }
    RefVerdict::Holds
}

/// Outcome of an adequacy check. Fuel exhaustion on one side against a
/// termination on the other is `Inconclusive`, never `Fails`; failure
/// requires a *certified* disagreement (termination vs cycle or stuckness).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdequacyVerdict {
    Holds,
    Inconclusive { detail: String },
    Fails { detail: String },
}

impl fmt::Display for AdequacyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdequacyVerdict::Holds => write!(f, "Holds"),
            AdequacyVerdict::Inconclusive { detail } => write!(f, "Inconclusive: {detail}"),
            AdequacyVerdict::Fails { detail } => write!(f, "Fails: {detail}"),
        }
    }
}

fn classify(status: &TermStatus) -> &'static str {
    match status {
        TermStatus::Terminates(_) => "terminates",
        TermStatus::Diverges(_) => "diverges (certified)",
        TermStatus::Stuck(_) => "is stuck",
        TermStatus::Unknown => "exceeds the fuel",
    }
}

fn compare_statuses(left: TermStatus, right: TermStatus, what: String) -> Option<AdequacyVerdict> {
    use TermStatus::*;
    match (&left, &right) {
        (Terminates(_), Terminates(_)) => None,
        (Terminates(_), r) if r.certified_nontermination() => Some(AdequacyVerdict::Fails {
            detail: format!("{what}: left {} but right {}", classify(&left), classify(&right)),
        }),
        (l, Terminates(_)) if l.certified_nontermination() => Some(AdequacyVerdict::Fails {
            detail: format!("{what}: left {} but right {}", classify(&left), classify(&right)),
        }),
        (Terminates(_), Unknown) | (Unknown, Terminates(_)) => {
            Some(AdequacyVerdict::Inconclusive {
                detail: format!(
                    "{what}: left {} but right {}",
                    classify(&left),
                    classify(&right)
                ),
            })
        }
        // Neither side terminated within fuel: no disagreement observed.
        _ => None,
    }
}

/// Check termination adequacy of `rel` on the sampled stores: related
/// readers must agree on `p, s ⇓` for each sampled `s`, and related writers
/// on `c ⇓`.
pub fn check_adequacy(
    rel: &RefRelation,
    store_sample: &[RefStore],
    fuel: usize,
) -> AdequacyVerdict {
    let mut inconclusive: Option<AdequacyVerdict> = None;
    for (p, q) in &rel.readers {
        if rel.identity && p == q {
            continue;
        }
        for s in store_sample {
            let left = certified_run(p, s, fuel);
            let right = certified_run(q, s, fuel);
            match compare_statuses(left, right, format!("{p} vs {q} on {s}")) {
                Some(v @ AdequacyVerdict::Fails { .. }) => return v,
                Some(v) => inconclusive.get_or_insert(v),
                None => continue,
            };
        }
    }
    for (c, d) in &rel.writers {
        if rel.identity && c == d {
            continue;
        }
        let left = crate::semantics::certified_run_writer(c, fuel);
        let right = crate::semantics::certified_run_writer(d, fuel);
        match compare_statuses(left, right, format!("{c} vs {d}")) {
            Some(v @ AdequacyVerdict::Fails { .. }) => return v,
            Some(v) => inconclusive.get_or_insert(v),
            None => continue,
        };
    }
    inconclusive.unwrap_or(AdequacyVerdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{store, Loc, RefExpr};

    fn int(n: i64) -> RefExpr {
        RefExpr::Int(n)
    }

    #[test]
    fn value_and_store_relatedness() {
        let rel = RefRelation {
            readers: BTreeSet::from([(
                RefReader::seq(RefReader::Skip, RefReader::Skip),
                RefReader::Skip,
            )]),
            writers: BTreeSet::new(),
            identity: true,
        };
        assert!(value_related(&rel, &RefValue::Loc(Loc(3)), &RefValue::Loc(Loc(3))));
        assert!(!value_related(&rel, &RefValue::Loc(Loc(3)), &RefValue::Loc(Loc(4))));
        assert!(!value_related(&rel, &RefValue::Loc(Loc(3)), &RefValue::Int(3)));
        // Stores with pointwise related readers are related; unequal domains
        // are not.
        let s1 = store(&[(0, RefValue::Reader(RefReader::seq(RefReader::Skip, RefReader::Skip)))]);
        let s2 = store(&[(0, RefValue::Reader(RefReader::Skip))]);
        assert!(store_related(&rel, &s1, &s2));
        assert!(!store_related(&rel, &s2, &s1), "explicit pairs are directed");
        let s3 = store(&[(0, RefValue::Int(0)), (1, RefValue::Int(0))]);
        assert!(!store_related(&rel, &s2, &s3));
        // Kind mismatch is an error, not `false`.
        assert_eq!(
            value_store_related(
                &rel,
                &ValueOrStore::Value(RefValue::Int(0)),
                &ValueOrStore::Store(RefStore::empty())
            ),
            Err(KindMismatch)
        );
        assert_eq!(
            value_store_related(
                &rel,
                &ValueOrStore::Store(s1.clone()),
                &ValueOrStore::Store(s2.clone())
            ),
            Ok(true)
        );
    }

    #[test]
    fn unequal_ret_stores_fail_clause_three() {
        let s = store(&[(0, RefValue::Int(0))]);
        let s2 = store(&[(0, RefValue::Int(0)), (1, RefValue::Int(1))]);
        let rel = RefRelation {
            readers: BTreeSet::new(),
            writers: BTreeSet::from([(
                RefWriter::RetStore(s.clone()),
                RefWriter::RetStore(s2.clone()),
            )]),
            identity: true,
        };
        match check_ho_termination_sim(&rel, &[], 100) {
            RefVerdict::Fails { clause: 3, .. } => {}
            other => panic!("expected clause 3 failure, got {other}"),
        }
    }

    #[test]
    fn unmatched_writer_step_fails_clause_two() {
        // An announcing writer against an already-finished one: the left step
        // cannot be matched because ret has no outgoing transitions beyond
        // termination.
        let s = store(&[(0, RefValue::Int(0))]);
        let left = RefWriter::announce(s.clone(), RefWriter::RetStore(s.clone()));
        let right = RefWriter::RetVal(RefValue::Int(1), s.clone());
        let rel = RefRelation {
            readers: BTreeSet::new(),
            writers: BTreeSet::from([(left, right)]),
            identity: false,
        };
        match check_ho_termination_sim(&rel, &[], 100) {
            RefVerdict::Fails { clause: 2, .. } => {}
            other => panic!("expected clause 2 failure, got {other}"),
        }
    }

    #[test]
    fn one_sided_stuckness_fails_clause_one() {
        let rel = RefRelation {
            readers: BTreeSet::from([(
                RefReader::Skip,
                RefReader::while_(RefExpr::deref(RefExpr::Loc(Loc(0))), RefReader::Skip),
            )]),
            writers: BTreeSet::new(),
            identity: true,
        };
        match check_ho_termination_sim(&rel, &[RefStore::empty()], 100) {
            RefVerdict::Fails { clause: 1, witness, .. } => {
                assert!(witness.contains("stuck"), "{witness}");
            }
            other => panic!("expected clause 1 failure, got {other}"),
        }
    }

    #[test]
    fn adequacy_distinguishes_skip_from_omega() {
        let omega = RefReader::while_(int(1), RefReader::Skip);
        let rel = RefRelation {
            readers: BTreeSet::from([(RefReader::Skip, omega)]),
            writers: BTreeSet::new(),
            identity: false,
        };
        match check_adequacy(&rel, &[RefStore::empty()], 1000) {
            AdequacyVerdict::Fails { detail } => {
                assert!(detail.contains("diverges (certified)"), "{detail}");
            }
            other => panic!("expected failure, got {other}"),
        }
        // The empty relation holds vacuously.
        assert_eq!(
            check_adequacy(&RefRelation::default(), &[RefStore::empty()], 10),
            AdequacyVerdict::Holds
        );
    }

    #[test]
    fn adequacy_reports_fuel_exhaustion_as_inconclusive() {
        // A long countdown against skip with tiny fuel: no certificate either
        // way, so the checker refuses to call it a failure.
        let countdown = RefReader::while_(
            RefExpr::deref(RefExpr::Loc(Loc(0))),
            RefReader::assign(
                RefExpr::Loc(Loc(0)),
                RefReader::Expr(RefExpr::sub(RefExpr::deref(RefExpr::Loc(Loc(0))), int(1))),
            ),
        );
        let rel = RefRelation {
            readers: BTreeSet::from([(RefReader::Skip, countdown)]),
            writers: BTreeSet::new(),
            identity: false,
        };
        let s = store(&[(0, RefValue::Int(50))]);
        match check_adequacy(&rel, &[s.clone()], 5) {
            AdequacyVerdict::Inconclusive { .. } => {}
            other => panic!("expected inconclusive, got {other}"),
        }
        // With enough fuel both terminate and adequacy holds.
        assert_eq!(check_adequacy(&rel, &[s], 10_000), AdequacyVerdict::Holds);
    }
}
