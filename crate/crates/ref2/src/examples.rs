use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{store, Loc, RefExpr, RefReader, RefStore, RefValue, RefWriter};
use crate::closure::ref_weak_closure;
use crate::semantics::{ref_reader_step, ref_writer_steps, RefWriterStep};
use crate::sim::{store_related, value_related, RefRelation};

/// `while 1 { skip }`: diverges on every store.
pub fn omega() -> RefReader {
    RefReader::while_(RefExpr::Int(1), RefReader::Skip)
}

/// The skip-ing relation: relates `skip ; p` with `p` for each given `p`,
/// closed under the writer pairs its own steps demand. Together with the
/// diagonal it is a termination simulation whenever each `p` starts on each
/// sampled store.
pub fn skiping_relation(ps: &[RefReader], stores: &[RefStore]) -> RefRelation {
    let mut rel = RefRelation::identity_only();
    for p in ps {
        rel.readers.insert((RefReader::seq(RefReader::Skip, p.clone()), p.clone()));
        for s in stores {
            if let Ok(c) = ref_reader_step(p, s) {
                // skip;p's run passes through [skip]_s ; p and ret_s ; p
                // before landing in [p]_s; all three sit above p's start.
                rel.writers.insert((
                    RefWriter::seq(RefWriter::run(RefReader::Skip, s.clone()), p.clone()),
                    c.clone(),
                ));
                rel.writers
                    .insert((RefWriter::seq(RefWriter::RetStore(s.clone()), p.clone()), c.clone()));
                rel.writers.insert((RefWriter::run(p.clone(), s.clone()), c));
            }
        }
    }
    rel
}

/// Given a termination simulation `base`, relate `l := proc p` with
/// `l := proc q` for every related pair `(p, q)`, adding the writer pairs
/// the assignments run through. The terminal stores differ at `l` by a
/// related-reader pair, which is exactly what `S(R)` tolerates.
pub fn proc_assign_relation(base: &RefRelation, l: Loc, stores: &[RefStore]) -> RefRelation {
    let mut rel = base.clone();
    let le = RefExpr::Loc(l);
    for (p, q) in &base.readers {
        rel.readers.insert((
            RefReader::assign(le.clone(), RefReader::proc(p.clone())),
            RefReader::assign(le.clone(), RefReader::proc(q.clone())),
        ));
        for s in stores {
            rel.writers.insert((
                RefWriter::assign(le.clone(), RefWriter::run(RefReader::proc(p.clone()), s.clone())),
                RefWriter::assign(le.clone(), RefWriter::run(RefReader::proc(q.clone()), s.clone())),
            ));
            rel.writers.insert((
                RefWriter::assign(le.clone(), RefWriter::RetVal(RefValue::Reader(p.clone()), s.clone())),
                RefWriter::assign(le.clone(), RefWriter::RetVal(RefValue::Reader(q.clone()), s.clone())),
            ));
        }
    }
    rel
}

/// The double-assignment pair: `l := expr 2 ; l := expr (!l (+) 2)` against
/// the variant whose second summand is another dereference. Both leave 4 at
/// `l`.
pub fn double_assignment_pair(l: Loc) -> (RefReader, RefReader) {
    let le = RefExpr::Loc(l);
    let first = RefReader::assign(le.clone(), RefReader::Expr(RefExpr::Int(2)));
    let deref = RefExpr::deref(le.clone());
    let left = RefReader::assign(
        le.clone(),
        RefReader::Expr(RefExpr::add(deref.clone(), RefExpr::Int(2))),
    );
    let right =
        RefReader::assign(le, RefReader::Expr(RefExpr::add(deref.clone(), deref)));
    (RefReader::seq(first.clone(), left), RefReader::seq(first, right))
}

/// The knot pair: `l := proc { expr !l } ; expr !l` against
/// `l := proc { while 1 { skip } } ; expr !l`. Both diverge on every store.
pub fn landin_pair(l: Loc) -> (RefReader, RefReader) {
    let le = RefExpr::Loc(l);
    let tail = RefReader::Expr(RefExpr::deref(le.clone()));
    let left = RefReader::seq(
        RefReader::assign(le.clone(), RefReader::proc(tail.clone())),
        tail.clone(),
    );
    let right = RefReader::seq(RefReader::assign(le, RefReader::proc(omega())), tail);
    (left, right)
}

fn collect_lasso(
    start: &RefWriter,
    univ: &mut BTreeSet<RefWriter>,
    cap: usize,
) -> Result<(), String> {
    let mut c = start.clone();
    loop {
        if univ.contains(&c) {
            return Ok(());
        }
        if univ.len() >= cap {
            return Err("reachable fragment exceeds the configuration cap".into());
        }
        univ.insert(c.clone());
        match ref_writer_steps(&c).steps.into_iter().next() {
            Some(RefWriterStep::Silent(d)) | Some(RefWriterStep::Output(d, _)) => c = d,
            _ => return Ok(()),
        }
    }
}

/// Compute the greatest termination simulation between the canonical
/// reachable fragments of the seed pairs, starting each side on every
/// `S`-related pair of sampled stores. `extra_readers` are reader pairs
/// already certified elsewhere; they enter the `V`/`S` clauses (and the
/// returned relation) but generate no obligations of their own here.
///
/// Returns the relation (seeds, extras, the surviving writer pairs, plus the
/// diagonal) or an explanation of why no simulation on the fragment can
/// contain the seeds. `fuel` bounds the weak closures and should be at least
/// `cap`, the bound on the fragment size.
pub fn greatest_finite_sim(
    seeds: &[(RefReader, RefReader)],
    extra_readers: &BTreeSet<(RefReader, RefReader)>,
    stores: &[RefStore],
    fuel: usize,
    cap: usize,
) -> Result<RefRelation, String> {
    let mut base = RefRelation::identity_only();
    base.readers.extend(seeds.iter().cloned());
    base.readers.extend(extra_readers.iter().cloned());

    let mut start_pairs: Vec<(RefWriter, RefWriter)> = Vec::new();
    let mut left_univ: BTreeSet<RefWriter> = BTreeSet::new();
    let mut right_univ: BTreeSet<RefWriter> = BTreeSet::new();
    for (p, q) in seeds {
        if p == q {
            continue;
        }
        for s in stores {
            for s2 in stores {
                if !store_related(&base, s, s2) {
                    continue;
                }
                match (ref_reader_step(p, s), ref_reader_step(q, s2)) {
                    (Ok(c), Ok(d)) => {
                        collect_lasso(&c, &mut left_univ, cap)?;
                        collect_lasso(&d, &mut right_univ, cap)?;
                        start_pairs.push((c, d));
                    }
                    (Ok(_), Err(stuck)) => {
                        return Err(format!(
                            "right seed {q} is stuck on {s2}: {}",
                            stuck.premise
                        ))
                    }
                    (Err(stuck), Ok(_)) => {
                        return Err(format!(
                            "left seed {p} is stuck on {s}: {}",
                            stuck.premise
                        ))
                    }
                    (Err(_), Err(_)) => {}
                }
            }
        }
    }

    let left: Vec<RefWriter> = left_univ.into_iter().collect();
    let right: Vec<RefWriter> = right_univ.into_iter().collect();
    let lidx: BTreeMap<&RefWriter, usize> = left.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let ridx: BTreeMap<&RefWriter, usize> =
        right.iter().enumerate().map(|(j, d)| (d, j)).collect();
    let lsteps: Vec<Vec<RefWriterStep>> =
        left.iter().map(|c| ref_writer_steps(c).steps).collect();
    let rclosures: Vec<_> = right.iter().map(|d| ref_weak_closure(d, fuel)).collect();
    if rclosures.iter().any(|cl| cl.truncated) {
        return Err("a weak closure truncated; raise the fuel".into());
    }

    // Prune the full product down to the greatest simulation on the fragment.
    let mut alive = vec![vec![true; right.len()]; left.len()];
    loop {
        let mut changed = false;
        for i in 0..left.len() {
            for j in 0..right.len() {
                if !alive[i][j] {
                    continue;
                }
                let ok = lsteps[i].iter().all(|step| match step {
                    RefWriterStep::Silent(c2) | RefWriterStep::Output(c2, _) => {
                        let i2 = lidx[c2];
                        rclosures[j].silent_reach.iter().any(|d2| c2 == d2 || alive[i2][ridx[d2]])
                    }
                    RefWriterStep::DoneStore(s) => rclosures[j]
                        .terminations_store
                        .iter()
                        .any(|s2| store_related(&base, s, s2)),
                    RefWriterStep::DoneVal(v, s) => {
                        rclosures[j].terminations_val.iter().any(|(v2, s2)| {
                            value_related(&base, v, v2) && store_related(&base, s, s2)
                        })
                    }
                });
                if !ok {
                    alive[i][j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    for (c, d) in &start_pairs {
        if c != d && !alive[lidx[c]][ridx[d]] {
            return Err(format!(
                "no simulation on the reachable fragment relates the started pair {c} vs {d}"
            ));
        }
    }

    let mut writers = BTreeSet::new();
    for (i, c) in left.iter().enumerate() {
        for (j, d) in right.iter().enumerate() {
            if alive[i][j] && c != d {
                writers.insert((c.clone(), d.clone()));
            }
        }
    }
    Ok(RefRelation { readers: base.readers, writers, identity: true })
}

/// A worked relation together with the store sample it is certified on.
#[derive(Debug, Clone)]
pub struct RegressionCase {
    pub name: &'static str,
    pub relation: RefRelation,
    pub stores: Vec<RefStore>,
}

/// First-order sample stores: only diagonal pairs are `S`-related, so
/// clause (1) reduces to its literal same-store form on them.
pub fn first_order_stores() -> Vec<RefStore> {
    vec![
        RefStore::empty(),
        store(&[(0, RefValue::Int(1))]),
        store(&[(0, RefValue::Int(0)), (1, RefValue::Int(3))]),
    ]
}

/// The fixed regression set of worked relations. Every relation here is
/// certified in both directions by the test suite, which is what licenses
/// using them as a refutation-free baseline.
pub fn regression_set() -> Result<Vec<RegressionCase>, String> {
    let stores = first_order_stores();
    let l0 = RefExpr::Loc(Loc(0));

    // Readers that start on any store: no dereference is evaluated at the
    // first step.
    let ps = vec![
        RefReader::Skip,
        RefReader::Expr(RefExpr::Int(7)),
        RefReader::assign(l0, RefReader::Expr(RefExpr::Int(2))),
        RefReader::proc(omega()),
        RefReader::while_(RefExpr::Int(2), RefReader::Skip),
    ];
    let skiping = skiping_relation(&ps, &stores);

    let t_small = skiping_relation(
        &[RefReader::Skip, RefReader::Expr(RefExpr::Int(7))],
        &stores,
    );
    let proc_assign = proc_assign_relation(&t_small, Loc(1), &stores);

    let (da_left, da_right) = double_assignment_pair(Loc(0));
    let double_assignment =
        greatest_finite_sim(&[(da_left, da_right)], &BTreeSet::new(), &stores, 4000, 4000)?;

    let (knot_left, knot_right) = landin_pair(Loc(0));
    let landin =
        greatest_finite_sim(&[(knot_left, knot_right)], &BTreeSet::new(), &stores, 4000, 4000)?;

    Ok(vec![
        RegressionCase { name: "skip-ing", relation: skiping, stores: stores.clone() },
        RegressionCase { name: "proc-assign", relation: proc_assign, stores: stores.clone() },
        RegressionCase {
            name: "double-assignment",
            relation: double_assignment,
            stores: stores.clone(),
        },
        RegressionCase { name: "landin", relation: landin, stores },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{certified_run, TermStatus};
    use crate::sim::{check_adequacy, check_ho_termination_sim, AdequacyVerdict, RefVerdict};

    #[test]
    fn skiping_relation_is_a_simulation_both_ways() {
        let stores = first_order_stores();
        let ps = vec![RefReader::Skip, RefReader::Expr(RefExpr::Int(7)), RefReader::proc(omega())];
        let t = skiping_relation(&ps, &stores);
        assert_eq!(check_ho_termination_sim(&t, &stores, 500), RefVerdict::Holds);
        assert_eq!(check_ho_termination_sim(&t.converse(), &stores, 500), RefVerdict::Holds);
    }

    #[test]
    fn proc_assignment_relation_is_a_simulation_both_ways() {
        let stores = first_order_stores();
        let t = skiping_relation(&[RefReader::Skip], &stores);
        let q = proc_assign_relation(&t, Loc(1), &stores);
        assert_eq!(check_ho_termination_sim(&q, &stores, 500), RefVerdict::Holds);
        assert_eq!(check_ho_termination_sim(&q.converse(), &stores, 500), RefVerdict::Holds);
    }

    #[test]
    fn double_assignment_pair_certifies_both_ways() {
        let stores = first_order_stores();
        let (p, q) = double_assignment_pair(Loc(0));
        let rel = greatest_finite_sim(
            &[(p.clone(), q.clone())],
            &BTreeSet::new(),
            &stores,
            2000,
            2000,
        )
        .unwrap();
        assert_eq!(check_ho_termination_sim(&rel, &stores, 2000), RefVerdict::Holds);
        assert_eq!(check_ho_termination_sim(&rel.converse(), &stores, 2000), RefVerdict::Holds);
    }

    #[test]
    fn landin_pair_diverges_certifiably_and_is_adequate() {
        let stores = first_order_stores();
        let (p, q) = landin_pair(Loc(0));
        for s in &stores {
            assert!(matches!(certified_run(&p, s, 2000), TermStatus::Diverges(_)));
            assert!(matches!(certified_run(&q, s, 2000), TermStatus::Diverges(_)));
        }
        let mut pair_only = RefRelation::default();
        pair_only.readers.insert((p.clone(), q.clone()));
        assert_eq!(
            check_adequacy(&pair_only.symmetrize(), &stores, 2000),
            AdequacyVerdict::Holds
        );
        let rel =
            greatest_finite_sim(&[(p, q)], &BTreeSet::new(), &stores, 2000, 2000).unwrap();
        assert_eq!(check_ho_termination_sim(&rel, &stores, 2000), RefVerdict::Holds);
        assert_eq!(check_ho_termination_sim(&rel.converse(), &stores, 2000), RefVerdict::Holds);
    }

    #[test]
    fn greatest_finite_sim_rejects_semantically_distinct_seeds() {
        let stores = first_order_stores();
        let err = greatest_finite_sim(
            &[(RefReader::Skip, omega())],
            &BTreeSet::new(),
            &stores,
            500,
            500,
        )
        .unwrap_err();
        assert!(err.contains("no simulation"), "{err}");
    }

    #[test]
    fn regression_set_builds() {
        let cases = regression_set().unwrap();
        assert_eq!(cases.len(), 4);
        for case in &cases {
            assert!(!case.relation.readers.is_empty(), "{} has no reader pairs", case.name);
        }
    }
}
