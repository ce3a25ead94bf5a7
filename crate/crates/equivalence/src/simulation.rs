use std::collections::BTreeSet;

use crate::system::{FStep, FiniteRWSystem, Relation2};

/// Which equivalence the simulation clauses target. Trace and cost
/// match announcing steps after silent prefixes only; termination
/// absorbs announcements entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Trace,
    Cost,
    Termination,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Trace, Flavor::Cost, Flavor::Termination];

    pub fn parse(s: &str) -> Option<Flavor> {
        match s {
            "trace" | "trc" => Some(Flavor::Trace),
            "cost" | "cst" => Some(Flavor::Cost),
            "ter" | "termination" => Some(Flavor::Termination),
            _ => None,
        }
    }
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flavor::Trace => "trace",
            Flavor::Cost => "cost",
            Flavor::Termination => "termination",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort2 {
    Reader,
    Writer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub sort: Sort2,
    pub pair: (usize, usize),
    /// 1: reader clause; 2: silent step; 3: announcing step; 4: termination.
    pub clause: usize,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Failure),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Check one writer pair against the flavour's clauses. `weak_left`
/// replaces the left side's single transitions by weak ones, which is
/// what the weakening property compares against.
fn writer_pair_ok(
    sys: &FiniteRWSystem,
    rw: &BTreeSet<(usize, usize)>,
    flavor: Flavor,
    c: usize,
    d: usize,
    weak_left: bool,
) -> Result<(), Failure> {
    let fail = |clause: usize, witness: String| Failure {
        sort: Sort2::Writer,
        pair: (c, d),
        clause,
        witness,
    };
    match flavor {
        Flavor::Trace | Flavor::Cost => {
            let silent_l: BTreeSet<usize> = if weak_left {
                sys.silent_reach(c)
            } else {
                sys.writer_map[c]
                    .iter()
                    .filter_map(|s| match s {
                        FStep::Silent { to } => Some(*to),
                        _ => None,
                    })
                    .collect()
            };
            for c2 in silent_l {
                if !sys.silent_reach(d).iter().any(|d2| rw.contains(&(c2, *d2))) {
                    return Err(fail(2, format!("silent step to {}", sys.writers[c2])));
                }
            }
            let out_l: BTreeSet<(usize, usize)> = if weak_left {
                sys.weak_outputs(c)
            } else {
                sys.writer_map[c]
                    .iter()
                    .filter_map(|s| match s {
                        FStep::Output { to, state } => Some((*state, *to)),
                        _ => None,
                    })
                    .collect()
            };
            for (s, c2) in out_l {
                let matched = sys.weak_outputs(d).iter().any(|(s2, d2)| {
                    (flavor == Flavor::Cost || *s2 == s) && rw.contains(&(c2, *d2))
                });
                if !matched {
                    return Err(fail(
                        3,
                        format!("announces {} then {}", sys.states[s], sys.writers[c2]),
                    ));
                }
            }
            let done_l: BTreeSet<usize> = if weak_left {
                sys.weak_done(c)
            } else {
                sys.writer_map[c]
                    .iter()
                    .filter_map(|s| match s {
                        FStep::Done { state } => Some(*state),
                        _ => None,
                    })
                    .collect()
            };
            for s in done_l {
                if !sys.weak_done(d).contains(&s) {
                    return Err(fail(4, format!("terminates in {}", sys.states[s])));
                }
            }
        }
        Flavor::Termination => {
            let moves_l: Vec<(usize, usize)> = if weak_left {
                sys.absorbing_reach(c).into_iter().map(|c2| (2, c2)).collect()
            } else {
                sys.writer_map[c]
                    .iter()
                    .filter_map(|s| match s {
                        FStep::Silent { to } => Some((2, *to)),
                        FStep::Output { to, .. } => Some((3, *to)),
                        FStep::Done { .. } => None,
                    })
                    .collect()
            };
            for (clause, c2) in moves_l {
                if !sys
                    .absorbing_reach(d)
                    .iter()
                    .any(|d2| rw.contains(&(c2, *d2)))
                {
                    return Err(fail(clause, format!("steps to {}", sys.writers[c2])));
                }
            }
            let done_l: BTreeSet<usize> = if weak_left {
                sys.absorbing_done(c)
            } else {
                sys.writer_map[c]
                    .iter()
                    .filter_map(|s| match s {
                        FStep::Done { state } => Some(*state),
                        _ => None,
                    })
                    .collect()
            };
            for s in done_l {
                if !sys.absorbing_done(d).contains(&s) {
                    return Err(fail(4, format!("terminates in {}", sys.states[s])));
                }
            }
        }
    }
    Ok(())
}

fn check_clauses(
    sys: &FiniteRWSystem,
    rel: &Relation2,
    flavor: Flavor,
    weak_left: bool,
) -> Verdict {
    for &(p, q) in &rel.readers {
        for s in 0..sys.states.len() {
            let pair = (sys.reader_map[p][s], sys.reader_map[q][s]);
            if !rel.writers.contains(&pair) {
                return Verdict::Fails(Failure {
                    sort: Sort2::Reader,
                    pair: (p, q),
                    clause: 1,
                    witness: format!(
                        "on {} they become {} and {}",
                        sys.states[s], sys.writers[pair.0], sys.writers[pair.1]
                    ),
                });
            }
        }
    }
    for &(c, d) in &rel.writers {
        if let Err(f) = writer_pair_ok(sys, &rel.writers, flavor, c, d, weak_left) {
            return Verdict::Fails(f);
        }
    }
    Verdict::Holds
}

/// Verify that the relation satisfies every clause of the flavour's
/// simulation definition.
pub fn check_simulation(sys: &FiniteRWSystem, rel: &Relation2, flavor: Flavor) -> Verdict {
    check_clauses(sys, rel, flavor, false)
}

/// The executable content of the weakening lemmas: judging the relation
/// with weak transitions on the left agrees with judging it with single
/// transitions on the left.
pub fn check_weakening_property(sys: &FiniteRWSystem, rel: &Relation2, flavor: Flavor) -> bool {
    let strong = check_clauses(sys, rel, flavor, false);
    let weak = check_clauses(sys, rel, flavor, true);
    strong.holds() == weak.holds()
}

/// Greatest fixpoint by pruning: start from the full writer relation,
/// drop failing pairs until stable, then induce the reader relation.
pub fn greatest_simulation(sys: &FiniteRWSystem, flavor: Flavor) -> Relation2 {
    let mut rw: BTreeSet<(usize, usize)> = (0..sys.writers.len())
        .flat_map(|a| (0..sys.writers.len()).map(move |b| (a, b)))
        .collect();
    loop {
        let keep: BTreeSet<(usize, usize)> = rw
            .iter()
            .filter(|&&(c, d)| writer_pair_ok(sys, &rw, flavor, c, d, false).is_ok())
            .copied()
            .collect();
        if keep == rw {
            break;
        }
        rw = keep;
    }
    let readers = (0..sys.readers.len())
        .flat_map(|a| (0..sys.readers.len()).map(move |b| (a, b)))
        .filter(|&(p, q)| {
            (0..sys.states.len()).all(|s| rw.contains(&(sys.reader_map[p][s], sys.reader_map[q][s])))
        })
        .collect();
    Relation2 { readers, writers: rw }
}

/// Exhaustive oracle for small systems: union every candidate writer
/// relation that passes the clauses, then induce readers.
pub fn brute_force_greatest(sys: &FiniteRWSystem, flavor: Flavor) -> Relation2 {
    let n = sys.writers.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    assert!(pairs.len() <= 16, "brute force is for tiny systems");
    let mut union: BTreeSet<(usize, usize)> = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rw: BTreeSet<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| *p)
            .collect();
        let ok = rw
            .iter()
            .all(|&(c, d)| writer_pair_ok(sys, &rw, flavor, c, d, false).is_ok());
        if ok {
            union.extend(rw.iter().copied());
        }
    }
    let readers = (0..sys.readers.len())
        .flat_map(|a| (0..sys.readers.len()).map(move |b| (a, b)))
        .filter(|&(p, q)| {
            (0..sys.states.len())
                .all(|s| union.contains(&(sys.reader_map[p][s], sys.reader_map[q][s])))
        })
        .collect();
    Relation2 { readers, writers: union }
}
