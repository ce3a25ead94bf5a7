//! The acceptance gate: one test per headline guarantee of the workbench,
//! each printing a pass line with its runtime and asserting a time budget.
//! Everything here runs from fixed seeds; failures reproduce exactly.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use core_syntax::{ImpExpr, Term, VarStore};
use imp::{
    assign, check_resumption_bisim, imp_step, imp_trace, seq, skip, while_, BisimVerdict,
    ImpStepResult,
};
use imp2::{reader_step, verify_embedding, writer_step, Writer, WriterStep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn done(name: &str, started: Instant, budget: Duration) {
    let took = started.elapsed();
    println!("[PASS] {name} ({took:.2?}, budget {budget:?})");
    assert!(took < budget, "{name} took {took:.2?}, over its {budget:?} budget");
}

fn var(x: &str) -> ImpExpr {
    ImpExpr::var(x)
}

fn cnst(n: i64) -> ImpExpr {
    ImpExpr::Const(n)
}

// ---------------------------------------------------------------------------
// 1. Every rule of the base small-step system and of the two-sorted
//    reader-writer system, pinned at concrete stores.

#[test]
fn a01_rule_goldens_hold_in_both_presentations() {
    let t0 = Instant::now();
    let stores =
        [VarStore::from_pairs([("x", 3)]), VarStore::from_pairs([("x", -1), ("y", 7)])];
    let dec = assign("x", ImpExpr::sub(var("x"), cnst(1)));
    let loop_ = while_(var("x"), dec.clone());
    let q = assign("y", cnst(2));

    for s in &stores {
        // Base system: skip, assignment, loop exit/unfold, both seq shapes.
        assert_eq!(imp_step(&skip(), s), Ok(ImpStepResult::Done(s.clone())));
        let inc = assign("x", ImpExpr::add(var("x"), cnst(1)));
        assert_eq!(imp_step(&inc, s), Ok(ImpStepResult::Done(s.with("x", s.get("x") + 1))));
        let s0 = s.with("x", 0);
        assert_eq!(imp_step(&loop_, &s0), Ok(ImpStepResult::Done(s0.clone())));
        assert_eq!(
            imp_step(&loop_, s),
            Ok(ImpStepResult::Continue(seq(dec.clone(), loop_.clone()), s.clone()))
        );
        assert_eq!(
            imp_step(&seq(loop_.clone(), q.clone()), s),
            Ok(ImpStepResult::Continue(seq(seq(dec.clone(), loop_.clone()), q.clone()), s.clone()))
        );
        assert_eq!(
            imp_step(&seq(skip(), q.clone()), s),
            Ok(ImpStepResult::Continue(q.clone(), s.clone()))
        );

        // Reader rules: p;q at s becomes [p]_s ; q, and the rest.
        assert_eq!(
            reader_step(&seq(dec.clone(), q.clone()), s),
            Ok(Writer::seq(Writer::run(dec.clone(), s.clone()), q.clone()))
        );
        assert_eq!(reader_step(&skip(), s), Ok(Writer::Ret(s.clone())));
        assert_eq!(reader_step(&dec, s), Ok(Writer::Ret(s.with("x", s.get("x") - 1))));
        assert_eq!(reader_step(&loop_, &s0), Ok(Writer::Ret(s0.clone())));
        assert_eq!(
            reader_step(&loop_, s),
            Ok(Writer::emit(s.clone(), Writer::run(seq(dec.clone(), loop_.clone()), s.clone())))
        );

        // Writer rules: delegation, return, announcement, and sequencing.
        assert_eq!(
            writer_step(&Writer::run(skip(), s.clone())),
            Ok(WriterStep::Silent(Writer::Ret(s.clone())))
        );
        assert_eq!(writer_step(&Writer::Ret(s.clone())), Ok(WriterStep::Done(s.clone())));
        let inner = Writer::Ret(s0.clone());
        assert_eq!(
            writer_step(&Writer::emit(s.clone(), inner.clone())),
            Ok(WriterStep::Output(inner.clone(), s.clone()))
        );
        // c ; q propagates c's silent and announcing steps ...
        assert_eq!(
            writer_step(&Writer::seq(Writer::run(skip(), s.clone()), q.clone())),
            Ok(WriterStep::Silent(Writer::seq(Writer::Ret(s.clone()), q.clone())))
        );
        assert_eq!(
            writer_step(&Writer::seq(Writer::emit(s.clone(), inner.clone()), q.clone())),
            Ok(WriterStep::Output(Writer::seq(inner.clone(), q.clone()), s.clone()))
        );
        // ... and ret_s ; q announces s and starts q there.
        assert_eq!(
            writer_step(&Writer::seq(Writer::Ret(s.clone()), q.clone())),
            Ok(WriterStep::Output(Writer::run(q.clone(), s.clone()), s.clone()))
        );
    }
    done("rule goldens exact-match in both presentations", t0, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// 2. The flagship pair: trace-equal on 100 seeded stores, yet the resumption
//    bisimulation fails at depth 2 once the store is perturbed away from
//    x = 1 after the first step.

#[test]
fn a02_flagship_pair_trace_equal_but_not_resumption_bisimilar() {
    let t0 = Instant::now();
    let p = seq(assign("x", cnst(1)), assign("x", cnst(2)));
    let q = seq(assign("x", cnst(1)), assign("x", ImpExpr::add(var("x"), cnst(1))));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let s = VarStore::new()
            .with("x", rng.gen_range(-50..=50))
            .with("y", rng.gen_range(-50..=50));
        assert_eq!(imp_trace(&p, &s, 1000).unwrap(), imp_trace(&q, &s, 1000).unwrap());
    }

    let stores = vec![VarStore::new().with("x", 1), VarStore::new().with("x", 5)];
    match check_resumption_bisim(&[(p, q)], &stores, 2).unwrap() {
        BisimVerdict::Fails(cx) => {
            assert_eq!(cx.depth, 2, "distinguished exactly at the second resumption");
            assert_ne!(cx.store.get("x"), 1, "the perturbation sets x away from 1");
        }
        v => panic!("expected a depth-2 counterexample, got {v:?}"),
    }
    done("flagship pair: trace-equal, bisim fails at depth 2", t0, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// 3. Semantics preservation, twice: the hand-coded reader-writer system
//    against the base interpreter over an exhaustive term universe, and the
//    derived system of random well-formed rule tables against their own
//    one-sorted runs.

/// Statement leaves over two variables and the constants 0, 1, 2.
fn embedding_leaves() -> Vec<Term> {
    vec![
        skip(),
        assign("x", cnst(0)),
        assign("x", ImpExpr::add(var("x"), cnst(1))),
        assign("y", ImpExpr::add(var("x"), cnst(2))),
    ]
}

/// All statement trees of the given exact constructor depth, by level:
/// leaves at depth 1, `while x { b }` above a body, `seq` above two subtrees.
fn embedding_levels(max_depth: usize) -> Vec<Vec<Term>> {
    let mut levels = vec![embedding_leaves()];
    for d in 2..=max_depth {
        let mut level = Vec::new();
        for body in &levels[d - 2] {
            level.push(while_(var("x"), body.clone()));
        }
        let shallower: Vec<(usize, &Term)> =
            levels.iter().enumerate().flat_map(|(i, l)| l.iter().map(move |t| (i + 1, t))).collect();
        for (da, a) in &shallower {
            for (db, b) in &shallower {
                if (*da).max(*db) + 1 == d {
                    level.push(seq((*a).clone(), (*b).clone()));
                }
            }
        }
        levels.push(level);
    }
    levels
}

#[test]
fn a03_embedding_and_derivation_preserve_semantics() {
    let t0 = Instant::now();

    // Exhaustive universe: depth <= 3 materialized, depth 4 streamed in
    // chunks (its seq layer is too large to hold at once).
    let levels = embedding_levels(3);
    let census: Vec<usize> = levels.iter().map(Vec::len).collect();
    assert_eq!(census, [4, 20, 580]);
    let upto3: Vec<(usize, Term)> = levels
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.iter().map(move |t| (i + 1, t.clone())))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let stores: Vec<VarStore> = (0..20)
        .map(|_| {
            VarStore::new().with("x", rng.gen_range(-2..=3)).with("y", rng.gen_range(-2..=3))
        })
        .collect();

    let fuel = 12;
    let mut matches = 0usize;
    let mut cuts = 0usize;
    let mut terms_seen = 0usize;
    let mut chunk: Vec<Term> = Vec::with_capacity(4096);
    {
        let mut flush = |chunk: &mut Vec<Term>| {
            terms_seen += chunk.len();
            let report = verify_embedding(chunk, &stores, fuel).unwrap();
            assert!(report.mismatches.is_empty(), "first: {:?}", report.mismatches[0]);
            matches += report.matches;
            cuts += report.cut_agreements;
            chunk.clear();
        };
        for (_, t) in &upto3 {
            chunk.push(t.clone());
            if chunk.len() == 4096 {
                flush(&mut chunk);
            }
        }
        for body in &levels[2] {
            chunk.push(while_(var("x"), body.clone()));
            if chunk.len() == 4096 {
                flush(&mut chunk);
            }
        }
        for (da, a) in &upto3 {
            for (db, b) in &upto3 {
                if (*da).max(*db) == 3 {
                    chunk.push(seq(a.clone(), b.clone()));
                    if chunk.len() == 4096 {
                        flush(&mut chunk);
                    }
                }
            }
        }
        flush(&mut chunk);
    }
    assert_eq!(terms_seen, 4 + 16 + 560 + 364_820, "exhaustive depth-4 census");
    assert_eq!(matches + cuts, terms_seen * stores.len());
    println!(
        "  embedding: {terms_seen} terms x {} stores, {matches} exact, {cuts} cut-agreements",
        stores.len()
    );

    // Derived reader-writer systems of 200 random well-formed tables.
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut preserved = 0usize;
    let mut cut_agreements = 0usize;
    for _ in 0..200 {
        let spec = stateful_sos::random_cool_spec(&mut rng);
        let rw = stateful_sos::derive_rw(&spec).expect("generated tables are in the format");
        let nstates = spec.states().len();
        let cases: Vec<(Term, usize)> = (0..50)
            .map(|_| {
                (stateful_sos::random_closed_term(&mut rng, &spec, 4), rng.gen_range(0..nstates))
            })
            .collect();
        let report = stateful_sos::verify_preservation(&rw, cases, 150).unwrap();
        assert!(report.mismatches.is_empty(), "first: {:?}", report.mismatches[0]);
        preserved += report.matches;
        cut_agreements += report.cut_agreements;
    }
    assert_eq!(preserved + cut_agreements, 200 * 50);
    println!("  derivation: 200 tables x 50 runs, {preserved} exact, {cut_agreements} cut-agreements");

    done("embedding and derivation preserve semantics", t0, Duration::from_secs(120));
}

// ---------------------------------------------------------------------------
// 4. Congruence trials: certified-equivalent components composed under a
//    one-hole constructor stay equivalent, for all three flavours, in both
//    the imperative language and random rule-table languages.

fn trial_stores() -> Vec<VarStore> {
    let mut out = vec![VarStore::new()];
    for x in -2..=2 {
        for y in [-1, 0, 3] {
            out.push(VarStore::new().with("x", x).with("y", y));
        }
    }
    out
}

/// A random while-free statement: these terminate on every store.
fn terminating_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.4) {
        let v = ["x", "y"][rng.gen_range(0..2)];
        return match rng.gen_range(0..3) {
            0 => skip(),
            1 => assign(v, cnst(rng.gen_range(-2..=2))),
            _ => assign(v, ImpExpr::add(var(v), cnst(rng.gen_range(-2..=2)))),
        };
    }
    seq(terminating_term(rng, depth - 1), terminating_term(rng, depth - 1))
}

/// A component pair that is equivalent at the flavour on every store, by
/// construction: identical terms; the first-write-then-adjust shape (equal
/// traces); same-length runs into the same final store (equal costs); or a
/// skip-padded copy (equal termination behaviour).
fn component_pair(rng: &mut ChaCha8Rng, flavor: equivalence::Flavor) -> (Term, Term) {
    use equivalence::Flavor;
    let families = match flavor {
        Flavor::Trace => 2,
        Flavor::Cost => 3,
        Flavor::Termination => 4,
    };
    let v = ["x", "y"][rng.gen_range(0..2)];
    match rng.gen_range(0..families) {
        0 => {
            let t = terminating_term(rng, 2);
            (t.clone(), t)
        }
        1 => {
            let a = rng.gen_range(-2..=2);
            let b = rng.gen_range(-2..=2);
            (
                seq(assign(v, cnst(a)), assign(v, cnst(b))),
                seq(assign(v, cnst(a)), assign(v, ImpExpr::add(var(v), cnst(b - a)))),
            )
        }
        2 => {
            let a = rng.gen_range(-2..=2);
            let b = a + rng.gen_range(1..=2);
            let c = rng.gen_range(-2..=2);
            (
                seq(assign(v, cnst(a)), assign(v, cnst(c))),
                seq(assign(v, cnst(b)), assign(v, cnst(c))),
            )
        }
        _ => {
            let t = terminating_term(rng, 2);
            (t.clone(), seq(skip(), t))
        }
    }
}

#[test]
fn a04_equivalences_are_congruences_under_random_composition() {
    use equivalence::{imp_congruence_trial, spec_congruence_trial, Flavor, ImpCtor, TrialResult};
    let t0 = Instant::now();
    let stores = trial_stores();

    for flavor in Flavor::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut passes, mut skips) = (0usize, 0usize);

        for _ in 0..1100 {
            let (ctor, pairs) = if rng.gen_bool(0.5) {
                (
                    ImpCtor::Seq,
                    vec![component_pair(&mut rng, flavor), component_pair(&mut rng, flavor)],
                )
            } else {
                let guard = match rng.gen_range(0..4) {
                    0 => var("x"),
                    1 => var("y"),
                    2 => cnst(0),
                    _ => ImpExpr::sub(var("x"), cnst(1)),
                };
                (ImpCtor::While(guard), vec![component_pair(&mut rng, flavor)])
            };
            match imp_congruence_trial(&ctor, &pairs, &stores, flavor, 300) {
                TrialResult::Pass => passes += 1,
                TrialResult::Skipped => skips += 1,
                TrialResult::Violation(msg) => panic!("congruence violation ({flavor}): {msg}"),
            }
        }

        let mut spec_passes = 0usize;
        for _ in 0..400 {
            let (spec, op) = loop {
                let spec = stateful_sos::random_cool_spec(&mut rng);
                let candidates: Vec<String> = spec
                    .ops()
                    .iter()
                    .filter(|o| o.arity >= 1)
                    .map(|o| o.name.clone())
                    .collect();
                if let Some(op) = candidates.first() {
                    break (spec, op.clone());
                }
            };
            let arity = spec.ops()[spec.op_id(&op).unwrap()].arity;
            let hole = rng.gen_range(0..arity);
            let fillers: Vec<Term> =
                (0..arity).map(|_| stateful_sos::random_closed_term(&mut rng, &spec, 2)).collect();
            let t = stateful_sos::random_closed_term(&mut rng, &spec, 3);
            let pair = if rng.gen_bool(0.7) {
                (t.clone(), t)
            } else {
                (t, stateful_sos::random_closed_term(&mut rng, &spec, 3))
            };
            match spec_congruence_trial(&spec, &op, hole, &fillers, &pair, flavor, 200) {
                TrialResult::Pass => spec_passes += 1,
                TrialResult::Skipped => skips += 1,
                TrialResult::Violation(msg) => {
                    panic!("rule-table congruence violation ({flavor}): {msg}")
                }
            }
        }

        println!(
            "  {flavor}: 1500 trials, {} passes ({spec_passes} on rule tables), {skips} skipped",
            passes + spec_passes
        );
        assert!(passes >= 500, "imperative trials mostly certify: {passes}");
        assert!(spec_passes >= 50, "rule-table trials are not vacuous: {spec_passes}");
    }
    done("congruence trials: 0 violations in 4500 trials", t0, Duration::from_secs(120));
}

// ---------------------------------------------------------------------------
// 5. The format checker: the builtin table is accepted with `seq` receiving
//    in position 1, and each documented way to break the format is rejected
//    for the right reason.

#[test]
fn a05_format_checker_accepts_builtin_and_rejects_mutations() {
    use core_syntax::MetaVar;
    use stateful_sos::{
        check_cool, imp_as_spec, ConclusionSchema, CoolReason, SpecOp, StatePat, StateRef,
        StatefulSpec, TriggerSchema,
    };
    let t0 = Instant::now();

    let report = check_cool(&imp_as_spec(3));
    assert!(report.cool, "{:?}", report.violations);
    assert_eq!(report.active, vec![("seq".to_string(), 1)]);

    // A two-operator table with the standard sequencing rules, then broken
    // three ways.
    type Rules = Vec<(String, TriggerSchema, ConclusionSchema)>;
    let build = |mutate: &dyn Fn(&mut Rules)| {
        let pass_head =
            Term::op("seq", vec![Term::meta(MetaVar::Y(1)), Term::meta(MetaVar::X(2))]);
        let drop_head = Term::meta(MetaVar::X(2));
        let mut rules: Rules = vec![(
            "skip".to_string(),
            TriggerSchema { writes: BTreeSet::new(), state: StatePat::Any, succ: vec![] },
            ConclusionSchema::Stop { state: StateRef::Input },
        )];
        for wmask in 0u32..4 {
            let writes: BTreeSet<usize> = (0..2).filter(|i| wmask & (1 << i) != 0).collect();
            let term = if writes.contains(&0) { pass_head.clone() } else { drop_head.clone() };
            rules.push((
                "seq".to_string(),
                TriggerSchema { writes, state: StatePat::Any, succ: vec![StatePat::Any; 2] },
                ConclusionSchema::Step { term, state: StateRef::Succ(0) },
            ));
        }
        mutate(&mut rules);
        let spec = StatefulSpec::new(
            vec!["a".into(), "b".into()],
            vec![SpecOp::new("skip", 0), SpecOp::new("seq", 2)],
            rules,
        )
        .unwrap();
        check_cool(&spec)
    };

    // Continuation target mentions the argument whose result it consumed.
    let report = build(&|rules| {
        let bad = Term::op("seq", vec![Term::meta(MetaVar::X(1)), Term::meta(MetaVar::X(2))]);
        for (op, schema, conc) in rules.iter_mut() {
            if op == "seq" && !schema.writes.contains(&0) {
                *conc = ConclusionSchema::Step { term: bad.clone(), state: StateRef::Succ(0) };
            }
        }
    });
    assert!(!report.cool);
    assert!(
        report.violations.iter().any(|v| v.op == "seq"
            && v.candidate == Some(1)
            && v.reason == CoolReason::TargetMentionsReceiving),
        "{:?}",
        report.violations
    );

    // Continuation keyed on the observed state instead of the head's result.
    let report = build(&|rules| {
        for (op, schema, conc) in rules.iter_mut() {
            if op == "seq" && !schema.writes.contains(&0) {
                *conc = ConclusionSchema::Step {
                    term: Term::meta(MetaVar::X(2)),
                    state: StateRef::Input,
                };
            }
        }
    });
    assert!(!report.cool);
    assert!(
        report.violations.iter().any(|v| v.op == "seq"
            && v.candidate == Some(1)
            && v.reason == CoolReason::DependsOnObservedState),
        "{:?}",
        report.violations
    );

    // Stepping heads must be carried along: dropping the runner loses patience.
    let report = build(&|rules| {
        for (op, schema, conc) in rules.iter_mut() {
            if op == "seq" && schema.writes.contains(&0) {
                *conc = ConclusionSchema::Step {
                    term: Term::meta(MetaVar::X(2)),
                    state: StateRef::Succ(0),
                };
            }
        }
    });
    assert!(!report.cool);
    assert!(
        report.violations.iter().any(|v| v.op == "seq"
            && v.candidate == Some(1)
            && v.reason == CoolReason::NotPatient),
        "{:?}",
        report.violations
    );

    done("format checker: builtin accepted, 3 mutations rejected", t0, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// 6. The derived reader-writer system of the builtin table agrees with the
//    hand-coded two-sorted semantics on every reachable transition.

#[test]
fn a06_derived_system_matches_hand_coded_semantics_stepwise() {
    use stateful_sos::{
        decode_term, derive_rw, imp_as_spec, rw_writer_step, store_of_state, GStep, GWriter,
        RWSpec,
    };
    let t0 = Instant::now();

    fn map_writer(rw: &RWSpec, c: &GWriter) -> Writer {
        match c {
            GWriter::Run(t, s) => Writer::run(decode_term(t), store_of_state(*s)),
            GWriter::Ret(s) => Writer::Ret(store_of_state(*s)),
            GWriter::Emit(s, inner) => Writer::emit(store_of_state(*s), map_writer(rw, inner)),
            GWriter::Bar { op, args, inner } => {
                assert_eq!(rw.base.ops()[*op].name, "seq");
                Writer::seq(map_writer(rw, inner), decode_term(&args[1]))
            }
        }
    }

    let rw = derive_rw(&imp_as_spec(9)).expect("builtin table is in the format");
    let mut by_depth: Vec<Vec<Term>> = vec![vec![
        Term::op("skip", vec![]),
        Term::op("asg0", vec![]),
        Term::op("asg1", vec![]),
        Term::op("asg2", vec![]),
    ]];
    for depth in 2..=3 {
        let mut level = Vec::new();
        let smaller: Vec<Term> = by_depth.iter().flatten().cloned().collect();
        for t in &smaller {
            if t.depth() + 1 == depth {
                level.push(Term::op("while_x", vec![t.clone()]));
            }
        }
        for a in &smaller {
            for b in &smaller {
                if a.depth().max(b.depth()) + 1 == depth {
                    level.push(Term::op("seq", vec![a.clone(), b.clone()]));
                }
            }
        }
        by_depth.push(level);
    }
    let terms: Vec<Term> = by_depth.into_iter().flatten().collect();
    assert_eq!(terms.len(), 604);

    let mut steps_checked = 0usize;
    for t in &terms {
        for s0 in 0..10usize {
            let mut cur = GWriter::Run(t.clone(), s0);
            for _ in 0..60 {
                let got = rw_writer_step(&rw, &cur).unwrap();
                let want = writer_step(&map_writer(&rw, &cur)).unwrap();
                steps_checked += 1;
                match (&got, want) {
                    (GStep::Silent(n), WriterStep::Silent(wn)) => {
                        assert_eq!(map_writer(&rw, n), wn, "term {t}, start {s0}");
                    }
                    (GStep::Output(n, s), WriterStep::Output(wn, ws)) => {
                        assert_eq!(map_writer(&rw, n), wn, "term {t}, start {s0}");
                        assert_eq!(store_of_state(*s), ws, "term {t}, start {s0}");
                    }
                    (GStep::Done(s), WriterStep::Done(ws)) => {
                        assert_eq!(store_of_state(*s), ws, "term {t}, start {s0}");
                    }
                    (g, w) => panic!("step shape differs on {t} from {s0}: {g:?} vs {w:?}"),
                }
                match got {
                    GStep::Silent(n) | GStep::Output(n, _) => cur = n,
                    GStep::Done(_) => break,
                }
            }
        }
    }
    println!("  {steps_checked} transitions compared across 604 terms x 10 stores");
    assert!(steps_checked > 50_000);
    done("derived system mirrors the hand-coded one stepwise", t0, Duration::from_secs(10));
}

// ---------------------------------------------------------------------------
// 7. On deterministic finite systems, mutual similarity is semantic-map
//    equality, and the iterative greatest simulation equals the brute-force
//    union over all relations on tiny systems.

#[test]
fn a07_similarity_kernels_match_semantic_maps_and_brute_force() {
    use equivalence::{
        brute_force_greatest, cost_equiv_writers, greatest_simulation, random_system,
        ter_equiv_writers, trace_equiv_readers, trace_equiv_writers, Flavor,
    };
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sampled = 0usize;
    let mut brute_checked = 0usize;
    while sampled < 300 {
        let sys = random_system(&mut rng, 1);
        if sys.writers.len() > 4 {
            continue;
        }
        sampled += 1;
        assert!(sys.is_deterministic());

        let trace_kernel = greatest_simulation(&sys, Flavor::Trace).symmetric_kernel();
        let cost_kernel = greatest_simulation(&sys, Flavor::Cost).symmetric_kernel();
        let ter_kernel = greatest_simulation(&sys, Flavor::Termination).symmetric_kernel();
        for a in 0..sys.writers.len() {
            for b in 0..sys.writers.len() {
                let pair = (a, b);
                assert_eq!(
                    trace_kernel.writers.contains(&pair),
                    trace_equiv_writers(&sys, a, b).unwrap().equal,
                    "trace kernel vs trace map at {pair:?}"
                );
                assert_eq!(
                    cost_kernel.writers.contains(&pair),
                    cost_equiv_writers(&sys, a, b).unwrap(),
                    "cost kernel vs cost map at {pair:?}"
                );
                assert_eq!(
                    ter_kernel.writers.contains(&pair),
                    ter_equiv_writers(&sys, a, b).unwrap(),
                    "termination kernel vs termination map at {pair:?}"
                );
            }
        }
        for a in 0..sys.readers.len() {
            for b in 0..sys.readers.len() {
                assert_eq!(
                    trace_kernel.readers.contains(&(a, b)),
                    trace_equiv_readers(&sys, a, b).unwrap().equal,
                    "reader trace kernel at {:?}",
                    (a, b)
                );
            }
        }

        if sys.writers.len() <= 3 {
            brute_checked += 1;
            for flavor in Flavor::ALL {
                assert_eq!(
                    greatest_simulation(&sys, flavor),
                    brute_force_greatest(&sys, flavor),
                    "brute-force union disagrees at {flavor}"
                );
            }
        }
    }
    println!("  300 deterministic systems checked, {brute_checked} also brute-forced");
    assert!(brute_checked >= 50);
    done("similarity kernels = semantic maps; fixpoint = brute force", t0, Duration::from_secs(60));
}

// ---------------------------------------------------------------------------
// 8. Weakening: simulations keep working when the store sample grows, on
//    500 random (system, relation, flavour) triples.

#[test]
fn a08_weakening_property_on_random_triples() {
    use equivalence::{check_weakening_property, random_relation, random_system, Flavor};
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..500 {
        let sys = random_system(&mut rng, 2);
        let density = rng.gen_range(0.1..0.9);
        let rel = random_relation(&mut rng, &sys, density);
        let flavor = Flavor::ALL[i % 3];
        assert!(check_weakening_property(&sys, &rel, flavor), "triple {i} ({flavor})");
    }
    println!("  500 triples checked");
    done("weakening property holds on 500 random triples", t0, Duration::from_secs(30));
}

// ---------------------------------------------------------------------------
// 9. The reference-cell worked examples: both relation certificates hold,
//    the double-assignment pair runs to the same store and simulates both
//    ways, the knot pair diverges certifiably, and the context search
//    separates exactly the pairs it should.

#[test]
fn a09_reference_cell_worked_examples_certify() {
    use ref2::{
        certified_run, check_adequacy, check_ho_termination_sim, ctx_refute,
        double_assignment_pair, first_order_stores, greatest_finite_sim, landin_pair, omega,
        proc_assign_relation, ref_run, skiping_relation, store, AdequacyVerdict, CtxOutcome, Loc,
        RefExpr, RefOutcome, RefReader, RefRelation, RefValue, RefVerdict, TermStatus,
    };
    let t0 = Instant::now();
    let stores = first_order_stores();

    // skip ; p related to p, closed under the writer steps both take.
    let ps = vec![
        RefReader::Skip,
        RefReader::Expr(RefExpr::Int(7)),
        RefReader::assign(RefExpr::Loc(Loc(0)), RefReader::Expr(RefExpr::Int(2))),
        RefReader::proc(omega()),
    ];
    let skiping = skiping_relation(&ps, &stores);
    assert_eq!(check_ho_termination_sim(&skiping, &stores, 500), RefVerdict::Holds);

    // Assigning related procedures to a fresh cell stays related.
    let base = skiping_relation(&[RefReader::Skip, RefReader::Expr(RefExpr::Int(7))], &stores);
    let q = proc_assign_relation(&base, Loc(1), &stores);
    assert_eq!(check_ho_termination_sim(&q, &stores, 500), RefVerdict::Holds);

    // Double assignment: both sides leave 4 in the cell, and simulate both ways.
    let (da_left, da_right) = double_assignment_pair(Loc(0));
    let zero = store(&[(0, RefValue::Int(0))]);
    let four = store(&[(0, RefValue::Int(4))]);
    assert_eq!(ref_run(&da_left, &zero, 1000), RefOutcome::Store(four.clone()));
    assert_eq!(ref_run(&da_right, &zero, 1000), RefOutcome::Store(four));
    let rel = greatest_finite_sim(
        &[(da_left.clone(), da_right.clone())],
        &BTreeSet::new(),
        &stores,
        2000,
        2000,
    )
    .unwrap();
    assert_eq!(check_ho_termination_sim(&rel, &stores, 2000), RefVerdict::Holds);
    assert_eq!(check_ho_termination_sim(&rel.converse(), &stores, 2000), RefVerdict::Holds);

    // The knot: both sides diverge certifiably, so the pair is adequate.
    let (knot_left, knot_right) = landin_pair(Loc(0));
    for s in &stores {
        assert!(matches!(certified_run(&knot_left, s, 2000), TermStatus::Diverges(_)));
        assert!(matches!(certified_run(&knot_right, s, 2000), TermStatus::Diverges(_)));
    }
    let mut pair_only = RefRelation::default();
    pair_only.readers.insert((knot_left, knot_right));
    assert_eq!(check_adequacy(&pair_only.symmetrize(), &stores, 2000), AdequacyVerdict::Holds);

    // No small context separates a skip-ing pair ...
    let p = RefReader::assign(RefExpr::Loc(Loc(0)), RefReader::Expr(RefExpr::Int(2)));
    match ctx_refute(&RefReader::seq(RefReader::Skip, p.clone()), &p, 4, &stores, 800) {
        CtxOutcome::NotFound { contexts_tried } => {
            println!("  skip-ing pair survived {contexts_tried} contexts");
        }
        CtxOutcome::Counterexample { context, .. } => panic!("separated by {context}"),
    }
    // ... and the empty context separates skip from the loop at once.
    match ctx_refute(&RefReader::Skip, &omega(), 4, &stores, 800) {
        CtxOutcome::Counterexample { context, left, right, .. } => {
            assert_eq!(context, "\u{b7}");
            assert!(matches!(left, TermStatus::Terminates(_)));
            assert!(matches!(right, TermStatus::Diverges(_)));
        }
        v => panic!("expected the empty context to separate them, got {v:?}"),
    }

    done("reference-cell worked examples all certify", t0, Duration::from_secs(120));
}

// ---------------------------------------------------------------------------
// 10. The regression set: every shipped relation is a simulation in both
//     directions, and no context of size <= 4 refutes any related pair.

#[test]
fn a10_certified_relations_survive_the_context_search() {
    use ref2::{check_ho_termination_sim, ctx_refute, regression_set, CtxOutcome, RefVerdict};
    let t0 = Instant::now();
    let cases = regression_set().unwrap();
    assert_eq!(cases.len(), 4);

    let mut pairs_searched = 0usize;
    let mut contexts_total = 0usize;
    for case in &cases {
        assert_eq!(
            check_ho_termination_sim(&case.relation, &case.stores, 2000),
            RefVerdict::Holds,
            "{} forward",
            case.name
        );
        assert_eq!(
            check_ho_termination_sim(&case.relation.converse(), &case.stores, 2000),
            RefVerdict::Holds,
            "{} backward",
            case.name
        );
        for (p, q) in &case.relation.readers {
            match ctx_refute(p, q, 4, &case.stores, 1000) {
                CtxOutcome::NotFound { contexts_tried } => {
                    pairs_searched += 1;
                    contexts_total += contexts_tried;
                }
                CtxOutcome::Counterexample { context, store, left, right } => panic!(
                    "{}: {p} vs {q} separated by {context} (store {store:?}): {left:?} vs {right:?}",
                    case.name
                ),
            }
        }
    }
    println!("  {pairs_searched} certified pairs x up to size 4: {contexts_total} contexts, 0 refutations");
    assert!(pairs_searched >= 8);
    done("regression relations survive the context search", t0, Duration::from_secs(300));
}
