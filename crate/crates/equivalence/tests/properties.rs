use equivalence::{
    brute_force_greatest, check_simulation, check_weakening_property, cost_equiv_writers,
    greatest_simulation, random_relation, random_system, ter_equiv_writers, trace_equiv_readers,
    trace_equiv_writers, FiniteRWSystem, Flavor, Relation2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn det_system(rng: &mut ChaCha8Rng) -> FiniteRWSystem {
    random_system(rng, 1)
}

#[test]
fn greatest_simulation_is_a_fixpoint_and_passes_itself() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let sys = random_system(&mut rng, 2);
        for flavor in Flavor::ALL {
            let g = greatest_simulation(&sys, flavor);
            assert!(check_simulation(&sys, &g, flavor).holds());
            // One more pruning pass changes nothing.
            let again = greatest_simulation(&sys, flavor);
            assert_eq!(g, again);
        }
    }
}

#[test]
fn identity_is_always_contained_in_the_greatest_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..40 {
        let sys = random_system(&mut rng, 2);
        for flavor in Flavor::ALL {
            let g = greatest_simulation(&sys, flavor);
            let id = Relation2::identity(&sys);
            assert!(id.readers.is_subset(&g.readers));
            assert!(id.writers.is_subset(&g.writers));
        }
    }
}

#[test]
fn flavor_strength_chain_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..80 {
        let sys = random_system(&mut rng, 2);
        let trace = greatest_simulation(&sys, Flavor::Trace);
        let cost = greatest_simulation(&sys, Flavor::Cost);
        let ter = greatest_simulation(&sys, Flavor::Termination);
        assert!(trace.writers.is_subset(&cost.writers));
        assert!(cost.writers.is_subset(&ter.writers));
        assert!(trace.readers.is_subset(&cost.readers));
        assert!(cost.readers.is_subset(&ter.readers));
    }
}

/// On deterministic systems without silent loops, mutual similarity is
/// exactly equality of the corresponding semantic maps.
#[test]
fn similarity_kernels_coincide_with_semantic_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..300 {
        let sys = det_system(&mut rng);
        let nw = sys.writers.len();

        let trace_kernel = greatest_simulation(&sys, Flavor::Trace).symmetric_kernel();
        let cost_kernel = greatest_simulation(&sys, Flavor::Cost).symmetric_kernel();
        let ter_kernel = greatest_simulation(&sys, Flavor::Termination).symmetric_kernel();

        for a in 0..nw {
            for b in 0..nw {
                let pair = (a, b);
                assert_eq!(
                    trace_kernel.writers.contains(&pair),
                    trace_equiv_writers(&sys, a, b).unwrap().equal,
                    "trace kernel mismatch at {pair:?}",
                );
                assert_eq!(
                    cost_kernel.writers.contains(&pair),
                    cost_equiv_writers(&sys, a, b).unwrap(),
                    "cost kernel mismatch at {pair:?}",
                );
                assert_eq!(
                    ter_kernel.writers.contains(&pair),
                    ter_equiv_writers(&sys, a, b).unwrap(),
                    "termination kernel mismatch at {pair:?}",
                );
            }
        }
        for a in 0..sys.readers.len() {
            for b in 0..sys.readers.len() {
                assert_eq!(
                    trace_kernel.readers.contains(&(a, b)),
                    trace_equiv_readers(&sys, a, b).unwrap().equal,
                    "reader trace kernel mismatch at {:?}",
                    (a, b)
                );
            }
        }
    }
}

#[test]
fn brute_force_oracle_agrees_on_tiny_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut tested = 0;
    while tested < 40 {
        let sys = random_system(&mut rng, 2);
        if sys.writers.len() > 3 {
            continue;
        }
        tested += 1;
        for flavor in Flavor::ALL {
            let fast = greatest_simulation(&sys, flavor);
            let brute = brute_force_greatest(&sys, flavor);
            assert_eq!(fast, brute, "flavor {flavor}");
        }
    }
}

#[test]
fn weakening_property_holds_on_500_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for i in 0..500 {
        let sys = random_system(&mut rng, 2);
        let density = rng.gen_range(0.1..0.9);
        let rel = random_relation(&mut rng, &sys, density);
        let flavor = Flavor::ALL[i % 3];
        assert!(check_weakening_property(&sys, &rel, flavor));
    }
}

#[test]
fn greatest_contains_every_passing_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..60 {
        let sys = random_system(&mut rng, 2);
        for flavor in Flavor::ALL {
            let g = greatest_simulation(&sys, flavor);
            for _ in 0..5 {
                let rel = random_relation(&mut rng, &sys, 0.3);
                if check_simulation(&sys, &rel, flavor).holds() {
                    assert!(rel.writers.is_subset(&g.writers));
                    assert!(rel.readers.is_subset(&g.readers));
                }
            }
        }
    }
}
