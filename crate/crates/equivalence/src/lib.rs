//! Simulation checking over finite two-sorted transition systems,
//! greatest-similarity computation, exact trace equality for
//! deterministic systems, weakening-property tests, and congruence
//! trial harnesses for the imperative languages.

pub mod congruence;
pub mod simulation;
pub mod system;
pub mod traces;

pub use congruence::{imp_congruence_trial, spec_congruence_trial, ImpCtor, TrialResult};
pub use simulation::{
    brute_force_greatest, check_simulation, check_weakening_property, greatest_simulation,
    Failure, Flavor, Sort2, Verdict,
};
pub use system::{
    load_relation, load_system, random_relation, random_system, relation_from_raw,
    system_from_raw, EquivError, FStep, FiniteRWSystem, RawRelation, RawStep, RawSystem,
    Relation2,
};
pub use traces::{
    cost_class, cost_equiv_writers, run_stream, ter_class, ter_equiv_writers,
    trace_equiv_readers, trace_equiv_writers, StreamEnd, TraceEqReport,
};
