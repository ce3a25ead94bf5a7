//! Stateful operational rule systems over a finite state alphabet:
//! validation, execution, the passive/active format check, and the
//! automatic derivation of an equivalent reader-writer system.

pub mod builtin;
pub mod cool;
pub mod derive;
pub mod engine;
pub mod gen;
pub mod spec;

pub use builtin::{decode_term, imp_as_spec, state_of_store, store_of_state};
pub use cool::{check_cool, CoolReason, CoolReport, CoolViolation, OpClass};
pub use derive::{
    derive_rw, rw_reader_step, rw_trace, rw_writer_step, verify_preservation,
    verify_preservation_one, GStep, GWriter, PreservationMismatch, PreservationReport, RWSpec,
};
pub use engine::{l_step, l_trace, LStep, TraceOutcome};
pub use gen::{random_closed_term, random_cool_spec};
pub use spec::{
    first_meta, from_raw, load_spec, ConclusionSchema, RawConclusion, RawRule, RawSpec,
    ResolvedConclusion, Rule, SpecError, SpecOp, StatePat, StateRef, StatefulSpec, Trigger,
    TriggerSchema,
};
