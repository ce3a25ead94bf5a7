//! Higher-order store language in the reader-writer style.
//!
//! Readers are programs waiting for a store; writers are running
//! configurations that may silently step, announce intermediate stores, or
//! terminate with a final store (and possibly a value). The `sim` module
//! checks termination-sensitive weak simulations over these configurations,
//! `examples` packages the worked equivalence relations, and `ctx` searches
//! for distinguishing contexts.

pub mod ast;
pub mod closure;
pub mod ctx;
pub mod examples;
pub mod gen;
pub mod semantics;
pub mod sim;

pub use ast::{store, Loc, RefExpr, RefReader, RefStore, RefValue, RefWriter};
pub use closure::{ref_weak_closure, WeakClosure};
pub use ctx::{ctx_refute, CtxOutcome, RCtx, WCtx};
pub use examples::{
    double_assignment_pair, first_order_stores, greatest_finite_sim, landin_pair, omega,
    proc_assign_relation, regression_set, skiping_relation, RegressionCase,
};
pub use semantics::{
    certified_run, certified_run_writer, ref_eev, ref_reader_step, ref_run, ref_writer_steps,
    RefOutcome, RefWriterStep, Stuck, TermStatus, WriterSteps,
};
pub use sim::{
    check_adequacy, check_ho_termination_sim, store_related, value_related, AdequacyVerdict,
    RefRelation, RefSort, RefVerdict,
};
