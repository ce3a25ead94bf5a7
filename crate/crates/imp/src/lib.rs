//! The imperative base language: expression evaluation, deterministic
//! small-step semantics, the trace/cost/termination extractors, and a
//! bounded resumption-bisimulation checker.

pub mod ast;

mod bisim;
mod semantics;

pub use ast::{assign, imp_signature, seq, skip, to_source, view, while_, ImpView};
pub use bisim::{check_resumption_bisim, BisimClause, BisimCounterexample, BisimVerdict};
pub use semantics::{
    cost_of_trace, eev, imp_step, imp_trace, ter_of_trace, CostResult, ImpError, ImpStepResult,
    TerResult, TraceResult,
};
