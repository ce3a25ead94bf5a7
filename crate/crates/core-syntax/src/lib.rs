//! Shared term language for the workbench: two-sorted signatures,
//! first-order terms with literal leaves, variable stores, and the
//! arithmetic expressions used by the imperative languages.

mod expr;
mod signature;
mod store;
mod term;

pub use expr::ImpExpr;
pub use signature::{ArgSort, OpDecl, Signature, SignatureError, Sort};
pub use store::VarStore;
pub use term::{
    substitute, validate_term, Literal, MetaVar, Node, SortError, SubstError, Substitution, Term,
};
