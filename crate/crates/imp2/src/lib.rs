//! The two-sorted reader-writer companion of the base language: readers are
//! exactly base-language terms, writers are running configurations that are
//! stepped without an input store. Provides the small-step semantics, weak
//! transition closures at both observation levels, trace extraction, and the
//! embedding verifier relating the two languages.

mod closure;
mod embedding;
mod semantics;
mod writer;

pub use closure::{weak_closure, Level, WeakClosure};
pub use embedding::{
    verify_embedding, verify_embedding_one, EmbeddingOutcome, EmbeddingReport, Mismatch,
};
pub use semantics::{imp2_trace, reader_step, writer_step, Imp2Error, WriterStep};
pub use writer::{RWTerm, Writer};
