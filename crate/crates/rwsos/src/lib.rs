//! The command-line front end: concrete-syntax parsers for the object
//! languages, JSON report emission, and command dispatch.

pub mod cli;
pub mod cursor;
pub mod imp_text;
pub mod ref_text;
pub mod report;
