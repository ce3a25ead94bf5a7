use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// The two sorts of the reader-writer setting: readers wait for a store,
/// writers are running programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Reader,
    Writer,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Reader => write!(f, "reader"),
            Sort::Writer => write!(f, "writer"),
        }
    }
}

/// Argument positions of an operator: a proper sort or a literal kind.
/// Literal kinds let language-level binders (`x := e`, `[p]_s`, `s.c`)
/// be ordinary operators over `Term`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArgSort {
    Reader,
    Writer,
    VarName,
    Expr,
    State,
    Int,
}

impl ArgSort {
    pub fn of_sort(sort: Sort) -> ArgSort {
        match sort {
            Sort::Reader => ArgSort::Reader,
            Sort::Writer => ArgSort::Writer,
        }
    }
}

impl fmt::Display for ArgSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ArgSort::Reader => "reader",
            ArgSort::Writer => "writer",
            ArgSort::VarName => "variable name",
            ArgSort::Expr => "expression",
            ArgSort::State => "state",
            ArgSort::Int => "integer",
        };
        write!(f, "{name}")
    }
}

/// One operator declaration: name, argument kinds, result sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub args: Vec<ArgSort>,
    pub result: Sort,
}

impl OpDecl {
    pub fn new(name: impl Into<String>, args: Vec<ArgSort>, result: Sort) -> OpDecl {
        OpDecl { name: name.into(), args, result }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate operator `{0}`")]
    DuplicateOp(String),
}

/// A finite two-sorted signature.
#[derive(Debug, Clone)]
pub struct Signature {
    ops: Vec<OpDecl>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new(ops: Vec<OpDecl>) -> Result<Signature, SignatureError> {
        let mut index = HashMap::new();
        for (i, op) in ops.iter().enumerate() {
            if index.insert(op.name.clone(), i).is_some() {
                return Err(SignatureError::DuplicateOp(op.name.clone()));
            }
        }
        Ok(Signature { ops, index })
    }

    pub fn get(&self, name: &str) -> Option<&OpDecl> {
        self.index.get(name).map(|&i| &self.ops[i])
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }
}
