use std::fmt;

use core_syntax::{Term, VarStore};
use imp::{to_source, view, ImpView};

/// Writer-sorted terms: `[p]_s` (a reader caught running on a store),
/// `s.c` (emit `s`, then behave as `c`), `ret_s` (terminate in `s`),
/// and `c; q` (run `c`, then hand its final store to reader `q`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Writer {
    Run(Term, VarStore),
    Emit(VarStore, Box<Writer>),
    Ret(VarStore),
    Seq(Box<Writer>, Term),
}

impl Writer {
    pub fn run(p: Term, s: VarStore) -> Writer {
        Writer::Run(p, s)
    }

    pub fn emit(s: VarStore, c: Writer) -> Writer {
        Writer::Emit(s, Box::new(c))
    }

    pub fn seq(c: Writer, q: Term) -> Writer {
        Writer::Seq(Box::new(c), q)
    }
}

/// A term of either sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RWTerm {
    Reader(Term),
    Writer(Writer),
}

fn fmt_reader(q: &Term) -> String {
    // Sequencing binds loosest, so a seq reader on the right of `;` needs
    // parentheses to survive a round-trip.
    if matches!(view(q), Ok(ImpView::Seq(..))) {
        format!("({})", to_source(q))
    } else {
        to_source(q)
    }
}

impl fmt::Display for Writer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Writer::Run(p, s) => write!(f, "[{}]@{}", to_source(p), s),
            Writer::Emit(s, c) => {
                if matches!(**c, Writer::Seq(..)) {
                    write!(f, "{s}.({c})")
                } else {
                    write!(f, "{s}.{c}")
                }
            }
            Writer::Ret(s) => write!(f, "ret@{s}"),
            Writer::Seq(c, q) => write!(f, "{}; {}", c, fmt_reader(q)),
        }
    }
}

impl fmt::Display for RWTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RWTerm::Reader(p) => write!(f, "{}", to_source(p)),
            RWTerm::Writer(c) => write!(f, "{c}"),
        }
    }
}
