use std::collections::BTreeMap;
use std::fmt;

/// A memory location, concretely a natural number. Rendered `#n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc(pub u64);

/// Expressions: location literals, integers, dereference, and arithmetic.
/// Rendered `#n`, `n`, `!e`, `e (+) e`, `e (-) e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefExpr {
    Loc(Loc),
    Int(i64),
    Deref(Box<RefExpr>),
    Add(Box<RefExpr>, Box<RefExpr>),
    Sub(Box<RefExpr>, Box<RefExpr>),
}

/// A storable value: a location, an integer, or a reader term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefValue {
    Loc(Loc),
    Int(i64),
    Reader(RefReader),
}

/// A partial finite map from locations to values. Lookup outside the
/// domain is `None`, never a panic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefStore(pub BTreeMap<Loc, RefValue>);

impl RefStore {
    pub fn empty() -> RefStore {
        RefStore(BTreeMap::new())
    }

    pub fn get(&self, l: Loc) -> Option<&RefValue> {
        self.0.get(&l)
    }

    pub fn contains(&self, l: Loc) -> bool {
        self.0.contains_key(&l)
    }

    /// `s[l ↦ v]`: update or extend.
    pub fn update(&self, l: Loc, v: RefValue) -> RefStore {
        let mut m = self.0.clone();
        m.insert(l, v);
        RefStore(m)
    }

    /// The least location not in the domain.
    pub fn min_unused(&self) -> Loc {
        let mut k = 0u64;
        for l in self.0.keys() {
            if l.0 == k {
                k += 1;
            } else if l.0 > k {
                break;
            }
        }
        Loc(k)
    }

    pub fn domain(&self) -> impl Iterator<Item = Loc> + '_ {
        self.0.keys().copied()
    }
}

/// Reader-sorted terms: programs waiting for an input store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefReader {
    Skip,
    While(RefExpr, Box<RefReader>),
    /// `e := p`: evaluate `p`, then write its value to the location `e`
    /// denotes in the final store.
    Assign(RefExpr, Box<RefReader>),
    If(RefExpr, Box<RefReader>, Box<RefReader>),
    Seq(Box<RefReader>, Box<RefReader>),
    /// `&p`: evaluate `p`, then allocate a fresh cell holding its value and
    /// return the new location.
    Alloc(Box<RefReader>),
    /// `expr e`: evaluate `e` and return the result; if the result is a
    /// stored reader, run it.
    Expr(RefExpr),
    /// `proc p`: return the reader `p` itself as a value.
    Proc(Box<RefReader>),
}

/// Writer-sorted terms: running programs. `Run(p, s)` is `[p]_s`,
/// `Announce(s, c)` is `s.c`, `RetVal(v, s)` is `ret_{v,s}`, and
/// `RetStore(s)` is `ret_s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefWriter {
    Assign(RefExpr, Box<RefWriter>),
    Seq(Box<RefWriter>, RefReader),
    Alloc(Box<RefWriter>),
    Announce(RefStore, Box<RefWriter>),
    Run(RefReader, RefStore),
    RetVal(RefValue, RefStore),
    RetStore(RefStore),
}

impl RefReader {
    pub fn while_(e: RefExpr, p: RefReader) -> RefReader {
        RefReader::While(e, Box::new(p))
    }

    pub fn assign(e: RefExpr, p: RefReader) -> RefReader {
        RefReader::Assign(e, Box::new(p))
    }

    pub fn if_(e: RefExpr, p: RefReader, q: RefReader) -> RefReader {
        RefReader::If(e, Box::new(p), Box::new(q))
    }

    pub fn seq(p: RefReader, q: RefReader) -> RefReader {
        RefReader::Seq(Box::new(p), Box::new(q))
    }

    pub fn alloc(p: RefReader) -> RefReader {
        RefReader::Alloc(Box::new(p))
    }

    pub fn proc(p: RefReader) -> RefReader {
        RefReader::Proc(Box::new(p))
    }

    /// Number of AST nodes (readers and expressions each count one).
    pub fn size(&self) -> usize {
        match self {
            RefReader::Skip => 1,
            RefReader::While(e, p) | RefReader::Assign(e, p) => 1 + e.size() + p.size(),
            RefReader::If(e, p, q) => 1 + e.size() + p.size() + q.size(),
            RefReader::Seq(p, q) => 1 + p.size() + q.size(),
            RefReader::Alloc(p) | RefReader::Proc(p) => 1 + p.size(),
            RefReader::Expr(e) => 1 + e.size(),
        }
    }
}

impl RefExpr {
    pub fn deref(e: RefExpr) -> RefExpr {
        RefExpr::Deref(Box::new(e))
    }

    pub fn add(a: RefExpr, b: RefExpr) -> RefExpr {
        RefExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: RefExpr, b: RefExpr) -> RefExpr {
        RefExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            RefExpr::Loc(_) | RefExpr::Int(_) => 1,
            RefExpr::Deref(e) => 1 + e.size(),
            RefExpr::Add(a, b) | RefExpr::Sub(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl RefWriter {
    pub fn assign(e: RefExpr, c: RefWriter) -> RefWriter {
        RefWriter::Assign(e, Box::new(c))
    }

    pub fn seq(c: RefWriter, q: RefReader) -> RefWriter {
        RefWriter::Seq(Box::new(c), q)
    }

    pub fn alloc(c: RefWriter) -> RefWriter {
        RefWriter::Alloc(Box::new(c))
    }

    pub fn announce(s: RefStore, c: RefWriter) -> RefWriter {
        RefWriter::Announce(s, Box::new(c))
    }

    pub fn run(p: RefReader, s: RefStore) -> RefWriter {
        RefWriter::Run(p, s)
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for RefExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `!` binds tightest; `(+)`/`(-)` share one level, left-associative.
        fn operand(e: &RefExpr, right: bool) -> String {
            match e {
                RefExpr::Add(..) | RefExpr::Sub(..) if right => format!("({e})"),
                _ => format!("{e}"),
            }
        }
        match self {
            RefExpr::Loc(l) => write!(f, "{l}"),
            RefExpr::Int(n) => write!(f, "{n}"),
            RefExpr::Deref(e) => match **e {
                RefExpr::Add(..) | RefExpr::Sub(..) => write!(f, "!({e})"),
                _ => write!(f, "!{e}"),
            },
            RefExpr::Add(a, b) => {
                write!(f, "{} (+) {}", operand(a, false), operand(b, true))
            }
            RefExpr::Sub(a, b) => {
                write!(f, "{} (-) {}", operand(a, false), operand(b, true))
            }
        }
    }
}

impl fmt::Display for RefValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefValue::Loc(l) => write!(f, "{l}"),
            RefValue::Int(n) => write!(f, "{n}"),
            RefValue::Reader(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for RefStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}={v}")?;
        }
        write!(f, "}}")
    }
}

/// Parenthesize a reader appearing where only a delimited form may stand
/// (after `:=`, under `&`, or left of `;`).
fn tight(p: &RefReader) -> String {
    match p {
        RefReader::Seq(..) | RefReader::Assign(..) => format!("({p})"),
        _ => format!("{p}"),
    }
}

impl fmt::Display for RefReader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefReader::Skip => write!(f, "skip"),
            RefReader::While(e, p) => write!(f, "while {e} {{ {p} }}"),
            RefReader::Assign(e, p) => write!(f, "{e} := {}", tight(p)),
            RefReader::If(e, p, q) => write!(f, "if {e} {{ {p} }} else {{ {q} }}"),
            RefReader::Seq(p, q) => match **p {
                RefReader::Seq(..) => write!(f, "({p}) ; {q}"),
                _ => write!(f, "{p} ; {q}"),
            },
            RefReader::Alloc(p) => write!(f, "&{}", tight(p)),
            RefReader::Expr(e) => write!(f, "expr {e}"),
            RefReader::Proc(p) => write!(f, "proc {{ {p} }}"),
        }
    }
}

impl fmt::Display for RefWriter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn tight_w(c: &RefWriter) -> String {
            match c {
                RefWriter::Seq(..) | RefWriter::Assign(..) => format!("({c})"),
                _ => format!("{c}"),
            }
        }
        match self {
            RefWriter::Assign(e, c) => write!(f, "{e} := {}", tight_w(c)),
            RefWriter::Seq(c, q) => write!(f, "{} ; {}", tight_w(c), q),
            RefWriter::Alloc(c) => write!(f, "&{}", tight_w(c)),
            RefWriter::Announce(s, c) => write!(f, "{s}.{}", tight_w(c)),
            RefWriter::Run(p, s) => write!(f, "[{p}]@{s}"),
            RefWriter::RetVal(v, s) => write!(f, "ret({v})@{s}"),
            RefWriter::RetStore(s) => write!(f, "ret@{s}"),
        }
    }
}

/// Convenience store constructor from `(location index, value)` pairs.
pub fn store(entries: &[(u64, RefValue)]) -> RefStore {
    RefStore(entries.iter().map(|(l, v)| (Loc(*l), v.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displays_follow_the_concrete_syntax() {
        let e = RefExpr::sub(RefExpr::deref(RefExpr::Loc(Loc(0))), RefExpr::Int(1));
        assert_eq!(e.to_string(), "!#0 (-) 1");
        let p = RefReader::seq(
            RefReader::assign(RefExpr::Loc(Loc(0)), RefReader::Expr(RefExpr::Int(2))),
            RefReader::while_(e, RefReader::Skip),
        );
        assert_eq!(p.to_string(), "#0 := expr 2 ; while !#0 (-) 1 { skip }");
        let nested = RefReader::assign(
            RefExpr::Loc(Loc(0)),
            RefReader::seq(RefReader::Skip, RefReader::Skip),
        );
        assert_eq!(nested.to_string(), "#0 := (skip ; skip)");
        let c = RefWriter::seq(
            RefWriter::run(RefReader::Skip, store(&[(0, RefValue::Int(5))])),
            RefReader::Skip,
        );
        assert_eq!(c.to_string(), "[skip]@{#0=5} ; skip");
    }

    #[test]
    fn min_unused_skips_over_a_packed_prefix() {
        let s = store(&[(0, RefValue::Int(1)), (1, RefValue::Int(2)), (3, RefValue::Int(4))]);
        assert_eq!(s.min_unused(), Loc(2));
        assert_eq!(RefStore::empty().min_unused(), Loc(0));
        let t = store(&[(1, RefValue::Int(0))]);
        assert_eq!(t.min_unused(), Loc(0));
    }

    #[test]
    fn store_update_is_persistent() {
        let s = store(&[(0, RefValue::Int(1))]);
        let t = s.update(Loc(0), RefValue::Int(2));
        assert_eq!(s.get(Loc(0)), Some(&RefValue::Int(1)));
        assert_eq!(t.get(Loc(0)), Some(&RefValue::Int(2)));
        assert_eq!(t.min_unused(), Loc(1));
    }
}
