use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::ImpExpr;
use crate::signature::{ArgSort, Signature, Sort};
use crate::store::VarStore;

/// Rule variables: `x1..xn` range over operands, `y1..yn` over the results
/// of operands that make a step. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaVar {
    X(usize),
    Y(usize),
}

impl fmt::Display for MetaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaVar::X(i) => write!(f, "x{i}"),
            MetaVar::Y(i) => write!(f, "y{i}"),
        }
    }
}

/// Literal leaves embedded in terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    VarName(String),
    Expr(ImpExpr),
    State(VarStore),
    Int(i64),
}

impl Literal {
    pub fn arg_sort(&self) -> ArgSort {
        match self {
            Literal::VarName(_) => ArgSort::VarName,
            Literal::Expr(_) => ArgSort::Expr,
            Literal::State(_) => ArgSort::State,
            Literal::Int(_) => ArgSort::Int,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::VarName(x) => write!(f, "{x}"),
            Literal::Expr(e) => write!(f, "{e}"),
            Literal::State(s) => write!(f, "{s}"),
            Literal::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Op(String),
    Meta(MetaVar),
    Lit(Literal),
}

/// A first-order term: operators over children, with literal and rule-variable
/// leaves. Closed terms carry no `Meta` nodes. Immutable; structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub node: Node,
    pub children: Vec<Term>,
}

impl Term {
    pub fn op(name: impl Into<String>, children: Vec<Term>) -> Term {
        Term { node: Node::Op(name.into()), children }
    }

    pub fn lit(l: Literal) -> Term {
        Term { node: Node::Lit(l), children: Vec::new() }
    }

    pub fn meta(v: MetaVar) -> Term {
        Term { node: Node::Meta(v), children: Vec::new() }
    }

    pub fn op_name(&self) -> Option<&str> {
        match &self.node {
            Node::Op(name) => Some(name),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self.node, Node::Meta(_)) && self.children.iter().all(Term::is_closed)
    }

    /// All rule variables occurring in the term, in depth-first order
    /// (duplicates removed).
    pub fn meta_vars(&self) -> Vec<MetaVar> {
        let mut out = Vec::new();
        self.collect_meta(&mut out);
        out
    }

    fn collect_meta(&self, out: &mut Vec<MetaVar>) {
        if let Node::Meta(v) = self.node {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        for c in &self.children {
            c.collect_meta(out);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }
}

/// Generic prefix notation: `f(a, b)`, literals and variables as leaves.
/// Language-specific pretty-printers live with the languages.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Op(name) => {
                write!(f, "{name}")?;
                if !self.children.is_empty() {
                    write!(f, "(")?;
                    for (i, c) in self.children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Node::Meta(v) => write!(f, "{v}"),
            Node::Lit(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown operator `{op}` at {path:?}")]
    UnknownOp { op: String, path: Vec<usize> },
    #[error("operator `{op}` expects {expected} children, found {found} at {path:?}")]
    Arity { op: String, expected: usize, found: usize, path: Vec<usize> },
    #[error("expected {expected}, found {found} at {path:?}")]
    Kind { expected: ArgSort, found: String, path: Vec<usize> },
    #[error("literal with children at {path:?}")]
    LiteralChildren { path: Vec<usize> },
    #[error("unexpected rule variable {var} in closed term at {path:?}")]
    UnexpectedMeta { var: MetaVar, path: Vec<usize> },
}

/// Checks that a closed term respects the signature's arities and argument
/// kinds, and returns its sort. The error carries the path (child indices
/// from the root) to the first violation.
pub fn validate_term(sig: &Signature, t: &Term) -> Result<Sort, SortError> {
    let mut path = Vec::new();
    validate_at(sig, t, &mut path)
}

fn validate_at(sig: &Signature, t: &Term, path: &mut Vec<usize>) -> Result<Sort, SortError> {
    match &t.node {
        Node::Meta(v) => Err(SortError::UnexpectedMeta { var: *v, path: path.clone() }),
        Node::Lit(_) => {
            if t.children.is_empty() {
                // A bare literal has no proper sort; only operator positions
                // give it meaning. Treat as an error at the root.
                Err(SortError::Kind {
                    expected: ArgSort::Reader,
                    found: format!("literal `{t}`"),
                    path: path.clone(),
                })
            } else {
                Err(SortError::LiteralChildren { path: path.clone() })
            }
        }
        Node::Op(name) => {
            let decl = sig.get(name).ok_or_else(|| SortError::UnknownOp {
                op: name.clone(),
                path: path.clone(),
            })?;
            if decl.arity() != t.children.len() {
                return Err(SortError::Arity {
                    op: name.clone(),
                    expected: decl.arity(),
                    found: t.children.len(),
                    path: path.clone(),
                });
            }
            for (i, (child, &want)) in t.children.iter().zip(&decl.args).enumerate() {
                path.push(i);
                match (&child.node, want) {
                    (Node::Lit(l), _) => {
                        if !child.children.is_empty() {
                            return Err(SortError::LiteralChildren { path: path.clone() });
                        }
                        if l.arg_sort() != want {
                            return Err(SortError::Kind {
                                expected: want,
                                found: l.arg_sort().to_string(),
                                path: path.clone(),
                            });
                        }
                    }
                    (_, ArgSort::Reader) | (_, ArgSort::Writer) => {
                        let got = validate_at(sig, child, path)?;
                        if ArgSort::of_sort(got) != want {
                            return Err(SortError::Kind {
                                expected: want,
                                found: got.to_string(),
                                path: path.clone(),
                            });
                        }
                    }
                    (_, _) => {
                        return Err(SortError::Kind {
                            expected: want,
                            found: format!("term `{child}`"),
                            path: path.clone(),
                        });
                    }
                }
                path.pop();
            }
            Ok(decl.result)
        }
    }
}

/// An assignment for rule variables: `x_i` to the i-th operand, `y_i` to the
/// i-th operand's step result (present only for progressing operands).
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    pub xs: Vec<Term>,
    pub ys: BTreeMap<usize, Term>,
}

impl Substitution {
    pub fn lookup(&self, v: MetaVar) -> Option<&Term> {
        match v {
            MetaVar::X(i) => self.xs.get(i.checked_sub(1)?),
            MetaVar::Y(i) => self.ys.get(&i),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("no binding for rule variable {0}")]
    MissingBinding(MetaVar),
}

/// Simultaneous replacement of rule variables. There are no binders, so the
/// substitution is plain and capture-free by construction; the result is
/// closed whenever the assignment's terms are.
pub fn substitute(t: &Term, subst: &Substitution) -> Result<Term, SubstError> {
    match &t.node {
        Node::Meta(v) => subst.lookup(*v).cloned().ok_or(SubstError::MissingBinding(*v)),
        _ => {
            let children = t
                .children
                .iter()
                .map(|c| substitute(c, subst))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term { node: t.node.clone(), children })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::OpDecl;

    fn tiny_sig() -> Signature {
        Signature::new(vec![
            OpDecl::new("skip", vec![], Sort::Reader),
            OpDecl::new("seq", vec![ArgSort::Reader, ArgSort::Reader], Sort::Reader),
            OpDecl::new("assign", vec![ArgSort::VarName, ArgSort::Expr], Sort::Reader),
            OpDecl::new("while", vec![ArgSort::Expr, ArgSort::Reader], Sort::Reader),
            OpDecl::new("ret", vec![ArgSort::State], Sort::Writer),
        ])
        .unwrap()
    }

    fn assign_x1() -> Term {
        Term::op(
            "assign",
            vec![
                Term::lit(Literal::VarName("x".into())),
                Term::lit(Literal::Expr(ImpExpr::Const(1))),
            ],
        )
    }

    #[test]
    fn nullary_constant_is_ok() {
        let sig = tiny_sig();
        assert_eq!(validate_term(&sig, &Term::op("skip", vec![])), Ok(Sort::Reader));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let sig = tiny_sig();
        let t = Term::op("seq", vec![Term::op("skip", vec![])]);
        assert_eq!(
            validate_term(&sig, &t),
            Err(SortError::Arity { op: "seq".into(), expected: 2, found: 1, path: vec![] })
        );
    }

    #[test]
    fn writer_in_reader_position_is_a_sort_error() {
        let sig = tiny_sig();
        let ret = Term::op("ret", vec![Term::lit(Literal::State(VarStore::new()))]);
        let t = Term::op("while", vec![Term::lit(Literal::Expr(ImpExpr::var("x"))), ret]);
        match validate_term(&sig, &t) {
            Err(SortError::Kind { expected: ArgSort::Reader, found, path }) => {
                assert_eq!(found, "writer");
                assert_eq!(path, vec![1]);
            }
            other => panic!("expected sort mismatch, got {other:?}"),
        }
    }

    #[test]
    fn substitute_variable_leaf() {
        let q = Term::op("skip", vec![]);
        let subst = Substitution { xs: vec![Term::op("skip", vec![]), q.clone()], ys: BTreeMap::new() };
        assert_eq!(substitute(&Term::meta(MetaVar::X(2)), &subst), Ok(q));
    }

    #[test]
    fn substitute_is_homomorphic_on_seq() {
        // x1 ; x2 with x1 -> skip, x2 -> (x := 1)
        let t = Term::op("seq", vec![Term::meta(MetaVar::X(1)), Term::meta(MetaVar::X(2))]);
        let subst = Substitution { xs: vec![Term::op("skip", vec![]), assign_x1()], ys: BTreeMap::new() };
        let expected = Term::op("seq", vec![Term::op("skip", vec![]), assign_x1()]);
        assert_eq!(substitute(&t, &subst), Ok(expected));
    }

    #[test]
    fn substitute_step_result_into_seq_conclusion() {
        // y1 ; x2 with y1 -> p', x2 -> q: the progressing seq conclusion.
        let t = Term::op("seq", vec![Term::meta(MetaVar::Y(1)), Term::meta(MetaVar::X(2))]);
        let p_prime = assign_x1();
        let q = Term::op("skip", vec![]);
        let subst = Substitution {
            xs: vec![Term::op("skip", vec![]), q.clone()],
            ys: [(1, p_prime.clone())].into_iter().collect(),
        };
        assert_eq!(substitute(&t, &subst), Ok(Term::op("seq", vec![p_prime, q])));
    }

    #[test]
    fn missing_binding_is_an_error() {
        let t = Term::meta(MetaVar::Y(1));
        let subst = Substitution::default();
        assert_eq!(substitute(&t, &subst), Err(SubstError::MissingBinding(MetaVar::Y(1))));
    }
}
