//! Constructors and a pattern-matching view for programs of the base
//! language, represented as shared `Term`s.

use core_syntax::{ArgSort, ImpExpr, Literal, Node, OpDecl, Signature, Sort, Term};

use crate::semantics::ImpError;

pub const OP_SKIP: &str = "skip";
pub const OP_ASSIGN: &str = "assign";
pub const OP_WHILE: &str = "while";
pub const OP_SEQ: &str = "seq";

/// The four-operator signature of the base language.
pub fn imp_signature() -> Signature {
    Signature::new(vec![
        OpDecl::new(OP_SKIP, vec![], Sort::Reader),
        OpDecl::new(OP_ASSIGN, vec![ArgSort::VarName, ArgSort::Expr], Sort::Reader),
        OpDecl::new(OP_WHILE, vec![ArgSort::Expr, ArgSort::Reader], Sort::Reader),
        OpDecl::new(OP_SEQ, vec![ArgSort::Reader, ArgSort::Reader], Sort::Reader),
    ])
    .expect("fixed signature")
}

pub fn skip() -> Term {
    Term::op(OP_SKIP, vec![])
}

pub fn assign(var: impl Into<String>, e: ImpExpr) -> Term {
    Term::op(
        OP_ASSIGN,
        vec![Term::lit(Literal::VarName(var.into())), Term::lit(Literal::Expr(e))],
    )
}

pub fn while_(guard: ImpExpr, body: Term) -> Term {
    Term::op(OP_WHILE, vec![Term::lit(Literal::Expr(guard)), body])
}

pub fn seq(p: Term, q: Term) -> Term {
    Term::op(OP_SEQ, vec![p, q])
}

/// A borrowed structural view of a program term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpView<'a> {
    Skip,
    Assign { var: &'a str, expr: &'a ImpExpr },
    While { guard: &'a ImpExpr, body: &'a Term },
    Seq(&'a Term, &'a Term),
}

pub fn view(t: &Term) -> Result<ImpView<'_>, ImpError> {
    let ill = || ImpError::IllFormed(t.to_string());
    match &t.node {
        Node::Op(name) => match (name.as_str(), t.children.as_slice()) {
            (OP_SKIP, []) => Ok(ImpView::Skip),
            (OP_ASSIGN, [v, e]) => match (&v.node, &e.node) {
                (Node::Lit(Literal::VarName(var)), Node::Lit(Literal::Expr(expr))) => {
                    Ok(ImpView::Assign { var, expr })
                }
                _ => Err(ill()),
            },
            (OP_WHILE, [g, body]) => match &g.node {
                Node::Lit(Literal::Expr(guard)) => Ok(ImpView::While { guard, body }),
                _ => Err(ill()),
            },
            (OP_SEQ, [p, q]) => Ok(ImpView::Seq(p, q)),
            _ => Err(ill()),
        },
        _ => Err(ill()),
    }
}

/// Concrete syntax for a program term. `;` is left-associative, so only a
/// right-nested sequence needs parentheses.
pub fn to_source(t: &Term) -> String {
    let mut out = String::new();
    write_seq(t, &mut out);
    out
}

fn write_seq(t: &Term, out: &mut String) {
    if let Ok(ImpView::Seq(p, q)) = view(t) {
        write_seq(p, out);
        out.push_str("; ");
        write_stmt(q, out);
    } else {
        write_stmt(t, out);
    }
}

fn write_stmt(t: &Term, out: &mut String) {
    match view(t) {
        Ok(ImpView::Skip) => out.push_str("skip"),
        Ok(ImpView::Assign { var, expr }) => {
            out.push_str(var);
            out.push_str(" := ");
            out.push_str(&expr.to_string());
        }
        Ok(ImpView::While { guard, body }) => {
            out.push_str("while ");
            out.push_str(&guard.to_string());
            out.push_str(" { ");
            write_seq(body, out);
            out.push_str(" }");
        }
        Ok(ImpView::Seq(..)) => {
            out.push('(');
            write_seq(t, out);
            out.push(')');
        }
        Err(_) => out.push_str(&t.to_string()),
    }
}
