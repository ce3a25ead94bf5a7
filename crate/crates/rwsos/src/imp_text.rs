//! Concrete syntax for the imperative language and its two-sorted
//! extension. Programs: `skip`, `x := e`, `while e { p }`, `p ; q` (`;`
//! associates left; a right-nested sequence needs parentheses).
//! Expressions: `+ - *` with the usual precedence, integer literals,
//! identifiers. Writer configurations: `[p]@{x=1}`, `{x=1}.c`, `ret@{x=1}`,
//! `c; q` (the reader is parenthesized when it is itself a sequence).

use core_syntax::{ImpExpr, Term, VarStore};
use imp::{assign, seq, skip, while_};
use imp2::{RWTerm, Writer};

use crate::cursor::{Cursor, ParseError};

const KEYWORDS: [&str; 2] = ["skip", "while"];

pub fn parse_imp_program(src: &str) -> Result<Term, ParseError> {
    let mut c = Cursor::new(src);
    let t = program(&mut c)?;
    c.finish()?;
    Ok(t)
}

pub fn parse_imp_expr(src: &str) -> Result<ImpExpr, ParseError> {
    let mut c = Cursor::new(src);
    let e = expr(&mut c)?;
    c.finish()?;
    Ok(e)
}

/// A term of either sort: a writer starts with `[`, `{`, or `ret@`;
/// everything else is a reader program.
pub fn parse_rwterm(src: &str) -> Result<RWTerm, ParseError> {
    let mut c = Cursor::new(src);
    let t = if looks_like_writer(&mut c) {
        RWTerm::Writer(writer(&mut c)?)
    } else {
        RWTerm::Reader(program(&mut c)?)
    };
    c.finish()?;
    Ok(t)
}

fn looks_like_writer(c: &mut Cursor) -> bool {
    match c.peek() {
        Some('[') | Some('{') => true,
        _ => {
            let save = c.pos();
            let is_ret = c.keyword("ret") && c.eat("@");
            c.restore(save);
            is_ret
        }
    }
}

fn program(c: &mut Cursor) -> Result<Term, ParseError> {
    let mut t = stmt(c)?;
    while c.eat(";") {
        t = seq(t, stmt(c)?);
    }
    Ok(t)
}

fn stmt(c: &mut Cursor) -> Result<Term, ParseError> {
    if c.keyword("skip") {
        return Ok(skip());
    }
    if c.keyword("while") {
        let e = expr(c)?;
        c.expect("{")?;
        let body = program(c)?;
        c.expect("}")?;
        return Ok(while_(e, body));
    }
    if c.eat("(") {
        let t = program(c)?;
        c.expect(")")?;
        return Ok(t);
    }
    let Some(x) = c.ident() else {
        return Err(c.error("a statement"));
    };
    c.expect(":=")?;
    Ok(assign(x, expr(c)?))
}

fn expr(c: &mut Cursor) -> Result<ImpExpr, ParseError> {
    let mut a = mul_term(c)?;
    loop {
        if c.eat("+") {
            a = ImpExpr::add(a, mul_term(c)?);
        } else if c.eat("-") {
            a = ImpExpr::sub(a, mul_term(c)?);
        } else {
            return Ok(a);
        }
    }
}

fn mul_term(c: &mut Cursor) -> Result<ImpExpr, ParseError> {
    let mut a = atom(c)?;
    while c.eat("*") {
        a = ImpExpr::mul(a, atom(c)?);
    }
    Ok(a)
}

fn atom(c: &mut Cursor) -> Result<ImpExpr, ParseError> {
    if c.eat("(") {
        let e = expr(c)?;
        c.expect(")")?;
        return Ok(e);
    }
    if let Some(n) = c.integer() {
        return Ok(ImpExpr::Const(n));
    }
    let save = c.pos();
    if let Some(x) = c.ident() {
        if !KEYWORDS.contains(&x.as_str()) {
            return Ok(ImpExpr::var(x));
        }
        c.restore(save);
    }
    Err(c.error("an expression"))
}

fn writer(c: &mut Cursor) -> Result<Writer, ParseError> {
    let mut w = writer_atom(c)?;
    while c.eat(";") {
        w = Writer::seq(w, stmt(c)?);
    }
    Ok(w)
}

fn writer_atom(c: &mut Cursor) -> Result<Writer, ParseError> {
    match c.peek() {
        Some('[') => {
            c.expect("[")?;
            let p = program(c)?;
            c.expect("]")?;
            c.expect("@")?;
            Ok(Writer::run(p, var_store(c)?))
        }
        Some('{') => {
            let s = var_store(c)?;
            c.expect(".")?;
            let inner = if c.eat("(") {
                let w = writer(c)?;
                c.expect(")")?;
                w
            } else {
                writer_atom(c)?
            };
            Ok(Writer::emit(s, inner))
        }
        Some('(') => {
            c.expect("(")?;
            let w = writer(c)?;
            c.expect(")")?;
            Ok(w)
        }
        _ => {
            if c.keyword("ret") {
                c.expect("@")?;
                Ok(Writer::Ret(var_store(c)?))
            } else {
                Err(c.error("a writer configuration"))
            }
        }
    }
}

pub fn parse_var_store(src: &str) -> Result<VarStore, ParseError> {
    let mut c = Cursor::new(src);
    let s = var_store(&mut c)?;
    c.finish()?;
    Ok(s)
}

fn var_store(c: &mut Cursor) -> Result<VarStore, ParseError> {
    c.expect("{")?;
    let mut s = VarStore::new();
    if c.eat("}") {
        return Ok(s);
    }
    loop {
        let Some(x) = c.ident() else {
            return Err(c.error("a variable name"));
        };
        c.expect("=")?;
        let Some(n) = c.integer() else {
            return Err(c.error("an integer"));
        };
        s.set(x, n);
        if !c.eat(",") {
            break;
        }
    }
    c.expect("}")?;
    Ok(s)
}
