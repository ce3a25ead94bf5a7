//! Concrete syntax for the higher-order store language. Programs:
//! `skip`, `while e { p }`, `e := p`, `if e { p } else { q }`, `p ; q`
//! (`;` associates right), `&p`, `expr e`, `proc { p }`. Expressions:
//! `!e`, `e (+) e`, `e (-) e` (left-associative, one level), `#n`
//! location literals, integers. Writer configurations: `[p]@{#0=1}`,
//! `ret(v)@{#0=1}`, `ret@{#0=1}`, `{#0=1}.c`, `e := c`, `&c`, `c ; q`.
//! Store cells hold integers, locations, or program terms.

use ref2::ast::{Loc, RefExpr, RefReader, RefStore, RefValue, RefWriter};

use crate::cursor::{Cursor, ParseError};

pub fn parse_ref_reader(src: &str) -> Result<RefReader, ParseError> {
    let mut c = Cursor::new(src);
    let p = reader(&mut c)?;
    c.finish()?;
    Ok(p)
}

pub fn parse_ref_writer(src: &str) -> Result<RefWriter, ParseError> {
    let mut c = Cursor::new(src);
    let w = writer(&mut c)?;
    c.finish()?;
    Ok(w)
}

pub fn parse_ref_expr(src: &str) -> Result<RefExpr, ParseError> {
    let mut c = Cursor::new(src);
    let e = expr(&mut c)?;
    c.finish()?;
    Ok(e)
}

pub fn parse_ref_value(src: &str) -> Result<RefValue, ParseError> {
    let mut c = Cursor::new(src);
    let v = value(&mut c)?;
    c.finish()?;
    Ok(v)
}

pub fn parse_ref_store(src: &str) -> Result<RefStore, ParseError> {
    let mut c = Cursor::new(src);
    let s = store(&mut c)?;
    c.finish()?;
    Ok(s)
}

fn expr(c: &mut Cursor) -> Result<RefExpr, ParseError> {
    let mut a = prefix(c)?;
    loop {
        if c.eat("(+)") {
            a = RefExpr::add(a, prefix(c)?);
        } else if c.eat("(-)") {
            a = RefExpr::sub(a, prefix(c)?);
        } else {
            return Ok(a);
        }
    }
}

fn prefix(c: &mut Cursor) -> Result<RefExpr, ParseError> {
    if c.eat("!") {
        return Ok(RefExpr::deref(prefix(c)?));
    }
    if c.eat("#") {
        let Some(n) = c.uint() else {
            return Err(c.error("a location number"));
        };
        return Ok(RefExpr::Loc(Loc(n)));
    }
    if c.eat("(") {
        let e = expr(c)?;
        c.expect(")")?;
        return Ok(e);
    }
    if let Some(n) = c.integer() {
        return Ok(RefExpr::Int(n));
    }
    Err(c.error("an expression"))
}

fn reader(c: &mut Cursor) -> Result<RefReader, ParseError> {
    let p = reader_stmt(c)?;
    if c.eat(";") {
        Ok(RefReader::seq(p, reader(c)?))
    } else {
        Ok(p)
    }
}

fn braced(c: &mut Cursor) -> Result<RefReader, ParseError> {
    c.expect("{")?;
    let p = reader(c)?;
    c.expect("}")?;
    Ok(p)
}

fn reader_stmt(c: &mut Cursor) -> Result<RefReader, ParseError> {
    if c.keyword("skip") {
        return Ok(RefReader::Skip);
    }
    if c.keyword("while") {
        let e = expr(c)?;
        return Ok(RefReader::while_(e, braced(c)?));
    }
    if c.keyword("if") {
        let e = expr(c)?;
        let p = braced(c)?;
        if !c.keyword("else") {
            return Err(c.error("`else`"));
        }
        return Ok(RefReader::if_(e, p, braced(c)?));
    }
    if c.keyword("expr") {
        return Ok(RefReader::Expr(expr(c)?));
    }
    if c.keyword("proc") {
        return Ok(RefReader::proc(braced(c)?));
    }
    if c.eat("&") {
        return Ok(RefReader::alloc(reader_stmt(c)?));
    }
    if c.peek() == Some('(') {
        c.expect("(")?;
        let p = reader(c)?;
        c.expect(")")?;
        return Ok(p);
    }
    // An assignment: the target expression never starts with `(`.
    let e = expr(c)?;
    c.expect(":=")?;
    Ok(RefReader::assign(e, reader_stmt(c)?))
}

fn writer(c: &mut Cursor) -> Result<RefWriter, ParseError> {
    let w = writer_stmt(c)?;
    if c.eat(";") {
        Ok(RefWriter::seq(w, reader(c)?))
    } else {
        Ok(w)
    }
}

fn writer_stmt(c: &mut Cursor) -> Result<RefWriter, ParseError> {
    match c.peek() {
        Some('[') => {
            c.expect("[")?;
            let p = reader(c)?;
            c.expect("]")?;
            c.expect("@")?;
            Ok(RefWriter::run(p, store(c)?))
        }
        Some('{') => {
            let s = store(c)?;
            c.expect(".")?;
            Ok(RefWriter::announce(s, writer_stmt(c)?))
        }
        Some('&') => {
            c.expect("&")?;
            Ok(RefWriter::alloc(writer_stmt(c)?))
        }
        Some('(') => {
            c.expect("(")?;
            let w = writer(c)?;
            c.expect(")")?;
            Ok(w)
        }
        _ => {
            if c.keyword("ret") {
                if c.eat("(") {
                    let v = value(c)?;
                    c.expect(")")?;
                    c.expect("@")?;
                    return Ok(RefWriter::RetVal(v, store(c)?));
                }
                c.expect("@")?;
                return Ok(RefWriter::RetStore(store(c)?));
            }
            let e = expr(c)?;
            c.expect(":=")?;
            Ok(RefWriter::assign(e, writer_stmt(c)?))
        }
    }
}

fn value(c: &mut Cursor) -> Result<RefValue, ParseError> {
    // A program can also start with `#n` or an integer (as an assignment
    // target), so scalars are committed only when the next token cannot
    // continue an expression or assignment.
    match c.peek() {
        Some(d) if d.is_ascii_digit() || d == '-' => {
            let save = c.pos();
            let Some(n) = c.integer() else {
                return Err(c.error("an integer"));
            };
            if matches!(c.peek(), Some(':') | Some('(')) {
                c.restore(save);
                return Ok(RefValue::Reader(reader(c)?));
            }
            Ok(RefValue::Int(n))
        }
        Some('#') => {
            let save = c.pos();
            c.expect("#")?;
            let Some(n) = c.uint() else {
                return Err(c.error("a location number"));
            };
            if matches!(c.peek(), Some(':') | Some('(')) {
                c.restore(save);
                return Ok(RefValue::Reader(reader(c)?));
            }
            Ok(RefValue::Loc(Loc(n)))
        }
        _ => Ok(RefValue::Reader(reader(c)?)),
    }
}

fn store(c: &mut Cursor) -> Result<RefStore, ParseError> {
    c.expect("{")?;
    let mut s = RefStore::empty();
    if c.eat("}") {
        return Ok(s);
    }
    loop {
        c.expect("#")?;
        let Some(n) = c.uint() else {
            return Err(c.error("a location number"));
        };
        c.expect("=")?;
        let v = value(c)?;
        s = s.update(Loc(n), v);
        if !c.eat(",") {
            break;
        }
    }
    c.expect("}")?;
    Ok(s)
}
