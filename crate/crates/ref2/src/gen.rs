use rand::Rng;

use crate::ast::{Loc, RefExpr, RefReader, RefStore, RefValue, RefWriter};

/// Random expression over locations #0..#3 and small integers.
pub fn random_expr(rng: &mut impl Rng, depth: usize) -> RefExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        if rng.gen_bool(0.6) {
            RefExpr::Int(rng.gen_range(-2..=3))
        } else {
            RefExpr::Loc(Loc(rng.gen_range(0..4)))
        }
    } else {
        match rng.gen_range(0..3) {
            0 => RefExpr::deref(random_expr(rng, depth - 1)),
            1 => RefExpr::add(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
            _ => RefExpr::sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        }
    }
}

pub fn random_reader(rng: &mut impl Rng, depth: usize) -> RefReader {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => RefReader::Skip,
            1 => RefReader::Expr(random_expr(rng, 1)),
            _ => RefReader::proc(RefReader::Skip),
        };
    }
    match rng.gen_range(0..8) {
        0 => RefReader::Skip,
        1 => RefReader::while_(random_expr(rng, 1), random_reader(rng, depth - 1)),
        2 => RefReader::assign(random_expr(rng, 1), random_reader(rng, depth - 1)),
        3 => RefReader::if_(
            random_expr(rng, 1),
            random_reader(rng, depth - 1),
            random_reader(rng, depth - 1),
        ),
        4 => RefReader::seq(random_reader(rng, depth - 1), random_reader(rng, depth - 1)),
        5 => RefReader::alloc(random_reader(rng, depth - 1)),
        6 => RefReader::Expr(random_expr(rng, depth.min(2))),
        _ => RefReader::proc(random_reader(rng, depth - 1)),
    }
}

pub fn random_value(rng: &mut impl Rng, depth: usize) -> RefValue {
    match rng.gen_range(0..4) {
        0 => RefValue::Loc(Loc(rng.gen_range(0..4))),
        1 | 2 => RefValue::Int(rng.gen_range(-3..=5)),
        _ => RefValue::Reader(random_reader(rng, depth)),
    }
}

pub fn random_store(rng: &mut impl Rng, depth: usize) -> RefStore {
    let mut s = RefStore::empty();
    for l in 0..rng.gen_range(0..4u64) {
        if rng.gen_bool(0.8) {
            s = s.update(Loc(l), random_value(rng, depth));
        }
    }
    s
}

pub fn random_writer(rng: &mut impl Rng, depth: usize) -> RefWriter {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => RefWriter::run(random_reader(rng, 1), random_store(rng, 1)),
            1 => RefWriter::RetVal(random_value(rng, 1), random_store(rng, 1)),
            _ => RefWriter::RetStore(random_store(rng, 1)),
        };
    }
    match rng.gen_range(0..7) {
        0 => RefWriter::assign(random_expr(rng, 1), random_writer(rng, depth - 1)),
        1 => RefWriter::seq(random_writer(rng, depth - 1), random_reader(rng, depth - 1)),
        2 => RefWriter::alloc(random_writer(rng, depth - 1)),
        3 => RefWriter::announce(random_store(rng, 1), random_writer(rng, depth - 1)),
        4 => RefWriter::run(random_reader(rng, depth), random_store(rng, 1)),
        5 => RefWriter::RetVal(random_value(rng, 1), random_store(rng, 1)),
        _ => RefWriter::RetStore(random_store(rng, 1)),
    }
}
