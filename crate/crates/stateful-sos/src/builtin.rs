//! A small imperative language presented as a rule system over a finite
//! state space: states track the value of a single counter `x` in
//! `0..=max`, assignments clamp into that range, and `while_x` loops
//! while the counter is nonzero.

use core_syntax::{ImpExpr, Node, Term, VarStore};
use imp::{assign, seq as imp_seq, skip as imp_skip, while_};

use crate::spec::{
    ConclusionSchema, SpecOp, StatePat, StateRef, StatefulSpec, TriggerSchema,
};

/// Operators: `skip`, one nullary assignment per value `asg0..asg{max}`
/// (capped at 2 to keep signatures small), `while_x` looping on a
/// nonzero counter, and `seq`.
pub fn imp_as_spec(max: usize) -> StatefulSpec {
    assert!(max >= 2, "need at least states 0..=2");
    let states: Vec<String> = (0..=max).map(|k| format!("s{k}")).collect();
    let zero = 0usize;

    let mut ops = vec![SpecOp::new("skip", 0)];
    for c in 0..=2usize {
        ops.push(SpecOp::new(&format!("asg{c}"), 0));
    }
    ops.push(SpecOp::new("while_x", 1));
    ops.push(SpecOp::new("seq", 2));

    let mut rules = Vec::new();
    let nullary = TriggerSchema { writes: Default::default(), state: StatePat::Any, succ: vec![] };
    rules.push(("skip".to_string(), nullary.clone(), ConclusionSchema::Stop { state: StateRef::Input }));
    for c in 0..=2usize {
        rules.push((
            format!("asg{c}"),
            nullary.clone(),
            ConclusionSchema::Stop { state: StateRef::Lit(c) },
        ));
    }

    let body = Term::op(
        "seq",
        vec![
            Term::meta(core_syntax::MetaVar::X(1)),
            Term::op("while_x", vec![Term::meta(core_syntax::MetaVar::X(1))]),
        ],
    );
    for writes in [vec![], vec![0usize]] {
        let w: std::collections::BTreeSet<usize> = writes.iter().copied().collect();
        rules.push((
            "while_x".to_string(),
            TriggerSchema { writes: w.clone(), state: StatePat::Is(zero), succ: vec![StatePat::Any] },
            ConclusionSchema::Stop { state: StateRef::Input },
        ));
        rules.push((
            "while_x".to_string(),
            TriggerSchema { writes: w, state: StatePat::Any, succ: vec![StatePat::Any] },
            ConclusionSchema::Step { term: body.clone(), state: StateRef::Input },
        ));
    }

    let pass_head = Term::op(
        "seq",
        vec![Term::meta(core_syntax::MetaVar::Y(1)), Term::meta(core_syntax::MetaVar::X(2))],
    );
    let drop_head = Term::meta(core_syntax::MetaVar::X(2));
    for wmask in 0u32..4 {
        let writes: std::collections::BTreeSet<usize> =
            (0..2).filter(|i| wmask & (1 << i) != 0).collect();
        let term = if writes.contains(&0) { pass_head.clone() } else { drop_head.clone() };
        rules.push((
            "seq".to_string(),
            TriggerSchema { writes, state: StatePat::Any, succ: vec![StatePat::Any; 2] },
            ConclusionSchema::Step { term, state: StateRef::Succ(0) },
        ));
    }

    StatefulSpec::new(states, ops, rules).expect("builtin system is well-formed")
}

/// Map a state index to the store it abstracts.
pub fn store_of_state(k: usize) -> VarStore {
    VarStore::new().with("x", k as i64)
}

/// Map a store to a state index, if it is one of the tracked shapes.
pub fn state_of_store(s: &VarStore, max: usize) -> Option<usize> {
    let x = s.get("x");
    if x < 0 || x as usize > max {
        return None;
    }
    if s.iter().any(|(k, _)| k != "x") {
        return None;
    }
    Some(x as usize)
}

/// Translate a term of the rule system into the concrete imperative
/// language it abstracts.
pub fn decode_term(t: &Term) -> Term {
    match &t.node {
        Node::Op(f) if f == "skip" => imp_skip(),
        Node::Op(f) if f.starts_with("asg") => {
            let c: i64 = f[3..].parse().expect("assignment op");
            assign("x", ImpExpr::Const(c))
        }
        Node::Op(f) if f == "while_x" => while_(ImpExpr::var("x"), decode_term(&t.children[0])),
        Node::Op(f) if f == "seq" => imp_seq(decode_term(&t.children[0]), decode_term(&t.children[1])),
        other => panic!("not a term of the builtin system: {other:?}"),
    }
}
