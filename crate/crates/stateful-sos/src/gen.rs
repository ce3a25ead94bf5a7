//! Random well-formed rule systems, built to satisfy the restricted
//! format by construction: active operators get their patience rules
//! generated mechanically and their continuations keyed on the inner
//! final state alone.

use std::collections::BTreeSet;

use core_syntax::{MetaVar, Node, Term};
use rand::Rng;

use crate::spec::{ConclusionSchema, SpecOp, StatePat, StateRef, StatefulSpec, TriggerSchema};

/// Targets are linear: each argument variable is consumed on first
/// use, so iterated unfolding cannot multiply subterm occurrences and
/// blow configurations up exponentially.
fn random_target(
    rng: &mut impl Rng,
    ops: &[SpecOp],
    nullary: &[usize],
    available_xs: &mut Vec<usize>,
    depth: usize,
) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.55);
    if leaf {
        if !available_xs.is_empty() && rng.gen_bool(0.6) {
            let k = rng.gen_range(0..available_xs.len());
            return Term::meta(MetaVar::X(available_xs.swap_remove(k)));
        }
        let op = nullary[rng.gen_range(0..nullary.len())];
        return Term::op(&ops[op].name, vec![]);
    }
    let op = rng.gen_range(0..ops.len());
    let children = (0..ops[op].arity)
        .map(|_| random_target(rng, ops, nullary, available_xs, depth - 1))
        .collect();
    Term { node: Node::Op(ops[op].name.clone()), children }
}

fn random_conclusion(
    rng: &mut impl Rng,
    ops: &[SpecOp],
    nullary: &[usize],
    allowed_xs: &[usize],
    state: StateRef,
) -> ConclusionSchema {
    if rng.gen_bool(0.4) {
        ConclusionSchema::Stop { state }
    } else {
        let mut available = allowed_xs.to_vec();
        ConclusionSchema::Step {
            term: random_target(rng, ops, nullary, &mut available, 2),
            state,
        }
    }
}

/// Generate a random system in the restricted format: 2-3 states, 2-4
/// operators of arity <= 2 (at least one nullary), each operator either
/// passive or active at a random receiving position.
pub fn random_cool_spec(rng: &mut impl Rng) -> StatefulSpec {
    let nstates = rng.gen_range(2..=3usize);
    let states: Vec<String> = (0..nstates).map(|i| format!("q{i}")).collect();
    let nops = rng.gen_range(2..=4usize);
    let mut ops = vec![SpecOp::new("f0", 0)];
    for i in 1..nops {
        ops.push(SpecOp { name: format!("f{i}"), arity: rng.gen_range(0..=2) });
    }
    let nullary: Vec<usize> = ops.iter().enumerate().filter(|(_, o)| o.arity == 0).map(|(i, _)| i).collect();

    let mut rules = Vec::new();
    for op in 0..nops {
        let name = ops[op].name.clone();
        let arity = ops[op].arity;
        let all_xs: Vec<usize> = (1..=arity).collect();
        let active = arity > 0 && rng.gen_bool(0.6);
        if !active {
            // One conclusion per observed state, copied across every
            // combination of writing positions.
            for s in 0..nstates {
                let state = if rng.gen_bool(0.5) { StateRef::Input } else { StateRef::Lit(rng.gen_range(0..nstates)) };
                let conc = random_conclusion(rng, &ops, &nullary, &all_xs, state);
                for wmask in 0u32..(1 << arity) {
                    let writes: BTreeSet<usize> = (0..arity).filter(|i| wmask & (1 << i) != 0).collect();
                    rules.push((
                        name.clone(),
                        TriggerSchema { writes, state: StatePat::Is(s), succ: vec![StatePat::Any; arity] },
                        conc.clone(),
                    ));
                }
            }
        } else {
            let j = rng.gen_range(0..arity);
            let other_xs: Vec<usize> = (1..=arity).filter(|i| *i != j + 1).collect();
            let patient = Term {
                node: Node::Op(name.clone()),
                children: (0..arity)
                    .map(|i| Term::meta(if i == j { MetaVar::Y(i + 1) } else { MetaVar::X(i + 1) }))
                    .collect(),
            };
            for wmask in 0u32..(1 << arity) {
                let writes: BTreeSet<usize> = (0..arity).filter(|i| wmask & (1 << i) != 0).collect();
                if writes.contains(&j) {
                    rules.push((
                        name.clone(),
                        TriggerSchema { writes, state: StatePat::Any, succ: vec![StatePat::Any; arity] },
                        ConclusionSchema::Step { term: patient.clone(), state: StateRef::Succ(j) },
                    ));
                }
            }
            // Continuations: a function of the state the receiving
            // argument finished in, shared across all other dimensions.
            for s_inner in 0..nstates {
                let state = if rng.gen_bool(0.5) { StateRef::Succ(j) } else { StateRef::Lit(rng.gen_range(0..nstates)) };
                let conc = random_conclusion(rng, &ops, &nullary, &other_xs, state);
                for wmask in 0u32..(1 << arity) {
                    let writes: BTreeSet<usize> = (0..arity).filter(|i| wmask & (1 << i) != 0).collect();
                    if writes.contains(&j) {
                        continue;
                    }
                    let mut succ = vec![StatePat::Any; arity];
                    succ[j] = StatePat::Is(s_inner);
                    rules.push((
                        name.clone(),
                        TriggerSchema { writes, state: StatePat::Any, succ },
                        conc.clone(),
                    ));
                }
            }
        }
    }
    StatefulSpec::new(states, ops, rules).expect("generated system is well-formed")
}

/// A random closed term of bounded depth over the system's signature.
pub fn random_closed_term(rng: &mut impl Rng, spec: &StatefulSpec, max_depth: usize) -> Term {
    let candidates: Vec<usize> = (0..spec.ops().len())
        .filter(|&op| max_depth > 1 || spec.ops()[op].arity == 0)
        .collect();
    let op = candidates[rng.gen_range(0..candidates.len())];
    let children = (0..spec.ops()[op].arity)
        .map(|_| random_closed_term(rng, spec, max_depth - 1))
        .collect();
    Term { node: Node::Op(spec.ops()[op].name.clone()), children }
}
