use std::collections::HashMap;

use core_syntax::{MetaVar, Node, Term};

use crate::spec::{ResolvedConclusion, StatefulSpec, Trigger};

/// How an operator consumes its arguments: passive operators ignore the
/// behaviour of their subterms, active ones run exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpClass {
    Passive,
    /// 0-based receiving position.
    Active { j: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoolReason {
    /// A trigger where the candidate position runs lacks the patience shape.
    NotPatient,
    /// A continuation target mentions the receiving argument.
    TargetMentionsReceiving,
    /// A continuation target mentions a runner variable.
    TargetUsesRunner,
    /// Two triggers agree on the receiving argument's final state but
    /// conclude differently, so the continuation depends on more than it may.
    DependsOnObservedState,
}

impl std::fmt::Display for CoolReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CoolReason::NotPatient => "not patient",
            CoolReason::TargetMentionsReceiving => "target mentions the receiving argument",
            CoolReason::TargetUsesRunner => "target uses a runner variable",
            CoolReason::DependsOnObservedState => "conclusion depends on the observed state",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct CoolViolation {
    pub op: String,
    /// 1-based candidate receiving position this violation refutes;
    /// `None` when it refutes the passive reading.
    pub candidate: Option<usize>,
    pub trigger: String,
    pub reason: CoolReason,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CoolReport {
    pub cool: bool,
    pub passive: Vec<String>,
    /// Operator name with its 1-based receiving position.
    pub active: Vec<(String, usize)>,
    pub violations: Vec<CoolViolation>,
    pub(crate) classes: Vec<Option<OpClass>>,
    /// (operator, observed state) -> conclusion, for passive operators.
    pub(crate) passive_table: HashMap<(usize, usize), ResolvedConclusion>,
    /// (operator, inner final state) -> continuation, for active operators.
    pub(crate) active_table: HashMap<(usize, usize), ResolvedConclusion>,
}

fn mentions(t: &Term, mv: MetaVar) -> bool {
    match &t.node {
        Node::Meta(m) if *m == mv => true,
        _ => t.children.iter().any(|c| mentions(c, mv)),
    }
}

fn mentions_any_runner(t: &Term) -> bool {
    match &t.node {
        Node::Meta(MetaVar::Y(_)) => true,
        _ => t.children.iter().any(mentions_any_runner),
    }
}

/// The patience conclusion for `f` at position `j`: the operator
/// re-applied with the stepped argument in place, moving to its state.
fn patient_shape(spec: &StatefulSpec, op: usize, j: usize, trig: &Trigger) -> ResolvedConclusion {
    let arity = spec.ops()[op].arity;
    let children = (0..arity)
        .map(|i| Term::meta(if i == j { MetaVar::Y(i + 1) } else { MetaVar::X(i + 1) }))
        .collect();
    ResolvedConclusion::Step {
        term: Term { node: Node::Op(spec.ops()[op].name.clone()), children },
        state: trig.succ[j],
    }
}

/// Decide whether every operator fits the restricted rule format that
/// the reader-writer derivation needs, classifying each as passive or
/// active with a receiving position.
pub fn check_cool(spec: &StatefulSpec) -> CoolReport {
    let mut report = CoolReport {
        cool: true,
        passive: Vec::new(),
        active: Vec::new(),
        violations: Vec::new(),
        classes: vec![None; spec.ops().len()],
        passive_table: HashMap::new(),
        active_table: HashMap::new(),
    };

    for op in 0..spec.ops().len() {
        let name = spec.ops()[op].name.clone();
        let arity = spec.ops()[op].arity;
        let resolved: Vec<(Trigger, ResolvedConclusion)> = spec
            .all_triggers(op)
            .into_iter()
            .map(|t| {
                let c = spec.resolve_rule(op, &t).expect("validated systems are total");
                (t, c)
            })
            .collect();
        let mut op_violations = Vec::new();

        // Passive: the conclusion is a function of the observed state alone.
        let mut passive_entries: HashMap<usize, ResolvedConclusion> = HashMap::new();
        let mut is_passive = true;
        for (trig, conc) in &resolved {
            match passive_entries.get(&trig.state) {
                None => {
                    passive_entries.insert(trig.state, conc.clone());
                }
                Some(prev) if prev == conc => {}
                Some(prev) => {
                    op_violations.push(CoolViolation {
                        op: name.clone(),
                        candidate: None,
                        trigger: spec.display_trigger(trig),
                        reason: CoolReason::DependsOnObservedState,
                        detail: format!(
                            "not passive: concludes {} here but {} elsewhere at the same state",
                            spec.display_conclusion(conc),
                            spec.display_conclusion(prev)
                        ),
                    });
                    is_passive = false;
                    break;
                }
            }
        }
        if is_passive {
            report.passive.push(name.clone());
            report.classes[op] = Some(OpClass::Passive);
            for (s, conc) in passive_entries {
                report.passive_table.insert((op, s), conc);
            }
            continue;
        }

        // Active: hunt for a receiving position.
        let mut found = None;
        for j in 0..arity {
            let mut violations_j = Vec::new();
            let mut table: HashMap<usize, (ResolvedConclusion, &Trigger)> = HashMap::new();
            for (trig, conc) in &resolved {
                if trig.writes.contains(&j) {
                    let want = patient_shape(spec, op, j, trig);
                    if *conc != want {
                        violations_j.push(CoolViolation {
                            op: name.clone(),
                            candidate: Some(j + 1),
                            trigger: spec.display_trigger(trig),
                            reason: CoolReason::NotPatient,
                            detail: format!(
                                "expected {}, found {}",
                                spec.display_conclusion(&want),
                                spec.display_conclusion(conc)
                            ),
                        });
                        break;
                    }
                } else {
                    if let ResolvedConclusion::Step { term, .. } = conc {
                        if mentions(term, MetaVar::X(j + 1)) {
                            violations_j.push(CoolViolation {
                                op: name.clone(),
                                candidate: Some(j + 1),
                                trigger: spec.display_trigger(trig),
                                reason: CoolReason::TargetMentionsReceiving,
                                detail: format!("target {term} mentions x{}", j + 1),
                            });
                            break;
                        }
                        if mentions_any_runner(term) {
                            violations_j.push(CoolViolation {
                                op: name.clone(),
                                candidate: Some(j + 1),
                                trigger: spec.display_trigger(trig),
                                reason: CoolReason::TargetUsesRunner,
                                detail: format!("target {term} uses a runner variable"),
                            });
                            break;
                        }
                    }
                    let s_inner = trig.succ[j];
                    match table.get(&s_inner) {
                        None => {
                            table.insert(s_inner, (conc.clone(), trig));
                        }
                        Some((prev, prev_trig)) if prev == conc => {
                            let _ = prev_trig;
                        }
                        Some((prev, prev_trig)) => {
                            violations_j.push(CoolViolation {
                                op: name.clone(),
                                candidate: Some(j + 1),
                                trigger: spec.display_trigger(trig),
                                reason: CoolReason::DependsOnObservedState,
                                detail: format!(
                                    "concludes {}, but trigger {} with the same inner state concludes {}",
                                    spec.display_conclusion(conc),
                                    spec.display_trigger(prev_trig),
                                    spec.display_conclusion(prev)
                                ),
                            });
                            break;
                        }
                    }
                }
            }
            if violations_j.is_empty() {
                found = Some((j, table));
                break;
            }
            op_violations.extend(violations_j);
        }

        match found {
            Some((j, table)) => {
                report.active.push((name, j + 1));
                report.classes[op] = Some(OpClass::Active { j });
                for (s, (conc, _)) in table {
                    report.active_table.insert((op, s), conc);
                }
            }
            None => {
                report.cool = false;
                report.violations.extend(op_violations);
            }
        }
    }

    report
}
