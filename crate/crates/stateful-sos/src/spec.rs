use std::collections::{BTreeMap, BTreeSet, HashMap};

use core_syntax::{MetaVar, Node, Term};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building, loading, or using a rule system.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no states declared")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate operator `{0}`")]
    DuplicateOp(String),
    #[error("operator name `{0}` is reserved for metavariables")]
    ReservedOpName(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown operator `{0}`")]
    UnknownOp(String),
    #[error("operator `{op}`: write position {pos} out of range for arity {arity}")]
    BadWritePosition { op: String, pos: usize, arity: usize },
    #[error("operator `{op}`: successor pattern has length {found}, expected {expected}")]
    BadSuccLen { op: String, expected: usize, found: usize },
    #[error("operator `{op}`: {detail}")]
    BadConclusion { op: String, detail: String },
    #[error("operator `{op}`: rules {first} and {second} share a trigger schema but conclude differently")]
    Overlap { op: String, first: usize, second: usize },
    #[error("operator `{op}`: no rule matches trigger {trigger}")]
    Coverage { op: String, trigger: String },
    #[error("term is not closed: contains metavariable `{0}`")]
    OpenTerm(String),
    #[error("ill-formed term: {0}")]
    IllFormedTerm(String),
    #[error("fuel exhausted")]
    FuelExhausted,
}

/// One operator of the signature: a name and how many subterms it takes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecOp {
    pub name: String,
    pub arity: usize,
}

impl SpecOp {
    pub fn new(name: &str, arity: usize) -> Self {
        SpecOp { name: name.to_string(), arity }
    }
}

/// Pattern over states appearing in a trigger schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatePat {
    Any,
    Is(usize),
}

impl StatePat {
    pub fn matches(&self, s: usize) -> bool {
        match self {
            StatePat::Any => true,
            StatePat::Is(v) => *v == s,
        }
    }
}

/// A schema matching a family of triggers: an exact set of writing
/// positions, a pattern on the observed state, and patterns on the
/// successor state of each argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerSchema {
    pub writes: BTreeSet<usize>,
    pub state: StatePat,
    pub succ: Vec<StatePat>,
}

impl TriggerSchema {
    pub fn matches(&self, trig: &Trigger) -> bool {
        self.writes == trig.writes
            && self.state.matches(trig.state)
            && self.succ.iter().zip(&trig.succ).all(|(p, s)| p.matches(*s))
    }
}

/// A concrete trigger: which arguments stepped with output, the state
/// before the transition, and the state each argument moved to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trigger {
    pub writes: BTreeSet<usize>,
    pub state: usize,
    pub succ: Vec<usize>,
}

/// How a rule names the state appearing in its conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateRef {
    /// A fixed state.
    Lit(usize),
    /// The state observed in the trigger.
    Input,
    /// The successor state of argument `i` (0-based).
    Succ(usize),
}

/// Rule conclusion before a trigger is plugged in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConclusionSchema {
    Step { term: Term, state: StateRef },
    Stop { state: StateRef },
}

/// Rule conclusion with the state references resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResolvedConclusion {
    Step { term: Term, state: usize },
    Stop { state: usize },
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub schema: TriggerSchema,
    pub conclusion: ConclusionSchema,
}

/// A complete rule system: finite state space, operator signature, and
/// one applicable rule for every operator/trigger combination.
#[derive(Debug, Clone)]
pub struct StatefulSpec {
    states: Vec<String>,
    ops: Vec<SpecOp>,
    rules: Vec<Vec<Rule>>,
    state_index: HashMap<String, usize>,
    op_index: HashMap<String, usize>,
}

fn looks_like_meta(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('x') | Some('y'))
        && name.len() > 1
        && chars.all(|c| c.is_ascii_digit())
}

impl StatefulSpec {
    pub fn new(
        states: Vec<String>,
        ops: Vec<SpecOp>,
        rules: Vec<(String, TriggerSchema, ConclusionSchema)>,
    ) -> Result<Self, SpecError> {
        if states.is_empty() {
            return Err(SpecError::NoStates);
        }
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(SpecError::DuplicateState(s.clone()));
            }
        }
        let mut op_index = HashMap::new();
        for (i, op) in ops.iter().enumerate() {
            if looks_like_meta(&op.name) {
                return Err(SpecError::ReservedOpName(op.name.clone()));
            }
            if op_index.insert(op.name.clone(), i).is_some() {
                return Err(SpecError::DuplicateOp(op.name.clone()));
            }
        }
        let mut per_op: Vec<Vec<Rule>> = vec![Vec::new(); ops.len()];
        for (op_name, schema, conclusion) in rules {
            let &op = op_index
                .get(&op_name)
                .ok_or_else(|| SpecError::UnknownOp(op_name.clone()))?;
            let arity = ops[op].arity;
            for &pos in &schema.writes {
                if pos >= arity {
                    return Err(SpecError::BadWritePosition { op: op_name.clone(), pos: pos + 1, arity });
                }
            }
            if schema.succ.len() != arity {
                return Err(SpecError::BadSuccLen {
                    op: op_name.clone(),
                    expected: arity,
                    found: schema.succ.len(),
                });
            }
            for pat in schema.succ.iter().chain(std::iter::once(&schema.state)) {
                if let StatePat::Is(v) = pat {
                    if *v >= states.len() {
                        return Err(SpecError::UnknownState(format!("#{v}")));
                    }
                }
            }
            let spec = StatefulSpec {
                states: states.clone(),
                ops: ops.clone(),
                rules: Vec::new(),
                state_index: HashMap::new(),
                op_index: op_index.clone(),
            };
            let state_ok = |r: &StateRef| -> Result<(), SpecError> {
                match r {
                    StateRef::Lit(v) if *v >= states.len() => {
                        Err(SpecError::UnknownState(format!("#{v}")))
                    }
                    StateRef::Succ(i) if *i >= arity => Err(SpecError::BadConclusion {
                        op: op_name.clone(),
                        detail: format!("conclusion refers to successor of argument {}, arity is {arity}", i + 1),
                    }),
                    _ => Ok(()),
                }
            };
            match &conclusion {
                ConclusionSchema::Stop { state } => state_ok(state)?,
                ConclusionSchema::Step { term, state } => {
                    state_ok(state)?;
                    spec.check_rule_term(term, &op_name, arity, &schema.writes)?;
                }
            }
            per_op[op].push(Rule { schema, conclusion });
        }

        let spec = StatefulSpec { states, ops, rules: per_op, state_index, op_index };
        spec.check_overlap()?;
        spec.check_coverage()?;
        Ok(spec)
    }

    /// Rule targets may mention each reader variable, and the runner
    /// variable of exactly the writing positions.
    fn check_rule_term(
        &self,
        term: &Term,
        op_name: &str,
        arity: usize,
        writes: &BTreeSet<usize>,
    ) -> Result<(), SpecError> {
        match &term.node {
            Node::Meta(MetaVar::X(i)) => {
                if *i == 0 || *i > arity {
                    return Err(SpecError::BadConclusion {
                        op: op_name.to_string(),
                        detail: format!("conclusion mentions x{i}, arity is {arity}"),
                    });
                }
            }
            Node::Meta(MetaVar::Y(i)) => {
                if *i == 0 || !writes.contains(&(i - 1)) {
                    return Err(SpecError::BadConclusion {
                        op: op_name.to_string(),
                        detail: format!("conclusion mentions y{i} but argument {i} is not writing"),
                    });
                }
            }
            Node::Lit(_) => {
                return Err(SpecError::BadConclusion {
                    op: op_name.to_string(),
                    detail: "literals are not allowed in rule targets".to_string(),
                })
            }
            Node::Op(f) => {
                let child_op = self
                    .op_index
                    .get(f)
                    .ok_or_else(|| SpecError::UnknownOp(f.clone()))?;
                let want = self.ops[*child_op].arity;
                if term.children.len() != want {
                    return Err(SpecError::BadConclusion {
                        op: op_name.to_string(),
                        detail: format!(
                            "target uses `{f}` with {} arguments, expected {want}",
                            term.children.len()
                        ),
                    });
                }
            }
        }
        for c in &term.children {
            self.check_rule_term(c, op_name, arity, writes)?;
        }
        Ok(())
    }

    /// Two rules for the same operator with identical schemas must agree.
    fn check_overlap(&self) -> Result<(), SpecError> {
        for (op, rules) in self.rules.iter().enumerate() {
            for i in 0..rules.len() {
                for j in i + 1..rules.len() {
                    if rules[i].schema == rules[j].schema
                        && rules[i].conclusion != rules[j].conclusion
                    {
                        return Err(SpecError::Overlap {
                            op: self.ops[op].name.clone(),
                            first: i,
                            second: j,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_coverage(&self) -> Result<(), SpecError> {
        for (op, rules) in self.rules.iter().enumerate() {
            let arity = self.ops[op].arity;
            for wmask in 0u32..(1 << arity) {
                let writes: BTreeSet<usize> =
                    (0..arity).filter(|i| wmask & (1 << i) != 0).collect();
                let pats: Vec<(&StatePat, &[StatePat])> = rules
                    .iter()
                    .filter(|r| r.schema.writes == writes)
                    .map(|r| (&r.schema.state, r.schema.succ.as_slice()))
                    .collect();
                if let Some(hole) = self.find_uncovered(&pats, arity) {
                    let trig = Trigger {
                        writes,
                        state: hole[0],
                        succ: hole[1..].to_vec(),
                    };
                    return Err(SpecError::Coverage {
                        op: self.ops[op].name.clone(),
                        trigger: self.display_trigger(&trig),
                    });
                }
            }
        }
        Ok(())
    }

    /// Search for a point of S^{arity+1} (observed state, then successor
    /// states) not matched by any pattern row. Splits on one dimension at
    /// a time so wildcard rows cover whole boxes without enumeration.
    fn find_uncovered(&self, rows: &[(&StatePat, &[StatePat])], arity: usize) -> Option<Vec<usize>> {
        let dims = arity + 1;
        let rows: Vec<Vec<StatePat>> = rows
            .iter()
            .map(|(s, succ)| {
                let mut v = vec![**s];
                v.extend_from_slice(succ);
                v
            })
            .collect();
        self.find_uncovered_rec(&rows, 0, dims, &mut Vec::new())
    }

    fn find_uncovered_rec(
        &self,
        rows: &[Vec<StatePat>],
        dim: usize,
        dims: usize,
        prefix: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if rows.iter().any(|r| r[dim..].iter().all(|p| *p == StatePat::Any)) {
            return None;
        }
        if dim == dims {
            // No row left that matches this fully-fixed point.
            return Some(prefix.clone());
        }
        for v in 0..self.states.len() {
            let remaining: Vec<Vec<StatePat>> = rows
                .iter()
                .filter(|r| r[dim].matches(v))
                .cloned()
                .collect();
            prefix.push(v);
            if let Some(hole) = self.find_uncovered_rec(&remaining, dim + 1, dims, prefix) {
                return Some(hole);
            }
            prefix.pop();
        }
        None
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn ops(&self) -> &[SpecOp] {
        &self.ops
    }

    pub fn rules_for(&self, op: usize) -> &[Rule] {
        &self.rules[op]
    }

    pub fn state_id(&self, name: &str) -> Result<usize, SpecError> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| SpecError::UnknownState(name.to_string()))
    }

    pub fn op_id(&self, name: &str) -> Result<usize, SpecError> {
        self.op_index
            .get(name)
            .copied()
            .ok_or_else(|| SpecError::UnknownOp(name.to_string()))
    }

    /// Pick the conclusion for a concrete trigger: first declared rule
    /// whose schema matches. Validation guarantees one exists.
    pub fn resolve_rule(&self, op: usize, trig: &Trigger) -> Result<ResolvedConclusion, SpecError> {
        let rule = self.rules[op]
            .iter()
            .find(|r| r.schema.matches(trig))
            .ok_or_else(|| SpecError::Coverage {
                op: self.ops[op].name.clone(),
                trigger: self.display_trigger(trig),
            })?;
        let resolve_state = |r: &StateRef| match r {
            StateRef::Lit(v) => *v,
            StateRef::Input => trig.state,
            StateRef::Succ(i) => trig.succ[*i],
        };
        Ok(match &rule.conclusion {
            ConclusionSchema::Step { term, state } => ResolvedConclusion::Step {
                term: term.clone(),
                state: resolve_state(state),
            },
            ConclusionSchema::Stop { state } => ResolvedConclusion::Stop { state: resolve_state(state) },
        })
    }

    /// Enumerate every trigger for an operator.
    pub fn all_triggers(&self, op: usize) -> Vec<Trigger> {
        let arity = self.ops[op].arity;
        let nstates = self.states.len();
        let mut out = Vec::new();
        for wmask in 0u32..(1 << arity) {
            let writes: BTreeSet<usize> = (0..arity).filter(|i| wmask & (1 << i) != 0).collect();
            let mut succ = vec![0usize; arity];
            loop {
                for s in 0..nstates {
                    out.push(Trigger { writes: writes.clone(), state: s, succ: succ.clone() });
                }
                let mut i = 0;
                loop {
                    if i == arity {
                        break;
                    }
                    succ[i] += 1;
                    if succ[i] < nstates {
                        break;
                    }
                    succ[i] = 0;
                    i += 1;
                }
                if i == arity {
                    break;
                }
            }
        }
        out
    }

    pub fn display_trigger(&self, trig: &Trigger) -> String {
        let w: Vec<String> = trig.writes.iter().map(|i| (i + 1).to_string()).collect();
        let succ: Vec<String> = trig
            .succ
            .iter()
            .map(|s| self.states[*s].clone())
            .collect();
        format!(
            "(W={{{}}}, s={}, succ=[{}])",
            w.join(","),
            self.states[trig.state],
            succ.join(", ")
        )
    }

    pub fn display_conclusion(&self, c: &ResolvedConclusion) -> String {
        match c {
            ResolvedConclusion::Step { term, state } => {
                format!("step {term} @ {}", self.states[*state])
            }
            ResolvedConclusion::Stop { state } => format!("stop @ {}", self.states[*state]),
        }
    }

    /// Parse a term in the `f(a, b)` syntax. Metavariables `x1`, `y2`, ...
    /// are accepted so rule targets can be written in the same syntax.
    pub fn parse_open_term(&self, src: &str) -> Result<Term, SpecError> {
        let mut p = TermParser { src: src.as_bytes(), pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(SpecError::Parse(format!(
                "trailing input at byte {} in term `{src}`",
                p.pos
            )));
        }
        self.check_term_shape(&t)?;
        Ok(t)
    }

    /// Parse a closed term: metavariables are rejected.
    pub fn parse_term(&self, src: &str) -> Result<Term, SpecError> {
        let t = self.parse_open_term(src)?;
        if let Some(mv) = first_meta(&t) {
            return Err(SpecError::OpenTerm(mv.to_string()));
        }
        Ok(t)
    }

    fn check_term_shape(&self, t: &Term) -> Result<(), SpecError> {
        if let Node::Op(f) = &t.node {
            let op = self.op_id(f)?;
            let want = self.ops[op].arity;
            if t.children.len() != want {
                return Err(SpecError::IllFormedTerm(format!(
                    "`{f}` takes {want} arguments, got {}",
                    t.children.len()
                )));
            }
        }
        for c in &t.children {
            self.check_term_shape(c)?;
        }
        Ok(())
    }

    pub fn check_closed_term(&self, t: &Term) -> Result<(), SpecError> {
        self.check_term_shape(t)?;
        if let Some(mv) = first_meta(t) {
            return Err(SpecError::OpenTerm(mv.to_string()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> RawSpec {
        let state_name = |r: &StateRef| match r {
            StateRef::Lit(v) => self.states[*v].clone(),
            StateRef::Input => "$s".to_string(),
            StateRef::Succ(i) => format!("${}", i + 1),
        };
        let pat_name = |p: &StatePat| match p {
            StatePat::Any => "*".to_string(),
            StatePat::Is(v) => self.states[*v].clone(),
        };
        RawSpec {
            states: self.states.clone(),
            ops: self.ops.clone(),
            rules: self
                .rules
                .iter()
                .enumerate()
                .flat_map(|(op, rules)| {
                    let name = self.ops[op].name.clone();
                    rules.iter().map(move |r| RawRule {
                        op: name.clone(),
                        writes: r.schema.writes.iter().map(|i| i + 1).collect(),
                        state: pat_name(&r.schema.state),
                        succ: r.schema.succ.iter().map(pat_name).collect(),
                        conclusion: match &r.conclusion {
                            ConclusionSchema::Step { term, state } => RawConclusion {
                                kind: "step".to_string(),
                                term: Some(term.to_string()),
                                state: state_name(state),
                            },
                            ConclusionSchema::Stop { state } => RawConclusion {
                                kind: "stop".to_string(),
                                term: None,
                                state: state_name(state),
                            },
                        },
                    })
                })
                .collect(),
        }
    }
}

pub fn first_meta(t: &Term) -> Option<MetaVar> {
    if let Node::Meta(mv) = &t.node {
        return Some(*mv);
    }
    t.children.iter().find_map(first_meta)
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TermParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric()
                || self.src[self.pos] == b'_'
                || self.src[self.pos] == b'\'')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(SpecError::Parse(format!(
                "expected identifier at byte {}",
                self.pos
            )));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term, SpecError> {
        let name = self.ident()?;
        let node = parse_meta(&name)
            .map(Node::Meta)
            .unwrap_or(Node::Op(name));
        self.skip_ws();
        let mut children = Vec::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'(' {
            self.pos += 1;
            self.skip_ws();
            if self.pos < self.src.len() && self.src[self.pos] == b')' {
                self.pos += 1;
            } else {
                loop {
                    children.push(self.term()?);
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(SpecError::Parse(format!(
                                "expected `,` or `)` at byte {}",
                                self.pos
                            )))
                        }
                    }
                }
            }
        }
        if matches!(node, Node::Meta(_)) && !children.is_empty() {
            return Err(SpecError::Parse("metavariables take no arguments".to_string()));
        }
        Ok(Term { node, children })
    }
}

fn parse_meta(name: &str) -> Option<MetaVar> {
    let rest = name.get(1..)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let idx: usize = rest.parse().ok()?;
    if idx == 0 {
        return None;
    }
    match name.as_bytes()[0] {
        b'x' => Some(MetaVar::X(idx)),
        b'y' => Some(MetaVar::Y(idx)),
        _ => None,
    }
}

/// On-disk JSON form of a rule system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSpec {
    pub states: Vec<String>,
    pub ops: Vec<SpecOp>,
    pub rules: Vec<RawRule>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawRule {
    pub op: String,
    /// 1-based writing positions.
    #[serde(default)]
    pub writes: Vec<usize>,
    /// State pattern: a state name or "*".
    #[serde(default = "star")]
    pub state: String,
    /// Successor patterns, one per argument; each a state name or "*".
    #[serde(default)]
    pub succ: Vec<String>,
    pub conclusion: RawConclusion,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawConclusion {
    /// "step" or "stop".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
    /// A state name, "$s" for the observed state, or "$i" for the
    /// successor state of argument i (1-based).
    pub state: String,
}

fn star() -> String {
    "*".to_string()
}

pub fn load_spec(json: &str) -> Result<StatefulSpec, SpecError> {
    let raw: RawSpec = serde_json::from_str(json).map_err(|e| SpecError::Parse(e.to_string()))?;
    from_raw(&raw)
}

pub fn from_raw(raw: &RawSpec) -> Result<StatefulSpec, SpecError> {
    let state_index: HashMap<&str, usize> = raw
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let op_arities: BTreeMap<&str, usize> =
        raw.ops.iter().map(|o| (o.name.as_str(), o.arity)).collect();
    let pat = |s: &str| -> Result<StatePat, SpecError> {
        if s == "*" {
            Ok(StatePat::Any)
        } else {
            state_index
                .get(s)
                .map(|i| StatePat::Is(*i))
                .ok_or_else(|| SpecError::UnknownState(s.to_string()))
        }
    };
    let state_ref = |s: &str| -> Result<StateRef, SpecError> {
        if s == "$s" {
            Ok(StateRef::Input)
        } else if let Some(num) = s.strip_prefix('$') {
            let i: usize = num
                .parse()
                .map_err(|_| SpecError::Parse(format!("bad state reference `{s}`")))?;
            if i == 0 {
                return Err(SpecError::Parse(format!("bad state reference `{s}`")));
            }
            Ok(StateRef::Succ(i - 1))
        } else {
            state_index
                .get(s)
                .map(|i| StateRef::Lit(*i))
                .ok_or_else(|| SpecError::UnknownState(s.to_string()))
        }
    };

    // A scratch parser for rule targets: shapes are validated by `new`,
    // so only the token structure is needed here.
    let parse_target = |src: &str| -> Result<Term, SpecError> {
        let mut p = TermParser { src: src.as_bytes(), pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(SpecError::Parse(format!("trailing input in term `{src}`")));
        }
        Ok(t)
    };

    let mut rules = Vec::new();
    for r in &raw.rules {
        let arity = *op_arities
            .get(r.op.as_str())
            .ok_or_else(|| SpecError::UnknownOp(r.op.clone()))?;
        let mut writes = BTreeSet::new();
        for &w in &r.writes {
            if w == 0 {
                return Err(SpecError::Parse(format!(
                    "writing positions are 1-based; got 0 in a rule for `{}`",
                    r.op
                )));
            }
            writes.insert(w - 1);
        }
        let succ = if r.succ.is_empty() && arity > 0 {
            vec![StatePat::Any; arity]
        } else {
            r.succ.iter().map(|s| pat(s)).collect::<Result<_, _>>()?
        };
        let schema = TriggerSchema { writes, state: pat(&r.state)?, succ };
        let conclusion = match r.conclusion.kind.as_str() {
            "step" => {
                let term_src = r.conclusion.term.as_deref().ok_or_else(|| {
                    SpecError::Parse(format!("step conclusion for `{}` is missing a term", r.op))
                })?;
                ConclusionSchema::Step {
                    term: parse_target(term_src)?,
                    state: state_ref(&r.conclusion.state)?,
                }
            }
            "stop" => ConclusionSchema::Stop { state: state_ref(&r.conclusion.state)? },
            other => {
                return Err(SpecError::Parse(format!(
                    "conclusion kind must be \"step\" or \"stop\", got `{other}`"
                )))
            }
        };
        rules.push((r.op.clone(), schema, conclusion));
    }
    StatefulSpec::new(raw.states.clone(), raw.ops.clone(), rules)
}
