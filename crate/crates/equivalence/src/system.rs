use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("reader map missing an entry for ({reader}, {state})")]
    PartialReaderMap { reader: String, state: String },
    #[error("system is nondeterministic at writer `{0}`")]
    Nondeterministic(String),
    #[error("index out of range")]
    Carrier,
}

/// One writer transition in a finite two-sorted transition system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FStep {
    Silent { to: usize },
    Output { to: usize, state: usize },
    Done { state: usize },
}

/// An explicit finite two-sorted transition system: readers react to a
/// state by becoming a writer; writers step silently, announce a state,
/// or terminate in one. The writer relation may be nondeterministic.
#[derive(Debug, Clone)]
pub struct FiniteRWSystem {
    pub readers: Vec<String>,
    pub writers: Vec<String>,
    pub states: Vec<String>,
    /// `reader_map[p][s]` is the writer that `p` becomes on state `s`.
    pub reader_map: Vec<Vec<usize>>,
    pub writer_map: Vec<Vec<FStep>>,
}

impl FiniteRWSystem {
    pub fn is_deterministic(&self) -> bool {
        self.writer_map.iter().all(|steps| steps.len() == 1)
    }

    pub fn writer_id(&self, name: &str) -> Result<usize, EquivError> {
        self.writers
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| EquivError::UnknownName { kind: "writer", name: name.to_string() })
    }

    pub fn reader_id(&self, name: &str) -> Result<usize, EquivError> {
        self.readers
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| EquivError::UnknownName { kind: "reader", name: name.to_string() })
    }

    /// Writers reachable by silent steps alone (reflexive-transitive).
    pub fn silent_reach(&self, w: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([w]);
        let mut queue = VecDeque::from([w]);
        while let Some(u) = queue.pop_front() {
            for step in &self.writer_map[u] {
                if let FStep::Silent { to } = step {
                    if seen.insert(*to) {
                        queue.push_back(*to);
                    }
                }
            }
        }
        seen
    }

    /// Weak announcing steps: a silent chain, then exactly one
    /// announcing transition, with no trailing closure.
    pub fn weak_outputs(&self, w: usize) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for u in self.silent_reach(w) {
            for step in &self.writer_map[u] {
                if let FStep::Output { to, state } = step {
                    out.insert((*state, *to));
                }
            }
        }
        out
    }

    /// Weak termination after silent steps only.
    pub fn weak_done(&self, w: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for u in self.silent_reach(w) {
            for step in &self.writer_map[u] {
                if let FStep::Done { state } = step {
                    out.insert(*state);
                }
            }
        }
        out
    }

    /// Writers reachable when announcing steps are absorbed as well.
    pub fn absorbing_reach(&self, w: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([w]);
        let mut queue = VecDeque::from([w]);
        while let Some(u) = queue.pop_front() {
            for step in &self.writer_map[u] {
                let to = match step {
                    FStep::Silent { to } | FStep::Output { to, .. } => *to,
                    FStep::Done { .. } => continue,
                };
                if seen.insert(to) {
                    queue.push_back(to);
                }
            }
        }
        seen
    }

    /// Termination after any mix of silent and announcing steps.
    pub fn absorbing_done(&self, w: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for u in self.absorbing_reach(w) {
            for step in &self.writer_map[u] {
                if let FStep::Done { state } = step {
                    out.insert(*state);
                }
            }
        }
        out
    }
}

/// A two-sorted relation over a system's carriers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relation2 {
    pub readers: BTreeSet<(usize, usize)>,
    pub writers: BTreeSet<(usize, usize)>,
}

impl Relation2 {
    pub fn full(sys: &FiniteRWSystem) -> Self {
        let readers = (0..sys.readers.len())
            .flat_map(|a| (0..sys.readers.len()).map(move |b| (a, b)))
            .collect();
        let writers = (0..sys.writers.len())
            .flat_map(|a| (0..sys.writers.len()).map(move |b| (a, b)))
            .collect();
        Relation2 { readers, writers }
    }

    pub fn identity(sys: &FiniteRWSystem) -> Self {
        Relation2 {
            readers: (0..sys.readers.len()).map(|a| (a, a)).collect(),
            writers: (0..sys.writers.len()).map(|a| (a, a)).collect(),
        }
    }

    /// Pairs related in both directions.
    pub fn symmetric_kernel(&self) -> Relation2 {
        Relation2 {
            readers: self
                .readers
                .iter()
                .filter(|(a, b)| self.readers.contains(&(*b, *a)))
                .copied()
                .collect(),
            writers: self
                .writers
                .iter()
                .filter(|(a, b)| self.writers.contains(&(*b, *a)))
                .copied()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawStep {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawRelation {
    #[serde(default)]
    pub r: Vec<(String, String)>,
    #[serde(default)]
    pub w: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RawSystem {
    pub readers: Vec<String>,
    pub writers: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub reader_map: Vec<(String, String, String)>,
    pub writer_map: Vec<(String, RawStep)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RawRelation>,
}

fn index_of(names: &[String], kind: &'static str, name: &str) -> Result<usize, EquivError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| EquivError::UnknownName { kind, name: name.to_string() })
}

pub fn system_from_raw(raw: &RawSystem) -> Result<FiniteRWSystem, EquivError> {
    for (names, kind) in [
        (&raw.readers, "reader"),
        (&raw.writers, "writer"),
        (&raw.states, "state"),
    ] {
        let mut seen = BTreeSet::new();
        for n in names.iter() {
            if !seen.insert(n) {
                return Err(EquivError::DuplicateName { kind, name: n.clone() });
            }
        }
    }
    let mut reader_map = vec![vec![usize::MAX; raw.states.len()]; raw.readers.len()];
    for (p, s, w) in &raw.reader_map {
        let p = index_of(&raw.readers, "reader", p)?;
        let s = index_of(&raw.states, "state", s)?;
        let w = index_of(&raw.writers, "writer", w)?;
        reader_map[p][s] = w;
    }
    for (p, row) in reader_map.iter().enumerate() {
        for (s, w) in row.iter().enumerate() {
            if *w == usize::MAX {
                return Err(EquivError::PartialReaderMap {
                    reader: raw.readers[p].clone(),
                    state: raw.states[s].clone(),
                });
            }
        }
    }
    let mut writer_map = vec![Vec::new(); raw.writers.len()];
    for (w, step) in &raw.writer_map {
        let w = index_of(&raw.writers, "writer", w)?;
        let need_to = |to: &Option<String>| -> Result<usize, EquivError> {
            let name = to
                .as_ref()
                .ok_or_else(|| EquivError::Parse("step is missing `to`".to_string()))?;
            index_of(&raw.writers, "writer", name)
        };
        let need_state = |state: &Option<String>| -> Result<usize, EquivError> {
            let name = state
                .as_ref()
                .ok_or_else(|| EquivError::Parse("step is missing `state`".to_string()))?;
            index_of(&raw.states, "state", name)
        };
        let parsed = match step.kind.as_str() {
            "silent" => FStep::Silent { to: need_to(&step.to)? },
            "output" => FStep::Output { to: need_to(&step.to)?, state: need_state(&step.state)? },
            "done" => FStep::Done { state: need_state(&step.state)? },
            other => {
                return Err(EquivError::Parse(format!(
                    "step kind must be silent/output/done, got `{other}`"
                )))
            }
        };
        writer_map[w].push(parsed);
    }
    Ok(FiniteRWSystem {
        readers: raw.readers.clone(),
        writers: raw.writers.clone(),
        states: raw.states.clone(),
        reader_map,
        writer_map,
    })
}

pub fn load_system(json: &str) -> Result<FiniteRWSystem, EquivError> {
    let raw: RawSystem = serde_json::from_str(json).map_err(|e| EquivError::Parse(e.to_string()))?;
    system_from_raw(&raw)
}

pub fn relation_from_raw(raw: &RawRelation, sys: &FiniteRWSystem) -> Result<Relation2, EquivError> {
    let mut rel = Relation2::default();
    for (a, b) in &raw.r {
        rel.readers.insert((sys.reader_id(a)?, sys.reader_id(b)?));
    }
    for (a, b) in &raw.w {
        rel.writers.insert((sys.writer_id(a)?, sys.writer_id(b)?));
    }
    Ok(rel)
}

/// Accepts either a bare `{"r": ..., "w": ...}` document or a full
/// system document with a `relation` field.
pub fn load_relation(json: &str, sys: &FiniteRWSystem) -> Result<Relation2, EquivError> {
    #[derive(Deserialize)]
    struct Wrapper {
        relation: RawRelation,
    }
    if let Ok(w) = serde_json::from_str::<Wrapper>(json) {
        return relation_from_raw(&w.relation, sys);
    }
    let raw: RawRelation =
        serde_json::from_str(json).map_err(|e| EquivError::Parse(e.to_string()))?;
    relation_from_raw(&raw, sys)
}

/// A random finite system. Silent steps only ever target lower-indexed
/// writers, so silent chains always bottom out: no writer can keep
/// stepping without ever announcing or terminating. `max_branch`
/// controls nondeterminism (1 = deterministic).
pub fn random_system(rng: &mut impl Rng, max_branch: usize) -> FiniteRWSystem {
    let nstates = rng.gen_range(1..=3usize);
    let nwriters = rng.gen_range(2..=6usize);
    let nreaders = rng.gen_range(1..=3usize);
    let states = (0..nstates).map(|i| format!("s{i}")).collect::<Vec<_>>();
    let writers = (0..nwriters).map(|i| format!("w{i}")).collect::<Vec<_>>();
    let readers = (0..nreaders).map(|i| format!("p{i}")).collect::<Vec<_>>();
    let reader_map = (0..nreaders)
        .map(|_| (0..nstates).map(|_| rng.gen_range(0..nwriters)).collect())
        .collect();
    let mut writer_map = Vec::new();
    for i in 0..nwriters {
        let branches = rng.gen_range(1..=max_branch.max(1));
        let mut steps = BTreeSet::new();
        for _ in 0..branches {
            let step = match rng.gen_range(0..10) {
                0..=2 if i > 0 => FStep::Silent { to: rng.gen_range(0..i) },
                3..=6 => FStep::Output {
                    to: rng.gen_range(0..nwriters),
                    state: rng.gen_range(0..nstates),
                },
                _ => FStep::Done { state: rng.gen_range(0..nstates) },
            };
            steps.insert(step);
        }
        writer_map.push(steps.into_iter().collect());
    }
    FiniteRWSystem { readers, writers, states, reader_map, writer_map }
}

/// A random relation over the system's carriers with roughly the given
/// density, always including some diagonal pairs.
pub fn random_relation(rng: &mut impl Rng, sys: &FiniteRWSystem, density: f64) -> Relation2 {
    let mut rel = Relation2::default();
    for a in 0..sys.readers.len() {
        for b in 0..sys.readers.len() {
            if (a == b && rng.gen_bool(0.5)) || rng.gen_bool(density) {
                rel.readers.insert((a, b));
            }
        }
    }
    for a in 0..sys.writers.len() {
        for b in 0..sys.writers.len() {
            if (a == b && rng.gen_bool(0.5)) || rng.gen_bool(density) {
                rel.writers.insert((a, b));
            }
        }
    }
    rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn closures_on_a_small_chain() {
        // w2 -silent-> w1 -output s0-> w0 -done s1
        let sys = FiniteRWSystem {
            readers: vec!["p".into()],
            writers: vec!["w0".into(), "w1".into(), "w2".into()],
            states: vec!["s0".into(), "s1".into()],
            reader_map: vec![vec![2, 0]],
            writer_map: vec![
                vec![FStep::Done { state: 1 }],
                vec![FStep::Output { to: 0, state: 0 }],
                vec![FStep::Silent { to: 1 }],
            ],
        };
        assert_eq!(sys.silent_reach(2), BTreeSet::from([1, 2]));
        assert_eq!(sys.weak_outputs(2), BTreeSet::from([(0, 0)]));
        assert!(sys.weak_done(2).is_empty());
        assert_eq!(sys.absorbing_reach(2), BTreeSet::from([0, 1, 2]));
        assert_eq!(sys.absorbing_done(2), BTreeSet::from([1]));
        assert_eq!(sys.weak_done(0), BTreeSet::from([1]));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{
            "readers": ["p"], "writers": ["c", "d"], "states": ["s1"],
            "readerMap": [["p", "s1", "c"]],
            "writerMap": [
                ["c", {"kind": "output", "to": "d", "state": "s1"}],
                ["d", {"kind": "done", "state": "s1"}]
            ],
            "relation": {"r": [["p","p"]], "w": [["c","d"]]}
        }"#;
        let sys = load_system(json).unwrap();
        assert!(sys.is_deterministic());
        let rel = load_relation(json, &sys).unwrap();
        assert_eq!(rel.writers, BTreeSet::from([(0, 1)]));
        let bare = r#"{"w": [["d","c"]]}"#;
        let rel2 = load_relation(bare, &sys).unwrap();
        assert_eq!(rel2.writers, BTreeSet::from([(1, 0)]));
    }

    #[test]
    fn generated_systems_have_finite_silent_chains() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let sys = random_system(&mut rng, 2);
            for w in 0..sys.writers.len() {
                // Every silent path strictly descends, so the reach set
                // is finite and bounded by the writer count.
                assert!(sys.silent_reach(w).len() <= sys.writers.len());
                for u in sys.silent_reach(w) {
                    for s in &sys.writer_map[u] {
                        if let FStep::Silent { to } = s {
                            assert!(*to < u);
                        }
                    }
                }
            }
        }
    }
}
