use crate::system::{EquivError, FStep, FiniteRWSystem};

/// How a bounded deterministic run ended: terminated in a state, locked
/// into a silent loop, or kept announcing past the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamEnd {
    Done(usize),
    Livelock,
    More,
}

/// Follow the unique run of a writer, collecting announced states up to
/// `horizon`. A silent loop is certain once more consecutive silent
/// steps happen than there are writers.
pub fn run_stream(
    sys: &FiniteRWSystem,
    w: usize,
    horizon: usize,
) -> Result<(Vec<usize>, StreamEnd), EquivError> {
    let mut cur = w;
    let mut emitted = Vec::new();
    let mut silent_run = 0usize;
    loop {
        let step = match sys.writer_map[cur].as_slice() {
            [step] => *step,
            _ => return Err(EquivError::Nondeterministic(sys.writers[cur].clone())),
        };
        match step {
            FStep::Silent { to } => {
                silent_run += 1;
                if silent_run > sys.writers.len() {
                    return Ok((emitted, StreamEnd::Livelock));
                }
                cur = to;
            }
            FStep::Output { to, state } => {
                // `More` strictly means the stream continues past the
                // horizon, so termination at the boundary stays exact.
                if emitted.len() == horizon {
                    return Ok((emitted, StreamEnd::More));
                }
                silent_run = 0;
                emitted.push(state);
                cur = to;
            }
            FStep::Done { state } => return Ok((emitted, StreamEnd::Done(state))),
        }
    }
}

/// The cost datum of a deterministic writer: announcement count and
/// final state, or `None` for every kind of divergence.
pub fn cost_class(sys: &FiniteRWSystem, w: usize) -> Result<Option<(usize, usize)>, EquivError> {
    // The run revisits a writer within |W| announcements or terminates.
    let horizon = sys.writers.len() + 1;
    match run_stream(sys, w, horizon)? {
        (emitted, StreamEnd::Done(f)) => Ok(Some((emitted.len(), f))),
        (_, StreamEnd::Livelock) => Ok(None),
        (_, StreamEnd::More) => Ok(None),
    }
}

/// The termination datum: final state, or `None` when the run diverges.
pub fn ter_class(sys: &FiniteRWSystem, w: usize) -> Result<Option<usize>, EquivError> {
    Ok(cost_class(sys, w)?.map(|(_, f)| f))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEqReport {
    pub equal: bool,
    /// 1-based position of the first differing announced state, when
    /// the difference is inside the streams.
    pub diff_position: Option<usize>,
    pub detail: Option<String>,
}

impl TraceEqReport {
    fn equal() -> Self {
        TraceEqReport { equal: true, diff_position: None, detail: None }
    }
}

fn compare_streams(
    sys: &FiniteRWSystem,
    a: usize,
    b: usize,
    horizon: usize,
) -> Result<TraceEqReport, EquivError> {
    let (ea, enda) = run_stream(sys, a, horizon)?;
    let (eb, endb) = run_stream(sys, b, horizon)?;
    for (i, (x, y)) in ea.iter().zip(&eb).enumerate() {
        if x != y {
            return Ok(TraceEqReport {
                equal: false,
                diff_position: Some(i + 1),
                detail: Some(format!(
                    "announcement {} is {} on the left, {} on the right",
                    i + 1,
                    sys.states[*x],
                    sys.states[*y]
                )),
            });
        }
    }
    if ea.len() != eb.len() {
        let pos = ea.len().min(eb.len()) + 1;
        return Ok(TraceEqReport {
            equal: false,
            diff_position: Some(pos),
            detail: Some(format!(
                "one side has an announcement at position {pos}, the other ends first"
            )),
        });
    }
    if enda != endb {
        return Ok(TraceEqReport {
            equal: false,
            diff_position: None,
            detail: Some(format!("runs end differently: {enda:?} vs {endb:?}")),
        });
    }
    Ok(TraceEqReport::equal())
}

/// Exact trace equality of two writers of a deterministic finite
/// system. Two runs over at most |W| configurations each are equal iff
/// they agree for |W|^2 + 1 announcements: by then the product of the
/// two runs has revisited a configuration pair, so both streams are in
/// lockstep on a shared cycle.
pub fn trace_equiv_writers(
    sys: &FiniteRWSystem,
    a: usize,
    b: usize,
) -> Result<TraceEqReport, EquivError> {
    let horizon = sys.writers.len() * sys.writers.len() + 1;
    compare_streams(sys, a, b, horizon)
}

/// Trace equality of two readers: their writers must be trace-equal on
/// every state.
pub fn trace_equiv_readers(
    sys: &FiniteRWSystem,
    a: usize,
    b: usize,
) -> Result<TraceEqReport, EquivError> {
    for s in 0..sys.states.len() {
        let rep = trace_equiv_writers(sys, sys.reader_map[a][s], sys.reader_map[b][s])?;
        if !rep.equal {
            return Ok(TraceEqReport {
                equal: false,
                diff_position: rep.diff_position,
                detail: Some(format!(
                    "on {}: {}",
                    sys.states[s],
                    rep.detail.unwrap_or_default()
                )),
            });
        }
    }
    Ok(TraceEqReport::equal())
}

/// Cost equality for deterministic writers (announcement count plus
/// final state; all divergences identified).
pub fn cost_equiv_writers(sys: &FiniteRWSystem, a: usize, b: usize) -> Result<bool, EquivError> {
    Ok(cost_class(sys, a)? == cost_class(sys, b)?)
}

pub fn ter_equiv_writers(sys: &FiniteRWSystem, a: usize, b: usize) -> Result<bool, EquivError> {
    Ok(ter_class(sys, a)? == ter_class(sys, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_writer_is_trace_equal() {
        let sys = FiniteRWSystem {
            readers: vec![],
            writers: vec!["w".into()],
            states: vec!["s".into()],
            reader_map: vec![],
            writer_map: vec![vec![FStep::Done { state: 0 }]],
        };
        assert!(trace_equiv_writers(&sys, 0, 0).unwrap().equal);
    }

    #[test]
    fn different_entry_points_into_the_same_stream() {
        // a: prefix announcing s0, then the cycle [s1 s0]; b: the cycle
        // [s0 s1] entered directly. Both streams are s0 s1 s0 s1 ...
        let sys = FiniteRWSystem {
            readers: vec![],
            writers: vec!["a".into(), "a1".into(), "b".into(), "b1".into()],
            states: vec!["s0".into(), "s1".into()],
            reader_map: vec![],
            writer_map: vec![
                vec![FStep::Output { to: 1, state: 0 }],
                vec![FStep::Output { to: 0, state: 1 }],
                vec![FStep::Output { to: 3, state: 0 }],
                vec![FStep::Output { to: 2, state: 1 }],
            ],
        };
        assert!(trace_equiv_writers(&sys, 0, 2).unwrap().equal);

        // Unrolling oracle at a generous horizon.
        let horizon = 10 * sys.writers.len() * sys.writers.len();
        assert!(compare_streams(&sys, 0, 2, horizon).unwrap().equal);

        // Entering the same cycle one step later shifts the stream.
        assert!(!trace_equiv_writers(&sys, 0, 3).unwrap().equal);
    }

    #[test]
    fn difference_at_third_announcement_is_positioned() {
        let mk = |third: usize| {
            vec![
                vec![FStep::Output { to: 1, state: 0 }],
                vec![FStep::Output { to: 2, state: 1 }],
                vec![FStep::Output { to: 3, state: third }],
                vec![FStep::Done { state: 0 }],
            ]
        };
        let mut writer_map = mk(0);
        writer_map.extend(mk(1));
        // Reindex the second copy's targets.
        for steps in writer_map[4..].iter_mut() {
            for s in steps.iter_mut() {
                if let FStep::Output { to, .. } = s {
                    *to += 4;
                }
            }
        }
        let sys = FiniteRWSystem {
            readers: vec![],
            writers: (0..8).map(|i| format!("w{i}")).collect(),
            states: vec!["s0".into(), "s1".into()],
            reader_map: vec![],
            writer_map,
        };
        let rep = trace_equiv_writers(&sys, 0, 4).unwrap();
        assert!(!rep.equal);
        assert_eq!(rep.diff_position, Some(3));
    }

    #[test]
    fn livelock_is_detected_and_compared() {
        let sys = FiniteRWSystem {
            readers: vec![],
            writers: vec!["u".into(), "v".into(), "t".into()],
            states: vec!["s".into()],
            reader_map: vec![],
            writer_map: vec![
                vec![FStep::Silent { to: 1 }],
                vec![FStep::Silent { to: 0 }],
                vec![FStep::Done { state: 0 }],
            ],
        };
        let (e, end) = run_stream(&sys, 0, 10).unwrap();
        assert!(e.is_empty());
        assert_eq!(end, StreamEnd::Livelock);
        assert!(trace_equiv_writers(&sys, 0, 1).unwrap().equal);
        assert!(!trace_equiv_writers(&sys, 0, 2).unwrap().equal);
    }
}
