use core_syntax::{Term, VarStore};
use imp::{imp_trace, TraceResult};

use crate::semantics::{imp2_trace, Imp2Error};
use crate::writer::RWTerm;

/// How one (term, store) comparison came out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingOutcome {
    /// Both runs finished with identical emitted states and final store.
    Match,
    /// At least one side was cut; the common prefix agreed.
    CutAgreement,
    Mismatch(Mismatch),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub term: Term,
    pub store: VarStore,
    pub base: TraceResult,
    pub derived: TraceResult,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub matches: usize,
    pub cut_agreements: usize,
    pub mismatches: Vec<Mismatch>,
}

fn is_prefix(shorter: &[VarStore], longer: &[VarStore]) -> bool {
    shorter.len() <= longer.len() && longer[..shorter.len()] == *shorter
}

/// Compares the base-language run against the reader-writer run of the same
/// term. The writer side gets fuel 4·fuel+4: one base step costs at most a
/// four-writer chain, amortized over unfolding of sequencing spines.
pub fn verify_embedding_one(
    p: &Term,
    s: &VarStore,
    fuel: usize,
) -> Result<EmbeddingOutcome, Imp2Error> {
    let base = imp_trace(p, s, fuel)?;
    let derived = imp2_trace(&RWTerm::Reader(p.clone()), Some(s), 4 * fuel + 4)?;
    let outcome = match (&base, &derived) {
        (
            TraceResult::Finished { emitted: e1, final_store: f1 },
            TraceResult::Finished { emitted: e2, final_store: f2 },
        ) => {
            if e1 == e2 && f1 == f2 {
                EmbeddingOutcome::Match
            } else {
                EmbeddingOutcome::Mismatch(Mismatch {
                    term: p.clone(),
                    store: s.clone(),
                    base,
                    derived,
                })
            }
        }
        (TraceResult::Cut { emitted: e1 }, TraceResult::Finished { emitted: e2, .. }) => {
            // The base run was cut first; the writer side may legitimately
            // have finished within its larger budget.
            if is_prefix(e1, e2) {
                EmbeddingOutcome::CutAgreement
            } else {
                EmbeddingOutcome::Mismatch(Mismatch { term: p.clone(), store: s.clone(), base, derived })
            }
        }
        (TraceResult::Cut { emitted: e1 }, TraceResult::Cut { emitted: e2 }) => {
            if is_prefix(e1, e2) || is_prefix(e2, e1) {
                EmbeddingOutcome::CutAgreement
            } else {
                EmbeddingOutcome::Mismatch(Mismatch { term: p.clone(), store: s.clone(), base, derived })
            }
        }
        (TraceResult::Finished { .. }, TraceResult::Cut { .. }) => {
            // The writer budget 4·fuel+4 covers any base run that finished
            // within fuel, so this is a genuine disagreement.
            EmbeddingOutcome::Mismatch(Mismatch { term: p.clone(), store: s.clone(), base, derived })
        }
    };
    Ok(outcome)
}

pub fn verify_embedding(
    terms: &[Term],
    stores: &[VarStore],
    fuel: usize,
) -> Result<EmbeddingReport, Imp2Error> {
    let mut report = EmbeddingReport::default();
    for p in terms {
        for s in stores {
            match verify_embedding_one(p, s, fuel)? {
                EmbeddingOutcome::Match => report.matches += 1,
                EmbeddingOutcome::CutAgreement => report.cut_agreements += 1,
                EmbeddingOutcome::Mismatch(m) => report.mismatches.push(m),
            }
        }
    }
    Ok(report)
}
