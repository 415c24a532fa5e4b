//! The reasoning controller: step, fact, and state scoring.
//!
//! Scores come from a pluggable [`ScorerBackend`]; this module owns candidate
//! enumeration, softmax normalization over step scores, and the state score
//! combination `lambda * mean(fact scores) + (1 - lambda) * cls`.

pub mod lexical;
pub mod loss;
pub mod training;

use crate::fact::FactId;
use crate::state::ReasoningState;
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// A candidate single step within a state: either a pair of facts combined
/// forward, or the target resolved backward against one fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    /// Unordered fact pair (stored with the smaller id first).
    DeductivePair(FactId, FactId),
    /// The state target paired with a known fact.
    AbductivePair(FactId),
}

impl StepKind {
    pub fn deductive(a: FactId, b: FactId) -> Self {
        if a <= b {
            StepKind::DeductivePair(a, b)
        } else {
            StepKind::DeductivePair(b, a)
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::DeductivePair(a, b) => write!(f, "{}+{}", a, b),
            StepKind::AbductivePair(k) => write!(f, "target-{}", k),
        }
    }
}

/// A scored candidate step. Scores over all candidates of a state are
/// post-softmax probabilities summing to 1.
#[derive(Debug, Clone)]
pub struct StepCandidate {
    pub kind: StepKind,
    pub score: f64,
    /// Pre-softmax backend score, kept for traces and tie-breaking.
    pub raw: f64,
}

/// Controller configuration: the state-score weight, ranking margins, and the
/// distractor threshold.
#[derive(Debug, Clone)]
pub struct ControllerConfig {
    pub lambda: f64,
    pub m_step: f64,
    pub m_fact: f64,
    pub m_state: f64,
    pub theta: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            lambda: 0.5,
            m_step: 0.1,
            m_fact: 0.1,
            m_state: 0.1,
            theta: 0.001,
        }
    }
}

/// Scoring backend: fact scores, pre-softmax step scores, and the
/// whole-state classifier score. Implementations must be deterministic for a
/// fixed instance and input, and safe for concurrent read-only calls.
pub trait ScorerBackend: Send + Sync {
    /// How useful `fact` is for proving `target`, in [0, 1].
    fn fact_score(&self, target: &crate::fact::Fact, fact: &crate::fact::Fact) -> f64;

    /// Pre-softmax score of one candidate step in `state`.
    fn raw_step_score(&self, state: &ReasoningState, kind: &StepKind) -> f64;

    /// Whole-state quality estimate in [0, 1].
    fn cls_score(&self, state: &ReasoningState) -> f64;
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("no step candidates survive the overlap filter")]
    EmptyCandidateSet,
}

/// All candidate steps of a state in deterministic order: every unordered
/// fact pair as a deductive candidate, then one abductive candidate per fact,
/// keeping only pairs that share a content token (surface facts) or an
/// entity/predicate symbol (structured facts).
pub fn enumerate_steps(state: &ReasoningState) -> Vec<StepKind> {
    let mut facts: Vec<&crate::fact::Fact> = state.facts().iter().collect();
    facts.sort_by(|a, b| a.id().cmp(b.id()));
    let mut out = Vec::new();
    for i in 0..facts.len() {
        for j in (i + 1)..facts.len() {
            if facts[i].overlaps(facts[j]) {
                out.push(StepKind::deductive(
                    facts[i].id().clone(),
                    facts[j].id().clone(),
                ));
            }
        }
    }
    for fact in &facts {
        if state.target().overlaps(fact) {
            out.push(StepKind::AbductivePair(fact.id().clone()));
        }
    }
    out
}

/// Score the enumerated candidates and normalize with softmax. Candidates
/// come back sorted by (probability desc, candidate asc).
pub fn score_steps(
    state: &ReasoningState,
    backend: &dyn ScorerBackend,
) -> Result<Vec<StepCandidate>, ScoreError> {
    let kinds = enumerate_steps(state);
    if kinds.is_empty() {
        return Err(ScoreError::EmptyCandidateSet);
    }
    let raws: Vec<f64> = kinds
        .iter()
        .map(|k| backend.raw_step_score(state, k))
        .collect();
    let probs = softmax(&raws);
    let mut out: Vec<StepCandidate> = kinds
        .into_iter()
        .zip(raws)
        .zip(probs)
        .map(|((kind, raw), score)| StepCandidate { kind, score, raw })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.kind.cmp(&b.kind))
    });
    Ok(out)
}

/// Numerically stable softmax; equal inputs map to equal probabilities.
pub fn softmax(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = raw.iter().map(|r| (r - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Per-fact scores plus the combined state score
/// `lambda * mean(fact) + (1 - lambda) * cls`.
pub fn score_state_detail(
    state: &ReasoningState,
    backend: &dyn ScorerBackend,
    config: &ControllerConfig,
) -> crate::state::StateScores {
    let mut fact_scores = std::collections::BTreeMap::new();
    let mut sum = 0.0;
    for f in state.facts() {
        let s = backend.fact_score(state.target(), f);
        sum += s;
        fact_scores.insert(f.id().clone(), s);
    }
    let mean = if state.facts().is_empty() {
        0.0
    } else {
        sum / state.facts().len() as f64
    };
    let state_score = config.lambda * mean + (1.0 - config.lambda) * backend.cls_score(state);
    crate::state::StateScores {
        fact_scores,
        state_score,
    }
}

/// The combined state score alone.
pub fn score_state(
    state: &ReasoningState,
    backend: &dyn ScorerBackend,
    config: &ControllerConfig,
) -> f64 {
    score_state_detail(state, backend, config).state_score
}

/// Stable candidate ordering helper: probability descending, candidate id
/// ascending.
pub fn cmp_candidates(a: &StepCandidate, b: &StepCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.kind.cmp(&b.kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fact::Fact;
    use crate::state::ReasoningState;

    struct ConstBackend {
        fact: f64,
        cls: f64,
    }

    impl ScorerBackend for ConstBackend {
        fn fact_score(&self, _t: &Fact, _f: &Fact) -> f64 {
            self.fact
        }
        fn raw_step_score(&self, _s: &ReasoningState, _k: &StepKind) -> f64 {
            0.0
        }
        fn cls_score(&self, _s: &ReasoningState) -> f64 {
            self.cls
        }
    }

    fn overlapping_state(n: usize) -> ReasoningState {
        let facts = (1..=n)
            .map(|k| Fact::textual(format!("sent{k}"), format!("shared anchor plus word{k}")))
            .collect();
        ReasoningState::new(Fact::textual("hypothesis", "shared anchor target"), facts)
    }

    #[test]
    fn five_overlapping_facts_give_ten_plus_five_candidates() {
        let kinds = enumerate_steps(&overlapping_state(5));
        let ded = kinds
            .iter()
            .filter(|k| matches!(k, StepKind::DeductivePair(..)))
            .count();
        let abd = kinds.len() - ded;
        assert_eq!((ded, abd), (10, 5));
    }

    #[test]
    fn zero_overlap_pairs_are_excluded() {
        let a = Fact::textual("sent1", "alpha beta");
        let b = Fact::textual("sent2", "gamma delta");
        let state = ReasoningState::new(Fact::textual("hypothesis", "alpha gamma"), vec![a, b]);
        let kinds = enumerate_steps(&state);
        assert!(kinds
            .iter()
            .all(|k| !matches!(k, StepKind::DeductivePair(..))));
        // both facts overlap the target, so the abductive candidates remain
        assert_eq!(kinds.len(), 2);
    }

    #[test]
    fn equal_raw_scores_softmax_to_uniform() {
        let state = overlapping_state(5);
        let backend = ConstBackend { fact: 1.0, cls: 1.0 };
        let cands = score_steps(&state, &backend).unwrap();
        assert_eq!(cands.len(), 15);
        for c in &cands {
            assert!((c.score - 1.0 / 15.0).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_closed_form() {
        let probs = softmax(&[0.0, 3f64.ln()]);
        assert!((probs[0] - 0.25).abs() < 1e-12);
        assert!((probs[1] - 0.75).abs() < 1e-12);
    }

    /// Backend with per-fact scores fixed by a table and a constant cls.
    struct TableBackend {
        table: std::collections::BTreeMap<String, f64>,
        cls: f64,
    }

    impl ScorerBackend for TableBackend {
        fn fact_score(&self, _t: &Fact, f: &Fact) -> f64 {
            *self.table.get(f.id().as_str()).unwrap_or(&0.0)
        }
        fn raw_step_score(&self, _s: &ReasoningState, _k: &StepKind) -> f64 {
            0.0
        }
        fn cls_score(&self, _s: &ReasoningState) -> f64 {
            self.cls
        }
    }

    #[test]
    fn raising_one_fact_score_never_lowers_the_state_score() {
        let state = overlapping_state(4);
        let config = ControllerConfig::default();
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let mut table: std::collections::BTreeMap<String, f64> = (1..=4)
                .map(|k| (format!("sent{k}"), next()))
                .collect();
            let cls = next();
            let low = score_state(&state, &TableBackend { table: table.clone(), cls }, &config);
            // Raise one fact's score; cls held fixed.
            let bumped = (table["sent2"] + next() * (1.0 - table["sent2"])).min(1.0);
            table.insert("sent2".to_string(), bumped);
            let high = score_state(&state, &TableBackend { table, cls }, &config);
            assert!(high >= low - 1e-12);
        }
    }

    #[test]
    fn state_score_is_linear_in_lambda() {
        let state = overlapping_state(3);
        let backend = ConstBackend { fact: 0.4, cls: 0.9 };
        for i in 0..=10 {
            let lambda = i as f64 / 10.0;
            let config = ControllerConfig {
                lambda,
                ..ControllerConfig::default()
            };
            let expected = lambda * 0.4 + (1.0 - lambda) * 0.9;
            assert!((score_state(&state, &backend, &config) - expected).abs() < 1e-12);
        }
    }

    /// Shifting every raw step score by a shared constant leaves the
    /// post-softmax ranking unchanged.
    #[test]
    fn softmax_ranking_is_shift_invariant() {
        let raws = [0.3, -1.2, 2.5, 0.3, 0.0];
        let order = |probs: &[f64]| {
            let mut idx: Vec<usize> = (0..probs.len()).collect();
            idx.sort_by(|a, b| probs[*b].total_cmp(&probs[*a]).then(a.cmp(b)));
            idx
        };
        let base = softmax(&raws);
        for shift in [-3.0, 0.7, 42.0] {
            let shifted: Vec<f64> = raws.iter().map(|r| r + shift).collect();
            let probs = softmax(&shifted);
            assert_eq!(order(&base), order(&probs));
            for (a, b) in base.iter().zip(&probs) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn state_score_combines_fact_mean_and_cls() {
        let state = overlapping_state(3);
        // lambda = 1 and all fact scores 1 -> state score 1
        let config = ControllerConfig {
            lambda: 1.0,
            ..ControllerConfig::default()
        };
        let backend = ConstBackend { fact: 1.0, cls: 0.0 };
        assert!((score_state(&state, &backend, &config) - 1.0).abs() < 1e-12);

        // lambda = 0.5, mean fact 0.6, cls 0.8 -> 0.7
        let config = ControllerConfig {
            lambda: 0.5,
            ..ControllerConfig::default()
        };
        let backend = ConstBackend { fact: 0.6, cls: 0.8 };
        assert!((score_state(&state, &backend, &config) - 0.7).abs() < 1e-12);
    }
}
