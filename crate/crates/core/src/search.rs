//! Iterative beam-search tree generation.
//!
//! From an initial state `hypothesis <= facts`, low-scoring facts are removed,
//! then up to `max_depth` iterations expand each beam state: the controller
//! picks the top step candidates, every applicable module executes them, and
//! the best `beam_size` new states survive. Abductive steps replace the
//! state's target with the abduced missing premise. Finally every visited
//! state's target is aligned to its most similar fact and the highest-scoring
//! valid tree is returned.

use crate::controller::{
    enumerate_steps, score_state_detail, score_steps, ControllerConfig, ScoreError,
    ScorerBackend, StepCandidate, StepKind,
};
use crate::entailment::{ModuleError, ModuleRequest, ModuleSet};
use crate::fact::{Fact, FactId};
use crate::judge::SimilarityJudge;
use crate::state::ReasoningState;
use crate::tree::{Direction, EntailmentTree, Step};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Which task variant the search runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// All provided facts belong to the gold tree; iterate until all are used.
    Task1,
    /// Provided facts include distractors; stop when the target is proved.
    Task2,
    /// Like Task2, over retrieved sentences.
    Task3,
    /// Controller-free baseline (see [`heuristic_reason`]).
    Heuristic,
}

/// Beam-search parameters.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub beam_size: usize,
    pub max_depth: usize,
    /// Facts scoring below this are dropped before the search starts.
    pub theta: f64,
    /// Fraction of step candidates expanded per state, rounded up.
    pub tau: f64,
    pub mode: SearchMode,
    /// Judge similarity at which the target counts as proved.
    pub prove_threshold: f64,
    /// Controller parameters used for state scoring.
    pub controller: ControllerConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            beam_size: 10,
            max_depth: 5,
            theta: 0.001,
            tau: 0.10,
            mode: SearchMode::Task2,
            prove_threshold: 1.0,
            controller: ControllerConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("no step candidate survives the filters in the initial state")]
    NoCandidates,
    #[error("no visited state assembles into a valid tree")]
    NoValidTree,
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// Search output: the selected tree, every beam state visited, whether the
/// target was proved, and the number of iterations run.
#[derive(Debug)]
pub struct SearchResult {
    pub best_tree: EntailmentTree,
    pub all_states: Vec<ReasoningState>,
    pub proved: bool,
    pub iterations: usize,
}

/// Machine-readable record of one run.
#[derive(Debug, Default, Serialize)]
pub struct SearchTrace {
    pub removed_distractors: Vec<String>,
    /// True when removal would have emptied the fact set and the original
    /// state was kept instead.
    pub degenerate_filter_guard: bool,
    pub iterations: Vec<IterationTrace>,
}

#[derive(Debug, Serialize)]
pub struct IterationTrace {
    pub index: usize,
    pub expansions: usize,
    pub chosen: Vec<ChosenStep>,
    pub beam: Vec<BeamEntry>,
}

#[derive(Debug, Serialize)]
pub struct ChosenStep {
    pub parent: usize,
    pub step: String,
    pub raw: f64,
    pub probability: f64,
}

#[derive(Debug, Serialize)]
pub struct BeamEntry {
    pub order: usize,
    pub target: String,
    pub target_text: String,
    pub facts: Vec<String>,
    pub score: f64,
}

/// Outcome of the pre-search fact filter.
pub struct FilterOutcome {
    pub state: ReasoningState,
    pub removed: Vec<FactId>,
    pub degenerate_guard: bool,
}

/// Remove facts whose fact score falls below `theta`. If removal would empty
/// the fact set, the original state is kept and the guard flag is raised.
pub fn filter_distractors_detailed(
    state: &ReasoningState,
    backend: &dyn ScorerBackend,
    theta: f64,
) -> FilterOutcome {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for f in state.facts() {
        if backend.fact_score(state.target(), f) < theta {
            removed.push(f.id().clone());
        } else {
            kept.push(f.clone());
        }
    }
    if kept.is_empty() {
        return FilterOutcome {
            state: state.clone(),
            removed: Vec::new(),
            degenerate_guard: true,
        };
    }
    FilterOutcome {
        state: ReasoningState::new(state.target().clone(), kept),
        removed,
        degenerate_guard: false,
    }
}

/// [`filter_distractors_detailed`] without the bookkeeping.
pub fn filter_distractors(
    state: &ReasoningState,
    backend: &dyn ScorerBackend,
    theta: f64,
) -> ReasoningState {
    filter_distractors_detailed(state, backend, theta).state
}

/// Run the controller-guided beam search.
pub fn reason(
    hypothesis: &Fact,
    facts: &[Fact],
    config: &SearchConfig,
    modules: &ModuleSet,
    backend: &dyn ScorerBackend,
    judge: &dyn SimilarityJudge,
) -> Result<(SearchResult, SearchTrace), SearchError> {
    let engine = Engine {
        config,
        modules,
        judge,
        policy: Policy::Controller {
            backend,
            controller: &config.controller,
        },
    };
    engine.run(hypothesis, facts)
}

/// Controller-free baseline: no step scoring (every module-firing step
/// expands) and the state score is the mean judge similarity between the
/// target and each fact.
pub fn heuristic_reason(
    hypothesis: &Fact,
    facts: &[Fact],
    config: &SearchConfig,
    modules: &ModuleSet,
    judge: &dyn SimilarityJudge,
) -> Result<(SearchResult, SearchTrace), SearchError> {
    let engine = Engine {
        config,
        modules,
        judge,
        policy: Policy::Heuristic,
    };
    engine.run(hypothesis, facts)
}

/// A ranked one-step candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub premises: (FactId, FactId),
    pub score: f64,
}

/// Rank candidate one-step trees: facts below `theta` are filtered and any
/// candidate touching them scores 0; the rest are ordered by softmax step
/// score. Ties break by premise ids.
pub fn rank_one_step_candidates(
    hypothesis: &Fact,
    facts: &[Fact],
    candidates: &[(FactId, FactId)],
    config: &SearchConfig,
    backend: &dyn ScorerBackend,
) -> Vec<RankedCandidate> {
    let kept: Vec<Fact> = facts
        .iter()
        .filter(|f| backend.fact_score(hypothesis, f) >= config.theta)
        .cloned()
        .collect();
    let kept_ids: BTreeSet<FactId> = kept.iter().map(|f| f.id().clone()).collect();
    let state = ReasoningState::new(hypothesis.clone(), kept);

    let surviving: Vec<usize> = candidates
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| kept_ids.contains(a) && kept_ids.contains(b))
        .map(|(i, _)| i)
        .collect();
    let raws: Vec<f64> = surviving
        .iter()
        .map(|&i| {
            let (a, b) = &candidates[i];
            backend.raw_step_score(&state, &StepKind::deductive(a.clone(), b.clone()))
        })
        .collect();
    let probs = crate::controller::softmax(&raws);

    let mut out: Vec<RankedCandidate> = Vec::with_capacity(candidates.len());
    for (slot, &i) in surviving.iter().enumerate() {
        out.push(RankedCandidate {
            premises: candidates[i].clone(),
            score: probs[slot],
        });
    }
    for (i, (a, b)) in candidates.iter().enumerate() {
        if !surviving.contains(&i) {
            out.push(RankedCandidate {
                premises: (a.clone(), b.clone()),
                score: 0.0,
            });
        }
    }
    out.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then_with(|| x.premises.cmp(&y.premises))
    });
    out
}

enum Policy<'a> {
    Controller {
        backend: &'a dyn ScorerBackend,
        controller: &'a ControllerConfig,
    },
    Heuristic,
}

struct Engine<'a> {
    config: &'a SearchConfig,
    modules: &'a ModuleSet,
    judge: &'a dyn SimilarityJudge,
    policy: Policy<'a>,
}

/// A state plus the bookkeeping the beam needs.
#[derive(Clone)]
struct Scored {
    state: ReasoningState,
    score: f64,
    /// Minimum raw step score along the history; breaks score ties in favor
    /// of uniformly confident derivations.
    min_raw: f64,
    order: usize,
}

impl<'a> Engine<'a> {
    fn fact_score(&self, target: &Fact, fact: &Fact) -> f64 {
        match &self.policy {
            Policy::Controller { backend, .. } => backend.fact_score(target, fact),
            Policy::Heuristic => self.judge.similarity(target, fact).clamp(0.0, 1.0),
        }
    }

    fn state_score(&self, state: &mut ReasoningState) -> f64 {
        match &self.policy {
            Policy::Controller {
                backend,
                controller,
            } => {
                let scores = score_state_detail(state, *backend, controller);
                let value = scores.state_score;
                state.scores = Some(scores);
                value
            }
            Policy::Heuristic => {
                let mut fact_scores = BTreeMap::new();
                let mut sum = 0.0;
                for f in state.facts() {
                    let s = self.judge.similarity(state.target(), f).clamp(0.0, 1.0);
                    fact_scores.insert(f.id().clone(), s);
                    sum += s;
                }
                let value = if state.facts().is_empty() {
                    0.0
                } else {
                    sum / state.facts().len() as f64
                };
                state.scores = Some(crate::state::StateScores {
                    fact_scores,
                    state_score: value,
                });
                value
            }
        }
    }

    /// Candidates to expand for one state, in execution order.
    fn select(&self, state: &ReasoningState) -> Result<Vec<StepCandidate>, ScoreError> {
        match &self.policy {
            Policy::Controller { backend, .. } => {
                let candidates = score_steps(state, *backend)?;
                let take = ((self.config.tau * candidates.len() as f64).ceil() as usize).max(1);
                let mut out = Vec::new();
                let mut abductive_taken = false;
                for cand in candidates.into_iter().take(take) {
                    if matches!(cand.kind, StepKind::AbductivePair(_)) {
                        // One target replacement per state per iteration.
                        if abductive_taken {
                            continue;
                        }
                        abductive_taken = true;
                    }
                    out.push(cand);
                }
                Ok(out)
            }
            Policy::Heuristic => {
                let kinds = enumerate_steps(state);
                if kinds.is_empty() {
                    return Err(ScoreError::EmptyCandidateSet);
                }
                Ok(kinds
                    .into_iter()
                    .map(|kind| StepCandidate {
                        kind,
                        score: 0.0,
                        raw: 0.0,
                    })
                    .collect())
            }
        }
    }

    fn proved(&self, state: &ReasoningState) -> bool {
        state.facts().iter().any(|f| {
            self.judge.similarity(f, state.target()) >= self.config.prove_threshold
        })
    }

    fn accepting(
        &self,
        scored: &Scored,
        original_ids: &BTreeSet<FactId>,
        hypothesis: &Fact,
        initial_facts: &[Fact],
    ) -> bool {
        if !self.proved(&scored.state) {
            return false;
        }
        if self.config.mode != SearchMode::Task1 {
            return true;
        }
        // Task1: iterate until all facts are used, i.e. the assembled tree
        // must draw on every provided fact.
        match assemble_tree(&scored.state, self.judge, hypothesis, initial_facts) {
            Some(tree) => tree.leaf_ids() == *original_ids,
            None => false,
        }
    }

    fn run(
        &self,
        hypothesis: &Fact,
        facts: &[Fact],
    ) -> Result<(SearchResult, SearchTrace), SearchError> {
        let mut sorted_facts = facts.to_vec();
        sorted_facts.sort_by(|a, b| a.id().cmp(b.id()));
        let initial = ReasoningState::new(hypothesis.clone(), sorted_facts);

        let mut trace = SearchTrace::default();
        let outcome = {
            struct FilterView<'b>(&'b Engine<'b>);
            impl ScorerBackend for FilterView<'_> {
                fn fact_score(&self, target: &Fact, fact: &Fact) -> f64 {
                    self.0.fact_score(target, fact)
                }
                fn raw_step_score(&self, _: &ReasoningState, _: &StepKind) -> f64 {
                    0.0
                }
                fn cls_score(&self, _: &ReasoningState) -> f64 {
                    0.0
                }
            }
            filter_distractors_detailed(&initial, &FilterView(self), self.config.theta)
        };
        trace.removed_distractors = outcome.removed.iter().map(|id| id.to_string()).collect();
        trace.degenerate_filter_guard = outcome.degenerate_guard;

        let initial_facts: Vec<Fact> = outcome.state.facts().to_vec();
        let original_ids: BTreeSet<FactId> = outcome.state.fact_ids();

        let mut order = 0usize;
        let mut root = Scored {
            state: outcome.state,
            score: 0.0,
            min_raw: f64::INFINITY,
            order,
        };
        root.score = self.state_score(&mut root.state);

        let mut beam = vec![root.clone()];
        let mut visited = vec![root];
        let mut iterations = 0usize;

        // Task1 iterates until all facts are used; a tree over n facts needs
        // at most n - 1 steps, so the depth budget grows to cover that.
        let max_depth = if self.config.mode == SearchMode::Task1 {
            self.config.max_depth.max(initial_facts.len())
        } else {
            self.config.max_depth
        };

        for depth in 1..=max_depth {
            let mut pool: Vec<Scored> = Vec::new();
            let mut dedup: BTreeMap<String, usize> = BTreeMap::new();
            let mut chosen = Vec::new();
            let mut expansions = 0usize;

            for parent in &beam {
                let selected = match self.select(&parent.state) {
                    Ok(s) => s,
                    Err(ScoreError::EmptyCandidateSet) => {
                        if depth == 1 && beam.len() == 1 {
                            return Err(SearchError::NoCandidates);
                        }
                        continue;
                    }
                };
                for cand in selected {
                    chosen.push(ChosenStep {
                        parent: parent.order,
                        step: cand.kind.to_string(),
                        raw: cand.raw,
                        probability: cand.score,
                    });
                    for new_state in self.execute(&parent.state, &cand)? {
                        expansions += 1;
                        order += 1;
                        let mut scored = Scored {
                            min_raw: new_state
                                .history
                                .iter()
                                .map(|h| h.raw_score)
                                .fold(f64::INFINITY, f64::min),
                            state: new_state,
                            score: 0.0,
                            order,
                        };
                        scored.score = self.state_score(&mut scored.state);
                        let key = scored.state.dedup_key();
                        match dedup.get(&key) {
                            Some(&idx) if pool[idx].score >= scored.score => {}
                            Some(&idx) => pool[idx] = scored,
                            None => {
                                dedup.insert(key, pool.len());
                                pool.push(scored);
                            }
                        }
                    }
                }
            }

            if pool.is_empty() {
                break;
            }
            iterations = depth;
            pool.sort_by(|a, b| {
                b.score
                    .total_cmp(&a.score)
                    .then_with(|| b.min_raw.total_cmp(&a.min_raw))
                    .then_with(|| a.order.cmp(&b.order))
            });
            pool.truncate(self.config.beam_size);
            beam = pool;
            visited.extend(beam.iter().cloned());

            trace.iterations.push(IterationTrace {
                index: depth,
                expansions,
                chosen,
                beam: beam
                    .iter()
                    .map(|s| BeamEntry {
                        order: s.order,
                        target: s.state.target().id().to_string(),
                        target_text: s.state.target().text().to_string(),
                        facts: s.state.fact_ids().iter().map(|i| i.to_string()).collect(),
                        score: s.score,
                    })
                    .collect(),
            });

            if beam
                .iter()
                .any(|s| self.accepting(s, &original_ids, hypothesis, &initial_facts))
            {
                break;
            }
        }

        // Align every visited state's target to its most similar fact and
        // keep the best valid tree.
        let mut best: Option<(Scored, EntailmentTree)> = None;
        for scored in &visited {
            let Some(tree) = assemble_tree(&scored.state, self.judge, hypothesis, &initial_facts)
            else {
                continue;
            };
            if !tree.validate(&original_ids).is_empty() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((cur, _)) => {
                    scored.score > cur.score
                        || (scored.score == cur.score && scored.min_raw > cur.min_raw)
                }
            };
            if better {
                best = Some((scored.clone(), tree));
            }
        }
        let (winner, best_tree) = best.ok_or(SearchError::NoValidTree)?;
        let proved = self.proved(&winner.state);
        Ok((
            SearchResult {
                best_tree,
                all_states: visited.into_iter().map(|s| s.state).collect(),
                proved,
                iterations,
            },
            trace,
        ))
    }

    /// Execute one candidate with every module of the matching direction.
    fn execute(
        &self,
        state: &ReasoningState,
        cand: &StepCandidate,
    ) -> Result<Vec<ReasoningState>, ModuleError> {
        let mut out = Vec::new();
        match &cand.kind {
            StepKind::DeductivePair(a, b) => {
                let (Some(fa), Some(fb)) = (state.fact(a), state.fact(b)) else {
                    return Ok(out);
                };
                for rtype in self.modules.rtypes(Direction::Deductive) {
                    let fresh = FactId::intermediate(state.next_int_index());
                    let request = ModuleRequest {
                        direction: Direction::Deductive,
                        rtype,
                        inputs: [fa.clone(), fb.clone()],
                        fresh_id: fresh.clone(),
                    };
                    let Some(resp) = self.modules.infer(&request)? else {
                        continue;
                    };
                    if is_trivial_echo(&resp.output, &request.inputs) {
                        continue;
                    }
                    let step = Step {
                        direction: Direction::Deductive,
                        rtype,
                        inputs: vec![a.clone(), b.clone()],
                        output: fresh,
                    };
                    out.push(state.apply_deduction(step, resp.output, cand.raw));
                }
            }
            StepKind::AbductivePair(k) => {
                let Some(fk) = state.fact(k) else {
                    return Ok(out);
                };
                for rtype in self.modules.rtypes(Direction::Abductive) {
                    let fresh = FactId::intermediate(state.next_int_index());
                    let request = ModuleRequest {
                        direction: Direction::Abductive,
                        rtype,
                        inputs: [state.target().clone(), fk.clone()],
                        fresh_id: fresh.clone(),
                    };
                    let Some(resp) = self.modules.infer(&request)? else {
                        continue;
                    };
                    if is_trivial_echo(&resp.output, &request.inputs) {
                        continue;
                    }
                    let step = Step {
                        direction: Direction::Abductive,
                        rtype,
                        inputs: vec![state.target().id().clone(), k.clone()],
                        output: fresh,
                    };
                    out.push(state.apply_abduction(step, resp.output, cand.raw));
                }
            }
        }
        Ok(out)
    }
}

/// True when a module output trivially repeats either input; such
/// expansions are dropped.
pub fn is_trivial_echo(output: &Fact, inputs: &[Fact; 2]) -> bool {
    let norm = |s: &str| s.trim().to_lowercase();
    let out = norm(output.text());
    inputs.iter().any(|i| norm(i.text()) == out)
        || inputs
            .iter()
            .any(|i| i.sym().is_some() && i.sym() == output.sym())
}

/// Align a terminal state's target to its most similar fact and build the
/// entailment tree rooted at the original hypothesis. Returns None when the
/// state cannot form a tree (no history, or nothing links to the root).
pub fn assemble_tree(
    state: &ReasoningState,
    judge: &dyn SimilarityJudge,
    hypothesis: &Fact,
    initial_facts: &[Fact],
) -> Option<EntailmentTree> {
    if state.history.is_empty() || state.facts().is_empty() {
        return None;
    }

    // Most similar fact; ties by smaller id.
    let most_similar = |candidates: &[&Fact]| -> Option<Fact> {
        let mut best: Option<(&Fact, f64)> = None;
        for f in candidates {
            let sim = judge.similarity(f, state.target());
            let better = match best {
                None => true,
                Some((bf, bs)) => sim > bs || (sim == bs && f.id() < bf.id()),
            };
            if better {
                best = Some((f, sim));
            }
        }
        best.map(|(f, _)| (*f).clone())
    };
    let all: Vec<&Fact> = state.facts().iter().collect();
    let mut aligned = most_similar(&all)?;

    // An original leaf can only stand in for the target below an abductive
    // re-rooting; when the target is still the root, fall back to the most
    // similar derived fact so a partial tree always exists.
    if state.target().id() == hypothesis.id() {
        let derived: std::collections::BTreeSet<&FactId> = state
            .history
            .iter()
            .map(|h| h.fact.id())
            .collect();
        if !derived.contains(aligned.id()) {
            let produced: Vec<&Fact> = state
                .facts()
                .iter()
                .filter(|f| derived.contains(f.id()))
                .collect();
            aligned = most_similar(&produced)?;
        }
    }
    let aligned = &aligned;

    let mut fact_map: BTreeMap<FactId, Fact> = initial_facts
        .iter()
        .map(|f| (f.id().clone(), f.clone()))
        .collect();
    fact_map.insert(hypothesis.id().clone(), hypothesis.clone());

    // Convert history into tree steps.
    let mut steps: Vec<Step> = Vec::new();
    for entry in &state.history {
        fact_map.insert(entry.fact.id().clone(), entry.fact.clone());
        match entry.step.direction {
            Direction::Deductive => steps.push(entry.step.clone()),
            Direction::Abductive => {
                // (old target - consumed -> missing) becomes
                // (missing + consumed -> old target).
                let mut inputs = vec![entry.step.output.clone()];
                inputs.extend(entry.step.inputs.iter().skip(1).cloned());
                steps.push(Step {
                    direction: Direction::Abductive,
                    rtype: entry.step.rtype,
                    inputs,
                    output: entry.step.inputs[0].clone(),
                });
            }
        }
    }

    // Identify the aligned fact with the final target.
    let target_id = state.target().id().clone();
    let produced: BTreeSet<FactId> = steps.iter().map(|s| s.output.clone()).collect();
    if produced.contains(aligned.id()) {
        if aligned.id() != &target_id {
            for step in &mut steps {
                if &step.output == aligned.id() {
                    step.output = target_id.clone();
                }
            }
            let fact = fact_map.get(aligned.id()).cloned()?;
            fact_map.insert(target_id.clone(), fact.with_id(target_id.clone()));
        }
    } else {
        // The aligned fact is an original leaf: it stands in for the target.
        if target_id == *hypothesis.id() {
            return None;
        }
        for step in &mut steps {
            for input in &mut step.inputs {
                if *input == target_id {
                    *input = aligned.id().clone();
                }
            }
        }
    }

    // Keep only steps reachable from the root.
    let producer: BTreeMap<FactId, Step> = steps
        .iter()
        .map(|s| (s.output.clone(), s.clone()))
        .collect();
    let mut kept: Vec<Step> = Vec::new();
    let mut seen: BTreeSet<FactId> = BTreeSet::new();
    let mut stack = vec![hypothesis.id().clone()];
    let mut leaf_ids: BTreeSet<FactId> = BTreeSet::new();
    while let Some(id) = stack.pop() {
        if !seen.insert(id.clone()) {
            continue;
        }
        match producer.get(&id) {
            Some(step) => {
                kept.push(step.clone());
                stack.extend(step.inputs.iter().cloned());
            }
            None => {
                leaf_ids.insert(id.clone());
            }
        }
    }
    if kept.is_empty() {
        return None;
    }
    kept.sort_by(|a, b| a.output.cmp(&b.output));

    let leaves: Vec<Fact> = leaf_ids
        .iter()
        .map(|id| fact_map.get(id).cloned())
        .collect::<Option<Vec<_>>>()?;
    let intermediates: Vec<Fact> = kept
        .iter()
        .filter(|s| &s.output != hypothesis.id())
        .map(|s| fact_map.get(&s.output).cloned().map(|f| f.with_id(s.output.clone())))
        .collect::<Option<Vec<_>>>()?;

    Some(EntailmentTree::new(
        hypothesis.clone(),
        leaves,
        intermediates,
        kept,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::lexical::LexicalBackend;
    use crate::judge::SymbolicJudge;
    use crate::symbolic::SymbolicFact;

    fn one_step_problem() -> (Fact, Vec<Fact>) {
        let isa = Fact::symbolic(FactId::leaf(1), SymbolicFact::isa("x", "y"));
        let base = Fact::symbolic(FactId::leaf(2), SymbolicFact::atom("p", &["y", "c"]));
        let hyp = Fact::symbolic(FactId::hypothesis(), SymbolicFact::atom("p", &["x", "c"]));
        (hyp, vec![isa, base])
    }

    #[test]
    fn one_step_instance_is_recovered() {
        let (hyp, facts) = one_step_problem();
        let config = SearchConfig {
            mode: SearchMode::Task1,
            ..SearchConfig::default()
        };
        let backend = LexicalBackend::new(SymbolicJudge);
        let (result, _) = reason(
            &hyp,
            &facts,
            &config,
            &ModuleSet::symbolic(),
            &backend,
            &SymbolicJudge,
        )
        .unwrap();
        assert!(result.proved);
        assert_eq!(result.iterations, 1);
        assert_eq!(result.best_tree.steps().len(), 1);
        assert_eq!(
            result.best_tree.leaf_ids(),
            [FactId::leaf(1), FactId::leaf(2)].into()
        );
    }

    #[test]
    fn lambda_flows_into_state_scoring() {
        // A two-step chain: after one iteration the beam state holds facts
        // with different target similarities, so its score under lambda 1
        // (mean of fact scores) differs from lambda 0 (max via cls).
        let a0 = SymbolicFact::atom("p", &["x"]);
        let a1 = SymbolicFact::atom("q", &["x"]);
        let top = SymbolicFact::atom("r", &["x", "c"]);
        let facts = vec![
            Fact::symbolic(FactId::leaf(1), a0.clone()),
            Fact::symbolic(FactId::leaf(2), SymbolicFact::implies(a0.clone(), a1.clone())),
            Fact::symbolic(FactId::leaf(3), SymbolicFact::implies(a1, top.clone())),
        ];
        let hyp = Fact::symbolic(FactId::hypothesis(), top);
        let backend = LexicalBackend::new(SymbolicJudge);
        let first_beam_score = |lambda: f64| {
            let config = SearchConfig {
                mode: SearchMode::Task1,
                controller: crate::controller::ControllerConfig {
                    lambda,
                    ..Default::default()
                },
                ..SearchConfig::default()
            };
            let (result, trace) = reason(
                &hyp,
                &facts,
                &config,
                &ModuleSet::symbolic(),
                &backend,
                &SymbolicJudge,
            )
            .unwrap();
            assert!(result.proved);
            trace.iterations[0].beam[0].score
        };
        assert!(first_beam_score(1.0) != first_beam_score(0.0));
    }

    #[test]
    fn heuristic_matches_on_single_candidate() {
        let (hyp, facts) = one_step_problem();
        let config = SearchConfig {
            mode: SearchMode::Task1,
            ..SearchConfig::default()
        };
        let (result, _) = heuristic_reason(
            &hyp,
            &facts,
            &config,
            &ModuleSet::symbolic(),
            &SymbolicJudge,
        )
        .unwrap();
        assert!(result.proved);
        assert_eq!(result.best_tree.steps().len(), 1);
    }

    #[test]
    fn zero_theta_filters_nothing() {
        let (hyp, facts) = one_step_problem();
        let state = ReasoningState::new(hyp, facts);
        let backend = LexicalBackend::new(SymbolicJudge);
        let filtered = filter_distractors(&state, &backend, 0.0);
        assert_eq!(filtered.facts().len(), 2);
    }

    #[test]
    fn impossible_theta_triggers_the_degenerate_guard() {
        let (hyp, facts) = one_step_problem();
        let state = ReasoningState::new(hyp, facts);
        let backend = LexicalBackend::new(SymbolicJudge);
        let outcome = filter_distractors_detailed(&state, &backend, 1.1);
        assert!(outcome.degenerate_guard);
        assert_eq!(outcome.state.facts().len(), 2);
    }

    #[test]
    fn disjoint_facts_yield_no_candidates() {
        let hyp = Fact::symbolic(FactId::hypothesis(), SymbolicFact::atom("p", &["x"]));
        let facts = vec![
            Fact::symbolic(FactId::leaf(1), SymbolicFact::atom("q", &["u"])),
            Fact::symbolic(FactId::leaf(2), SymbolicFact::atom("r", &["v"])),
        ];
        let config = SearchConfig {
            theta: 0.0,
            ..SearchConfig::default()
        };
        let backend = LexicalBackend::new(SymbolicJudge);
        let err = reason(
            &hyp,
            &facts,
            &config,
            &ModuleSet::symbolic(),
            &backend,
            &SymbolicJudge,
        )
        .unwrap_err();
        assert!(matches!(err, SearchError::NoCandidates));
    }

    /// A judge that sees nothing as similar: the search must still terminate
    /// at the depth bound and fail gracefully.
    struct ZeroJudge;

    impl crate::judge::SimilarityJudge for ZeroJudge {
        fn similarity(&self, _a: &Fact, _b: &Fact) -> f64 {
            0.0
        }
    }

    #[test]
    fn heuristic_with_a_zero_judge_terminates_by_depth() {
        let (hyp, facts) = one_step_problem();
        let config = SearchConfig {
            mode: SearchMode::Task2,
            theta: 0.0,
            max_depth: 3,
            ..SearchConfig::default()
        };
        let outcome = heuristic_reason(&hyp, &facts, &config, &ModuleSet::symbolic(), &ZeroJudge);
        match outcome {
            Ok((result, _)) => {
                assert!(!result.proved);
                assert!(result.iterations <= 3);
            }
            Err(SearchError::NoValidTree) => {}
            Err(other) => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn single_valid_candidate_ranks_first() {
        let (hyp, facts) = one_step_problem();
        let backend = LexicalBackend::new(SymbolicJudge);
        let ranked = rank_one_step_candidates(
            &hyp,
            &facts,
            &[(FactId::leaf(1), FactId::leaf(2))],
            &SearchConfig::default(),
            &backend,
        );
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].premises, (FactId::leaf(1), FactId::leaf(2)));
    }

    #[test]
    fn filtered_candidates_rank_last_with_zero_score() {
        let (hyp, mut facts) = one_step_problem();
        facts.push(Fact::symbolic(
            FactId::leaf(3),
            SymbolicFact::atom("zz", &["qq"]),
        ));
        let backend = LexicalBackend::new(SymbolicJudge);
        let ranked = rank_one_step_candidates(
            &hyp,
            &facts,
            &[
                (FactId::leaf(1), FactId::leaf(3)),
                (FactId::leaf(1), FactId::leaf(2)),
            ],
            &SearchConfig::default(),
            &backend,
        );
        assert_eq!(ranked[0].premises, (FactId::leaf(1), FactId::leaf(2)));
        assert_eq!(ranked[1].score, 0.0);
    }
}
