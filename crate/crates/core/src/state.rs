//! Reasoning states and gold-tree decomposition.
//!
//! A state is a sub-goal "prove `target` from `facts`" plus the step history
//! that produced it. Gold trees decompose into the states visited by an ideal
//! forward pass, plus one backward (abductive) variant per intermediate.

use crate::fact::{Fact, FactId};
use crate::tree::{Direction, EntailmentTree, Step, Violation};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// One executed step together with the fact it generated and the raw step
/// score it was selected at (1.0 for gold decompositions).
#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub step: Step,
    pub fact: Fact,
    pub raw_score: f64,
}

/// Scores attached to a state after controller evaluation.
#[derive(Debug, Clone)]
pub struct StateScores {
    pub fact_scores: BTreeMap<FactId, f64>,
    pub state_score: f64,
}

/// "Prove `target` from `facts`", with history and optional scores.
#[derive(Debug, Clone)]
pub struct ReasoningState {
    target: Fact,
    facts: Vec<Fact>,
    pub history: Vec<HistoryEntry>,
    pub scores: Option<StateScores>,
}

impl ReasoningState {
    /// A fresh state. Facts are deduplicated by id (first occurrence wins)
    /// and any fact carrying the target's id is dropped.
    pub fn new(target: Fact, facts: Vec<Fact>) -> Self {
        let mut seen = BTreeSet::new();
        let facts = facts
            .into_iter()
            .filter(|f| f.id() != target.id() && seen.insert(f.id().clone()))
            .collect();
        ReasoningState {
            target,
            facts,
            history: Vec::new(),
            scores: None,
        }
    }

    pub fn target(&self) -> &Fact {
        &self.target
    }

    /// Swap the target in place (training-state disturbance).
    pub fn replace_target(&mut self, target: Fact) {
        self.facts.retain(|f| f.id() != target.id());
        self.target = target;
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact(&self, id: &FactId) -> Option<&Fact> {
        self.facts.iter().find(|f| f.id() == id)
    }

    pub fn fact_ids(&self) -> BTreeSet<FactId> {
        self.facts.iter().map(|f| f.id().clone()).collect()
    }

    /// Next free intermediate index in this state's problem: one past the
    /// largest `int<k>` seen across facts, history, and the target.
    pub fn next_int_index(&self) -> usize {
        let int_index = |f: &Fact| match f.id().role() {
            crate::fact::Role::Intermediate => f.id().index().unwrap_or(0),
            _ => 0,
        };
        self.facts
            .iter()
            .map(int_index)
            .chain(self.history.iter().map(|h| int_index(&h.fact)))
            .chain(std::iter::once(int_index(&self.target)))
            .max()
            .unwrap_or(0)
            + 1
    }

    /// Deterministic identity for duplicate-state suppression: the target
    /// plus the fact multiset, compared on structured forms where available.
    pub fn dedup_key(&self) -> String {
        let fact_key = |f: &Fact| match f.sym() {
            Some(s) => s.canonical_key(),
            None => f.text().to_string(),
        };
        let mut keys: Vec<String> = self.facts.iter().map(fact_key).collect();
        keys.sort();
        format!("{}|{}", fact_key(&self.target), keys.join(";"))
    }

    /// Execute a step: consume `used`, add `produced`, keep the target.
    pub fn apply_deduction(&self, step: Step, produced: Fact, raw_score: f64) -> ReasoningState {
        let mut facts: Vec<Fact> = self
            .facts
            .iter()
            .filter(|f| !step.inputs.contains(f.id()))
            .cloned()
            .collect();
        facts.push(produced.clone());
        let mut history = self.history.clone();
        history.push(HistoryEntry {
            step,
            fact: produced,
            raw_score,
        });
        ReasoningState {
            target: self.target.clone(),
            facts,
            history,
            scores: None,
        }
    }

    /// Execute an abductive step: consume the known premise and replace the
    /// target with the abduced missing premise.
    pub fn apply_abduction(
        &self,
        step: Step,
        new_target: Fact,
        raw_score: f64,
    ) -> ReasoningState {
        let facts: Vec<Fact> = self
            .facts
            .iter()
            .filter(|f| !step.inputs.contains(f.id()))
            .cloned()
            .collect();
        let mut history = self.history.clone();
        history.push(HistoryEntry {
            step,
            fact: new_target.clone(),
            raw_score,
        });
        ReasoningState {
            target: new_target,
            facts,
            history,
            scores: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("gold tree is invalid: {0:?}")]
    InvalidTree(Vec<Violation>),
}

/// Decompose a gold tree into reasoning states.
///
/// Returns, in order: every state reachable by executing a prefix of the gold
/// steps forward (the initial state first, the fully-proved state last), then
/// one abductive variant per intermediate node, where the target is replaced
/// by that unproved intermediate and the facts used on other branches are
/// removed.
pub fn decompose_to_states(
    gold: &EntailmentTree,
    distractors: &[Fact],
) -> Result<Vec<ReasoningState>, DecomposeError> {
    let mut available: BTreeSet<FactId> = gold.leaf_ids();
    available.extend(distractors.iter().map(|f| f.id().clone()));
    let violations = gold.validate(&available);
    if !violations.is_empty() {
        return Err(DecomposeError::InvalidTree(violations));
    }

    let mut initial_facts: Vec<Fact> = gold.leaves().to_vec();
    initial_facts.extend(distractors.iter().cloned());
    initial_facts.sort_by(|a, b| a.id().cmp(b.id()));

    let mut states = Vec::new();
    let mut current = ReasoningState::new(gold.hypothesis().clone(), initial_facts.clone());
    states.push(current.clone());

    // Forward prefixes, one state per executed step.
    let steps = gold.topological_steps();
    let mut next_int = gold
        .intermediates()
        .iter()
        .filter_map(|f| f.id().index())
        .max()
        .unwrap_or(0)
        + 1;
    for step in &steps {
        let produced = if &step.output == gold.root_id() {
            // The root conclusion enters the fact set under a fresh
            // intermediate id so the proved state keeps target out of facts.
            let id = FactId::intermediate(next_int);
            next_int += 1;
            gold.hypothesis().with_id(id)
        } else {
            gold.fact(&step.output)
                .expect("validated tree has all step outputs")
                .clone()
        };
        current = current.apply_deduction(step.clone(), produced, 1.0);
        states.push(current.clone());
    }

    // One abductive variant per unproved intermediate: walk down from the
    // root, consuming the sibling premises at each level.
    for int_id in gold.nonleaf_ids_topological() {
        if &int_id == gold.root_id() {
            continue;
        }
        let path = path_from_root(gold, &int_id);
        let mut state = ReasoningState::new(gold.hypothesis().clone(), initial_facts.clone());
        for child in &path {
            let parent_step = gold
                .steps()
                .iter()
                .find(|s| s.inputs.contains(child))
                .expect("path nodes are step inputs");
            let mut inputs = vec![state.target().id().clone()];
            inputs.extend(
                parent_step
                    .inputs
                    .iter()
                    .filter(|i| *i != child)
                    .cloned(),
            );
            let step = Step {
                direction: Direction::Abductive,
                rtype: parent_step.rtype,
                inputs,
                output: child.clone(),
            };
            let new_target = gold.fact(child).expect("tree node").clone();
            state = state.apply_abduction(step, new_target, 1.0);
        }
        states.push(state);
    }

    Ok(states)
}

/// Chain of node ids from just below the root down to `node` (inclusive).
fn path_from_root(tree: &EntailmentTree, node: &FactId) -> Vec<FactId> {
    let mut path = vec![node.clone()];
    let mut cur = node.clone();
    while let Some(step) = tree.steps().iter().find(|s| s.inputs.contains(&cur)) {
        cur = step.output.clone();
        if &cur == tree.root_id() {
            break;
        }
        path.push(cur.clone());
    }
    path.reverse();
    path
}
