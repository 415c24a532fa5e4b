//! Positive/negative training-state construction.
//!
//! Gold trees decompose into intermediate states; each gold step is re-run
//! through the modules and the regenerated conclusion (or abduced premise)
//! replaces the original in the corresponding state. The judge decides which
//! side of the positive/negative split the disturbed state lands on.

use crate::entailment::{ModuleError, ModuleRequest, ModuleSet};
use crate::fact::{Fact, FactId, Role};
use crate::judge::SimilarityJudge;
use crate::state::{decompose_to_states, DecomposeError, ReasoningState};
use crate::tree::{Direction, EntailmentTree};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// Training states for one gold tree.
///
/// Emits the untouched initial state (always positive), one substituted
/// forward state per attempted 2-premise deductive gold step, and one
/// substituted abductive state per intermediate premise. A regenerated fact
/// is judged against its gold counterpart: above `threshold` the state is
/// positive, otherwise negative. Steps whose module does not apply are
/// skipped; a missing module for a step's reasoning type is an error.
pub fn make_training_states(
    gold: &EntailmentTree,
    distractors: &[Fact],
    modules: &ModuleSet,
    judge: &dyn SimilarityJudge,
    threshold: f64,
) -> Result<(Vec<ReasoningState>, Vec<ReasoningState>), TrainingError> {
    let states = decompose_to_states(gold, distractors)?;
    let steps = gold.topological_steps();

    let mut positives = vec![states[0].clone()];
    let mut negatives = Vec::new();

    // Forward disturbances: regenerate each step's conclusion and swap it
    // into the first state that contains it.
    for (k, step) in steps.iter().enumerate() {
        if step.inputs.len() != 2 {
            continue;
        }
        let state = &states[k + 1];
        // The produced fact is the one the previous state lacks.
        let prev_ids = states[k].fact_ids();
        let produced_id = state
            .facts()
            .iter()
            .map(Fact::id)
            .find(|id| !prev_ids.contains(id))
            .expect("each forward state adds its step output")
            .clone();
        let gold_output = gold
            .fact(&step.output)
            .expect("validated tree has step outputs");
        let inputs = [
            gold.fact(&step.inputs[0]).expect("tree fact").clone(),
            gold.fact(&step.inputs[1]).expect("tree fact").clone(),
        ];
        let request = ModuleRequest {
            direction: Direction::Deductive,
            rtype: step.rtype,
            inputs,
            fresh_id: produced_id.clone(),
        };
        let Some(response) = modules.infer(&request)? else {
            continue;
        };
        let substituted = swap_fact(state, &produced_id, response.output);
        if judge.similarity(&substituted_fact(&substituted, &produced_id), gold_output) > threshold
        {
            positives.push(substituted);
        } else {
            negatives.push(substituted);
        }
    }

    // Backward disturbances: abduce each intermediate premise from its step's
    // conclusion and the sibling premise, and swap it in as the target of the
    // matching abductive state.
    for step in &steps {
        if step.inputs.len() != 2 {
            continue;
        }
        for (idx, premise_id) in step.inputs.iter().enumerate() {
            if premise_id.role() != Role::Intermediate {
                continue;
            }
            let sibling_id = &step.inputs[1 - idx];
            let conclusion = gold.fact(&step.output).expect("tree fact").clone();
            let sibling = gold.fact(sibling_id).expect("tree fact").clone();
            let gold_premise = gold.fact(premise_id).expect("tree fact");
            let request = ModuleRequest {
                direction: Direction::Abductive,
                rtype: step.rtype,
                inputs: [conclusion, sibling],
                fresh_id: premise_id.clone(),
            };
            let Some(response) = modules.infer(&request)? else {
                continue;
            };
            let Some(base) = states
                .iter()
                .find(|s| s.target().id() == premise_id)
            else {
                continue;
            };
            let mut disturbed = base.clone();
            disturbed.replace_target(response.output.with_id(premise_id.clone()));
            if judge.similarity(disturbed.target(), gold_premise) > threshold {
                positives.push(disturbed);
            } else {
                negatives.push(disturbed);
            }
        }
    }

    Ok((positives, negatives))
}

fn swap_fact(state: &ReasoningState, id: &FactId, replacement: Fact) -> ReasoningState {
    let facts = state
        .facts()
        .iter()
        .map(|f| {
            if f.id() == id {
                replacement.with_id(id.clone())
            } else {
                f.clone()
            }
        })
        .collect();
    let mut out = ReasoningState::new(state.target().clone(), facts);
    out.history = state.history.clone();
    out
}

fn substituted_fact(state: &ReasoningState, id: &FactId) -> Fact {
    state
        .fact(id)
        .cloned()
        .unwrap_or_else(|| state.target().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entailment::{EntailmentModule, ModuleResponse};
    use crate::judge::SymbolicJudge;
    use crate::symbolic::SymbolicFact;
    use crate::tree::{ReasoningType, Step};
    use std::sync::Arc;

    /// sent1 (isa) + sent2 (atom) -> int1; int1 + sent3 (implies) -> hypothesis.
    fn gold() -> EntailmentTree {
        let isa = SymbolicFact::isa("x", "y");
        let base = SymbolicFact::atom("p", &["y", "c"]);
        let mid = SymbolicFact::atom("p", &["x", "c"]);
        let top = SymbolicFact::atom("q", &["x", "c"]);
        let rule = SymbolicFact::implies(mid.clone(), top.clone());
        EntailmentTree::new(
            Fact::symbolic(FactId::hypothesis(), top),
            vec![
                Fact::symbolic(FactId::leaf(1), isa),
                Fact::symbolic(FactId::leaf(2), base),
                Fact::symbolic(FactId::leaf(3), rule),
            ],
            vec![Fact::symbolic(FactId::intermediate(1), mid)],
            vec![
                Step {
                    direction: Direction::Deductive,
                    rtype: ReasoningType::Substitution,
                    inputs: vec![FactId::leaf(1), FactId::leaf(2)],
                    output: FactId::intermediate(1),
                },
                Step {
                    direction: Direction::Deductive,
                    rtype: ReasoningType::IfThen,
                    inputs: vec![FactId::intermediate(1), FactId::leaf(3)],
                    output: FactId::hypothesis(),
                },
            ],
        )
    }

    #[test]
    fn oracle_modules_with_exact_judge_make_only_positives() {
        let tree = gold();
        let (pos, neg) =
            make_training_states(&tree, &[], &ModuleSet::symbolic(), &SymbolicJudge, 0.999)
                .unwrap();
        assert!(neg.is_empty());
        // initial state + 2 deductive attempts + 1 abductive attempt (int1)
        assert_eq!(pos.len(), 4);
        // positives mirror the decomposition with regenerated facts
        let decomposed = decompose_to_states(&tree, &[]).unwrap();
        assert_eq!(pos.len(), decomposed.len());
    }

    /// A module that parrots its first input.
    struct Parrot;

    impl EntailmentModule for Parrot {
        fn infer(
            &self,
            request: &ModuleRequest,
        ) -> Result<Option<ModuleResponse>, ModuleError> {
            Ok(Some(ModuleResponse {
                output: request.inputs[0].with_id(request.fresh_id.clone()),
                confidence: 1.0,
            }))
        }
    }

    #[test]
    fn corrupting_module_lands_everything_in_negatives() {
        let tree = gold();
        let modules = ModuleSet::uniform(Arc::new(Parrot));
        let (pos, neg) =
            make_training_states(&tree, &[], &modules, &SymbolicJudge, 0.999).unwrap();
        // Only the untouched initial state stays positive.
        assert_eq!(pos.len(), 1);
        assert_eq!(neg.len(), 3);
    }

    #[test]
    fn counts_match_attempts() {
        let tree = gold();
        let (pos, neg) =
            make_training_states(&tree, &[], &ModuleSet::symbolic(), &SymbolicJudge, 0.999)
                .unwrap();
        let deductive_attempts = 2;
        let abductive_attempts = 1;
        assert_eq!(pos.len() + neg.len(), 1 + deductive_attempts + abductive_attempts);
    }
}
