//! The linearized proof text format.
//!
//! One step per segment: `sent2 & sent5 -> int1: some conclusion text`, with
//! `;` separating steps and the final step concluding in `hypothesis`. This
//! matches the format of published entailment-tree release files so that data
//! ingests unchanged.

use crate::fact::{Fact, FactId, Role};
use crate::tree::{EntailmentTree, Step};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("malformed step '{step}'")]
    MalformedStep { step: String },
    #[error("unknown id '{id}'")]
    UnknownId { id: String },
    #[error("proof steps form a cycle")]
    CyclicProof,
    #[error("proof does not converge to a single hypothesis root")]
    MultipleRoots,
    #[error("conclusion '{id}' is produced by more than one step")]
    DuplicateOutput { id: String },
}

/// Parse a linearized proof against the problem's sentence map and
/// hypothesis text, returning a validated tree.
///
/// Intermediate node texts are taken from the proof string; steps come out
/// untyped (`Unknown`) and deductive.
pub fn parse_linearized_proof(
    proof_text: &str,
    sentences: &BTreeMap<FactId, String>,
    hypothesis_text: &str,
) -> Result<EntailmentTree, ParseError> {
    let mut steps: Vec<Step> = Vec::new();
    let mut int_texts: BTreeMap<FactId, String> = BTreeMap::new();

    for raw in proof_text.split(';') {
        let chunk = raw.trim();
        if chunk.is_empty() {
            continue;
        }
        let parts: Vec<&str> = chunk.split("->").collect();
        if parts.len() != 2 {
            return Err(ParseError::MalformedStep {
                step: chunk.to_string(),
            });
        }
        let inputs: Vec<FactId> = parts[0]
            .split('&')
            .map(|p| FactId::new(p.trim()))
            .collect();
        if inputs.len() < 2 || inputs.iter().any(|i| i.as_str().is_empty()) {
            return Err(ParseError::MalformedStep {
                step: chunk.to_string(),
            });
        }
        let mut seen = BTreeSet::new();
        if !inputs.iter().all(|i| seen.insert(i.clone())) {
            return Err(ParseError::MalformedStep {
                step: chunk.to_string(),
            });
        }

        let conclusion = parts[1].trim();
        let output = if conclusion == "hypothesis" {
            FactId::hypothesis()
        } else {
            let (id_part, text) = conclusion
                .split_once(':')
                .ok_or_else(|| ParseError::MalformedStep {
                    step: chunk.to_string(),
                })?;
            let id = FactId::new(id_part.trim());
            if id.role() != Role::Intermediate {
                return Err(ParseError::MalformedStep {
                    step: chunk.to_string(),
                });
            }
            int_texts.insert(id.clone(), text.trim().to_string());
            id
        };
        if inputs.contains(&output) {
            return Err(ParseError::CyclicProof);
        }
        steps.push(Step::deductive(inputs, output));
    }

    if steps.is_empty() {
        return Err(ParseError::MalformedStep {
            step: proof_text.to_string(),
        });
    }

    // Exactly one step may produce each conclusion.
    let mut outputs: BTreeSet<FactId> = BTreeSet::new();
    for step in &steps {
        if !outputs.insert(step.output.clone()) {
            return Err(ParseError::DuplicateOutput {
                id: step.output.to_string(),
            });
        }
    }

    // Resolve referenced ids: sentence ids must exist in the map,
    // intermediate ids must be produced by some step.
    let mut used_sents: BTreeSet<FactId> = BTreeSet::new();
    for step in &steps {
        for id in &step.inputs {
            match id.role() {
                Role::Leaf => {
                    if !sentences.contains_key(id) {
                        return Err(ParseError::UnknownId { id: id.to_string() });
                    }
                    used_sents.insert(id.clone());
                }
                Role::Intermediate => {
                    if !outputs.contains(id) {
                        return Err(ParseError::UnknownId { id: id.to_string() });
                    }
                }
                _ => return Err(ParseError::UnknownId { id: id.to_string() }),
            }
        }
    }

    // Single sink, and it must be the hypothesis.
    let consumed: BTreeSet<FactId> = steps.iter().flat_map(|s| s.inputs.iter().cloned()).collect();
    let sinks: Vec<&FactId> = outputs.iter().filter(|o| !consumed.contains(o)).collect();
    if sinks.len() != 1 || *sinks[0] != FactId::hypothesis() {
        return Err(ParseError::MultipleRoots);
    }

    let leaves: Vec<Fact> = used_sents
        .iter()
        .map(|id| Fact::new(id.clone(), sentences[id].clone(), None))
        .collect();
    let intermediates: Vec<Fact> = int_texts
        .iter()
        .map(|(id, text)| Fact::new(id.clone(), text.clone(), None))
        .collect();
    let hypothesis = Fact::new(FactId::hypothesis(), hypothesis_text, None);
    let tree = EntailmentTree::new(hypothesis, leaves, intermediates, steps);

    if tree.topological_steps().len() != tree.steps().len() {
        return Err(ParseError::CyclicProof);
    }
    Ok(tree)
}

/// Serialize a valid tree back to the linearized format. Steps are emitted
/// in topological order with ties broken by smallest output id, premises in
/// id order, so equal trees serialize identically.
pub fn serialize_tree(tree: &EntailmentTree) -> String {
    let mut parts = Vec::new();
    for step in tree.topological_steps() {
        let mut inputs = step.inputs.clone();
        inputs.sort();
        let lhs = inputs
            .iter()
            .map(|i| i.as_str())
            .collect::<Vec<_>>()
            .join(" & ");
        let rhs = if &step.output == tree.root_id() {
            "hypothesis".to_string()
        } else {
            let text = tree
                .fact(&step.output)
                .map(|f| f.text().to_string())
                .unwrap_or_default();
            format!("{}: {}", step.output, text)
        };
        parts.push(format!("{} -> {}", lhs, rhs));
    }
    format!("{};", parts.join("; "))
}
