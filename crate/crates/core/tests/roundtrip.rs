//! Corpus-level properties of the linearized format and gold decomposition.

use entail_core::dataio::synth::{generate_synthetic, GeneratorConfig};
use entail_core::dataio::Task;
use entail_core::fact::FactId;
use entail_core::linear::{parse_linearized_proof, serialize_tree};
use entail_core::state::decompose_to_states;
use entail_core::tree::Step;
use std::collections::{BTreeMap, BTreeSet};

fn corpus(seed: u64, n: usize, task: Task) -> Vec<entail_core::dataio::ProblemInstance> {
    generate_synthetic(&GeneratorConfig {
        seed,
        n_instances: n,
        task,
        ..GeneratorConfig::default()
    })
    .unwrap()
}

#[test]
fn parse_serialize_is_identity_on_a_thousand_trees() {
    for inst in corpus(2024, 1000, Task::Two) {
        let gold = inst.gold.as_ref().unwrap();
        let text = serialize_tree(gold);
        let sentences: BTreeMap<FactId, String> = inst
            .facts
            .iter()
            .map(|f| (f.id().clone(), f.text().to_string()))
            .collect();
        let reparsed =
            parse_linearized_proof(&text, &sentences, inst.hypothesis.text()).unwrap();

        assert_eq!(reparsed.leaf_ids(), gold.leaf_ids());
        for leaf in gold.leaves() {
            assert_eq!(reparsed.fact(leaf.id()).unwrap().text(), leaf.text());
        }
        let step_key = |s: &Step| (s.input_set(), s.output.clone());
        let mut a: Vec<_> = gold.steps().iter().map(step_key).collect();
        let mut b: Vec<_> = reparsed.steps().iter().map(step_key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let ints = |t: &entail_core::EntailmentTree| -> BTreeSet<(FactId, String)> {
            t.intermediates()
                .iter()
                .map(|f| (f.id().clone(), f.text().to_string()))
                .collect()
        };
        assert_eq!(ints(gold), ints(&reparsed));
        // And serialization is a fixpoint.
        assert_eq!(serialize_tree(&reparsed), text);
    }
}

#[test]
fn forward_prefix_state_count_is_steps_plus_one() {
    for inst in corpus(77, 300, Task::Two) {
        let gold = inst.gold.as_ref().unwrap();
        let gold_ids = gold.leaf_ids();
        let distractors: Vec<_> = inst
            .facts
            .iter()
            .filter(|f| !gold_ids.contains(f.id()))
            .cloned()
            .collect();
        let states = decompose_to_states(gold, &distractors).unwrap();
        let forward = states
            .iter()
            .filter(|s| s.target().id() == gold.root_id())
            .count();
        assert_eq!(forward, gold.steps().len() + 1);
        // One abductive variant per intermediate node.
        assert_eq!(
            states.len() - forward,
            gold.intermediates().len(),
        );
        for state in &states {
            assert!(!state.facts().is_empty());
            assert!(state.facts().iter().all(|f| f.id() != state.target().id()));
        }
    }
}

#[test]
fn decomposition_includes_initial_and_proved_states() {
    for inst in corpus(91, 100, Task::One) {
        let gold = inst.gold.as_ref().unwrap();
        let states = decompose_to_states(gold, &[]).unwrap();
        assert_eq!(states[0].fact_ids(), gold.leaf_ids());
        let final_forward = &states[gold.steps().len()];
        assert!(final_forward
            .facts()
            .iter()
            .any(|f| f.sym() == gold.hypothesis().sym()));
    }
}

#[test]
fn cycle_injection_is_rejected() {
    for inst in corpus(5, 100, Task::One) {
        let gold = inst.gold.as_ref().unwrap();
        let mut steps = gold.steps().to_vec();
        // Swap the first step's first input with its output.
        let first = &mut steps[0];
        let swapped_in = first.output.clone();
        let swapped_out = first.inputs[0].clone();
        first.inputs[0] = swapped_in;
        first.output = swapped_out;
        let mutated = entail_core::EntailmentTree::new(
            gold.hypothesis().clone(),
            gold.leaves().to_vec(),
            gold.intermediates().to_vec(),
            steps,
        );
        let available = gold.leaf_ids();
        assert!(!mutated.validate(&available).is_empty());
    }
}
