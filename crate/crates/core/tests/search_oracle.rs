//! Search behavior against the seeded synthetic corpus, where the gold tree
//! is known and uniquely recoverable under the symbolic rules.

use entail_core::controller::lexical::LexicalBackend;
use entail_core::controller::{score_steps, StepKind};
use entail_core::dataio::synth::{generate_synthetic, GeneratorConfig};
use entail_core::dataio::{ProblemInstance, Task};
use entail_core::entailment::ModuleSet;
use entail_core::evaluation::{evaluate_pair, AlignMode};
use entail_core::fact::{Fact, FactId};
use entail_core::judge::SymbolicJudge;
use entail_core::search::{heuristic_reason, reason, SearchConfig, SearchMode, SearchResult};
use entail_core::state::decompose_to_states;
use entail_core::symbolic::SymbolicFact;

fn run(inst: &ProblemInstance, config: &SearchConfig) -> SearchResult {
    let backend = LexicalBackend::new(SymbolicJudge);
    let (result, _) = reason(
        &inst.hypothesis,
        &inst.facts,
        config,
        &ModuleSet::symbolic(),
        &backend,
        &SymbolicJudge,
    )
    .unwrap();
    result
}

fn overall(inst: &ProblemInstance, result: &SearchResult) -> bool {
    evaluate_pair(
        &result.best_tree,
        inst.gold.as_ref().unwrap(),
        &SymbolicJudge,
        0.999,
        AlignMode::Official,
    )
    .overall_allcorrect
}

fn config_for(task: Task) -> SearchConfig {
    SearchConfig {
        mode: match task {
            Task::One => SearchMode::Task1,
            Task::Two => SearchMode::Task2,
            Task::Three => SearchMode::Task3,
        },
        ..SearchConfig::default()
    }
}

#[test]
fn task1_oracle_recovery_sample() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 310,
        n_instances: 120,
        task: Task::One,
        ..GeneratorConfig::default()
    })
    .unwrap();
    for inst in &corpus {
        let result = run(inst, &config_for(Task::One));
        assert!(result.proved, "instance {} not proved", inst.id);
        assert!(overall(inst, &result), "instance {} not exact", inst.id);
        // Structural guarantees on every returned tree.
        let available = inst.facts.iter().map(|f| f.id().clone()).collect();
        assert_eq!(result.best_tree.validate(&available), Vec::new());
        assert!(result.best_tree.steps().iter().all(|s| s.inputs.len() == 2));
    }
}

#[test]
fn task1_two_step_instance_runs_two_iterations() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 9,
        n_instances: 40,
        depth_range: (2, 2),
        weight_conjunction: 0.0,
        task: Task::One,
        ..GeneratorConfig::default()
    })
    .unwrap();
    for inst in &corpus {
        assert_eq!(inst.gold.as_ref().unwrap().steps().len(), 2);
        let result = run(inst, &config_for(Task::One));
        assert!(result.proved);
        assert_eq!(result.iterations, 2);
        // On chain trees the recovered serialization is byte-identical to
        // gold (intermediate numbering follows execution order).
        assert_eq!(
            entail_core::linear::serialize_tree(&result.best_tree),
            entail_core::linear::serialize_tree(inst.gold.as_ref().unwrap()),
        );
    }
}

#[test]
fn task2_disjoint_distractors_are_filtered_and_gold_recovered() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 311,
        n_instances: 60,
        task: Task::Two,
        ..GeneratorConfig::default()
    })
    .unwrap();
    for inst in &corpus {
        let gold_ids = inst.gold.as_ref().unwrap().leaf_ids();
        let backend = LexicalBackend::new(SymbolicJudge);
        let state = entail_core::state::ReasoningState::new(
            inst.hypothesis.clone(),
            inst.facts.clone(),
        );
        let filtered = entail_core::search::filter_distractors(&state, &backend, 0.001);
        // every gold leaf kept, every symbol-disjoint distractor removed
        assert_eq!(filtered.fact_ids(), gold_ids);

        let result = run(inst, &config_for(Task::Two));
        assert!(result.proved);
        assert!(overall(inst, &result));
    }
}

/// On decomposed synthetic states, the controller's top-ranked step is always
/// one of the gold continuations.
#[test]
fn top_scored_step_is_always_gold() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 312,
        n_instances: 150,
        task: Task::One,
        ..GeneratorConfig::default()
    })
    .unwrap();
    let backend = LexicalBackend::new(SymbolicJudge);
    for inst in &corpus {
        let gold = inst.gold.as_ref().unwrap();
        for state in decompose_to_states(gold, &[]).unwrap() {
            let ids = state.fact_ids();
            let remaining_gold: Vec<_> = gold
                .steps()
                .iter()
                .filter(|s| s.inputs.iter().all(|i| ids.contains(i)))
                .collect();
            if remaining_gold.is_empty() {
                continue;
            }
            let top = &score_steps(&state, &backend).unwrap()[0];
            match &top.kind {
                StepKind::DeductivePair(a, b) => {
                    let pair: std::collections::BTreeSet<FactId> =
                        [a.clone(), b.clone()].into();
                    assert!(
                        remaining_gold.iter().any(|s| s.input_set() == pair),
                        "top step {:?} is not gold in {}",
                        top.kind,
                        inst.id
                    );
                }
                StepKind::AbductivePair(_) => {
                    panic!("deductive gold steps outrank abductive candidates")
                }
            }
        }
    }
}

/// A decoy implication whose conclusion resembles the hypothesis makes the
/// greedy (K=1, single-step) search consume the shared premise and dead-end,
/// while the default beam recovers the gold tree.
#[test]
fn beam_search_survives_a_greedy_trap() {
    let a0 = SymbolicFact::atom("belbel", &["baba", "cece"]);
    let a1 = SymbolicFact::atom("corcor", &["baba", "cece"]);
    let top = SymbolicFact::atom("daldal", &["baba", "cece"]);
    let decoy_out = SymbolicFact::atom("daldal", &["baba", "didi"]);
    let facts = vec![
        Fact::symbolic(FactId::leaf(1), a0.clone()),
        Fact::symbolic(FactId::leaf(2), SymbolicFact::implies(a0.clone(), a1.clone())),
        Fact::symbolic(FactId::leaf(3), SymbolicFact::implies(a1, top.clone())),
        Fact::symbolic(FactId::leaf(4), SymbolicFact::implies(a0, decoy_out)),
    ];
    let hypothesis = Fact::symbolic(FactId::hypothesis(), top);

    let backend = LexicalBackend::new(SymbolicJudge);
    let modules = ModuleSet::symbolic();

    // Greedy: only the single best-scored step expands, beam of one.
    let greedy = SearchConfig {
        beam_size: 1,
        tau: 0.01,
        mode: SearchMode::Task2,
        ..SearchConfig::default()
    };
    let (result, _) = reason(&hypothesis, &facts, &greedy, &modules, &backend, &SymbolicJudge)
        .unwrap();
    assert!(!result.proved, "the decoy must trap the greedy search");

    let beam = SearchConfig {
        mode: SearchMode::Task2,
        tau: 0.5,
        ..SearchConfig::default()
    };
    let (result, _) = reason(&hypothesis, &facts, &beam, &modules, &backend, &SymbolicJudge)
        .unwrap();
    assert!(result.proved, "the full beam must recover the gold tree");
}

#[test]
fn increasing_beam_size_never_lowers_the_best_score() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 313,
        n_instances: 30,
        task: Task::One,
        ..GeneratorConfig::default()
    })
    .unwrap();
    for inst in &corpus {
        let mut last = f64::NEG_INFINITY;
        for k in [1, 2, 4, 10] {
            let config = SearchConfig {
                beam_size: k,
                mode: SearchMode::Task1,
                ..SearchConfig::default()
            };
            let backend = LexicalBackend::new(SymbolicJudge);
            let best = reason(
                &inst.hypothesis,
                &inst.facts,
                &config,
                &ModuleSet::symbolic(),
                &backend,
                &SymbolicJudge,
            )
            .map(|(r, _)| {
                r.all_states
                    .iter()
                    .filter_map(|s| s.scores.as_ref().map(|sc| sc.state_score))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .unwrap_or(f64::NEG_INFINITY);
            assert!(best >= last - 1e-12, "beam {k} regressed on {}", inst.id);
            last = best;
        }
    }
}

#[test]
fn heuristic_never_beats_the_controller_on_hard_distractors() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 314,
        n_instances: 30,
        distractor_range: (6, 9),
        hard_distractors: true,
        task: Task::Two,
        ..GeneratorConfig::default()
    })
    .unwrap();
    let mut controller_total = 0usize;
    let mut heuristic_total = 0usize;
    for inst in &corpus {
        let config = config_for(Task::Two);
        let result = run(inst, &config);
        controller_total += overall(inst, &result) as usize;
        let heuristic = heuristic_reason(
            &inst.hypothesis,
            &inst.facts,
            &config,
            &ModuleSet::symbolic(),
            &SymbolicJudge,
        );
        if let Ok((result, _)) = heuristic {
            heuristic_total += overall(inst, &result) as usize;
        }
    }
    assert!(heuristic_total <= controller_total);
}

/// Candidate pools built from depth-1 instances: the pair whose deduction
/// reproduces the hypothesis is the unique valid candidate, and the ranker
/// must put it first.
#[test]
fn one_step_ranking_recovers_the_firing_pair() {
    use entail_core::entailment::rules::deduce;
    use entail_core::evaluation::rank_metrics;
    use entail_core::search::rank_one_step_candidates;
    use entail_core::tree::ReasoningType;

    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 317,
        n_instances: 60,
        depth_range: (1, 1),
        distractor_range: (3, 5),
        task: Task::Two,
        ..GeneratorConfig::default()
    })
    .unwrap();
    let backend = LexicalBackend::new(SymbolicJudge);
    let mut p_sum = 0.0;
    for inst in &corpus {
        let mut pairs = Vec::new();
        let mut labels = std::collections::BTreeMap::new();
        for (i, a) in inst.facts.iter().enumerate() {
            for b in inst.facts.iter().skip(i + 1) {
                let fires = match (a.sym(), b.sym(), inst.hypothesis.sym()) {
                    (Some(sa), Some(sb), Some(h)) => ReasoningType::ALL
                        .into_iter()
                        .any(|t| deduce(t, sa, sb).as_ref() == Some(h)),
                    _ => false,
                };
                let key = (a.id().clone(), b.id().clone());
                pairs.push(key.clone());
                labels.insert(key, fires);
            }
        }
        assert_eq!(labels.values().filter(|v| **v).count(), 1);
        let ranked = rank_one_step_candidates(
            &inst.hypothesis,
            &inst.facts,
            &pairs,
            &SearchConfig::default(),
            &backend,
        );
        let ordered: Vec<bool> = ranked
            .iter()
            .map(|r| labels.get(&r.premises).copied().unwrap_or(false))
            .collect();
        let (p_at_1, _) = rank_metrics(&ordered).unwrap();
        p_sum += p_at_1;
    }
    assert_eq!(p_sum, corpus.len() as f64, "P@1 must be 1.0 on every pool");
}

/// Task 3 is the task-2 pipeline over ingested retrieval sentences: with a
/// retrieval file covering the gold leaves, the search recovers the tree.
#[test]
fn task3_pipeline_over_retrieved_sentences() {
    use entail_core::dataio::{apply_retrieval, load_retrieval};
    use std::io::Write;

    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 318,
        n_instances: 15,
        distractor_range: (4, 6),
        task: Task::Two,
        ..GeneratorConfig::default()
    })
    .unwrap();

    // Retrieval file: every instance's sentences, reversed, plus one miss.
    let mut path = std::env::temp_dir();
    path.push(format!("entail-retrieval-{}.jsonl", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    for inst in &corpus {
        let mut sentences: Vec<String> =
            inst.facts.iter().map(|x| x.text().to_string()).collect();
        sentences.reverse();
        sentences.push("an unrelated retrieved sentence".to_string());
        let record = serde_json::json!({ "id": inst.id, "sentences": sentences });
        writeln!(f, "{record}").unwrap();
    }
    drop(f);

    let retrieval = load_retrieval(&path).unwrap();
    let mut instances = corpus.clone();
    apply_retrieval(&mut instances, &retrieval);
    std::fs::remove_file(&path).ok();

    for inst in &instances {
        assert_eq!(inst.task, Task::Three);
        let result = run(inst, &config_for(Task::Three));
        assert!(result.proved, "instance {} not proved after retrieval", inst.id);
        assert!(overall(inst, &result), "instance {} not exact", inst.id);
    }
}

/// Near-duplicate distractors can out-similar every derived conclusion; the
/// heuristic must still return a best-effort tree for every instance rather
/// than failing to assemble one.
#[test]
fn heuristic_always_returns_a_tree_on_hard_corpora() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 9,
        n_instances: 20,
        distractor_range: (10, 14),
        hard_distractors: true,
        task: Task::Two,
        ..GeneratorConfig::default()
    })
    .unwrap();
    let config = config_for(Task::Two);
    for inst in &corpus {
        let (result, _) = heuristic_reason(
            &inst.hypothesis,
            &inst.facts,
            &config,
            &ModuleSet::symbolic(),
            &SymbolicJudge,
        )
        .unwrap_or_else(|e| panic!("instance {} produced no tree: {e}", inst.id));
        let available = inst.facts.iter().map(|f| f.id().clone()).collect();
        assert_eq!(result.best_tree.validate(&available), Vec::new());
    }
}

#[test]
fn search_is_deterministic() {
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 315,
        n_instances: 10,
        task: Task::Two,
        ..GeneratorConfig::default()
    })
    .unwrap();
    for inst in &corpus {
        let backend = LexicalBackend::new(SymbolicJudge);
        let go = || {
            let (result, trace) = reason(
                &inst.hypothesis,
                &inst.facts,
                &config_for(Task::Two),
                &ModuleSet::symbolic(),
                &backend,
                &SymbolicJudge,
            )
            .unwrap();
            (
                entail_core::linear::serialize_tree(&result.best_tree),
                serde_json::to_string(&trace).unwrap(),
            )
        };
        assert_eq!(go(), go());
    }
}

#[test]
fn training_state_accounting_over_the_corpus() {
    use entail_core::controller::training::make_training_states;
    let corpus = generate_synthetic(&GeneratorConfig {
        seed: 316,
        n_instances: 50,
        task: Task::One,
        ..GeneratorConfig::default()
    })
    .unwrap();
    for inst in &corpus {
        let gold = inst.gold.as_ref().unwrap();
        let (pos, neg) =
            make_training_states(gold, &[], &ModuleSet::symbolic(), &SymbolicJudge, 0.999)
                .unwrap();
        // Oracle modules with an exact judge: no negatives, and positives
        // correspond one-to-one with the decomposition.
        assert!(neg.is_empty());
        assert_eq!(pos.len(), decompose_to_states(gold, &[]).unwrap().len());
        let deductive_attempts = gold.steps().len();
        let abductive_attempts = gold.intermediates().len();
        assert_eq!(pos.len() + neg.len(), 1 + deductive_attempts + abductive_attempts);
    }
}
