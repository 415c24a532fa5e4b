//! Seeded synthetic corpus generator.
//!
//! Builds gold trees bottom-up from the symbolic rules so every instance has
//! a known, uniquely recoverable derivation: substitution and if-then chains
//! form the branches, conjunctions join branch conclusions near the root.
//! Every atom carries a per-instance context entity, so gold premise pairs
//! always share a symbol; distractors are symbol-disjoint by default, or
//! share entities without firing any rule in hard mode.

use super::{ProblemInstance, Task};
use crate::fact::{Fact, FactId};
use crate::symbolic::SymbolicFact;
use crate::tree::{Direction, EntailmentTree, ReasoningType, Step};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_instances: usize,
    /// Inclusive range of tree depths (longest root-to-leaf path in steps).
    pub depth_range: (usize, usize),
    pub entity_alphabet: usize,
    pub predicate_alphabet: usize,
    /// Inclusive range of distractor counts (tasks 2 and 3 only).
    pub distractor_range: (usize, usize),
    /// Distractors share entities with the tree but fire no rule.
    pub hard_distractors: bool,
    /// Relative preference for substitution steps at branch bottoms.
    pub weight_substitution: f64,
    /// Relative preference for branching (conjunction crowns) over chains.
    pub weight_conjunction: f64,
    pub weight_ifthen: f64,
    pub task: Task,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            n_instances: 100,
            depth_range: (1, 4),
            entity_alphabet: 96,
            predicate_alphabet: 96,
            distractor_range: (15, 20),
            hard_distractors: false,
            weight_substitution: 0.5,
            weight_conjunction: 0.5,
            weight_ifthen: 0.5,
            task: Task::One,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("config error: {0}")]
    Config(String),
}

const ENTITY_SYLLABLES: [&str; 16] = [
    "ba", "ce", "di", "fo", "gu", "hy", "ja", "ko", "lu", "my", "ne", "po", "qui", "ro", "su",
    "ta",
];
const PREDICATE_SYLLABLES: [&str; 16] = [
    "bel", "cor", "dal", "fen", "gam", "hon", "jil", "kem", "lor", "mun", "nop", "pir", "que",
    "rud", "sol", "tev",
];

fn entity_name(i: usize) -> String {
    format!(
        "{}{}{}",
        ENTITY_SYLLABLES[i % 16],
        ENTITY_SYLLABLES[(i / 16) % 16],
        if i >= 256 { format!("{}", i / 256) } else { String::new() }
    )
}

fn predicate_name(i: usize) -> String {
    format!(
        "{}{}{}",
        PREDICATE_SYLLABLES[i % 16],
        PREDICATE_SYLLABLES[(i / 16) % 16],
        if i >= 256 { format!("{}", i / 256) } else { String::new() }
    )
}

/// Symbol allocator for one instance.
struct Alphabet {
    next_entity: usize,
    next_predicate: usize,
    max_entities: usize,
    max_predicates: usize,
}

impl Alphabet {
    fn entity(&mut self) -> Result<String, GenError> {
        if self.next_entity >= self.max_entities {
            return Err(GenError::Config(
                "entity alphabet too small for the requested shape".to_string(),
            ));
        }
        let name = entity_name(self.next_entity);
        self.next_entity += 1;
        Ok(name)
    }

    fn predicate(&mut self) -> Result<String, GenError> {
        if self.next_predicate >= self.max_predicates {
            return Err(GenError::Config(
                "predicate alphabet too small for the requested shape".to_string(),
            ));
        }
        let name = predicate_name(self.next_predicate);
        self.next_predicate += 1;
        Ok(name)
    }
}

/// A constructed branch: its leaf facts, internal steps (on symbolic forms),
/// and the conclusion.
struct Branch {
    leaves: Vec<SymbolicFact>,
    /// (premises, conclusion, rtype); premises index into the leaves of this
    /// branch or earlier conclusions (resolved by symbol when assembling).
    steps: Vec<(Vec<SymbolicFact>, SymbolicFact, ReasoningType)>,
    conclusion: SymbolicFact,
}

fn build_branch(
    len: usize,
    use_substitution: bool,
    context: &str,
    alphabet: &mut Alphabet,
) -> Result<Branch, GenError> {
    let mut leaves = Vec::new();
    let mut steps = Vec::new();

    let subject = alphabet.entity()?;
    let mut current = if len >= 1 && use_substitution {
        let category = alphabet.entity()?;
        let pred = alphabet.predicate()?;
        let isa = SymbolicFact::isa(subject.clone(), category.clone());
        let base = SymbolicFact::atom(pred, &[category.as_str(), context]);
        let conclusion = base.replace_entity(&category, &subject);
        leaves.push(isa.clone());
        leaves.push(base.clone());
        steps.push((vec![isa, base], conclusion.clone(), ReasoningType::Substitution));
        conclusion
    } else {
        let pred = alphabet.predicate()?;
        let base = SymbolicFact::atom(pred, &[subject.as_str(), context]);
        leaves.push(base.clone());
        base
    };

    let chain = if len >= 1 && use_substitution { len - 1 } else { len };
    for _ in 0..chain {
        let pred = alphabet.predicate()?;
        let next = SymbolicFact::atom(pred, &[subject.as_str(), context]);
        let rule = SymbolicFact::implies(current.clone(), next.clone());
        leaves.push(rule.clone());
        steps.push((vec![rule, current.clone()], next.clone(), ReasoningType::IfThen));
        current = next;
    }

    Ok(Branch {
        leaves,
        steps,
        conclusion: current,
    })
}

/// Generate the configured number of instances. Fully deterministic for a
/// fixed config; instances derive independent seeds, so generation order
/// does not matter.
pub fn generate_synthetic(config: &GeneratorConfig) -> Result<Vec<ProblemInstance>, GenError> {
    if config.depth_range.0 < 1 || config.depth_range.0 > config.depth_range.1 {
        return Err(GenError::Config("depth range must satisfy 1 <= lo <= hi".into()));
    }
    if config.distractor_range.0 > config.distractor_range.1 {
        return Err(GenError::Config("distractor range must satisfy lo <= hi".into()));
    }
    (0..config.n_instances)
        .map(|idx| generate_instance(config, idx))
        .collect()
}

fn generate_instance(config: &GeneratorConfig, idx: usize) -> Result<ProblemInstance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        config
            .seed
            .wrapping_add((idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    );
    let mut alphabet = Alphabet {
        next_entity: 0,
        next_predicate: 0,
        max_entities: config.entity_alphabet,
        max_predicates: config.predicate_alphabet,
    };
    let context = alphabet.entity()?;

    let depth = rng.random_range(config.depth_range.0..=config.depth_range.1);
    let branchy = config.weight_conjunction
        / (config.weight_conjunction + config.weight_ifthen).max(f64::EPSILON);

    // Shape: either a single chain of `depth` steps, or 2-3 branches joined
    // by a left-leaning crown of conjunctions. Side branches stay short so
    // the total step count never exceeds depth + 1 (trees remain solvable
    // within the default reasoning-depth budget).
    let n_branches = if depth >= 2 && rng.random_bool(branchy.clamp(0.0, 1.0)) {
        if depth == 3 && rng.random_bool(0.5) {
            3
        } else {
            2
        }
    } else {
        1
    };

    let crown_steps = n_branches - 1;
    let mut branches = Vec::new();
    for b in 0..n_branches {
        // Distance from this branch's conclusion to the root through the
        // left-leaning crown.
        let dist = if n_branches == 1 {
            0
        } else if b <= 1 {
            crown_steps
        } else {
            crown_steps - (b - 1)
        };
        let len = if b == 0 {
            depth - dist
        } else {
            let cap = (depth - dist).min(1);
            rng.random_range(0..=cap)
        };
        let use_sub = len >= 1 && rng.random_bool(config.weight_substitution.clamp(0.0, 1.0));
        branches.push(build_branch(len, use_sub, &context, &mut alphabet)?);
    }

    // Assemble symbolic steps: branch steps first, then the crown.
    let mut sym_steps: Vec<(Vec<SymbolicFact>, SymbolicFact, ReasoningType)> = Vec::new();
    for branch in &branches {
        sym_steps.extend(branch.steps.iter().cloned());
    }
    let root_sym = if n_branches == 1 {
        branches[0].conclusion.clone()
    } else {
        let mut acc = branches[0].conclusion.clone();
        for branch in &branches[1..] {
            let joined = SymbolicFact::conj(acc.clone(), branch.conclusion.clone());
            sym_steps.push((
                vec![acc.clone(), branch.conclusion.clone()],
                joined.clone(),
                ReasoningType::Conjunction,
            ));
            acc = joined;
        }
        acc
    };

    // Distractors.
    let n_distractors = if config.task == Task::One {
        0
    } else {
        rng.random_range(config.distractor_range.0..=config.distractor_range.1)
    };
    let mut distractor_syms = Vec::new();
    for d in 0..n_distractors {
        let sym = if config.hard_distractors {
            // Near-duplicate of a gold conclusion atom: same predicate and
            // context, one fresh entity. High similarity to the tree, yet no
            // rule fires on it (it matches no antecedent and no IsA).
            let branch = &branches[d % branches.len()];
            let atoms = branch_atoms(branch);
            let template = &atoms[d % atoms.len()];
            let fresh = alphabet.entity()?;
            let SymbolicFact::Atom { pred, args } = template else {
                unreachable!("branch atoms are atoms")
            };
            let mut args = args.clone();
            args[0] = fresh;
            SymbolicFact::Atom {
                pred: pred.clone(),
                args,
            }
        } else {
            match d % 3 {
                0 => {
                    let pred = alphabet.predicate()?;
                    let a = alphabet.entity()?;
                    let b = alphabet.entity()?;
                    SymbolicFact::atom(pred, &[a.as_str(), b.as_str()])
                }
                1 => {
                    let a = alphabet.entity()?;
                    let b = alphabet.entity()?;
                    SymbolicFact::isa(a, b)
                }
                _ => {
                    let p1 = alphabet.predicate()?;
                    let p2 = alphabet.predicate()?;
                    let a = alphabet.entity()?;
                    SymbolicFact::implies(
                        SymbolicFact::atom(p1, &[a.as_str()]),
                        SymbolicFact::atom(p2, &[a.as_str()]),
                    )
                }
            }
        };
        distractor_syms.push(sym);
    }

    // Assign sentence ids: gold leaves and distractors shuffled together.
    let mut all_leaves: Vec<(SymbolicFact, bool)> = branches
        .iter()
        .flat_map(|b| b.leaves.iter().cloned().map(|s| (s, true)))
        .collect();
    all_leaves.extend(distractor_syms.into_iter().map(|s| (s, false)));
    all_leaves.shuffle(&mut rng);

    let mut leaf_facts = Vec::new();
    let mut gold_leaves = Vec::new();
    for (k, (sym, is_gold)) in all_leaves.iter().enumerate() {
        let fact = Fact::symbolic(FactId::leaf(k + 1), sym.clone());
        if *is_gold {
            gold_leaves.push(fact.clone());
        }
        leaf_facts.push(fact);
    }
    let find_leaf = |sym: &SymbolicFact| -> FactId {
        leaf_facts
            .iter()
            .find(|f| f.sym() == Some(sym))
            .expect("gold premise is a generated leaf")
            .id()
            .clone()
    };

    // Number intermediates in construction order and materialize gold steps.
    let hypothesis = Fact::symbolic(FactId::hypothesis(), root_sym.clone());
    let mut steps = Vec::new();
    let mut intermediates = Vec::new();
    let mut produced: Vec<(SymbolicFact, FactId)> = Vec::new();
    for (premises, conclusion, rtype) in &sym_steps {
        let resolve = |sym: &SymbolicFact, produced: &[(SymbolicFact, FactId)]| -> FactId {
            produced
                .iter()
                .rev()
                .find(|(s, _)| s == sym)
                .map(|(_, id)| id.clone())
                .unwrap_or_else(|| find_leaf(sym))
        };
        let inputs: Vec<FactId> = premises.iter().map(|p| resolve(p, &produced)).collect();
        let output = if conclusion == &root_sym {
            FactId::hypothesis()
        } else {
            let id = FactId::intermediate(intermediates.len() + 1);
            intermediates.push(Fact::symbolic(id.clone(), conclusion.clone()));
            id
        };
        produced.push((conclusion.clone(), output.clone()));
        steps.push(Step {
            direction: Direction::Deductive,
            rtype: *rtype,
            inputs,
            output,
        });
    }

    let gold = EntailmentTree::new(hypothesis.clone(), gold_leaves, intermediates, steps);
    let facts = match config.task {
        Task::One => gold.leaves().to_vec(),
        Task::Two | Task::Three => leaf_facts,
    };

    Ok(ProblemInstance {
        id: format!("synth-{:08x}-{:05}", config.seed, idx),
        hypothesis,
        facts,
        gold: Some(gold),
        task: config.task,
    })
}

/// Every plain atom along a branch: the conclusion plus each chain stage.
fn branch_atoms(branch: &Branch) -> Vec<SymbolicFact> {
    let mut out = vec![branch.conclusion.clone()];
    for (_, conclusion, _) in &branch.steps {
        if matches!(conclusion, SymbolicFact::Atom { .. }) && !out.contains(conclusion) {
            out.push(conclusion.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entailment::rules;

    #[test]
    fn depth_one_instances_have_one_step_and_two_leaves() {
        let config = GeneratorConfig {
            n_instances: 20,
            depth_range: (1, 1),
            ..GeneratorConfig::default()
        };
        for inst in generate_synthetic(&config).unwrap() {
            let gold = inst.gold.as_ref().unwrap();
            assert_eq!(gold.steps().len(), 1);
            assert_eq!(gold.leaves().len(), 2);
        }
    }

    #[test]
    fn exhausted_alphabets_and_bad_ranges_are_config_errors() {
        // One entity covers the shared context but not a branch subject.
        let too_small = GeneratorConfig {
            n_instances: 1,
            depth_range: (4, 4),
            entity_alphabet: 1,
            ..GeneratorConfig::default()
        };
        assert!(matches!(
            generate_synthetic(&too_small),
            Err(GenError::Config(_))
        ));

        let zero_depth = GeneratorConfig {
            depth_range: (0, 2),
            ..GeneratorConfig::default()
        };
        assert!(matches!(
            generate_synthetic(&zero_depth),
            Err(GenError::Config(_))
        ));

        let inverted = GeneratorConfig {
            distractor_range: (5, 2),
            ..GeneratorConfig::default()
        };
        assert!(matches!(
            generate_synthetic(&inverted),
            Err(GenError::Config(_))
        ));
    }

    #[test]
    fn fixed_seed_reproduces_the_corpus() {
        let config = GeneratorConfig {
            seed: 42,
            n_instances: 25,
            task: Task::Two,
            ..GeneratorConfig::default()
        };
        let a = generate_synthetic(&config).unwrap();
        let b = generate_synthetic(&config).unwrap();
        let dump = |insts: &[ProblemInstance]| {
            insts
                .iter()
                .map(|i| super::super::instance_record(i).to_string())
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(dump(&a), dump(&b));
    }

    #[test]
    fn every_instance_validates_and_every_step_deduces() {
        let config = GeneratorConfig {
            seed: 7,
            n_instances: 200,
            task: Task::Two,
            ..GeneratorConfig::default()
        };
        for inst in generate_synthetic(&config).unwrap() {
            let gold = inst.gold.as_ref().unwrap();
            let available = inst.facts.iter().map(|f| f.id().clone()).collect();
            assert_eq!(gold.validate(&available), Vec::new());
            for step in gold.steps() {
                let a = gold.fact(&step.inputs[0]).unwrap().sym().unwrap();
                let b = gold.fact(&step.inputs[1]).unwrap().sym().unwrap();
                let c = gold.fact(&step.output).unwrap().sym().unwrap();
                assert_eq!(rules::deduce(step.rtype, a, b).as_ref(), Some(c));
            }
        }
    }

    #[test]
    fn gold_premise_pairs_always_share_a_symbol() {
        let config = GeneratorConfig {
            seed: 11,
            n_instances: 100,
            task: Task::Two,
            ..GeneratorConfig::default()
        };
        for inst in generate_synthetic(&config).unwrap() {
            let gold = inst.gold.as_ref().unwrap();
            for step in gold.steps() {
                let a = gold.fact(&step.inputs[0]).unwrap();
                let b = gold.fact(&step.inputs[1]).unwrap();
                assert!(a.overlaps(b), "gold premises must pass the overlap filter");
            }
        }
    }

    #[test]
    fn plain_distractors_share_no_symbols_with_the_tree() {
        let config = GeneratorConfig {
            seed: 3,
            n_instances: 50,
            task: Task::Two,
            ..GeneratorConfig::default()
        };
        for inst in generate_synthetic(&config).unwrap() {
            let gold = inst.gold.as_ref().unwrap();
            let gold_ids = gold.leaf_ids();
            for fact in inst.facts.iter().filter(|f| !gold_ids.contains(f.id())) {
                assert!(!fact.overlaps(&inst.hypothesis));
                for leaf in gold.leaves() {
                    assert!(!fact.overlaps(leaf));
                }
            }
        }
    }
}
