//! Entailment trees: typed steps, structural validation, binarization.

use crate::fact::{Fact, FactId, Role};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Direction of a single inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Two premises combined into a conclusion (forward).
    Deductive,
    /// Conclusion minus one premise yields the missing premise (backward).
    Abductive,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Deductive => f.write_str("deductive"),
            Direction::Abductive => f.write_str("abductive"),
        }
    }
}

/// The reasoning type performed by a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReasoningType {
    Substitution,
    Conjunction,
    IfThen,
    /// Unlabeled (e.g. steps ingested from linearized proofs).
    Unknown,
}

impl ReasoningType {
    pub const ALL: [ReasoningType; 3] = [
        ReasoningType::Substitution,
        ReasoningType::Conjunction,
        ReasoningType::IfThen,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReasoningType::Substitution => "substitution",
            ReasoningType::Conjunction => "conjunction",
            ReasoningType::IfThen => "ifthen",
            ReasoningType::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ReasoningType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed, directed single inference. Generated steps have exactly two
/// inputs; gold steps ingested from annotations may have more.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub direction: Direction,
    pub rtype: ReasoningType,
    pub inputs: Vec<FactId>,
    pub output: FactId,
}

impl Step {
    pub fn deductive(inputs: Vec<FactId>, output: FactId) -> Self {
        Step {
            direction: Direction::Deductive,
            rtype: ReasoningType::Unknown,
            inputs,
            output,
        }
    }

    /// Premise ids as a sorted set.
    pub fn input_set(&self) -> BTreeSet<FactId> {
        self.inputs.iter().cloned().collect()
    }
}

/// A structural problem found by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A step has fewer than two inputs, repeated inputs, or outputs one of
    /// its own inputs.
    DegenerateStep { output: FactId },
    /// Two steps produce the same conclusion.
    DuplicateOutput { id: FactId },
    /// A step outputs a leaf identifier.
    NonLeafMustBeIntermediate { id: FactId },
    /// A step references an id that is neither a tree node nor the root.
    MissingFact { id: FactId },
    /// The step graph contains a cycle.
    CyclicStep,
    /// The root is not produced by any step, or more than one node is a sink.
    RootNotUniqueSink,
    /// A node does not feed into the root.
    Unreachable { id: FactId },
    /// A declared leaf never appears as a step input.
    UnusedLeaf { id: FactId },
    /// A leaf is not in the provided available-fact set.
    LeafNotAvailable { id: FactId },
    /// An intermediate is declared but never produced by a step.
    UnproducedIntermediate { id: FactId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegenerateStep { output } => write!(f, "degenerate step -> {}", output),
            Violation::DuplicateOutput { id } => write!(f, "duplicate output {}", id),
            Violation::NonLeafMustBeIntermediate { id } => {
                write!(f, "step output {} must be an intermediate or the root", id)
            }
            Violation::MissingFact { id } => write!(f, "unknown fact {}", id),
            Violation::CyclicStep => write!(f, "step graph is cyclic"),
            Violation::RootNotUniqueSink => write!(f, "root is not the unique sink"),
            Violation::Unreachable { id } => write!(f, "{} does not reach the root", id),
            Violation::UnusedLeaf { id } => write!(f, "leaf {} is never used", id),
            Violation::LeafNotAvailable { id } => write!(f, "leaf {} not in available facts", id),
            Violation::UnproducedIntermediate { id } => {
                write!(f, "intermediate {} is never produced", id)
            }
        }
    }
}

/// An entailment tree: root hypothesis, leaf facts, intermediate conclusions,
/// and the steps connecting them.
#[derive(Debug, Clone, PartialEq)]
pub struct EntailmentTree {
    hypothesis: Fact,
    leaves: Vec<Fact>,
    intermediates: Vec<Fact>,
    steps: Vec<Step>,
}

impl EntailmentTree {
    pub fn new(
        hypothesis: Fact,
        mut leaves: Vec<Fact>,
        intermediates: Vec<Fact>,
        steps: Vec<Step>,
    ) -> Self {
        leaves.sort_by(|a, b| a.id().cmp(b.id()));
        EntailmentTree {
            hypothesis,
            leaves,
            intermediates,
            steps,
        }
    }

    pub fn hypothesis(&self) -> &Fact {
        &self.hypothesis
    }

    pub fn root_id(&self) -> &FactId {
        self.hypothesis.id()
    }

    /// Leaf facts, sorted by id.
    pub fn leaves(&self) -> &[Fact] {
        &self.leaves
    }

    pub fn intermediates(&self) -> &[Fact] {
        &self.intermediates
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn leaf_ids(&self) -> BTreeSet<FactId> {
        self.leaves.iter().map(|f| f.id().clone()).collect()
    }

    /// Fact for `id`, searching leaves, intermediates, and the root.
    pub fn fact(&self, id: &FactId) -> Option<&Fact> {
        if self.hypothesis.id() == id {
            return Some(&self.hypothesis);
        }
        self.leaves
            .iter()
            .chain(self.intermediates.iter())
            .find(|f| f.id() == id)
    }

    /// Step producing `id`, if any.
    pub fn producing_step(&self, id: &FactId) -> Option<&Step> {
        self.steps.iter().find(|s| &s.output == id)
    }

    /// Ids of the leaves under `id` (the node's own id if it is a leaf).
    pub fn descendant_leaves(&self, id: &FactId) -> BTreeSet<FactId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id.clone()];
        let mut seen = BTreeSet::new();
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            match self.producing_step(&cur) {
                Some(step) => stack.extend(step.inputs.iter().cloned()),
                None => {
                    out.insert(cur);
                }
            }
        }
        out
    }

    /// Non-leaf node ids (intermediates plus the root) in bottom-up
    /// topological order, ties broken by id.
    pub fn nonleaf_ids_topological(&self) -> Vec<FactId> {
        let order = self.topological_steps();
        order.iter().map(|s| s.output.clone()).collect()
    }

    /// Steps in topological (executable) order, ties broken by smallest
    /// output id.
    pub fn topological_steps(&self) -> Vec<Step> {
        let mut produced: BTreeSet<FactId> = self.leaves.iter().map(|f| f.id().clone()).collect();
        let mut remaining: Vec<Step> = self.steps.clone();
        let mut out = Vec::new();
        while !remaining.is_empty() {
            let mut ready: Vec<usize> = remaining
                .iter()
                .enumerate()
                .filter(|(_, s)| s.inputs.iter().all(|i| produced.contains(i)))
                .map(|(i, _)| i)
                .collect();
            if ready.is_empty() {
                // Cyclic or dangling references; return what we have (the
                // validator reports the problem).
                break;
            }
            ready.sort_by(|a, b| remaining[*a].output.cmp(&remaining[*b].output));
            let step = remaining.remove(ready[0]);
            produced.insert(step.output.clone());
            out.push(step);
        }
        out
    }

    /// Structural validation plus the leaf-availability check. Empty result
    /// means the tree is valid and every leaf is drawn from `available`.
    pub fn validate(&self, available: &BTreeSet<FactId>) -> Vec<Violation> {
        let mut violations = Vec::new();
        let root = self.root_id().clone();

        let node_ids: BTreeSet<FactId> = self
            .leaves
            .iter()
            .chain(self.intermediates.iter())
            .map(|f| f.id().clone())
            .chain(std::iter::once(root.clone()))
            .collect();
        let mut outputs: BTreeMap<FactId, usize> = BTreeMap::new();
        for step in &self.steps {
            if step.inputs.len() < 2
                || step.input_set().len() != step.inputs.len()
                || step.inputs.contains(&step.output)
            {
                violations.push(Violation::DegenerateStep {
                    output: step.output.clone(),
                });
            }
            *outputs.entry(step.output.clone()).or_insert(0) += 1;
            if step.output.role() == Role::Leaf {
                violations.push(Violation::NonLeafMustBeIntermediate {
                    id: step.output.clone(),
                });
            }
            for id in step.inputs.iter().chain(std::iter::once(&step.output)) {
                if !node_ids.contains(id) {
                    violations.push(Violation::MissingFact { id: id.clone() });
                }
            }
        }
        for (id, n) in &outputs {
            if *n > 1 {
                violations.push(Violation::DuplicateOutput { id: id.clone() });
            }
        }
        for f in &self.intermediates {
            if !outputs.contains_key(f.id()) {
                violations.push(Violation::UnproducedIntermediate { id: f.id().clone() });
            }
        }

        // Every non-leaf is produced; the root is produced and never consumed.
        let consumed: BTreeSet<FactId> = self
            .steps
            .iter()
            .flat_map(|s| s.inputs.iter().cloned())
            .collect();
        if !outputs.contains_key(&root) || consumed.contains(&root) {
            violations.push(Violation::RootNotUniqueSink);
        }
        for id in outputs.keys() {
            if *id != root && !consumed.contains(id) {
                violations.push(Violation::RootNotUniqueSink);
            }
        }

        // Acyclicity: topological ordering must cover every step.
        if self.topological_steps().len() != self.steps.len() {
            violations.push(Violation::CyclicStep);
        } else {
            // Connectivity: every node reaches the root through steps.
            let mut reach: BTreeSet<FactId> = BTreeSet::new();
            let mut stack = vec![root.clone()];
            while let Some(cur) = stack.pop() {
                if !reach.insert(cur.clone()) {
                    continue;
                }
                if let Some(step) = self.producing_step(&cur) {
                    stack.extend(step.inputs.iter().cloned());
                }
            }
            for id in &node_ids {
                if !reach.contains(id) {
                    violations.push(Violation::Unreachable { id: id.clone() });
                }
            }
        }

        for leaf in &self.leaves {
            if !consumed.contains(leaf.id()) {
                violations.push(Violation::UnusedLeaf {
                    id: leaf.id().clone(),
                });
            }
            if !available.contains(leaf.id()) {
                violations.push(Violation::LeafNotAvailable {
                    id: leaf.id().clone(),
                });
            }
        }

        // Hypothesis role check is intentionally lenient: the root id is
        // whatever the hypothesis fact carries.
        debug_assert!(matches!(
            root.role(),
            Role::Hypothesis | Role::Intermediate | Role::Other
        ));

        violations
    }

    /// Left-fold n-premise steps (n > 2) into chains of 2-premise steps,
    /// premises taken in id order. Fresh intermediate ids continue from the
    /// largest existing one. 2-premise trees are returned unchanged.
    pub fn binarize(&self) -> EntailmentTree {
        let mut next = self
            .intermediates
            .iter()
            .filter_map(|f| f.id().index())
            .max()
            .unwrap_or(0)
            + 1;
        let mut intermediates = self.intermediates.clone();
        let mut steps = Vec::new();
        for step in &self.steps {
            if step.inputs.len() <= 2 {
                steps.push(step.clone());
                continue;
            }
            let mut inputs: Vec<FactId> = step.inputs.clone();
            inputs.sort();
            let mut acc = inputs[0].clone();
            for (k, premise) in inputs[1..].iter().enumerate() {
                let last = k == inputs.len() - 2;
                let out_id = if last {
                    step.output.clone()
                } else {
                    let id = FactId::intermediate(next);
                    next += 1;
                    // Carries the final conclusion's text; no sounder rendering
                    // exists for a partial fold.
                    let text = self
                        .fact(&step.output)
                        .map(|f| f.text().to_string())
                        .unwrap_or_default();
                    intermediates.push(Fact::new(id.clone(), text, None));
                    id
                };
                steps.push(Step {
                    direction: step.direction,
                    rtype: step.rtype,
                    inputs: vec![acc.clone(), premise.clone()],
                    output: out_id.clone(),
                });
                acc = out_id;
            }
        }
        EntailmentTree::new(
            self.hypothesis.clone(),
            self.leaves.clone(),
            intermediates,
            steps,
        )
    }
}
