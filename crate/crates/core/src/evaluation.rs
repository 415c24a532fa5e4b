//! Automatic evaluation of predicted trees against gold trees.
//!
//! Pipeline: align predicted non-leaf nodes to gold non-leaf nodes by Jaccard
//! similarity of their descendant-leaf id sets, then score three dimensions
//! (leaves, steps, intermediate conclusions) as F1 plus an all-or-nothing
//! AllCorrect flag, and combine them into Overall AllCorrect. Ranking runs
//! (one-step candidate selection) are scored with P@1 and NDCG.

use crate::fact::{FactId, Role};
use crate::judge::SimilarityJudge;
use crate::tree::EntailmentTree;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Alignment behavior for intermediates scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignMode {
    /// Published-numbers compatible: several predicted nodes may earn credit
    /// against the same gold node.
    Official,
    /// Each gold node is creditable once.
    Strict,
}

/// Mapping from predicted non-leaf node to gold node; `None` is the dummy
/// node used when a predicted node shares no leaves with any gold node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    map: BTreeMap<FactId, Option<FactId>>,
}

impl Alignment {
    pub fn get(&self, pred: &FactId) -> Option<&FactId> {
        self.map.get(pred).and_then(|g| g.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FactId, Option<&FactId>)> {
        self.map.iter().map(|(p, g)| (p, g.as_ref()))
    }
}

/// Scores for one predicted tree against gold.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub leaves_f1: f64,
    pub leaves_allcorrect: bool,
    pub steps_f1: f64,
    pub steps_allcorrect: bool,
    pub intermediates_f1: f64,
    pub intermediates_allcorrect: bool,
    pub overall_allcorrect: bool,
}

/// Align each predicted non-leaf node (intermediates and the root, in
/// bottom-up topological order) to the first gold non-leaf node maximizing
/// the Jaccard similarity of their descendant-leaf id sets. Zero similarity
/// everywhere maps to the dummy node. Several predicted nodes may map to one
/// gold node.
pub fn align_trees(pred: &EntailmentTree, gold: &EntailmentTree) -> Alignment {
    let gold_nodes = gold.nonleaf_ids_topological();
    let gold_leaves: Vec<(FactId, BTreeSet<FactId>)> = gold_nodes
        .iter()
        .map(|id| (id.clone(), gold.descendant_leaves(id)))
        .collect();

    let mut map = BTreeMap::new();
    for pred_id in pred.nonleaf_ids_topological() {
        let pred_leaves = pred.descendant_leaves(&pred_id);
        let mut best: Option<(&FactId, f64)> = None;
        for (gold_id, gl) in &gold_leaves {
            let sim = jaccard(&pred_leaves, gl);
            // "first ... maximum": strictly-greater keeps the earliest winner.
            if sim > best.map(|(_, s)| s).unwrap_or(0.0) {
                best = Some((gold_id, sim));
            }
        }
        map.insert(pred_id, best.map(|(id, _)| id.clone()));
    }
    Alignment { map }
}

fn jaccard(a: &BTreeSet<FactId>, b: &BTreeSet<FactId>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Set F1 between predicted and gold leaf ids; AllCorrect when the sets are
/// identical.
pub fn leaves_score(pred: &EntailmentTree, gold: &EntailmentTree) -> (f64, bool) {
    let p = pred.leaf_ids();
    let g = gold.leaf_ids();
    let inter = p.intersection(&g).count() as f64;
    if p.is_empty() || g.is_empty() {
        return (0.0, false);
    }
    let precision = inter / p.len() as f64;
    let recall = inter / g.len() as f64;
    (f1(precision, recall), p == g)
}

/// A predicted step is structurally correct when the gold step producing its
/// aligned output has an identical premise-id set after mapping predicted
/// intermediates through the alignment. Unmatched predicted steps count as
/// false positives; each gold step is creditable once for recall.
pub fn steps_score(
    pred: &EntailmentTree,
    gold: &EntailmentTree,
    alignment: &Alignment,
) -> (f64, bool) {
    let map_premise = |id: &FactId| -> Option<FactId> {
        match id.role() {
            Role::Leaf => Some(id.clone()),
            _ => alignment.get(id).cloned(),
        }
    };

    let mut correct = 0usize;
    let mut matched_gold: BTreeSet<FactId> = BTreeSet::new();
    for step in pred.steps() {
        let Some(gold_node) = alignment.get(&step.output) else {
            continue;
        };
        let Some(gold_step) = gold.producing_step(gold_node) else {
            continue;
        };
        let mapped: Option<BTreeSet<FactId>> = step.inputs.iter().map(&map_premise).collect();
        let Some(mapped) = mapped else {
            continue;
        };
        if mapped == gold_step.input_set() {
            correct += 1;
            matched_gold.insert(gold_node.clone());
        }
    }

    if pred.steps().is_empty() || gold.steps().is_empty() {
        return (0.0, false);
    }
    let precision = correct as f64 / pred.steps().len() as f64;
    let recall = matched_gold.len() as f64 / gold.steps().len() as f64;
    let all = correct == pred.steps().len() && matched_gold.len() == gold.steps().len();
    (f1(precision, recall), all)
}

/// An aligned (predicted, gold) pair is correct when the judge scores the two
/// conclusion sentences above `threshold`. Official mode gives duplicate
/// alignments full credit; strict mode credits each gold node once.
pub fn intermediates_score(
    pred: &EntailmentTree,
    gold: &EntailmentTree,
    alignment: &Alignment,
    judge: &dyn SimilarityJudge,
    threshold: f64,
    mode: AlignMode,
) -> (f64, bool) {
    let pred_nodes = pred.nonleaf_ids_topological();
    let gold_total = gold.nonleaf_ids_topological().len();
    if pred_nodes.is_empty() || gold_total == 0 {
        return (0.0, false);
    }

    let mut passing = 0usize;
    let mut matched_gold: BTreeSet<FactId> = BTreeSet::new();
    for pred_id in &pred_nodes {
        let Some(gold_id) = alignment.get(pred_id) else {
            continue;
        };
        let (Some(pf), Some(gf)) = (pred.fact(pred_id), gold.fact(gold_id)) else {
            continue;
        };
        if judge.similarity(pf, gf) > threshold {
            passing += 1;
            matched_gold.insert(gold_id.clone());
        }
    }

    let (precision, recall, all) = match mode {
        AlignMode::Official => {
            let p = passing as f64 / pred_nodes.len() as f64;
            let r = matched_gold.len() as f64 / gold_total as f64;
            (p, r, passing == pred_nodes.len() && matched_gold.len() == gold_total)
        }
        AlignMode::Strict => {
            let m = matched_gold.len();
            let p = m as f64 / pred_nodes.len() as f64;
            let r = m as f64 / gold_total as f64;
            (p, r, m == pred_nodes.len() && m == gold_total)
        }
    };
    (f1(precision, recall), all)
}

/// The unrepaired AllCorrect historically reported for intermediates:
/// precision equal to one, recall ignored. Kept for cross-checking published
/// numbers; [`MetricReport`] always carries the repaired flag.
pub fn intermediates_allcorrect_unrepaired(
    pred: &EntailmentTree,
    gold: &EntailmentTree,
    alignment: &Alignment,
    judge: &dyn SimilarityJudge,
    threshold: f64,
) -> bool {
    let pred_nodes = pred.nonleaf_ids_topological();
    if pred_nodes.is_empty() {
        return false;
    }
    pred_nodes.iter().all(|pred_id| {
        alignment
            .get(pred_id)
            .and_then(|gold_id| match (pred.fact(pred_id), gold.fact(gold_id)) {
                (Some(pf), Some(gf)) => Some(judge.similarity(pf, gf) > threshold),
                _ => None,
            })
            .unwrap_or(false)
    })
}

/// Full metric suite for one (predicted, gold) pair.
pub fn evaluate_pair(
    pred: &EntailmentTree,
    gold: &EntailmentTree,
    judge: &dyn SimilarityJudge,
    threshold: f64,
    mode: AlignMode,
) -> MetricReport {
    let alignment = align_trees(pred, gold);
    let (leaves_f1, leaves_allcorrect) = leaves_score(pred, gold);
    let (steps_f1, steps_allcorrect) = steps_score(pred, gold, &alignment);
    let (intermediates_f1, intermediates_allcorrect) =
        intermediates_score(pred, gold, &alignment, judge, threshold, mode);
    MetricReport {
        leaves_f1,
        leaves_allcorrect,
        steps_f1,
        steps_allcorrect,
        intermediates_f1,
        intermediates_allcorrect,
        overall_allcorrect: leaves_allcorrect && steps_allcorrect && intermediates_allcorrect,
    }
}

/// The all-zero report used when a prediction is missing.
pub fn zero_report() -> MetricReport {
    MetricReport {
        leaves_f1: 0.0,
        leaves_allcorrect: false,
        steps_f1: 0.0,
        steps_allcorrect: false,
        intermediates_f1: 0.0,
        intermediates_allcorrect: false,
        overall_allcorrect: false,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("candidate pool contains no valid candidate")]
    NoValidCandidate,
}

/// P@1 and NDCG for one ranked candidate pool with binary validity labels.
/// NDCG uses binary gains, log2 position discount, and the ideal ordering as
/// the normalizer.
pub fn rank_metrics(ranked_validity: &[bool]) -> Result<(f64, f64), RankError> {
    let valid = ranked_validity.iter().filter(|v| **v).count();
    if valid == 0 {
        return Err(RankError::NoValidCandidate);
    }
    let p_at_1 = if ranked_validity[0] { 1.0 } else { 0.0 };
    let dcg: f64 = ranked_validity
        .iter()
        .enumerate()
        .map(|(i, v)| if *v { 1.0 / ((i + 2) as f64).log2() } else { 0.0 })
        .sum();
    let idcg: f64 = (0..valid).map(|i| 1.0 / ((i + 2) as f64).log2()).sum();
    Ok((p_at_1, dcg / idcg))
}
