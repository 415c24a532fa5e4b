//! Margin ranking losses for controller training.
//!
//! All losses are plain values for an external trainer; no gradients are
//! computed here. The margin loss is `max(0, x_neg - x_pos + m)`.

use crate::fact::FactId;
use crate::tree::EntailmentTree;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LossError {
    #[error("distractor fact score {score} leaves the log term undefined")]
    Domain { score: f64 },
}

fn margin(pos: f64, neg: f64, m: f64) -> f64 {
    (neg - pos + m).max(0.0)
}

/// Mean margin loss over (positive, negative) step-probability pairs.
pub fn step_rank_loss(pos_neg_pairs: &[(f64, f64)], m_step: f64) -> f64 {
    if pos_neg_pairs.is_empty() {
        return 0.0;
    }
    pos_neg_pairs
        .iter()
        .map(|(p, n)| margin(*p, *n, m_step))
        .sum::<f64>()
        / pos_neg_pairs.len() as f64
}

/// Fact loss: mean margin over depth-ordered positive pairs (the shallower
/// fact should outscore the deeper one) plus mean `-ln(1 - score)` over
/// distractor fact scores.
///
/// A distractor score of 1 (or outside [0, 1)) is reported as a domain
/// error rather than clamped.
pub fn fact_loss(
    ordered_pos_pairs: &[(f64, f64)],
    distractor_scores: &[f64],
    m_fact: f64,
) -> Result<f64, LossError> {
    let pair_term = if ordered_pos_pairs.is_empty() {
        0.0
    } else {
        ordered_pos_pairs
            .iter()
            .map(|(hi, lo)| margin(*hi, *lo, m_fact))
            .sum::<f64>()
            / ordered_pos_pairs.len() as f64
    };
    let distractor_term = if distractor_scores.is_empty() {
        0.0
    } else {
        let mut sum = 0.0;
        for &s in distractor_scores {
            if !(0.0..1.0).contains(&s) {
                return Err(LossError::Domain { score: s });
            }
            sum += -(1.0 - s).ln();
        }
        sum / distractor_scores.len() as f64
    };
    Ok(pair_term + distractor_term)
}

/// Margin loss for one sampled (positive, negative) state pair.
pub fn state_rank_loss(pos: f64, neg: f64, m_state: f64) -> f64 {
    margin(pos, neg, m_state)
}

/// Per-tree loss components.
#[derive(Debug, Clone, Copy, Default)]
pub struct TreeLosses {
    pub step: f64,
    pub fact: f64,
    pub state: f64,
}

impl TreeLosses {
    pub fn sum(&self) -> f64 {
        self.step + self.fact + self.state
    }
}

/// Total loss: the mean over trees of (step + fact + state).
pub fn total_loss(per_tree: &[TreeLosses]) -> f64 {
    if per_tree.is_empty() {
        return 0.0;
    }
    per_tree.iter().map(TreeLosses::sum).sum::<f64>() / per_tree.len() as f64
}

/// Depth-ordered gold-leaf pairs for the fact loss: every (shallower, deeper)
/// pair, where depth is the number of steps between the leaf and the root.
/// Pairs are emitted across branches as well as within one.
pub fn depth_ordered_fact_pairs(tree: &EntailmentTree) -> Vec<(FactId, FactId)> {
    let mut depth: BTreeMap<FactId, usize> = BTreeMap::new();
    depth.insert(tree.root_id().clone(), 0);
    // Walk steps root-down; topological order reversed guarantees parents
    // are seen before their inputs.
    for step in tree.topological_steps().iter().rev() {
        let d = depth.get(&step.output).copied().unwrap_or(0) + 1;
        for input in &step.inputs {
            depth.insert(input.clone(), d);
        }
    }
    let mut leaves: Vec<(FactId, usize)> = tree
        .leaves()
        .iter()
        .map(|f| (f.id().clone(), depth.get(f.id()).copied().unwrap_or(0)))
        .collect();
    leaves.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = Vec::new();
    for i in 0..leaves.len() {
        for j in 0..leaves.len() {
            if leaves[i].1 < leaves[j].1 {
                out.push((leaves[i].0.clone(), leaves[j].0.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fact::Fact;
    use crate::tree::Step;

    #[test]
    fn satisfied_margin_is_zero() {
        assert_eq!(step_rank_loss(&[(0.9, 0.1)], 0.1), 0.0);
    }

    #[test]
    fn violated_margin_is_linear() {
        assert!((step_rank_loss(&[(0.4, 0.5)], 0.1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn distractor_log_term_closed_form() {
        let loss = fact_loss(&[], &[0.5], 0.1).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn distractor_score_one_is_a_domain_error() {
        assert_eq!(
            fact_loss(&[], &[1.0], 0.1),
            Err(LossError::Domain { score: 1.0 })
        );
    }

    #[test]
    fn total_loss_averages_tree_sums() {
        let trees = [
            TreeLosses { step: 0.1, fact: 0.2, state: 0.3 },
            TreeLosses { step: 0.0, fact: 0.0, state: 0.4 },
        ];
        assert!((total_loss(&trees) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn losses_are_nonnegative_and_zero_iff_margins_met() {
        let mut rng = 0x9E3779B97F4A7C15u64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let pairs: Vec<(f64, f64)> = (0..5).map(|_| (next(), next())).collect();
            let m = next() * 0.5;
            let loss = step_rank_loss(&pairs, m);
            assert!(loss >= 0.0);
            let all_met = pairs.iter().all(|(p, n)| p - n >= m);
            assert_eq!(loss == 0.0, all_met);

            let (pos, neg) = (next(), next());
            let state = state_rank_loss(pos, neg, m);
            assert!(state >= 0.0);
            assert_eq!(state == 0.0, pos - neg >= m);
        }
    }

    #[test]
    fn depth_pairs_span_branches() {
        // sent1+sent2 -> int1; int1+sent3 -> hypothesis:
        // sent3 at depth 1, sent1/sent2 at depth 2.
        let leaves: Vec<Fact> = (1..=3)
            .map(|k| Fact::textual(format!("sent{k}"), format!("f{k}")))
            .collect();
        let tree = EntailmentTree::new(
            Fact::textual("hypothesis", "t"),
            leaves,
            vec![Fact::textual("int1", "i")],
            vec![
                Step::deductive(vec![FactId::leaf(1), FactId::leaf(2)], FactId::intermediate(1)),
                Step::deductive(
                    vec![FactId::intermediate(1), FactId::leaf(3)],
                    FactId::hypothesis(),
                ),
            ],
        );
        let pairs = depth_ordered_fact_pairs(&tree);
        assert_eq!(
            pairs,
            vec![
                (FactId::leaf(3), FactId::leaf(1)),
                (FactId::leaf(3), FactId::leaf(2)),
            ]
        );
    }
}
