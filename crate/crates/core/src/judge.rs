//! Sentence-pair similarity judges.
//!
//! A judge maps a pair of facts to a similarity in [0, 1]. It is the single
//! seam where a learned similarity model can be plugged in; the defaults are
//! deterministic lexical and structural judges.

use crate::fact::{sorted_intersects, Fact};

/// Words ignored when tokenizing sentences, including the fixed template
/// fillers used to render structured facts.
const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "can", "do", "does", "for", "from", "has",
    "have", "if", "in", "into", "is", "it", "its", "kind", "may", "means", "most", "of", "on",
    "or", "so", "than", "that", "the", "then", "these", "they", "this", "to", "will", "with",
    "would",
];

/// Lowercased, punctuation-stripped, stopword-filtered tokens, sorted.
pub fn content_tokens(text: &str) -> Vec<String> {
    let mut toks: Vec<String> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .filter(|t| !STOPWORDS.contains(&t.as_str()))
        .collect();
    toks.sort();
    toks
}

/// Jaccard similarity of two sorted multisets.
fn jaccard_sorted(a: &[String], b: &[String]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j) = (0usize, 0usize);
    let mut inter = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Pluggable sentence-pair similarity in [0, 1].
pub trait SimilarityJudge: Send + Sync {
    fn similarity(&self, a: &Fact, b: &Fact) -> f64;
}

/// Token-level Jaccard over content tokens.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalJudge;

impl SimilarityJudge for LexicalJudge {
    fn similarity(&self, a: &Fact, b: &Fact) -> f64 {
        // Token views are deduplicated here: token-level Jaccard is over sets.
        let mut ta = a.tokens().to_vec();
        let mut tb = b.tokens().to_vec();
        ta.dedup();
        tb.dedup();
        jaccard_sorted(&ta, &tb)
    }
}

/// 1.0 on structural equality of the symbolic forms, otherwise Jaccard over
/// symbol multisets. Falls back to the lexical judge when either side lacks
/// a structured form.
#[derive(Debug, Clone, Copy, Default)]
pub struct SymbolicJudge;

impl SimilarityJudge for SymbolicJudge {
    fn similarity(&self, a: &Fact, b: &Fact) -> f64 {
        match (a.sym(), b.sym()) {
            (Some(sa), Some(sb)) => {
                if sa == sb {
                    1.0
                } else {
                    jaccard_sorted(a.symbols(), b.symbols())
                }
            }
            _ => LexicalJudge.similarity(a, b),
        }
    }
}

/// True if the facts share at least one content token (used by the
/// word-overlap step filter for surface-only facts).
pub fn share_content_token(a: &Fact, b: &Fact) -> bool {
    sorted_intersects(a.tokens(), b.tokens())
}
