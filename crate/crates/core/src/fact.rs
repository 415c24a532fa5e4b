//! Fact identifiers and the fact value type.

use crate::judge::content_tokens;
use crate::symbolic::SymbolicFact;
use std::cmp::Ordering;
use std::fmt;

/// Role of a node, derivable from its identifier prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// `sent<k>`: a provided knowledge sentence.
    Leaf,
    /// `int<k>`: a generated intermediate conclusion.
    Intermediate,
    /// `hypothesis`: the proof target.
    Hypothesis,
    /// Anything else (tolerated on input, never produced).
    Other,
}

/// Identifier of a fact within one problem (`sent3`, `int1`, `hypothesis`).
///
/// Ordering is role-major (leaves, then intermediates, then the hypothesis)
/// with numeric suffix comparison inside a role, so `sent2 < sent10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactId(String);

impl FactId {
    pub fn new(id: impl Into<String>) -> Self {
        FactId(id.into())
    }

    pub fn leaf(k: usize) -> Self {
        FactId(format!("sent{}", k))
    }

    pub fn intermediate(k: usize) -> Self {
        FactId(format!("int{}", k))
    }

    pub fn hypothesis() -> Self {
        FactId("hypothesis".to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn role(&self) -> Role {
        if self.0 == "hypothesis" {
            Role::Hypothesis
        } else if self.0.starts_with("sent") && self.0[4..].chars().all(|c| c.is_ascii_digit()) {
            Role::Leaf
        } else if self.0.starts_with("int") && self.0[3..].chars().all(|c| c.is_ascii_digit()) {
            Role::Intermediate
        } else {
            Role::Other
        }
    }

    /// Numeric suffix for `sent<k>` / `int<k>` ids.
    pub fn index(&self) -> Option<usize> {
        match self.role() {
            Role::Leaf => self.0[4..].parse().ok(),
            Role::Intermediate => self.0[3..].parse().ok(),
            _ => None,
        }
    }
}

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Ord for FactId {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |r: Role| match r {
            Role::Leaf => 0u8,
            Role::Intermediate => 1,
            Role::Other => 2,
            Role::Hypothesis => 3,
        };
        rank(self.role())
            .cmp(&rank(other.role()))
            .then_with(|| match (self.index(), other.index()) {
                (Some(a), Some(b)) => a.cmp(&b),
                _ => self.0.cmp(&other.0),
            })
    }
}

impl PartialOrd for FactId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<&str> for FactId {
    fn from(s: &str) -> Self {
        FactId::new(s)
    }
}

/// A knowledge sentence with an identifier, surface text, and optional
/// structured form. Immutable after construction; token and symbol views
/// are precomputed so similarity checks stay cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    id: FactId,
    text: String,
    sym: Option<SymbolicFact>,
    tokens: Vec<String>,
    symbols: Vec<String>,
}

impl Fact {
    pub fn new(id: FactId, text: impl Into<String>, sym: Option<SymbolicFact>) -> Self {
        let text = text.into();
        let tokens = content_tokens(&text);
        let symbols = sym.as_ref().map(|s| s.symbols()).unwrap_or_default();
        Fact {
            id,
            text,
            sym,
            tokens,
            symbols,
        }
    }

    /// Text-only fact (no structured form).
    pub fn textual(id: impl Into<String>, text: impl Into<String>) -> Self {
        Fact::new(FactId::new(id), text, None)
    }

    /// Fact whose text is rendered from its structured form.
    pub fn symbolic(id: FactId, sym: SymbolicFact) -> Self {
        let text = sym.render();
        Fact::new(id, text, Some(sym))
    }

    pub fn id(&self) -> &FactId {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn sym(&self) -> Option<&SymbolicFact> {
        self.sym.as_ref()
    }

    /// Sorted content tokens of the surface text.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Sorted entity/predicate symbol multiset (empty without a structured form).
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Same fact under a different identifier.
    pub fn with_id(&self, id: FactId) -> Fact {
        let mut f = self.clone();
        f.id = id;
        f
    }

    /// True if the two facts share at least one content token, or at least
    /// one entity/predicate symbol when both carry structured forms.
    pub fn overlaps(&self, other: &Fact) -> bool {
        if !self.symbols.is_empty() && !other.symbols.is_empty() {
            sorted_intersects(&self.symbols, &other.symbols)
        } else {
            sorted_intersects(&self.tokens, &other.tokens)
        }
    }
}

/// True if two sorted slices share an element.
pub(crate) fn sorted_intersects(a: &[String], b: &[String]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => return true,
        }
    }
    false
}
