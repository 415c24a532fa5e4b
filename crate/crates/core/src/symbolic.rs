//! Structured fact representation and canonical forms.
//!
//! A `SymbolicFact` is the machine-checkable form of a knowledge sentence.
//! Entity and predicate names come from a finite alphabet; conjunctions are
//! stored with their conjuncts in canonical order so structural equality is
//! order-insensitive.

use std::fmt;

/// Structured form of a fact sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolicFact {
    /// A predicate applied to one or more entities.
    Atom { pred: String, args: Vec<String> },
    /// `sub` is a kind of `sup`.
    IsA { sub: String, sup: String },
    /// If the antecedent holds then the consequent holds.
    Implies(Box<SymbolicFact>, Box<SymbolicFact>),
    /// Both conjuncts hold. Always normalized so left <= right.
    Conj(Box<SymbolicFact>, Box<SymbolicFact>),
}

impl SymbolicFact {
    pub fn atom(pred: impl Into<String>, args: &[&str]) -> Self {
        SymbolicFact::Atom {
            pred: pred.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn isa(sub: impl Into<String>, sup: impl Into<String>) -> Self {
        SymbolicFact::IsA {
            sub: sub.into(),
            sup: sup.into(),
        }
    }

    pub fn implies(antecedent: SymbolicFact, consequent: SymbolicFact) -> Self {
        SymbolicFact::Implies(Box::new(antecedent), Box::new(consequent))
    }

    /// Conjunction with canonical ordering: the lexicographically smaller
    /// serialization goes left.
    pub fn conj(a: SymbolicFact, b: SymbolicFact) -> Self {
        if a.canonical_key() <= b.canonical_key() {
            SymbolicFact::Conj(Box::new(a), Box::new(b))
        } else {
            SymbolicFact::Conj(Box::new(b), Box::new(a))
        }
    }

    /// Deterministic serialization used for canonical ordering.
    pub fn canonical_key(&self) -> String {
        self.to_string()
    }

    /// True if `entity` occurs anywhere in this fact.
    pub fn mentions_entity(&self, entity: &str) -> bool {
        self.count_entity(entity) > 0
    }

    /// Number of occurrences of `entity` across the whole structure.
    pub fn count_entity(&self, entity: &str) -> usize {
        match self {
            SymbolicFact::Atom { args, .. } => args.iter().filter(|a| *a == entity).count(),
            SymbolicFact::IsA { sub, sup } => {
                (sub == entity) as usize + (sup == entity) as usize
            }
            SymbolicFact::Implies(a, c) => a.count_entity(entity) + c.count_entity(entity),
            SymbolicFact::Conj(l, r) => l.count_entity(entity) + r.count_entity(entity),
        }
    }

    /// Replace every occurrence of entity `from` with `to`, renormalizing
    /// conjunction order where the replacement changed it.
    pub fn replace_entity(&self, from: &str, to: &str) -> SymbolicFact {
        match self {
            SymbolicFact::Atom { pred, args } => SymbolicFact::Atom {
                pred: pred.clone(),
                args: args
                    .iter()
                    .map(|a| if a == from { to.to_string() } else { a.clone() })
                    .collect(),
            },
            SymbolicFact::IsA { sub, sup } => SymbolicFact::IsA {
                sub: if sub == from { to.to_string() } else { sub.clone() },
                sup: if sup == from { to.to_string() } else { sup.clone() },
            },
            SymbolicFact::Implies(a, c) => SymbolicFact::implies(
                a.replace_entity(from, to),
                c.replace_entity(from, to),
            ),
            SymbolicFact::Conj(l, r) => {
                SymbolicFact::conj(l.replace_entity(from, to), r.replace_entity(from, to))
            }
        }
    }

    /// True if `needle` equals this fact or one of its subterms.
    pub fn contains_subterm(&self, needle: &SymbolicFact) -> bool {
        if self == needle {
            return true;
        }
        match self {
            SymbolicFact::Atom { .. } | SymbolicFact::IsA { .. } => false,
            SymbolicFact::Implies(a, c) => a.contains_subterm(needle) || c.contains_subterm(needle),
            SymbolicFact::Conj(l, r) => l.contains_subterm(needle) || r.contains_subterm(needle),
        }
    }

    /// Distinct entity names, sorted.
    pub fn entities(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_entities(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_entities(&self, out: &mut Vec<String>) {
        match self {
            SymbolicFact::Atom { args, .. } => out.extend(args.iter().cloned()),
            SymbolicFact::IsA { sub, sup } => {
                out.push(sub.clone());
                out.push(sup.clone());
            }
            SymbolicFact::Implies(a, c) => {
                a.collect_entities(out);
                c.collect_entities(out);
            }
            SymbolicFact::Conj(l, r) => {
                l.collect_entities(out);
                r.collect_entities(out);
            }
        }
    }

    /// Entity and predicate symbols as a sorted multiset.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out.sort();
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            SymbolicFact::Atom { pred, args } => {
                out.push(pred.clone());
                out.extend(args.iter().cloned());
            }
            SymbolicFact::IsA { sub, sup } => {
                out.push(sub.clone());
                out.push(sup.clone());
            }
            SymbolicFact::Implies(a, c) => {
                a.collect_symbols(out);
                c.collect_symbols(out);
            }
            SymbolicFact::Conj(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
        }
    }

    /// Render the fact as an English-like sentence using fixed templates, so
    /// that token overlap between rendered sentences mirrors symbol overlap.
    pub fn render(&self) -> String {
        match self {
            SymbolicFact::Atom { pred, args } => match args.len() {
                0 => pred.clone(),
                1 => format!("the {} can {}", args[0], pred),
                _ => {
                    let mut s = format!("the {} {}", args[0], pred);
                    for a in &args[1..] {
                        s.push_str(" the ");
                        s.push_str(a);
                    }
                    s
                }
            },
            SymbolicFact::IsA { sub, sup } => format!("{} is a kind of {}", sub, sup),
            SymbolicFact::Implies(a, c) => format!("if {} then {}", a.render(), c.render()),
            SymbolicFact::Conj(l, r) => format!("{} and {}", l.render(), r.render()),
        }
    }
}

impl fmt::Display for SymbolicFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicFact::Atom { pred, args } => write!(f, "atom({},{})", pred, args.join(",")),
            SymbolicFact::IsA { sub, sup } => write!(f, "isa({},{})", sub, sup),
            SymbolicFact::Implies(a, c) => write!(f, "implies({},{})", a, c),
            SymbolicFact::Conj(l, r) => write!(f, "conj({},{})", l, r),
        }
    }
}

/// Parse the canonical serialization produced by `Display`. Inverse of
/// `to_string` up to conjunction reordering (the result is renormalized).
pub fn parse_canonical(text: &str) -> Option<SymbolicFact> {
    let s = text.trim();
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    let inner = &s[open + 1..s.len() - 1];
    match &s[..open] {
        "atom" => {
            let mut parts = split_top_level(inner);
            if parts.is_empty() || parts.iter().any(|p| p.contains('(')) {
                return None;
            }
            let pred = parts.remove(0).trim().to_string();
            Some(SymbolicFact::Atom {
                pred,
                args: parts.into_iter().map(|p| p.trim().to_string()).collect(),
            })
        }
        "isa" => {
            let parts = split_top_level(inner);
            if parts.len() != 2 {
                return None;
            }
            Some(SymbolicFact::isa(parts[0].trim(), parts[1].trim()))
        }
        "implies" => {
            let parts = split_top_level(inner);
            if parts.len() != 2 {
                return None;
            }
            Some(SymbolicFact::implies(
                parse_canonical(parts[0])?,
                parse_canonical(parts[1])?,
            ))
        }
        "conj" => {
            let parts = split_top_level(inner);
            if parts.len() != 2 {
                return None;
            }
            Some(SymbolicFact::conj(
                parse_canonical(parts[0])?,
                parse_canonical(parts[1])?,
            ))
        }
        _ => None,
    }
}

/// Split on commas at parenthesis depth zero.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_is_order_insensitive() {
        let a = SymbolicFact::atom("erupts", &["volcano"]);
        let b = SymbolicFact::atom("glows", &["lava"]);
        assert_eq!(
            SymbolicFact::conj(a.clone(), b.clone()),
            SymbolicFact::conj(b, a)
        );
    }

    #[test]
    fn replace_entity_hits_every_occurrence() {
        let f = SymbolicFact::atom("links", &["x", "y", "x"]);
        let g = f.replace_entity("x", "z");
        assert_eq!(g, SymbolicFact::atom("links", &["z", "y", "z"]));
        assert_eq!(g.count_entity("x"), 0);
    }

    #[test]
    fn replace_renormalizes_conj_order() {
        let a = SymbolicFact::atom("aa", &["x"]);
        let b = SymbolicFact::atom("bb", &["x"]);
        let c = SymbolicFact::conj(a, b);
        // Renaming can flip the canonical order of the conjuncts.
        let c2 = c.replace_entity("x", "x2");
        match &c2 {
            SymbolicFact::Conj(l, r) => assert!(l.canonical_key() <= r.canonical_key()),
            _ => panic!("still a conjunction"),
        }
    }

    #[test]
    fn subterm_check() {
        let a = SymbolicFact::atom("p", &["x"]);
        let b = SymbolicFact::atom("q", &["y"]);
        let c = SymbolicFact::conj(a.clone(), b.clone());
        assert!(c.contains_subterm(&a));
        assert!(c.contains_subterm(&c));
        assert!(!a.contains_subterm(&c));
        assert!(!c.contains_subterm(&SymbolicFact::atom("p", &["y"])));
    }

    #[test]
    fn symbols_multiset_is_sorted() {
        let f = SymbolicFact::implies(
            SymbolicFact::atom("p", &["x"]),
            SymbolicFact::atom("p", &["x", "c"]),
        );
        assert_eq!(f.symbols(), vec!["c", "p", "p", "x", "x"]);
    }

    #[test]
    fn canonical_form_round_trips() {
        let facts = [
            SymbolicFact::atom("p", &["x", "c"]),
            SymbolicFact::isa("x", "y"),
            SymbolicFact::implies(
                SymbolicFact::atom("p", &["x"]),
                SymbolicFact::conj(SymbolicFact::atom("q", &["x"]), SymbolicFact::atom("r", &["x"])),
            ),
        ];
        for f in facts {
            assert_eq!(parse_canonical(&f.to_string()), Some(f));
        }
        assert_eq!(parse_canonical("garbage"), None);
        assert_eq!(parse_canonical("isa(x)"), None);
    }

    #[test]
    fn render_templates() {
        assert_eq!(
            SymbolicFact::isa("volcano", "landform").render(),
            "volcano is a kind of landform"
        );
        let f = SymbolicFact::implies(
            SymbolicFact::atom("glow", &["lava"]),
            SymbolicFact::atom("warm", &["cave"]),
        );
        assert_eq!(f.render(), "if the lava can glow then the cave can warm");
    }
}
