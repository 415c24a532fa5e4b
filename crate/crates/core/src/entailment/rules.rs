//! Deterministic single-step inference rules over structured facts.
//!
//! Three reasoning types, each with a forward (deduce) and backward (abduce)
//! reading:
//!
//! * substitution: `IsA(x, y)` plus a premise mentioning `y` yields that
//!   premise with every `y` replaced by `x`;
//! * conjunction: `A` plus `B` yields `Conj(A, B)`;
//! * if-then: `Implies(A, B)` plus `A` yields `B`.
//!
//! No rule ever returns a result structurally equal to one of its inputs.

use crate::symbolic::SymbolicFact;
use crate::tree::ReasoningType;
use thiserror::Error;

/// Forward inference. Premise order is immaterial: both orders are tried,
/// `(p1, p2)` first. Absent means the pattern does not fire.
pub fn deduce(
    rtype: ReasoningType,
    p1: &SymbolicFact,
    p2: &SymbolicFact,
) -> Option<SymbolicFact> {
    let conclusion = match rtype {
        ReasoningType::Substitution => {
            substitute(p1, p2).or_else(|| substitute(p2, p1))
        }
        ReasoningType::Conjunction => {
            if p1 == p2 {
                None
            } else {
                Some(SymbolicFact::conj(p1.clone(), p2.clone()))
            }
        }
        ReasoningType::IfThen => apply_implication(p1, p2).or_else(|| apply_implication(p2, p1)),
        ReasoningType::Unknown => None,
    }?;
    if &conclusion == p1 || &conclusion == p2 {
        return None;
    }
    Some(conclusion)
}

/// `rule = IsA(x, y)`, `target` mentions `y`: replace every `y` with `x`.
fn substitute(rule: &SymbolicFact, target: &SymbolicFact) -> Option<SymbolicFact> {
    let SymbolicFact::IsA { sub, sup } = rule else {
        return None;
    };
    if sub == sup || !target.mentions_entity(sup) {
        return None;
    }
    Some(target.replace_entity(sup, sub))
}

/// `rule = Implies(a, c)`, `premise` structurally equals `a`: yield `c`.
fn apply_implication(rule: &SymbolicFact, premise: &SymbolicFact) -> Option<SymbolicFact> {
    let SymbolicFact::Implies(a, c) = rule else {
        return None;
    };
    (a.as_ref() == premise).then(|| c.as_ref().clone())
}

/// Backward inference: find the missing premise `m` with
/// `deduce(rtype, m, premise) == conclusion`.
///
/// Only structurally forced completions are returned:
///
/// * substitution — premise `IsA(x, y)`, conclusion mentioning `x` exactly
///   once and `y` not at all, yields the conclusion with `x` replaced by `y`
///   (several `x` occurrences admit several completions, so that is absent);
/// * conjunction — `Conj(A, B)` minus one conjunct yields the other;
/// * if-then — conclusion `B` with premise `Implies(A, B)` yields `A`;
///   otherwise conclusion `B` with premise `A` yields `Implies(A, B)`.
pub fn abduce(
    rtype: ReasoningType,
    conclusion: &SymbolicFact,
    premise: &SymbolicFact,
) -> Option<SymbolicFact> {
    if conclusion == premise {
        return None;
    }
    let candidates: Vec<SymbolicFact> = match rtype {
        ReasoningType::Substitution => {
            let SymbolicFact::IsA { sub, sup } = premise else {
                return None;
            };
            if sub == sup || conclusion.mentions_entity(sup) || conclusion.count_entity(sub) != 1 {
                return None;
            }
            let candidate = conclusion.replace_entity(sub, sup);
            if deduce(rtype, &candidate, premise).as_ref() != Some(conclusion) {
                return None;
            }
            // When the premise is itself an IsA fact it may equally have
            // acted as the substitution target, with the missing premise
            // being some rule IsA(x, y) rewriting it into the conclusion.
            // Two distinct readings means no structurally forced completion.
            let rule_completion_exists = premise.entities().iter().any(|y| {
                conclusion
                    .entities()
                    .iter()
                    .any(|x| x != y && &premise.replace_entity(y, x) == conclusion)
            });
            if rule_completion_exists {
                return None;
            }
            vec![candidate]
        }
        ReasoningType::Conjunction => {
            let SymbolicFact::Conj(l, r) = conclusion else {
                return None;
            };
            if l.as_ref() == premise {
                vec![r.as_ref().clone()]
            } else if r.as_ref() == premise {
                vec![l.as_ref().clone()]
            } else {
                return None;
            }
        }
        ReasoningType::IfThen => {
            let mut cands = Vec::new();
            if let SymbolicFact::Implies(a, c) = premise {
                if c.as_ref() == conclusion {
                    cands.push(a.as_ref().clone());
                }
            }
            cands.push(SymbolicFact::implies(premise.clone(), conclusion.clone()));
            cands
        }
        ReasoningType::Unknown => return None,
    };
    candidates
        .into_iter()
        .find(|m| m != premise && m != conclusion)
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("step is reproduced by {0} reasoning types")]
    AmbiguousType(usize),
}

/// The unique reasoning type that reproduces `c` from the premises, if any.
pub fn classify_step(
    p1: &SymbolicFact,
    p2: &SymbolicFact,
    c: &SymbolicFact,
) -> Result<Option<ReasoningType>, ClassifyError> {
    let matches: Vec<ReasoningType> = ReasoningType::ALL
        .into_iter()
        .filter(|t| deduce(*t, p1, p2).as_ref() == Some(c))
        .collect();
    match matches.len() {
        0 => Ok(None),
        1 => Ok(Some(matches[0])),
        n => Err(ClassifyError::AmbiguousType(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isa(a: &str, b: &str) -> SymbolicFact {
        SymbolicFact::isa(a, b)
    }

    #[test]
    fn substitution_replaces_the_category() {
        let rule = isa("volcano", "landform");
        let prem = SymbolicFact::atom("erupts", &["landform"]);
        assert_eq!(
            deduce(ReasoningType::Substitution, &rule, &prem),
            Some(SymbolicFact::atom("erupts", &["volcano"]))
        );
        // order-insensitive
        assert_eq!(
            deduce(ReasoningType::Substitution, &prem, &rule),
            Some(SymbolicFact::atom("erupts", &["volcano"]))
        );
    }

    #[test]
    fn substitution_needs_a_mention() {
        let rule = isa("volcano", "landform");
        let prem = SymbolicFact::atom("shines", &["star"]);
        assert_eq!(deduce(ReasoningType::Substitution, &rule, &prem), None);
    }

    #[test]
    fn ifthen_needs_exact_antecedent() {
        let a = SymbolicFact::atom("wet", &["field"]);
        let b = SymbolicFact::atom("muddy", &["field"]);
        let rule = SymbolicFact::implies(a.clone(), b.clone());
        assert_eq!(deduce(ReasoningType::IfThen, &rule, &a), Some(b));
        let other = SymbolicFact::atom("dry", &["field"]);
        assert_eq!(deduce(ReasoningType::IfThen, &rule, &other), None);
    }

    #[test]
    fn conjunction_is_symmetric() {
        let a = SymbolicFact::atom("p", &["x"]);
        let b = SymbolicFact::atom("q", &["x"]);
        assert_eq!(
            deduce(ReasoningType::Conjunction, &a, &b),
            deduce(ReasoningType::Conjunction, &b, &a)
        );
    }

    #[test]
    fn no_rule_repeats_a_premise() {
        let a = SymbolicFact::atom("p", &["x"]);
        assert_eq!(deduce(ReasoningType::Conjunction, &a, &a), None);
        // IsA applied to an identical IsA degenerates and is refused.
        let rule = isa("x", "y");
        assert_eq!(
            deduce(ReasoningType::Substitution, &rule, &rule),
            Some(isa("x", "x"))
        );
    }

    #[test]
    fn abduce_removes_a_conjunct() {
        let a = SymbolicFact::atom("p", &["x"]);
        let b = SymbolicFact::atom("q", &["x"]);
        let c = SymbolicFact::conj(a.clone(), b.clone());
        assert_eq!(abduce(ReasoningType::Conjunction, &c, &a), Some(b));
    }

    #[test]
    fn abduce_inverts_substitution() {
        let conclusion = SymbolicFact::atom("erupts", &["volcano"]);
        let premise = isa("volcano", "landform");
        assert_eq!(
            abduce(ReasoningType::Substitution, &conclusion, &premise),
            Some(SymbolicFact::atom("erupts", &["landform"]))
        );
    }

    #[test]
    fn abduce_substitution_is_absent_when_ambiguous() {
        // Two occurrences of the substituted entity admit several completions.
        let conclusion = SymbolicFact::atom("links", &["volcano", "volcano"]);
        let premise = isa("volcano", "landform");
        assert_eq!(
            abduce(ReasoningType::Substitution, &conclusion, &premise),
            None
        );
    }

    #[test]
    fn abduce_ifthen_prefers_the_rule_premise() {
        let a = SymbolicFact::atom("wet", &["field"]);
        let b = SymbolicFact::atom("muddy", &["field"]);
        let rule = SymbolicFact::implies(a.clone(), b.clone());
        // Given the conclusion and the rule, the missing premise is the antecedent.
        assert_eq!(abduce(ReasoningType::IfThen, &b, &rule), Some(a.clone()));
        // Given the conclusion and the antecedent, the missing premise is the rule.
        assert_eq!(abduce(ReasoningType::IfThen, &b, &a), Some(rule));
    }

    #[test]
    fn classify_recovers_the_unique_type() {
        let rule = isa("a", "b");
        let prem = SymbolicFact::atom("p", &["b"]);
        let c = SymbolicFact::atom("p", &["a"]);
        assert_eq!(
            classify_step(&rule, &prem, &c),
            Ok(Some(ReasoningType::Substitution))
        );
        let x = SymbolicFact::atom("p", &["u"]);
        let y = SymbolicFact::atom("q", &["u"]);
        assert_eq!(
            classify_step(&x, &y, &SymbolicFact::conj(x.clone(), y.clone())),
            Ok(Some(ReasoningType::Conjunction))
        );
        assert_eq!(classify_step(&x, &y, &SymbolicFact::atom("r", &["u"])), Ok(None));
    }
}
