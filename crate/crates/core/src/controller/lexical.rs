//! Deterministic scoring backend built from a similarity judge and the
//! symbolic rule engine.
//!
//! Fact and cls scores come from the judge. Raw step scores separate four
//! bands so ranking is stable and meaningful without any training:
//!
//! * deductive, a rule fires:      1.5 + 0.49 * mean premise-target similarity
//! * abductive, a rule fires:      1.0 + 0.49 * fact-target similarity
//! * deductive, nothing fires:     0.5 + 0.49 * mean premise-target similarity
//! * abductive, nothing fires:           0.49 * fact-target similarity
//!
//! A pair on which no rule fires therefore always ranks strictly below any
//! firing pair, and forward steps are preferred at equal footing. Conjunction
//! counts as firing only when its conclusion is a subterm of the target's
//! structured form: the bare rule fires on any two facts, which would erase
//! step discrimination entirely.

use super::{ScorerBackend, StepKind};
use crate::entailment::rules;
use crate::fact::Fact;
use crate::judge::SimilarityJudge;
use crate::state::ReasoningState;
use crate::tree::ReasoningType;

pub struct LexicalBackend<J> {
    judge: J,
}

impl<J: SimilarityJudge> LexicalBackend<J> {
    pub fn new(judge: J) -> Self {
        LexicalBackend { judge }
    }

    pub fn judge(&self) -> &J {
        &self.judge
    }

    fn deduction_fires(&self, target: &Fact, a: &Fact, b: &Fact) -> bool {
        let (Some(sa), Some(sb)) = (a.sym(), b.sym()) else {
            return false;
        };
        for rtype in ReasoningType::ALL {
            let Some(conclusion) = rules::deduce(rtype, sa, sb) else {
                continue;
            };
            if rtype == ReasoningType::Conjunction {
                match target.sym() {
                    Some(t) if t.contains_subterm(&conclusion) => return true,
                    _ => continue,
                }
            }
            return true;
        }
        false
    }

    fn abduction_fires(&self, target: &Fact, known: &Fact) -> bool {
        let (Some(st), Some(sk)) = (target.sym(), known.sym()) else {
            return false;
        };
        ReasoningType::ALL
            .into_iter()
            .any(|rtype| rules::abduce(rtype, st, sk).is_some())
    }
}

impl<J: SimilarityJudge> ScorerBackend for LexicalBackend<J> {
    fn fact_score(&self, target: &Fact, fact: &Fact) -> f64 {
        self.judge.similarity(target, fact).clamp(0.0, 1.0)
    }

    fn raw_step_score(&self, state: &ReasoningState, kind: &StepKind) -> f64 {
        let target = state.target();
        match kind {
            StepKind::DeductivePair(a, b) => {
                let (Some(fa), Some(fb)) = (state.fact(a), state.fact(b)) else {
                    return 0.0;
                };
                let tiebreak =
                    0.5 * (self.fact_score(target, fa) + self.fact_score(target, fb));
                let base = if self.deduction_fires(target, fa, fb) {
                    1.5
                } else {
                    0.5
                };
                base + 0.49 * tiebreak
            }
            StepKind::AbductivePair(k) => {
                let Some(fk) = state.fact(k) else {
                    return 0.0;
                };
                let tiebreak = self.fact_score(target, fk);
                let base = if self.abduction_fires(target, fk) {
                    1.0
                } else {
                    0.0
                };
                base + 0.49 * tiebreak
            }
        }
    }

    fn cls_score(&self, state: &ReasoningState) -> f64 {
        state
            .facts()
            .iter()
            .map(|f| self.fact_score(state.target(), f))
            .fold(0.0, f64::max)
    }
}
