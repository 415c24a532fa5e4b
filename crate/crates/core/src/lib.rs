//! Entailment tree generation and evaluation.
//!
//! Given a hypothesis and a set of fact sentences, this crate searches for a
//! multi-step entailment tree proving the hypothesis: single-step reasoning
//! modules (deductive and abductive; substitution, conjunction, if-then)
//! generate intermediate conclusions, a scoring controller ranks steps,
//! facts, and states, and beam search assembles the best tree. The
//! evaluation side scores predicted trees against gold annotations (leaf,
//! step, and intermediate F1/AllCorrect plus Overall AllCorrect) and ranked
//! candidate pools (P@1, NDCG).
//!
//! ```
//! use entail_core::controller::lexical::LexicalBackend;
//! use entail_core::entailment::ModuleSet;
//! use entail_core::fact::{Fact, FactId};
//! use entail_core::judge::SymbolicJudge;
//! use entail_core::search::{reason, SearchConfig, SearchMode};
//! use entail_core::symbolic::SymbolicFact;
//!
//! // "volcano is a kind of landform" + "landforms erode" prove
//! // "volcanoes erode" in one substitution step.
//! let facts = vec![
//!     Fact::symbolic(FactId::leaf(1), SymbolicFact::isa("volcano", "landform")),
//!     Fact::symbolic(FactId::leaf(2), SymbolicFact::atom("erode", &["landform"])),
//! ];
//! let hypothesis = Fact::symbolic(FactId::hypothesis(), SymbolicFact::atom("erode", &["volcano"]));
//!
//! let config = SearchConfig { mode: SearchMode::Task1, ..SearchConfig::default() };
//! let backend = LexicalBackend::new(SymbolicJudge);
//! let (result, _trace) = reason(
//!     &hypothesis, &facts, &config, &ModuleSet::symbolic(), &backend, &SymbolicJudge,
//! ).unwrap();
//!
//! assert!(result.proved);
//! assert_eq!(
//!     entail_core::linear::serialize_tree(&result.best_tree),
//!     "sent1 & sent2 -> hypothesis;",
//! );
//! ```

pub mod controller;
pub mod dataio;
pub mod entailment;
pub mod evaluation;
pub mod fact;
pub mod judge;
pub mod linear;
pub mod search;
pub mod state;
pub mod symbolic;
pub mod tree;

pub use fact::{Fact, FactId, Role};
pub use symbolic::SymbolicFact;
pub use tree::{Direction, EntailmentTree, ReasoningType, Step, Violation};
