//! Single-step entailment modules: three reasoning types in two directions
//! behind one interface, with a deterministic symbolic backend and a remote
//! HTTP client for generative backends.

pub mod remote;
pub mod rules;

use crate::fact::{Fact, FactId};
use crate::tree::{Direction, ReasoningType};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// A single-step inference request.
///
/// For deductive requests the inputs are the two premises. For abductive
/// requests `inputs[0]` is the conclusion-observation and `inputs[1]` the
/// known premise. `fresh_id` is the per-problem identifier allocated for the
/// generated fact.
#[derive(Debug, Clone)]
pub struct ModuleRequest {
    pub direction: Direction,
    pub rtype: ReasoningType,
    pub inputs: [Fact; 2],
    pub fresh_id: FactId,
}

impl ModuleRequest {
    /// The type-specific prefix string sent to prefixed generative backends,
    /// e.g. `"deductive substitution:"`.
    pub fn prefix(&self) -> String {
        format!("{} {}:", self.direction, self.rtype)
    }
}

/// A generated conclusion (deductive) or missing premise (abductive).
#[derive(Debug, Clone)]
pub struct ModuleResponse {
    pub output: Fact,
    pub confidence: f64,
}

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("transport failure talking to module backend: {0}")]
    Transport(String),
    #[error("module backend protocol violation: {0}")]
    Protocol(String),
    #[error("module backend refused the request (status {status})")]
    BackendRefused { status: u16 },
    #[error("no module available for {direction} {rtype}")]
    Unavailable {
        direction: Direction,
        rtype: ReasoningType,
    },
}

/// A single-step entailment module. `Ok(None)` means the module's pattern
/// does not apply to the inputs.
pub trait EntailmentModule: Send + Sync {
    fn infer(&self, request: &ModuleRequest) -> Result<Option<ModuleResponse>, ModuleError>;
}

/// The deterministic rule-based module. Applies only to facts that carry
/// structured forms; emits confidence 1.0.
#[derive(Debug, Default, Clone, Copy)]
pub struct SymbolicModule;

impl EntailmentModule for SymbolicModule {
    fn infer(&self, request: &ModuleRequest) -> Result<Option<ModuleResponse>, ModuleError> {
        let (Some(a), Some(b)) = (request.inputs[0].sym(), request.inputs[1].sym()) else {
            return Ok(None);
        };
        let generated = match request.direction {
            Direction::Deductive => rules::deduce(request.rtype, a, b),
            Direction::Abductive => rules::abduce(request.rtype, a, b),
        };
        Ok(generated.map(|sym| ModuleResponse {
            output: Fact::symbolic(request.fresh_id.clone(), sym),
            confidence: 1.0,
        }))
    }
}

/// One module per (direction, reasoning type).
#[derive(Clone)]
pub struct ModuleSet {
    modules: BTreeMap<(u8, ReasoningType), Arc<dyn EntailmentModule>>,
}

fn dir_key(d: Direction) -> u8 {
    match d {
        Direction::Deductive => 0,
        Direction::Abductive => 1,
    }
}

impl ModuleSet {
    pub fn empty() -> Self {
        ModuleSet {
            modules: BTreeMap::new(),
        }
    }

    /// The full symbolic module set: both directions, all three types.
    pub fn symbolic() -> Self {
        let shared: Arc<dyn EntailmentModule> = Arc::new(SymbolicModule);
        Self::uniform(shared)
    }

    /// Every (direction, type) slot served by the same module instance.
    pub fn uniform(module: Arc<dyn EntailmentModule>) -> Self {
        let mut modules = BTreeMap::new();
        for d in [Direction::Deductive, Direction::Abductive] {
            for t in ReasoningType::ALL {
                modules.insert((dir_key(d), t), Arc::clone(&module));
            }
        }
        ModuleSet { modules }
    }

    pub fn insert(
        &mut self,
        direction: Direction,
        rtype: ReasoningType,
        module: Arc<dyn EntailmentModule>,
    ) {
        self.modules.insert((dir_key(direction), rtype), module);
    }

    pub fn get(
        &self,
        direction: Direction,
        rtype: ReasoningType,
    ) -> Option<&Arc<dyn EntailmentModule>> {
        self.modules.get(&(dir_key(direction), rtype))
    }

    /// Reasoning types served for a direction, in deterministic order.
    pub fn rtypes(&self, direction: Direction) -> Vec<ReasoningType> {
        self.modules
            .keys()
            .filter(|(d, _)| *d == dir_key(direction))
            .map(|(_, t)| *t)
            .collect()
    }

    /// Run the module for the request, erroring when the slot is empty.
    pub fn infer(&self, request: &ModuleRequest) -> Result<Option<ModuleResponse>, ModuleError> {
        match self.get(request.direction, request.rtype) {
            Some(m) => m.infer(request),
            None => Err(ModuleError::Unavailable {
                direction: request.direction,
                rtype: request.rtype,
            }),
        }
    }
}
