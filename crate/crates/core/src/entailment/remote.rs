//! HTTP client for generative module backends.
//!
//! Wire protocol: JSON over `POST {endpoint}/infer`. Request
//! `{id, direction, rtype, prefix, premises: [a, b]}`, response
//! `{id, output, confidence}`. The type-specific prefix is included so
//! prefixed generative backends work unchanged.

use super::{EntailmentModule, ModuleError, ModuleRequest, ModuleResponse};
use crate::fact::Fact;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub timeout: Duration,
    pub retries: u32,
    /// Maximum concurrent requests from this client.
    pub max_in_flight: usize,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            timeout: Duration::from_secs(30),
            retries: 2,
            max_in_flight: 4,
        }
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    id: u64,
    direction: &'a str,
    rtype: &'a str,
    prefix: String,
    premises: [&'a str; 2],
}

#[derive(Deserialize)]
struct WireResponse {
    id: u64,
    output: String,
    confidence: f64,
}

/// Counting gate bounding in-flight requests.
struct Gate {
    slots: Mutex<usize>,
    freed: Condvar,
}

impl Gate {
    fn new(n: usize) -> Self {
        Gate {
            slots: Mutex::new(n.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> GateGuard<'_> {
        let mut slots = self.slots.lock().unwrap();
        while *slots == 0 {
            slots = self.freed.wait(slots).unwrap();
        }
        *slots -= 1;
        GateGuard { gate: self }
    }
}

struct GateGuard<'a> {
    gate: &'a Gate,
}

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.gate.slots.lock().unwrap() += 1;
        self.gate.freed.notify_one();
    }
}

/// Module backed by a remote inference endpoint. Responses are matched to
/// requests by an opaque id; transport failures are retried.
pub struct RemoteModule {
    agent: ureq::Agent,
    infer_url: String,
    config: RemoteConfig,
    next_id: AtomicU64,
    gate: Gate,
}

impl RemoteModule {
    pub fn new(endpoint: &str, config: RemoteConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        RemoteModule {
            agent,
            infer_url: format!("{}/infer", endpoint.trim_end_matches('/')),
            next_id: AtomicU64::new(1),
            gate: Gate::new(config.max_in_flight),
            config,
        }
    }

    fn call(&self, wire: &WireRequest<'_>) -> Result<WireResponse, ModuleError> {
        let mut last_transport: Option<String> = None;
        for _ in 0..=self.config.retries {
            match self.agent.post(&self.infer_url).send_json(wire) {
                Ok(mut resp) => {
                    return resp
                        .body_mut()
                        .read_json::<WireResponse>()
                        .map_err(|e| ModuleError::Protocol(e.to_string()));
                }
                Err(ureq::Error::StatusCode(status)) => {
                    return Err(ModuleError::BackendRefused { status });
                }
                Err(e) => last_transport = Some(e.to_string()),
            }
        }
        Err(ModuleError::Transport(
            last_transport.unwrap_or_else(|| "no attempt made".to_string()),
        ))
    }
}

impl EntailmentModule for RemoteModule {
    fn infer(&self, request: &ModuleRequest) -> Result<Option<ModuleResponse>, ModuleError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let direction = request.direction.to_string();
        let wire = WireRequest {
            id,
            direction: &direction,
            rtype: request.rtype.as_str(),
            prefix: request.prefix(),
            premises: [request.inputs[0].text(), request.inputs[1].text()],
        };
        let _slot = self.gate.acquire();
        let resp = self.call(&wire)?;
        if resp.id != id {
            return Err(ModuleError::Protocol(format!(
                "response id {} does not match request id {}",
                resp.id, id
            )));
        }
        if !(0.0..=1.0).contains(&resp.confidence) {
            return Err(ModuleError::Protocol(format!(
                "confidence {} outside [0, 1]",
                resp.confidence
            )));
        }
        Ok(Some(ModuleResponse {
            output: Fact::textual(request.fresh_id.as_str(), resp.output),
            confidence: resp.confidence,
        }))
    }
}
