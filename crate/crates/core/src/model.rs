//! Network description, structural validation, and the report types shared by
//! every solver and simulator.
//!
//! Queue ids and stage indices are 1-based everywhere they leave this crate
//! (reports, files); vectors are indexed from 0 internally.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Slack accepted above 1.0 on a routing row sum.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// One G/G/m station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSpec {
    /// 1-based queue index.
    pub id: usize,
    /// 1-based stage (tier) index.
    pub stage: usize,
    /// Number of parallel servers.
    pub servers: usize,
    /// Per-server service rate, packets/s.
    pub service_rate: f64,
    /// SCV of the service time.
    pub service_scv: f64,
    /// External arrival rate, packets/s.
    pub ext_arrival_rate: f64,
    /// SCV of the external inter-arrival time; unused when the rate is zero.
    pub ext_arrival_scv: f64,
    /// Expected number of packets leaving per packet served.
    pub multiplier: f64,
}

impl QueueSpec {
    /// A queue with multiplier 1.
    pub fn new(
        id: usize,
        stage: usize,
        servers: usize,
        service_rate: f64,
        service_scv: f64,
        ext_arrival_rate: f64,
        ext_arrival_scv: f64,
    ) -> Self {
        QueueSpec {
            id,
            stage,
            servers,
            service_rate,
            service_scv,
            ext_arrival_rate,
            ext_arrival_scv,
            multiplier: 1.0,
        }
    }

    pub fn with_multiplier(mut self, multiplier: f64) -> Self {
        self.multiplier = multiplier;
        self
    }
}

/// Routing probabilities `p[source][destination]`. Row deficits are exit
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoutingMatrix {
    pub entries: Vec<Vec<f64>>,
}

impl RoutingMatrix {
    pub fn zeros(k: usize) -> Self {
        RoutingMatrix { entries: vec![vec![0.0; k]; k] }
    }

    pub fn from_rows(entries: Vec<Vec<f64>>) -> Self {
        RoutingMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from][to]
    }

    pub fn set(&mut self, from: usize, to: usize, p: f64) {
        self.entries[from][to] = p;
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.entries[from]
    }

    pub fn row_sum(&self, from: usize) -> f64 {
        self.entries[from].iter().sum()
    }
}

/// A network of queues plus routing; the full model input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub queues: Vec<QueueSpec>,
    pub routing: RoutingMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NegativeParameter,
    ProbabilityOutOfRange,
    RowSumExceedsOne,
    NoExternalArrivals,
    NonContiguousStages,
    NonContiguousIds,
    DimensionMismatch,
}

/// One broken constraint. `queue` is the 1-based id it concerns, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub queue: Option<usize>,
    pub field: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.queue {
            Some(q) => write!(f, "{:?} at queue {} field `{}`: {}", self.kind, q, self.field, self.detail),
            None => write!(f, "{:?} field `{}`: {}", self.kind, self.field, self.detail),
        }
    }
}

/// Every violation found in a [`NetworkSpec`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl ValidationError {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid network ({} violation(s))", self.violations.len())?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

/// A [`NetworkSpec`] whose invariants have been checked. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedNetwork {
    spec: NetworkSpec,
    exit: Vec<f64>,
}

impl ValidatedNetwork {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn queues(&self) -> &[QueueSpec] {
        &self.spec.queues
    }

    pub fn routing(&self) -> &RoutingMatrix {
        &self.spec.routing
    }

    pub fn len(&self) -> usize {
        self.spec.queues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.queues.is_empty()
    }

    /// Exit probability `p_0k` of row `k` (0-based), clamped to [0, 1].
    pub fn exit_probability(&self, k: usize) -> f64 {
        self.exit[k]
    }

    /// Sum of all external arrival rates.
    pub fn total_external_rate(&self) -> f64 {
        self.spec.queues.iter().map(|q| q.ext_arrival_rate).sum()
    }

    pub fn into_spec(self) -> NetworkSpec {
        self.spec
    }
}

impl NetworkSpec {
    /// Checks every structural invariant and returns the validated wrapper or
    /// the complete list of violations.
    pub fn validate(self) -> Result<ValidatedNetwork, ValidationError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(ValidationError { violations });
        }
        let exit = (0..self.queues.len())
            .map(|k| (1.0 - self.routing.row_sum(k)).clamp(0.0, 1.0))
            .collect();
        Ok(ValidatedNetwork { spec: self, exit })
    }

    /// All broken invariants, in queue order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |kind, queue: Option<usize>, field: &str, detail: String| {
            out.push(Violation { kind, queue, field: field.into(), detail });
        };
        let k = self.queues.len();
        if k == 0 {
            push(ViolationKind::NoExternalArrivals, None, "queues", "network has no queues".into());
            return out;
        }

        for (idx, q) in self.queues.iter().enumerate() {
            let id = Some(idx + 1);
            if q.id != idx + 1 {
                push(ViolationKind::NonContiguousIds, id, "id", format!("expected id {}, found {}", idx + 1, q.id));
            }
            if q.servers < 1 {
                push(ViolationKind::NegativeParameter, id, "servers", format!("{} < 1", q.servers));
            }
            if !(q.service_rate > 0.0 && q.service_rate.is_finite()) {
                push(ViolationKind::NegativeParameter, id, "service_rate", format!("{} must be > 0", q.service_rate));
            }
            if !(q.service_scv >= 0.0 && q.service_scv.is_finite()) {
                push(ViolationKind::NegativeParameter, id, "service_scv", format!("{} must be >= 0", q.service_scv));
            }
            if !(q.ext_arrival_rate >= 0.0 && q.ext_arrival_rate.is_finite()) {
                push(
                    ViolationKind::NegativeParameter,
                    id,
                    "ext_arrival_rate",
                    format!("{} must be >= 0", q.ext_arrival_rate),
                );
            }
            if !(q.ext_arrival_scv >= 0.0 && q.ext_arrival_scv.is_finite()) {
                push(
                    ViolationKind::NegativeParameter,
                    id,
                    "ext_arrival_scv",
                    format!("{} must be >= 0", q.ext_arrival_scv),
                );
            }
            if !(q.multiplier > 0.0 && q.multiplier.is_finite()) {
                push(ViolationKind::NegativeParameter, id, "multiplier", format!("{} must be > 0", q.multiplier));
            }
        }

        // Stages: start at 1, never decrease, never skip.
        let mut prev = 0usize;
        for (idx, q) in self.queues.iter().enumerate() {
            let ok = if idx == 0 { q.stage == 1 } else { q.stage == prev || q.stage == prev + 1 };
            if !ok {
                push(
                    ViolationKind::NonContiguousStages,
                    Some(idx + 1),
                    "stage",
                    format!("stage {} follows stage {}", q.stage, prev),
                );
            }
            prev = q.stage;
        }

        if !self.queues.iter().any(|q| q.ext_arrival_rate > 0.0) {
            push(ViolationKind::NoExternalArrivals, None, "ext_arrival_rate", "every external rate is zero".into());
        }

        if self.routing.dim() != k || self.routing.entries.iter().any(|r| r.len() != k) {
            push(
                ViolationKind::DimensionMismatch,
                None,
                "routing",
                format!("routing must be {k}x{k}"),
            );
            return out;
        }
        for (from, row) in self.routing.entries.iter().enumerate() {
            for (to, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    push(
                        ViolationKind::ProbabilityOutOfRange,
                        Some(from + 1),
                        "routing",
                        format!("p[{}][{}] = {} outside [0, 1]", from + 1, to + 1, p),
                    );
                }
            }
            let sum: f64 = row.iter().sum();
            if sum > 1.0 + ROW_SUM_TOLERANCE {
                push(
                    ViolationKind::RowSumExceedsOne,
                    Some(from + 1),
                    "routing",
                    format!("row {} sums to {}", from + 1, sum),
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Qna,
    Jackson,
    Simulation,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Qna => "qna",
            Method::Jackson => "jackson",
            Method::Simulation => "simulation",
        }
    }
}

/// Per-queue steady-state figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueMetrics {
    /// 1-based queue id.
    pub queue: usize,
    pub stage: usize,
    /// Total arrival rate, packets/s.
    pub total_arrival_rate: f64,
    pub arrival_scv: f64,
    pub utilization: f64,
    /// Mean time in queue before service, s.
    pub mean_wait: f64,
    /// Mean wait plus mean service time, s.
    pub mean_sojourn: f64,
    pub visit_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfReport {
    pub per_queue: Vec<QueueMetrics>,
    /// Mean end-to-end response time per external packet, s.
    pub mean_response_time: f64,
    pub method: Method,
}

impl PerfReport {
    /// `Σ_k sojourn_k · V_k`, recomputed from the per-queue rows.
    pub fn recomputed_response_time(&self) -> f64 {
        self.per_queue.iter().map(|q| q.mean_sojourn * q.visit_ratio).sum()
    }
}
