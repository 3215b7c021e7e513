//! QNA decomposition for open networks of GI/G/m queues.
//!
//! Pipeline: mean flows from the linear traffic equations, arrival SCVs from a
//! second linear system, then each queue in isolation (Kraemer–Langenbach-Belz
//! for one server, scaled M/M/m otherwise) and the visit-weighted sum of
//! sojourn times.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::linalg;
use crate::model::{Method, PerfReport, QueueMetrics, ValidatedNetwork};

/// Negative arrival SCVs down to this value are clamped to zero.
pub const SCV_CLAMP_SLACK: f64 = 1e-9;

/// Intermediate quantities of the SCV system, kept for `--explain` output.
///
/// Indexing: `q[k][0]` is the external share `q_0k`, `q[k][i]` for `i ≥ 1` is
/// the share of queue `k`'s arrivals that come from queue `i` (1-based source,
/// 0-based destination). `b[i][k]` is the coefficient of `c²_{a,i}` in the
/// equation for queue `k` (both 0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub lambda: Vec<f64>,
    pub utilization: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub arrival_scv: Vec<f64>,
    pub omega: Vec<f64>,
    pub gamma: Vec<f64>,
    pub x: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<Vec<f64>>,
    /// 1-based ids of queues whose SCV was clamped from a tiny negative value.
    pub clamped: Vec<usize>,
}

/// Total arrival rates `λ_k = λ_0k + Σ_i λ_i ν_i p_ik`.
pub fn solve_flows(net: &ValidatedNetwork) -> Result<Vec<f64>, SolveError> {
    let k = net.len();
    let queues = net.queues();
    let p = net.routing();
    let mut a = vec![0.0; k * k];
    for row in 0..k {
        for col in 0..k {
            let delta = if row == col { 1.0 } else { 0.0 };
            a[row * k + col] = delta - queues[col].multiplier * p.get(col, row);
        }
    }
    let b: Vec<f64> = queues.iter().map(|q| q.ext_arrival_rate).collect();
    let mut lambda = linalg::solve(&a, &b).ok_or(SolveError::SingularSystem { what: "flow balance" })?;
    let norm = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in &mut lambda {
        if *v < 0.0 {
            if *v > -1e-12 * norm {
                *v = 0.0;
            } else {
                // A negative flow means the effective routing does not drain.
                return Err(SolveError::SingularSystem { what: "flow balance" });
            }
        }
    }
    Ok(lambda)
}

/// `V_k = λ_k / Σ_i λ_0i`.
pub fn visit_ratios(net: &ValidatedNetwork, lambda: &[f64]) -> Vec<f64> {
    let total = net.total_external_rate();
    lambda.iter().map(|l| l / total).collect()
}

/// Per-queue utilization `λ_k / (μ_k m_k)`; fails on the first queue at or
/// above 1.
pub fn utilizations(net: &ValidatedNetwork, lambda: &[f64]) -> Result<Vec<f64>, SolveError> {
    net.queues()
        .iter()
        .zip(lambda)
        .map(|(q, &l)| {
            let rho = l / (q.service_rate * q.servers as f64);
            if rho >= 1.0 {
                Err(SolveError::UnstableQueue { queue: q.id, rho })
            } else {
                Ok(rho)
            }
        })
        .collect()
}

/// Builds and solves the arrival-SCV system for given flows.
///
/// Queues that receive no flow at all are given `c²_a = 1` and drop out of
/// the system.
pub fn solve_arrival_scvs(net: &ValidatedNetwork, lambda: &[f64]) -> Result<FlowSolution, SolveError> {
    let n = net.len();
    let queues = net.queues();
    let p = net.routing();
    let rho = utilizations(net, lambda)?;

    let x: Vec<f64> = queues
        .iter()
        .map(|q| 1.0 + libm::pow(q.servers as f64, -0.5) * (q.service_scv.max(0.2) - 1.0))
        .collect();

    let mut q = vec![vec![0.0; n + 1]; n];
    let mut gamma = vec![1.0; n];
    let mut omega = vec![1.0; n];
    let mut a = vec![1.0; n];
    let mut b = vec![vec![0.0; n]; n];
    for k in 0..n {
        if lambda[k] <= 0.0 {
            continue;
        }
        q[k][0] = queues[k].ext_arrival_rate / lambda[k];
        for i in 0..n {
            q[k][i + 1] = lambda[i] * queues[i].multiplier * p.get(i, k) / lambda[k];
        }
        let sum_sq: f64 = q[k].iter().map(|v| v * v).sum();
        gamma[k] = 1.0 / sum_sq;
        let slack = 1.0 - rho[k];
        omega[k] = 1.0 / (1.0 + 4.0 * slack * slack * (gamma[k] - 1.0));
        let mut bracket = q[k][0] * queues[k].ext_arrival_scv - 1.0;
        for i in 0..n {
            let pik = p.get(i, k);
            let qik = q[k][i + 1];
            bracket += qik * ((1.0 - pik) + queues[i].multiplier * pik * rho[i] * rho[i] * x[i]);
            b[i][k] = omega[k] * qik * pik * queues[i].multiplier * (1.0 - rho[i] * rho[i]);
        }
        a[k] = 1.0 + omega[k] * bracket;
    }

    // c_k - Σ_i b_ik c_i = a_k
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            let delta = if i == k { 1.0 } else { 0.0 };
            m[k * n + i] = delta - b[i][k];
        }
    }
    let mut scv = linalg::solve(&m, &a).ok_or(SolveError::SingularSystem { what: "arrival SCVs" })?;
    let mut clamped = Vec::new();
    for (k, c) in scv.iter_mut().enumerate() {
        if *c < 0.0 {
            if *c >= -SCV_CLAMP_SLACK {
                *c = 0.0;
                clamped.push(k + 1);
            } else {
                return Err(SolveError::NegativeScv { queue: k + 1, value: *c });
            }
        }
    }

    Ok(FlowSolution {
        lambda: lambda.to_vec(),
        utilization: rho,
        q,
        arrival_scv: scv,
        omega,
        gamma,
        x,
        a,
        b,
        clamped,
    })
}

/// Mean wait in a GI/G/1 queue: `ρ(c²_a + c²_s)β / (2μ(1 − ρ))`, where the
/// factor `β` corrects for smooth arrivals (`c²_a < 1`).
///
/// Standalone calls report `queue: 0` in errors.
pub fn waiting_time_gg1(rho: f64, mu: f64, ca2: f64, cs2: f64) -> Result<f64, SolveError> {
    check_rate("mu", mu)?;
    check_scv(ca2, cs2)?;
    if !(0.0..1.0).contains(&rho) {
        return Err(SolveError::UnstableQueue { queue: 0, rho });
    }
    let sum = ca2 + cs2;
    if rho == 0.0 || sum == 0.0 {
        return Ok(0.0);
    }
    let beta = if ca2 < 1.0 {
        let d = 1.0 - ca2;
        libm::exp(-2.0 * (1.0 - rho) * d * d / (3.0 * rho * sum))
    } else {
        1.0
    };
    Ok(rho * sum * beta / (2.0 * mu * (1.0 - rho)))
}

/// Erlang C probability of waiting in an M/M/m queue with per-server
/// utilization `rho`.
///
/// Evaluated through the Erlang B recurrence `B_j = aB_{j−1}/(j + aB_{j−1})`,
/// `a = mρ`, then `C = B / (1 − ρ(1 − B))`. This equals the factorial form
/// exactly and does not overflow for large `m`.
pub fn erlang_c(m: usize, rho: f64) -> Result<f64, SolveError> {
    if m < 1 {
        return Err(SolveError::InvalidArgument(format!("server count {m} < 1")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(SolveError::InvalidArgument(format!("utilization {rho} outside (0, 1)")));
    }
    let offered = m as f64 * rho;
    let mut blocking = 1.0;
    for j in 1..=m {
        blocking = offered * blocking / (j as f64 + offered * blocking);
    }
    Ok(blocking / (1.0 - rho * (1.0 - blocking)))
}

/// Mean wait in an M/M/m queue: `C(m, λ/(mμ)) / (mμ − λ)`.
pub fn waiting_time_mmm(m: usize, lambda: f64, mu: f64) -> Result<f64, SolveError> {
    check_rate("mu", mu)?;
    if m < 1 {
        return Err(SolveError::InvalidArgument(format!("server count {m} < 1")));
    }
    if !(lambda >= 0.0) {
        return Err(SolveError::InvalidArgument(format!("arrival rate {lambda} < 0")));
    }
    let capacity = m as f64 * mu;
    let rho = lambda / capacity;
    if rho >= 1.0 {
        return Err(SolveError::UnstableQueue { queue: 0, rho });
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(erlang_c(m, rho)? / (capacity - lambda))
}

/// Mean wait in a GI/G/m queue, `0.5 (c²_a + c²_s) W^{M/M/m}`. A single
/// server is delegated to [`waiting_time_gg1`].
pub fn waiting_time_ggm(m: usize, lambda: f64, mu: f64, ca2: f64, cs2: f64) -> Result<f64, SolveError> {
    check_scv(ca2, cs2)?;
    if m == 1 {
        check_rate("mu", mu)?;
        return waiting_time_gg1(lambda / mu, mu, ca2, cs2);
    }
    Ok(0.5 * (ca2 + cs2) * waiting_time_mmm(m, lambda, mu)?)
}

/// Full QNA pipeline.
pub fn analyze(net: &ValidatedNetwork) -> Result<PerfReport, SolveError> {
    analyze_explained(net).map(|(r, _)| r)
}

/// [`analyze`] plus the intermediate flow solution.
pub fn analyze_explained(net: &ValidatedNetwork) -> Result<(PerfReport, FlowSolution), SolveError> {
    let lambda = solve_flows(net)?;
    let flows = solve_arrival_scvs(net, &lambda)?;
    let visits = visit_ratios(net, &lambda);
    let mut per_queue = Vec::with_capacity(net.len());
    for (k, q) in net.queues().iter().enumerate() {
        let ca2 = flows.arrival_scv[k];
        let wait = if lambda[k] == 0.0 {
            Ok(0.0)
        } else if q.servers == 1 {
            waiting_time_gg1(flows.utilization[k], q.service_rate, ca2, q.service_scv)
        } else {
            waiting_time_ggm(q.servers, lambda[k], q.service_rate, ca2, q.service_scv)
        }
        .map_err(|e| attach_queue(e, q.id))?;
        per_queue.push(QueueMetrics {
            queue: q.id,
            stage: q.stage,
            total_arrival_rate: lambda[k],
            arrival_scv: ca2,
            utilization: flows.utilization[k],
            mean_wait: wait,
            mean_sojourn: wait + 1.0 / q.service_rate,
            visit_ratio: visits[k],
        });
    }
    let report = finish(per_queue, Method::Qna);
    Ok((report, flows))
}

pub(crate) fn finish(per_queue: Vec<QueueMetrics>, method: Method) -> PerfReport {
    let mean_response_time = per_queue.iter().map(|q| q.mean_sojourn * q.visit_ratio).sum();
    PerfReport { per_queue, mean_response_time, method }
}

pub(crate) fn attach_queue(err: SolveError, queue: usize) -> SolveError {
    match err {
        SolveError::UnstableQueue { rho, .. } => SolveError::UnstableQueue { queue, rho },
        other => other,
    }
}

fn check_rate(name: &str, v: f64) -> Result<(), SolveError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SolveError::InvalidArgument(format!("{name} = {v} must be > 0")))
    }
}

fn check_scv(ca2: f64, cs2: f64) -> Result<(), SolveError> {
    if ca2 >= 0.0 && cs2 >= 0.0 {
        Ok(())
    } else {
        Err(SolveError::InvalidArgument(format!("negative SCV (ca2 = {ca2}, cs2 = {cs2})")))
    }
}
