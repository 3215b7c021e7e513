//! The three-tier virtualized MME: front-end (FE), workers (W) and the state
//! database (DB).
//!
//! This module derives the queueing-network inputs from the signaling
//! workload (SR, SRR and HR procedures), runs a procedure-level simulation of
//! the same system, and sweeps the number of users while adding worker
//! instances to keep the mean response time under a target.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::DistributionSpec;
use crate::error::{SimError, SolveError};
use crate::model::{NetworkSpec, PerfReport, QueueSpec, RoutingMatrix, ValidatedNetwork, ValidationError};
use crate::rng::{Stream, StreamKind};
use crate::sim::engine::{Collector, EventQueue, Station};
use crate::sim::{aggregate, Accounting, RunStats, SimConfig, SimReport};

/// Probability that a packet served at the FE leaves the vMME.
pub const FE_EXIT_PROBABILITY: f64 = 0.5;

/// FE utilization at which the sweep flags the FE tier as saturated.
pub const FE_SATURATION: f64 = 0.95;

const PROCEDURES: [&str; 3] = ["SR", "SRR", "HR"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcedureMix {
    /// Service Request rate per UE, procedures/s.
    pub rate_sr: f64,
    /// Service Release rate per UE, procedures/s.
    pub rate_srr: f64,
    /// X2 handover rate per UE, procedures/s.
    pub rate_hr: f64,
    pub n_sr: u32,
    pub n_srr: u32,
    pub n_hr: u32,
    pub num_users: u64,
}

impl ProcedureMix {
    fn rates(&self) -> [f64; 3] {
        [self.rate_sr, self.rate_srr, self.rate_hr]
    }

    fn counts(&self) -> [u32; 3] {
        [self.n_sr, self.n_srr, self.n_hr]
    }

    fn check(&self) -> Result<(), ScenarioError> {
        let rates = self.rates();
        if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(ScenarioError::Invalid("procedure rates must be finite and >= 0".into()));
        }
        if !rates.iter().any(|r| *r > 0.0) {
            return Err(ScenarioError::Invalid("at least one procedure rate must be > 0".into()));
        }
        if self.counts().iter().any(|n| *n == 0 || *n > 64) {
            return Err(ScenarioError::Invalid("messages per procedure must be in 1..=64".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VmmeScenario {
    pub mix: ProcedureMix,
    pub k_fe: usize,
    pub k_w: usize,
    pub k_db: usize,
    /// FE service rate, packets/s (deterministic).
    pub mu_fe: f64,
    /// DB service rate, transactions/s (deterministic).
    pub mu_db: f64,
    /// Worker CPU speed, instructions/s.
    pub cpu_rate: f64,
    /// Instructions per message type, keyed `SR1`, `SR2`, ..., `HR2`.
    pub instr: BTreeMap<String, f64>,
    pub delay_enb_oneway: f64,
    pub delay_twoway: f64,
    pub t_target: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("response-time target unreachable at {num_users} users with {k_w} workers (T = {t:e} s)")]
    TargetUnreachable { num_users: u64, k_w: usize, t: f64, rows: Vec<SweepRow> },
}

impl VmmeScenario {
    /// Signaling rates, EPC delays, service rates and instruction counts of
    /// the standard three-tier configuration, with one instance per tier and
    /// 100 000 users.
    pub fn baseline() -> Self {
        let names = ["SR1", "SR2", "SR3", "SRR1", "SRR2", "SRR3", "HR1", "HR2"];
        let counts = [1.45e6, 1.07e6, 1.06e6, 1.07e6, 1.07e6, 1.06e6, 1.07e6, 1.07e6];
        VmmeScenario {
            mix: ProcedureMix {
                rate_sr: 0.0045,
                rate_srr: 0.0045,
                rate_hr: 0.0012,
                n_sr: 3,
                n_srr: 3,
                n_hr: 2,
                num_users: 100_000,
            },
            k_fe: 1,
            k_w: 1,
            k_db: 1,
            mu_fe: 120_000.0,
            mu_db: 100_000.0,
            cpu_rate: 11.38e9,
            instr: names.iter().map(|n| n.to_string()).zip(counts).collect(),
            delay_enb_oneway: 0.0045,
            delay_twoway: 0.009,
            t_target: 0.003,
        }
    }

    pub fn with_users(mut self, num_users: u64) -> Self {
        self.mix.num_users = num_users;
        self
    }

    pub fn with_workers(mut self, k_w: usize) -> Self {
        self.k_w = k_w;
        self
    }

    /// Message-type keys implied by the per-procedure message counts.
    pub fn message_types(&self) -> Vec<String> {
        PROCEDURES
            .iter()
            .zip(self.mix.counts())
            .flat_map(|(p, n)| (1..=n).map(move |i| format!("{p}{i}")))
            .collect()
    }

    pub fn check(&self) -> Result<(), ScenarioError> {
        self.mix.check()?;
        if self.k_fe < 1 || self.k_w < 1 || self.k_db < 1 {
            return Err(ScenarioError::Invalid("every tier needs at least one instance".into()));
        }
        let positive = [
            ("mu_fe", self.mu_fe),
            ("mu_db", self.mu_db),
            ("cpu_rate", self.cpu_rate),
            ("delay_enb_oneway", self.delay_enb_oneway),
            ("delay_twoway", self.delay_twoway),
            ("t_target", self.t_target),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(ScenarioError::Invalid(format!("{name} = {v} must be > 0")));
            }
        }
        let expected = self.message_types();
        let mut keys: Vec<&String> = self.instr.keys().collect();
        keys.sort();
        let mut want: Vec<&String> = expected.iter().collect();
        want.sort();
        if keys != want {
            return Err(ScenarioError::Invalid(format!("instr keys must be exactly {expected:?}")));
        }
        if let Some((k, v)) = self.instr.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(ScenarioError::Invalid(format!("instr[{k}] = {v} must be > 0")));
        }
        Ok(())
    }

    fn instructions(&self, procedure: usize, message: u32) -> f64 {
        self.instr[&format!("{}{}", PROCEDURES[procedure], message + 1)]
    }
}

/// Mean messages handled per signaling procedure, `Σ n_P λ_P / Σ λ_P`.
pub fn mean_packets_per_procedure(mix: &ProcedureMix) -> f64 {
    let rates = mix.rates();
    let weighted: f64 = rates.iter().zip(mix.counts()).map(|(r, n)| r * n as f64).sum();
    weighted / rates.iter().sum::<f64>()
}

/// Aggregate external packet rate `N_U Σ n_P λ_P` and its SCV (Poisson
/// superposition, so 1).
pub fn external_arrival(mix: &ProcedureMix) -> (f64, f64) {
    let per_user: f64 = mix.rates().iter().zip(mix.counts()).map(|(r, n)| r * n as f64).sum();
    (mix.num_users as f64 * per_user, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerMoments {
    pub mean: f64,
    pub variance: f64,
    pub scv: f64,
    /// Frequency of each message type among all messages.
    pub frequencies: Vec<(String, f64)>,
}

/// Mean, variance and SCV of the worker service time, weighting each message
/// type by its share of the message stream.
pub fn worker_service_moments(sc: &VmmeScenario) -> Result<WorkerMoments, ScenarioError> {
    sc.check()?;
    let (times, frequencies) = worker_mixture(sc);
    let mean: f64 = times.iter().zip(&frequencies).map(|(t, f)| t * f.1).sum();
    let variance: f64 = times.iter().zip(&frequencies).map(|(t, f)| f.1 * (t - mean) * (t - mean)).sum();
    Ok(WorkerMoments { mean, variance, scv: variance / (mean * mean), frequencies })
}

fn worker_mixture(sc: &VmmeScenario) -> (Vec<f64>, Vec<(String, f64)>) {
    let rates = sc.mix.rates();
    let counts = sc.mix.counts();
    let total: f64 = rates.iter().zip(counts).map(|(r, n)| r * n as f64).sum();
    let mut times = Vec::new();
    let mut freqs = Vec::new();
    for (p, name) in PROCEDURES.iter().enumerate() {
        for i in 0..counts[p] {
            times.push(sc.instructions(p, i) / sc.cpu_rate);
            freqs.push((format!("{name}{}", i + 1), rates[p] / total));
        }
    }
    (times, freqs)
}

/// The worker service law as a point mixture over message types.
pub fn worker_service_law(sc: &VmmeScenario) -> Result<DistributionSpec, ScenarioError> {
    sc.check()?;
    let (values, freqs) = worker_mixture(sc);
    let mut probs: Vec<f64> = freqs.into_iter().map(|(_, f)| f).collect();
    // Renormalize so the weights sum to 1 to machine precision.
    let s: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= s;
    }
    Ok(DistributionSpec::EmpiricalMixture { values, probs })
}

/// 0-based index ranges of the three tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierLayout {
    pub k_fe: usize,
    pub k_w: usize,
    pub k_db: usize,
}

impl TierLayout {
    pub fn of(sc: &VmmeScenario) -> Self {
        TierLayout { k_fe: sc.k_fe, k_w: sc.k_w, k_db: sc.k_db }
    }

    pub fn fe(&self) -> core::ops::Range<usize> {
        0..self.k_fe
    }

    pub fn w(&self) -> core::ops::Range<usize> {
        self.k_fe..self.k_fe + self.k_w
    }

    pub fn db(&self) -> core::ops::Range<usize> {
        self.k_fe + self.k_w..self.len()
    }

    pub fn len(&self) -> usize {
        self.k_fe + self.k_w + self.k_db
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-instance visit ratios `(V_FE, V_W, V_DB)` in closed form.
pub fn closed_form_visits(sc: &VmmeScenario) -> (f64, f64, f64) {
    let npp = mean_packets_per_procedure(&sc.mix);
    (2.0 / sc.k_fe as f64, (1.0 + 2.0 / npp) / sc.k_w as f64, (2.0 / npp) / sc.k_db as f64)
}

/// Queueing network of the scenario: FE instances first, then workers, then
/// DB instances, with uniform load balancing inside each tier.
pub fn build_network(sc: &VmmeScenario) -> Result<ValidatedNetwork, ScenarioError> {
    sc.check()?;
    let layout = TierLayout::of(sc);
    let (lambda, ca2) = external_arrival(&sc.mix);
    let w = worker_service_moments(sc)?;
    let npp = mean_packets_per_procedure(&sc.mix);
    let half = npp / 2.0;
    let to_fe = half / (half + 1.0);
    let to_db = 1.0 / (half + 1.0);

    let mut queues = Vec::with_capacity(layout.len());
    for k in 0..layout.len() {
        let id = k + 1;
        let q = if layout.fe().contains(&k) {
            QueueSpec::new(id, 1, 1, sc.mu_fe, 0.0, lambda / sc.k_fe as f64, ca2)
        } else if layout.w().contains(&k) {
            QueueSpec::new(id, 2, 1, 1.0 / w.mean, w.scv, 0.0, 1.0)
        } else {
            QueueSpec::new(id, 3, 1, sc.mu_db, 0.0, 0.0, 1.0)
        };
        queues.push(q);
    }
    let mut p = RoutingMatrix::zeros(layout.len());
    for fe in layout.fe() {
        for wk in layout.w() {
            p.set(fe, wk, (1.0 - FE_EXIT_PROBABILITY) / sc.k_w as f64);
        }
    }
    for wk in layout.w() {
        for fe in layout.fe() {
            p.set(wk, fe, to_fe / sc.k_fe as f64);
        }
        for db in layout.db() {
            p.set(wk, db, to_db / sc.k_db as f64);
        }
    }
    for db in layout.db() {
        for wk in layout.w() {
            p.set(db, wk, 1.0 / sc.k_w as f64);
        }
    }
    Ok(NetworkSpec { queues, routing: p }.validate()?)
}

/// `|T_sim − T_theo| / T_sim`.
pub fn relative_error(t_sim: f64, t_theo: f64) -> f64 {
    (t_sim - t_theo).abs() / t_sim
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub num_users: u64,
    pub k_w: usize,
    pub t: f64,
    pub rho_fe: f64,
    pub rho_w_max: f64,
    pub rho_db: f64,
    /// Workers were added at this point.
    pub scaled: bool,
    /// FE utilization reached [`FE_SATURATION`].
    pub fe_saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub type Analyzer = fn(&ValidatedNetwork) -> Result<PerfReport, SolveError>;

/// For each user count (ascending), adds single-core workers until the
/// analyzer's mean response time is within `t_target`. The worker count never
/// decreases along the sweep. Saturation of a worker counts as a miss; FE or
/// DB saturation cannot be fixed by adding workers and is returned as an
/// error.
pub fn autoscale_sweep(
    sc: &VmmeScenario,
    users: &[u64],
    analyzer: Analyzer,
    max_k_w: usize,
) -> Result<SweepTable, ScenarioError> {
    sc.check()?;
    if users.windows(2).any(|w| w[0] > w[1]) {
        return Err(ScenarioError::Invalid("user counts must be sorted ascending".into()));
    }
    let mut rows: Vec<SweepRow> = Vec::with_capacity(users.len());
    let mut k_w = sc.k_w;
    for &nu in users {
        let start = k_w;
        loop {
            let scenario = sc.clone().with_users(nu).with_workers(k_w);
            let layout = TierLayout::of(&scenario);
            let net = build_network(&scenario)?;
            let outcome = analyzer(&net);
            let t = match &outcome {
                Ok(r) => r.mean_response_time,
                Err(SolveError::UnstableQueue { queue, .. }) if layout.w().contains(&(queue - 1)) => f64::INFINITY,
                Err(e) => return Err(e.clone().into()),
            };
            if t <= sc.t_target {
                let r = outcome.expect("finite t means a report");
                let max_rho = |range: core::ops::Range<usize>| {
                    r.per_queue[range].iter().map(|q| q.utilization).fold(0.0, f64::max)
                };
                let rho_fe = max_rho(layout.fe());
                rows.push(SweepRow {
                    num_users: nu,
                    k_w,
                    t,
                    rho_fe,
                    rho_w_max: max_rho(layout.w()),
                    rho_db: max_rho(layout.db()),
                    scaled: k_w != start,
                    fe_saturated: rho_fe >= FE_SATURATION,
                });
                break;
            }
            if k_w >= max_k_w {
                return Err(ScenarioError::TargetUnreachable { num_users: nu, k_w, t, rows });
            }
            k_w += 1;
        }
    }
    Ok(SweepTable { rows })
}

/// Options of the procedure-level simulator that do not belong to the
/// scenario itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VmmeSimOptions {
    /// Add the EPC delay preceding each message to its response time.
    pub include_epc_delays: bool,
}

/// Procedure-level simulation, all replications in sequence.
pub fn simulate_vmme(sc: &VmmeScenario, cfg: &SimConfig) -> Result<SimReport, SimError> {
    simulate_vmme_with(sc, cfg, VmmeSimOptions::default())
}

pub fn simulate_vmme_with(sc: &VmmeScenario, cfg: &SimConfig, opts: VmmeSimOptions) -> Result<SimReport, SimError> {
    cfg.check()?;
    let runs = (0..cfg.replications)
        .map(|r| run_vmme_replication(sc, cfg, opts, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&runs, &vmme_stages(sc)))
}

pub fn vmme_stages(sc: &VmmeScenario) -> Vec<usize> {
    let l = TierLayout::of(sc);
    (0..l.len()).map(|k| if l.fe().contains(&k) { 1 } else if l.w().contains(&k) { 2 } else { 3 }).collect()
}

#[derive(Debug, Clone, Copy)]
struct Message {
    procedure: u8,
    index: u8,
    count: u8,
    /// DB accesses still due for this message.
    db_left: u8,
    /// DB accesses done so far by the whole procedure.
    proc_db: u8,
    outbound: bool,
    worker: u32,
    id: u64,
    ingress: f64,
    arrived: f64,
    wait: f64,
}

#[derive(Debug, Clone, Copy)]
enum VmmeEvent {
    Procedure(u8),
    Ingress(Message),
    Departure(usize, Message),
}

/// One replication of the procedure-level simulation.
///
/// Each procedure arrival picks one worker for all its messages. A message
/// passes FE → W, then for every DB access W → DB → (same) W, then W → FE and
/// out. The first message of a procedure reads from the DB and the last one
/// writes, so every procedure makes exactly two DB accesses. Every worker
/// visit costs the message's full instruction count. The next message of a
/// procedure enters the FE one two-way EPC delay after the previous one left.
pub fn run_vmme_replication(
    sc: &VmmeScenario,
    cfg: &SimConfig,
    opts: VmmeSimOptions,
    replication: u32,
) -> Result<RunStats, SimError> {
    cfg.check()?;
    sc.check().map_err(|e| SimError::InvalidInput(e.to_string()))?;
    let layout = TierLayout::of(sc);
    let seed = cfg.seed;
    let rates: Vec<f64> = sc.mix.rates().iter().map(|r| r * sc.mix.num_users as f64).collect();
    if !rates.iter().any(|r| *r > 0.0) {
        return Err(SimError::InvalidInput("scenario generates no traffic (num_users = 0?)".into()));
    }
    let counts = sc.mix.counts();
    let mut arrival_rng: Vec<Stream> =
        (0..3).map(|p| Stream::new(seed, replication, StreamKind::Arrival, p)).collect();
    let mut worker_rng = Stream::new(seed, replication, StreamKind::Scenario, 0);
    let mut fe_rng = Stream::new(seed, replication, StreamKind::Routing, 0);
    let mut db_rng = Stream::new(seed, replication, StreamKind::Routing, 1);

    let service_w: Vec<Vec<f64>> = (0..3)
        .map(|p| (0..counts[p]).map(|i| sc.instructions(p, i) / sc.cpu_rate).collect())
        .collect();
    let s_fe = 1.0 / sc.mu_fe;
    let s_db = 1.0 / sc.mu_db;
    let service = |k: usize, m: &Message| -> f64 {
        if layout.fe().contains(&k) {
            s_fe
        } else if layout.w().contains(&k) {
            service_w[m.procedure as usize][m.index as usize]
        } else {
            s_db
        }
    };

    let servers = vec![1usize; layout.len()];
    let mut stations: Vec<Station<Message>> = servers.iter().map(|&m| Station::new(m)).collect();
    let mut collector = Collector::new(cfg.warmup_packets, cfg.measured_packets, cfg.batches);
    let mut events = EventQueue::new();
    let mut acc = Accounting::default();
    let mut processed = 0u64;
    let mut next_id = 0u64;
    let mut procedures_done = 0u64;
    let mut db_done = 0u64;
    let mut db_mismatch = 0u64;

    for (p, &r) in rates.iter().enumerate() {
        if r > 0.0 {
            events.push(arrival_rng[p].exponential(r), VmmeEvent::Procedure(p as u8));
        }
    }
    collector.start(&mut stations);

    macro_rules! enter {
        ($now:expr, $k:expr, $m:expr) => {{
            let (now, k): (f64, usize) = ($now, $k);
            let mut m: Message = $m;
            m.arrived = now;
            if let Some(mut m) = stations[k].arrive(now, m, cfg.queue_cap, k + 1)? {
                m.wait = 0.0;
                events.push(now + service(k, &m), VmmeEvent::Departure(k, m));
            }
        }};
    }
    let db_accesses = |index: u8, count: u8| (index == 0) as u8 + (index + 1 == count) as u8;

    while let Some((now, ev)) = events.pop() {
        processed += 1;
        match ev {
            VmmeEvent::Procedure(p) => {
                let pi = p as usize;
                events.push(now + arrival_rng[pi].exponential(rates[pi]), VmmeEvent::Procedure(p));
                let count = counts[pi] as u8;
                let m = Message {
                    procedure: p,
                    index: 0,
                    count,
                    db_left: db_accesses(0, count),
                    proc_db: 0,
                    outbound: false,
                    worker: worker_rng.index(layout.k_w) as u32,
                    id: 0,
                    ingress: 0.0,
                    arrived: 0.0,
                    wait: 0.0,
                };
                events.push(now + sc.delay_enb_oneway, VmmeEvent::Ingress(m));
            }
            VmmeEvent::Ingress(mut m) => {
                acc.entered += 1;
                collector.external_arrival();
                m.id = next_id;
                next_id += 1;
                m.ingress = now;
                let fe = layout.fe().start + fe_rng.index(layout.k_fe);
                enter!(now, fe, m);
            }
            VmmeEvent::Departure(k, mut m) => {
                if let Some((mut next, wait)) = stations[k].depart(now, m.arrived, m.wait) {
                    next.wait = wait;
                    events.push(now + service(k, &next), VmmeEvent::Departure(k, next));
                }
                if layout.fe().contains(&k) {
                    if !m.outbound {
                        enter!(now, layout.w().start + m.worker as usize, m);
                        continue;
                    }
                    acc.exited += 1;
                    let mut response = now - m.ingress;
                    if opts.include_epc_delays {
                        response += if m.index == 0 { sc.delay_enb_oneway } else { sc.delay_twoway };
                    }
                    collector.exit(now, response, &mut stations);
                    if m.index + 1 < m.count {
                        let index = m.index + 1;
                        let follow = Message {
                            index,
                            db_left: db_accesses(index, m.count),
                            outbound: false,
                            ..m
                        };
                        events.push(now + sc.delay_twoway, VmmeEvent::Ingress(follow));
                    } else {
                        procedures_done += 1;
                        db_done += m.proc_db as u64;
                        if m.proc_db != 2 {
                            db_mismatch += 1;
                        }
                    }
                    if collector.done() {
                        break;
                    }
                } else if layout.w().contains(&k) {
                    if m.db_left > 0 {
                        m.db_left -= 1;
                        let db = layout.db().start + db_rng.index(layout.k_db);
                        enter!(now, db, m);
                    } else {
                        m.outbound = true;
                        let fe = layout.fe().start + fe_rng.index(layout.k_fe);
                        enter!(now, fe, m);
                    }
                } else {
                    m.proc_db += 1;
                    enter!(now, layout.w().start + m.worker as usize, m);
                }
            }
        }
    }

    acc.in_system = stations.iter().map(|s| s.in_system() as u64).sum();
    let (batches, window) = collector.finish(&servers);
    Ok(RunStats {
        batches,
        window,
        events: processed,
        accounting: acc,
        trace: Vec::new(),
        extra: vec![
            ("procedures_completed".into(), procedures_done),
            ("db_transactions_completed".into(), db_done),
            ("db_access_mismatches".into(), db_mismatch),
        ],
    })
}
