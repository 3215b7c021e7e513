//! Discrete-event simulation of open networks of multi-server FCFS queues
//! with probabilistic routing and packet multiplication.
//!
//! One run is a single-threaded event loop; independent replications share
//! nothing and can be run in any order or in parallel, then merged with
//! [`aggregate`]. With one replication the confidence intervals come from
//! batch means; with several, from the replication means.

pub(crate) mod engine;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::{fit_distribution, DistributionSpec};
use crate::error::SimError;
use crate::model::{Method, QueueMetrics, ValidatedNetwork};
use crate::rng::{Stream, StreamKind};
use crate::stats::Estimate;

use engine::{Collector, EventQueue, Station};

/// Default stop condition: packets leaving the network.
pub const DEFAULT_MEASURED_PACKETS: u64 = 4_000_000;
pub const DEFAULT_QUEUE_CAP: usize = 10_000_000;
pub const DEFAULT_BATCHES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    /// Exits discarded before measurement starts.
    pub warmup_packets: u64,
    /// Exits measured after warmup; the run stops there.
    pub measured_packets: u64,
    pub replications: u32,
    /// Largest tolerated waiting line at any queue.
    pub queue_cap: usize,
    /// Batches per run used for confidence intervals when `replications == 1`.
    pub batches: usize,
    /// Number of leading events to record in the trace (0 disables it).
    pub trace_limit: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::with_packets(1, DEFAULT_MEASURED_PACKETS)
    }
}

impl SimConfig {
    /// `measured` packets with the default 10% warmup.
    pub fn with_packets(seed: u64, measured: u64) -> Self {
        SimConfig {
            seed,
            warmup_packets: measured / 10,
            measured_packets: measured,
            replications: 1,
            queue_cap: DEFAULT_QUEUE_CAP,
            batches: DEFAULT_BATCHES,
            trace_limit: 0,
        }
    }

    pub fn check(&self) -> Result<(), SimError> {
        if self.measured_packets < 1 {
            return Err(SimError::InvalidInput("measured_packets must be >= 1".into()));
        }
        if self.replications < 1 {
            return Err(SimError::InvalidInput("replications must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Arrival,
    ServiceStart,
    Departure,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: TraceKind,
    /// 1-based queue id.
    pub queue: usize,
    pub packet: u64,
}

/// Statistics of one queue over one batch (or one whole window).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueBatch {
    pub departures: u64,
    pub throughput: f64,
    pub arrival_scv: f64,
    pub utilization: f64,
    pub mean_wait: f64,
    pub mean_sojourn: f64,
    pub mean_service: f64,
    pub mean_in_system: f64,
    pub visit_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub duration: f64,
    pub exits: u64,
    pub external_rate: f64,
    pub mean_response: f64,
    pub queues: Vec<QueueBatch>,
}

/// Integer packet accounting over a whole run (warmup included):
/// `entered + spawned − dropped = exited + in_system`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Accounting {
    pub entered: u64,
    pub spawned: u64,
    pub dropped: u64,
    pub exited: u64,
    pub in_system: u64,
}

impl Accounting {
    pub fn balanced(&self) -> bool {
        self.entered + self.spawned - self.dropped == self.exited + self.in_system
    }
}

/// Output of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub batches: Vec<BatchStats>,
    pub window: BatchStats,
    pub events: u64,
    pub accounting: Accounting,
    pub trace: Vec<TraceEvent>,
    /// Extra per-run counters (the vMME simulator reports DB accesses here).
    pub extra: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueSimStats {
    /// Point estimates in the same shape as the analytical reports.
    pub metrics: QueueMetrics,
    pub departures: u64,
    pub throughput: Estimate,
    pub mean_wait: Estimate,
    pub mean_sojourn: Estimate,
    pub mean_in_system: Estimate,
    pub utilization: Estimate,
    pub mean_service: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub method: Method,
    pub per_queue: Vec<QueueSimStats>,
    pub mean_response_time: Estimate,
    pub measured_packets: u64,
    pub replications: u32,
    pub events_processed: u64,
    pub accounting: Accounting,
    pub extra: Vec<(String, u64)>,
    /// Filled in by callers that can read a clock; zero otherwise.
    pub wall_time: f64,
}

/// Merges replications into a report.
pub fn aggregate(runs: &[RunStats], stages: &[usize]) -> SimReport {
    assert!(!runs.is_empty(), "aggregate needs at least one run");
    let samples: Vec<&BatchStats> =
        if runs.len() == 1 { runs[0].batches.iter().collect() } else { runs.iter().map(|r| &r.window).collect() };
    let k = runs[0].window.queues.len();
    let est = |f: &dyn Fn(&BatchStats) -> f64| {
        let xs: Vec<f64> = samples.iter().map(|b| f(b)).collect();
        Estimate::from_samples(&xs)
    };
    let per_queue = (0..k)
        .map(|q| {
            let throughput = est(&|b| b.queues[q].throughput);
            let mean_wait = est(&|b| b.queues[q].mean_wait);
            let mean_sojourn = est(&|b| b.queues[q].mean_sojourn);
            let utilization = est(&|b| b.queues[q].utilization);
            let arrival_scv = est(&|b| b.queues[q].arrival_scv);
            let visits = est(&|b| b.queues[q].visit_ratio);
            QueueSimStats {
                metrics: QueueMetrics {
                    queue: q + 1,
                    stage: stages.get(q).copied().unwrap_or(1),
                    total_arrival_rate: throughput.mean,
                    arrival_scv: arrival_scv.mean,
                    utilization: utilization.mean,
                    mean_wait: mean_wait.mean,
                    mean_sojourn: mean_sojourn.mean,
                    visit_ratio: visits.mean,
                },
                departures: runs.iter().map(|r| r.window.queues[q].departures).sum(),
                throughput,
                mean_wait,
                mean_sojourn,
                mean_in_system: est(&|b| b.queues[q].mean_in_system),
                utilization,
                mean_service: est(&|b| b.queues[q].mean_service),
            }
        })
        .collect();
    let mut accounting = Accounting::default();
    let mut extra: Vec<(String, u64)> = Vec::new();
    for r in runs {
        accounting.entered += r.accounting.entered;
        accounting.spawned += r.accounting.spawned;
        accounting.dropped += r.accounting.dropped;
        accounting.exited += r.accounting.exited;
        accounting.in_system += r.accounting.in_system;
        for (name, v) in &r.extra {
            match extra.iter_mut().find(|(n, _)| n == name) {
                Some(e) => e.1 += v,
                None => extra.push((name.clone(), *v)),
            }
        }
    }
    SimReport {
        method: Method::Simulation,
        per_queue,
        mean_response_time: est(&|b| b.mean_response),
        measured_packets: runs.iter().map(|r| r.window.exits).sum(),
        replications: runs.len() as u32,
        events_processed: runs.iter().map(|r| r.events).sum(),
        accounting,
        extra,
        wall_time: 0.0,
    }
}

/// Arrival and service laws fitted to the network's two-moment inputs.
pub fn network_distributions(
    net: &ValidatedNetwork,
) -> Result<(Vec<Option<DistributionSpec>>, Vec<DistributionSpec>), SimError> {
    let mut arrivals = Vec::with_capacity(net.len());
    let mut services = Vec::with_capacity(net.len());
    for q in net.queues() {
        arrivals.push(if q.ext_arrival_rate > 0.0 {
            Some(fit_distribution(1.0 / q.ext_arrival_rate, q.ext_arrival_scv)?)
        } else {
            None
        });
        services.push(fit_distribution(1.0 / q.service_rate, q.service_scv)?);
    }
    Ok((arrivals, services))
}

fn check_inputs(
    net: &ValidatedNetwork,
    arrivals: &[Option<DistributionSpec>],
    services: &[DistributionSpec],
) -> Result<(), SimError> {
    if arrivals.len() != net.len() || services.len() != net.len() {
        return Err(SimError::InvalidInput(format!("need {} arrival and service laws", net.len())));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-6 * b.abs();
    for (q, (a, s)) in net.queues().iter().zip(arrivals.iter().zip(services)) {
        s.validate()?;
        if !close(s.mean(), 1.0 / q.service_rate) {
            return Err(SimError::InvalidInput(format!("queue {}: service mean {} != 1/mu", q.id, s.mean())));
        }
        match a {
            Some(a) => {
                a.validate()?;
                if q.ext_arrival_rate <= 0.0 || !close(a.mean(), 1.0 / q.ext_arrival_rate) {
                    return Err(SimError::InvalidInput(format!(
                        "queue {}: inter-arrival mean {} != 1/lambda0",
                        q.id,
                        a.mean()
                    )));
                }
            }
            None if q.ext_arrival_rate > 0.0 => {
                return Err(SimError::InvalidInput(format!("queue {}: missing arrival law", q.id)));
            }
            None => {}
        }
    }
    Ok(())
}

/// Runs all replications in sequence and aggregates them.
pub fn simulate(
    net: &ValidatedNetwork,
    arrivals: &[Option<DistributionSpec>],
    services: &[DistributionSpec],
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    cfg.check()?;
    let runs = (0..cfg.replications)
        .map(|r| run_replication(net, arrivals, services, cfg, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&runs, &stages(net)))
}

pub fn stages(net: &ValidatedNetwork) -> Vec<usize> {
    net.queues().iter().map(|q| q.stage).collect()
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    id: u64,
    entry: f64,
    arrived: f64,
    wait: f64,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    External(usize),
    Departure(usize, Packet),
}

struct Tracer {
    limit: usize,
    events: Vec<TraceEvent>,
}

impl Tracer {
    #[inline]
    fn record(&mut self, time: f64, kind: TraceKind, queue: usize, packet: u64) {
        if self.events.len() < self.limit {
            self.events.push(TraceEvent { time, kind, queue: queue + 1, packet });
        }
    }
}

/// One replication of the network simulation.
pub fn run_replication(
    net: &ValidatedNetwork,
    arrivals: &[Option<DistributionSpec>],
    services: &[DistributionSpec],
    cfg: &SimConfig,
    replication: u32,
) -> Result<RunStats, SimError> {
    cfg.check()?;
    check_inputs(net, arrivals, services)?;
    let n = net.len();
    let queues = net.queues();
    let routing = net.routing();
    let seed = cfg.seed;
    let mut arrival_rng: Vec<Stream> =
        (0..n).map(|k| Stream::new(seed, replication, StreamKind::Arrival, k as u32)).collect();
    let mut service_rng: Vec<Stream> =
        (0..n).map(|k| Stream::new(seed, replication, StreamKind::Service, k as u32)).collect();
    let mut route_rng = Stream::new(seed, replication, StreamKind::Routing, 0);
    let mut mult_rng = Stream::new(seed, replication, StreamKind::Multiplication, 0);

    let servers: Vec<usize> = queues.iter().map(|q| q.servers).collect();
    let mut stations: Vec<Station<Packet>> = servers.iter().map(|&m| Station::new(m)).collect();
    let mut collector = Collector::new(cfg.warmup_packets, cfg.measured_packets, cfg.batches);
    let mut events = EventQueue::new();
    let mut tracer = Tracer { limit: cfg.trace_limit, events: Vec::new() };
    let mut acc = Accounting::default();
    let mut next_id = 0u64;
    let mut processed = 0u64;

    for (k, a) in arrivals.iter().enumerate() {
        if let Some(a) = a {
            events.push(a.sample(&mut arrival_rng[k]), Event::External(k));
        }
    }
    collector.start(&mut stations);

    // Sends `p` into queue `k` at `now`, starting service if a server is free.
    macro_rules! enter {
        ($now:expr, $k:expr, $p:expr) => {{
            let (now, k): (f64, usize) = ($now, $k);
            let mut p: Packet = $p;
            p.arrived = now;
            tracer.record(now, TraceKind::Arrival, k, p.id);
            if let Some(mut p) = stations[k].arrive(now, p, cfg.queue_cap, k + 1)? {
                p.wait = 0.0;
                tracer.record(now, TraceKind::ServiceStart, k, p.id);
                events.push(now + services[k].sample(&mut service_rng[k]), Event::Departure(k, p));
            }
        }};
    }

    while let Some((now, ev)) = events.pop() {
        processed += 1;
        match ev {
            Event::External(k) => {
                acc.entered += 1;
                collector.external_arrival();
                let p = Packet { id: next_id, entry: now, arrived: now, wait: 0.0 };
                next_id += 1;
                enter!(now, k, p);
                let a = arrivals[k].as_ref().expect("scheduled only with a law");
                events.push(now + a.sample(&mut arrival_rng[k]), Event::External(k));
            }
            Event::Departure(k, p) => {
                tracer.record(now, TraceKind::Departure, k, p.id);
                if let Some((mut next, wait)) = stations[k].depart(now, p.arrived, p.wait) {
                    next.wait = wait;
                    tracer.record(now, TraceKind::ServiceStart, k, next.id);
                    events.push(now + services[k].sample(&mut service_rng[k]), Event::Departure(k, next));
                }
                let nu = queues[k].multiplier;
                let whole = libm::floor(nu);
                let mut copies = whole as u64;
                if nu > whole && mult_rng.uniform() < nu - whole {
                    copies += 1;
                }
                if copies == 0 {
                    acc.dropped += 1;
                } else {
                    acc.spawned += copies - 1;
                }
                for c in 0..copies {
                    let id = if c == 0 {
                        p.id
                    } else {
                        next_id += 1;
                        next_id - 1
                    };
                    let copy = Packet { id, entry: p.entry, arrived: now, wait: 0.0 };
                    let u = route_rng.uniform();
                    let mut cum = 0.0;
                    let mut dest = None;
                    for (i, &pr) in routing.row(k).iter().enumerate() {
                        cum += pr;
                        if u < cum {
                            dest = Some(i);
                            break;
                        }
                    }
                    match dest {
                        Some(i) => enter!(now, i, copy),
                        None => {
                            acc.exited += 1;
                            tracer.record(now, TraceKind::Exit, k, id);
                            collector.exit(now, now - copy.entry, &mut stations);
                        }
                    }
                }
                if collector.done() {
                    break;
                }
            }
        }
    }

    acc.in_system = stations.iter().map(|s| s.in_system() as u64).sum();
    let (batches, window) = collector.finish(&servers);
    Ok(RunStats { batches, window, events: processed, accounting: acc, trace: tracer.events, extra: Vec::new() })
}
