//! Event-loop building blocks shared by the network and vMME simulators:
//! a time-ordered event queue, multi-server FCFS stations, and the
//! batch-means statistics collector.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::SimError;

use super::{BatchStats, QueueBatch};

struct Scheduled<E> {
    time: f64,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for Scheduled<E> {}

impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Scheduled<E> {
    // Reversed: BinaryHeap is a max-heap and we want the earliest event,
    // ties broken by insertion order.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

pub(crate) struct EventQueue<E> {
    heap: BinaryHeap<Scheduled<E>>,
    seq: u64,
}

impl<E> EventQueue<E> {
    pub(crate) fn new() -> Self {
        EventQueue { heap: BinaryHeap::new(), seq: 0 }
    }

    pub(crate) fn push(&mut self, time: f64, event: E) {
        self.heap.push(Scheduled { time, seq: self.seq, event });
        self.seq += 1;
    }

    pub(crate) fn pop(&mut self) -> Option<(f64, E)> {
        self.heap.pop().map(|s| (s.time, s.event))
    }
}

/// Cumulative counters of one station since time zero.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Counters {
    arrivals: u64,
    departures: u64,
    sum_wait: f64,
    sum_sojourn: f64,
    area_in_system: f64,
    area_busy: f64,
    interarrivals: u64,
    sum_ia: f64,
    sum_ia_sq: f64,
}

pub(crate) struct Station<T> {
    servers: usize,
    busy: usize,
    waiting: VecDeque<(T, f64)>,
    last_change: f64,
    last_arrival: Option<f64>,
    counters: Counters,
}

impl<T> Station<T> {
    pub(crate) fn new(servers: usize) -> Self {
        Station {
            servers,
            busy: 0,
            waiting: VecDeque::new(),
            last_change: 0.0,
            last_arrival: None,
            counters: Counters::default(),
        }
    }

    fn flush(&mut self, now: f64) {
        let dt = now - self.last_change;
        let in_system = self.busy + self.waiting.len();
        self.counters.area_in_system += in_system as f64 * dt;
        self.counters.area_busy += self.busy as f64 * dt;
        self.last_change = now;
    }

    pub(crate) fn in_system(&self) -> usize {
        self.busy + self.waiting.len()
    }

    /// Registers an arrival. Returns the item back if a server is free and
    /// service starts now (with zero wait); otherwise it is queued.
    pub(crate) fn arrive(&mut self, now: f64, item: T, cap: usize, queue_id: usize) -> Result<Option<T>, SimError> {
        self.flush(now);
        self.counters.arrivals += 1;
        if let Some(prev) = self.last_arrival {
            let ia = now - prev;
            self.counters.interarrivals += 1;
            self.counters.sum_ia += ia;
            self.counters.sum_ia_sq += ia * ia;
        }
        self.last_arrival = Some(now);
        if self.busy < self.servers {
            self.busy += 1;
            return Ok(Some(item));
        }
        if self.waiting.len() >= cap {
            return Err(SimError::SimDiverged { queue: queue_id, len: self.waiting.len(), cap });
        }
        self.waiting.push_back((item, now));
        Ok(None)
    }

    /// Registers a service completion of a packet that arrived at
    /// `arrived` and waited `wait`. Returns the next waiting item and its
    /// wait, if one takes the freed server.
    pub(crate) fn depart(&mut self, now: f64, arrived: f64, wait: f64) -> Option<(T, f64)> {
        self.flush(now);
        self.counters.departures += 1;
        self.counters.sum_wait += wait;
        self.counters.sum_sojourn += now - arrived;
        match self.waiting.pop_front() {
            Some((item, t)) => Some((item, now - t)),
            None => {
                self.busy -= 1;
                None
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Snapshot {
    time: f64,
    exits: u64,
    external: u64,
    sum_response: f64,
    stations: Vec<Counters>,
}

/// Cuts the measurement window into batches by exit count and snapshots
/// every station's cumulative counters at each cut.
pub(crate) struct Collector {
    boundaries: Vec<u64>,
    next: usize,
    exits: u64,
    external: u64,
    sum_response: f64,
    snapshots: Vec<Snapshot>,
}

impl Collector {
    pub(crate) fn new(warmup: u64, measured: u64, batches: usize) -> Self {
        let b = (batches.max(1) as u64).min(measured.max(1));
        let mut boundaries = vec![warmup];
        for i in 1..=b {
            boundaries.push(warmup + measured * i / b);
        }
        Collector { boundaries, next: 0, exits: 0, external: 0, sum_response: 0.0, snapshots: Vec::new() }
    }

    pub(crate) fn done(&self) -> bool {
        self.next >= self.boundaries.len()
    }

    pub(crate) fn external_arrival(&mut self) {
        self.external += 1;
    }

    /// Call once before the event loop so a zero warmup snapshots time 0.
    pub(crate) fn start<T>(&mut self, stations: &mut [Station<T>]) {
        if self.boundaries[0] == 0 {
            self.snapshot(0.0, stations);
        }
    }

    pub(crate) fn exit<T>(&mut self, now: f64, response: f64, stations: &mut [Station<T>]) {
        self.exits += 1;
        self.sum_response += response;
        if !self.done() && self.exits == self.boundaries[self.next] {
            self.snapshot(now, stations);
        }
    }

    fn snapshot<T>(&mut self, now: f64, stations: &mut [Station<T>]) {
        for s in stations.iter_mut() {
            s.flush(now);
        }
        self.snapshots.push(Snapshot {
            time: now,
            exits: self.exits,
            external: self.external,
            sum_response: self.sum_response,
            stations: stations.iter().map(|s| s.counters).collect(),
        });
        self.next += 1;
    }

    /// Per-batch statistics and the whole-window statistics.
    pub(crate) fn finish(&self, servers: &[usize]) -> (Vec<BatchStats>, BatchStats) {
        let batches = self.snapshots.windows(2).map(|w| diff(&w[0], &w[1], servers)).collect();
        let window = diff(&self.snapshots[0], self.snapshots.last().expect("non-empty"), servers);
        (batches, window)
    }
}

fn diff(a: &Snapshot, b: &Snapshot, servers: &[usize]) -> BatchStats {
    let dt = b.time - a.time;
    let exits = b.exits - a.exits;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let external = (b.external - a.external) as f64;
    let ext_rate = ratio(external, dt);
    let queues = a
        .stations
        .iter()
        .zip(&b.stations)
        .zip(servers)
        .map(|((x, y), &m)| {
            let arrivals = (y.arrivals - x.arrivals) as f64;
            let deps = (y.departures - x.departures) as f64;
            let wait = ratio(y.sum_wait - x.sum_wait, deps);
            let sojourn = ratio(y.sum_sojourn - x.sum_sojourn, deps);
            let n_ia = (y.interarrivals - x.interarrivals) as f64;
            let mean_ia = ratio(y.sum_ia - x.sum_ia, n_ia);
            let ia_sq = ratio(y.sum_ia_sq - x.sum_ia_sq, n_ia);
            let arrival_scv = if mean_ia > 0.0 { (ia_sq - mean_ia * mean_ia) / (mean_ia * mean_ia) } else { 0.0 };
            let throughput = ratio(arrivals, dt);
            QueueBatch {
                departures: y.departures - x.departures,
                throughput,
                arrival_scv,
                utilization: ratio(y.area_busy - x.area_busy, dt * m as f64),
                mean_wait: wait,
                mean_sojourn: sojourn,
                mean_service: sojourn - wait,
                mean_in_system: ratio(y.area_in_system - x.area_in_system, dt),
                visit_ratio: ratio(throughput, ext_rate),
            }
        })
        .collect();
    BatchStats {
        duration: dt,
        exits,
        external_rate: ext_rate,
        mean_response: ratio(b.sum_response - a.sum_response, exits as f64),
        queues,
    }
}
