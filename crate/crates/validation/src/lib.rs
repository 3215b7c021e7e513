//! Reference oracles and input generators for the acceptance checks.

use vnfperf_core::model::{NetworkSpec, QueueSpec, RoutingMatrix, ValidatedNetwork};
use vnfperf_core::qna;
use vnfperf_core::rng::{Stream, StreamKind};

/// Erlang C at load `rho = num / den` with `m` servers, by direct summation
/// of the factorial form in exact integer arithmetic:
///
/// C = (a^m / m!) / ((1 − ρ) Σ_{k<m} a^k / k! + a^m / m!),  a = mρ.
///
/// Multiplying through by `m! den^m` keeps every term an integer. Fits in
/// `u128` for `m ≤ 8` and `den ≤ 1000`.
pub fn erlang_c_exact(m: u32, num: u32, den: u32) -> f64 {
    assert!((1..=8).contains(&m) && num < den && den <= 1000);
    let (m128, n, d) = (m as u128, num as u128, den as u128);
    let a_num = m128 * n; // a = a_num / d
    let fact = |k: u128| (1..=k).product::<u128>();
    let top = a_num.pow(m) * d;
    let mut sum = 0u128;
    for k in 0..m {
        sum += a_num.pow(k) * d.pow(m - k) * (fact(m128) / fact(k as u128));
    }
    let bottom = sum * (d - n) + top;
    let g = gcd(top, bottom);
    // After reduction both fit 2^106 easily; divide as f64 for a correctly
    // rounded-ish quotient (two roundings, well under 1e-15 relative).
    (top / g) as f64 / (bottom / g) as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A random open network of `k` queues with all SCVs 1 and unit
/// multipliers. Rows keep at least 5% exit probability, every queue gets
/// external traffic with probability 0.7 (queue 1 always does), and service
/// rates are set so each utilization is uniform in [0.05, 0.95).
pub fn random_exponential_network(seed: u64, index: u32, k: usize) -> ValidatedNetwork {
    let mut s = Stream::new(seed, index, StreamKind::Scenario, 0);
    let servers: Vec<usize> = (0..k).map(|_| 1 + s.index(4)).collect();
    let mut rows = vec![vec![0.0; k]; k];
    for row in rows.iter_mut() {
        let budget = 0.95 * s.uniform();
        let weights: Vec<f64> = (0..k).map(|_| if s.uniform() < 0.5 { s.uniform() } else { 0.0 }).collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            for (p, w) in row.iter_mut().zip(&weights) {
                *p = budget * w / total;
            }
        }
    }
    let ext: Vec<f64> =
        (0..k).map(|i| if i == 0 || s.uniform() < 0.7 { 0.1 + 10.0 * s.uniform() } else { 0.0 }).collect();
    let draft = NetworkSpec {
        queues: (0..k).map(|i| QueueSpec::new(i + 1, 1, servers[i], 1.0, 1.0, ext[i], 1.0)).collect(),
        routing: RoutingMatrix::from_rows(rows.clone()),
    }
    .validate()
    .expect("generator builds valid networks");
    let lambda = qna::solve_flows(&draft).expect("open network");
    let queues = (0..k)
        .map(|i| {
            let rho = 0.05 + 0.9 * s.uniform();
            // Queues no packet reaches keep an arbitrary finite rate.
            let mu = if lambda[i] > 0.0 { lambda[i] / (servers[i] as f64 * rho) } else { 1.0 };
            QueueSpec::new(i + 1, 1, servers[i], mu, 1.0, ext[i], 1.0)
        })
        .collect();
    NetworkSpec { queues, routing: RoutingMatrix::from_rows(rows) }.validate().expect("valid")
}
