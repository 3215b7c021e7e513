//! Two-moment distributions used to drive the simulators.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::rng::Stream;

/// Largest Erlang order sampled as a sum of exponentials; larger orders use a
/// gamma sampler.
const ERLANG_DIRECT_MAX: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Erlang { k: u32, rate: f64 },
    /// Erlang(k − 1, rate) with probability `p`, Erlang(k, rate) otherwise.
    ErlangMix { k: u32, p: f64, rate: f64 },
    /// Exponential(rate1) with probability `p`, Exponential(rate2) otherwise.
    Hyperexp2 { p: f64, rate1: f64, rate2: f64 },
    EmpiricalMixture { values: Vec<f64>, probs: Vec<f64> },
}

impl DistributionSpec {
    pub fn mean(&self) -> f64 {
        match self {
            DistributionSpec::Deterministic { value } => *value,
            DistributionSpec::Exponential { rate } => 1.0 / rate,
            DistributionSpec::Erlang { k, rate } => *k as f64 / rate,
            DistributionSpec::ErlangMix { k, p, rate } => (*k as f64 - p) / rate,
            DistributionSpec::Hyperexp2 { p, rate1, rate2 } => p / rate1 + (1.0 - p) / rate2,
            DistributionSpec::EmpiricalMixture { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            DistributionSpec::Deterministic { value } => value * value,
            DistributionSpec::Exponential { rate } => 2.0 / (rate * rate),
            DistributionSpec::Erlang { k, rate } => {
                let k = *k as f64;
                k * (k + 1.0) / (rate * rate)
            }
            DistributionSpec::ErlangMix { k, p, rate } => {
                let k = *k as f64;
                (p * (k - 1.0) * k + (1.0 - p) * k * (k + 1.0)) / (rate * rate)
            }
            DistributionSpec::Hyperexp2 { p, rate1, rate2 } => 2.0 * p / (rate1 * rate1) + 2.0 * (1.0 - p) / (rate2 * rate2),
            DistributionSpec::EmpiricalMixture { values, probs } => {
                values.iter().zip(probs).map(|(v, p)| v * v * p).sum()
            }
        }
    }

    pub fn scv(&self) -> f64 {
        match self {
            DistributionSpec::Deterministic { .. } => 0.0,
            DistributionSpec::Exponential { .. } => 1.0,
            DistributionSpec::Erlang { k, .. } => 1.0 / *k as f64,
            DistributionSpec::EmpiricalMixture { values, probs } => {
                let m = self.mean();
                values.iter().zip(probs).map(|(v, p)| p * (v - m) * (v - m)).sum::<f64>() / (m * m)
            }
            _ => {
                let m = self.mean();
                self.second_moment() / (m * m) - 1.0
            }
        }
    }

    /// Rejects non-positive parameters and mixtures whose weights do not sum
    /// to 1 within 1e-12.
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |what: &str| Err(SimError::InvalidInput(format!("{what} in {self:?}")));
        let pos = |v: f64| v > 0.0 && v.is_finite();
        match self {
            DistributionSpec::Deterministic { value } if !pos(*value) => bad("non-positive value"),
            DistributionSpec::Exponential { rate } if !pos(*rate) => bad("non-positive rate"),
            DistributionSpec::Erlang { k, rate } if *k == 0 || !pos(*rate) => bad("bad Erlang parameters"),
            DistributionSpec::ErlangMix { k, p, rate } if *k < 2 || !pos(*rate) || !(0.0..=1.0).contains(p) => {
                bad("bad Erlang mixture parameters")
            }
            DistributionSpec::Hyperexp2 { p, rate1, rate2 } if !pos(*rate1) || !pos(*rate2) || !(0.0..=1.0).contains(p) => {
                bad("bad hyperexponential parameters")
            }
            DistributionSpec::EmpiricalMixture { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return bad("mismatched mixture");
                }
                if values.iter().any(|v| !pos(*v)) || probs.iter().any(|p| !(*p >= 0.0)) {
                    return bad("mixture value or weight out of range");
                }
                if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return bad("mixture weights do not sum to 1");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn sample(&self, s: &mut Stream) -> f64 {
        match self {
            DistributionSpec::Deterministic { value } => *value,
            DistributionSpec::Exponential { rate } => s.exponential(*rate),
            DistributionSpec::Erlang { k, rate } => erlang(s, *k, *rate),
            DistributionSpec::ErlangMix { k, p, rate } => {
                let order = if s.uniform() < *p { k - 1 } else { *k };
                erlang(s, order, *rate)
            }
            DistributionSpec::Hyperexp2 { p, rate1, rate2 } => {
                let rate = if s.uniform() < *p { *rate1 } else { *rate2 };
                s.exponential(rate)
            }
            DistributionSpec::EmpiricalMixture { values, probs } => {
                let u = s.uniform();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated mixture is non-empty")
            }
        }
    }
}

fn erlang(s: &mut Stream, k: u32, rate: f64) -> f64 {
    if k <= ERLANG_DIRECT_MAX {
        let mut acc = 0.0;
        for _ in 0..k {
            acc -= libm::log(s.uniform());
        }
        return acc / rate;
    }
    // Marsaglia–Tsang for shape >= 1.
    let d = k as f64 - 1.0 / 3.0;
    let c = 1.0 / libm::sqrt(9.0 * d);
    loop {
        let x = s.normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = s.uniform();
        if libm::log(u) < 0.5 * x * x + d - d * v + d * libm::log(v) {
            return d * v / rate;
        }
    }
}

/// A law with the given mean and SCV.
///
/// * `scv = 0`: deterministic,
/// * `0 < scv < 1`: mixture of Erlang(k − 1) and Erlang(k) with a common rate,
///   `k = ⌈1/scv⌉`, reducing to a pure Erlang when `1/scv` is an integer,
/// * `scv = 1`: exponential,
/// * `scv > 1`: two-phase hyperexponential with balanced means.
pub fn fit_distribution(mean: f64, scv: f64) -> Result<DistributionSpec, SimError> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(SimError::InvalidInput(format!("mean {mean} must be > 0")));
    }
    if !(scv >= 0.0 && scv.is_finite()) {
        return Err(SimError::InvalidInput(format!("scv {scv} must be >= 0")));
    }
    Ok(if scv == 0.0 {
        DistributionSpec::Deterministic { value: mean }
    } else if scv == 1.0 {
        DistributionSpec::Exponential { rate: 1.0 / mean }
    } else if scv < 1.0 {
        let inv = 1.0 / scv;
        let nearest = libm::round(inv);
        let k = if (inv - nearest).abs() < 1e-9 { nearest } else { libm::ceil(inv) };
        let p = ((k * scv - libm::sqrt(k * (1.0 + scv) - k * k * scv)) / (1.0 + scv)).max(0.0);
        let k = k as u32;
        if p <= 1e-14 {
            DistributionSpec::Erlang { k, rate: k as f64 / mean }
        } else {
            DistributionSpec::ErlangMix { k, p, rate: (k as f64 - p) / mean }
        }
    } else {
        let p = 0.5 * (1.0 + libm::sqrt((scv - 1.0) / (scv + 1.0)));
        DistributionSpec::Hyperexp2 { p, rate1: 2.0 * p / mean, rate2: 2.0 * (1.0 - p) / mean }
    })
}
