//! Sample means with Student-t 95% confidence intervals.

use serde::{Deserialize, Serialize};

/// t_{0.975} for 1..=30 degrees of freedom.
const T_975: [f64; 30] = [
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157, 2.228139, 2.200985,
    2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922, 2.093024, 2.085963, 2.079614, 2.073873,
    2.068658, 2.063899, 2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272,
];

/// Two-sided 95% Student-t critical value.
pub fn t_critical_95(df: usize) -> f64 {
    match df {
        0 => f64::INFINITY,
        1..=30 => T_975[df - 1],
        _ => {
            // Cornish–Fisher expansion around the normal quantile.
            let z = 1.959_963_984_540_054;
            let n = df as f64;
            let z3 = z * z * z;
            let z5 = z3 * z * z;
            z + (z3 + z) / (4.0 * n) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * n * n)
        }
    }
}

/// A point estimate with its 95% half-width; `samples` is the number of
/// independent observations (batches or replications) behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, half_width: f64::INFINITY, samples: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate { mean, half_width: f64::INFINITY, samples: 1 };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let half_width = t_critical_95(n - 1) * libm::sqrt(var / n as f64);
        Estimate { mean, half_width, samples: n }
    }

    pub fn contains(&self, value: f64, widths: f64) -> bool {
        (self.mean - value).abs() <= widths * self.half_width
    }
}
