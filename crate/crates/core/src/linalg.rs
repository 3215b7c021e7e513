//! Dense Gaussian elimination with partial pivoting. K is small (tens of
//! queues at most), so nothing fancier is warranted.

use alloc::vec::Vec;

/// Relative residual accepted after a solve.
pub(crate) const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Solves `A x = b` with `A` given row-major as `n*n`. Returns `None` when a
/// pivot vanishes relative to the matrix scale or the relative residual
/// `‖Ax − b‖∞ / max(‖b‖∞, ‖A‖∞‖x‖∞)` exceeds [`RESIDUAL_TOLERANCE`].
pub(crate) fn solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= scale * 1e-13 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] -= f * m[col * n + j];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in (col + 1)..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }

    let mut resid = 0.0f64;
    let mut bnorm = 0.0f64;
    let mut xnorm = 0.0f64;
    for i in 0..n {
        let ax: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
        resid = resid.max((ax - b[i]).abs());
        bnorm = bnorm.max(b[i].abs());
        xnorm = xnorm.max(x[i].abs());
    }
    let denom = bnorm.max(scale * xnorm);
    if denom > 0.0 && resid / denom > RESIDUAL_TOLERANCE {
        return None;
    }
    Some(x)
}
