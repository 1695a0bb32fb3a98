//! Finite-difference utilities for validating analytic gradients.

/// Central finite differences of a scalar function at `x`:
/// `(f(x + eps·e_i) − f(x − eps·e_i)) / (2·eps)` for every coordinate.
pub fn central_diff<F>(mut f: F, x: &[f64], eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut work = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let orig = work[i];
        work[i] = orig + eps;
        let hi = f(&work);
        work[i] = orig - eps;
        let lo = f(&work);
        work[i] = orig;
        out.push((hi - lo) / (2.0 * eps));
    }
    out
}

/// Worst relative error between analytic and numeric gradients, with
/// `|a − n| / max(|a|, |n|)` as the per-coordinate measure; where both
/// magnitudes fall below 1e-6 the absolute error is used instead.
pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let mut worst = 0.0f64;
    for (&a, &n) in analytic.iter().zip(numeric) {
        let denom = a.abs().max(n.abs());
        let err = if denom < 1e-6 {
            (a - n).abs()
        } else {
            (a - n).abs() / denom
        };
        if err > worst {
            worst = err;
        }
    }
    worst
}
