//! Log-linear least squares, shared by the ergodicity and rate diagnostics.

use crate::num::Scalar;

/// Fits `log v ~ log c + k * log r` over `(k, v)` points with `v > 0`.
///
/// Returns `(c, r)`. Points with non-positive values must be filtered by the
/// caller. `None` when fewer than two points are given or the abscissae are
/// degenerate.
pub(crate) fn log_linear_fit<T: Scalar>(points: &[(T, T)]) -> Option<(T, T)> {
    if points.len() < 2 {
        return None;
    }
    let n = T::from_usize(points.len())?;
    let mut sx = T::zero();
    let mut sy = T::zero();
    for &(k, v) in points {
        sx += k;
        sy += v.ln();
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &(k, v) in points {
        let dx = k - mx;
        sxx += dx * dx;
        sxy += dx * (v.ln() - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Some((intercept.exp(), slope.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_geometric_decay() {
        let points: Vec<(f64, f64)> = (0..40).map(|k| (k as f64, 3.0 * 0.8f64.powi(k))).collect();
        let (c, r) = log_linear_fit(&points).unwrap();
        assert!((c - 3.0).abs() < 1e-10, "c = {c}");
        assert!((r - 0.8).abs() < 1e-12, "r = {r}");
    }

    #[test]
    fn degenerate_inputs_yield_none() {
        assert_eq!(log_linear_fit::<f64>(&[]), None);
        assert_eq!(log_linear_fit(&[(0.0, 1.0)]), None);
        assert_eq!(log_linear_fit(&[(2.0, 1.0), (2.0, 0.5)]), None);
    }
}
