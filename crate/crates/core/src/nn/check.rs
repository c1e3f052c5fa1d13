//! Gradient checking by central finite differences.
//!
//! Used by the test suites to validate every analytic gradient in the crate.
//! The loss is treated as a black-box function of a flat parameter vector;
//! quantities an implementation deliberately detaches (bootstrap targets,
//! advantage weights, scale factors) must be held constant by the closure so
//! the check differentiates the function actually implemented.

/// Central-difference gradient of `f` at `x` with step `h`.
pub fn finite_difference_grad<F>(mut f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut xs = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let orig = xs[i];
        xs[i] = orig + h;
        let up = f(&xs);
        xs[i] = orig - h;
        let down = f(&xs);
        xs[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

/// Per-coordinate relative error `|a−b| / max(1, |a|, |b|)`, maximized over
/// coordinates. The `max(1, ·)` floor makes the comparison absolute where
/// both gradients are small.
pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len(), "gradient length mismatch");
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &b)| (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_gradient_of_a_quadratic() {
        // f(x) = Σ i·x_i² ⇒ ∂f/∂x_i = 2i·x_i.
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| i as f64 * v * v).sum::<f64>();
        let x = [0.5, -1.5, 2.0, 0.25];
        let g = finite_difference_grad(f, &x, 1e-5);
        let expected: Vec<f64> = x.iter().enumerate().map(|(i, v)| 2.0 * i as f64 * v).collect();
        assert!(max_rel_err(&expected, &g) < 1e-9);
    }

    #[test]
    fn rel_err_floor_is_absolute_for_small_gradients() {
        assert!(max_rel_err(&[1e-9], &[2e-9]) < 1e-8);
        assert!(max_rel_err(&[100.0], &[100.01]) < 1.1e-4);
    }
}
