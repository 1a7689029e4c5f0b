/// Default central-difference step.
pub const DEFAULT_EPS: f64 = 1e-5;

/// Central-difference gradient of `f` at `theta`.
///
/// `f` must be deterministic; callers disable dropout and fix the data.
pub fn finite_diff_grad<Func>(mut f: Func, theta: &[f64], eps: f64) -> Vec<f64>
where
    Func: FnMut(&[f64]) -> f64,
{
    let mut probe = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let orig = probe[i];
        probe[i] = orig + eps;
        let up = f(&probe);
        probe[i] = orig - eps;
        let down = f(&probe);
        probe[i] = orig;
        grad.push((up - down) / (2.0 * eps));
    }
    grad
}

/// Norm-wise relative error `‖a − b‖ / max(‖a‖, ‖b‖)`.
///
/// Returns the absolute error instead when both norms are below `1e-10`,
/// so blocks with identically zero gradient compare cleanly.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale < 1e-10 {
        diff
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cross_entropy, softmax};

    #[test]
    fn quadratic_gradient() {
        let g = finite_diff_grad(|t| t.iter().map(|x| x * x).sum(), &[1.0, 2.0], DEFAULT_EPS);
        assert!((g[0] - 2.0).abs() < 1e-8);
        assert!((g[1] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn constant_function_has_zero_gradient() {
        let g = finite_diff_grad(|_| 3.5, &[0.1, -4.0, 9.0], DEFAULT_EPS);
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn softmax_cross_entropy_of_linear_layer() {
        // theta = row-major 3x2 weights; logits = W x
        let x = [0.7, -1.3];
        let y = 2;
        let theta = [0.2, -0.4, 0.9, 0.1, -0.3, 0.5];
        let loss = |t: &[f64]| {
            let z: Vec<f64> = (0..3).map(|r| t[2 * r] * x[0] + t[2 * r + 1] * x[1]).collect();
            cross_entropy(&softmax(&z), y).unwrap()
        };
        let numeric = finite_diff_grad(loss, &theta, DEFAULT_EPS);
        let z: Vec<f64> = (0..3).map(|r| theta[2 * r] * x[0] + theta[2 * r + 1] * x[1]).collect();
        let p = softmax(&z);
        let mut analytic = Vec::new();
        for r in 0..3 {
            let delta = p[r] - if r == y { 1.0 } else { 0.0 };
            analytic.push(delta * x[0]);
            analytic.push(delta * x[1]);
        }
        for (a, n) in analytic.iter().zip(&numeric) {
            assert!((a - n).abs() < 1e-7, "{a} vs {n}");
        }
    }

    #[test]
    fn relative_error_of_zero_blocks() {
        assert_eq!(relative_error(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert!(relative_error(&[1.0, 0.0], &[1.0, 1e-6]) < 1.1e-6);
    }
}
