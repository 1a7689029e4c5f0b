use super::EvalError;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// Fraction of positions where `predictions` equals `golds`.
pub fn accuracy<T: PartialEq>(predictions: &[T], golds: &[T]) -> Result<f64, EvalError> {
    if predictions.len() != golds.len() || golds.is_empty() {
        return Err(EvalError::Config(format!(
            "accuracy needs equal, non-empty inputs (got {} predictions, {} golds)",
            predictions.len(),
            golds.len()
        )));
    }
    let correct = predictions.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(correct as f64 / golds.len() as f64)
}

/// Wald interval half-width `z * sqrt(p (1 - p) / n)`.
pub fn wald_ci(p_hat: f64, n: usize, z: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p_hat), "proportion {p_hat} outside [0, 1]");
    assert!(n >= 1, "n must be positive");
    z * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// `72.8% ± 1.35%`
pub fn format_accuracy(accuracy: f64, half_width: f64) -> String {
    format!("{:.1}% ± {:.2}%", 100.0 * accuracy, 100.0 * half_width)
}
