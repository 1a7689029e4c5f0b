use super::{NumericsError, Real};

/// Lower bound applied to the gold-class probability before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

#[inline]
pub fn sigmoid<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// σ'(x) expressed through y = σ(x).
#[inline]
pub fn dsigmoid_from_output<F: Real>(y: F) -> F {
    y * (F::one() - y)
}

/// tanh'(x) expressed through y = tanh(x).
#[inline]
pub fn dtanh_from_output<F: Real>(y: F) -> F {
    F::one() - y * y
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax<F: Real>(z: &[F]) -> Vec<F> {
    assert!(!z.is_empty(), "softmax of an empty vector");
    let max = z.iter().copied().fold(F::neg_infinity(), F::max);
    let mut out: Vec<F> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: F = out.iter().copied().sum();
    out.iter_mut().for_each(|v| *v = *v / sum);
    out
}

/// `-ln p[y]` with `p[y]` floored at [`PROB_FLOOR`].
pub fn cross_entropy<F: Real>(p: &[F], y: usize) -> Result<F, NumericsError> {
    let py = *p
        .get(y)
        .ok_or(NumericsError::IndexOutOfRange { index: y, len: p.len() })?;
    Ok(-py.max(F::lit(PROB_FLOOR)).ln())
}
