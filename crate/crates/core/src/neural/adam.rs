use crate::numerics::Real;

/// Adam hyper-parameters; defaults are the usual α=0.001, β1=0.9,
/// β2=0.999, ε=1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { alpha: 0.001, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First/second moment estimates over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<F> {
    pub m: Vec<F>,
    pub v: Vec<F>,
    pub t: u64,
    pub config: AdamConfig,
}

impl<F: Real> AdamState<F> {
    pub fn new(n_params: usize, config: AdamConfig) -> Self {
        Self { m: vec![F::zero(); n_params], v: vec![F::zero(); n_params], t: 0, config }
    }

    /// One update of the whole parameter vector.
    pub fn step(&mut self, theta: &mut [F], grads: &[F]) {
        assert_eq!(theta.len(), self.m.len());
        self.step_blocks(std::iter::once((theta, grads)));
    }

    /// One update over consecutive blocks that together span the parameter
    /// vector.
    pub fn step_blocks<'a, I>(&mut self, blocks: I)
    where
        I: IntoIterator<Item = (&'a mut [F], &'a [F])>,
    {
        self.t += 1;
        let c = self.config;
        let (b1, b2) = (F::lit(c.beta1), F::lit(c.beta2));
        let (one_m_b1, one_m_b2) = (F::lit(1.0 - c.beta1), F::lit(1.0 - c.beta2));
        let corr1 = F::lit(1.0 - c.beta1.powi(self.t as i32));
        let corr2 = F::lit(1.0 - c.beta2.powi(self.t as i32));
        let (alpha, eps) = (F::lit(c.alpha), F::lit(c.eps));
        let mut offset = 0;
        for (theta, grads) in blocks {
            assert_eq!(theta.len(), grads.len());
            let m = &mut self.m[offset..offset + theta.len()];
            let v = &mut self.v[offset..offset + theta.len()];
            for (((p, &g), m), v) in theta.iter_mut().zip(grads).zip(m).zip(v) {
                *m = b1 * *m + one_m_b1 * g;
                *v = b2 * *v + one_m_b2 * g * g;
                let m_hat = *m / corr1;
                let v_hat = *v / corr2;
                *p = *p - alpha * m_hat / (v_hat.sqrt() + eps);
            }
            offset += theta.len();
        }
        assert_eq!(offset, self.m.len(), "blocks must cover every parameter");
    }
}
