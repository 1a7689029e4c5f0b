use rand::Rng;

use crate::numerics::{sigmoid, NumericsError, Real, Tensor2};

/// Gate order used for every per-gate array: input, forget, cell, output.
pub const GATES: [&str; 4] = ["i", "f", "c", "o"];
pub const INPUT: usize = 0;
pub const FORGET: usize = 1;
pub const CELL: usize = 2;
pub const OUTPUT: usize = 3;

/// Forget-gate LSTM without peepholes.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams<F> {
    /// `d_h × d_e` input weights per gate.
    pub w: [Tensor2<F>; 4],
    /// `d_h × d_h` recurrent weights per gate.
    pub u: [Tensor2<F>; 4],
    /// `d_h × 1` biases per gate.
    pub b: [Tensor2<F>; 4],
}

impl<F: Real> LstmParams<F> {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self {
            w: std::array::from_fn(|_| Tensor2::zeros(hidden, input_dim)),
            u: std::array::from_fn(|_| Tensor2::zeros(hidden, hidden)),
            b: std::array::from_fn(|_| Tensor2::zeros(hidden, 1)),
        }
    }

    /// Uniform weights on `[-scale, scale]`, zero biases except the forget
    /// gate at `forget_bias`.
    pub fn uniform<R: Rng>(input_dim: usize, hidden: usize, scale: f64, forget_bias: f64, rng: &mut R) -> Self {
        let w = std::array::from_fn(|_| Tensor2::uniform(hidden, input_dim, scale, rng));
        let u = std::array::from_fn(|_| Tensor2::uniform(hidden, hidden, scale, rng));
        let mut b: [Tensor2<F>; 4] = std::array::from_fn(|_| Tensor2::zeros(hidden, 1));
        b[FORGET].fill(F::lit(forget_bias));
        Self { w, u, b }
    }

    pub fn hidden(&self) -> usize {
        self.w[0].rows()
    }

    pub fn input_dim(&self) -> usize {
        self.w[0].cols()
    }
}

/// Gate activations and states of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState<F> {
    pub gates: [Vec<F>; 4],
    pub c: Vec<F>,
    pub tanh_c: Vec<F>,
    pub h: Vec<F>,
}

/// One LSTM step:
/// `i,f,o = σ(W x + U h + b)`, `g = tanh(W_c x + U_c h + b_c)`,
/// `c = f⊙c_prev + i⊙g`, `h = o⊙tanh(c)`.
pub fn lstm_step<F: Real>(
    x: &[F],
    h_prev: &[F],
    c_prev: &[F],
    p: &LstmParams<F>,
) -> Result<StepState<F>, NumericsError> {
    let d_h = p.hidden();
    if x.len() != p.input_dim() || h_prev.len() != d_h || c_prev.len() != d_h {
        return Err(NumericsError::Shape(format!(
            "lstm_step: x {} / h {} / c {} against d_e {} d_h {}",
            x.len(),
            h_prev.len(),
            c_prev.len(),
            p.input_dim(),
            d_h
        )));
    }
    let gates: [Vec<F>; 4] = std::array::from_fn(|k| {
        let mut a = p.b[k].data().to_vec();
        p.w[k].matvec_acc(x, &mut a);
        p.u[k].matvec_acc(h_prev, &mut a);
        if k == CELL {
            a.iter_mut().for_each(|v| *v = v.tanh());
        } else {
            a.iter_mut().for_each(|v| *v = sigmoid(*v));
        }
        a
    });
    let c: Vec<F> = (0..d_h)
        .map(|j| gates[FORGET][j] * c_prev[j] + gates[INPUT][j] * gates[CELL][j])
        .collect();
    let tanh_c: Vec<F> = c.iter().map(|v| v.tanh()).collect();
    let h = (0..d_h).map(|j| gates[OUTPUT][j] * tanh_c[j]).collect();
    Ok(StepState { gates, c, tanh_c, h })
}
