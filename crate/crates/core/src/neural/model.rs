use rand::Rng;

use super::lstm::{lstm_step, LstmParams, StepState, CELL, FORGET, INPUT, OUTPUT};
use super::params::ModelParams;
use crate::corpus::EncodedSentence;
use crate::numerics::{cross_entropy, dsigmoid_from_output, dtanh_from_output, softmax, Real};

/// Per-step inputs and activations kept for backpropagation.
#[derive(Debug, Clone)]
struct StepCache<F> {
    token: usize,
    h_prev: Vec<F>,
    c_prev: Vec<F>,
    state: StepState<F>,
}

/// Intermediates of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<F> {
    steps: Vec<StepCache<F>>,
    /// Inverted-dropout multipliers applied to `h`, if any.
    dropout: Option<Vec<F>>,
    /// `h` after dropout, the first `d_h` entries of the MLP input.
    h_out: Vec<F>,
    prev_bow: Vec<usize>,
    u: Vec<F>,
    pub probs: Vec<F>,
}

/// Draws an inverted-dropout mask: each entry is 0 with probability `rate`,
/// otherwise `1 / (1 - rate)`.
pub fn dropout_mask<F: Real, R: Rng>(len: usize, rate: f64, rng: &mut R) -> Vec<F> {
    let keep = F::lit(1.0 / (1.0 - rate));
    (0..len).map(|_| if rng.gen_bool(rate) { F::zero() } else { keep }).collect()
}

impl<F: Real> ModelParams<F> {
    /// Forward pass. With `train = Some((rng, rate))` inverted dropout is
    /// applied to the LSTM output.
    pub fn forward<R: Rng>(&self, ex: &EncodedSentence, train: Option<(&mut R, f64)>) -> ForwardCache<F> {
        let mask = train
            .filter(|(_, rate)| *rate > 0.0)
            .map(|(rng, rate)| dropout_mask(self.lstm_hidden(), rate, rng));
        self.forward_with_dropout(ex, mask)
    }

    /// Inference-mode forward pass.
    pub fn forward_eval(&self, ex: &EncodedSentence) -> ForwardCache<F> {
        self.forward_with_dropout(ex, None)
    }

    /// Forward pass with an explicit dropout mask.
    pub fn forward_with_dropout(&self, ex: &EncodedSentence, dropout: Option<Vec<F>>) -> ForwardCache<F> {
        let d_h = self.lstm_hidden();
        let mut h = vec![F::zero(); d_h];
        let mut c = vec![F::zero(); d_h];
        let mut steps = Vec::with_capacity(ex.token_ids.len());
        // masked slots are skipped entirely; h and c carry through unchanged
        for (&token, _) in ex.token_ids.iter().zip(&ex.mask).filter(|(_, &m)| m) {
            let x = self.embedding.row(token);
            let state = lstm_step(x, &h, &c, &self.lstm).expect("shapes validated at construction");
            let h_prev = std::mem::replace(&mut h, state.h.clone());
            let c_prev = std::mem::replace(&mut c, state.c.clone());
            steps.push(StepCache { token, h_prev, c_prev, state });
        }
        if steps.is_empty() {
            log::warn!("all-padding input; using a zero LSTM state");
        }
        let h_out: Vec<F> = match &dropout {
            Some(m) => h.iter().zip(m).map(|(a, b)| *a * *b).collect(),
            None => h,
        };
        let prev_bow = ex.prev_bow.active().to_vec();
        let mut u = self.b1.data().to_vec();
        for (r, out) in u.iter_mut().enumerate() {
            let row = self.w1.row(r);
            let mut acc = F::zero();
            for (w, x) in row[..d_h].iter().zip(&h_out) {
                acc = acc + *w * *x;
            }
            for &j in &prev_bow {
                acc = acc + row[d_h + j];
            }
            *out = (*out + acc).tanh();
        }
        let mut logits = self.b2.data().to_vec();
        self.w2.matvec_acc(&u, &mut logits);
        let probs = softmax(&logits);
        ForwardCache { steps, dropout, h_out, prev_bow, u, probs }
    }

    /// Class distribution in inference mode.
    pub fn probs(&self, ex: &EncodedSentence) -> Vec<F> {
        self.forward_eval(ex).probs
    }

    /// Arg-max label (lowest index on ties) and the distribution.
    pub fn predict(&self, ex: &EncodedSentence) -> (usize, Vec<F>) {
        let probs = self.probs(ex);
        (argmax(&probs), probs)
    }

    /// Inference-mode cross-entropy of one example.
    pub fn loss(&self, ex: &EncodedSentence) -> F {
        cross_entropy(&self.probs(ex), ex.label_id).expect("label in range")
    }

    /// Accumulates the gradient of `cross_entropy(probs, label)` into `grads`.
    /// The embedding gradient is skipped when `freeze_embeddings` is set.
    pub fn backward(&self, cache: &ForwardCache<F>, label: usize, freeze_embeddings: bool, grads: &mut ModelParams<F>) {
        let d_h = self.lstm_hidden();
        // softmax + cross-entropy: dL/dlogits = p - onehot(y)
        let mut dlogits = cache.probs.clone();
        dlogits[label] = dlogits[label] - F::one();
        grads.w2.add_outer(&dlogits, &cache.u);
        add_into(grads.b2.data_mut(), &dlogits);

        let mut du = vec![F::zero(); cache.u.len()];
        self.w2.matvec_t_acc(&dlogits, &mut du);
        let dz1: Vec<F> = du.iter().zip(&cache.u).map(|(d, u)| *d * dtanh_from_output(*u)).collect();
        add_into(grads.b1.data_mut(), &dz1);
        let mut dh = vec![F::zero(); d_h];
        for (r, &dr) in dz1.iter().enumerate() {
            if dr == F::zero() {
                continue;
            }
            let grow = grads.w1.row_mut(r);
            for (g, x) in grow[..d_h].iter_mut().zip(&cache.h_out) {
                *g = *g + dr * *x;
            }
            for &j in &cache.prev_bow {
                grow[d_h + j] = grow[d_h + j] + dr;
            }
            for (d, w) in dh.iter_mut().zip(&self.w1.row(r)[..d_h]) {
                *d = *d + dr * *w;
            }
        }
        if let Some(m) = &cache.dropout {
            dh.iter_mut().zip(m).for_each(|(d, s)| *d = *d * *s);
        }
        self.backward_lstm(cache, dh, freeze_embeddings, grads);
    }

    fn backward_lstm(&self, cache: &ForwardCache<F>, mut dh: Vec<F>, freeze_embeddings: bool, grads: &mut ModelParams<F>) {
        let d_h = self.lstm_hidden();
        let d_e = self.embedding_dim();
        let LstmParams { w, u, .. } = &self.lstm;
        let mut dc = vec![F::zero(); d_h];
        let mut dx = vec![F::zero(); d_e];
        for step in cache.steps.iter().rev() {
            let s = &step.state;
            let mut da: [Vec<F>; 4] = std::array::from_fn(|_| vec![F::zero(); d_h]);
            for j in 0..d_h {
                let (i, f, g, o) = (s.gates[INPUT][j], s.gates[FORGET][j], s.gates[CELL][j], s.gates[OUTPUT][j]);
                let dc_j = dc[j] + dh[j] * o * dtanh_from_output(s.tanh_c[j]);
                da[OUTPUT][j] = dh[j] * s.tanh_c[j] * dsigmoid_from_output(o);
                da[INPUT][j] = dc_j * g * dsigmoid_from_output(i);
                da[FORGET][j] = dc_j * step.c_prev[j] * dsigmoid_from_output(f);
                da[CELL][j] = dc_j * i * dtanh_from_output(g);
                dc[j] = dc_j * f;
            }
            let x = self.embedding.row(step.token);
            dh.iter_mut().for_each(|v| *v = F::zero());
            dx.iter_mut().for_each(|v| *v = F::zero());
            for k in 0..4 {
                grads.lstm.w[k].add_outer(&da[k], x);
                grads.lstm.u[k].add_outer(&da[k], &step.h_prev);
                add_into(grads.lstm.b[k].data_mut(), &da[k]);
                u[k].matvec_t_acc(&da[k], &mut dh);
                if !freeze_embeddings {
                    w[k].matvec_t_acc(&da[k], &mut dx);
                }
            }
            if !freeze_embeddings {
                add_into(grads.embedding.table_mut().row_mut(step.token), &dx);
            }
        }
    }
}

fn add_into<F: Real>(dst: &mut [F], src: &[F]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = *d + *s;
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax<F: Real>(v: &[F]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
