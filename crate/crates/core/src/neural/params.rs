use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lstm::{LstmParams, GATES};
use crate::embeddings::{EmbeddingMatrix, INIT_SCALE};
use crate::numerics::{Real, Tensor2};

/// Architecture sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    /// d_e
    pub embedding_dim: usize,
    /// d_h
    pub lstm_hidden: usize,
    /// d_u
    pub mlp_hidden: usize,
    /// L
    pub max_len: usize,
    /// Requested |V|; the built vocabulary may be smaller.
    pub vocab_size: usize,
}

impl Default for ModelDims {
    fn default() -> Self {
        Self { embedding_dim: 300, lstm_hidden: 50, mlp_hidden: 200, max_len: 15, vocab_size: 1000 }
    }
}

/// Forget-gate bias at initialization.
pub const FORGET_BIAS_INIT: f64 = 1.0;

/// All trainable weights: embedding → LSTM → `u = tanh(W_1 [h; Z] + b_1)`
/// → `softmax(W_2 u + b_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<F> {
    pub embedding: EmbeddingMatrix<F>,
    pub lstm: LstmParams<F>,
    /// `d_u × (d_h + |V|)`
    pub w1: Tensor2<F>,
    pub b1: Tensor2<F>,
    /// `|DA| × d_u`
    pub w2: Tensor2<F>,
    pub b2: Tensor2<F>,
}

impl<F: Real> ModelParams<F> {
    /// Uniform `[-0.05, 0.05]` weights, zero biases, forget bias 1. The
    /// embedding table is supplied by the caller.
    pub fn init(embedding: EmbeddingMatrix<F>, lstm_hidden: usize, mlp_hidden: usize, n_labels: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let d_e = embedding.dim();
        let vocab = embedding.rows() - 1;
        let lstm = LstmParams::uniform(d_e, lstm_hidden, INIT_SCALE, FORGET_BIAS_INIT, &mut rng);
        let w1 = Tensor2::uniform(mlp_hidden, lstm_hidden + vocab, INIT_SCALE, &mut rng);
        let w2 = Tensor2::uniform(n_labels, mlp_hidden, INIT_SCALE, &mut rng);
        Self {
            embedding,
            lstm,
            w1,
            b1: Tensor2::zeros(mlp_hidden, 1),
            w2,
            b2: Tensor2::zeros(n_labels, 1),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let z = |t: &Tensor2<F>| Tensor2::zeros(t.rows(), t.cols());
        Self {
            embedding: EmbeddingMatrix::from_table(z(self.embedding.table())),
            lstm: LstmParams {
                w: std::array::from_fn(|k| z(&self.lstm.w[k])),
                u: std::array::from_fn(|k| z(&self.lstm.u[k])),
                b: std::array::from_fn(|k| z(&self.lstm.b[k])),
            },
            w1: z(&self.w1),
            b1: z(&self.b1),
            w2: z(&self.w2),
            b2: z(&self.b2),
        }
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding.dim()
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.rows() - 1
    }

    pub fn lstm_hidden(&self) -> usize {
        self.lstm.hidden()
    }

    pub fn mlp_hidden(&self) -> usize {
        self.w1.rows()
    }

    pub fn n_labels(&self) -> usize {
        self.w2.rows()
    }

    /// Named parameter blocks in canonical order; the embedding comes first.
    pub fn blocks(&self) -> Vec<(String, &Tensor2<F>)> {
        let mut out = vec![("embedding".to_string(), self.embedding.table())];
        for (k, g) in GATES.iter().enumerate() {
            out.push((format!("lstm.W_{g}"), &self.lstm.w[k]));
        }
        for (k, g) in GATES.iter().enumerate() {
            out.push((format!("lstm.U_{g}"), &self.lstm.u[k]));
        }
        for (k, g) in GATES.iter().enumerate() {
            out.push((format!("lstm.b_{g}"), &self.lstm.b[k]));
        }
        out.push(("mlp.W_1".into(), &self.w1));
        out.push(("mlp.b_1".into(), &self.b1));
        out.push(("mlp.W_2".into(), &self.w2));
        out.push(("mlp.b_2".into(), &self.b2));
        out
    }

    /// Mutable blocks, same order as [`ModelParams::blocks`].
    pub fn blocks_mut(&mut self) -> Vec<&mut Tensor2<F>> {
        let mut out: Vec<&mut Tensor2<F>> = vec![self.embedding.table_mut()];
        let LstmParams { w, u, b } = &mut self.lstm;
        out.extend(w.iter_mut());
        out.extend(u.iter_mut());
        out.extend(b.iter_mut());
        out.extend([&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]);
        out
    }

    pub fn num_params(&self) -> usize {
        self.blocks().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn flatten(&self) -> Vec<F> {
        self.blocks().iter().flat_map(|(_, t)| t.data().iter().copied()).collect()
    }

    pub fn assign_flat(&mut self, flat: &[F]) {
        assert_eq!(flat.len(), self.num_params());
        let mut offset = 0;
        for t in self.blocks_mut() {
            let n = t.len();
            t.data_mut().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, (_, b)) in self.blocks_mut().into_iter().zip(other.blocks()) {
            a.add_assign(b);
        }
    }

    pub fn scale(&mut self, s: F) {
        for t in self.blocks_mut() {
            t.scale(s);
        }
    }

    pub fn cast<G: Real>(&self) -> ModelParams<G> {
        ModelParams {
            embedding: EmbeddingMatrix::from_table(self.embedding.table().cast()),
            lstm: LstmParams {
                w: std::array::from_fn(|k| self.lstm.w[k].cast()),
                u: std::array::from_fn(|k| self.lstm.u[k].cast()),
                b: std::array::from_fn(|k| self.lstm.b[k].cast()),
            },
            w1: self.w1.cast(),
            b1: self.b1.cast(),
            w2: self.w2.cast(),
            b2: self.b2.cast(),
        }
    }
}
