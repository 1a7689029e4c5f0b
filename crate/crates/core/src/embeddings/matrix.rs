use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingError, EmbeddingSet};
use crate::corpus::{Vocabulary, PADDING_INDEX};
use crate::numerics::{Real, Tensor2};

/// Half-width of the uniform initialization interval.
pub const INIT_SCALE: f64 = 0.05;

/// `(|V| + 1) × d_e` look-up table; row 0 belongs to PADDING and stays zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<F> {
    table: Tensor2<F>,
}

impl<F: Real> EmbeddingMatrix<F> {
    /// Wraps `table`, zeroing the padding row.
    pub fn from_table(mut table: Tensor2<F>) -> Self {
        table.row_mut(PADDING_INDEX).iter_mut().for_each(|v| *v = F::zero());
        Self { table }
    }

    pub fn table(&self) -> &Tensor2<F> {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut Tensor2<F> {
        &mut self.table
    }

    pub fn into_table(self) -> Tensor2<F> {
        self.table
    }

    pub fn dim(&self) -> usize {
        self.table.cols()
    }

    pub fn rows(&self) -> usize {
        self.table.rows()
    }

    pub fn row(&self, index: usize) -> &[F] {
        self.table.row(index)
    }
}

/// I.i.d. uniform on `[-0.05, 0.05]`, row 0 zeroed afterwards.
pub fn init_random<F: Real>(rows: usize, dim: usize, seed: u64) -> Tensor2<F> {
    assert!(rows >= 1 && dim >= 1, "init_random needs a non-empty shape");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tensor2::uniform(rows, dim, INIT_SCALE, &mut rng);
    t.row_mut(0).iter_mut().for_each(|v| *v = F::zero());
    t
}

/// Random table overwritten by pretrained vectors where the vocabulary word
/// exists in `pretrained` (case-sensitive). UNK always stays random.
/// Returns the matrix and the coverage `matched / |V|`.
pub fn build_embedding_matrix<F: Real>(
    vocab: &Vocabulary,
    dim: usize,
    pretrained: Option<&EmbeddingSet>,
    seed: u64,
) -> Result<(EmbeddingMatrix<F>, f64), EmbeddingError> {
    if dim == 0 {
        return Err(EmbeddingError::ZeroDim);
    }
    let mut table = init_random::<F>(vocab.size() + 1, dim, seed);
    let mut matched = 0usize;
    if let Some(set) = pretrained {
        if set.dim() != dim {
            return Err(EmbeddingError::DimMismatch {
                word: "<pretrained set>".into(),
                expected: dim,
                got: set.dim(),
            });
        }
        for (i, word) in vocab.entries().iter().enumerate() {
            let index = i + 1;
            if index == vocab.unk_index() {
                continue;
            }
            if let Some(v) = set.get(word) {
                for (dst, src) in table.row_mut(index).iter_mut().zip(v) {
                    *dst = F::lit(*src as f64);
                }
                matched += 1;
            }
        }
    }
    let coverage = matched as f64 / vocab.size() as f64;
    Ok((EmbeddingMatrix::from_table(table), coverage))
}
