use crate::container::{Container, ContainerError, NamedTensor};
use crate::numerics::{Tensor2, PROB_FLOOR};

/// Add-k smoothed dialogue-act bigram. Row `n` of the count matrix is the
/// start-of-dialogue context.
#[derive(Debug, Clone, PartialEq)]
pub struct BigramModel {
    counts: Tensor2<f64>,
    k: f64,
    priors: Vec<f64>,
}

/// Container tensor holding the transition counts.
pub const BIGRAM_TENSOR: &str = "bigram.counts";
const BIGRAM_K: &str = "bigram.k";

/// Counts transitions (including from the start symbol) over label-id
/// sequences.
pub fn train_bigram(sequences: &[Vec<usize>], n_labels: usize, k: f64) -> BigramModel {
    assert!(k >= 0.0, "smoothing constant must be non-negative");
    let mut counts = Tensor2::zeros(n_labels + 1, n_labels);
    let mut unigram = vec![0.0; n_labels];
    for seq in sequences {
        let mut prev = n_labels;
        for &y in seq {
            assert!(y < n_labels, "label id {y} out of range");
            counts.set(prev, y, counts.get(prev, y) + 1.0);
            unigram[y] += 1.0;
            prev = y;
        }
    }
    let total: f64 = unigram.iter().sum::<f64>() + k * n_labels as f64;
    let priors = unigram
        .iter()
        .map(|c| if total > 0.0 { (c + k) / total } else { 1.0 / n_labels as f64 })
        .collect();
    BigramModel { counts, k, priors }
}

impl BigramModel {
    pub fn n_labels(&self) -> usize {
        self.counts.cols()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Smoothed unigram label distribution.
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `P(next | prev)`, with `prev = None` at the start of a dialogue. A
    /// context never seen with `k = 0` falls back to uniform.
    pub fn prob(&self, prev: Option<usize>, next: usize) -> f64 {
        let n = self.n_labels();
        let row = self.counts.row(prev.unwrap_or(n));
        let total: f64 = row.iter().sum::<f64>() + self.k * n as f64;
        if total == 0.0 {
            return 1.0 / n as f64;
        }
        (row[next] + self.k) / total
    }

    pub fn to_tensors(&self) -> Vec<NamedTensor> {
        vec![
            NamedTensor::new(
                BIGRAM_TENSOR,
                vec![self.counts.rows(), self.counts.cols()],
                self.counts.data().iter().map(|&c| c as f32).collect(),
            ),
            NamedTensor::scalar(BIGRAM_K, self.k as f32),
        ]
    }

    /// Reads a bigram stored alongside a model, if present.
    pub fn from_container(c: &Container) -> Result<Option<Self>, ContainerError> {
        if c.tensor_any(BIGRAM_TENSOR).is_err() {
            return Ok(None);
        }
        let n = c.labels.len();
        let data: Vec<f64> = c.tensor(BIGRAM_TENSOR, &[n + 1, n])?.iter().map(|&x| f64::from(x)).collect();
        let k = f64::from(c.scalar(BIGRAM_K)?);
        if k < 0.0 || data.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(ContainerError::Invalid("bad bigram counts".into()));
        }
        let counts = Tensor2::from_vec(n + 1, n, data).expect("checked shape");
        let mut unigram = vec![0.0; n];
        for r in 0..=n {
            for (u, c) in unigram.iter_mut().zip(counts.row(r)) {
                *u += c;
            }
        }
        let total: f64 = unigram.iter().sum::<f64>() + k * n as f64;
        let priors =
            unigram.iter().map(|c| if total > 0.0 { (c + k) / total } else { 1.0 / n as f64 }).collect();
        Ok(Some(Self { counts, k, priors }))
    }
}

/// Label sequence maximizing `Σ log p(y_t | x_t) + weight · log P(y_t | y_{t-1})`.
/// Ties go to the lowest label index. With `weight = 0` the transition term
/// is dropped and the result is the per-row arg-max.
pub fn viterbi_rescore(lattice: &[Vec<f64>], bigram: &BigramModel, weight: f64) -> Vec<usize> {
    let n = bigram.n_labels();
    if lattice.is_empty() {
        return Vec::new();
    }
    assert!(lattice.iter().all(|row| row.len() == n), "lattice width must match the bigram");
    let emit = |p: f64| p.max(PROB_FLOOR).ln();
    let trans = |prev: Option<usize>, next: usize| {
        if weight == 0.0 {
            0.0
        } else {
            weight * bigram.prob(prev, next).max(PROB_FLOOR).ln()
        }
    };
    let mut score: Vec<f64> = (0..n).map(|y| emit(lattice[0][y]) + trans(None, y)).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(lattice.len());
    for row in &lattice[1..] {
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut ptr = vec![0; n];
        for y in 0..n {
            for (p, s) in score.iter().enumerate() {
                let cand = s + trans(Some(p), y);
                if cand > next[y] {
                    next[y] = cand;
                    ptr[y] = p;
                }
            }
            next[y] += emit(row[y]);
        }
        back.push(ptr);
        score = next;
    }
    let mut best = 0;
    for y in 1..n {
        if score[y] > score[best] {
            best = y;
        }
    }
    let mut path = vec![best];
    for ptr in back.iter().rev() {
        best = ptr[best];
        path.push(best);
    }
    path.reverse();
    path
}
