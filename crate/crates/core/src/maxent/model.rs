use rayon::prelude::*;
use thiserror::Error;

use super::lbfgs::{lbfgs_minimize, LbfgsConfig, LbfgsReport};
use crate::container::{Container, ContainerError, ModelKind, NamedTensor};
use crate::corpus::{BagOfWords, Corpus, CorpusError, LabelSet, Vocabulary};
use crate::embeddings::{avg_sentence_embedding, EmbeddingSet};
use crate::neural::argmax;
use crate::numerics::{softmax, Tensor2};

/// Binary bag of words over the vocabulary, optionally followed by the
/// sentence's averaged word embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct MeFeatureVector {
    pub bow: BagOfWords,
    pub emb_avg: Option<Vec<f32>>,
}

impl MeFeatureVector {
    pub fn len(&self) -> usize {
        self.bow.dim() + self.emb_avg.as_ref().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.bow.to_dense().into_iter().map(f64::from).collect();
        if let Some(e) = &self.emb_avg {
            v.extend(e.iter().map(|&x| f64::from(x)));
        }
        v
    }
}

pub fn featurize<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, embeddings: Option<&EmbeddingSet>) -> MeFeatureVector {
    MeFeatureVector {
        bow: BagOfWords::from_tokens(tokens, vocab),
        emb_avg: embeddings.map(|set| avg_sentence_embedding(tokens, set).0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeExample {
    pub features: MeFeatureVector,
    pub label_id: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeParams {
    /// `|DA| × dim(X)`
    pub w: Tensor2<f64>,
    pub b: Vec<f64>,
}

impl MeParams {
    pub fn zeros(n_labels: usize, dim: usize) -> Self {
        Self { w: Tensor2::zeros(n_labels, dim), b: vec![0.0; n_labels] }
    }

    pub fn n_labels(&self) -> usize {
        self.b.len()
    }

    pub fn dim(&self) -> usize {
        self.w.cols()
    }

    /// `W` row-major followed by `b`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.w.data().to_vec();
        v.extend_from_slice(&self.b);
        v
    }

    pub fn from_flat(n_labels: usize, dim: usize, flat: &[f64]) -> Self {
        assert_eq!(flat.len(), n_labels * (dim + 1), "flat parameter length");
        let (w, b) = flat.split_at(n_labels * dim);
        Self { w: Tensor2::from_vec(n_labels, dim, w.to_vec()).expect("length checked"), b: b.to_vec() }
    }

    pub fn logits(&self, x: &MeFeatureVector) -> Vec<f64> {
        let v = x.bow.dim();
        assert_eq!(x.len(), self.dim(), "feature length does not match the model");
        (0..self.n_labels())
            .map(|k| {
                let row = self.w.row(k);
                let mut z = self.b[k] + x.bow.active().iter().map(|&j| row[j]).sum::<f64>();
                if let Some(e) = &x.emb_avg {
                    z += row[v..].iter().zip(e).map(|(w, &x)| w * f64::from(x)).sum::<f64>();
                }
                z
            })
            .collect()
    }
}

/// Label id (lowest on ties) and distribution.
pub fn me_predict(params: &MeParams, x: &MeFeatureVector) -> (usize, Vec<f64>) {
    let probs = softmax(&params.logits(x));
    (argmax(&probs), probs)
}

const CHUNK: usize = 64;

/// Mean cross-entropy plus `(l2 / 2)‖W‖²`, and its gradient.
pub fn me_loss_grad(params: &MeParams, data: &[MeExample], l2: f64) -> (f64, MeParams) {
    assert!(!data.is_empty(), "empty dataset");
    let (n, dim) = (params.n_labels(), params.dim());
    let partials: Vec<(f64, MeParams)> = data
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut g = MeParams::zeros(n, dim);
            let mut loss = 0.0;
            for ex in chunk {
                let x = &ex.features;
                let mut d = softmax(&params.logits(x));
                loss -= d[ex.label_id].max(crate::numerics::PROB_FLOOR).ln();
                d[ex.label_id] -= 1.0;
                let v = x.bow.dim();
                for (k, &dk) in d.iter().enumerate() {
                    g.b[k] += dk;
                    let row = g.w.row_mut(k);
                    for &j in x.bow.active() {
                        row[j] += dk;
                    }
                    if let Some(e) = &x.emb_avg {
                        for (r, &xe) in row[v..].iter_mut().zip(e) {
                            *r += dk * f64::from(xe);
                        }
                    }
                }
            }
            (loss, g)
        })
        .collect();
    let mut loss = 0.0;
    let mut grad = MeParams::zeros(n, dim);
    for (l, g) in partials {
        loss += l;
        grad.w.add_assign(&g.w);
        grad.b.iter_mut().zip(&g.b).for_each(|(a, b)| *a += b);
    }
    let scale = 1.0 / data.len() as f64;
    loss *= scale;
    grad.w.scale(scale);
    grad.b.iter_mut().for_each(|v| *v *= scale);
    let sq: f64 = params.w.data().iter().map(|w| w * w).sum();
    loss += 0.5 * l2 * sq;
    for (g, w) in grad.w.data_mut().iter_mut().zip(params.w.data()) {
        *g += l2 * w;
    }
    (loss, grad)
}

#[derive(Debug, Error, PartialEq)]
pub enum MaxEntError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("feature vectors have inconsistent lengths")]
    FeatureLength,
}

/// L-BFGS from zero initialization.
pub fn me_train(data: &[MeExample], n_labels: usize, cfg: &LbfgsConfig) -> Result<(MeParams, LbfgsReport), MaxEntError> {
    let first = data.first().ok_or(MaxEntError::EmptyTrainingSet)?;
    cfg.validate().map_err(MaxEntError::InvalidConfig)?;
    let dim = first.features.len();
    if data.iter().any(|ex| ex.features.len() != dim) {
        return Err(MaxEntError::FeatureLength);
    }
    let objective = |theta: &[f64]| {
        let p = MeParams::from_flat(n_labels, dim, theta);
        let (loss, g) = me_loss_grad(&p, data, cfg.l2);
        (loss, g.flatten())
    };
    let (theta, report) = lbfgs_minimize(objective, &MeParams::zeros(n_labels, dim).flatten(), cfg);
    log::debug!("maxent: {:?} after {} iterations, loss {:.6}", report.termination, report.iterations, report.loss);
    Ok((MeParams::from_flat(n_labels, dim, &theta), report))
}

/// A trained MaxEnt classifier. When `emb_dim > 0` the caller must supply
/// an embedding set of that dimension at prediction time.
#[derive(Debug, Clone, PartialEq)]
pub struct MeModel {
    pub vocab: Vocabulary,
    pub labels: LabelSet,
    pub emb_dim: usize,
    pub params: MeParams,
}

impl MeModel {
    pub fn examples(&self, corpus: &Corpus, embeddings: Option<&EmbeddingSet>) -> Result<Vec<MeExample>, CorpusError> {
        corpus_examples(corpus, &self.vocab, &self.labels, embeddings)
    }

    pub fn predict_corpus(&self, corpus: &Corpus, embeddings: Option<&EmbeddingSet>) -> Result<Vec<usize>, CorpusError> {
        Ok(self.examples(corpus, embeddings)?.iter().map(|ex| me_predict(&self.params, &ex.features).0).collect())
    }

    pub fn to_container(&self) -> Container {
        let n = self.params.n_labels();
        Container {
            kind: ModelKind::MaxEnt,
            vocab: self.vocab.entries().to_vec(),
            labels: self.labels.labels().to_vec(),
            tensors: vec![
                NamedTensor::scalar("config.emb_dim", self.emb_dim as f32),
                NamedTensor::new("maxent.W", vec![n, self.params.dim()], self.params.w.data().iter().map(|&x| x as f32).collect()),
                NamedTensor::new("maxent.b", vec![n], self.params.b.iter().map(|&x| x as f32).collect()),
            ],
        }
    }

    pub fn from_container(c: &Container) -> Result<Self, ContainerError> {
        c.expect_kind(ModelKind::MaxEnt)?;
        let vocab = Vocabulary::from_entries(c.vocab.clone()).map_err(|e| ContainerError::Invalid(e.to_string()))?;
        let labels = LabelSet::new(c.labels.clone()).map_err(|e| ContainerError::Invalid(e.to_string()))?;
        let emb_dim = c.scalar("config.emb_dim")? as usize;
        let (n, dim) = (labels.len(), vocab.size() + emb_dim);
        let w: Vec<f64> = c.tensor("maxent.W", &[n, dim])?.iter().map(|&x| f64::from(x)).collect();
        let b: Vec<f64> = c.tensor("maxent.b", &[n])?.iter().map(|&x| f64::from(x)).collect();
        if w.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(ContainerError::Invalid("non-finite MaxEnt weight".into()));
        }
        let params = MeParams { w: Tensor2::from_vec(n, dim, w).expect("checked shape"), b };
        Ok(Self { vocab, labels, emb_dim, params })
    }
}

/// Features and label ids for every utterance of `corpus`, in order.
pub fn corpus_examples(
    corpus: &Corpus,
    vocab: &Vocabulary,
    labels: &LabelSet,
    embeddings: Option<&EmbeddingSet>,
) -> Result<Vec<MeExample>, CorpusError> {
    corpus
        .utterances()
        .map(|u| Ok(MeExample { features: featurize(&u.tokens, vocab, embeddings), label_id: labels.id(&u.label)? }))
        .collect()
}
