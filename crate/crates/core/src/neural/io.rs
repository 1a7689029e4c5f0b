use super::lstm::{LstmParams, GATES};
use super::params::ModelParams;
use crate::container::{Container, ContainerError, ModelKind, NamedTensor};
use crate::corpus::{encode_corpus, Corpus, CorpusError, EncodedSentence, LabelSet, Vocabulary};
use crate::embeddings::{EmbeddingMatrix, EmbeddingSet};
use crate::numerics::Tensor2;

/// A trained network together with the vocabulary, label set and input
/// length it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct DnnModel {
    pub vocab: Vocabulary,
    pub labels: LabelSet,
    pub max_len: usize,
    pub params: ModelParams<f32>,
}

impl DnnModel {
    pub fn encode(&self, corpus: &Corpus) -> Result<Vec<EncodedSentence>, CorpusError> {
        Ok(encode_corpus(corpus, &self.vocab, &self.labels, self.max_len)?.0)
    }

    /// Predicted label ids for every utterance of `corpus`, in order.
    pub fn predict_corpus(&self, corpus: &Corpus) -> Result<Vec<usize>, CorpusError> {
        Ok(self.encode(corpus)?.iter().map(|ex| self.params.predict(ex).0).collect())
    }

    pub fn to_container(&self) -> Container {
        let mut tensors = vec![NamedTensor::scalar("config.max_len", self.max_len as f32)];
        for (name, t) in self.params.blocks() {
            let dims = if t.cols() == 1 && name != "embedding" { vec![t.rows()] } else { vec![t.rows(), t.cols()] };
            tensors.push(NamedTensor::new(name, dims, t.data().to_vec()));
        }
        Container {
            kind: ModelKind::Dnn,
            vocab: self.vocab.entries().to_vec(),
            labels: self.labels.labels().to_vec(),
            tensors,
        }
    }

    /// Rebuilds the model, validating every tensor against the shape chain
    /// implied by the vocabulary, label set and embedding table.
    pub fn from_container(c: &Container) -> Result<Self, ContainerError> {
        c.expect_kind(ModelKind::Dnn)?;
        let vocab = Vocabulary::from_entries(c.vocab.clone()).map_err(|e| ContainerError::Invalid(e.to_string()))?;
        let labels = LabelSet::new(c.labels.clone()).map_err(|e| ContainerError::Invalid(e.to_string()))?;
        let max_len = c.scalar("config.max_len")? as usize;
        let v = vocab.size();
        let emb = c.tensor_any("embedding")?;
        if emb.dims.len() != 2 || emb.dims[0] != v + 1 {
            return Err(ContainerError::Shape {
                name: "embedding".into(),
                expected: vec![v + 1, emb.dims.get(1).copied().unwrap_or(0)],
                got: emb.dims.clone(),
            });
        }
        let d_e = emb.dims[1];
        let d_h = c.tensor_any("lstm.U_i")?.dims.first().copied().unwrap_or(0);
        let d_u = c.tensor_any("mlp.b_1")?.dims.first().copied().unwrap_or(0);
        let n = labels.len();
        let mat = |name: &str, r: usize, cols: usize| -> Result<Tensor2<f32>, ContainerError> {
            Ok(Tensor2::from_vec(r, cols, c.tensor(name, &[r, cols])?.to_vec()).expect("checked shape"))
        };
        let vecn = |name: &str, r: usize| -> Result<Tensor2<f32>, ContainerError> {
            Ok(Tensor2::from_vec(r, 1, c.tensor(name, &[r])?.to_vec()).expect("checked shape"))
        };
        let embedding = EmbeddingMatrix::from_table(mat("embedding", v + 1, d_e)?);
        let mut lstm = LstmParams::zeros(d_e, d_h);
        for (k, g) in GATES.iter().enumerate() {
            lstm.w[k] = mat(&format!("lstm.W_{g}"), d_h, d_e)?;
            lstm.u[k] = mat(&format!("lstm.U_{g}"), d_h, d_h)?;
            lstm.b[k] = vecn(&format!("lstm.b_{g}"), d_h)?;
        }
        let params = ModelParams {
            embedding,
            lstm,
            w1: mat("mlp.W_1", d_u, d_h + v)?,
            b1: vecn("mlp.b_1", d_u)?,
            w2: mat("mlp.W_2", n, d_u)?,
            b2: vecn("mlp.b_2", n)?,
        };
        for (name, t) in params.blocks() {
            t.check_finite(&name).map_err(|e| ContainerError::Invalid(e.to_string()))?;
        }
        Ok(Self { vocab, labels, max_len, params })
    }
}

/// Trained embedding rows for every vocabulary word (UNK included,
/// PADDING excluded).
pub fn extract_embeddings(params: &ModelParams<f32>, vocab: &Vocabulary) -> EmbeddingSet {
    let mut set = EmbeddingSet::new(params.embedding_dim()).expect("d_e >= 1");
    for (i, word) in vocab.entries().iter().enumerate() {
        set.insert(word, params.embedding.row(i + 1)).expect("vocabulary words are unique");
    }
    set
}
