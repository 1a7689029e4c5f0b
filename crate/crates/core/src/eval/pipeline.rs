use std::sync::Arc;

use super::bigram::{train_bigram, viterbi_rescore, BigramModel};
use super::EvalError;
use crate::corpus::{encode_corpus, Corpus, LabelSet, Vocabulary};
use crate::embeddings::{build_embedding_matrix, EmbeddingSet};
use crate::maxent::{corpus_examples, me_train, LbfgsConfig, LbfgsReport, MeModel};
use crate::neural::{train, DnnModel, History, InitMode, ModelDims, ModelParams, TrainConfig};

/// Everything needed to fit the LSTM classifier on a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DnnSettings {
    pub dims: ModelDims,
    pub train: TrainConfig,
}

impl Default for DnnSettings {
    fn default() -> Self {
        Self { dims: ModelDims::default(), train: TrainConfig::default() }
    }
}

impl DnnSettings {
    /// `key=value` pairs describing the run.
    pub fn echo(&self) -> Vec<(String, String)> {
        let d = &self.dims;
        let t = &self.train;
        [
            ("embedding_dim", d.embedding_dim.to_string()),
            ("lstm_hidden", d.lstm_hidden.to_string()),
            ("mlp_hidden", d.mlp_hidden.to_string()),
            ("max_len", d.max_len.to_string()),
            ("vocab_size", d.vocab_size.to_string()),
            ("epochs", t.epochs.to_string()),
            ("batch_size", t.batch_size.to_string()),
            ("dropout", t.dropout_rate.to_string()),
            ("init", t.init_mode.to_string()),
            ("freeze_embeddings", t.freeze_embeddings.to_string()),
            ("learning_rate", t.adam.alpha.to_string()),
            ("seed", t.seed.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// Label-id sequences, one per dialogue.
pub fn label_sequences(corpus: &Corpus, labels: &LabelSet) -> Result<Vec<Vec<usize>>, EvalError> {
    corpus
        .dialogues
        .iter()
        .map(|d| d.utterances.iter().map(|u| labels.id(&u.label).map_err(EvalError::from)).collect())
        .collect()
}

/// Builds the vocabulary from `train_corpus`, initializes the embedding
/// table according to `settings.train.init_mode` and trains.
pub fn fit_dnn(
    train_corpus: &Corpus,
    labels: &LabelSet,
    test_corpus: Option<&Corpus>,
    settings: &DnnSettings,
    embeddings: Option<&EmbeddingSet>,
) -> Result<(DnnModel, History), EvalError> {
    let d = &settings.dims;
    let seed = settings.train.seed;
    let (vocab, report) = Vocabulary::build(train_corpus.utterances(), d.vocab_size)?;
    if report.actual_size < report.requested_size {
        log::info!("vocabulary has {} entries ({} requested)", report.actual_size, report.requested_size);
    }
    let pretrained = match settings.train.init_mode {
        InitMode::Random => None,
        mode => Some(embeddings.ok_or_else(|| EvalError::Config(format!("{mode} initialization needs embeddings")))?),
    };
    let dim = pretrained.map_or(d.embedding_dim, |set| set.dim());
    if dim != d.embedding_dim {
        log::info!("embedding dimension {dim} taken from the supplied vectors");
    }
    let (matrix, coverage) = build_embedding_matrix::<f32>(&vocab, dim, pretrained, seed)?;
    if pretrained.is_some() {
        log::info!("pretrained vectors cover {:.1}% of the vocabulary", 100.0 * coverage);
    }
    let params = ModelParams::init(matrix, d.lstm_hidden, d.mlp_hidden, labels.len(), seed);
    let train_set = encode_corpus(train_corpus, &vocab, labels, d.max_len)?.0;
    let test_set = test_corpus.map(|c| encode_corpus(c, &vocab, labels, d.max_len)).transpose()?.map(|r| r.0);
    let (params, history) = train(params, &train_set, test_set.as_deref(), &settings.train)?;
    Ok((DnnModel { vocab, labels: labels.clone(), max_len: d.max_len, params }, history))
}

/// MaxEnt settings: vocabulary size, optimizer and optional averaged
/// embedding features.
#[derive(Debug, Clone, Default)]
pub struct MeSettings {
    pub vocab_size: usize,
    pub lbfgs: LbfgsConfig,
    pub embeddings: Option<Arc<EmbeddingSet>>,
}

impl MeSettings {
    pub fn new(vocab_size: usize) -> Self {
        Self { vocab_size, lbfgs: LbfgsConfig::default(), embeddings: None }
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        [
            ("vocab_size", self.vocab_size.to_string()),
            ("lbfgs_memory", self.lbfgs.memory.to_string()),
            ("lbfgs_max_iters", self.lbfgs.max_iters.to_string()),
            ("lbfgs_tol", self.lbfgs.grad_tol.to_string()),
            ("l2", self.lbfgs.l2.to_string()),
            ("embedding_features", self.embeddings.as_ref().map_or(0, |e| e.dim()).to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

pub fn fit_me(train_corpus: &Corpus, labels: &LabelSet, settings: &MeSettings) -> Result<(MeModel, LbfgsReport), EvalError> {
    let (vocab, _) = Vocabulary::build(train_corpus.utterances(), settings.vocab_size)?;
    let emb = settings.embeddings.as_deref();
    let data = corpus_examples(train_corpus, &vocab, labels, emb)?;
    let (params, report) = me_train(&data, labels.len(), &settings.lbfgs)?;
    let emb_dim = emb.map_or(0, EmbeddingSet::dim);
    Ok((MeModel { vocab, labels: labels.clone(), emb_dim, params }, report))
}

/// Optional bigram rescoring applied to per-dialogue probability lattices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescoring {
    pub k: f64,
    pub weight: f64,
}

/// Predicted label ids, dialogue by dialogue, either by arg-max or by
/// Viterbi over each dialogue's lattice.
pub fn decode(lattices: &[Vec<Vec<f64>>], bigram: Option<(&BigramModel, f64)>) -> Vec<usize> {
    lattices
        .iter()
        .flat_map(|lat| match bigram {
            Some((b, w)) => viterbi_rescore(lat, b, w),
            None => lat.iter().map(|p| crate::neural::argmax(p)).collect(),
        })
        .collect()
}

/// Per-dialogue class distributions from a trained network.
pub fn dnn_lattices(model: &DnnModel, corpus: &Corpus) -> Result<Vec<Vec<Vec<f64>>>, EvalError> {
    use rayon::prelude::*;
    let enc = model.encode(corpus)?;
    let probs: Vec<Vec<f64>> =
        enc.par_iter().map(|ex| model.params.probs(ex).into_iter().map(f64::from).collect()).collect();
    let mut it = probs.into_iter();
    Ok(corpus.dialogues.iter().map(|d| it.by_ref().take(d.utterances.len()).collect()).collect())
}

/// Per-dialogue class distributions from a MaxEnt model.
pub fn me_lattices(model: &MeModel, corpus: &Corpus, embeddings: Option<&EmbeddingSet>) -> Result<Vec<Vec<Vec<f64>>>, EvalError> {
    let ex = model.examples(corpus, embeddings)?;
    let mut it = ex.iter().map(|e| crate::maxent::me_predict(&model.params, &e.features).1);
    Ok(corpus.dialogues.iter().map(|d| it.by_ref().take(d.utterances.len()).collect()).collect())
}

/// Something that can be fitted on one corpus and label another, used by
/// cross-validation and the experiment drivers.
pub trait Trainer: Sync {
    fn name(&self) -> &str;

    /// Predicted label ids for every utterance of `test`, in order.
    fn fit_predict(&self, train: &Corpus, test: &Corpus, labels: &LabelSet, seed: u64) -> Result<Vec<usize>, EvalError>;

    fn echo(&self) -> Vec<(String, String)> {
        Vec::new()
    }
}

#[derive(Debug, Clone)]
pub struct DnnTrainer {
    pub settings: DnnSettings,
    pub embeddings: Option<Arc<EmbeddingSet>>,
    pub rescoring: Option<Rescoring>,
}

impl DnnTrainer {
    pub fn new(settings: DnnSettings) -> Self {
        Self { settings, embeddings: None, rescoring: None }
    }
}

impl Trainer for DnnTrainer {
    fn name(&self) -> &str {
        "dnn"
    }

    fn fit_predict(&self, train: &Corpus, test: &Corpus, labels: &LabelSet, seed: u64) -> Result<Vec<usize>, EvalError> {
        let mut settings = self.settings.clone();
        settings.train.seed = seed;
        let (model, _) = fit_dnn(train, labels, None, &settings, self.embeddings.as_deref())?;
        let lattices = dnn_lattices(&model, test)?;
        rescored(train, labels, &lattices, self.rescoring)
    }

    fn echo(&self) -> Vec<(String, String)> {
        let mut e = self.settings.echo();
        e.retain(|(k, _)| k != "seed");
        if let Some(r) = self.rescoring {
            e.push(("bigram_k".into(), r.k.to_string()));
            e.push(("bigram_weight".into(), r.weight.to_string()));
        }
        e
    }
}

#[derive(Debug, Clone)]
pub struct MeTrainer {
    pub settings: MeSettings,
    pub rescoring: Option<Rescoring>,
}

impl Trainer for MeTrainer {
    fn name(&self) -> &str {
        "maxent"
    }

    fn fit_predict(&self, train: &Corpus, test: &Corpus, labels: &LabelSet, _seed: u64) -> Result<Vec<usize>, EvalError> {
        let (model, _) = fit_me(train, labels, &self.settings)?;
        let lattices = me_lattices(&model, test, self.settings.embeddings.as_deref())?;
        rescored(train, labels, &lattices, self.rescoring)
    }

    fn echo(&self) -> Vec<(String, String)> {
        self.settings.echo()
    }
}

fn rescored(
    train: &Corpus,
    labels: &LabelSet,
    lattices: &[Vec<Vec<f64>>],
    rescoring: Option<Rescoring>,
) -> Result<Vec<usize>, EvalError> {
    Ok(match rescoring {
        Some(r) => {
            let bigram = train_bigram(&label_sequences(train, labels)?, labels.len(), r.k);
            decode(lattices, Some((&bigram, r.weight)))
        }
        None => decode(lattices, None),
    })
}
