use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::adam::{AdamConfig, AdamState};
use super::model::{argmax, dropout_mask};
use super::params::ModelParams;
use crate::corpus::EncodedSentence;
use crate::numerics::{cross_entropy, Real};

/// Where the initial embedding table comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    Random,
    Pretrained,
    Oracle,
}

impl std::fmt::Display for InitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitMode::Random => "random",
            InitMode::Pretrained => "pretrained",
            InitMode::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub dropout_rate: f64,
    pub seed: u64,
    pub freeze_embeddings: bool,
    pub init_mode: InitMode,
    pub adam: AdamConfig,
    /// Examples per parallel work unit. Results are bit-identical for a
    /// fixed value regardless of thread count.
    pub chunk_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch_size: 32,
            dropout_rate: 0.5,
            seed: 0,
            freeze_embeddings: false,
            init_mode: InitMode::Random,
            adam: AdamConfig::default(),
            chunk_size: 8,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("loss diverged (non-finite) in epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },
}

/// Inference-mode metrics recorded after each epoch; epoch 0 is the
/// untrained model.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub records: Vec<EpochRecord>,
}

impl History {
    pub fn last(&self) -> &EpochRecord {
        self.records.last().expect("history always has the initial record")
    }

    /// CSV `epoch,train_loss,train_acc,test_acc`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["epoch", "train_loss", "train_acc", "test_acc"]).unwrap();
        for r in &self.records {
            w.write_record([
                r.epoch.to_string(),
                format!("{:.6}", r.train_loss),
                format!("{:.6}", r.train_acc),
                r.test_acc.map(|a| format!("{a:.6}")).unwrap_or_default(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Mean inference-mode loss and accuracy over `data`.
pub fn evaluate<F: Real>(params: &ModelParams<F>, data: &[EncodedSentence]) -> (f64, f64) {
    if data.is_empty() {
        return (0.0, 0.0);
    }
    let per: Vec<(f64, bool)> = data
        .par_iter()
        .map(|ex| {
            let p = params.probs(ex);
            let loss = cross_entropy(&p, ex.label_id).expect("label in range").as_f64();
            (loss, argmax(&p) == ex.label_id)
        })
        .collect();
    let loss: f64 = per.iter().map(|(l, _)| l).sum();
    let correct = per.iter().filter(|(_, c)| *c).count();
    (loss / data.len() as f64, correct as f64 / data.len() as f64)
}

/// Sum of per-example gradients and losses over `batch`, computed in fixed
/// chunks and reduced in chunk order.
pub fn batch_gradient<F: Real>(
    params: &ModelParams<F>,
    batch: &[(&EncodedSentence, Option<Vec<F>>)],
    chunk_size: usize,
    freeze_embeddings: bool,
) -> (ModelParams<F>, f64) {
    let partials: Vec<(ModelParams<F>, f64)> = batch
        .par_chunks(chunk_size.max(1))
        .map(|chunk| {
            let mut g = params.zeros_like();
            let mut loss = 0.0;
            for (ex, mask) in chunk {
                let cache = params.forward_with_dropout(ex, mask.clone());
                loss += cross_entropy(&cache.probs, ex.label_id).expect("label in range").as_f64();
                params.backward(&cache, ex.label_id, freeze_embeddings, &mut g);
            }
            (g, loss)
        })
        .collect();
    let mut iter = partials.into_iter();
    let (mut total, mut loss) = iter.next().expect("non-empty batch");
    for (g, l) in iter {
        total.add_assign(&g);
        loss += l;
    }
    (total, loss)
}

/// Mini-batch Adam on mean cross-entropy. Deterministic given `cfg.seed`.
pub fn train<F: Real>(
    mut params: ModelParams<F>,
    train_set: &[EncodedSentence],
    test_set: Option<&[EncodedSentence]>,
    cfg: &TrainConfig,
) -> Result<(ModelParams<F>, History), TrainError> {
    if train_set.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    if cfg.epochs == 0 || cfg.batch_size == 0 {
        return Err(TrainError::InvalidConfig("epochs and batch size must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&cfg.dropout_rate) {
        return Err(TrainError::InvalidConfig(format!("dropout rate {} outside [0, 1)", cfg.dropout_rate)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    // frozen embeddings are left out of the optimizer entirely
    let skip = usize::from(cfg.freeze_embeddings);
    let n_opt: usize = params.blocks().iter().skip(skip).map(|(_, t)| t.len()).sum();
    let mut adam = AdamState::<F>::new(n_opt, cfg.adam);

    let mut history = History::default();
    let record = |epoch: usize, params: &ModelParams<F>| {
        let (train_loss, train_acc) = evaluate(params, train_set);
        let test_acc = test_set.map(|t| evaluate(params, t).1);
        EpochRecord { epoch, train_loss, train_acc, test_acc }
    };
    history.records.push(record(0, &params));

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<(&EncodedSentence, Option<Vec<F>>)> = idx
                .iter()
                .map(|&i| {
                    let mask = (cfg.dropout_rate > 0.0)
                        .then(|| dropout_mask(params.lstm_hidden(), cfg.dropout_rate, &mut rng));
                    (&train_set[i], mask)
                })
                .collect();
            let (mut grads, loss) = batch_gradient(&params, &batch, cfg.chunk_size, cfg.freeze_embeddings);
            if !loss.is_finite() {
                return Err(TrainError::Diverged { epoch, batch: b });
            }
            grads.scale(F::lit(1.0 / batch.len() as f64));
            let pairs: Vec<(&mut [F], &[F])> = params
                .blocks_mut()
                .into_iter()
                .skip(skip)
                .zip(grads.blocks().into_iter().skip(skip))
                .map(|(p, (_, g))| (p.data_mut(), g.data()))
                .collect();
            adam.step_blocks(pairs);
        }
        let rec = record(epoch, &params);
        log::debug!("epoch {epoch}: loss {:.4} acc {:.4} test {:?}", rec.train_loss, rec.train_acc, rec.test_acc);
        if !rec.train_loss.is_finite() {
            return Err(TrainError::Diverged { epoch, batch: order.len().div_ceil(cfg.batch_size) });
        }
        history.records.push(rec);
    }
    Ok((params, history))
}
