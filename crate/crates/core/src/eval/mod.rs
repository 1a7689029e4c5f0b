//! Accuracy and confidence intervals, cross-validation, learning curves,
//! hyper-parameter sweeps and bigram rescoring of dialogue-act sequences.

mod bigram;
mod curve;
mod cv;
mod metrics;
mod pipeline;
mod sweep;

use thiserror::Error;

pub use bigram::{train_bigram, viterbi_rescore, BigramModel, BIGRAM_TENSOR};
pub use curve::{
    curve_csv, curve_medians, fraction_sizes, learning_curve, nested_subsample, oracle_embeddings, CurveMode, CurveRow,
    DEFAULT_FRACTIONS,
};
pub use cv::{cross_validate, gold_ids, ExperimentReport, FoldResult};
pub use metrics::{accuracy, format_accuracy, wald_ci, Z_95};
pub use pipeline::{
    decode, dnn_lattices, fit_dnn, fit_me, label_sequences, me_lattices, DnnSettings, DnnTrainer, MeSettings, MeTrainer,
    Rescoring, Trainer,
};
pub use sweep::{hyper_sweep, sweep_csv, sweep_means, SweepParam, SweepRow};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Embedding(#[from] crate::embeddings::EmbeddingError),
    #[error(transparent)]
    Train(#[from] crate::neural::TrainError),
    #[error(transparent)]
    MaxEnt(#[from] crate::maxent::MaxEntError),
    #[error(transparent)]
    Container(#[from] crate::container::ContainerError),
    #[error("{0}")]
    Config(String),
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
