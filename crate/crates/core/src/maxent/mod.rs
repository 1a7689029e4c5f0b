//! Maximum-entropy baseline: multinomial logistic regression over a binary
//! bag of words, optionally extended with averaged word embeddings, fitted
//! by L-BFGS.

mod lbfgs;
mod model;

pub use lbfgs::{lbfgs_minimize, LbfgsConfig, LbfgsReport, Termination};
pub use model::{
    corpus_examples, featurize, me_loss_grad, me_predict, me_train, MaxEntError, MeExample, MeFeatureVector, MeModel,
    MeParams,
};
