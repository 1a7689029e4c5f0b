//! The LSTM dialogue act classifier: embedding look-up, masked recurrence,
//! concatenation with the previous utterance's bag of words, a tanh hidden
//! layer and a softmax output, trained with Adam.

mod adam;
mod io;
mod lstm;
mod model;
mod params;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use io::{extract_embeddings, DnnModel};
pub use lstm::{lstm_step, LstmParams, StepState, CELL, FORGET, GATES, INPUT, OUTPUT};
pub use model::{argmax, dropout_mask, ForwardCache};
pub use params::{ModelDims, ModelParams, FORGET_BIAS_INIT};
pub use train::{batch_gradient, evaluate, train, EpochRecord, History, InitMode, TrainConfig, TrainError};

#[cfg(test)]
mod tests;
