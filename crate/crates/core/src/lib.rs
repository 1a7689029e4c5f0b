//! Dialogue act recognition: an LSTM sentence classifier conditioned on the
//! previous utterance's bag of words, a maximum entropy baseline, and the
//! experiment harness around them.

pub mod cli;
pub mod container;
pub mod corpus;
pub mod embeddings;
pub mod eval;
pub mod maxent;
pub mod neural;
pub mod numerics;
