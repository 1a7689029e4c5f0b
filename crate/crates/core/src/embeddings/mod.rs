//! Word vectors: word2vec binary I/O, the model's look-up table, and cosine
//! similarity analysis.

mod analysis;
mod matrix;
mod word2vec;

pub use analysis::{
    avg_sentence_embedding, cosine, nearest_neighbors, neighbors_csv, neighbors_table, pairs_table,
    rank_of, Neighbor,
};
pub use matrix::{build_embedding_matrix, init_random, EmbeddingMatrix, INIT_SCALE};
pub use word2vec::{load_word2vec_binary, parse_word2vec_binary, save_word2vec_binary, write_word2vec_binary};

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("malformed header at byte 0: {0}")]
    Header(String),
    #[error("embedding dimension must be at least 1")]
    ZeroDim,
    #[error("record {word_index} truncated at byte {offset}")]
    Truncated { word_index: usize, offset: usize },
    #[error("record {word_index} at byte {offset} has an empty word")]
    EmptyWord { word_index: usize, offset: usize },
    #[error("record {word_index} at byte {offset} is not valid UTF-8")]
    InvalidUtf8 { word_index: usize, offset: usize },
    #[error("duplicate word {word:?} in record {word_index} at byte {offset}")]
    Duplicate { word: String, word_index: usize, offset: usize },
    #[error("{extra} unexpected bytes after the last record at byte {offset}")]
    TrailingData { offset: usize, extra: usize },
    #[error("vector for {word:?} has length {got}, expected {expected}")]
    DimMismatch { word: String, expected: usize, got: usize },
    #[error("word {0:?} cannot be stored (empty or contains whitespace)")]
    InvalidWord(String),
    #[error("refusing to save an empty embedding set")]
    EmptySet,
    #[error("word {0:?} not found")]
    UnknownWord(String),
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Word → vector table with a shared dimension, kept in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    words: Vec<String>,
    values: Vec<f32>,
    index: HashMap<String, usize>,
}

impl EmbeddingSet {
    pub fn new(dim: usize) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDim);
        }
        Ok(Self { dim, words: Vec::new(), values: Vec::new(), index: HashMap::new() })
    }

    pub fn insert(&mut self, word: &str, vector: &[f32]) -> Result<(), EmbeddingError> {
        if vector.len() != self.dim {
            return Err(EmbeddingError::DimMismatch {
                word: word.to_string(),
                expected: self.dim,
                got: vector.len(),
            });
        }
        if self.index.contains_key(word) {
            return Err(EmbeddingError::Duplicate {
                word: word.to_string(),
                word_index: self.words.len(),
                offset: 0,
            });
        }
        self.index.insert(word.to_string(), self.words.len());
        self.words.push(word.to_string());
        self.values.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| self.vector(i))
    }

    pub fn vector(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.words.iter().enumerate().map(|(i, w)| (w.as_str(), self.vector(i)))
    }
}
