//! Utterances, vocabularies, fixed-length encoding, dialogue-level splits
//! and a synthetic corpus generator.

mod encode;
mod io;
mod split;
mod synth;
mod tokenize;
mod vocab;

pub use encode::{
    encode_corpus, encode_sentence, prev_bow, BagOfWords, EncodeReport, EncodedSentence,
    EncodedTokens, DEFAULT_MAX_LEN, TAIL_LEN,
};
pub use io::{parse_corpus, read_corpus_file, write_corpus, write_corpus_file, IngestReport};
pub use split::{kfold_split, Fold};
pub use synth::{
    generate_synthetic, write_manifest, SynthConfig, SynthCorpus, ORDER_PAIR, SYNTH_LABELS,
};
pub use tokenize::tokenize;
pub use vocab::{LabelSet, VocabReport, Vocabulary, DEFAULT_VOCAB_SIZE, PADDING_INDEX, UNK_TOKEN};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("vocabulary size must be at least 2, got {0}")]
    VocabTooSmall(usize),
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("maximum length must be at least {min}, got {got}")]
    MaxLenTooSmall { min: usize, got: usize },
    #[error("unknown dialogue act label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("vocabulary entry {0:?} is invalid or duplicated")]
    BadVocabEntry(String),
    #[error("cannot split {dialogues} dialogues into {k} folds")]
    TooManyFolds { k: usize, dialogues: usize },
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("dialogue {0:?} is not contiguous in the corpus")]
    NonContiguousDialogue(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One dialogue-act segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub dialogue_id: String,
    pub label: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub id: String,
    pub utterances: Vec<Utterance>,
}

/// Dialogues in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub dialogues: Vec<Dialogue>,
}

impl Corpus {
    /// Groups contiguous utterances by dialogue id.
    pub fn from_utterances(utterances: Vec<Utterance>) -> Result<Self, CorpusError> {
        let mut dialogues: Vec<Dialogue> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for u in utterances {
            match dialogues.last_mut() {
                Some(d) if d.id == u.dialogue_id => d.utterances.push(u),
                _ => {
                    if !seen.insert(u.dialogue_id.clone()) {
                        return Err(CorpusError::NonContiguousDialogue(u.dialogue_id));
                    }
                    dialogues.push(Dialogue { id: u.dialogue_id.clone(), utterances: vec![u] });
                }
            }
        }
        Ok(Self { dialogues })
    }

    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus { dialogues: indices.iter().map(|&i| self.dialogues[i].clone()).collect() }
    }

    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.dialogues.iter().flat_map(|d| d.utterances.iter())
    }

    pub fn num_utterances(&self) -> usize {
        self.dialogues.iter().map(|d| d.utterances.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_utterances() == 0
    }

    pub fn labels(&self) -> Vec<&str> {
        self.utterances().map(|u| u.label.as_str()).collect()
    }

    /// SHA-256 over the canonical tab-separated serialization.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for u in self.utterances() {
            hasher.update(u.dialogue_id.as_bytes());
            hasher.update(b"\t");
            hasher.update(u.label.as_bytes());
            hasher.update(b"\t");
            hasher.update(u.tokens.join(" ").as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn utt(d: &str, l: &str, t: &str) -> Utterance {
        Utterance {
            dialogue_id: d.into(),
            label: l.into(),
            tokens: t.split_whitespace().map(String::from).collect(),
        }
    }

    #[test]
    fn groups_contiguous_dialogues() {
        let c = Corpus::from_utterances(vec![utt("a", "x", "hi"), utt("a", "y", "yo"), utt("b", "x", "ok")])
            .unwrap();
        assert_eq!(c.dialogues.len(), 2);
        assert_eq!(c.num_utterances(), 3);
    }

    #[test]
    fn rejects_interleaved_dialogues() {
        let err = Corpus::from_utterances(vec![utt("a", "x", "hi"), utt("b", "y", "yo"), utt("a", "x", "ok")]);
        assert!(matches!(err, Err(CorpusError::NonContiguousDialogue(id)) if id == "a"));
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let a = Corpus::from_utterances(vec![utt("a", "x", "hi there")]).unwrap();
        let b = Corpus::from_utterances(vec![utt("a", "x", "hi there")]).unwrap();
        let c = Corpus::from_utterances(vec![utt("a", "x", "hi where")]).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), c.content_hash());
    }
}
