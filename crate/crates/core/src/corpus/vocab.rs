use std::collections::HashMap;

use super::{CorpusError, Utterance};

/// Index reserved for the padding filler; never part of the vocabulary proper.
pub const PADDING_INDEX: usize = 0;
/// Surface form of the out-of-vocabulary entry.
pub const UNK_TOKEN: &str = "<UNK>";
/// |V| including UNK.
pub const DEFAULT_VOCAB_SIZE: usize = 1000;

/// Token ↔ index map. Entries occupy indices `1..=size()`, UNK last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index_of: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabReport {
    pub requested_size: usize,
    pub actual_size: usize,
    pub distinct_forms: usize,
}

impl Vocabulary {
    /// Keeps the `size - 1` most frequent forms (ties broken
    /// lexicographically) and appends UNK.
    pub fn build<'a, I>(train: I, size: usize) -> Result<(Self, VocabReport), CorpusError>
    where
        I: IntoIterator<Item = &'a Utterance>,
    {
        if size < 2 {
            return Err(CorpusError::VocabTooSmall(size));
        }
        let mut counts: HashMap<&str, usize> = HashMap::new();
        let mut n_utts = 0;
        for u in train {
            n_utts += 1;
            for t in &u.tokens {
                if t != UNK_TOKEN {
                    *counts.entry(t.as_str()).or_default() += 1;
                }
            }
        }
        if n_utts == 0 {
            return Err(CorpusError::EmptyCorpus);
        }
        let distinct_forms = counts.len();
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut entries: Vec<String> =
            ranked.into_iter().take(size - 1).map(|(w, _)| w.to_string()).collect();
        entries.push(UNK_TOKEN.to_string());
        let vocab = Self::from_entries(entries)?;
        let report = VocabReport { requested_size: size, actual_size: vocab.size(), distinct_forms };
        if report.actual_size < size {
            log::info!(
                "vocabulary shrunk to {} entries ({} distinct forms)",
                report.actual_size,
                distinct_forms
            );
        }
        Ok((vocab, report))
    }

    /// Rebuilds a vocabulary from entries in index order; UNK must be last.
    pub fn from_entries(entries: Vec<String>) -> Result<Self, CorpusError> {
        match entries.last() {
            Some(last) if last == UNK_TOKEN => {}
            _ => return Err(CorpusError::BadVocabEntry(UNK_TOKEN.to_string())),
        }
        let mut index_of = HashMap::with_capacity(entries.len());
        for (i, w) in entries.iter().enumerate() {
            if w.is_empty() || index_of.insert(w.clone(), i + 1).is_some() {
                return Err(CorpusError::BadVocabEntry(w.clone()));
            }
        }
        Ok(Self { entries, index_of })
    }

    /// |V|, counting UNK and excluding PADDING.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn unk_index(&self) -> usize {
        self.entries.len()
    }

    pub fn padding_index(&self) -> usize {
        PADDING_INDEX
    }

    /// Index of `token`, falling back to UNK.
    pub fn index(&self, token: &str) -> usize {
        self.index_of.get(token).copied().unwrap_or(self.unk_index())
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index_of.get(token).copied()
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        if index == PADDING_INDEX {
            return None;
        }
        self.entries.get(index - 1).map(String::as_str)
    }

    /// Surface forms in index order (index 1 first).
    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}

/// Closed, ordered set of dialogue act tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<String>,
    index_of: HashMap<String, usize>,
}

impl LabelSet {
    pub fn new(labels: Vec<String>) -> Result<Self, CorpusError> {
        let mut index_of = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index_of.insert(l.clone(), i).is_some() {
                return Err(CorpusError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, index_of })
    }

    /// Sorted distinct labels of the given utterances.
    pub fn from_utterances<'a, I>(utts: I) -> Self
    where
        I: IntoIterator<Item = &'a Utterance>,
    {
        let mut labels: Vec<String> = utts.into_iter().map(|u| u.label.clone()).collect();
        labels.sort();
        labels.dedup();
        Self::new(labels).expect("deduplicated")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, label: &str) -> Result<usize, CorpusError> {
        self.index_of
            .get(label)
            .copied()
            .ok_or_else(|| CorpusError::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}
