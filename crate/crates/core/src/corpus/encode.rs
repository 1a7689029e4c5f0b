use super::{Corpus, CorpusError, LabelSet, Utterance, Vocabulary, PADDING_INDEX};

/// Encoded sentence length.
pub const DEFAULT_MAX_LEN: usize = 15;
/// Number of trailing words copied into the final slots.
pub const TAIL_LEN: usize = 5;

/// Binary occurrence vector over the vocabulary, stored sparsely.
///
/// Position `j` corresponds to vocabulary index `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BagOfWords {
    dim: usize,
    active: Vec<usize>,
}

impl BagOfWords {
    pub fn empty(dim: usize) -> Self {
        Self { dim, active: Vec::new() }
    }

    /// Max-pooled one-hot vectors of `tokens`; OOV tokens light up UNK.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Self {
        let mut active: Vec<usize> = tokens.iter().map(|t| vocab.index(t.as_ref()) - 1).collect();
        active.sort_unstable();
        active.dedup();
        Self { dim: vocab.size(), active }
    }

    /// From explicit positions (vocabulary index minus one).
    pub fn from_positions(dim: usize, mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        assert!(positions.last().is_none_or(|&p| p < dim), "position out of range");
        Self { dim, active: positions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Positions holding a one, ascending.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.active.binary_search(&pos).is_ok()
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let mut v = vec![0u8; self.dim];
        for &j in &self.active {
            v[j] = 1;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedTokens {
    pub token_ids: Vec<usize>,
    pub mask: Vec<bool>,
}

/// Model input for one utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSentence {
    pub token_ids: Vec<usize>,
    pub mask: Vec<bool>,
    pub prev_bow: BagOfWords,
    pub label_id: usize,
}

impl EncodedSentence {
    pub fn max_len(&self) -> usize {
        self.token_ids.len()
    }
}

/// Fixed-length layout: the first `max_len - 5` tokens left-aligned, then the
/// last five tokens left-aligned in the final five slots. Unused slots are
/// PADDING with a false mask.
pub fn encode_sentence<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    max_len: usize,
) -> Result<EncodedTokens, CorpusError> {
    if max_len < TAIL_LEN + 1 {
        return Err(CorpusError::MaxLenTooSmall { min: TAIL_LEN + 1, got: max_len });
    }
    let head_len = max_len - TAIL_LEN;
    let mut token_ids = vec![PADDING_INDEX; max_len];
    let mut mask = vec![false; max_len];
    let n = tokens.len();
    for (slot, tok) in tokens.iter().take(head_len).enumerate() {
        token_ids[slot] = vocab.index(tok.as_ref());
        mask[slot] = true;
    }
    let tail_start = n.saturating_sub(TAIL_LEN);
    for (k, tok) in tokens[tail_start..].iter().enumerate() {
        token_ids[head_len + k] = vocab.index(tok.as_ref());
        mask[head_len + k] = true;
    }
    Ok(EncodedTokens { token_ids, mask })
}

/// Bag of words of utterance `i - 1`; all-zero for the first utterance.
pub fn prev_bow(dialogue: &[Utterance], i: usize, vocab: &Vocabulary) -> BagOfWords {
    assert!(i < dialogue.len(), "utterance {i} out of range");
    if i == 0 {
        BagOfWords::empty(vocab.size())
    } else {
        BagOfWords::from_tokens(&dialogue[i - 1].tokens, vocab)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeReport {
    pub utterances: usize,
    /// Utterances with no tokens, encoded as all-PADDING.
    pub empty_utterances: usize,
    /// Utterances longer than `max_len` whose middle was dropped.
    pub truncated: usize,
}

/// Encodes every utterance of `corpus` in dialogue order.
pub fn encode_corpus(
    corpus: &Corpus,
    vocab: &Vocabulary,
    labels: &LabelSet,
    max_len: usize,
) -> Result<(Vec<EncodedSentence>, EncodeReport), CorpusError> {
    let mut out = Vec::with_capacity(corpus.num_utterances());
    let mut report = EncodeReport::default();
    for d in &corpus.dialogues {
        for (i, u) in d.utterances.iter().enumerate() {
            let enc = encode_sentence(&u.tokens, vocab, max_len)?;
            report.utterances += 1;
            if u.tokens.is_empty() {
                report.empty_utterances += 1;
            }
            if u.tokens.len() > max_len {
                report.truncated += 1;
            }
            out.push(EncodedSentence {
                token_ids: enc.token_ids,
                mask: enc.mask,
                prev_bow: prev_bow(&d.utterances, i, vocab),
                label_id: labels.id(&u.label)?,
            });
        }
    }
    if report.empty_utterances > 0 {
        log::warn!("{} empty utterances encoded as all-padding", report.empty_utterances);
    }
    Ok((out, report))
}
