use std::fs;
use std::io::Write;
use std::path::Path;

use super::{tokenize, Corpus, CorpusError, Utterance};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub blank_lines: usize,
    pub utterances: usize,
    pub empty_utterances: usize,
}

/// Parses `dialogue_id<TAB>label<TAB>text` lines. `source` names the input
/// in error messages.
pub fn parse_corpus(
    text: &str,
    pretokenized: bool,
    source: &str,
) -> Result<(Corpus, IngestReport), CorpusError> {
    let mut report = IngestReport::default();
    let mut utterances = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        report.lines += 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            report.blank_lines += 1;
            continue;
        }
        let err = |msg: &str| CorpusError::Parse {
            path: source.to_string(),
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(label), Some(body)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected three tab-separated fields: dialogue_id, label, text"));
        };
        if id.is_empty() {
            return Err(err("empty dialogue id"));
        }
        if label.is_empty() {
            return Err(err("empty dialogue act label"));
        }
        let tokens: Vec<String> = if pretokenized {
            body.split_whitespace().map(String::from).collect()
        } else {
            tokenize(body)
        };
        if tokens.is_empty() {
            report.empty_utterances += 1;
        }
        utterances.push(Utterance { dialogue_id: id.to_string(), label: label.to_string(), tokens });
    }
    report.utterances = utterances.len();
    let corpus = Corpus::from_utterances(utterances)?;
    Ok((corpus, report))
}

pub fn read_corpus_file(
    path: &Path,
    pretokenized: bool,
) -> Result<(Corpus, IngestReport), CorpusError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    parse_corpus(&text, pretokenized, &path.display().to_string())
}

/// Writes tokens joined by single spaces, so the output reads back
/// identically with `pretokenized = true`.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for u in corpus.utterances() {
        writeln!(out, "{}\t{}\t{}", u.dialogue_id, u.label, u.tokens.join(" "))?;
    }
    Ok(())
}

pub fn write_corpus_file(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.display().to_string(), source };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_corpus(corpus, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}
