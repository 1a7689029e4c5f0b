use std::fmt;
use std::str::FromStr;

use super::cv::cross_validate;
use super::pipeline::DnnTrainer;
use super::EvalError;
use crate::corpus::{Corpus, TAIL_LEN};

/// A single architecture setting varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    EmbeddingDim,
    MlpHidden,
    MaxLen,
    LstmHidden,
    VocabSize,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] =
        [Self::EmbeddingDim, Self::MlpHidden, Self::MaxLen, Self::LstmHidden, Self::VocabSize];

    pub fn name(self) -> &'static str {
        match self {
            Self::EmbeddingDim => "embedding_dim",
            Self::MlpHidden => "mlp_hidden",
            Self::MaxLen => "max_len",
            Self::LstmHidden => "lstm_hidden",
            Self::VocabSize => "vocab_size",
        }
    }

    /// Sets the parameter on `trainer`, rejecting values the model cannot use.
    pub fn apply(self, trainer: &mut DnnTrainer, value: usize) -> Result<(), String> {
        let d = &mut trainer.settings.dims;
        match self {
            Self::MaxLen if value <= TAIL_LEN => {
                return Err(format!("max_len must be at least {}", TAIL_LEN + 1));
            }
            Self::VocabSize if value < 2 => return Err("vocab_size must be at least 2".into()),
            _ if value == 0 => return Err(format!("{} must be positive", self.name())),
            Self::EmbeddingDim => d.embedding_dim = value,
            Self::MlpHidden => d.mlp_hidden = value,
            Self::MaxLen => d.max_len = value,
            Self::LstmHidden => d.lstm_hidden = value,
            Self::VocabSize => d.vocab_size = value,
        }
        Ok(())
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown sweep parameter {s:?}; expected one of embedding_dim, mlp_hidden, max_len, lstm_hidden, vocab_size"))
    }
}

/// One fold of one sweep value, or an error for the whole value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: usize,
    pub fold: Option<usize>,
    pub accuracy: Result<f64, String>,
}

/// Cross-validated accuracy for each value, everything else as in `base`.
/// A value that cannot be used yields a single error row.
pub fn hyper_sweep(
    corpus: &Corpus,
    param: SweepParam,
    values: &[usize],
    folds: usize,
    seed: u64,
    base: &DnnTrainer,
) -> Result<Vec<SweepRow>, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Config("sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    for &value in values {
        let mut trainer = base.clone();
        let outcome = param
            .apply(&mut trainer, value)
            .and_then(|()| cross_validate(&trainer, corpus, folds, seed).map_err(|e| e.to_string()));
        match outcome {
            Ok(report) => {
                for f in report.per_fold.unwrap_or_default() {
                    rows.push(SweepRow { param, value, fold: Some(f.fold), accuracy: Ok(f.accuracy()) });
                }
            }
            Err(msg) => {
                log::error!("{param}={value}: {msg}");
                rows.push(SweepRow { param, value, fold: None, accuracy: Err(msg) });
            }
        }
    }
    Ok(rows)
}

/// CSV `param,value,fold,accuracy`. Error rows carry the message in the
/// fold column and `NaN` accuracy.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["param", "value", "fold", "accuracy"]).unwrap();
    for r in rows {
        let (fold, acc) = match &r.accuracy {
            Ok(a) => (r.fold.map(|f| f.to_string()).unwrap_or_default(), format!("{a:.6}")),
            Err(msg) => (format!("error: {msg}"), "NaN".to_string()),
        };
        w.write_record([r.param.to_string(), r.value.to_string(), fold, acc]).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Mean accuracy per value, in sweep order; error values are skipped.
pub fn sweep_means(rows: &[SweepRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64, usize)> = Vec::new();
    for r in rows {
        if let Ok(a) = r.accuracy {
            match out.iter_mut().find(|(v, _, _)| *v == r.value) {
                Some(e) => {
                    e.1 += a;
                    e.2 += 1;
                }
                None => out.push((r.value, a, 1)),
            }
        }
    }
    out.into_iter().map(|(v, s, n)| (v, s / n as f64)).collect()
}
