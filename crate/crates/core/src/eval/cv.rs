use rayon::prelude::*;

use super::metrics::{format_accuracy, wald_ci, Z_95};
use super::pipeline::Trainer;
use super::EvalError;
use crate::corpus::{kfold_split, Corpus, LabelSet};

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub n: usize,
    pub correct: usize,
}

impl FoldResult {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.n as f64
    }
}

/// Accuracy with its Wald interval and the settings that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub accuracy: f64,
    pub n: usize,
    pub correct: usize,
    pub ci_half_width: f64,
    pub per_fold: Option<Vec<FoldResult>>,
    /// Config echo, seeds and the corpus content hash.
    pub metadata: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn from_counts(correct: usize, n: usize, metadata: Vec<(String, String)>) -> Self {
        assert!(n > 0 && correct <= n, "invalid counts {correct}/{n}");
        let accuracy = correct as f64 / n as f64;
        Self { accuracy, n, correct, ci_half_width: wald_ci(accuracy, n, Z_95), per_fold: None, metadata }
    }

    pub fn from_predictions(predictions: &[usize], golds: &[usize], metadata: Vec<(String, String)>) -> Result<Self, EvalError> {
        super::accuracy(predictions, golds)?;
        let correct = predictions.iter().zip(golds).filter(|(p, g)| p == g).count();
        Ok(Self::from_counts(correct, golds.len(), metadata))
    }

    /// `72.8% ± 1.35%`
    pub fn headline(&self) -> String {
        format_accuracy(self.accuracy, self.ci_half_width)
    }

    /// Human-readable summary: config echo, per-fold lines, headline.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        if let Some(folds) = &self.per_fold {
            for f in folds {
                s.push_str(&format!("fold {:>2}: {:.2}% ({}/{})\n", f.fold, 100.0 * f.accuracy(), f.correct, f.n));
            }
        }
        s.push_str(&format!("accuracy: {} (n = {})\n", self.headline(), self.n));
        s
    }

    /// CSV `fold,n,correct,accuracy`; the pooled result is the `all` row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["fold", "n", "correct", "accuracy"]).unwrap();
        for f in self.per_fold.iter().flatten() {
            w.write_record([f.fold.to_string(), f.n.to_string(), f.correct.to_string(), format!("{:.6}", f.accuracy())])
                .unwrap();
        }
        w.write_record(["all".into(), self.n.to_string(), self.correct.to_string(), format!("{:.6}", self.accuracy)])
            .unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Gold label ids of every utterance in order.
pub fn gold_ids(corpus: &Corpus, labels: &LabelSet) -> Result<Vec<usize>, EvalError> {
    corpus.utterances().map(|u| labels.id(&u.label).map_err(EvalError::from)).collect()
}

/// Dialogue-level k-fold cross-validation. Fold `f` trains with seed
/// `seed + f`. Accuracy is pooled over all test predictions.
pub fn cross_validate<T: Trainer + ?Sized>(trainer: &T, corpus: &Corpus, k: usize, seed: u64) -> Result<ExperimentReport, EvalError> {
    let folds = kfold_split(corpus.dialogues.len(), k, seed)?;
    let labels = LabelSet::from_utterances(corpus.utterances());
    let results: Vec<Result<FoldResult, EvalError>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let train = corpus.subset(&fold.train);
            let test = corpus.subset(&fold.test);
            let pred = trainer.fit_predict(&train, &test, &labels, seed.wrapping_add(f as u64))?;
            let gold = gold_ids(&test, &labels)?;
            if pred.len() != gold.len() {
                return Err(EvalError::Config(format!("trainer returned {} predictions for {} utterances", pred.len(), gold.len())));
            }
            let correct = pred.iter().zip(&gold).filter(|(p, g)| p == g).count();
            log::info!("fold {f}: {correct}/{}", gold.len());
            Ok(FoldResult { fold: f, n: gold.len(), correct })
        })
        .collect();
    let per_fold = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let n: usize = per_fold.iter().map(|f| f.n).sum();
    let correct: usize = per_fold.iter().map(|f| f.correct).sum();
    let mut metadata = vec![
        ("model".to_string(), trainer.name().to_string()),
        ("folds".to_string(), k.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("corpus_sha256".to_string(), corpus.content_hash()),
        ("dialogues".to_string(), corpus.dialogues.len().to_string()),
    ];
    metadata.extend(trainer.echo());
    let mut report = ExperimentReport::from_counts(correct, n, metadata);
    report.per_fold = Some(per_fold);
    Ok(report)
}
