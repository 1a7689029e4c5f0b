use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cv::gold_ids;
use super::pipeline::{dnn_lattices, decode, fit_dnn, DnnSettings};
use super::EvalError;
use crate::corpus::{Corpus, LabelSet};
use crate::embeddings::EmbeddingSet;
use crate::neural::{extract_embeddings, InitMode};

/// Default training-set fractions.
pub const DEFAULT_FRACTIONS: [f64; 7] = [0.01, 0.02, 0.05, 0.10, 0.25, 0.50, 1.0];

/// One embedding initialization to compare. `Pretrained` and `Oracle` need
/// vectors; a missing oracle set is produced by a full training run.
#[derive(Debug, Clone)]
pub struct CurveMode {
    pub mode: InitMode,
    pub embeddings: Option<Arc<EmbeddingSet>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub mode: InitMode,
    pub size: usize,
    pub seed: u64,
    pub accuracy: f64,
}

/// Utterance counts for the given fractions of `total`, at least one each.
pub fn fraction_sizes(total: usize, fractions: &[f64]) -> Vec<usize> {
    fractions.iter().map(|f| ((f * total as f64).round() as usize).clamp(1, total)).collect()
}

/// Dialogue indices forming a training subsample of roughly `size`
/// utterances: the shortest prefix of a seeded dialogue permutation that
/// reaches `size`. Prefixes of one permutation are nested, so a smaller
/// sample is always contained in a larger one.
pub fn nested_subsample(corpus: &Corpus, size: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..corpus.dialogues.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    order.shuffle(&mut rng);
    let total = corpus.num_utterances();
    let size = if size > total {
        log::warn!("requested {size} training utterances but only {total} exist; using all");
        total
    } else {
        size
    };
    let mut taken = 0;
    let mut chosen = Vec::new();
    for i in order {
        if taken >= size && !chosen.is_empty() {
            break;
        }
        taken += corpus.dialogues[i].utterances.len();
        chosen.push(i);
    }
    chosen.sort_unstable();
    chosen
}

/// Trains on the full training corpus and returns its final embeddings.
pub fn oracle_embeddings(train: &Corpus, labels: &LabelSet, settings: &DnnSettings) -> Result<EmbeddingSet, EvalError> {
    let mut s = settings.clone();
    s.train.init_mode = InitMode::Random;
    let (model, _) = fit_dnn(train, labels, None, &s, None)?;
    Ok(extract_embeddings(&model.params, &model.vocab))
}

/// Accuracy on `test` for every (mode, size, seed) combination. All modes
/// share the same subsample and training seed for a given (size, seed).
pub fn learning_curve(
    train: &Corpus,
    test: &Corpus,
    sizes: &[usize],
    modes: &[CurveMode],
    seeds: &[u64],
    settings: &DnnSettings,
) -> Result<Vec<CurveRow>, EvalError> {
    let labels = LabelSet::from_utterances(train.utterances().chain(test.utterances()));
    let gold = gold_ids(test, &labels)?;
    let mut resolved = Vec::with_capacity(modes.len());
    for m in modes {
        let emb = match (m.mode, &m.embeddings) {
            (InitMode::Random, _) => None,
            (_, Some(e)) => Some(e.clone()),
            (InitMode::Oracle, None) => {
                log::info!("training on the full corpus to obtain oracle embeddings");
                Some(Arc::new(oracle_embeddings(train, &labels, settings)?))
            }
            (InitMode::Pretrained, None) => {
                return Err(EvalError::Config("pretrained mode needs embeddings".into()));
            }
        };
        resolved.push((m.mode, emb));
    }
    let mut jobs = Vec::new();
    for (mode, emb) in &resolved {
        for &size in sizes {
            for &seed in seeds {
                jobs.push((*mode, emb.clone(), size, seed));
            }
        }
    }
    jobs.par_iter()
        .map(|(mode, emb, size, seed)| {
            let sub = train.subset(&nested_subsample(train, *size, *seed));
            let mut s = settings.clone();
            s.train.init_mode = *mode;
            s.train.seed = *seed;
            let (model, _) = fit_dnn(&sub, &labels, None, &s, emb.as_deref())?;
            let pred = decode(&dnn_lattices(&model, test)?, None);
            let correct = pred.iter().zip(&gold).filter(|(p, g)| p == g).count();
            Ok(CurveRow { mode: *mode, size: *size, seed: *seed, accuracy: correct as f64 / gold.len() as f64 })
        })
        .collect()
}

/// CSV `mode,size,seed,accuracy`.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mode", "size", "seed", "accuracy"]).unwrap();
    for r in rows {
        w.write_record([r.mode.to_string(), r.size.to_string(), r.seed.to_string(), format!("{:.6}", r.accuracy)])
            .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Median accuracy per (mode, size), in first-appearance order.
pub fn curve_medians(rows: &[CurveRow]) -> Vec<(InitMode, usize, f64)> {
    let mut keys: Vec<(InitMode, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.mode, r.size)) {
            keys.push((r.mode, r.size));
        }
    }
    keys.into_iter()
        .map(|(mode, size)| {
            let accs: Vec<f64> = rows.iter().filter(|r| r.mode == mode && r.size == size).map(|r| r.accuracy).collect();
            (mode, size, super::median(&accs))
        })
        .collect()
}
