use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AnalyzeArgs, Command, CurveArgs, EvalArgs, InitArg, ModeArg, ModelArgs, ModelType, SweepArgs, SynthArgs, TrainArgs};
use crate::container::{Container, ModelKind, MAGIC};
use crate::corpus::{generate_synthetic, read_corpus_file, write_corpus_file, write_manifest, Corpus, LabelSet};
use crate::embeddings::{
    cosine, load_word2vec_binary, nearest_neighbors, neighbors_csv, neighbors_table, pairs_table, rank_of,
    save_word2vec_binary, EmbeddingSet,
};
use crate::eval::{
    cross_validate, curve_csv, curve_medians, decode, dnn_lattices, fit_dnn, fit_me, fraction_sizes, gold_ids,
    hyper_sweep, label_sequences, learning_curve, me_lattices, sweep_csv, train_bigram, BigramModel, CurveMode,
    DnnSettings, DnnTrainer, ExperimentReport, MeSettings, MeTrainer, Rescoring, Trainer,
};
use crate::maxent::{LbfgsConfig, MeModel};
use crate::neural::{extract_embeddings, AdamConfig, DnnModel, InitMode, ModelDims, TrainConfig};

/// An error in how the command was invoked rather than in its inputs.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Curve(a) => curve(a),
        Command::Analyze(a) => analyze(a),
        Command::Synth(a) => synth(a),
    }
}

fn load_corpus(path: &Path, pretokenized: bool) -> Result<Corpus> {
    let (corpus, report) = read_corpus_file(path, pretokenized)?;
    if report.empty_utterances > 0 {
        log::warn!("{}: {} utterances have no tokens", path.display(), report.empty_utterances);
    }
    if corpus.is_empty() {
        bail!("{}: corpus has no utterances", path.display());
    }
    log::info!("{}: {} dialogues, {} utterances", path.display(), corpus.dialogues.len(), report.utterances);
    Ok(corpus)
}

fn load_embeddings(path: &Path) -> Result<EmbeddingSet> {
    load_word2vec_binary(path).with_context(|| format!("loading embeddings {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or prints when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dnn_settings(m: &ModelArgs, default_epochs: usize, seed: u64) -> Result<DnnSettings> {
    let init_mode = match m.init {
        InitArg::Random => InitMode::Random,
        InitArg::Pretrained => InitMode::Pretrained,
        InitArg::Oracle(_) => InitMode::Oracle,
    };
    if !(0.0..1.0).contains(&m.dropout) {
        return Err(usage(format!("--dropout must lie in [0, 1), got {}", m.dropout)));
    }
    Ok(DnnSettings {
        dims: ModelDims {
            embedding_dim: m.embedding_dim,
            lstm_hidden: m.lstm_hidden,
            mlp_hidden: m.mlp_hidden,
            max_len: m.max_len,
            vocab_size: m.vocab_size,
        },
        train: TrainConfig {
            epochs: m.epochs.unwrap_or(default_epochs),
            batch_size: m.batch_size,
            dropout_rate: m.dropout,
            seed,
            freeze_embeddings: m.freeze_embeddings,
            init_mode,
            adam: AdamConfig { alpha: m.learning_rate, ..AdamConfig::default() },
            ..TrainConfig::default()
        },
    })
}

/// Vectors used to initialize the DNN embedding table, per `--init`.
fn init_embeddings(m: &ModelArgs) -> Result<Option<EmbeddingSet>> {
    match &m.init {
        InitArg::Random => {
            if m.embeddings.is_some() {
                log::warn!("--embeddings is ignored with --init random");
            }
            Ok(None)
        }
        InitArg::Pretrained => match &m.embeddings {
            Some(p) => Ok(Some(load_embeddings(p)?)),
            None => Err(usage("--init pretrained requires --embeddings <word2vec file>")),
        },
        InitArg::Oracle(p) => Ok(Some(load_embeddings(p)?)),
    }
}

fn me_settings(m: &ModelArgs) -> Result<MeSettings> {
    let lbfgs = LbfgsConfig {
        memory: m.lbfgs_memory,
        max_iters: m.lbfgs_max_iters,
        grad_tol: m.lbfgs_tol,
        l2: m.l2,
        ..LbfgsConfig::default()
    };
    lbfgs.validate().map_err(usage)?;
    let embeddings = m.embeddings.as_deref().map(load_embeddings).transpose()?.map(Arc::new);
    Ok(MeSettings { vocab_size: m.vocab_size, lbfgs, embeddings })
}

fn print_echo(pairs: &[(String, String)]) {
    for (k, v) in pairs {
        println!("# {k} = {v}");
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus.corpus, a.corpus.pretokenized)?;
    let test = a.test.as_deref().map(|p| load_corpus(p, a.corpus.pretokenized)).transpose()?;
    let labels = LabelSet::from_utterances(corpus.utterances().chain(test.iter().flat_map(|t| t.utterances())));
    let history_path = a.history.clone().unwrap_or_else(|| a.out.with_file_name("history.csv"));
    let bigram = train_bigram(&label_sequences(&corpus, &labels)?, labels.len(), a.model_args.bigram_k);
    let mut echo = vec![
        ("command".to_string(), "train".to_string()),
        ("corpus_sha256".to_string(), corpus.content_hash()),
    ];
    if let Some(t) = &test {
        echo.push(("test_sha256".to_string(), t.content_hash()));
    }
    match a.model {
        ModelType::Dnn => {
            let settings = dnn_settings(&a.model_args, 20, a.seed)?;
            let emb = init_embeddings(&a.model_args)?;
            echo.push(("model".into(), "dnn".into()));
            echo.extend(settings.echo());
            print_echo(&echo);
            let (model, history) = fit_dnn(&corpus, &labels, test.as_ref(), &settings, emb.as_ref())?;
            let mut container = model.to_container();
            container.tensors.extend(bigram.to_tensors());
            container.save(&a.out).with_context(|| format!("writing model {}", a.out.display()))?;
            write_text(&history_path, &history.to_csv())?;
            if let Some(p) = &a.export_embeddings {
                save_word2vec_binary(&extract_embeddings(&model.params, &model.vocab), p)
                    .with_context(|| format!("writing embeddings {}", p.display()))?;
            }
            let last = history.last();
            println!("train accuracy: {:.2}% (loss {:.4})", 100.0 * last.train_acc, last.train_loss);
            if let (Some(acc), Some(t)) = (last.test_acc, &test) {
                let n = t.num_utterances();
                let report = ExperimentReport::from_counts((acc * n as f64).round() as usize, n, Vec::new());
                println!("test accuracy: {} (n = {n})", report.headline());
            }
        }
        ModelType::Maxent => {
            if a.export_embeddings.is_some() {
                return Err(usage("--export-embeddings only applies to --model dnn"));
            }
            let settings = me_settings(&a.model_args)?;
            echo.push(("model".into(), "maxent".into()));
            echo.extend(settings.echo());
            print_echo(&echo);
            let (model, report) = fit_me(&corpus, &labels, &settings)?;
            let mut container = model.to_container();
            container.tensors.extend(bigram.to_tensors());
            container.save(&a.out).with_context(|| format!("writing model {}", a.out.display()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["iteration", "loss"])?;
            for (i, l) in report.trace.iter().enumerate() {
                w.write_record([i.to_string(), format!("{l:.8}")])?;
            }
            write_text(&history_path, &String::from_utf8(w.into_inner()?)?)?;
            let pred = model.predict_corpus(&corpus, settings.embeddings.as_deref())?;
            let gold = gold_ids(&corpus, &labels)?;
            println!("L-BFGS: {:?} after {} iterations, loss {:.6}", report.termination, report.iterations, report.loss);
            println!("train accuracy: {:.2}%", 100.0 * crate::eval::accuracy(&pred, &gold)?);
            if let Some(t) = &test {
                let pred = model.predict_corpus(t, settings.embeddings.as_deref())?;
                let r = ExperimentReport::from_predictions(&pred, &gold_ids(t, &labels)?, Vec::new())?;
                println!("test accuracy: {} (n = {})", r.headline(), r.n);
            }
        }
    }
    log::info!("wrote {} and {}", a.out.display(), history_path.display());
    Ok(())
}

fn check_labels(corpus: &Corpus, labels: &LabelSet, model: &Path) -> Result<()> {
    for u in corpus.utterances() {
        if labels.id(&u.label).is_err() {
            bail!(
                "label {:?} (dialogue {}) is not in the label set of {} ({})",
                u.label,
                u.dialogue_id,
                model.display(),
                labels.labels().join(", ")
            );
        }
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus.corpus, a.corpus.pretokenized)?;
    let rescoring = a.viterbi_weight.map(|weight| Rescoring { k: a.model_args.bigram_k, weight });
    let report = if let Some(k) = a.cv {
        let trainer: Box<dyn Trainer> = match a.model_type {
            ModelType::Dnn => {
                let emb = init_embeddings(&a.model_args)?.map(Arc::new);
                Box::new(DnnTrainer { settings: dnn_settings(&a.model_args, 20, a.seed)?, embeddings: emb, rescoring })
            }
            ModelType::Maxent => Box::new(MeTrainer { settings: me_settings(&a.model_args)?, rescoring }),
        };
        cross_validate(trainer.as_ref(), &corpus, k, a.seed)?
    } else {
        let path = a.model.as_deref().expect("clap requires --model without --cv");
        let container = Container::load(path).with_context(|| format!("loading model {}", path.display()))?;
        let labels = LabelSet::new(container.labels.clone())?;
        check_labels(&corpus, &labels, path)?;
        let lattices = match container.kind {
            ModelKind::Dnn => dnn_lattices(&DnnModel::from_container(&container)?, &corpus)?,
            ModelKind::MaxEnt => {
                let model = MeModel::from_container(&container)?;
                let emb = a.model_args.embeddings.as_deref().map(load_embeddings).transpose()?;
                match (&emb, model.emb_dim) {
                    (None, 0) => {}
                    (Some(e), d) if e.dim() == d => {}
                    (None, d) => bail!("{} uses {d}-dimensional embedding features; pass --embeddings", path.display()),
                    (Some(e), d) => bail!("model expects {d}-dimensional embedding features, file has {}", e.dim()),
                }
                me_lattices(&model, &corpus, emb.as_ref())?
            }
        };
        let bigram: Option<BigramModel> = match rescoring {
            Some(_) => Some(
                BigramModel::from_container(&container)?
                    .with_context(|| format!("{} has no bigram for rescoring", path.display()))?,
            ),
            None => None,
        };
        let pred = decode(&lattices, bigram.as_ref().zip(rescoring.map(|r| r.weight)));
        let mut meta = vec![
            ("model_file".to_string(), path.display().to_string()),
            ("corpus_sha256".to_string(), corpus.content_hash()),
        ];
        if let Some(r) = rescoring {
            meta.push(("bigram_weight".into(), r.weight.to_string()));
        }
        ExperimentReport::from_predictions(&pred, &gold_ids(&corpus, &labels)?, meta)?
    };
    print!("{}", report.to_text());
    if let Some(p) = &a.out {
        write_text(p, &report.to_csv())?;
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus.corpus, a.corpus.pretokenized)?;
    let settings = dnn_settings(&a.model_args, 20, a.seed)?;
    let emb = init_embeddings(&a.model_args)?.map(Arc::new);
    let base = DnnTrainer { settings, embeddings: emb, rescoring: None };
    let rows = hyper_sweep(&corpus, a.param, &a.values, a.folds, a.seed, &base)?;
    emit(a.out.as_deref(), &sweep_csv(&rows))
}

/// Seeded dialogue-level split into (train, held out).
fn holdout_split(corpus: &Corpus, share: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(share > 0.0 && share < 1.0) {
        return Err(usage(format!("--holdout must lie in (0, 1), got {share}")));
    }
    let n = corpus.dialogues.len();
    let n_test = ((share * n as f64).round() as usize).max(1);
    if n_test >= n {
        bail!("corpus has too few dialogues ({n}) for a held-out split");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((corpus.subset(&train), corpus.subset(&test)))
}

fn curve(a: CurveArgs) -> Result<()> {
    let full = load_corpus(&a.corpus.corpus, a.corpus.pretokenized)?;
    let seed0 = a.seeds.first().copied().unwrap_or(0);
    let (train, test) = match &a.test {
        Some(p) => (full, load_corpus(p, a.corpus.pretokenized)?),
        None => holdout_split(&full, a.holdout, seed0)?,
    };
    if a.seeds.is_empty() || a.modes.is_empty() {
        return Err(usage("--seeds and --modes need at least one entry"));
    }
    let mut settings = dnn_settings(&a.model_args, 5, seed0)?;
    settings.train.init_mode = InitMode::Random;
    let sizes = match &a.sizes {
        Some(s) if s.contains(&0) => return Err(usage("--sizes entries must be positive")),
        Some(s) => s.clone(),
        None => {
            if a.fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
                return Err(usage("--fractions entries must lie in (0, 1]"));
            }
            fraction_sizes(train.num_utterances(), &a.fractions)
        }
    };
    let pretrained = if a.modes.contains(&ModeArg::Pretrained) {
        let p = a.model_args.embeddings.as_deref().ok_or_else(|| usage("pretrained mode requires --embeddings"))?;
        Some(Arc::new(load_embeddings(p)?))
    } else {
        None
    };
    let oracle = a.oracle.as_deref().map(load_embeddings).transpose()?.map(Arc::new);
    let modes: Vec<CurveMode> = a
        .modes
        .iter()
        .map(|m| match m {
            ModeArg::Random => CurveMode { mode: InitMode::Random, embeddings: None },
            ModeArg::Pretrained => CurveMode { mode: InitMode::Pretrained, embeddings: pretrained.clone() },
            ModeArg::Oracle => CurveMode { mode: InitMode::Oracle, embeddings: oracle.clone() },
        })
        .collect();
    let rows = learning_curve(&train, &test, &sizes, &modes, &a.seeds, &settings)?;
    let csv = curve_csv(&rows);
    emit(a.out.as_deref(), &csv)?;
    if a.out.is_some() {
        println!("# test utterances = {}", test.num_utterances());
        for (mode, size, med) in curve_medians(&rows) {
            println!("{mode:<10} {size:>7}  median {:.2}%", 100.0 * med);
        }
    }
    Ok(())
}

/// word2vec vectors, or the embedding table of a saved DNN model.
fn analysis_vectors(path: &Path) -> Result<EmbeddingSet> {
    let head = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if head.starts_with(MAGIC) {
        let model = DnnModel::from_container(&Container::from_bytes(&head)?)?;
        return Ok(extract_embeddings(&model.params, &model.vocab));
    }
    load_embeddings(path)
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let set = analysis_vectors(&a.embeddings)?;
    let words: Vec<&String> = a.words.iter().filter(|w| !w.is_empty()).collect();
    if words.is_empty() && a.pairs.is_empty() {
        return Err(usage("nothing to do: pass --words and/or --pairs"));
    }
    let mut results = Vec::new();
    for w in &words {
        results.push(((*w).clone(), nearest_neighbors(w, a.k, &set, true)?));
    }
    if !results.is_empty() {
        print!("{}", neighbors_table(&results));
    }
    if let Some(p) = &a.csv {
        write_text(p, &neighbors_csv(&results))?;
    }
    if !a.pairs.is_empty() {
        let mut rows = Vec::new();
        for pair in &a.pairs {
            let (x, y) = pair.split_once(':').ok_or_else(|| usage(format!("pair {pair:?} is not of the form a:b")))?;
            let vx = set.get(x).with_context(|| format!("{x:?} not in the embedding set"))?;
            let vy = set.get(y).with_context(|| format!("{y:?} not in the embedding set"))?;
            rows.push((x.to_string(), y.to_string(), cosine(vx, vy)?, rank_of(x, y, &set)?));
        }
        if !results.is_empty() {
            println!();
        }
        print!("{}", pairs_table(&rows));
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let s = generate_synthetic(a.n, a.seed);
    write_corpus_file(&s.corpus, &a.out)?;
    let mut buf = Vec::new();
    write_manifest(&s.manifest, &mut buf)?;
    emit(a.manifest.as_deref(), std::str::from_utf8(&buf)?)?;
    log::info!("wrote {} utterances in {} dialogues to {}", s.corpus.num_utterances(), a.n, a.out.display());
    Ok(())
}
