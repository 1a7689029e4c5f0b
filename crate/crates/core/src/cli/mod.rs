//! The `dact` command-line tool.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::eval::SweepParam;

#[derive(Debug, Parser)]
#[command(name = "dact", version, about = "Dialogue act recognition: LSTM classifier, MaxEnt baseline and experiments")]
pub struct Cli {
    /// TOML file with one `[command]` table of default flags; command-line
    /// flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, short = 'j', global = true)]
    pub jobs: Option<usize>,
    /// More logging (-v info, -vv debug).
    #[arg(long, short = 'v', action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it together with history.csv.
    ///
    /// history.csv columns: epoch,train_loss,train_acc,test_acc (DNN) or
    /// iteration,loss (MaxEnt).
    Train(TrainArgs),
    /// Evaluate a saved model, or cross-validate with --cv.
    ///
    /// --out writes CSV columns fold,n,correct,accuracy; the pooled result is
    /// the row with fold "all".
    Eval(EvalArgs),
    /// Cross-validated sweep over one architecture setting.
    ///
    /// CSV columns: param,value,fold,accuracy. A value that cannot be used
    /// gives one row with the error in the fold column and NaN accuracy.
    Sweep(SweepArgs),
    /// Accuracy versus training-set size for several embedding initializations.
    ///
    /// CSV columns: mode,size,seed,accuracy (size in training utterances).
    Curve(CurveArgs),
    /// Nearest neighbours and pairwise similarities in an embedding space.
    ///
    /// --csv writes columns query,rank,word,cosine.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic corpus with order-sensitive dialogue acts.
    ///
    /// The manifest CSV has columns label,count.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelType {
    Dnn,
    Maxent,
}

/// `random`, `pretrained` or `oracle:<word2vec file>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitArg {
    Random,
    Pretrained,
    Oracle(PathBuf),
}

impl FromStr for InitArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Self::Random),
            "pretrained" => Ok(Self::Pretrained),
            _ => match s.strip_prefix("oracle:") {
                Some(p) if !p.is_empty() => Ok(Self::Oracle(PathBuf::from(p))),
                _ => Err(format!("expected random, pretrained or oracle:<file>, got {s:?}")),
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Corpus file: dialogue_id<TAB>label<TAB>text per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Split text on whitespace only instead of running the tokenizer.
    #[arg(long)]
    pub pretokenized: bool,
}

/// Architecture and optimization settings shared by every training command.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 300)]
    pub embedding_dim: usize,
    #[arg(long, default_value_t = 50)]
    pub lstm_hidden: usize,
    #[arg(long, default_value_t = 200)]
    pub mlp_hidden: usize,
    /// Fixed input length; the last five tokens are always kept.
    #[arg(long, default_value_t = 15)]
    pub max_len: usize,
    /// Vocabulary size including UNK.
    #[arg(long, default_value_t = 1000)]
    pub vocab_size: usize,
    /// Training epochs (default 20; 5 for `curve`).
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.5)]
    pub dropout: f64,
    #[arg(long, default_value_t = 0.001)]
    pub learning_rate: f64,
    /// Keep the embedding table fixed during training.
    #[arg(long)]
    pub freeze_embeddings: bool,
    /// Embedding initialization: random, pretrained (needs --embeddings) or
    /// oracle:<word2vec file>.
    #[arg(long, default_value = "random")]
    pub init: InitArg,
    /// word2vec binary vectors; for MaxEnt they add averaged-embedding features.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// MaxEnt L2 weight.
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 10)]
    pub lbfgs_memory: usize,
    #[arg(long, default_value_t = 200)]
    pub lbfgs_max_iters: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub lbfgs_tol: f64,
    /// Add-k smoothing of the dialogue-act bigram.
    #[arg(long, default_value_t = 1.0)]
    pub bigram_k: f64,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value_t = ModelType::Dnn)]
    pub model: ModelType,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Held-out corpus scored after every epoch.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// History CSV (default: history.csv next to the model).
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Also write the trained DNN embeddings as word2vec binary.
    #[arg(long)]
    pub export_embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    /// Saved model file (omit with --cv).
    #[arg(long, required_unless_present = "cv", conflicts_with = "cv")]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Cross-validate with this many dialogue folds instead of loading a model.
    #[arg(long)]
    pub cv: Option<usize>,
    /// Classifier trained in each fold.
    #[arg(long, value_enum, default_value_t = ModelType::Dnn)]
    pub model_type: ModelType,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rescore each dialogue with the act bigram at this weight.
    #[arg(long)]
    pub viterbi_weight: Option<f64>,
    /// CSV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub param: SweepParam,
    #[arg(long, value_delimiter = ',', num_args = 1, action = ArgAction::Set, required = true)]
    pub values: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub model_args: ModelArgs,
    /// CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Random,
    Pretrained,
    Oracle,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct CurveArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Fixed test corpus; without it a seeded share of dialogues is held out.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Share of dialogues held out when --test is absent.
    #[arg(long, default_value_t = 0.1)]
    pub holdout: f64,
    /// Training sizes in utterances (overrides --fractions).
    #[arg(long, value_delimiter = ',', num_args = 1, action = ArgAction::Set)]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 1, action = ArgAction::Set,
          default_value = "0.01,0.02,0.05,0.1,0.25,0.5,1")]
    pub fractions: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', num_args = 1, action = ArgAction::Set, default_value = "random,oracle")]
    pub modes: Vec<ModeArg>,
    #[arg(long, value_delimiter = ',', num_args = 1, action = ArgAction::Set, default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    /// Oracle embeddings (word2vec binary); trained on the full corpus if absent.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    #[command(flatten)]
    pub model_args: ModelArgs,
    /// CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct AnalyzeArgs {
    /// word2vec binary file, or a trained DNN model file.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 1, action = ArgAction::Set)]
    pub words: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Word pairs `a:b` to compare.
    #[arg(long, value_delimiter = ',', num_args = 1, action = ArgAction::Set)]
    pub pairs: Vec<String>,
    /// Neighbour CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    /// Number of dialogues.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Corpus file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Label manifest CSV (default: stdout).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Sweep(_) => "sweep",
            Command::Curve(_) => "curve",
            Command::Analyze(_) => "analyze",
            Command::Synth(_) => "synth",
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on failure, 2 on usage errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cli = match &cli.config {
        None => cli,
        Some(path) => {
            let merged = config::config_flags(path, cli.command.name())
                .map(|extra| config::splice_after_subcommand(&args, cli.command.name(), extra));
            match merged {
                Ok(merged) => match Cli::try_parse_from(merged) {
                    Ok(cli) => cli,
                    Err(e) => {
                        let _ = e.print();
                        return e.exit_code();
                    }
                },
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return 2;
                }
            }
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 2;
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialized; --jobs ignored");
        }
    }
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(e) if e.is::<commands::UsageError>() => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
