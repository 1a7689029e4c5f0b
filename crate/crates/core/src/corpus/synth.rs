use std::collections::BTreeSet;
use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Corpus, Utterance};

/// Tags emitted by the generator.
pub const SYNTH_LABELS: [&str; 7] = ["sd", "qy", "qw", "ny", "nn", "b", "ft"];
/// Statement / yes-no question pair whose instances share token multisets.
pub const ORDER_PAIR: (&str, &str) = ("sd", "qy");

const SUBJECTS: [&str; 6] = ["i", "you", "we", "they", "she", "he"];
const AUXILIARIES: [&str; 6] = ["can", "will", "should", "could", "would", "must"];
const VERBS: [&str; 10] = ["go", "come", "stay", "leave", "help", "call", "wait", "drive", "pay", "sit"];
const TAILS: [&str; 9] = ["", "now", "today", "tomorrow", "there", "here", "again", "home", "later"];
const WH_WORDS: [&str; 5] = ["what", "where", "when", "why", "how"];
const DO_FORMS: [&str; 3] = ["do", "did", "does"];
const WH_VERBS: [&str; 6] = ["want", "need", "mean", "think", "like", "know"];
const FILLERS: [&str; 4] = ["uh", "um", "well", "so"];

const YES_ANSWERS: [&str; 7] =
    ["yes", "yeah", "sure", "yes i do", "yeah of course", "yes definitely", "yes please"];
const NO_ANSWERS: [&str; 6] = ["no", "nope", "no i do not", "not really", "no never", "no way"];
const BACKCHANNELS: [&str; 7] = ["uh-huh", "right", "okay", "i see", "mm-hmm", "oh really", "all right"];
const THANKS: [&str; 5] = ["thank you", "thanks", "thanks a lot", "thank you very much", "many thanks"];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_dialogues: usize,
    /// Inclusive range of turn templates per dialogue; a paired template
    /// yields two utterances.
    pub min_turns: usize,
    pub max_turns: usize,
    /// Probability of prefixing an utterance with a filler word.
    pub filler_prob: f64,
    /// Expected utterance share per label, in [`SYNTH_LABELS`] order.
    /// The two order-pair labels must have equal shares.
    pub mixture: [f64; 7],
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_dialogues: 100,
            min_turns: 4,
            max_turns: 10,
            filler_prob: 0.15,
            mixture: [0.18, 0.18, 0.14, 0.14, 0.12, 0.14, 0.10],
        }
    }
}

impl SynthConfig {
    /// Every surface form the generator can emit.
    pub fn vocabulary(&self) -> BTreeSet<String> {
        let words = [
            &SUBJECTS[..],
            &AUXILIARIES,
            &VERBS,
            &TAILS,
            &WH_WORDS,
            &DO_FORMS,
            &WH_VERBS,
            &FILLERS,
            &["?"],
        ];
        let phrases = [&YES_ANSWERS[..], &NO_ANSWERS, &BACKCHANNELS, &THANKS];
        words
            .iter()
            .chain(&phrases)
            .flat_map(|set| set.iter())
            .flat_map(|p| p.split_whitespace())
            .map(String::from)
            .collect()
    }
}

/// Generated dialogues plus per-label utterance counts.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    pub manifest: Vec<(String, usize)>,
}

/// Default-configured generator.
pub fn generate_synthetic(n_dialogues: usize, seed: u64) -> SynthCorpus {
    SynthConfig { n_dialogues, ..SynthConfig::default() }.generate(seed)
}

enum Template {
    Pair,
    Single(usize),
}

impl SynthConfig {
    pub fn generate(&self, seed: u64) -> SynthCorpus {
        assert!(self.n_dialogues >= 1, "need at least one dialogue");
        assert!(self.min_turns >= 1 && self.min_turns <= self.max_turns);
        assert!(
            (self.mixture[0] - self.mixture[1]).abs() < 1e-12,
            "order-pair labels need equal shares"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // A paired template emits one utterance of each pair label, so its
        // weight is the share of either one.
        let weights: Vec<f64> = std::iter::once(self.mixture[0]).chain(self.mixture[2..].iter().copied()).collect();
        let picker = WeightedIndex::new(&weights).expect("positive mixture");
        let mut dialogues = Vec::with_capacity(self.n_dialogues);
        for d in 0..self.n_dialogues {
            let id = format!("s{seed}_d{d:05}");
            let turns = rng.gen_range(self.min_turns..=self.max_turns);
            let mut utterances = Vec::new();
            for _ in 0..turns {
                let template = match picker.sample(&mut rng) {
                    0 => Template::Pair,
                    k => Template::Single(k + 1),
                };
                for (label, tokens) in self.realize(template, &mut rng) {
                    utterances.push(Utterance { dialogue_id: id.clone(), label: label.to_string(), tokens });
                }
            }
            dialogues.push(super::Dialogue { id, utterances });
        }
        let corpus = Corpus { dialogues };
        let manifest = SYNTH_LABELS
            .iter()
            .map(|l| (l.to_string(), corpus.utterances().filter(|u| u.label == *l).count()))
            .collect();
        SynthCorpus { corpus, manifest }
    }

    fn realize(&self, template: Template, rng: &mut ChaCha8Rng) -> Vec<(&'static str, Vec<String>)> {
        let filler = rng.gen_bool(self.filler_prob).then(|| *FILLERS.choose(rng).unwrap());
        let with_filler = |mut toks: Vec<&str>| -> Vec<String> {
            if let Some(f) = filler {
                toks.insert(0, f);
            }
            toks.into_iter().map(String::from).collect()
        };
        let phrase = |set: &[&'static str], rng: &mut ChaCha8Rng| -> Vec<&'static str> {
            set.choose(rng).unwrap().split_whitespace().collect()
        };
        match template {
            Template::Pair => {
                let subj = *SUBJECTS.choose(rng).unwrap();
                let aux = *AUXILIARIES.choose(rng).unwrap();
                let verb = *VERBS.choose(rng).unwrap();
                let tail = *TAILS.choose(rng).unwrap();
                let mut statement = vec![subj, aux, verb];
                let mut question = vec![aux, subj, verb];
                if !tail.is_empty() {
                    statement.push(tail);
                    question.push(tail);
                }
                let mut pair = vec![
                    (ORDER_PAIR.0, with_filler(statement)),
                    (ORDER_PAIR.1, with_filler(question)),
                ];
                if rng.gen_bool(0.5) {
                    pair.swap(0, 1);
                }
                pair
            }
            Template::Single(k) => {
                let toks = match SYNTH_LABELS[k] {
                    "qw" => vec![
                        *WH_WORDS.choose(rng).unwrap(),
                        *DO_FORMS.choose(rng).unwrap(),
                        *SUBJECTS.choose(rng).unwrap(),
                        *WH_VERBS.choose(rng).unwrap(),
                        "?",
                    ],
                    "ny" => phrase(&YES_ANSWERS, rng),
                    "nn" => phrase(&NO_ANSWERS, rng),
                    "b" => phrase(&BACKCHANNELS, rng),
                    "ft" => phrase(&THANKS, rng),
                    other => unreachable!("no single template for {other}"),
                };
                vec![(SYNTH_LABELS[k], with_filler(toks))]
            }
        }
    }
}

/// Writes the manifest as CSV `label,count`.
pub fn write_manifest<W: Write>(manifest: &[(String, usize)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "count"])?;
    for (label, count) in manifest {
        w.write_record([label.as_str(), &count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
