use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{encode_corpus, generate_synthetic, BagOfWords, EncodedSentence, LabelSet, Vocabulary};
use crate::embeddings::{init_random, EmbeddingMatrix};
use crate::numerics::{finite_diff_grad, relative_error};

const D_E: usize = 4;
const D_H: usize = 3;
const V: usize = 6;
const N_LABELS: usize = 3;
const L: usize = 7;

fn random_params(seed: u64, scale: f64) -> ModelParams<f64> {
    let table = init_random::<f64>(V + 1, D_E, seed);
    let mut p = ModelParams::init(EmbeddingMatrix::from_table(table), D_H, 5, N_LABELS, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
    let flat: Vec<f64> = (0..p.num_params()).map(|_| rng.gen_range(-scale..scale)).collect();
    p.assign_flat(&flat);
    p.embedding.table_mut().row_mut(0).fill(0.0);
    p
}

fn random_example(rng: &mut ChaCha8Rng) -> EncodedSentence {
    let mask: Vec<bool> = (0..L).map(|_| rng.gen_bool(0.7)).collect();
    let token_ids = mask.iter().map(|&m| if m { rng.gen_range(1..=V) } else { 0 }).collect();
    let prev: Vec<usize> = (0..V).filter(|_| rng.gen_bool(0.3)).collect();
    EncodedSentence {
        token_ids,
        mask,
        prev_bow: BagOfWords::from_positions(V, prev),
        label_id: rng.gen_range(0..N_LABELS),
    }
}

fn analytic_grad(p: &ModelParams<f64>, data: &[EncodedSentence], masks: &[Option<Vec<f64>>]) -> Vec<f64> {
    let mut g = p.zeros_like();
    for (ex, m) in data.iter().zip(masks) {
        let cache = p.forward_with_dropout(ex, m.clone());
        p.backward(&cache, ex.label_id, false, &mut g);
    }
    g.flatten()
}

fn numeric_grad(p: &ModelParams<f64>, data: &[EncodedSentence], masks: &[Option<Vec<f64>>]) -> Vec<f64> {
    finite_diff_grad(
        |theta| {
            let mut q = p.clone();
            q.assign_flat(theta);
            data.iter()
                .zip(masks)
                .map(|(ex, m)| {
                    let probs = q.forward_with_dropout(ex, m.clone()).probs;
                    -probs[ex.label_id].ln()
                })
                .sum()
        },
        &p.flatten(),
        1e-5,
    )
}

fn check_blocks(p: &ModelParams<f64>, a: &[f64], n: &[f64], tol: f64) {
    let mut off = 0;
    for (name, t) in p.blocks() {
        let len = t.len();
        let err = relative_error(&a[off..off + len], &n[off..off + len]);
        assert!(err <= tol, "block {name}: relative error {err:e}");
        off += len;
    }
}

#[test]
fn full_model_gradient_matches_finite_differences() {
    for seed in 0..5 {
        let p = random_params(seed, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let data: Vec<_> = (0..3).map(|_| random_example(&mut rng)).collect();
        let masks = vec![None; data.len()];
        check_blocks(&p, &analytic_grad(&p, &data, &masks), &numeric_grad(&p, &data, &masks), 1e-4);
    }
}

#[test]
fn gradient_with_fixed_dropout_mask() {
    let p = random_params(9, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data: Vec<_> = (0..2).map(|_| random_example(&mut rng)).collect();
    let masks: Vec<_> = (0..2).map(|_| Some(dropout_mask::<f64, _>(D_H, 0.5, &mut rng))).collect();
    check_blocks(&p, &analytic_grad(&p, &data, &masks), &numeric_grad(&p, &data, &masks), 1e-4);
}

#[test]
fn single_precision_gradient_is_close() {
    let p64 = random_params(3, 0.5);
    let p32: ModelParams<f32> = p64.cast();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data: Vec<_> = (0..3).map(|_| random_example(&mut rng)).collect();
    let mut g = p32.zeros_like();
    for ex in &data {
        p32.backward(&p32.forward_eval(ex), ex.label_id, false, &mut g);
    }
    let a: Vec<f64> = g.flatten().into_iter().map(f64::from).collect();
    let n = numeric_grad(&p64, &data, &vec![None; data.len()]);
    check_blocks(&p64, &a, &n, 1e-2);
}

#[test]
fn logit_gradient_is_probs_minus_onehot() {
    let p = random_params(1, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ex = random_example(&mut rng);
    let cache = p.forward_eval(&ex);
    let mut g = p.zeros_like();
    p.backward(&cache, ex.label_id, false, &mut g);
    for (k, prob) in cache.probs.iter().enumerate() {
        let expect = prob - if k == ex.label_id { 1.0 } else { 0.0 };
        assert!((g.b2.data()[k] - expect).abs() < 1e-15);
    }
}

#[test]
fn frozen_embeddings_get_no_gradient() {
    let p = random_params(2, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut g = p.zeros_like();
    for _ in 0..4 {
        let ex = random_example(&mut rng);
        p.backward(&p.forward_eval(&ex), ex.label_id, true, &mut g);
    }
    assert!(g.embedding.table().data().iter().all(|&x| x == 0.0));
    assert!(g.lstm.w[0].data().iter().any(|&x| x != 0.0));
}

#[test]
fn padding_row_gradient_is_zero() {
    let p = random_params(4, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut g = p.zeros_like();
    for _ in 0..4 {
        let ex = random_example(&mut rng);
        p.backward(&p.forward_eval(&ex), ex.label_id, false, &mut g);
    }
    assert!(g.embedding.row(0).iter().all(|&x| x == 0.0));
}

#[test]
fn masked_slots_do_not_affect_output() {
    let p = random_params(5, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let ex = random_example(&mut rng);
        let base = p.probs(&ex);
        let mut other = ex.clone();
        for (t, m) in other.token_ids.iter_mut().zip(&other.mask) {
            if !*m {
                *t = rng.gen_range(0..=V);
            }
        }
        assert_eq!(p.probs(&other), base);
        let mut longer = ex.clone();
        longer.token_ids.extend([0, 0, 0]);
        longer.mask.extend([false, false, false]);
        assert_eq!(p.probs(&longer), base);
    }
}

#[test]
fn outputs_are_normalised_and_deterministic() {
    let p: ModelParams<f32> = random_params(6, 1.0).cast();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let ex = random_example(&mut rng);
        let a = p.probs(&ex);
        assert!((a.iter().sum::<f32>() - 1.0).abs() < 1e-6);
        assert_eq!(a, p.probs(&ex));
        let (label, probs) = p.predict(&ex);
        assert_eq!(label, argmax(&probs));
    }
}

#[test]
fn all_padding_input_uses_zero_state() {
    let p = random_params(7, 0.5);
    let ex = EncodedSentence {
        token_ids: vec![0; L],
        mask: vec![false; L],
        prev_bow: BagOfWords::empty(V),
        label_id: 0,
    };
    let probs = p.probs(&ex);
    let mut logits = p.b2.data().to_vec();
    let u: Vec<f64> = p.b1.data().iter().map(|b| b.tanh()).collect();
    p.w2.matvec_acc(&u, &mut logits);
    assert_eq!(probs, crate::numerics::softmax(&logits));
}

#[test]
fn inverted_dropout_preserves_expectation() {
    let h = [0.3f64, -1.2, 0.8, 2.0];
    // at rate 0.5 and 1e5 draws the 1% bound sits at about three standard errors
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 100_000;
    let mut sum = [0.0f64; 4];
    for _ in 0..n {
        let m: Vec<f64> = dropout_mask(4, 0.5, &mut rng);
        for k in 0..4 {
            sum[k] += h[k] * m[k];
        }
    }
    for k in 0..4 {
        let mean = sum[k] / n as f64;
        assert!((mean - h[k]).abs() <= 0.01 * h[k].abs(), "coordinate {k}: {mean} vs {}", h[k]);
    }
}

fn synthetic_data(n_dialogues: usize, seed: u64) -> (Vocabulary, LabelSet, Vec<EncodedSentence>) {
    let corpus = generate_synthetic(n_dialogues, seed).corpus;
    let (vocab, _) = Vocabulary::build(corpus.utterances(), 1000).unwrap();
    let labels = LabelSet::from_utterances(corpus.utterances());
    let data = encode_corpus(&corpus, &vocab, &labels, 15).unwrap().0;
    (vocab, labels, data)
}

fn small_model(vocab: &Vocabulary, labels: &LabelSet, seed: u64) -> ModelParams<f32> {
    let table = init_random::<f32>(vocab.size() + 1, 8, seed);
    ModelParams::init(EmbeddingMatrix::from_table(table), 8, 16, labels.len(), seed)
}

#[test]
fn training_is_deterministic_and_keeps_padding_zero() {
    let (vocab, labels, data) = synthetic_data(20, 1);
    let cfg = TrainConfig { epochs: 2, seed: 3, ..TrainConfig::default() };
    let (a, ha) = train(small_model(&vocab, &labels, 3), &data, Some(&data[..10]), &cfg).unwrap();
    let (b, hb) = train(small_model(&vocab, &labels, 3), &data, Some(&data[..10]), &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
    assert_eq!(ha.records.len(), 3);
    assert!(a.embedding.row(0).iter().all(|&x| x == 0.0));
    let other = TrainConfig { chunk_size: 3, ..cfg.clone() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (c, _) = pool.install(|| train(small_model(&vocab, &labels, 3), &data, None, &cfg)).unwrap();
    assert_eq!(a, c);
    let (d, _) = train(small_model(&vocab, &labels, 3), &data, None, &other).unwrap();
    assert!(d.flatten().iter().all(|x| x.is_finite()));
}

#[test]
fn frozen_training_leaves_embeddings_untouched() {
    let (vocab, labels, data) = synthetic_data(10, 2);
    let init = small_model(&vocab, &labels, 4);
    let cfg = TrainConfig { epochs: 1, freeze_embeddings: true, ..TrainConfig::default() };
    let (trained, _) = train(init.clone(), &data, None, &cfg).unwrap();
    assert_eq!(trained.embedding, init.embedding);
    assert_ne!(trained.w2, init.w2);
}

#[test]
fn first_epoch_reduces_loss() {
    let (vocab, labels, data) = synthetic_data(30, 5);
    let mut drops: Vec<f64> = (0..3)
        .map(|seed| {
            let cfg = TrainConfig { epochs: 1, seed, ..TrainConfig::default() };
            let (_, h) = train(small_model(&vocab, &labels, seed), &data, None, &cfg).unwrap();
            h.records[0].train_loss - h.records[1].train_loss
        })
        .collect();
    drops.sort_by(f64::total_cmp);
    assert!(drops[1] > 0.0, "{drops:?}");
}

#[test]
fn invalid_configs_are_rejected() {
    let (vocab, labels, data) = synthetic_data(5, 0);
    let p = small_model(&vocab, &labels, 0);
    assert_eq!(train(p.clone(), &[], None, &TrainConfig::default()).unwrap_err(), TrainError::EmptyTrainingSet);
    let bad = TrainConfig { dropout_rate: 1.0, ..TrainConfig::default() };
    assert!(matches!(train(p, &data, None, &bad), Err(TrainError::InvalidConfig(_))));
}

#[test]
fn model_file_round_trip() {
    let (vocab, labels, _) = synthetic_data(5, 0);
    let model = DnnModel { vocab, labels, max_len: 15, params: small_model_from(0) };
    let bytes = model.to_container().to_bytes();
    let back = DnnModel::from_container(&crate::container::Container::from_bytes(&bytes).unwrap()).unwrap();
    assert_eq!(back, model);

    let mut c = model.to_container();
    c.tensors.retain(|t| t.name != "mlp.W_2");
    assert!(DnnModel::from_container(&c).is_err());
    let mut c = model.to_container();
    let t = c.tensors.iter_mut().find(|t| t.name == "lstm.U_f").unwrap();
    t.dims = vec![t.dims[0], t.dims[1] + 1];
    t.data.extend(vec![0.0; t.dims[0]]);
    assert!(DnnModel::from_container(&c).is_err());
}

fn small_model_from(seed: u64) -> ModelParams<f32> {
    let (vocab, labels, _) = synthetic_data(5, 0);
    small_model(&vocab, &labels, seed)
}

#[test]
fn extracted_embeddings_match_rows() {
    let (vocab, labels, _) = synthetic_data(5, 0);
    let p = small_model(&vocab, &labels, 1);
    let set = extract_embeddings(&p, &vocab);
    assert_eq!(set.len(), vocab.size());
    for (i, w) in vocab.entries().iter().enumerate() {
        assert_eq!(set.get(w).unwrap(), p.embedding.row(i + 1));
    }
    let mut buf = Vec::new();
    crate::embeddings::write_word2vec_binary(&set, &mut buf).unwrap();
    let back = crate::embeddings::parse_word2vec_binary(&buf).unwrap();
    assert_eq!(back.words(), set.words());
    for w in set.words() {
        assert_eq!(back.get(w), set.get(w));
    }
}
