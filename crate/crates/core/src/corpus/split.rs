use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CorpusError;

/// Dialogue indices of one cross-validation fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Partitions `n_dialogues` dialogue indices into `k` folds after a seeded
/// shuffle. Fold sizes differ by at most one. Indices inside each list are
/// ascending so that dialogue order is preserved.
pub fn kfold_split(n_dialogues: usize, k: usize, seed: u64) -> Result<Vec<Fold>, CorpusError> {
    if k < 2 || k > n_dialogues {
        return Err(CorpusError::TooManyFolds { k, dialogues: n_dialogues });
    }
    let mut order: Vec<usize> = (0..n_dialogues).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n_dialogues / k;
    let extra = n_dialogues % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut test = order[start..start + len].to_vec();
        test.sort_unstable();
        let mut train: Vec<usize> =
            order[..start].iter().chain(&order[start + len..]).copied().collect();
        train.sort_unstable();
        folds.push(Fold { train, test });
        start += len;
    }
    Ok(folds)
}
