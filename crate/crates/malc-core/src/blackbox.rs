//! Stand-in black-boxes so the pipeline runs end-to-end without any
//! external ML stack. The training side only ever sees a prediction
//! vector, so these are deliberately plain: a brute-force k-NN and a
//! seeded label corruptor with a controllable error rate.

use ndarray::{Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{BlackboxPredictions, Dataset};
use crate::error::{Error, Result};

/// Memorized training data plus a neighbor count.
#[derive(Debug, Clone)]
pub struct KnnModel {
    features: Array2<f64>,
    labels: Vec<usize>,
    num_classes: usize,
    k: usize,
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

/// Stores the dataset verbatim.
pub fn knn_fit(ds: &Dataset, k: usize) -> Result<KnnModel> {
    if k < 1 || k > ds.n() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={}, got {k}",
            ds.n()
        )));
    }
    Ok(KnnModel {
        features: ds.features().clone(),
        labels: ds.labels().to_vec(),
        num_classes: ds.num_classes(),
        k,
    })
}

/// Majority vote among the k nearest rows by euclidean distance. Distance
/// ties prefer the lower row index; vote ties prefer the smaller class id —
/// fully deterministic.
pub fn knn_predict(model: &KnnModel, x: ArrayView1<'_, f64>) -> Result<usize> {
    if x.len() != model.features.ncols() {
        return Err(Error::Shape(format!(
            "query has {} features, model has {}",
            x.len(),
            model.features.ncols()
        )));
    }
    let mut by_distance: Vec<(f64, usize)> = model
        .features
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let d2: f64 = row.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        })
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut votes = vec![0usize; model.num_classes];
    for &(_, i) in by_distance.iter().take(model.k) {
        votes[model.labels[i]] += 1;
    }
    let winner = votes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(class, _)| class)
        .expect("votes is non-empty");
    Ok(winner)
}

/// k-NN over every row of a dataset, in row order.
pub fn knn_predict_batch(model: &KnnModel, ds: &Dataset) -> Result<BlackboxPredictions> {
    let preds = ds
        .features()
        .rows()
        .into_iter()
        .map(|row| knn_predict(model, row))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlackboxPredictions::new(preds))
}

/// Corruption process for a synthetic "pre-trained" black-box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyOracleConfig {
    /// Probability each label is replaced by a uniformly random other class.
    pub error_rate: f64,
    pub seed: u64,
}

impl NoisyOracleConfig {
    pub fn new(error_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&error_rate) {
            return Err(Error::InvalidArgument(format!(
                "error_rate must lie in [0, 1], got {error_rate}"
            )));
        }
        Ok(NoisyOracleConfig { error_rate, seed })
    }
}

/// Flips each 0-based label independently with probability `error_rate` to
/// a uniformly random different class. Deterministic per seed.
pub fn noisy_oracle(
    labels: &[usize],
    num_classes: usize,
    cfg: NoisyOracleConfig,
) -> Result<BlackboxPredictions> {
    if num_classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "a noisy oracle needs at least 2 classes, got {num_classes}"
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= num_classes) {
        return Err(Error::InvalidArgument(format!(
            "label {} outside 1..={num_classes}",
            bad + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let preds = labels
        .iter()
        .map(|&y| {
            if rng.random::<f64>() < cfg.error_rate {
                let offset = rng.random_range(1..num_classes);
                (y + offset) % num_classes
            } else {
                y
            }
        })
        .collect();
    Ok(BlackboxPredictions::new(preds))
}
