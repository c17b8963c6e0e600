//! Gaussian-blob generator for harnesses and demos: one unit-variance
//! spherical blob per class, blob centers at equal pairwise distance.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Centers of a regular simplex with `count` vertices and the given
/// pairwise distance, embedded in d dimensions (requires d ≥ count − 1).
///
/// The unit vectors e_1..e_count sit at pairwise distance √2 inside the
/// sum-one hyperplane; expressing them in that hyperplane's orthonormal
/// (Helmert) basis and rescaling by `separation/√2` gives the centers in
/// count − 1 coordinates, zero-padded up to d.
fn simplex_centers(count: usize, d: usize, separation: f64) -> Array2<f64> {
    let mut centers = Array2::<f64>::zeros((count, d));
    let scale = separation / std::f64::consts::SQRT_2;
    for j in 0..count.saturating_sub(1) {
        // Helmert vector j: (1,...,1, -(j+1), 0,...,0)/sqrt((j+1)(j+2))
        // evaluated at each basis vertex i.
        let norm = ((j + 1) as f64 * (j + 2) as f64).sqrt();
        for i in 0..count {
            let component = if i < j + 1 {
                1.0
            } else if i == j + 1 {
                -((j + 1) as f64)
            } else {
                0.0
            };
            centers[[i, j]] = scale * component / norm;
        }
    }
    centers
}

/// Draws `n` points from `blobs` unit-variance gaussian blobs whose centers
/// are pairwise `separation` apart; class c gets `n/blobs` rows (the first
/// `n mod blobs` classes one more). Deterministic per seed.
pub fn make_blobs(blobs: usize, n: usize, d: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if blobs < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 blobs, got {blobs}"
        )));
    }
    if n < blobs {
        return Err(Error::InvalidArgument(format!(
            "need at least one point per blob: n={n} < blobs={blobs}"
        )));
    }
    if d < blobs - 1 {
        return Err(Error::InvalidArgument(format!(
            "{blobs} equidistant centers need at least {} dimensions, got {d}",
            blobs - 1
        )));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "separation must be finite and nonnegative, got {separation}"
        )));
    }

    let centers = simplex_centers(blobs, d, separation);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut features = Array2::<f64>::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    let base = n / blobs;
    let extra = n % blobs;
    let mut row = 0;
    for c in 0..blobs {
        let count = base + usize::from(c < extra);
        for _ in 0..count {
            for j in 0..d {
                let noise: f64 = normal.sample(&mut rng);
                features[[row, j]] = centers[[c, j]] + noise;
            }
            labels.push(c);
            row += 1;
        }
    }
    Dataset::new(features, labels, blobs)
}
