//! Shared fixtures for the benchmarks; see `benches/core.rs`.

use malc_core::{
    make_blobs, minmax_scale, noisy_oracle, partition_indices, BlackboxPredictions,
    ClassPartition, Dataset, NoisyOracleConfig,
};

/// A scaled blob problem of the given size with a 10%-error oracle.
pub fn fixture(n: usize, d: usize) -> (Dataset, BlackboxPredictions, ClassPartition) {
    let raw = make_blobs(3, n, d, 4.0, 7).expect("valid blob layout");
    let (ds, _) = minmax_scale(&raw);
    let bb = noisy_oracle(
        ds.labels(),
        ds.num_classes(),
        NoisyOracleConfig::new(0.1, 8).expect("valid oracle config"),
    )
    .expect("oracle over valid labels");
    let part = partition_indices(&ds, &bb).expect("aligned predictions");
    (ds, bb, part)
}
