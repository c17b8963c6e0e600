//! Training and evaluation of Model-Agnostic Linear Competitors: K linear
//! agents plus per-class thresholds that claim the confident region of
//! feature space and defer everything else to a pre-trained black-box known
//! only through its prediction vector.
//!
//! The pieces, bottom-up:
//! - [`data`]: datasets, black-box prediction vectors, the per-class
//!   correctness partition, holdout splits, min-max scaling.
//! - [`loss`]: margin losses φ, the competition loss over the partition,
//!   its gradient, and the penalized objective.
//! - [`optimizer`]: accelerated proximal gradient with backtracking line
//!   search and adaptive restart.
//! - [`model`]: the hybrid claim-or-defer predictor, its metrics, and
//!   model-file serialization.
//! - [`frontier`]: (c1, c2) sweeps with per-c1 holdout selection of c2,
//!   producing accuracy-vs-transparency frontier tables.
//! - [`blackbox`]: self-contained stand-in black-boxes (brute-force k-NN
//!   and a seeded noisy oracle).
//! - [`synth`]: gaussian-blob dataset generator for harnesses and demos.
//! - [`gradcheck`]: finite-difference validation of the analytic gradient.

pub mod blackbox;
pub mod data;
pub mod error;
pub mod frontier;
pub mod gradcheck;
pub mod loss;
pub mod model;
pub mod optimizer;
pub mod synth;

pub use blackbox::{
    knn_fit, knn_predict, knn_predict_batch, noisy_oracle, KnnModel, NoisyOracleConfig,
};
pub use data::{
    apply_scale, file_sha256, holdout_split, load_blackbox_predictions, load_dataset,
    minmax_scale, partition_indices, save_blackbox_predictions, save_csv, save_labels,
    BlackboxPredictions, ClassPartition, DataFormat, Dataset, LabelColumn, ScalingParams,
    SplitMode,
};
pub use error::{Error, Result};
pub use frontier::{
    export_frontier, select_c2, spaced_values, sweep, C2Selection, FitSummary, Frontier,
    FrontierPoint, GridSpacing, SweepConfig, SweepGrid,
};
pub use gradcheck::{fd_loss_grad, run_gradcheck, GradcheckReport, FD_STEP, GRADCHECK_TOL};
pub use loss::{
    l1_norm, loss_eval, loss_grad, loss_value_and_grad, objective_eval, phi_eval, phi_grad,
    Gradient, ModelParams, ObjectiveConfig, PhiKind,
};
pub use model::{
    avg_nonzeros, claimant, evaluate, load_model, margins_of, predict_hybrid, predict_scores,
    save_model, transparency, HybridModel, Metrics, PredictionOutcome, PredictionSource,
    Provenance, TieBreak, MODEL_SCHEMA_VERSION, ZERO_TOL,
};
pub use optimizer::{
    apg_fit, line_search, prox_gradient_residual, prox_theta, prox_w, FitResult,
    LineSearchOutcome, SolverConfig,
};
pub use synth::make_blobs;
