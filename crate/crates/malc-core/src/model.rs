//! The hybrid predictor, its evaluation metrics, and the model file.
//!
//! Agent k claims a point when its score beats every competitor by at
//! least θ_k: `w_kᵀx − w_jᵀx ≥ θ_k` for all j ≠ k. Claimed points get the
//! agent's class; everything else defers to the black-box label supplied
//! alongside the features. With all θ_k > 0 at most one agent can claim,
//! so the rule is well-defined; θ_k = 0 can tie, broken by class index.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::{BlackboxPredictions, Dataset, ScalingParams};
use crate::error::{Error, Result};
use crate::loss::{ModelParams, PhiKind};

/// Coefficients with |value| above this count as "used" in sparsity
/// accounting. Well below anything the solver produces intentionally, well
/// above decimal-text round-off.
pub const ZERO_TOL: f64 = 1e-8;

/// Current model-file schema version.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// How simultaneous claims (possible only when some θ_k = 0) are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowestClassIndex,
}

/// Where the training inputs came from; hashes let a model file be traced
/// back to exact input bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub dataset_sha256: Option<String>,
    pub blackbox_sha256: Option<String>,
    pub seed: u64,
}

/// A trained set of linear agents plus everything needed to apply them to
/// new data exactly as during training.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub params: ModelParams,
    pub feature_names: Vec<String>,
    /// Min-max parameters collected at training time, when scaling was on.
    pub scaling: Option<ScalingParams>,
    /// Index of the constant-1 column when the model was trained with one.
    pub bias_column: Option<usize>,
    pub phi: PhiKind,
    pub c1: f64,
    pub c2: f64,
    pub tie_break: TieBreak,
    pub provenance: Provenance,
}

impl HybridModel {
    pub fn new(params: ModelParams, phi: PhiKind, c1: f64, c2: f64) -> Result<Self> {
        let d = params.dim();
        let model = HybridModel {
            params,
            feature_names: (1..=d).map(|j| format!("f{j}")).collect(),
            scaling: None,
            bias_column: None,
            phi,
            c1,
            c2,
            tie_break: TieBreak::LowestClassIndex,
            provenance: Provenance::default(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn num_classes(&self) -> usize {
        self.params.num_classes()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let (k, d) = (self.num_classes(), self.dim());
        if k < 2 {
            return Err(Error::ModelFormat(format!("needs at least 2 classes, has {k}")));
        }
        if self.params.theta.len() != k {
            return Err(Error::ModelFormat(format!(
                "theta has {} entries for {k} classes",
                self.params.theta.len()
            )));
        }
        if let Some(t) = self.params.theta.iter().find(|&&t| t < 0.0) {
            return Err(Error::ModelFormat(format!("negative threshold {t}")));
        }
        if !self.params.is_finite() {
            return Err(Error::ModelFormat("non-finite parameter".into()));
        }
        if self.feature_names.len() != d {
            return Err(Error::ModelFormat(format!(
                "{} feature_names for {d} features",
                self.feature_names.len()
            )));
        }
        if let Some(s) = &self.scaling {
            if s.len() + usize::from(self.bias_column.is_some()) != d {
                return Err(Error::ModelFormat(format!(
                    "scaling covers {} features, model has {d} (bias {})",
                    s.len(),
                    if self.bias_column.is_some() { "present" } else { "absent" }
                )));
            }
            if s.min.len() != s.max.len()
                || s.min.iter().zip(&s.max).any(|(lo, hi)| hi < lo)
            {
                return Err(Error::ModelFormat("scaling params with max < min".into()));
            }
        }
        if let Some(b) = self.bias_column {
            if b != d - 1 {
                return Err(Error::ModelFormat(format!(
                    "bias column {b} must be the last feature ({})",
                    d - 1
                )));
            }
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::ModelFormat(format!(
                "negative penalty weights c1={}, c2={}",
                self.c1, self.c2
            )));
        }
        Ok(())
    }

    /// Brings raw features into model space: applies stored scaling, then
    /// appends the bias column if the model was trained with one. The
    /// input must be unscaled and bias-free — exactly what the training
    /// CLI read from disk.
    pub fn prepare_features(&self, ds: &Dataset) -> Result<Dataset> {
        let raw_dim = self.dim() - usize::from(self.bias_column.is_some());
        if ds.dim() != raw_dim {
            return Err(Error::Shape(format!(
                "data has {} features, model expects {raw_dim} before bias",
                ds.dim()
            )));
        }
        let scaled = match &self.scaling {
            Some(params) => crate::data::apply_scale(ds, params)?,
            None => ds.clone(),
        };
        if self.bias_column.is_some() {
            scaled.append_bias()
        } else {
            Ok(scaled)
        }
    }
}

/// Which rule produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionSource {
    /// 0-based index of the claiming agent.
    Agent(usize),
    Blackbox,
}

/// A single hybrid decision with its evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionOutcome {
    /// 0-based predicted class.
    pub label: usize,
    pub source: PredictionSource,
    pub scores: Array1<f64>,
    /// margins[k] = scores[k] − max_{j≠k} scores[j]; agent k claims iff
    /// margins[k] ≥ θ_k.
    pub margins: Array1<f64>,
}

/// Raw agent scores `w_kᵀx`.
pub fn predict_scores(params: &ModelParams, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    if x.len() != params.dim() {
        return Err(Error::Shape(format!(
            "point has {} features, model has {}",
            x.len(),
            params.dim()
        )));
    }
    Ok(params.w.dot(&x))
}

/// All per-class margins for a score vector.
pub fn margins_of(scores: &Array1<f64>) -> Array1<f64> {
    let k_total = scores.len();
    Array1::from_shape_fn(k_total, |k| {
        let best_other = (0..k_total)
            .filter(|&j| j != k)
            .map(|j| scores[j])
            .fold(f64::NEG_INFINITY, f64::max);
        scores[k] - best_other
    })
}

/// The claiming agent for a score vector, if any: the tie-break-first class
/// whose margin clears its threshold.
pub fn claimant(params: &ModelParams, scores: &Array1<f64>, _tie_break: TieBreak) -> Option<usize> {
    let margins = margins_of(scores);
    (0..params.num_classes()).find(|&k| margins[k] >= params.theta[k])
}

/// One hybrid decision: claim by the rule above or fall back to the
/// supplied black-box label (0-based).
pub fn predict_hybrid(
    model: &HybridModel,
    x: ArrayView1<'_, f64>,
    bb_label: usize,
) -> Result<PredictionOutcome> {
    if bb_label >= model.num_classes() {
        return Err(Error::InvalidArgument(format!(
            "black-box label {} outside 1..={}",
            bb_label + 1,
            model.num_classes()
        )));
    }
    let scores = predict_scores(&model.params, x)?;
    let margins = margins_of(&scores);
    let outcome = match claimant(&model.params, &scores, model.tie_break) {
        Some(k) => PredictionOutcome {
            label: k,
            source: PredictionSource::Agent(k),
            scores,
            margins,
        },
        None => PredictionOutcome {
            label: bb_label,
            source: PredictionSource::Blackbox,
            scores,
            margins,
        },
    };
    Ok(outcome)
}

/// Fraction of rows some agent claims.
pub fn transparency(model: &HybridModel, features: &Array2<f64>) -> Result<f64> {
    if features.nrows() == 0 {
        return Err(Error::InvalidArgument(
            "transparency is undefined on an empty matrix".into(),
        ));
    }
    if features.ncols() != model.dim() {
        return Err(Error::Shape(format!(
            "data has {} features, model has {}",
            features.ncols(),
            model.dim()
        )));
    }
    let scores = features.dot(&model.params.w.t());
    let mut claimed = 0usize;
    for row in scores.rows() {
        let row = row.to_owned();
        if claimant(&model.params, &row, model.tie_break).is_some() {
            claimed += 1;
        }
    }
    Ok(claimed as f64 / features.nrows() as f64)
}

/// Quality and behavior measures of a hybrid model on labelled data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub n: usize,
    pub n_claimed: usize,
    pub n_claimed_correct: usize,
    pub n_deferred_correct: usize,
    pub accuracy: f64,
    /// Claimed fraction.
    pub transparency: f64,
    /// Convention: 0 when the corresponding region is empty.
    pub accuracy_on_claimed: f64,
    pub accuracy_on_deferred: f64,
    /// Count of |w| > [`ZERO_TOL`] over all entries, divided by K.
    pub avg_nonzeros: f64,
    /// Fraction of all rows claimed by each agent; sums to transparency.
    pub per_class_claim_rate: Vec<f64>,
}

/// Coefficient-count sparsity measure: nonzeros per agent.
pub fn avg_nonzeros(w: &Array2<f64>) -> f64 {
    let nonzero = w.iter().filter(|v| v.abs() > ZERO_TOL).count();
    nonzero as f64 / w.nrows() as f64
}

/// Runs the hybrid over a labelled dataset with its aligned black-box
/// predictions. Features must already be in model space (see
/// [`HybridModel::prepare_features`]).
pub fn evaluate(model: &HybridModel, ds: &Dataset, bb: &BlackboxPredictions) -> Result<Metrics> {
    let n = ds.n();
    if bb.len() != n {
        return Err(Error::Shape(format!(
            "{} black-box predictions for {n} rows",
            bb.len()
        )));
    }
    if ds.dim() != model.dim() {
        return Err(Error::Shape(format!(
            "data has {} features, model has {}",
            ds.dim(),
            model.dim()
        )));
    }
    let k_total = model.num_classes();
    if let Some(&y) = ds.labels().iter().find(|&&y| y >= k_total) {
        return Err(Error::InvalidArgument(format!(
            "label {} outside the model's 1..={k_total}",
            y + 1
        )));
    }
    if let Some(&p) = bb.preds().iter().find(|&&p| p >= k_total) {
        return Err(Error::InvalidArgument(format!(
            "black-box prediction {} outside the model's 1..={k_total}",
            p + 1
        )));
    }

    let scores = ds.features().dot(&model.params.w.t());
    let mut n_claimed = 0usize;
    let mut n_claimed_correct = 0usize;
    let mut n_deferred_correct = 0usize;
    let mut claims_per_class = vec![0usize; k_total];
    for (i, (&y, &p)) in ds.labels().iter().zip(bb.preds()).enumerate() {
        let row = scores.row(i).to_owned();
        match claimant(&model.params, &row, model.tie_break) {
            Some(k) => {
                n_claimed += 1;
                claims_per_class[k] += 1;
                if k == y {
                    n_claimed_correct += 1;
                }
            }
            None => {
                if p == y {
                    n_deferred_correct += 1;
                }
            }
        }
    }
    let n_deferred = n - n_claimed;
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(Metrics {
        n,
        n_claimed,
        n_claimed_correct,
        n_deferred_correct,
        accuracy: (n_claimed_correct + n_deferred_correct) as f64 / n as f64,
        transparency: n_claimed as f64 / n as f64,
        accuracy_on_claimed: ratio(n_claimed_correct, n_claimed),
        accuracy_on_deferred: ratio(n_deferred_correct, n_deferred),
        avg_nonzeros: avg_nonzeros(&model.params.w),
        per_class_claim_rate: claims_per_class
            .iter()
            .map(|&c| c as f64 / n as f64)
            .collect(),
    })
}

/// On-disk layout. Field order here is the field order in the file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    num_classes: usize,
    dim: usize,
    phi: PhiKind,
    c1: f64,
    c2: f64,
    tie_break: TieBreak,
    feature_names: Vec<String>,
    #[serde(default)]
    bias_column: Option<usize>,
    #[serde(default)]
    scaling: Option<ScalingParams>,
    w: Vec<Vec<f64>>,
    theta: Vec<f64>,
    provenance: Provenance,
}

/// Writes the model as pretty-printed JSON. f64 values are emitted in the
/// shortest representation that parses back to the identical bits, so a
/// round trip is exact.
pub fn save_model(model: &HybridModel, path: &Path) -> Result<()> {
    model.validate()?;
    let file = ModelFile {
        version: MODEL_SCHEMA_VERSION,
        num_classes: model.num_classes(),
        dim: model.dim(),
        phi: model.phi,
        c1: model.c1,
        c2: model.c2,
        tie_break: model.tie_break,
        feature_names: model.feature_names.clone(),
        bias_column: model.bias_column,
        scaling: model.scaling.clone(),
        w: model.params.w.rows().into_iter().map(|r| r.to_vec()).collect(),
        theta: model.params.theta.to_vec(),
        provenance: model.provenance.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::ModelFormat(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<HybridModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))?;
    if file.version != MODEL_SCHEMA_VERSION {
        return Err(Error::ModelFormat(format!(
            "{}: schema version {} not supported (this build reads {MODEL_SCHEMA_VERSION})",
            path.display(),
            file.version
        )));
    }
    if file.w.len() != file.num_classes || file.w.iter().any(|row| row.len() != file.dim) {
        return Err(Error::ModelFormat(format!(
            "{}: w is not a {}x{} matrix",
            path.display(),
            file.num_classes,
            file.dim
        )));
    }
    if file.theta.len() != file.num_classes {
        return Err(Error::ModelFormat(format!(
            "{}: theta has {} entries for {} classes",
            path.display(),
            file.theta.len(),
            file.num_classes
        )));
    }
    let w = Array2::from_shape_vec(
        (file.num_classes, file.dim),
        file.w.into_iter().flatten().collect(),
    )
    .expect("dimensions just checked");
    let model = HybridModel {
        params: ModelParams {
            w,
            theta: Array1::from_vec(file.theta),
        },
        feature_names: file.feature_names,
        scaling: file.scaling,
        bias_column: file.bias_column,
        phi: file.phi,
        c1: file.c1,
        c2: file.c2,
        tie_break: file.tie_break,
        provenance: file.provenance,
    };
    model
        .validate()
        .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))?;
    Ok(model)
}
