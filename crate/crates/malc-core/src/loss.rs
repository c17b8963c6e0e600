//! Margin losses φ, the per-class competition loss, its gradient, and the
//! full regularized objective.
//!
//! The data-fit term averages, over both correctness branches of the index
//! partition, the φ-penalized pairwise margins of the true class's agent
//! against every other agent:
//!
//! ```text
//! L = (1/n) [ Σ_k Σ_{i ∈ pos_k} Σ_{j≠k} φ(w_kᵀx_i − w_jᵀx_i + θ_j)
//!           + Σ_k Σ_{i ∈ neg_k} Σ_{j≠k} φ(w_kᵀx_i − w_jᵀx_i − θ_k) ]
//! ```
//!
//! Rows the black-box already gets right (`pos`) push competitors' margins
//! past their thresholds θ_j so those agents stay quiet; rows it gets wrong
//! (`neg`) push the true agent's margin past its own θ_k so it claims them.
//! The full objective adds `c1·Σθ_k + c2·‖w‖₁`; both penalty terms are
//! non-smooth and live in the proximal step, so [`loss_grad`] covers only
//! the term above.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{ClassPartition, Dataset};
use crate::error::{Error, Result};

/// Margin loss families. Plain hinge is evaluation-only: the solver needs a
/// gradient everywhere and rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiKind {
    Hinge,
    SmoothHinge,
    Logistic,
}

impl PhiKind {
    pub fn is_smooth(self) -> bool {
        !matches!(self, PhiKind::Hinge)
    }

    /// Upper bound on φ″, used for safe step sizes. Hinge has none.
    pub fn curvature_bound(self) -> Option<f64> {
        match self {
            PhiKind::Hinge => None,
            PhiKind::SmoothHinge => Some(1.0),
            PhiKind::Logistic => Some(0.25),
        }
    }
}

impl std::fmt::Display for PhiKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhiKind::Hinge => "hinge",
            PhiKind::SmoothHinge => "smooth_hinge",
            PhiKind::Logistic => "logistic",
        })
    }
}

impl std::str::FromStr for PhiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hinge" => Ok(PhiKind::Hinge),
            "smooth_hinge" | "smooth-hinge" => Ok(PhiKind::SmoothHinge),
            "logistic" => Ok(PhiKind::Logistic),
            other => Err(Error::InvalidArgument(format!(
                "unknown phi {other:?}; expected hinge, smooth_hinge, or logistic"
            ))),
        }
    }
}

/// The optimization variable: K weight rows plus K nonnegative thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// K×d; row k scores class k as `w_kᵀx`.
    pub w: Array2<f64>,
    /// Length K; θ_k ≥ 0 after every proximal step (momentum trial points
    /// may dip below before the prox restores feasibility).
    pub theta: Array1<f64>,
}

impl ModelParams {
    pub fn zeros(num_classes: usize, dim: usize) -> Self {
        ModelParams {
            w: Array2::zeros((num_classes, dim)),
            theta: Array1::zeros(num_classes),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.w.nrows()
    }

    pub fn dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn is_finite(&self) -> bool {
        self.w.iter().all(|v| v.is_finite()) && self.theta.iter().all(|v| v.is_finite())
    }
}

/// Weights of the two penalty terms plus the margin loss they wrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveConfig {
    /// Threshold penalty weight: larger pushes θ toward 0, i.e. toward
    /// claiming more rows.
    pub c1: f64,
    /// L1 weight on w: larger prunes coefficients.
    pub c2: f64,
    pub phi: PhiKind,
    /// When false (the default), a bias column is exempt from the L1 term.
    pub penalize_bias: bool,
}

impl ObjectiveConfig {
    pub fn new(c1: f64, c2: f64, phi: PhiKind) -> Result<Self> {
        if !(c1 >= 0.0 && c1.is_finite()) || !(c2 >= 0.0 && c2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "penalty weights must be finite and nonnegative, got c1={c1}, c2={c2}"
            )));
        }
        Ok(ObjectiveConfig {
            c1,
            c2,
            phi,
            penalize_bias: false,
        })
    }

    /// Column of w that the L1 term skips for the given dataset.
    pub fn l1_skip_column(&self, ds: &Dataset) -> Option<usize> {
        if self.penalize_bias {
            None
        } else {
            ds.bias_column()
        }
    }
}

/// Gradient of the margin loss alone (penalties are handled proximally).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub d_w: Array2<f64>,
    pub d_theta: Array1<f64>,
}

/// φ(z).
pub fn phi_eval(kind: PhiKind, z: f64) -> f64 {
    match kind {
        PhiKind::Hinge => (1.0 - z).max(0.0),
        PhiKind::SmoothHinge => {
            let t = (1.0 - z).max(0.0);
            0.5 * t * t
        }
        // log(1 + exp(-z)) without overflow on either tail.
        PhiKind::Logistic => {
            if z >= 0.0 {
                (-z).exp().ln_1p()
            } else {
                -z + z.exp().ln_1p()
            }
        }
    }
}

/// φ′(z) for the differentiable kinds; hinge is rejected.
pub fn phi_grad(kind: PhiKind, z: f64) -> Result<f64> {
    if !kind.is_smooth() {
        return Err(Error::NonSmoothPhi(kind));
    }
    Ok(smooth_phi_grad(kind, z))
}

fn smooth_phi_grad(kind: PhiKind, z: f64) -> f64 {
    match kind {
        PhiKind::SmoothHinge => -(1.0 - z).max(0.0),
        // -1 / (1 + exp(z)), evaluated on whichever side keeps exp small.
        PhiKind::Logistic => {
            if z >= 0.0 {
                let e = (-z).exp();
                -e / (1.0 + e)
            } else {
                -1.0 / (1.0 + z.exp())
            }
        }
        PhiKind::Hinge => unreachable!("smoothness checked by callers"),
    }
}

fn check_shapes(params: &ModelParams, ds: &Dataset, part: &ClassPartition) -> Result<()> {
    let (k, d) = params.w.dim();
    if d != ds.dim() {
        return Err(Error::Shape(format!(
            "w has {d} features, dataset has {}",
            ds.dim()
        )));
    }
    if k != ds.num_classes() {
        return Err(Error::Shape(format!(
            "w has {k} classes, dataset has {}",
            ds.num_classes()
        )));
    }
    if params.theta.len() != k {
        return Err(Error::Shape(format!(
            "theta has {} entries for {k} classes",
            params.theta.len()
        )));
    }
    if part.n() != ds.n() || part.num_classes() != ds.num_classes() {
        return Err(Error::Shape(format!(
            "partition covers {} rows / {} classes, dataset has {} / {}",
            part.n(),
            part.num_classes(),
            ds.n(),
            ds.num_classes()
        )));
    }
    Ok(())
}

/// The margin loss. Scores are computed once as `X·Wᵀ`; the remaining work
/// is a linear pass over partition entries with an inner loop over the K−1
/// competitors.
pub fn loss_eval(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    phi: PhiKind,
) -> Result<f64> {
    check_shapes(params, ds, part)?;
    let scores = ds.features().dot(&params.w.t());
    let k_total = params.num_classes();
    let theta = &params.theta;
    let mut total = 0.0;
    for k in 0..k_total {
        for &i in part.pos(k) {
            let s_ik = scores[[i, k]];
            for j in 0..k_total {
                if j != k {
                    total += phi_eval(phi, s_ik - scores[[i, j]] + theta[j]);
                }
            }
        }
        for &i in part.neg(k) {
            let s_ik = scores[[i, k]];
            let t_k = theta[k];
            for j in 0..k_total {
                if j != k {
                    total += phi_eval(phi, s_ik - scores[[i, j]] - t_k);
                }
            }
        }
    }
    Ok(total / ds.n() as f64)
}

/// Analytic gradient of [`loss_eval`]. Each term contributes `g = φ′(s)/n`
/// to a per-row coefficient matrix (column k gets `+g`, column j gets `−g`)
/// so that `d_w = Aᵀ·X`; θ picks up `+g` on the competing class in the
/// first branch and `−g` on the own class in the second.
pub fn loss_grad(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    phi: PhiKind,
) -> Result<Gradient> {
    Ok(loss_value_and_grad(params, ds, part, phi)?.1)
}

/// Loss and gradient in one pass over the data — the solver's hot path.
pub fn loss_value_and_grad(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    phi: PhiKind,
) -> Result<(f64, Gradient)> {
    if !phi.is_smooth() {
        return Err(Error::NonSmoothPhi(phi));
    }
    check_shapes(params, ds, part)?;
    let n = ds.n();
    let k_total = params.num_classes();
    let scores = ds.features().dot(&params.w.t());
    let theta = &params.theta;
    let inv_n = 1.0 / n as f64;

    let mut total = 0.0;
    let mut coeff = Array2::<f64>::zeros((n, k_total));
    let mut d_theta = Array1::<f64>::zeros(k_total);
    for k in 0..k_total {
        for &i in part.pos(k) {
            let s_ik = scores[[i, k]];
            for j in 0..k_total {
                if j != k {
                    let s = s_ik - scores[[i, j]] + theta[j];
                    total += phi_eval(phi, s);
                    let g = smooth_phi_grad(phi, s) * inv_n;
                    coeff[[i, k]] += g;
                    coeff[[i, j]] -= g;
                    d_theta[j] += g;
                }
            }
        }
        for &i in part.neg(k) {
            let s_ik = scores[[i, k]];
            let t_k = theta[k];
            for j in 0..k_total {
                if j != k {
                    let s = s_ik - scores[[i, j]] - t_k;
                    total += phi_eval(phi, s);
                    let g = smooth_phi_grad(phi, s) * inv_n;
                    coeff[[i, k]] += g;
                    coeff[[i, j]] -= g;
                    d_theta[k] -= g;
                }
            }
        }
    }
    let d_w = coeff.t().dot(ds.features());
    Ok((total * inv_n, Gradient { d_w, d_theta }))
}

/// `‖w‖₁`, optionally skipping one column (the bias).
pub fn l1_norm(w: &Array2<f64>, skip_column: Option<usize>) -> f64 {
    match skip_column {
        None => w.iter().map(|v| v.abs()).sum(),
        Some(col) => w
            .columns()
            .into_iter()
            .enumerate()
            .filter(|(j, _)| *j != col)
            .map(|(_, c)| c.iter().map(|v| v.abs()).sum::<f64>())
            .sum(),
    }
}

/// The full objective: margin loss plus `c1·Σθ_k + c2·‖w‖₁`. Requires a
/// feasible θ.
pub fn objective_eval(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    cfg: &ObjectiveConfig,
) -> Result<f64> {
    if let Some(t) = params.theta.iter().find(|&&t| t < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "objective requires theta >= 0, got entry {t}"
        )));
    }
    let loss = loss_eval(params, ds, part, cfg.phi)?;
    let penalty =
        cfg.c1 * params.theta.sum() + cfg.c2 * l1_norm(&params.w, cfg.l1_skip_column(ds));
    Ok(loss + penalty)
}
