//! (c1, c2) grid sweeps and the accuracy-vs-transparency frontier.
//!
//! For each c1, c2 is chosen by an 80/20 holdout on the training data, the
//! model is refit on all of it with the winning pair, and the full-data
//! metrics become one frontier point. Sweeping c1 from small to large
//! makes thresholds ever more expensive, walking the hybrid from deferring
//! almost everything toward claiming almost everything.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{holdout_split, BlackboxPredictions, Dataset, SplitMode};
use crate::error::{Error, Result};
use crate::loss::{ModelParams, ObjectiveConfig, PhiKind};
use crate::model::{evaluate, HybridModel, Metrics};
use crate::optimizer::{apg_fit, SolverConfig};

/// Grid point spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridSpacing {
    #[default]
    Log,
    Linear,
}

/// `count` points covering [lo, hi] under the given spacing. Log spacing
/// needs a positive lo.
pub fn spaced_values(lo: f64, hi: f64, count: usize, spacing: GridSpacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("grid needs at least 1 point".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "grid range [{lo}, {hi}] must be finite, nonnegative, and ordered"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    if matches!(spacing, GridSpacing::Log) && lo <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "log spacing needs a positive lower bound, got {lo}"
        )));
    }
    let steps = (count - 1) as f64;
    let values = (0..count)
        .map(|i| {
            let t = i as f64 / steps;
            match spacing {
                GridSpacing::Linear => lo + t * (hi - lo),
                GridSpacing::Log => lo * (hi / lo).powf(t),
            }
        })
        .collect();
    Ok(values)
}

/// The pairs a sweep visits: every c1 crossed with the same c2 candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    c1_values: Vec<f64>,
    c2_candidates: Vec<f64>,
}

impl SweepGrid {
    /// Validates and sorts c1 ascending; duplicate c1 values collapse.
    pub fn new(mut c1_values: Vec<f64>, c2_candidates: Vec<f64>) -> Result<Self> {
        if c1_values.is_empty() || c2_candidates.is_empty() {
            return Err(Error::InvalidArgument(
                "both c1 and c2 grids must be non-empty".into(),
            ));
        }
        for &v in c1_values.iter().chain(&c2_candidates) {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "grid values must be finite and nonnegative, got {v}"
                )));
            }
        }
        c1_values.sort_by(f64::total_cmp);
        c1_values.dedup();
        Ok(SweepGrid {
            c1_values,
            c2_candidates,
        })
    }

    /// 12 log-spaced c1 values in [0.005, 0.95] by 4 log-spaced c2
    /// candidates in [0.03, 0.25].
    pub fn log_default() -> Self {
        SweepGrid {
            c1_values: spaced_values(0.005, 0.95, 12, GridSpacing::Log).expect("valid range"),
            c2_candidates: spaced_values(0.03, 0.25, 4, GridSpacing::Log).expect("valid range"),
        }
    }

    pub fn c1_values(&self) -> &[f64] {
        &self.c1_values
    }

    pub fn c2_candidates(&self) -> &[f64] {
        &self.c2_candidates
    }
}

/// Everything a sweep needs besides the grid and solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid: SweepGrid,
    pub phi: PhiKind,
    pub penalize_bias: bool,
    /// Share of the training data held out for c2 selection.
    pub validation_fraction: f64,
    pub split_mode: SplitMode,
    pub seed: u64,
    /// Initialize each refit from the previous c1 point's parameters.
    /// Convexity makes this a speed knob, not a result knob.
    pub warm_start: bool,
}

impl SweepConfig {
    pub fn new(grid: SweepGrid, phi: PhiKind, seed: u64) -> Self {
        SweepConfig {
            grid,
            phi,
            penalize_bias: false,
            validation_fraction: 0.2,
            split_mode: SplitMode::Uniform,
            seed,
            warm_start: false,
        }
    }
}

/// The winning candidate of one holdout selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C2Selection {
    pub c2: f64,
    pub validation_accuracy: f64,
    /// Candidates whose fit diverged and were skipped.
    pub skipped: usize,
}

/// Builds the per-candidate objective for a sweep point.
fn point_objective(cfg: &SweepConfig, c1: f64, c2: f64) -> Result<ObjectiveConfig> {
    let mut obj = ObjectiveConfig::new(c1, c2, cfg.phi)?;
    obj.penalize_bias = cfg.penalize_bias;
    Ok(obj)
}

fn fit_and_score(
    train: (&Dataset, &BlackboxPredictions),
    val: (&Dataset, &BlackboxPredictions),
    obj: &ObjectiveConfig,
    solver: &SolverConfig,
) -> Result<f64> {
    let part = crate::data::partition_indices(train.0, train.1)?;
    let fit = apg_fit(train.0, &part, obj, solver, None)?;
    let model = HybridModel::new(fit.params, obj.phi, obj.c1, obj.c2)?;
    Ok(evaluate(&model, val.0, val.1)?.accuracy)
}

/// Fits one model per c2 candidate on the holdout's training side, scores
/// hybrid accuracy on its validation side, and returns the best candidate;
/// accuracy ties go to the larger c2 (the sparser model). Candidates whose
/// fits diverge are skipped; only all of them failing is an error.
pub fn select_c2(
    ds: &Dataset,
    bb: &BlackboxPredictions,
    c1: f64,
    c2_candidates: &[f64],
    cfg: &SweepConfig,
    solver: &SolverConfig,
) -> Result<C2Selection> {
    if c2_candidates.is_empty() {
        return Err(Error::InvalidArgument("no c2 candidates".into()));
    }
    let ((train_ds, train_bb), (val_ds, val_bb)) = holdout_split(
        ds,
        bb,
        cfg.validation_fraction,
        cfg.seed,
        cfg.split_mode,
    )?;
    let mut best: Option<(f64, f64)> = None; // (accuracy, c2)
    let mut skipped = 0usize;
    let mut last_error = String::new();
    for &c2 in c2_candidates {
        let obj = point_objective(cfg, c1, c2)?;
        match fit_and_score((&train_ds, &train_bb), (&val_ds, &val_bb), &obj, solver) {
            Ok(accuracy) => {
                let better = match best {
                    None => true,
                    Some((best_acc, best_c2)) => {
                        accuracy > best_acc || (accuracy == best_acc && c2 > best_c2)
                    }
                };
                if better {
                    best = Some((accuracy, c2));
                }
            }
            Err(Error::Divergence(msg)) => {
                skipped += 1;
                last_error = msg;
            }
            Err(other) => return Err(other),
        }
    }
    match best {
        Some((validation_accuracy, c2)) => Ok(C2Selection {
            c2,
            validation_accuracy,
            skipped,
        }),
        None => Err(Error::AllCandidatesFailed(format!(
            "all {} c2 candidates diverged at c1={c1}; last: {last_error}",
            c2_candidates.len()
        ))),
    }
}

/// Iterations/convergence record of the refit behind a frontier point, or
/// the reason there is no model for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

/// One c1 entry of the frontier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub c1: f64,
    /// Absent when every candidate failed at this c1.
    pub c2_selected: Option<f64>,
    pub validation_accuracy: Option<f64>,
    pub metrics: Option<Metrics>,
    pub fit: FitSummary,
}

/// A full sweep's outcome: one point per c1, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frontier {
    pub points: Vec<FrontierPoint>,
    pub dataset_sha256: Option<String>,
    pub blackbox_sha256: Option<String>,
    pub seed: u64,
}

fn sweep_point(
    ds: &Dataset,
    bb: &BlackboxPredictions,
    c1: f64,
    cfg: &SweepConfig,
    solver: &SolverConfig,
    init: Option<ModelParams>,
) -> (FrontierPoint, Option<ModelParams>) {
    let failed = |msg: String| FrontierPoint {
        c1,
        c2_selected: None,
        validation_accuracy: None,
        metrics: None,
        fit: FitSummary {
            iterations: 0,
            converged: false,
            error: Some(msg),
        },
    };
    let selection = match select_c2(ds, bb, c1, cfg.grid.c2_candidates(), cfg, solver) {
        Ok(s) => s,
        Err(e) => return (failed(e.to_string()), None),
    };
    let refit = (|| -> Result<(FrontierPoint, ModelParams)> {
        let obj = point_objective(cfg, c1, selection.c2)?;
        let part = crate::data::partition_indices(ds, bb)?;
        let fit = apg_fit(ds, &part, &obj, solver, init)?;
        let model = HybridModel::new(fit.params.clone(), obj.phi, obj.c1, obj.c2)?;
        let metrics = evaluate(&model, ds, bb)?;
        Ok((
            FrontierPoint {
                c1,
                c2_selected: Some(selection.c2),
                validation_accuracy: Some(selection.validation_accuracy),
                metrics: Some(metrics),
                fit: FitSummary {
                    iterations: fit.iterations_run,
                    converged: fit.converged,
                    error: None,
                },
            },
            fit.params,
        ))
    })();
    match refit {
        Ok((point, params)) => (point, Some(params)),
        Err(e) => (failed(e.to_string()), None),
    }
}

/// Sweeps c1 ascending: select c2, refit on the full data, evaluate.
/// Points are independent and run on the rayon pool unless warm starting
/// chains them; output order is by c1 either way, so results do not
/// depend on worker count.
pub fn sweep(
    ds: &Dataset,
    bb: &BlackboxPredictions,
    cfg: &SweepConfig,
    solver: &SolverConfig,
) -> Result<Frontier> {
    if bb.len() != ds.n() {
        return Err(Error::Shape(format!(
            "{} black-box predictions for {} rows",
            bb.len(),
            ds.n()
        )));
    }
    let points: Vec<FrontierPoint> = if cfg.warm_start {
        let mut acc = Vec::with_capacity(cfg.grid.c1_values().len());
        let mut carry: Option<ModelParams> = None;
        for &c1 in cfg.grid.c1_values() {
            let (point, params) = sweep_point(ds, bb, c1, cfg, solver, carry.take());
            carry = params;
            acc.push(point);
        }
        acc
    } else {
        cfg.grid
            .c1_values()
            .par_iter()
            .map(|&c1| sweep_point(ds, bb, c1, cfg, solver, None).0)
            .collect()
    };
    Ok(Frontier {
        points,
        dataset_sha256: None,
        blackbox_sha256: None,
        seed: cfg.seed,
    })
}

/// Writes the frontier as CSV, one row per c1 point. Reals are printed in
/// shortest-round-trip form, so parsing the file back reproduces them
/// exactly; failed points leave their value columns empty.
pub fn export_frontier(frontier: &Frontier, path: &Path) -> Result<()> {
    if frontier.points.is_empty() {
        return Err(Error::InvalidArgument("frontier has no points".into()));
    }
    let mut out = String::from("c1,c2,transparency,accuracy,avg_nonzeros,validation_accuracy,converged\n");
    for p in &frontier.points {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.c1,
            opt(p.c2_selected),
            opt(p.metrics.as_ref().map(|m| m.transparency)),
            opt(p.metrics.as_ref().map(|m| m.accuracy)),
            opt(p.metrics.as_ref().map(|m| m.avg_nonzeros)),
            opt(p.validation_accuracy),
            p.fit.converged,
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
