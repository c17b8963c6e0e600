//! Accelerated proximal gradient for the penalized objective.
//!
//! The smooth part (the margin loss) gets a momentum-extrapolated gradient
//! step; the non-smooth part (`c1·Σθ` with θ ≥ 0, and `c2·‖w‖₁`) is handled
//! by closed-form proximal maps. The local Lipschitz estimate is found by
//! backtracking: double until the quadratic upper bound holds at the prox
//! point, then halve once after each successful iteration so the step can
//! recover.
//!
//! Restart policy: when the extrapolated step would increase the objective,
//! the iteration is redone as a plain proximal step from the current point
//! and the momentum schedule resets. The redo can only descend, which is
//! what makes the recorded objective trace monotone.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use ndarray::{Array1, Array2, Zip};

use crate::data::{ClassPartition, Dataset};
use crate::error::{Error, Result};
use crate::loss::{
    l1_norm, loss_eval, loss_value_and_grad, objective_eval, Gradient, ModelParams,
    ObjectiveConfig,
};

/// Knobs of the solver loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative objective-change threshold (0.001 = 0.1%).
    pub rel_tol: f64,
    /// Consecutive iterations the relative-change test must hold.
    pub tol_window: usize,
    pub initial_lipschitz_guess: f64,
    pub backtrack_factor: f64,
    /// Reset momentum whenever the objective would increase.
    pub restart: bool,
    /// Recorded for provenance; the solver itself draws no randomness.
    pub seed: u64,
    /// Keep θ at its initial value: the pure one-vs-all baseline when
    /// initialized at θ = 0.
    pub freeze_theta: bool,
    /// When set, one CSV line per iteration: `iter,objective,lipschitz,restarted`.
    pub trace_path: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 10_000,
            rel_tol: 1e-3,
            tol_window: 5,
            initial_lipschitz_guess: 1.0,
            backtrack_factor: 2.0,
            restart: true,
            seed: 0,
            freeze_theta: false,
            trace_path: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.tol_window < 1 {
            return Err(Error::InvalidArgument("tol_window must be >= 1".into()));
        }
        if !(self.initial_lipschitz_guess > 0.0 && self.initial_lipschitz_guess.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "initial_lipschitz_guess must be positive, got {}",
                self.initial_lipschitz_guess
            )));
        }
        if !(self.backtrack_factor > 1.0 && self.backtrack_factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "backtrack_factor must exceed 1, got {}",
                self.backtrack_factor
            )));
        }
        Ok(())
    }
}

/// What a fit returns.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: ModelParams,
    /// Objective at the initial point followed by each accepted iterate.
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Seconds spent in the loop. Informational only — never serialized
    /// into artifacts, which must be reproducible byte-for-byte.
    pub wall_time: f64,
    /// Lipschitz estimate accepted on the final iteration; 1/this is the
    /// step length for optimality-residual checks.
    pub last_lipschitz: f64,
}

impl FitResult {
    pub fn final_objective(&self) -> f64 {
        *self
            .objective_trace
            .last()
            .expect("trace always holds the initial objective")
    }
}

/// Soft-thresholding prox of `step·c2·‖·‖₁`, applied elementwise; the
/// column in `skip_column` (a bias) passes through unchanged.
pub fn prox_w(v: &Array2<f64>, step: f64, c2: f64, skip_column: Option<usize>) -> Array2<f64> {
    let tau = step * c2;
    let mut out = v.mapv(|x| soft_threshold(x, tau));
    if let Some(col) = skip_column {
        out.column_mut(col).assign(&v.column(col));
    }
    out
}

fn soft_threshold(x: f64, tau: f64) -> f64 {
    let mag = x.abs() - tau;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

/// Prox of `step·c1·Σθ` under θ ≥ 0: shift down, clamp at zero.
pub fn prox_theta(v: &Array1<f64>, step: f64, c1: f64) -> Array1<f64> {
    let shift = step * c1;
    v.mapv(|x| (x - shift).max(0.0))
}

/// One accepted backtracking step.
#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub accepted_l: f64,
    pub candidate: ModelParams,
    /// Margin loss at the candidate, reusable as the next objective's
    /// smooth part.
    pub smooth_value: f64,
}

/// Finds the smallest `current_l · factor^m` whose quadratic upper bound
/// holds at the prox point and returns that point. Errors after 60
/// increases — the smooth part is then effectively not L-smooth at this
/// scale (divergence).
#[allow(clippy::too_many_arguments)] // one solver step's full state, in order
pub fn line_search(
    y: &ModelParams,
    smooth_at_y: f64,
    grad: &Gradient,
    ds: &Dataset,
    part: &ClassPartition,
    cfg: &ObjectiveConfig,
    solver: &SolverConfig,
    current_l: f64,
) -> Result<LineSearchOutcome> {
    if !current_l.is_finite() || current_l <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "line search needs a positive Lipschitz estimate, got {current_l}"
        )));
    }
    let skip = cfg.l1_skip_column(ds);
    // Absolute slack so floating-point noise at a near-stationary point
    // cannot force spurious doublings.
    let slack = 1e-12 * smooth_at_y.abs().max(1.0);
    let mut l = current_l;
    for _ in 0..=60 {
        let step = 1.0 / l;
        let candidate = prox_step(y, grad, step, cfg, solver, skip);
        let smooth_at_c = loss_eval(&candidate, ds, part, cfg.phi)?;
        let (descent, dist_sq) = first_order_terms(grad, &candidate, y);
        let bound = smooth_at_y + descent + 0.5 * l * dist_sq + slack;
        if smooth_at_c.is_finite() && smooth_at_c <= bound {
            return Ok(LineSearchOutcome {
                accepted_l: l,
                candidate,
                smooth_value: smooth_at_c,
            });
        }
        l *= solver.backtrack_factor;
    }
    Err(Error::Divergence(format!(
        "backtracking exhausted 60 increases from L={current_l}; \
         the objective is not finite or not smooth on this data"
    )))
}

fn prox_step(
    y: &ModelParams,
    grad: &Gradient,
    step: f64,
    cfg: &ObjectiveConfig,
    solver: &SolverConfig,
    skip: Option<usize>,
) -> ModelParams {
    let w = prox_w(&(&y.w - &(step * &grad.d_w)), step, cfg.c2, skip);
    let theta = if solver.freeze_theta {
        y.theta.clone()
    } else {
        prox_theta(&(&y.theta - &(step * &grad.d_theta)), step, cfg.c1)
    };
    ModelParams { w, theta }
}

/// `⟨∇, c − y⟩` and `‖c − y‖²` over both parameter blocks.
fn first_order_terms(grad: &Gradient, c: &ModelParams, y: &ModelParams) -> (f64, f64) {
    let mut descent = 0.0;
    let mut dist_sq = 0.0;
    Zip::from(&c.w).and(&y.w).and(&grad.d_w).for_each(|&cv, &yv, &g| {
        let d = cv - yv;
        descent += g * d;
        dist_sq += d * d;
    });
    Zip::from(&c.theta)
        .and(&y.theta)
        .and(&grad.d_theta)
        .for_each(|&cv, &yv, &g| {
            let d = cv - yv;
            descent += g * d;
            dist_sq += d * d;
        });
    (descent, dist_sq)
}

fn penalty(params: &ModelParams, cfg: &ObjectiveConfig, skip: Option<usize>) -> f64 {
    cfg.c1 * params.theta.sum() + cfg.c2 * l1_norm(&params.w, skip)
}

/// Norm of the scaled prox-gradient step `‖x − prox(x − η∇L(x))‖ / η` — a
/// stationarity certificate: zero exactly at a minimizer of the objective.
pub fn prox_gradient_residual(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    cfg: &ObjectiveConfig,
    solver: &SolverConfig,
    eta: f64,
) -> Result<f64> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "residual step must be positive, got {eta}"
        )));
    }
    let grad = crate::loss::loss_grad(params, ds, part, cfg.phi)?;
    let skip = cfg.l1_skip_column(ds);
    let moved = prox_step(params, &grad, eta, cfg, solver, skip);
    let (_, dist_sq) = first_order_terms(&grad, &moved, params);
    Ok(dist_sq.sqrt() / eta)
}

/// Minimizes the penalized objective by APG from `init` (zeros when absent).
///
/// Convergence means the relative objective change stayed under
/// `rel_tol` for `tol_window` consecutive iterations; otherwise the loop
/// stops at `max_iters` with `converged = false`.
pub fn apg_fit(
    ds: &Dataset,
    part: &ClassPartition,
    cfg: &ObjectiveConfig,
    solver: &SolverConfig,
    init: Option<ModelParams>,
) -> Result<FitResult> {
    solver.validate()?;
    if !cfg.phi.is_smooth() {
        return Err(Error::NonSmoothPhi(cfg.phi));
    }
    if !(cfg.c1 >= 0.0 && cfg.c2 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "penalty weights must be nonnegative, got c1={}, c2={}",
            cfg.c1, cfg.c2
        )));
    }
    let (k, d) = (ds.num_classes(), ds.dim());
    let x0 = match init {
        Some(p) => {
            if p.num_classes() != k || p.dim() != d {
                return Err(Error::Shape(format!(
                    "init is {}x{}, problem needs {k}x{d}",
                    p.num_classes(),
                    p.dim()
                )));
            }
            if p.theta.iter().any(|&t| t < 0.0) {
                return Err(Error::InvalidArgument(
                    "init theta must be nonnegative".into(),
                ));
            }
            p
        }
        None => ModelParams::zeros(k, d),
    };
    let skip = cfg.l1_skip_column(ds);

    let mut trace_file = match &solver.trace_path {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut out = std::io::BufWriter::new(file);
            writeln!(out, "iter,objective,lipschitz,restarted").map_err(|e| Error::io(path, e))?;
            Some((out, path.clone()))
        }
        None => None,
    };

    let started = Instant::now();
    let mut x = x0;
    let mut x_prev = x.clone();
    let mut f_x = objective_eval(&x, ds, part, cfg)?;
    if !f_x.is_finite() {
        return Err(Error::Divergence(format!(
            "objective is {f_x} at the initial point"
        )));
    }
    let mut trace = Vec::with_capacity(solver.max_iters.min(4096) + 1);
    trace.push(f_x);

    let l_floor = solver.initial_lipschitz_guess * 2f64.powi(-60);
    let mut lipschitz = solver.initial_lipschitz_guess;
    let mut last_accepted_l = lipschitz;
    let mut momentum = 1usize; // iterations since the last restart
    let mut streak = 0usize;
    let mut converged = false;
    let mut iterations_run = 0usize;

    for iter in 1..=solver.max_iters {
        let beta = (momentum as f64 - 1.0) / (momentum as f64 + 2.0);
        let y = ModelParams {
            w: &x.w + &(beta * &(&x.w - &x_prev.w)),
            theta: &x.theta + &(beta * &(&x.theta - &x_prev.theta)),
        };
        let (f_y, grad) = loss_value_and_grad(&y, ds, part, cfg.phi)?;
        let mut outcome = line_search(&y, f_y, &grad, ds, part, cfg, solver, lipschitz)?;
        let mut f_new = outcome.smooth_value + penalty(&outcome.candidate, cfg, skip);

        let mut restarted = false;
        if solver.restart && f_new > f_x {
            // Momentum overshot: redo as a plain prox step from x, which
            // the descent lemma guarantees cannot increase the objective.
            restarted = true;
            momentum = 1;
            let (f_at_x, grad_x) = loss_value_and_grad(&x, ds, part, cfg.phi)?;
            outcome = line_search(&x, f_at_x, &grad_x, ds, part, cfg, solver, outcome.accepted_l)?;
            f_new = outcome.smooth_value + penalty(&outcome.candidate, cfg, skip);
        } else {
            momentum += 1;
        }
        if !f_new.is_finite() || !outcome.candidate.is_finite() {
            return Err(Error::Divergence(format!(
                "objective became {f_new} at iteration {iter}"
            )));
        }

        let rel_change = (f_new - f_x).abs() / f_x.abs().max(1e-12);
        x_prev = x;
        x = outcome.candidate;
        f_x = f_new;
        trace.push(f_x);
        iterations_run = iter;
        last_accepted_l = outcome.accepted_l;
        lipschitz = (outcome.accepted_l * 0.5).max(l_floor);

        if let Some((out, path)) = trace_file.as_mut() {
            writeln!(out, "{iter},{f_x},{},{}", outcome.accepted_l, u8::from(restarted))
                .map_err(|e| Error::io(&**path, e))?;
        }

        if rel_change < solver.rel_tol {
            streak += 1;
            if streak >= solver.tol_window {
                converged = true;
                break;
            }
        } else {
            streak = 0;
        }
    }

    if let Some((mut out, path)) = trace_file {
        out.flush().map_err(|e| Error::io(path, e))?;
    }

    Ok(FitResult {
        params: x,
        objective_trace: trace,
        iterations_run,
        converged,
        wall_time: started.elapsed().as_secs_f64(),
        last_lipschitz: last_accepted_l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::PhiKind;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn two_point_instance() -> (Dataset, ClassPartition) {
        let ds = Dataset::new(array![[1.0], [-1.0]], vec![0, 1], 2).unwrap();
        let part = ClassPartition::build(&[0, 1], &[0, 0], 2).unwrap();
        (ds, part)
    }

    #[test]
    fn prox_w_closed_form() {
        let v = array![[3.0, -0.5], [0.0, 1.0]];
        let out = prox_w(&v, 1.0, 1.0, None);
        assert_eq!(out, array![[2.0, 0.0], [0.0, 0.0]]);
    }

    #[test]
    fn prox_w_skips_bias_column() {
        let v = array![[3.0, -0.5], [-2.0, 0.2]];
        let out = prox_w(&v, 1.0, 1.0, Some(1));
        assert_eq!(out, array![[2.0, -0.5], [-1.0, 0.2]]);
    }

    #[test]
    fn prox_theta_closed_form() {
        let v = array![0.7, -0.3, 0.1];
        let out = prox_theta(&v, 1.0, 0.2);
        assert_abs_diff_eq!(out[0], 0.5, epsilon = 1e-15);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
        assert!(out[1].is_sign_positive() && out[2].is_sign_positive());
    }

    /// Numerical minimizer of a convex piecewise quadratic on [lo, hi] with
    /// a possible kink at 0: bisection on the sign of a one-sided
    /// second-order difference derivative. The three-point one-sided stencil
    /// is exact for quadratics and is aimed so it never straddles the kink,
    /// so the only error is rounding noise ~1e-13 — far below the
    /// tolerances the prox maps are checked at.
    fn scalar_argmin(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = 1e-3;
        let slope = |u: f64| -> f64 {
            if u >= 0.0 && u + 2.0 * h <= hi {
                (-3.0 * f(u) + 4.0 * f(u + h) - f(u + 2.0 * h)) / (2.0 * h)
            } else {
                (3.0 * f(u) - 4.0 * f(u - h) + f(u - 2.0 * h)) / (2.0 * h)
            }
        };
        if slope(lo) >= 0.0 {
            return lo;
        }
        if slope(hi) <= 0.0 {
            return hi;
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if slope(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn prox_w_matches_scalar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v = rng.random_range(-5.0..5.0);
            let tau = rng.random_range(0.0..3.0);
            let got = prox_w(&array![[v]], 1.0, tau, None)[[0, 0]];
            let want = scalar_argmin(-8.0, 8.0, |u| 0.5 * (u - v).powi(2) + tau * u.abs());
            assert!((got - want).abs() <= 1e-6, "v={v} tau={tau}: {got} vs {want}");
        }
    }

    #[test]
    fn prox_theta_matches_scalar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let v = rng.random_range(-5.0..5.0);
            let tau = rng.random_range(0.0..3.0);
            let got = prox_theta(&array![v], 1.0, tau)[0];
            let want = scalar_argmin(0.0, 8.0, |u| 0.5 * (u - v).powi(2) + tau * u);
            assert!((got - want).abs() <= 1e-8, "v={v} tau={tau}: {got} vs {want}");
        }
    }

    /// With x = 0 the smooth part is a pure quadratic in θ_0 with curvature
    /// exactly 1, so doubling from 1/4 must accept at exactly L = 1.
    #[test]
    fn line_search_finds_known_curvature() {
        let ds = Dataset::new(array![[0.0]], vec![0], 2).unwrap();
        let part = ClassPartition::build(&[0], &[1], 2).unwrap();
        let cfg = ObjectiveConfig::new(0.0, 0.0, PhiKind::SmoothHinge).unwrap();
        let solver = SolverConfig::default();
        let y = ModelParams {
            w: array![[0.0], [0.0]],
            theta: array![2.0, 0.0],
        };
        let (f_y, grad) = loss_value_and_grad(&y, &ds, &part, cfg.phi).unwrap();
        assert_abs_diff_eq!(f_y, 4.5, epsilon = 1e-15);
        assert_abs_diff_eq!(grad.d_theta[0], 3.0, epsilon = 1e-15);
        let out = line_search(&y, f_y, &grad, &ds, &part, &cfg, &solver, 0.25).unwrap();
        assert_eq!(out.accepted_l, 1.0);
        assert_eq!(out.candidate.theta, array![0.0, 0.0]);
    }

    #[test]
    fn line_search_accepts_stationary_point_at_any_l() {
        // margins deep in the flat region: gradient identically zero
        let ds = Dataset::new(array![[1.0], [-1.0]], vec![0, 1], 2).unwrap();
        let part = ClassPartition::build(&[0, 1], &[0, 1], 2).unwrap();
        let cfg = ObjectiveConfig::new(0.0, 0.0, PhiKind::SmoothHinge).unwrap();
        let solver = SolverConfig::default();
        let y = ModelParams {
            w: array![[5.0], [-5.0]],
            theta: array![0.0, 0.0],
        };
        let (f_y, grad) = loss_value_and_grad(&y, &ds, &part, cfg.phi).unwrap();
        assert_eq!(f_y, 0.0);
        assert!(grad.d_w.iter().all(|&g| g == 0.0));
        for l in [1e-6, 1.0, 1e6] {
            let out = line_search(&y, f_y, &grad, &ds, &part, &cfg, &solver, l).unwrap();
            assert_eq!(out.accepted_l, l);
            assert_eq!(out.candidate, y);
        }
    }

    #[test]
    fn apg_descends_on_the_two_point_instance() {
        let (ds, part) = two_point_instance();
        let cfg = ObjectiveConfig::new(0.01, 0.01, PhiKind::SmoothHinge).unwrap();
        let solver = SolverConfig::default();
        let fit = apg_fit(&ds, &part, &cfg, &solver, None).unwrap();
        assert_abs_diff_eq!(fit.objective_trace[0], 0.5, epsilon = 1e-15);
        assert!(fit.converged);
        assert!(fit.final_objective() < 0.5);
        assert!(fit.params.theta.iter().all(|&t| t >= 0.0));
        for pair in fit.objective_trace.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12 * pair[0].abs().max(1.0),
                "trace increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn apg_huge_c2_keeps_w_at_zero() {
        let ds = Dataset::new(array![[0.2], [0.9]], vec![0, 1], 2).unwrap();
        let part = ClassPartition::build(&[0, 1], &[0, 0], 2).unwrap();
        let cfg = ObjectiveConfig::new(0.01, 1e6, PhiKind::SmoothHinge).unwrap();
        let fit = apg_fit(&ds, &part, &cfg, &SolverConfig::default(), None).unwrap();
        assert!(fit.params.w.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apg_is_deterministic() {
        let (ds, part) = two_point_instance();
        let cfg = ObjectiveConfig::new(0.05, 0.02, PhiKind::Logistic).unwrap();
        let solver = SolverConfig::default();
        let a = apg_fit(&ds, &part, &cfg, &solver, None).unwrap();
        let b = apg_fit(&ds, &part, &cfg, &solver, None).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.objective_trace, b.objective_trace);
        assert_eq!(a.iterations_run, b.iterations_run);
    }

    #[test]
    fn apg_rejects_hinge_and_bad_init() {
        let (ds, part) = two_point_instance();
        let solver = SolverConfig::default();
        let hinge = ObjectiveConfig::new(0.1, 0.1, PhiKind::Hinge).unwrap();
        assert!(matches!(
            apg_fit(&ds, &part, &hinge, &solver, None),
            Err(Error::NonSmoothPhi(_))
        ));
        let cfg = ObjectiveConfig::new(0.1, 0.1, PhiKind::SmoothHinge).unwrap();
        let bad_shape = ModelParams::zeros(3, 1);
        assert!(apg_fit(&ds, &part, &cfg, &solver, Some(bad_shape)).is_err());
        let mut bad_theta = ModelParams::zeros(2, 1);
        bad_theta.theta[0] = -0.5;
        assert!(apg_fit(&ds, &part, &cfg, &solver, Some(bad_theta)).is_err());
    }

    #[test]
    fn apg_respects_init() {
        let (ds, part) = two_point_instance();
        let cfg = ObjectiveConfig::new(0.1, 0.1, PhiKind::SmoothHinge).unwrap();
        let solver = SolverConfig {
            max_iters: 1,
            ..SolverConfig::default()
        };
        let init = ModelParams {
            w: array![[1.0], [0.0]],
            theta: array![0.5, 0.5],
        };
        let fit = apg_fit(&ds, &part, &cfg, &solver, Some(init)).unwrap();
        assert_abs_diff_eq!(fit.objective_trace[0], 0.2625, epsilon = 1e-15);
    }

    #[test]
    fn freeze_theta_pins_thresholds() {
        let (ds, part) = two_point_instance();
        let cfg = ObjectiveConfig::new(0.0, 0.01, PhiKind::SmoothHinge).unwrap();
        let solver = SolverConfig {
            freeze_theta: true,
            ..SolverConfig::default()
        };
        let fit = apg_fit(&ds, &part, &cfg, &solver, None).unwrap();
        assert_eq!(fit.params.theta, array![0.0, 0.0]);
        assert!(fit.params.w.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn residual_is_small_at_a_tight_fit() {
        let (ds, part) = two_point_instance();
        let cfg = ObjectiveConfig::new(0.05, 0.02, PhiKind::SmoothHinge).unwrap();
        let solver = SolverConfig {
            rel_tol: 1e-10,
            tol_window: 10,
            ..SolverConfig::default()
        };
        let fit = apg_fit(&ds, &part, &cfg, &solver, None).unwrap();
        let res = prox_gradient_residual(
            &fit.params,
            &ds,
            &part,
            &cfg,
            &solver,
            1.0 / fit.last_lipschitz,
        )
        .unwrap();
        assert!(res <= 1e-3, "residual {res}");
    }

    #[test]
    fn trace_file_has_one_row_per_iteration() {
        let (ds, part) = two_point_instance();
        let cfg = ObjectiveConfig::new(0.05, 0.02, PhiKind::SmoothHinge).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let solver = SolverConfig {
            trace_path: Some(path.clone()),
            ..SolverConfig::default()
        };
        let fit = apg_fit(&ds, &part, &cfg, &solver, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iter,objective,lipschitz,restarted");
        assert_eq!(lines.len(), fit.iterations_run + 1);
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn solver_config_validation() {
        let broken = [
            SolverConfig { max_iters: 0, ..SolverConfig::default() },
            SolverConfig { rel_tol: 1.5, ..SolverConfig::default() },
            SolverConfig { backtrack_factor: 1.0, ..SolverConfig::default() },
            SolverConfig { initial_lipschitz_guess: 0.0, ..SolverConfig::default() },
        ];
        for s in broken {
            assert!(s.validate().is_err(), "{s:?} should not validate");
        }
        assert!(SolverConfig::default().validate().is_ok());
    }
}
