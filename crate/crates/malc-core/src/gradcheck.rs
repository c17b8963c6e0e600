//! Central finite-difference validation of the analytic loss gradient.
//!
//! The gradient formulas are hand-derived, so this check is the gate in
//! front of them: random small instances, every coordinate compared
//! against `(L(x+h·e) − L(x−h·e)) / 2h`.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::data::{ClassPartition, Dataset};
use crate::error::Result;
use crate::loss::{loss_eval, loss_grad, Gradient, ModelParams, PhiKind};

/// Step used for the central differences.
pub const FD_STEP: f64 = 1e-5;

/// Largest per-coordinate relative error the gate accepts.
pub const GRADCHECK_TOL: f64 = 1e-5;

/// Full finite-difference gradient, one loss pair per coordinate.
pub fn fd_loss_grad(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    phi: PhiKind,
    h: f64,
) -> Result<Gradient> {
    let (k, d) = (params.num_classes(), params.dim());
    let mut d_w = Array2::<f64>::zeros((k, d));
    let mut probe = params.clone();
    for i in 0..k {
        for j in 0..d {
            let orig = probe.w[[i, j]];
            probe.w[[i, j]] = orig + h;
            let up = loss_eval(&probe, ds, part, phi)?;
            probe.w[[i, j]] = orig - h;
            let down = loss_eval(&probe, ds, part, phi)?;
            probe.w[[i, j]] = orig;
            d_w[[i, j]] = (up - down) / (2.0 * h);
        }
    }
    let mut d_theta = Array1::<f64>::zeros(k);
    for i in 0..k {
        let orig = probe.theta[i];
        probe.theta[i] = orig + h;
        let up = loss_eval(&probe, ds, part, phi)?;
        probe.theta[i] = orig - h;
        let down = loss_eval(&probe, ds, part, phi)?;
        probe.theta[i] = orig;
        d_theta[i] = (up - down) / (2.0 * h);
    }
    Ok(Gradient { d_w, d_theta })
}

/// Relative error with a unit floor, so tiny coordinates are compared
/// absolutely: `|a − b| / max(|a|, |b|, 1)`.
fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Worst relative error between the analytic and finite-difference
/// gradients across all coordinates of one instance.
pub fn max_rel_error(
    params: &ModelParams,
    ds: &Dataset,
    part: &ClassPartition,
    phi: PhiKind,
) -> Result<f64> {
    let analytic = loss_grad(params, ds, part, phi)?;
    let numeric = fd_loss_grad(params, ds, part, phi, FD_STEP)?;
    let worst_w = analytic
        .d_w
        .iter()
        .zip(numeric.d_w.iter())
        .map(|(&a, &b)| rel_error(a, b))
        .fold(0.0, f64::max);
    let worst_theta = analytic
        .d_theta
        .iter()
        .zip(numeric.d_theta.iter())
        .map(|(&a, &b)| rel_error(a, b))
        .fold(0.0, f64::max);
    Ok(worst_w.max(worst_theta))
}

/// One random instance (data, partition, parameter point) in the
/// gradcheck regime: n ≤ 20, d ≤ 5, K ∈ {2, 3, 5}.
pub fn random_instance(seed: u64) -> (Dataset, ClassPartition, ModelParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = *[2usize, 3, 5].choose(&mut rng).expect("non-empty");
    let n = rng.random_range(2..=20);
    let d = rng.random_range(1..=5);
    let features = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let preds: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let ds = Dataset::new(features, labels.clone(), k).expect("valid by construction");
    let part = ClassPartition::build(&labels, &preds, k).expect("aligned by construction");
    let params = ModelParams {
        w: Array2::from_shape_fn((k, d), |_| rng.random_range(-1.5..1.5)),
        theta: Array1::from_shape_fn(k, |_| rng.random_range(0.0..1.0)),
    };
    (ds, part, params)
}

/// Outcome of a gradcheck sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckReport {
    pub instances: usize,
    pub max_rel_error: f64,
    /// Seed reproducing the worst instance via [`random_instance`].
    pub worst_instance_seed: u64,
    pub pass: bool,
}

/// Runs the finite-difference suite over `instances` random instances
/// with per-instance seeds `seed, seed+1, ...`.
pub fn run_gradcheck(phi: PhiKind, instances: usize, seed: u64) -> Result<GradcheckReport> {
    let mut worst = 0.0f64;
    let mut worst_seed = seed;
    for i in 0..instances {
        let instance_seed = seed.wrapping_add(i as u64);
        let (ds, part, params) = random_instance(instance_seed);
        let err = max_rel_error(&params, &ds, &part, phi)?;
        if err > worst {
            worst = err;
            worst_seed = instance_seed;
        }
    }
    Ok(GradcheckReport {
        instances,
        max_rel_error: worst,
        worst_instance_seed: worst_seed,
        pass: worst <= GRADCHECK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use ndarray::array;

    #[test]
    fn fd_matches_hand_gradient_on_the_worked_instance() {
        let ds = Dataset::new(array![[1.0], [-1.0]], vec![0, 1], 2).unwrap();
        let part = ClassPartition::build(&[0, 1], &[0, 0], 2).unwrap();
        let params = ModelParams {
            w: array![[1.0], [0.0]],
            theta: array![0.5, 0.5],
        };
        let fd = fd_loss_grad(&params, &ds, &part, PhiKind::SmoothHinge, FD_STEP).unwrap();
        assert!((fd.d_theta[1] - 0.25).abs() < 1e-9);
        assert!((fd.d_w[[0, 0]] + 0.25).abs() < 1e-9);
    }

    #[test]
    fn suite_passes_for_both_smooth_kinds() {
        for phi in [PhiKind::SmoothHinge, PhiKind::Logistic] {
            let report = run_gradcheck(phi, 100, 2024).unwrap();
            assert!(
                report.pass,
                "{phi}: max rel error {} at seed {}",
                report.max_rel_error, report.worst_instance_seed
            );
        }
    }

    #[test]
    fn suite_rejects_hinge() {
        assert!(matches!(
            run_gradcheck(PhiKind::Hinge, 3, 0),
            Err(Error::NonSmoothPhi(_))
        ));
    }

    #[test]
    fn instances_are_reproducible() {
        let (a_ds, _, a_params) = random_instance(77);
        let (b_ds, _, b_params) = random_instance(77);
        assert_eq!(a_ds, b_ds);
        assert_eq!(a_params, b_params);
    }
}
