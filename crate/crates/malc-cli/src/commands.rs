//! Subcommand implementations. Every function returns the process exit
//! code on the happy path; hard errors bubble up as [`malc_core::Error`]
//! and are mapped to an exit code in `main`.

use std::path::{Path, PathBuf};

use clap::Args;
use malc_core::{
    apg_fit, claimant, evaluate, export_frontier, file_sha256, knn_fit, knn_predict_batch,
    load_blackbox_predictions, load_dataset, load_model, make_blobs, margins_of, minmax_scale,
    noisy_oracle, partition_indices, predict_scores, run_gradcheck, save_blackbox_predictions,
    save_csv, save_labels, save_model, sweep, BlackboxPredictions, DataFormat, Dataset, Error,
    HybridModel, LabelColumn, Metrics, ModelParams, NoisyOracleConfig, ObjectiveConfig, PhiKind,
    Provenance, Result, ScalingParams, SolverConfig, SplitMode, SweepConfig, SweepGrid,
};

use crate::config::{pick, pick_flag, FileConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;

// ---------------------------------------------------------------------------
// shared argument groups

/// Where and how to read a dataset.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset file
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Dataset format: csv or svmlight
    #[arg(long, value_name = "FMT")]
    pub format: Option<String>,

    /// CSV label column: a header name or 0-based index [default: label]
    #[arg(long, value_name = "NAME|IDX")]
    pub label: Option<String>,
}

/// Objective and solver knobs shared by train and frontier.
#[derive(Debug, Args)]
pub struct FitArgs {
    /// Margin loss: smooth_hinge or logistic [default: smooth_hinge]
    #[arg(long, value_name = "PHI")]
    pub phi: Option<String>,

    /// Iteration cap [default: 10000]
    #[arg(long, value_name = "N")]
    pub max_iters: Option<usize>,

    /// Relative objective change below which iterations count as stalled
    /// [default: 1e-3]
    #[arg(long, value_name = "TOL")]
    pub rel_tol: Option<f64>,

    /// Consecutive stalled iterations required to stop [default: 5]
    #[arg(long, value_name = "N")]
    pub tol_window: Option<usize>,

    /// Min-max scale every feature to [0,1] before fitting
    #[arg(long)]
    pub scale: bool,

    /// Append a constant 1 bias feature (after scaling)
    #[arg(long)]
    pub bias: bool,

    /// Apply the L1 penalty to the bias column too
    #[arg(long)]
    pub penalize_bias: bool,

    /// Seed for every stochastic component [default: 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Start every threshold at the data radius max over rows of the
    /// feature norm, instead of at 0
    #[arg(long)]
    pub theta_max_init: bool,
}

/// The fully resolved fit settings after merging flags, config file, and
/// built-in defaults.
pub struct FitSettings {
    pub phi: PhiKind,
    pub scale: bool,
    pub bias: bool,
    pub penalize_bias: bool,
    pub seed: u64,
    pub theta_max_init: bool,
    pub solver: SolverConfig,
}

impl FitArgs {
    pub fn resolve(&self, cfg: &FileConfig) -> Result<FitSettings> {
        let defaults = SolverConfig::default();
        let phi_name = pick(
            self.phi.clone(),
            cfg.phi.clone(),
            "smooth_hinge".to_string(),
        );
        let solver = SolverConfig {
            max_iters: pick(self.max_iters, cfg.max_iters, defaults.max_iters),
            rel_tol: pick(self.rel_tol, cfg.rel_tol, defaults.rel_tol),
            tol_window: pick(self.tol_window, cfg.tol_window, defaults.tol_window),
            seed: pick(self.seed, cfg.seed, 0),
            ..defaults
        };
        Ok(FitSettings {
            phi: phi_name.parse()?,
            scale: pick_flag(self.scale, cfg.scale),
            bias: pick_flag(self.bias, cfg.bias),
            penalize_bias: pick_flag(self.penalize_bias, cfg.penalize_bias),
            seed: solver.seed,
            theta_max_init: pick_flag(self.theta_max_init, cfg.theta_max_init),
            solver,
        })
    }
}

fn parse_format(flag: &Option<String>, cfg: &FileConfig) -> Result<DataFormat> {
    let name = pick(flag.clone(), cfg.format.clone(), "csv".to_string());
    match name.as_str() {
        "csv" => Ok(DataFormat::Csv),
        "svmlight" | "svm" | "libsvm" => Ok(DataFormat::Svmlight),
        other => Err(Error::InvalidArgument(format!(
            "unknown format {other:?}; expected csv or svmlight"
        ))),
    }
}

fn parse_label_column(flag: &Option<String>, cfg: &FileConfig) -> LabelColumn {
    let name = pick(flag.clone(), cfg.label.clone(), "label".to_string());
    match name.parse::<usize>() {
        Ok(idx) => LabelColumn::Index(idx),
        Err(_) => LabelColumn::Name(name),
    }
}

fn load_data(args: &DataArgs, cfg: &FileConfig) -> Result<Dataset> {
    load_dataset(
        &args.data,
        parse_format(&args.format, cfg)?,
        &parse_label_column(&args.label, cfg),
    )
}

/// Loads dataset plus aligned predictions and widens the class count to
/// cover both files, so a black-box may predict classes the sample lacks.
fn load_pair(
    args: &DataArgs,
    blackbox: &Path,
    cfg: &FileConfig,
) -> Result<(Dataset, BlackboxPredictions)> {
    let mut ds = load_data(args, cfg)?;
    let bb = load_blackbox_predictions(blackbox, ds.n())?;
    if bb.min_num_classes() > ds.num_classes() {
        ds.expand_classes(bb.min_num_classes());
    }
    Ok((ds, bb))
}

/// Optional scaling followed by optional bias column — the same order
/// `HybridModel::prepare_features` replays at prediction time.
fn prepare(ds: Dataset, scale: bool, bias: bool) -> Result<(Dataset, Option<ScalingParams>)> {
    let (ds, scaling) = if scale {
        let (scaled, params) = minmax_scale(&ds);
        (scaled, Some(params))
    } else {
        (ds, None)
    };
    let ds = if bias { ds.append_bias()? } else { ds };
    Ok((ds, scaling))
}

/// w = 0 with every threshold at the data radius: the fit starts fully
/// deferring and must earn its claims.
fn theta_max_init(ds: &Dataset) -> ModelParams {
    let radius = ds
        .features()
        .rows()
        .into_iter()
        .map(|r| r.dot(&r).sqrt())
        .fold(0.0, f64::max);
    let mut params = ModelParams::zeros(ds.num_classes(), ds.dim());
    params.theta.fill(radius);
    params
}

fn provenance(data: &Path, blackbox: Option<&Path>, seed: u64) -> Result<Provenance> {
    Ok(Provenance {
        dataset_sha256: Some(file_sha256(data)?),
        blackbox_sha256: blackbox.map(file_sha256).transpose()?,
        seed,
    })
}

fn print_metrics(m: &Metrics) {
    println!(
        "accuracy={:.4} transparency={:.4} avg_nonzeros={:.4}",
        m.accuracy, m.transparency, m.avg_nonzeros
    );
    println!(
        "claimed={}/{} accuracy_on_claimed={:.4} accuracy_on_deferred={:.4}",
        m.n_claimed, m.n, m.accuracy_on_claimed, m.accuracy_on_deferred
    );
}

// ---------------------------------------------------------------------------
// synth

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of gaussian blobs (= classes)
    #[arg(long)]
    pub blobs: usize,

    /// Total rows, split as evenly as possible across blobs
    #[arg(long)]
    pub n: usize,

    /// Feature dimension (needs d ≥ blobs − 1 for equidistant centers)
    #[arg(long)]
    pub d: usize,

    /// Pairwise distance between blob centers (unit within-blob variance)
    #[arg(long)]
    pub separation: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output dataset CSV
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Output label file, one 1-based label per line; doubles as a
    /// perfect black-box prediction file [default: <out> with .labels]
    #[arg(long, value_name = "FILE")]
    pub labels_out: Option<PathBuf>,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<u8> {
    let ds = make_blobs(args.blobs, args.n, args.d, args.separation, args.seed)?;
    save_csv(&ds, &args.out)?;
    let labels_path = args
        .labels_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("labels"));
    save_labels(&ds, &labels_path)?;
    println!(
        "wrote {} rows, {} features, K={} -> {} (labels: {})",
        ds.n(),
        ds.dim(),
        ds.num_classes(),
        args.out.display(),
        labels_path.display()
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// blackbox stand-ins

#[derive(Debug, Args)]
pub struct KnnArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Neighbor count
    #[arg(long)]
    pub k: usize,

    /// Rows to predict [default: the training file itself]
    #[arg(long, value_name = "FILE")]
    pub query: Option<PathBuf>,

    /// Output prediction file
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

pub fn cmd_blackbox_knn(args: &KnnArgs, cfg: &FileConfig) -> Result<u8> {
    let train = load_data(&args.data, cfg)?;
    let model = knn_fit(&train, args.k)?;
    let query = match &args.query {
        Some(path) => load_dataset(
            path,
            parse_format(&args.data.format, cfg)?,
            &parse_label_column(&args.data.label, cfg),
        )?,
        None => train.clone(),
    };
    let preds = knn_predict_batch(&model, &query)?;
    save_blackbox_predictions(&preds, &args.out)?;
    println!(
        "wrote {} knn (k={}) predictions -> {}",
        preds.len(),
        args.k,
        args.out.display()
    );
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Probability each ground-truth label is flipped to another class
    #[arg(long)]
    pub error_rate: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output prediction file
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

pub fn cmd_blackbox_oracle(args: &OracleArgs, cfg: &FileConfig) -> Result<u8> {
    let ds = load_data(&args.data, cfg)?;
    let preds = noisy_oracle(
        ds.labels(),
        ds.num_classes(),
        NoisyOracleConfig::new(args.error_rate, args.seed)?,
    )?;
    save_blackbox_predictions(&preds, &args.out)?;
    println!(
        "wrote {} oracle predictions (error_rate={}) -> {}",
        preds.len(),
        args.error_rate,
        args.out.display()
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// train

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Black-box prediction file, one 1-based label per dataset row
    #[arg(long, value_name = "FILE")]
    pub blackbox: PathBuf,

    /// Output model file (JSON)
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Threshold penalty weight
    #[arg(long)]
    pub c1: Option<f64>,

    /// L1 penalty weight on the agent coefficients
    #[arg(long)]
    pub c2: Option<f64>,

    #[command(flatten)]
    pub fit: FitArgs,

    /// Write a per-iteration trace CSV (iter,objective,lipschitz,restarted)
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,

    /// Treat non-convergence as an error instead of a warning
    #[arg(long)]
    pub strict: bool,
}

fn require_scalar(
    flag: Option<f64>,
    cfg_value: &Option<crate::config::OneOrMany>,
    key: &str,
) -> Result<f64> {
    match (flag, cfg_value) {
        (Some(v), _) => Ok(v),
        (None, Some(v)) => v.scalar(key),
        (None, None) => Err(Error::InvalidArgument(format!(
            "--{key} is required (flag or config file)"
        ))),
    }
}

pub fn cmd_train(args: &TrainArgs, cfg: &FileConfig) -> Result<u8> {
    let settings = args.fit.resolve(cfg)?;
    let c1 = require_scalar(args.c1, &cfg.c1, "c1")?;
    let c2 = require_scalar(args.c2, &cfg.c2, "c2")?;

    let (ds, bb) = load_pair(&args.data, &args.blackbox, cfg)?;
    let (ds, scaling) = prepare(ds, settings.scale, settings.bias)?;
    let part = partition_indices(&ds, &bb)?;

    let mut obj = ObjectiveConfig::new(c1, c2, settings.phi)?;
    obj.penalize_bias = settings.penalize_bias;
    let solver = SolverConfig {
        trace_path: args.trace.clone(),
        ..settings.solver
    };
    let init = settings.theta_max_init.then(|| theta_max_init(&ds));
    let fit = apg_fit(&ds, &part, &obj, &solver, init)?;
    let final_objective = fit.final_objective();

    let mut model = HybridModel::new(fit.params, settings.phi, c1, c2)?;
    model.feature_names = ds.feature_names().to_vec();
    model.scaling = scaling;
    model.bias_column = ds.bias_column();
    model.provenance = provenance(&args.data.data, Some(&args.blackbox), settings.seed)?;
    save_model(&model, &args.out)?;

    println!("n={} d={} K={}", ds.n(), ds.dim(), ds.num_classes());
    println!(
        "converged={} iterations={} objective={:.6}",
        fit.converged, fit.iterations_run, final_objective
    );
    print_metrics(&evaluate(&model, &ds, &bb)?);
    println!("wrote {}", args.out.display());

    let strict = pick_flag(args.strict, cfg.strict);
    if !fit.converged {
        eprintln!(
            "warning: stopped at max_iters={} without meeting rel_tol={}",
            solver.max_iters, solver.rel_tol
        );
        if strict {
            return Ok(EXIT_CHECK_FAILED);
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// predict

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by train
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    #[command(flatten)]
    pub data: DataArgs,

    /// Black-box prediction file for the deferred rows; without it they
    /// are reported as deferred with an empty label
    #[arg(long, value_name = "FILE")]
    pub blackbox: Option<PathBuf>,

    /// Output CSV: row,label,source,margin
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

pub fn cmd_predict(args: &PredictArgs, cfg: &FileConfig) -> Result<u8> {
    let model = load_model(&args.model)?;
    let raw = load_data(&args.data, cfg)?;
    let ds = model.prepare_features(&raw)?;
    let bb = args
        .blackbox
        .as_deref()
        .map(|p| load_blackbox_predictions(p, ds.n()))
        .transpose()?;
    if let Some(bb) = &bb {
        if bb.min_num_classes() > model.num_classes() {
            return Err(Error::InvalidArgument(format!(
                "black-box predicts {} classes, model has {}",
                bb.min_num_classes(),
                model.num_classes()
            )));
        }
    }

    let mut out = String::from("row,label,source,margin\n");
    let mut claimed = 0usize;
    for (i, row) in ds.features().rows().into_iter().enumerate() {
        let scores = predict_scores(&model.params, row)?;
        let margins = margins_of(&scores);
        match claimant(&model.params, &scores, model.tie_break) {
            Some(k) => {
                claimed += 1;
                out.push_str(&format!("{i},{},agent({}),{}\n", k + 1, k + 1, margins[k]));
            }
            None => {
                // best margin any agent could muster; all sit below their θ
                let best = margins.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                match &bb {
                    Some(bb) => {
                        out.push_str(&format!("{i},{},blackbox,{best}\n", bb.preds()[i] + 1))
                    }
                    None => out.push_str(&format!("{i},,deferred,{best}\n")),
                }
            }
        }
    }
    std::fs::write(&args.out, out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    println!(
        "wrote {} predictions ({} claimed, {} deferred) -> {}",
        ds.n(),
        claimed,
        ds.n() - claimed,
        args.out.display()
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model file written by train
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    #[command(flatten)]
    pub data: DataArgs,

    /// Black-box prediction file aligned with the dataset rows
    #[arg(long, value_name = "FILE")]
    pub blackbox: PathBuf,
}

pub fn cmd_evaluate(args: &EvaluateArgs, cfg: &FileConfig) -> Result<u8> {
    let model = load_model(&args.model)?;
    let raw = load_data(&args.data, cfg)?;
    let mut ds = model.prepare_features(&raw)?;
    if model.num_classes() > ds.num_classes() {
        ds.expand_classes(model.num_classes());
    }
    let bb = load_blackbox_predictions(&args.blackbox, ds.n())?;
    let metrics = evaluate(&model, &ds, &bb)?;
    println!("n={} K={}", metrics.n, model.num_classes());
    print_metrics(&metrics);
    for (k, rate) in metrics.per_class_claim_rate.iter().enumerate() {
        println!("claim_rate[{}]={:.4}", k + 1, rate);
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// frontier

#[derive(Debug, Args)]
pub struct FrontierArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Black-box prediction file, one 1-based label per dataset row
    #[arg(long, value_name = "FILE")]
    pub blackbox: PathBuf,

    /// Output frontier CSV
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Comma-separated c1 grid [default: 12 log-spaced in 0.005..0.95]
    #[arg(long, value_delimiter = ',', value_name = "V,V,...")]
    pub c1: Option<Vec<f64>>,

    /// Comma-separated c2 candidates [default: 4 log-spaced in 0.03..0.25]
    #[arg(long, value_delimiter = ',', value_name = "V,V,...")]
    pub c2: Option<Vec<f64>>,

    #[command(flatten)]
    pub fit: FitArgs,

    /// Holdout share used to pick c2 at each c1 [default: 0.2]
    #[arg(long, value_name = "FRAC")]
    pub validation_fraction: Option<f64>,

    /// Stratify the holdout by class
    #[arg(long)]
    pub stratified: bool,

    /// Chain refits left to right, starting each from the previous point
    /// (runs sequentially; a speed knob, the minimizer is unique enough
    /// for results to match cold starts within tolerance)
    #[arg(long)]
    pub warm_start: bool,

    /// Also save each successful point's model as point_NN.json here
    #[arg(long, value_name = "DIR")]
    pub models_dir: Option<PathBuf>,

    /// Treat any failed or non-converged grid point as an error
    #[arg(long)]
    pub strict: bool,
}

pub fn cmd_frontier(args: &FrontierArgs, cfg: &FileConfig) -> Result<u8> {
    let settings = args.fit.resolve(cfg)?;
    let defaults = SweepGrid::log_default();
    let c1_values = match (&args.c1, &cfg.c1) {
        (Some(v), _) => v.clone(),
        (None, Some(v)) => v.list(),
        (None, None) => defaults.c1_values().to_vec(),
    };
    let c2_candidates = match (&args.c2, &cfg.c2) {
        (Some(v), _) => v.clone(),
        (None, Some(v)) => v.list(),
        (None, None) => defaults.c2_candidates().to_vec(),
    };
    let grid = SweepGrid::new(c1_values, c2_candidates)?;

    let (ds, bb) = load_pair(&args.data, &args.blackbox, cfg)?;
    let (ds, scaling) = prepare(ds, settings.scale, settings.bias)?;

    let sweep_cfg = SweepConfig {
        grid,
        phi: settings.phi,
        penalize_bias: settings.penalize_bias,
        validation_fraction: pick(
            args.validation_fraction,
            cfg.validation_fraction,
            0.2,
        ),
        split_mode: if pick_flag(args.stratified, cfg.stratified) {
            SplitMode::Stratified
        } else {
            SplitMode::Uniform
        },
        seed: settings.seed,
        warm_start: pick_flag(args.warm_start, cfg.warm_start),
    };

    let mut frontier = sweep(&ds, &bb, &sweep_cfg, &settings.solver)?;
    frontier.dataset_sha256 = Some(file_sha256(&args.data.data)?);
    frontier.blackbox_sha256 = Some(file_sha256(&args.blackbox)?);
    export_frontier(&frontier, &args.out)?;

    let mut failures = 0usize;
    let mut stalled = 0usize;
    for point in &frontier.points {
        match (&point.fit.error, &point.metrics) {
            (Some(msg), _) => {
                failures += 1;
                eprintln!("warning: c1={} failed: {msg}", point.c1);
            }
            (None, Some(m)) => {
                if !point.fit.converged {
                    stalled += 1;
                }
                println!(
                    "c1={} c2={} transparency={:.4} accuracy={:.4} converged={}",
                    point.c1,
                    point.c2_selected.unwrap_or(f64::NAN),
                    m.transparency,
                    m.accuracy,
                    point.fit.converged
                );
            }
            (None, None) => unreachable!("point without error must carry metrics"),
        }
    }
    println!("wrote {} points -> {}", frontier.points.len(), args.out.display());

    if let Some(dir) = &args.models_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        save_point_models(dir, &frontier, &ds, &bb, &scaling, &sweep_cfg, &settings, args)?;
    }

    if pick_flag(args.strict, cfg.strict) && (failures > 0 || stalled > 0) {
        eprintln!("error: {failures} failed and {stalled} non-converged grid points under --strict");
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

/// Refits each successful grid point cold and writes point_NN.json. Under
/// --warm-start the sweep's own point may differ within solver tolerance;
/// the saved file is the reproducible cold fit.
#[allow(clippy::too_many_arguments)]
fn save_point_models(
    dir: &Path,
    frontier: &malc_core::Frontier,
    ds: &Dataset,
    bb: &BlackboxPredictions,
    scaling: &Option<ScalingParams>,
    sweep_cfg: &SweepConfig,
    settings: &FitSettings,
    args: &FrontierArgs,
) -> Result<()> {
    let part = partition_indices(ds, bb)?;
    let prov = provenance(&args.data.data, Some(&args.blackbox), settings.seed)?;
    for (i, point) in frontier.points.iter().enumerate() {
        let Some(c2) = point.c2_selected else { continue };
        let mut obj = ObjectiveConfig::new(point.c1, c2, sweep_cfg.phi)?;
        obj.penalize_bias = sweep_cfg.penalize_bias;
        let fit = apg_fit(ds, &part, &obj, &settings.solver, None)?;
        let mut model = HybridModel::new(fit.params, sweep_cfg.phi, point.c1, c2)?;
        model.feature_names = ds.feature_names().to_vec();
        model.scaling = scaling.clone();
        model.bias_column = ds.bias_column();
        model.provenance = prov.clone();
        let path = dir.join(format!("point_{i:02}.json"));
        save_model(&model, &path)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gradcheck

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Margin loss to check: smooth_hinge or logistic
    #[arg(long, value_name = "PHI")]
    pub phi: Option<String>,

    /// Number of random instances
    #[arg(long, default_value_t = 100)]
    pub instances: usize,

    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
}

pub fn cmd_gradcheck(args: &GradcheckArgs, cfg: &FileConfig) -> Result<u8> {
    let phi: PhiKind = pick(args.phi.clone(), cfg.phi.clone(), "smooth_hinge".into()).parse()?;
    let seed = pick(args.seed, cfg.seed, 0);
    let report = run_gradcheck(phi, args.instances, seed)?;
    println!(
        "phi={phi} instances={} max_rel_error={:.3e} worst_seed={} pass={}",
        report.instances, report.max_rel_error, report.worst_instance_seed, report.pass
    );
    if report.pass {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "gradient check failed; reproduce the worst instance with seed {}",
            report.worst_instance_seed
        );
        Ok(EXIT_CHECK_FAILED)
    }
}
