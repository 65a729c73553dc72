//! Command-line front end. Every command produces one JSON [`RunRecord`]
//! and, where tabular, an optional TSV table.

mod args;
mod bench;
mod record;
mod tune;

use std::path::Path;
use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use serde_json::{json, Value};

pub use args::{
    BenchArgs, Cli, Command, DataArgs, EdrArgs, FitArgs, KernelArg, MethodArg, ModeArg, OutputArgs,
    PathArgs, ReduceArg, SimulateArgs, SolverArgs, SyntheticArg, TuneArgs,
};
pub use bench::{
    selection_benchmark, threads_from_env, BenchmarkConfig, BenchmarkResult, RepeatOutcome,
    THREADS_ENV,
};
pub use record::{num, DatasetInfo, RunRecord, Table};
pub use tune::{nn_loo_mse, tune_classification, tune_regression, ClassTuneRow, RegressionTuneRow};

use crate::analysis::{edr_directions, project, select};
use crate::classification::{ClassModel, ClassificationConfig, ClassificationProblem};
use crate::datagen::{load_csv, normalize_split, write_csv, CsvSchema, LabelCoding, SyntheticSpec};
use crate::dataset::{Dataset, Task};
use crate::error::SglError;
use crate::lasso::{lasso_path, LassoProblem, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::numerics::{Bandwidth, KernelSpec, WeightKind, WeightSpec};
use crate::problem::Reduction;
use crate::regression::{
    log_grid, CoefficientMatrix, FitReport, RegressionConfig, RegressionProblem, StepSize,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Ridge weight on `f⁰` when `--lambda1` is not given.
pub const DEFAULT_LAMBDA1: f64 = 1e-3;
/// Fractions of the heuristic `λ₂` maximum searched by `--auto-lambda`.
pub const DEFAULT_REL_GRID: [f64; 5] = [0.5, 0.3, 0.2, 0.1, 0.05];

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<SglError> for CliError {
    fn from(e: SglError) -> Self {
        let code = match e {
            SglError::Numerical(_) | SglError::StepSize(_) | SglError::DegenerateProblem(_) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError {
        code: EXIT_USAGE,
        message: msg.into(),
    })
}

type CliResult<T> = Result<T, CliError>;

/// What a command produced, before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: Option<RunRecord>,
    pub table: Option<Table>,
    pub csv: Option<String>,
    pub exit_code: i32,
}

/// Runs a parsed command and writes its outputs. Returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = run(cli).and_then(|o| write_outputs(cli, &o).map(|_| o.exit_code));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn output_args(cli: &Cli) -> Option<&OutputArgs> {
    match &cli.command {
        Command::Fit(a) | Command::Select(a) => Some(&a.output),
        Command::Edr(a) => Some(&a.fit.output),
        Command::Path(a) => Some(&a.fit.output),
        Command::Tune(a) => Some(&a.fit.output),
        Command::Benchmark(a) => Some(&a.output),
        Command::Simulate(_) => None,
    }
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError {
            code: EXIT_USAGE,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_outputs(cli: &Cli, o: &Outcome) -> CliResult<()> {
    if let Command::Simulate(a) = &cli.command {
        return write_text(a.out.as_deref(), o.csv.as_deref().unwrap_or_default());
    }
    let out = output_args(cli).expect("record-producing command");
    if let Some(rec) = &o.record {
        let mut text = rec.to_json();
        text.push('\n');
        write_text(out.out.as_deref(), &text)?;
    }
    if let (Some(t), Some(path)) = (&o.table, &out.tsv) {
        write_text(Some(path), &t.to_tsv())?;
    }
    Ok(())
}

/// Runs a command without touching the filesystem except to read inputs.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let start = Instant::now();
    let (name, strict, mut outcome) = match &cli.command {
        Command::Fit(a) => ("fit", a.output.strict, cmd_fit(a, View::Full, None)?),
        Command::Select(a) => (
            "select",
            a.output.strict,
            cmd_fit(a, View::Selection, None)?,
        ),
        Command::Edr(a) => (
            "edr",
            a.fit.output.strict,
            cmd_fit(&a.fit, View::Edr, a.dims)?,
        ),
        Command::Path(a) => ("path", a.fit.output.strict, cmd_path(a)?),
        Command::Tune(a) => ("tune", a.fit.output.strict, cmd_tune(a)?),
        Command::Benchmark(a) => ("benchmark", a.output.strict, cmd_benchmark(a)?),
        Command::Simulate(a) => return cmd_simulate(a),
    };
    if let Some(rec) = outcome.record.as_mut() {
        rec.command = name.to_string();
        rec.timing_ms = start.elapsed().as_secs_f64() * 1e3;
        if strict && !rec.converged {
            outcome.exit_code = EXIT_NOT_CONVERGED;
        }
    }
    Ok(outcome)
}

fn record(
    seed: Option<u64>,
    dataset: Option<DatasetInfo>,
    config: Value,
    results: Value,
    converged: bool,
) -> RunRecord {
    RunRecord {
        command: String::new(),
        version: env!("CARGO_PKG_VERSION"),
        seed,
        dataset,
        config,
        results,
        converged,
        timing_ms: 0.0,
    }
}

fn with_record(rec: RunRecord, table: Option<Table>) -> Outcome {
    Outcome {
        record: Some(rec),
        table,
        csv: None,
        exit_code: EXIT_OK,
    }
}

// ---------- data ----------

struct Loaded {
    train: Dataset<f64>,
    test: Option<Dataset<f64>>,
    info: DatasetInfo,
    seed: Option<u64>,
}

fn synthetic_spec(d: &DataArgs, which: SyntheticArg) -> SyntheticSpec {
    let mut spec = match which {
        SyntheticArg::Turlach => SyntheticSpec::turlach(d.seed),
        SyntheticArg::Spheres => SyntheticSpec::two_spheres(d.sigma.unwrap_or(0.5), d.seed),
    };
    if let Some(n) = d.n {
        spec.n = n;
    }
    if let Some(p) = d.p {
        spec.p = p;
    }
    if let Some(s) = d.sigma {
        spec.noise_sigma = s;
    }
    spec
}

fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

fn load(d: &DataArgs) -> CliResult<Loaded> {
    if let Some(which) = d.synthetic {
        let task = match which {
            SyntheticArg::Turlach => ModeArg::Regression,
            SyntheticArg::Spheres => ModeArg::Classification,
        };
        if d.mode.is_some_and(|m| m != task) {
            return usage(format!("--synthetic {which:?} implies --mode {task:?}").to_lowercase());
        }
        let spec = synthetic_spec(d, which);
        let train: Dataset<f64> = spec.generate()?;
        let source = format!("synthetic:{:?}", spec.model);
        let info = DatasetInfo::new(source, &train, default_names(train.n_vars()));
        return Ok(Loaded {
            train,
            test: None,
            info,
            seed: Some(d.seed),
        });
    }
    let Some(path) = &d.input else {
        return usage("one of --input or --synthetic is required");
    };
    let mode = d.mode.unwrap_or(if d.positive_label.is_some() {
        ModeArg::Classification
    } else {
        ModeArg::Regression
    });
    let labels = match (mode, &d.positive_label) {
        (ModeArg::Regression, None) => LabelCoding::Real,
        (ModeArg::Regression, Some(_)) => {
            return usage("--positive-label needs --mode classification")
        }
        (ModeArg::Classification, None) => LabelCoding::PlusMinusOne,
        (ModeArg::Classification, Some(pos)) => LabelCoding::Named {
            positive: pos.clone(),
        },
    };
    let schema = CsvSchema {
        response: d.response.clone(),
        labels,
    };
    let (raw, names) = load_csv(path, &schema)?;
    let mut info = DatasetInfo::new(path.display().to_string(), &raw, names.clone());
    let (train, test) = match &d.test {
        Some(tp) => {
            let (raw_test, test_names) = load_csv(tp, &schema)?;
            if test_names != names {
                return usage("test CSV columns differ from the training CSV");
            }
            info.test_fingerprint = Some(raw_test.fingerprint());
            info.test_n = Some(raw_test.n_samples());
            let (tr, te, _) = normalize_split(&raw, &raw_test)?;
            (tr, Some(te))
        }
        None => (raw, None),
    };
    Ok(Loaded {
        train,
        test,
        info,
        seed: None,
    })
}

// ---------- configuration ----------

fn parse_bandwidth(s: &str) -> CliResult<Bandwidth<f64>> {
    if s == "median-half" {
        return Ok(Bandwidth::MedianHalf);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Bandwidth::Value(v)),
        _ => usage(format!(
            "bandwidth must be a positive number or median-half, got {s:?}"
        )),
    }
}

fn parse_weights(s: &str, bw: Bandwidth<f64>) -> CliResult<WeightSpec<f64>> {
    if s == "gaussian" {
        return Ok(WeightSpec::gaussian(bw));
    }
    if let Some(k) = s.strip_prefix("knn:") {
        if let Ok(k) = k.parse::<usize>() {
            if k > 0 {
                return Ok(WeightSpec::knn(k, bw));
            }
        }
    }
    usage(format!(
        "weights must be gaussian or knn:K with K >= 1, got {s:?}"
    ))
}

fn kernel_spec(k: KernelArg, bw: Bandwidth<f64>) -> KernelSpec<f64> {
    match k {
        KernelArg::Linear1 => KernelSpec::linear_plus_one(),
        KernelArg::Linear => KernelSpec::linear(),
        KernelArg::Gaussian => KernelSpec::gaussian(bw),
    }
}

fn reduction(r: ReduceArg) -> Reduction {
    match r {
        ReduceArg::On => Reduction::On,
        ReduceArg::Off => Reduction::Off,
        ReduceArg::Auto => Reduction::Auto,
    }
}

fn step(s: &SolverArgs) -> CliResult<StepSize<f64>> {
    match s.delta {
        None => Ok(StepSize::Auto),
        Some(d) if d > 0.0 && d.is_finite() => Ok(StepSize::Fixed(d)),
        Some(d) => usage(format!("--delta must be positive, got {d}")),
    }
}

fn regression_config(s: &SolverArgs) -> CliResult<RegressionConfig<f64>> {
    Ok(RegressionConfig {
        lambda: 0.0,
        step: step(s)?,
        tol: s.tol,
        max_iter: s.max_iter,
        weights: parse_weights(&s.weights, parse_bandwidth(&s.bandwidth)?)?,
        kernel: kernel_spec(
            s.kernel.unwrap_or(KernelArg::Linear1),
            parse_bandwidth(&s.kernel_bandwidth)?,
        ),
        reduction: reduction(s.reduce),
    })
}

fn classification_config(s: &SolverArgs) -> CliResult<ClassificationConfig<f64>> {
    Ok(ClassificationConfig {
        lambda1: s.lambda1.unwrap_or(DEFAULT_LAMBDA1),
        lambda2: 0.0,
        step: step(s)?,
        tol: s.tol,
        max_iter: s.max_iter,
        weights: parse_weights(&s.weights, parse_bandwidth(&s.bandwidth)?)?,
        kernel: kernel_spec(
            s.kernel.unwrap_or(KernelArg::Gaussian),
            parse_bandwidth(&s.kernel_bandwidth)?,
        ),
        reduction: reduction(s.reduce),
    })
}

fn weights_json(w: &WeightSpec<f64>, data: &Dataset<f64>) -> CliResult<Value> {
    let kind = match w.kind {
        WeightKind::GaussianAllPairs => "gaussian".to_string(),
        WeightKind::TruncatedKnn { k } => format!("knn:{k}"),
    };
    Ok(json!({ "kind": kind, "bandwidth": w.bandwidth.resolve(data)? }))
}

fn base_config_json(
    mode: Task,
    weights: &WeightSpec<f64>,
    kernel: Option<&crate::numerics::ResolvedKernel<f64>>,
    reduced: bool,
    s: &SolverArgs,
    data: &Dataset<f64>,
) -> CliResult<Value> {
    Ok(json!({
        "mode": record::task_name(mode),
        "weights": weights_json(weights, data)?,
        "kernel": kernel,
        "reduced_route": reduced,
        "tol": s.tol,
        "max_iter": s.max_iter,
        "delta": s.delta,
    }))
}

// ---------- grids ----------

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Auto,
    /// `count` log-spaced values from `λ_max` down to `ratio·λ_max`.
    Log {
        count: usize,
        ratio: f64,
    },
    /// Fractions of `λ_max`.
    Relative(Vec<f64>),
    Absolute(Vec<f64>),
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite() && *x >= 0.0) => Ok(v),
        _ => usage(format!(
            "grid values must be nonnegative numbers, got {s:?}"
        )),
    }
}

pub fn parse_grid(s: &str) -> CliResult<GridSpec> {
    let s = s.trim();
    if s.is_empty() {
        return usage("lambda grid is empty");
    }
    if s == "auto" {
        return Ok(GridSpec::Auto);
    }
    if let Some(rest) = s.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if let [c, r] = parts[..] {
            if let (Ok(count), Ok(ratio)) = (c.parse::<usize>(), r.parse::<f64>()) {
                if count >= 1 && ratio > 0.0 && ratio < 1.0 {
                    return Ok(GridSpec::Log { count, ratio });
                }
            }
        }
        return usage(format!(
            "expected log:COUNT:RATIO with 0 < RATIO < 1, got {s:?}"
        ));
    }
    if let Some(rest) = s.strip_prefix("rel:") {
        return Ok(GridSpec::Relative(parse_list(rest)?));
    }
    Ok(GridSpec::Absolute(parse_list(s)?))
}

/// Resolves to a strictly descending list. `auto` expands to `default`.
fn resolve_grid(g: &GridSpec, lmax: f64, default: &GridSpec) -> CliResult<Vec<f64>> {
    let mut v = match g {
        GridSpec::Auto => return resolve_grid(default, lmax, default),
        GridSpec::Log { count, ratio } => log_grid(lmax, *ratio, *count),
        GridSpec::Relative(r) => r.iter().map(|f| f * lmax).collect(),
        GridSpec::Absolute(a) => a.clone(),
    };
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    if v.is_empty() {
        return usage("lambda grid is empty");
    }
    Ok(v)
}

// ---------- shared result pieces ----------

#[derive(Debug, Clone, Copy, PartialEq)]
enum View {
    Full,
    Selection,
    Edr,
}

fn report_json<F: serde::Serialize + Copy>(r: &FitReport<F>) -> Value {
    json!({
        "iterations": r.iterations,
        "final_objective": r.final_objective,
        "fixed_point_residual": r.fixed_point_residual,
        "converged": r.converged,
        "step": r.step,
    })
}

fn rows_json(a: ArrayView2<f64>) -> Value {
    Value::Array(a.rows().into_iter().map(|r| json!(r.to_vec())).collect())
}

/// Selection, S-EGCM spectrum, EDR directions and training projections.
fn analysis_json(
    c: &CoefficientMatrix<f64>,
    x: ArrayView2<f64>,
    names: &[String],
    view: View,
    dims: Option<usize>,
) -> CliResult<(Value, Array2<f64>)> {
    let sel = select(c.view());
    let mut out = json!({
        "selected": sel.selected,
        "selected_names": sel.selected.iter().map(|&j| names[j].clone()).collect::<Vec<_>>(),
        "row_norms": sel.row_norms.to_vec(),
    });
    if view == View::Selection {
        return Ok((out, Array2::zeros((x.nrows(), 0))));
    }
    let edr = edr_directions(c.view(), dims)?;
    let z = project(x, &edr)?;
    let o = out.as_object_mut().expect("object");
    o.insert("spectrum".into(), json!(edr.spectrum.to_vec()));
    o.insert("eigenvalues".into(), json!(edr.eigenvalues.to_vec()));
    o.insert("directions".into(), rows_json(edr.directions.t()));
    o.insert("support".into(), json!(edr.support));
    o.insert("truncated".into(), json!(edr.truncated));
    o.insert("projections".into(), rows_json(z.view()));
    Ok((out, edr.directions))
}

fn exactly_one(flags: &[(&str, bool)]) -> CliResult<usize> {
    let set: Vec<usize> = (0..flags.len()).filter(|&k| flags[k].1).collect();
    if set.len() == 1 {
        return Ok(set[0]);
    }
    let names: Vec<&str> = flags.iter().map(|f| f.0).collect();
    usage(format!("exactly one of {} is required", names.join(", ")))
}

// ---------- fit / select / edr ----------

fn cmd_fit(a: &FitArgs, view: View, dims: Option<usize>) -> CliResult<Outcome> {
    let data = load(&a.data)?;
    match data.train.task() {
        Task::Regression => fit_regression(a, data, view, dims),
        Task::Classification => fit_classification(a, data, view, dims),
    }
}

fn fit_regression(
    a: &FitArgs,
    data: Loaded,
    view: View,
    dims: Option<usize>,
) -> CliResult<Outcome> {
    let s = &a.solver;
    if s.lambda1.is_some() || s.lambda2.is_some() {
        return usage("--lambda1/--lambda2 apply to classification; use --lambda");
    }
    let cfg = regression_config(s)?;
    let train = &data.train;
    let prob = RegressionProblem::new(train, &cfg)?;
    let lmax = prob.lambda_max();
    let which = exactly_one(&[
        ("--lambda", s.lambda.is_some()),
        ("--lambda-rel", s.lambda_rel.is_some()),
        ("--target-count", s.target_count.is_some()),
        ("--auto-lambda", s.auto_lambda),
    ])?;
    let mut tuning = Value::Null;
    let (lambda, c, report) = match which {
        0 | 1 => {
            let lambda = s
                .lambda
                .unwrap_or_else(|| s.lambda_rel.unwrap_or(0.0) * lmax);
            let (c, r) = prob.fit(&cfg.with_lambda(lambda))?;
            (lambda, c, r)
        }
        2 => {
            let f = prob.fit_with_cardinality(&cfg, s.target_count.unwrap_or(0))?;
            tuning = json!({ "rule": "target-count", "exact": f.exact, "selected": f.selected });
            (f.lambda, f.coefficients, f.report)
        }
        _ => {
            let grid = resolve_grid(
                &GridSpec::Auto,
                lmax,
                &GridSpec::Log {
                    count: 20,
                    ratio: 1e-3,
                },
            )?;
            let (best, rows) = tune_regression(&prob, train.y(), &cfg, &grid)?;
            tuning = json!({ "rule": "loo-1nn-on-edr-projections", "table": rows });
            let lambda = grid[best];
            let (c, r) = prob.fit(&cfg.with_lambda(lambda))?;
            (lambda, c, r)
        }
    };
    let (mut results, dirs) = analysis_json(&c, train.x(), &data.info.variables, view, dims)?;
    let o = results.as_object_mut().expect("object");
    o.insert("lambda".into(), json!(lambda));
    o.insert("lambda_max".into(), json!(lmax));
    o.insert("report".into(), report_json(&report));
    if !tuning.is_null() {
        o.insert("tuning".into(), tuning);
    }
    if let (Some(test), true) = (&data.test, view != View::Selection) {
        let zt = test.x().dot(&dirs);
        let ztr = train.x().dot(&dirs);
        o.insert("test_projections".into(), rows_json(zt.view()));
        o.insert(
            "test_mse_1nn".into(),
            json!(nn_test_mse(ztr.view(), train.y(), zt.view(), test.y())),
        );
    }
    let config = base_config_json(
        Task::Regression,
        &cfg.weights,
        prob.precomputed().kernel(),
        prob.precomputed().is_reduced(),
        s,
        train,
    )?;
    let rec = record(
        data.seed,
        Some(data.info),
        config,
        results,
        report.converged,
    );
    Ok(with_record(rec, None))
}

fn nn_test_mse(
    z_train: ArrayView2<f64>,
    y_train: ndarray::ArrayView1<f64>,
    z_test: ArrayView2<f64>,
    y_test: ndarray::ArrayView1<f64>,
) -> f64 {
    let mut total = 0.0;
    for (zt, yt) in z_test.rows().into_iter().zip(y_test.iter()) {
        let mut best = (f64::INFINITY, 0);
        for (j, zr) in z_train.rows().into_iter().enumerate() {
            let d: f64 = zt
                .iter()
                .zip(zr.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < best.0 {
                best = (d, j);
            }
        }
        total += (yt - y_train[best.1]).powi(2);
    }
    total / z_test.nrows().max(1) as f64
}

fn error_count(model: &ClassModel<f64>, data: &Dataset<f64>) -> CliResult<usize> {
    let mut errors = 0;
    for i in 0..data.n_samples() {
        if model.predict_label(data.sample(i))? != data.y()[i] {
            errors += 1;
        }
    }
    Ok(errors)
}

fn fit_classification(
    a: &FitArgs,
    data: Loaded,
    view: View,
    dims: Option<usize>,
) -> CliResult<Outcome> {
    let s = &a.solver;
    if s.lambda.is_some() || s.target_count.is_some() {
        return usage(
            "classification takes --lambda1 and one of --lambda2, --lambda-rel, --auto-lambda",
        );
    }
    let cfg = classification_config(s)?;
    let train = &data.train;
    let prob = ClassificationProblem::new(train, &cfg)?;
    let hmax = prob.lambda2_max_heuristic();
    let which = exactly_one(&[
        ("--lambda2", s.lambda2.is_some()),
        ("--lambda-rel", s.lambda_rel.is_some()),
        ("--auto-lambda", s.auto_lambda),
    ])?;
    let mut tuning = Value::Null;
    let lambda2 = match which {
        0 => s.lambda2.unwrap_or(0.0),
        1 => s.lambda_rel.unwrap_or(0.0) * hmax,
        _ => {
            let grid: Vec<f64> = DEFAULT_REL_GRID.iter().map(|f| f * hmax).collect();
            let (best, rows) = tune_classification(train, &cfg, &[cfg.lambda1], &grid)?;
            tuning = json!({ "rule": "loo-misclassification", "table": rows });
            grid[best]
        }
    };
    let cfg = cfg.with_lambdas(cfg.lambda1, lambda2);
    let (model, report) = prob.fit(&cfg)?;
    let (mut results, _) =
        analysis_json(&model.c_tilde, train.x(), &data.info.variables, view, dims)?;
    let o = results.as_object_mut().expect("object");
    o.insert("lambda1".into(), json!(cfg.lambda1));
    o.insert("lambda2".into(), json!(lambda2));
    o.insert("lambda2_max_heuristic".into(), json!(hmax));
    o.insert("report".into(), report_json(&report.report));
    o.insert("training_errors".into(), json!(error_count(&model, train)?));
    if let Some(test) = &data.test {
        o.insert("test_errors".into(), json!(error_count(&model, test)?));
        o.insert("test_n".into(), json!(test.n_samples()));
    }
    if !tuning.is_null() {
        o.insert("tuning".into(), tuning);
    }
    let config = base_config_json(
        Task::Classification,
        &cfg.weights,
        Some(&model.kernel),
        prob.precomputed().is_reduced(),
        s,
        train,
    )?;
    let rec = record(
        data.seed,
        Some(data.info),
        config,
        results,
        report.report.converged,
    );
    Ok(with_record(rec, None))
}

// ---------- path ----------

fn cmd_path(a: &PathArgs) -> CliResult<Outcome> {
    let data = load(&a.fit.data)?;
    let s = &a.fit.solver;
    let spec = parse_grid(&a.grid)?;
    let default = GridSpec::Log {
        count: 50,
        ratio: 1e-3,
    };
    let names = data.info.variables.clone();
    let mut header = vec!["lambda".to_string(), "selected".to_string()];
    header.extend(names.iter().cloned());
    let mut table = Table::new(header);
    let mut points = Vec::new();
    let mut converged = true;

    let (config, top) = match (a.method, data.train.task()) {
        (MethodArg::Lasso, Task::Regression) => {
            let prob = LassoProblem::new(&data.train)?;
            let lmax = prob.lambda_max();
            let grid = resolve_grid(&spec, lmax, &default)?;
            for fit in lasso_path(&data.train, Some(&grid), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)? {
                converged &= fit.converged;
                let mut row = vec![num(fit.lambda), fit.support().len().to_string()];
                row.extend(fit.coefficients.iter().map(|&v| num(v)));
                table.push(row);
                points.push(json!({
                    "lambda": fit.lambda,
                    "selected": fit.support(),
                    "coefficients": fit.coefficients.to_vec(),
                    "intercept": fit.intercept,
                    "converged": fit.converged,
                }));
            }
            (
                json!({ "method": "lasso", "lambda_scale": "standardized design" }),
                lmax,
            )
        }
        (MethodArg::Lasso, Task::Classification) => {
            return usage("the LASSO baseline is regression only")
        }
        (MethodArg::Sgl, Task::Regression) => {
            let cfg = regression_config(s)?;
            let prob = RegressionProblem::new(&data.train, &cfg)?;
            let lmax = prob.lambda_max();
            let grid = resolve_grid(&spec, lmax, &default)?;
            for pt in prob.regularization_path(&cfg, Some(&grid))? {
                converged &= pt.report.converged;
                path_row(
                    &mut table,
                    &mut points,
                    pt.lambda,
                    &pt.selection.selected,
                    pt.selection.row_norms.to_vec(),
                    pt.report.converged,
                );
            }
            let mut c = base_config_json(
                Task::Regression,
                &cfg.weights,
                prob.precomputed().kernel(),
                prob.precomputed().is_reduced(),
                s,
                &data.train,
            )?;
            c["method"] = json!("sgl");
            (c, lmax)
        }
        (MethodArg::Sgl, Task::Classification) => {
            let cfg = classification_config(s)?;
            let prob = ClassificationProblem::new(&data.train, &cfg)?;
            let hmax = prob.lambda2_max_heuristic();
            let grid = resolve_grid(&spec, hmax, &default)?;
            let (mut alpha, mut c) = (
                ndarray::Array1::zeros(prob.n()),
                Array2::zeros((prob.p(), prob.n())),
            );
            let mut kernel = None;
            for &l2 in &grid {
                let (m, r) = prob.fit_from(alpha, c, &cfg.with_lambdas(cfg.lambda1, l2))?;
                converged &= r.report.converged;
                let sel = select(m.c_tilde.view());
                path_row(
                    &mut table,
                    &mut points,
                    l2,
                    &sel.selected,
                    sel.row_norms.to_vec(),
                    r.report.converged,
                );
                alpha = m.alpha.clone();
                c = m.c_tilde.0.clone();
                kernel = Some(m.kernel);
            }
            let mut c = base_config_json(
                Task::Classification,
                &cfg.weights,
                kernel.as_ref(),
                prob.precomputed().is_reduced(),
                s,
                &data.train,
            )?;
            c["method"] = json!("sgl");
            c["lambda1"] = json!(cfg.lambda1);
            (c, hmax)
        }
    };
    let results = json!({ "lambda_max": top, "path": points });
    let rec = record(data.seed, Some(data.info), config, results, converged);
    Ok(with_record(rec, Some(table)))
}

fn path_row(
    table: &mut Table,
    points: &mut Vec<Value>,
    lambda: f64,
    selected: &[usize],
    norms: Vec<f64>,
    converged: bool,
) {
    let mut row = vec![num(lambda), selected.len().to_string()];
    row.extend(norms.iter().map(|&v| num(v)));
    table.push(row);
    points.push(json!({
        "lambda": lambda,
        "selected": selected,
        "row_norms": norms,
        "converged": converged,
    }));
}

// ---------- tune ----------

fn cmd_tune(a: &TuneArgs) -> CliResult<Outcome> {
    let data = load(&a.fit.data)?;
    let s = &a.fit.solver;
    let spec = parse_grid(&a.grid)?;
    match data.train.task() {
        Task::Regression => {
            let cfg = regression_config(s)?;
            let prob = RegressionProblem::new(&data.train, &cfg)?;
            let lmax = prob.lambda_max();
            let grid = resolve_grid(
                &spec,
                lmax,
                &GridSpec::Log {
                    count: 20,
                    ratio: 1e-3,
                },
            )?;
            let (best, rows) = tune_regression(&prob, data.train.y(), &cfg, &grid)?;
            let mut table = Table::new(
                ["lambda", "selected", "dims", "loo_mse"]
                    .map(String::from)
                    .to_vec(),
            );
            for r in &rows {
                table.push(vec![
                    num(r.lambda),
                    r.selected.to_string(),
                    r.dims.to_string(),
                    num(r.loo_mse),
                ]);
            }
            let lambda = grid[best];
            let (c, report) = prob.fit(&cfg.with_lambda(lambda))?;
            let (mut results, _) =
                analysis_json(&c, data.train.x(), &data.info.variables, View::Full, None)?;
            let o = results.as_object_mut().expect("object");
            o.insert("rule".into(), json!("loo-1nn-on-edr-projections"));
            o.insert("lambda".into(), json!(lambda));
            o.insert("lambda_max".into(), json!(lmax));
            o.insert("table".into(), json!(rows));
            o.insert("report".into(), report_json(&report));
            let config = base_config_json(
                Task::Regression,
                &cfg.weights,
                prob.precomputed().kernel(),
                prob.precomputed().is_reduced(),
                s,
                &data.train,
            )?;
            let converged = report.converged && rows.iter().all(|r| r.converged);
            let rec = record(data.seed, Some(data.info), config, results, converged);
            Ok(with_record(rec, Some(table)))
        }
        Task::Classification => {
            let cfg = classification_config(s)?;
            let prob = ClassificationProblem::new(&data.train, &cfg)?;
            let hmax = prob.lambda2_max_heuristic();
            let grid2 = resolve_grid(&spec, hmax, &GridSpec::Relative(DEFAULT_REL_GRID.to_vec()))?;
            let grid1 = match &a.grid1 {
                Some(g) => parse_list(g)?,
                None => vec![cfg.lambda1],
            };
            let (best, rows) = tune_classification(&data.train, &cfg, &grid1, &grid2)?;
            let mut table = Table::new(
                ["lambda1", "lambda2", "loo_errors", "n", "selected"]
                    .map(String::from)
                    .to_vec(),
            );
            for r in &rows {
                table.push(vec![
                    num(r.lambda1),
                    num(r.lambda2),
                    r.loo_errors.to_string(),
                    r.n.to_string(),
                    r.selected.to_string(),
                ]);
            }
            let chosen = cfg.with_lambdas(rows[best].lambda1, rows[best].lambda2);
            let (model, report) = prob.fit(&chosen)?;
            let (mut results, _) = analysis_json(
                &model.c_tilde,
                data.train.x(),
                &data.info.variables,
                View::Full,
                None,
            )?;
            let o = results.as_object_mut().expect("object");
            o.insert("rule".into(), json!("loo-misclassification"));
            o.insert("lambda1".into(), json!(chosen.lambda1));
            o.insert("lambda2".into(), json!(chosen.lambda2));
            o.insert("lambda2_max_heuristic".into(), json!(hmax));
            o.insert("loo_errors".into(), json!(rows[best].loo_errors));
            o.insert("table".into(), json!(rows));
            o.insert("report".into(), report_json(&report.report));
            o.insert(
                "training_errors".into(),
                json!(error_count(&model, &data.train)?),
            );
            if let Some(test) = &data.test {
                o.insert("test_errors".into(), json!(error_count(&model, test)?));
                o.insert("test_n".into(), json!(test.n_samples()));
            }
            let config = base_config_json(
                Task::Classification,
                &chosen.weights,
                Some(&model.kernel),
                prob.precomputed().is_reduced(),
                s,
                &data.train,
            )?;
            let converged = report.report.converged && rows.iter().all(|r| r.converged);
            let rec = record(data.seed, Some(data.info), config, results, converged);
            Ok(with_record(rec, Some(table)))
        }
    }
}

// ---------- simulate / benchmark ----------

fn cmd_simulate(a: &SimulateArgs) -> CliResult<Outcome> {
    let Some(which) = a.data.synthetic else {
        return usage("simulate needs --synthetic");
    };
    let data = load(&a.data)?;
    debug_assert!(data.test.is_none());
    let mut buf = Vec::new();
    write_csv(&mut buf, &data.train, Some(&data.info.variables))?;
    let _ = which;
    Ok(Outcome {
        record: None,
        table: None,
        csv: Some(String::from_utf8(buf).expect("csv is utf-8")),
        exit_code: EXIT_OK,
    })
}

fn cmd_benchmark(a: &BenchArgs) -> CliResult<Outcome> {
    let mut cfg = BenchmarkConfig::standard(a.repeats, a.seed);
    cfg.target = a.target_count;
    cfg.lasso.target = crate::lasso::LassoTarget::Cardinality(a.target_count);
    cfg.sgl.weights = parse_weights(&a.weights, parse_bandwidth(&a.bandwidth)?)?;
    cfg.sgl.kernel = kernel_spec(a.kernel, Bandwidth::MedianHalf);
    cfg.sgl.tol = a.tol;
    cfg.sgl.max_iter = a.max_iter;
    let t = selection_benchmark(&cfg, threads_from_env())?;
    let p = t.sgl_frequency.len();
    let mut header = vec!["method".to_string()];
    header.extend(default_names(p));
    let mut table = Table::new(header);
    for (name, f) in [("SGL", &t.sgl_frequency), ("LASSO", &t.lasso_frequency)] {
        let mut row = vec![name.to_string()];
        row.extend(f.iter().map(|c| c.to_string()));
        table.push(row);
    }
    let converged = t.outcomes.iter().all(|o| o.sgl_converged);
    let config = json!({
        "repeats": a.repeats,
        "target_count": a.target_count,
        "weights": a.weights,
        "bandwidth": a.bandwidth,
        "kernel": format!("{:?}", a.kernel).to_lowercase(),
        "centered": cfg.center,
        "tol": a.tol,
        "max_iter": a.max_iter,
    });
    let results = json!({
        "sgl_frequency": t.sgl_frequency,
        "lasso_frequency": t.lasso_frequency,
        "sgl_exact": t.outcomes.iter().filter(|o| o.sgl_exact).count(),
        "lasso_exact": t.outcomes.iter().filter(|o| o.lasso_exact).count(),
        "outcomes": t.outcomes,
    });
    let rec = record(Some(a.seed), None, config, results, converged);
    Ok(with_record(rec, Some(table)))
}
