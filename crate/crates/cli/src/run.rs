//! The three runners. Points are computed on a bounded worker pool and
//! written by the calling thread in `(k, τ)` order.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use bcanneal::analysis::{
    adiabatic_error, asymptotic_window, bound_constants, fit_power_law, hamiltonian_case_envelope, positivity_diagnostics,
    steady_gibbs_distance, FitWindow, PowerLawFit,
};
use bcanneal::{PositivityReport, Schedule};
use serde::Serialize;

use crate::config::{ExperimentConfig, Model};
use crate::output::{num, write_csv, write_json};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
}

impl RunOptions {
    /// `--out`, then the config's `output`, then `./out`.
    pub fn resolve(out: Option<PathBuf>, config: &ExperimentConfig, workers: Option<usize>) -> Self {
        let out = out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
        let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Self { out, workers: workers.max(1) }
    }
}

/// Applies `f` to every job on at most `workers` threads; results keep the
/// job order.
pub fn parallel_map<J: Sync, R: Send + Sync>(jobs: &[J], workers: usize, f: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Vec<OnceLock<R>> = jobs.iter().map(|_| OnceLock::new()).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let _ = slots[i].set(f(&jobs[i]));
            });
        }
    });
    slots.into_iter().map(|s| s.into_inner().expect("every job ran")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: &'static str,
    pub config: ExperimentConfig,
}

impl Provenance {
    fn of(config: &ExperimentConfig) -> Self {
        Self { config_hash: config.hash(), seed: config.seed, version: env!("CARGO_PKG_VERSION"), config: config.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RowFailure {
    pub k: Option<usize>,
    pub tau_ns: Option<f64>,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub model: &'static str,
    pub k: usize,
    pub tau_ns: f64,
    pub error_trace_norm: f64,
    pub in_fit_window: bool,
}

/// Power-law fit of one order's rows.
#[derive(Clone, Debug, Serialize)]
pub struct OrderFit {
    pub k: usize,
    pub fit: Option<PowerLawFit>,
    pub window: Option<FitWindow>,
    /// `τ` range covered by the window.
    pub tau_window: Option<(f64, f64)>,
    pub note: Option<String>,
}

impl OrderFit {
    pub fn alpha(&self) -> Option<f64> {
        self.fit.map(|f| f.alpha)
    }
}

/// Windowed fit over `(τ, error)` points sorted by `τ`.
fn windowed_fit(k: usize, points: &[(f64, f64)]) -> OrderFit {
    let failed = |note: String| OrderFit { k, fit: None, window: None, tau_window: None, note: Some(note) };
    let window = match asymptotic_window(points) {
        Ok(w) => w,
        Err(e) => return failed(e.to_string()),
    };
    match fit_power_law(&points[window.start..window.end]) {
        Ok(fit) => OrderFit {
            k,
            fit: Some(fit),
            window: Some(window),
            tau_window: Some((points[window.start].0, points[window.end - 1].0)),
            note: (!window.converged).then(|| "no straight run; fitted the last three points".to_string()),
        },
        Err(e) => failed(e.to_string()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub name: String,
    pub verb: &'static str,
    pub model: &'static str,
    pub provenance: Provenance,
    pub fits: Vec<OrderFit>,
    pub failures: Vec<RowFailure>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

impl SweepReport {
    pub fn fit(&self, k: usize) -> Option<&OrderFit> {
        self.fits.iter().find(|f| f.k == k)
    }

    /// Measured error at `(k, τ)`.
    pub fn error(&self, k: usize, tau: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.k == k && r.tau_ns == tau).map(|r| r.error_trace_norm)
    }
}

fn sweep_point(config: &ExperimentConfig, k: usize, tau: f64) -> Result<f64, CliError> {
    match config.model {
        Model::Hamiltonian => {
            let c = config.closed.as_ref().ok_or_else(|| CliError::Validation("model 'hamiltonian' needs a [closed] section".into()))?;
            Ok(hamiltonian_case_envelope(&config.closed_case(k)?, tau, c.steps_per_ns, c.phase_samples)?)
        }
        _ => Ok(adiabatic_error(&config.model(k, tau)?, &config.error_policy())?.error),
    }
}

fn jobs(config: &ExperimentConfig) -> Vec<(usize, f64)> {
    let taus = config.taus();
    config.orders().into_iter().flat_map(|k| taus.iter().map(move |&t| (k, t))).collect()
}

/// Adiabatic error over the `(k, τ)` grid with per-order windowed fits.
/// Writes `{name}.csv` and `{name}.json`.
pub fn run_sweep(config: &ExperimentConfig, opts: &RunOptions) -> Result<SweepReport, CliError> {
    config.validate()?;
    let jobs = jobs(config);
    let results = parallel_map(&jobs, opts.workers, |&(k, tau)| sweep_point(config, k, tau));
    let model = config.model.name();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (&(k, tau_ns), r) in jobs.iter().zip(results) {
        match r {
            Ok(e) => rows.push(SweepRow { model, k, tau_ns, error_trace_norm: e, in_fit_window: false }),
            Err(e) => failures.push(RowFailure { k: Some(k), tau_ns: Some(tau_ns), error: e.to_string() }),
        }
    }
    let mut fits = Vec::new();
    for k in config.orders() {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].k == k).collect();
        let points: Vec<(f64, f64)> = idx.iter().map(|&i| (rows[i].tau_ns, rows[i].error_trace_norm)).collect();
        let fit = windowed_fit(k, &points);
        if let Some(w) = fit.window {
            idx.iter().enumerate().filter(|(j, _)| w.contains(*j)).for_each(|(_, &i)| rows[i].in_fit_window = true);
        }
        fits.push(fit);
    }
    let header: Vec<String> = ["model", "k", "tau_ns", "error_trace_norm", "in_fit_window"].map(String::from).into();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.model.into(), r.k.to_string(), num(r.tau_ns), num(r.error_trace_norm), r.in_fit_window.to_string()])
        .collect();
    let mut report =
        SweepReport { name: config.name.clone(), verb: "sweep", model, provenance: Provenance::of(config), fits, failures, rows, files: vec![] };
    report.files.push(write_csv(&opts.out, &format!("{}.csv", config.name), &header, &table)?);
    report.files.push(write_json(&opts.out, &format!("{}.json", config.name), &report)?);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivitySummary {
    pub k: usize,
    pub tau_ns: f64,
    pub max_real_part: f64,
    pub min_choi: f64,
    pub positive_real_part: bool,
    pub cp_violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GibbsSpread {
    pub tau_ns: f64,
    pub min: f64,
    pub max: f64,
    /// `(max − min)/mean` over the orders.
    pub relative_spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsReport {
    pub name: String,
    pub verb: &'static str,
    pub model: &'static str,
    pub provenance: Provenance,
    pub positivity: Vec<PositivitySummary>,
    /// Some sample has an eigenvalue real part above tolerance.
    pub positive_real_part: bool,
    pub cp_violation: bool,
    /// `(k, τ, distance)` rows.
    pub steady_gibbs: Vec<(usize, f64, f64)>,
    /// Global fit over all `τ` for each order.
    pub steady_gibbs_fits: Vec<OrderFit>,
    pub steady_gibbs_spread: Vec<GibbsSpread>,
    pub failures: Vec<RowFailure>,
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

struct DiagnosticPoint {
    spectrum: Option<PositivityReport>,
    gibbs: Option<f64>,
}

fn diagnostic_point(config: &ExperimentConfig, k: usize, tau: f64) -> Result<DiagnosticPoint, CliError> {
    let model = config.model(k, tau)?;
    let spectrum = match config.diagnostics.spectra {
        true => Some(positivity_diagnostics(&model, &config.positivity_policy())?),
        false => None,
    };
    let gibbs = match config.diagnostics.steady_gibbs {
        true => Some(steady_gibbs_distance(&model, config.integrator.kernel_spacing)?),
        false => None,
    };
    Ok(DiagnosticPoint { spectrum, gibbs })
}

/// Eigenvalue/Choi tables and steady-state to Gibbs distances. Writes
/// `{name}_spectrum.csv`, `{name}_steady_gibbs.csv` and
/// `{name}_diagnostics.json`.
pub fn run_diagnostics(config: &ExperimentConfig, opts: &RunOptions) -> Result<DiagnosticsReport, CliError> {
    config.validate()?;
    if config.model == Model::Hamiltonian {
        return Err(CliError::Validation("diagnose needs an open-system model".into()));
    }
    let jobs = jobs(config);
    let results = parallel_map(&jobs, opts.workers, |&(k, tau)| diagnostic_point(config, k, tau));
    let model = config.model.name();
    let mut report = DiagnosticsReport {
        name: config.name.clone(),
        verb: "diagnose",
        model,
        provenance: Provenance::of(config),
        positivity: vec![],
        positive_real_part: false,
        cp_violation: false,
        steady_gibbs: vec![],
        steady_gibbs_fits: vec![],
        steady_gibbs_spread: vec![],
        failures: vec![],
        files: vec![],
    };
    let mut spectrum_rows = Vec::new();
    let mut width = 0;
    for (&(k, tau_ns), r) in jobs.iter().zip(results) {
        let point = match r {
            Ok(p) => p,
            Err(e) => {
                report.failures.push(RowFailure { k: Some(k), tau_ns: Some(tau_ns), error: e.to_string() });
                continue;
            }
        };
        if let Some(rep) = point.spectrum {
            for s in &rep.samples {
                width = width.max(s.real_parts.len());
                let mut row = vec![model.to_string(), k.to_string(), num(tau_ns), num(s.t)];
                row.extend(s.real_parts.iter().map(|&x| num(x)));
                row.push(num(s.choi_min));
                spectrum_rows.push(row);
            }
            report.positive_real_part |= rep.positive_real_part;
            report.cp_violation |= rep.cp_violation;
            report.positivity.push(PositivitySummary {
                k,
                tau_ns,
                max_real_part: rep.max_real_part,
                min_choi: rep.min_choi,
                positive_real_part: rep.positive_real_part,
                cp_violation: rep.cp_violation,
            });
        }
        if let Some(d) = point.gibbs {
            report.steady_gibbs.push((k, tau_ns, d));
        }
    }
    for k in config.orders() {
        let points: Vec<(f64, f64)> = report.steady_gibbs.iter().filter(|r| r.0 == k).map(|r| (r.1, r.2)).collect();
        if points.is_empty() {
            continue;
        }
        report.steady_gibbs_fits.push(match fit_power_law(&points) {
            Ok(fit) => OrderFit { k, fit: Some(fit), window: None, tau_window: Some((points[0].0, points[points.len() - 1].0)), note: None },
            Err(e) => OrderFit { k, fit: None, window: None, tau_window: None, note: Some(e.to_string()) },
        });
    }
    for tau_ns in config.taus() {
        let d: Vec<f64> = report.steady_gibbs.iter().filter(|r| r.1 == tau_ns).map(|r| r.2).collect();
        if d.len() < 2 {
            continue;
        }
        let (min, max) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        report.steady_gibbs_spread.push(GibbsSpread { tau_ns, min, max, relative_spread: (max - min) / mean });
    }
    if config.diagnostics.spectra {
        let mut header: Vec<String> = ["model", "k", "tau_ns", "t_ns"].map(String::from).into();
        header.extend((0..width).map(|i| format!("re_{i}")));
        header.push("choi_min".into());
        report.files.push(write_csv(&opts.out, &format!("{}_spectrum.csv", config.name), &header, &spectrum_rows)?);
    }
    if config.diagnostics.steady_gibbs {
        let header: Vec<String> = ["model", "k", "tau_ns", "gibbs_distance"].map(String::from).into();
        let rows: Vec<Vec<String>> = report.steady_gibbs.iter().map(|&(k, t, d)| vec![model.into(), k.to_string(), num(t), num(d)]).collect();
        report.files.push(write_csv(&opts.out, &format!("{}_steady_gibbs.csv", config.name), &header, &rows)?);
    }
    report.files.push(write_json(&opts.out, &format!("{}_diagnostics.json", config.name), &report)?);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleBound {
    pub schedule: String,
    pub b0: f64,
    pub a1: f64,
    pub b1: f64,
    pub tau_star: f64,
}

impl ScheduleBound {
    pub fn bound(&self, tau: f64) -> f64 {
        (self.b0 / tau).min(self.a1 / tau + self.b1 / (tau * tau))
    }
}

/// Whether each constant strictly decreases from `baseline` to `variant`.
#[derive(Clone, Debug, Serialize)]
pub struct Improvement {
    pub baseline: String,
    pub variant: String,
    pub b0: bool,
    pub a1: bool,
    pub b1: bool,
}

impl Improvement {
    pub fn holds(&self) -> bool {
        self.b0 && self.a1 && self.b1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub schedule: String,
    pub tau_ns: f64,
    pub error: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub name: String,
    pub verb: &'static str,
    pub provenance: Provenance,
    pub constants: Vec<ScheduleBound>,
    pub improvement: Option<Improvement>,
    pub checks: Vec<BoundCheck>,
    pub failures: Vec<RowFailure>,
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

fn bound_schedules(config: &ExperimentConfig) -> Result<Vec<(String, Option<usize>, Schedule)>, CliError> {
    let mut out: Vec<_> = config.orders().into_iter().map(|k| (format!("k{k}"), Some(k), config.schedule(k))).collect();
    out.push(("linear".into(), None, Schedule::new(0)));
    let delta = config.bounds.flatten_delta;
    out.push((format!("flattened-{delta}"), None, Schedule::end_flattened(delta)?));
    Ok(out)
}

/// Constants and curve of the two-branch bound for each configured order,
/// the linear ramp and its end-flattened variant, plus measured errors at
/// `bounds.measure_tau`. Writes `{name}_bounds.csv`,
/// `{name}_bound_check.csv` and `{name}_bounds.json`.
pub fn run_bounds(config: &ExperimentConfig, opts: &RunOptions) -> Result<BoundsReport, CliError> {
    config.validate()?;
    if config.model != Model::Dlame {
        return Err(CliError::Validation(format!("bounds need model 'dlame', got '{}'", config.model.name())));
    }
    let schedules = bound_schedules(config)?;
    let n = config.bounds.grid_points;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let fd = config.finite_difference();
    let search = config.norm_search();
    let constants = parallel_map(&schedules, opts.workers, |(_, _, sched)| -> Result<_, CliError> {
        let model = config.model_with(sched.clone(), 1.0)?;
        Ok(bound_constants(&model, &grid, &fd, &search)?)
    });
    let mut report = BoundsReport {
        name: config.name.clone(),
        verb: "bounds",
        provenance: Provenance::of(config),
        constants: vec![],
        improvement: None,
        checks: vec![],
        failures: vec![],
        files: vec![],
    };
    let mut ok = Vec::new();
    for ((label, k, sched), c) in schedules.iter().zip(constants) {
        match c {
            Ok(c) => {
                report.constants.push(ScheduleBound { schedule: label.clone(), b0: c.b0, a1: c.a1, b1: c.b1, tau_star: c.tau_star });
                ok.push((label.clone(), sched.clone()));
            }
            Err(e) => report.failures.push(RowFailure { k: *k, tau_ns: None, error: format!("{label}: {e}") }),
        }
    }
    let find = |label: &str| report.constants.iter().find(|c| c.schedule == label);
    let variant = format!("flattened-{}", config.bounds.flatten_delta);
    if let (Some(base), Some(var)) = (find("linear"), find(&variant)) {
        report.improvement =
            Some(Improvement { baseline: base.schedule.clone(), variant: var.schedule.clone(), b0: var.b0 < base.b0, a1: var.a1 < base.a1, b1: var.b1 < base.b1 });
    }
    let checks: Vec<(usize, f64)> = (0..ok.len()).flat_map(|i| config.bounds.measure_tau.iter().map(move |&t| (i, t))).collect();
    let measured = parallel_map(&checks, opts.workers, |&(i, tau)| -> Result<f64, CliError> {
        Ok(adiabatic_error(&config.model_with(ok[i].1.clone(), tau)?, &config.error_policy())?.error)
    });
    for (&(i, tau_ns), m) in checks.iter().zip(measured) {
        let bound = report.constants[i].bound(tau_ns);
        match m {
            Ok(error) => report.checks.push(BoundCheck { schedule: ok[i].0.clone(), tau_ns, error, bound, holds: error <= bound }),
            Err(e) => report.failures.push(RowFailure { k: None, tau_ns: Some(tau_ns), error: format!("{}: {e}", ok[i].0) }),
        }
    }
    let header: Vec<String> = ["schedule", "tau_ns", "branch_b0", "branch_a1b1", "bound"].map(String::from).into();
    let mut curve = Vec::new();
    for c in &report.constants {
        for tau in config.taus() {
            let (b0, a1b1) = (c.b0 / tau, c.a1 / tau + c.b1 / (tau * tau));
            curve.push(vec![c.schedule.clone(), num(tau), num(b0), num(a1b1), num(b0.min(a1b1))]);
        }
    }
    report.files.push(write_csv(&opts.out, &format!("{}_bounds.csv", config.name), &header, &curve)?);
    let header: Vec<String> = ["schedule", "tau_ns", "error_trace_norm", "bound", "holds"].map(String::from).into();
    let rows: Vec<Vec<String>> =
        report.checks.iter().map(|c| vec![c.schedule.clone(), num(c.tau_ns), num(c.error), num(c.bound), c.holds.to_string()]).collect();
    report.files.push(write_csv(&opts.out, &format!("{}_bound_check.csv", config.name), &header, &rows)?);
    report.files.push(write_json(&opts.out, &format!("{}_bounds.json", config.name), &report)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TauSpec;

    #[test]
    fn pool_keeps_job_order() {
        let jobs: Vec<u64> = (0..37).collect();
        for workers in [1, 3, 64] {
            let out = parallel_map(&jobs, workers, |&j| j * j);
            assert_eq!(out, jobs.iter().map(|j| j * j).collect::<Vec<_>>());
        }
        assert!(parallel_map(&[] as &[u8], 4, |&x| x).is_empty());
    }

    #[test]
    fn windowed_fit_flags_its_points() {
        let points: Vec<(f64, f64)> = (0..6).map(|i| (10.0 * 2f64.powi(i), 3.0 / (10.0 * 2f64.powi(i)).powi(2))).collect();
        let f = windowed_fit(1, &points);
        let fit = f.fit.unwrap();
        assert!((fit.alpha - 2.0).abs() < 1e-10);
        assert!(f.window.unwrap().converged);
        let short = windowed_fit(1, &points[..2]);
        assert!(short.fit.is_none() && short.note.is_some());
    }

    fn quick(model: Model) -> ExperimentConfig {
        let mut c = ExperimentConfig::preset("fig3").unwrap();
        c.name = "quick".into();
        c.model = model;
        c.k = vec![0, 1];
        c.tau = TauSpec::List(vec![2.0, 4.0, 8.0]);
        c
    }

    #[test]
    fn sweep_writes_rows_in_order_and_is_worker_independent() {
        let dir = tempfile::tempdir().unwrap();
        let c = quick(Model::Dlame);
        let one = run_sweep(&c, &RunOptions { out: dir.path().join("a"), workers: 1 }).unwrap();
        let many = run_sweep(&c, &RunOptions { out: dir.path().join("b"), workers: 4 }).unwrap();
        let keys: Vec<(usize, f64)> = one.rows.iter().map(|r| (r.k, r.tau_ns)).collect();
        assert_eq!(keys, vec![(0, 2.0), (0, 4.0), (0, 8.0), (1, 2.0), (1, 4.0), (1, 8.0)]);
        assert!(one.failures.is_empty());
        for name in ["quick.csv", "quick.json"] {
            let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
            let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
        assert_eq!(many.fits.len(), 2);
    }

    #[test]
    fn failed_rows_are_recorded_and_the_rest_kept() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = quick(Model::Dlame);
        // A gapless Hamiltonian makes every point fail while the run completes.
        c.hamiltonian.omega_z = 1e-300;
        c.hamiltonian.omega_x = 1e-300;
        let r = run_sweep(&c, &RunOptions { out: dir.path().into(), workers: 2 }).unwrap();
        assert_eq!(r.failures.len(), 6);
        assert!(r.rows.is_empty());
        assert!(dir.path().join("quick.json").exists());
    }

    #[test]
    fn diagnostics_of_davies_are_clean() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = quick(Model::Dlame);
        c.k = vec![0];
        c.tau = TauSpec::List(vec![5.0]);
        c.diagnostics.intervals = 10;
        let r = run_diagnostics(&c, &RunOptions { out: dir.path().into(), workers: 1 }).unwrap();
        assert!(!r.positive_real_part && !r.cp_violation, "{:?}", r.positivity);
        assert!(r.positivity[0].min_choi >= -1e-8);
        assert!(r.steady_gibbs[0].2 < 1e-7);
        let spectrum = std::fs::read_to_string(dir.path().join("quick_spectrum.csv")).unwrap();
        assert!(spectrum.starts_with("model,k,tau_ns,t_ns,re_0,re_1,re_2,re_3,choi_min\n"));
        assert_eq!(spectrum.lines().count(), 12);
    }

    #[test]
    fn bounds_need_davies_and_produce_the_pointwise_minimum() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::preset("fig1").unwrap();
        c.k = vec![1];
        c.bounds.grid_points = 11;
        c.bounds.measure_tau = vec![50.0];
        let r = run_bounds(&c, &RunOptions { out: dir.path().into(), workers: 1 }).unwrap();
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert_eq!(r.constants.len(), 3);
        for b in &r.constants {
            assert!(b.a1 < b.b0);
            let t = b.tau_star;
            assert!((b.b0 / t - (b.a1 / t + b.b1 / (t * t))).abs() < 1e-9 * b.b0 / t);
        }
        assert!(r.checks.iter().all(|c| c.holds));
        let curve = std::fs::read_to_string(dir.path().join("fig1_bounds.csv")).unwrap();
        for line in curve.lines().skip(1) {
            let f: Vec<f64> = line.split(',').skip(2).map(|x| x.parse().unwrap()).collect();
            assert_eq!(f[2], f[0].min(f[1]));
        }
        let mut wrong = c.clone();
        wrong.model = Model::Sprme;
        assert!(matches!(run_bounds(&wrong, &RunOptions { out: dir.path().into(), workers: 1 }), Err(CliError::Validation(_))));
    }
}
