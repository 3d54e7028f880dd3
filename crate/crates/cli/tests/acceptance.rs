//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Runs the full presets and takes several minutes on one core.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bcanneal::analysis::{
    adiabatic_series, closed_system_error, first_term_dual, hamiltonian_case_experiment, FiniteDifference,
};
use bcanneal::propagation::{evolve, propagator, StepPolicy};
use bcanneal::qops::{gibbs_state, induced_norm_1_1, trace_norm};
use bcanneal::Operator;
use bcanneal_cli::config::ExperimentConfig;
use bcanneal_cli::run::{run_bounds, run_diagnostics, run_sweep, RunOptions, SweepReport};
use bcanneal_cli::CliError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), CliError>;

fn preset(name: &str) -> ExperimentConfig {
    ExperimentConfig::preset(name).expect("presets are valid")
}

fn opts(dir: &Path) -> RunOptions {
    RunOptions { out: dir.to_path_buf(), workers: std::thread::available_parallelism().map_or(1, |n| n.get()) }
}

fn timed<T>(f: impl FnOnce() -> Result<T, CliError>) -> Result<(T, Duration), CliError> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed()))
}

fn fmt_alphas(r: &SweepReport) -> String {
    r.fits.iter().map(|f| f.alpha().map_or("none".into(), |a| format!("{a:.3}"))).collect::<Vec<_>>().join(",")
}

/// Reference exponents per panel; ±0.2 and at most 30 min per panel.
fn fig2(sweeps: &[(&str, SweepReport, Duration)]) -> Outcome {
    #[allow(clippy::approx_constant)]
    let reference: [(&str, [f64; 4]); 3] =
        [("fig2a", [1.00, 1.96, 2.86, 3.89]), ("fig2b", [0.99, 1.99, 3.03, 3.99]), ("fig2c", [0.99, 1.99, 3.14, 3.85])];
    let mut ok = true;
    let mut detail = Vec::new();
    for ((name, want), (_, report, took)) in reference.iter().zip(sweeps) {
        for (k, w) in want.iter().enumerate() {
            ok &= report.fit(k).and_then(|f| f.alpha()).is_some_and(|a| (a - w).abs() <= 0.2);
        }
        ok &= report.failures.is_empty() && took.as_secs_f64() <= 1800.0;
        detail.push(format!("{name} alpha=({}) want={want:?} {:.0}s", fmt_alphas(report), took.as_secs_f64()));
    }
    Ok((ok, detail.join("; ")))
}

/// `b_n(1) = 0` for `n ≤ k`, and the 12 mK error slope is `k + 1 ± 0.2`.
fn cancellation(fig2b: &SweepReport) -> Outcome {
    let config = preset("fig2b");
    let fd = FiniteDifference::default();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for k in 0..=3 {
        let series = adiabatic_series(&config.model(k, 1.0)?, k, &[1.0], &fd)?;
        for n in 1..=k {
            worst = worst.max(trace_norm(&series.terms[n - 1][0]));
        }
        ok &= fig2b.fit(k).and_then(|f| f.alpha()).is_some_and(|a| (a - (k + 1) as f64).abs() <= 0.2);
    }
    ok &= worst < 1e-6;
    Ok((ok, format!("max |b_n(1)| (n<=k) = {worst:.2e}; slopes ({}) vs 1,2,3,4", fmt_alphas(fig2b))))
}

/// `‖𝓛(s)[ρ_G(s)]‖₁ < 1e−7` at 20 random `s` per DLAME preset, with and
/// without the Lamb shift.
fn gibbs_stationarity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in ["fig1", "fig2a", "fig2b", "fig2c"] {
        for lamb in [true, false] {
            let mut config = preset(name);
            config.lamb_shift = lamb;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ lamb as u64);
            let model = config.model(1, 100.0)?;
            for _ in 0..20 {
                let s: f64 = rng.random();
                let rho = gibbs_state(&model.system_hamiltonian(s), model.bath().beta)?;
                worst = worst.max(trace_norm(&model.generator(s)?.apply(&rho)));
                count += 1;
            }
        }
    }
    Ok((worst < 1e-7, format!("max residual {worst:.2e} over {count} samples")))
}

/// Induced 1→1 norm of the DLAME propagator at 10 random `(s₀, s₁)`.
fn contraction() -> Outcome {
    let config = preset("fig2b");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed + 17);
    let search = config.norm_search();
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let mut model = config.model(i % 4, 100.0)?;
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        let e = propagator(&mut model, a.max(b), a.min(b), 100.0, &StepPolicy::default())?;
        worst = worst.max(induced_norm_1_1(&e, &search)?);
    }
    Ok((worst <= 1.0 + 1e-6, format!("max norm {worst:.12}")))
}

/// SPRME errors strictly decrease in `k` at every `τ ≥ 20`; at most 2 h.
fn fig3(dir: &Path) -> Outcome {
    let config = preset("fig3");
    let (r, took) = timed(|| run_sweep(&config, &opts(dir)))?;
    let mut ok = r.failures.is_empty() && took.as_secs_f64() <= 7200.0;
    let mut detail = Vec::new();
    for tau in config.taus().into_iter().filter(|&t| t >= 20.0) {
        let e: Vec<f64> = config.orders().iter().map(|&k| r.error(k, tau).unwrap_or(f64::NAN)).collect();
        ok &= e.windows(2).all(|w| w[1] < w[0]);
        detail.push(format!("tau={tau}: {}", e.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(">")));
    }
    Ok((ok, format!("{} ({:.0}s)", detail.join("; "), took.as_secs_f64())))
}

/// No positive real parts at 12 mK, ω_c = 16; some at 1 mK, ω_c = 25.13.
fn fig4(dir: &Path) -> Outcome {
    let top = run_diagnostics(&preset("fig4-top"), &opts(dir))?;
    let bottom = run_diagnostics(&preset("fig4-bottom"), &opts(dir))?;
    let ok = top.failures.is_empty() && bottom.failures.is_empty() && !top.positive_real_part && bottom.positive_real_part;
    let max = |r: &bcanneal_cli::run::DiagnosticsReport| r.positivity.iter().map(|p| p.max_real_part).fold(f64::NEG_INFINITY, f64::max);
    Ok((ok, format!("top max Re = {:.2e} (want <= 1e-8); bottom max Re = {:.2e} (want > 1e-8)", max(&top), max(&bottom))))
}

/// Distance falls faster than `τ^{−0.5}` and agrees across `k` within 1%.
fn steady_gibbs(dir: &Path) -> Outcome {
    let r = run_diagnostics(&preset("steady-gibbs"), &opts(dir))?;
    let slopes: Vec<f64> = r.steady_gibbs_fits.iter().map(|f| f.alpha().map_or(f64::NAN, |a| -a)).collect();
    let spread = r.steady_gibbs_spread.iter().map(|s| s.relative_spread).fold(0.0, f64::max);
    let ok = r.failures.is_empty() && slopes.len() == 4 && slopes.iter().all(|&s| s < -0.5) && spread <= 0.01;
    let slopes: Vec<String> = slopes.iter().map(|s| format!("{s:.2}")).collect();
    Ok((ok, format!("slopes ({}) want < -0.5; max k-spread {:.1}% want <= 1%", slopes.join(","), 100.0 * spread)))
}

/// Measured errors under the bound; all constants shrink under end flattening.
fn bounds(dir: &Path, fig2b: &SweepReport) -> Outcome {
    let r = run_bounds(&preset("fig1"), &opts(dir))?;
    let mut checked = r.checks.len();
    let mut ok = r.failures.is_empty() && r.checks.iter().all(|c| c.holds);
    let mut tightest = r.checks.iter().map(|c| c.error / c.bound).fold(0.0, f64::max);
    for row in &fig2b.rows {
        let Some(c) = r.constants.iter().find(|c| c.schedule == format!("k{}", row.k)) else {
            ok = false;
            continue;
        };
        ok &= row.error_trace_norm <= c.bound(row.tau_ns);
        tightest = tightest.max(row.error_trace_norm / c.bound(row.tau_ns));
        checked += 1;
    }
    let imp = r.improvement.as_ref();
    ok &= imp.is_some_and(|i| i.holds());
    let (base, var) = (r.constants.iter().find(|c| c.schedule == "linear"), r.constants.iter().next_back());
    let consts = match (base, var) {
        (Some(b), Some(v)) => format!("linear (B0,A1,B1)=({:.2e},{:.2e},{:.2e}) -> {} ({:.2e},{:.2e},{:.2e})", b.b0, b.a1, b.b1, v.schedule, v.b0, v.a1, v.b1),
        _ => "constants missing".into(),
    };
    Ok((ok, format!("{checked} points, max error/bound {tightest:.2e}; {consts}")))
}

/// Both-ends slope `k + 1 ± 0.3` with one bath qubit; `g = 0` matches the
/// closed qubit to 1e−8.
fn prop6(dir: &Path) -> Outcome {
    let config = preset("prop6");
    let r = run_sweep(&config, &opts(dir))?;
    let mut ok = r.failures.is_empty();
    for k in 0..=1 {
        ok &= r.fit(k).and_then(|f| f.alpha()).is_some_and(|a| (a - (k + 1) as f64).abs() <= 0.3);
    }
    let mut decoupled = config.clone();
    decoupled.closed.as_mut().expect("prop6 has a closed section").g = 0.0;
    let mut gap: f64 = 0.0;
    for k in 0..=1 {
        let case = decoupled.closed_case(k)?;
        for tau in [10.0, 40.0] {
            let steps = (tau * 20.0) as usize;
            gap = gap.max((hamiltonian_case_experiment(&case, tau, steps)? - closed_system_error(&case.system, tau, steps)?).abs());
        }
    }
    ok &= gap <= 1e-8;
    Ok((ok, format!("alpha=({}) want 1,2; decoupled difference {gap:.1e}", fmt_alphas(&r))))
}

/// RK4 fourth order, Simpson kernel convergence under doubling, the dual
/// formula for `b₁`, and detailed balance.
fn hygiene() -> Outcome {
    let config = preset("fig2b");
    let mut model = config.model(1, 50.0)?;
    let rho0 = gibbs_state(&model.system_hamiltonian(0.0), model.bath().beta)?;
    let mut run = |n: usize| -> Result<Operator, CliError> {
        Ok(evolve(&mut model, &rho0, 50.0, &StepPolicy { steps: Some(n), ..StepPolicy::default() })?.final_state().clone())
    };
    let (r1, r2, r4) = (run(100)?, run(200)?, run(400)?);
    let rk4_ratio = trace_norm(&(&r1 - &r2)) / trace_norm(&(&r2 - &r4));
    let rk4_ok = (12.0..=20.0).contains(&rk4_ratio);

    let sprme = preset("fig3").model(1, 20.0)?;
    let mut simpson_ok = true;
    let mut simpson_rel: f64 = 0.0;
    for t in [1.0, 5.0, 15.0] {
        let n = bcanneal::generators::default_simpson_steps(t);
        let (w1, w2, w4) = (sprme.sprme_w(t, n)?, sprme.sprme_w(t, 2 * n)?, sprme.sprme_w(t, 4 * n)?);
        let (d1, d2) = ((&w1 - &w2).max_abs(), (&w2 - &w4).max_abs());
        simpson_ok &= d2 < d1 && d1 < 1e-3 * w1.max_abs();
        simpson_rel = simpson_rel.max(d1 / w1.max_abs());
    }

    let fd = FiniteDifference::default();
    let dlame = config.model(0, 1.0)?;
    let mut dual: f64 = 0.0;
    for s in [0.0, 0.3, 0.8, 1.0] {
        let b1 = &adiabatic_series(&dlame, 0, &[s], &fd)?.terms[0][0];
        dual = dual.max(trace_norm(&(b1 - &first_term_dual(&dlame, s, &fd)?)) / trace_norm(b1));
    }

    let mut kms: f64 = 0.0;
    let mut kms_points = 0;
    for name in bcanneal_cli::PRESETS {
        let bath = preset(name).bath_spec()?;
        for i in 1..=200 {
            let w = 10.0 * bath.omega_c * i as f64 / 200.0;
            let expected = (-bath.beta * w).exp();
            // past this e^{−βω} and Ĝ(−ω) leave the normal f64 range
            if expected > 1e-200 {
                kms = kms.max((bath.spectral_density(-w) / bath.spectral_density(w) - expected).abs() / expected);
                kms_points += 1;
            }
        }
    }
    let ok = rk4_ok && simpson_ok && dual <= 1e-6 && kms <= 1e-12;
    Ok((
        ok,
        format!(
            "RK4 halving ratio {rk4_ratio:.2} (want 16); Simpson doubling rel change {simpson_rel:.1e}; b1 dual {dual:.1e}; KMS {kms:.1e} at {kms_points} points"
        ),
    ))
}

fn report(name: &str, outcome: Outcome, took: Duration, failed: &mut usize) {
    let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    if !ok {
        *failed += 1;
    }
    println!("{} {name}: {detail} [{:.0}s]", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
}

fn check(name: &str, failed: &mut usize, f: impl FnOnce() -> Outcome) {
    let t = Instant::now();
    let outcome = f();
    report(name, outcome, t.elapsed(), failed);
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut failed = 0;

    let start = Instant::now();
    let mut sweeps = Vec::new();
    let mut sweep_error = None;
    for name in ["fig2a", "fig2b", "fig2c"] {
        match timed(|| run_sweep(&preset(name), &opts(dir.path()))) {
            Ok((r, took)) => sweeps.push((name, r, took)),
            Err(e) => sweep_error = Some(e),
        }
    }
    let sweeps_took = start.elapsed();
    match &sweep_error {
        None => {
            let fig2b = &sweeps[1].1;
            check("fig2-exponents", &mut failed, || fig2(&sweeps));
            check("boundary-cancellation", &mut failed, || cancellation(fig2b));
            check("error-bound-and-flattening", &mut failed, || bounds(dir.path(), fig2b));
        }
        Some(e) => {
            for name in ["fig2-exponents", "boundary-cancellation", "error-bound-and-flattening"] {
                report(name, Err(CliError::Validation(format!("fig2 sweep failed: {e}"))), sweeps_took, &mut failed);
            }
        }
    }
    check("gibbs-stationarity", &mut failed, gibbs_stationarity);
    check("contraction", &mut failed, contraction);
    check("fig3-ordering", &mut failed, || fig3(dir.path()));
    check("fig4-positivity", &mut failed, || fig4(dir.path()));
    check("steady-gibbs", &mut failed, || steady_gibbs(dir.path()));
    check("closed-bath-exponents", &mut failed, || prop6(dir.path()));
    check("numerical-hygiene", &mut failed, hygiene);

    println!("{} criteria failed ({:.0}s total)", failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
