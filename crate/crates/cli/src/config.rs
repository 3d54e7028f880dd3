//! Experiment configuration, embedded presets and the provenance hash.

use std::path::PathBuf;

use bcanneal::analysis::{ErrorPolicy, FiniteDifference, PositivityPolicy};
use bcanneal::generators::ModelKind;
use bcanneal::propagation::StepPolicy;
use bcanneal::qops::{pauli, NormSearch};
use bcanneal::schedules::{Normalization, Shape};
use bcanneal::{AnnealHamiltonian, BathSpec, GeneratorModel, HamiltonianCase, Operator, Schedule};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Names accepted by `--preset`.
pub const PRESETS: [&str; 9] = ["fig1", "fig2a", "fig2b", "fig2c", "fig3", "fig4-top", "fig4-bottom", "steady-gibbs", "prop6"];

fn preset_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => include_str!("../presets/fig1.toml"),
        "fig2a" => include_str!("../presets/fig2a.toml"),
        "fig2b" => include_str!("../presets/fig2b.toml"),
        "fig2c" => include_str!("../presets/fig2c.toml"),
        "fig3" => include_str!("../presets/fig3.toml"),
        "fig4-top" => include_str!("../presets/fig4-top.toml"),
        "fig4-bottom" => include_str!("../presets/fig4-bottom.toml"),
        "steady-gibbs" => include_str!("../presets/steady-gibbs.toml"),
        "prop6" => include_str!("../presets/prop6.toml"),
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Dlame,
    Arme,
    Sprme,
    /// Exact unitary evolution of the system and a few bath qubits.
    Hamiltonian,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dlame => "dlame",
            Self::Arme => "arme",
            Self::Sprme => "sprme",
            Self::Hamiltonian => "hamiltonian",
        }
    }

    pub fn kind(self) -> Option<ModelKind> {
        match self {
            Self::Dlame => Some(ModelKind::Dlame),
            Self::Arme => Some(ModelKind::Arme),
            Self::Sprme => Some(ModelKind::Sprme),
            Self::Hamiltonian => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn operator(self) -> Operator {
        match self {
            Self::X => pauli::x(),
            Self::Y => pauli::y(),
            Self::Z => pauli::z(),
        }
    }
}

/// Anneal times as an explicit list or `points` log-spaced values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    List(Vec<f64>),
    LogRange { start: f64, stop: f64, points: usize },
}

impl TauSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::LogRange { start, stop, points } => {
                if *points == 1 {
                    return vec![*start];
                }
                let ratio = (stop / start).ln();
                // 12 significant digits keeps grids like 4e5 free of rounding tails
                (0..*points)
                    .map(|i| start * (ratio * i as f64 / (*points - 1) as f64).exp())
                    .map(|t| format!("{t:.11e}").parse().expect("formatted float parses"))
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub g: f64,
    /// ns²
    pub eta: f64,
    /// ns⁻¹
    pub omega_c: f64,
    pub temperature_mk: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self { g: 10f64.powf(-2.5), eta: 1.0, omega_c: 8.0 * std::f64::consts::PI, temperature_mk: 12.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub omega_x: f64,
    pub omega_z: f64,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        Self { omega_x: 1.0, omega_z: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleFamily {
    /// Derivatives vanish at `s = 1`.
    #[default]
    EndCancel,
    /// Derivatives vanish at both ends.
    BothEnds,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default)]
    pub family: ScheduleFamily,
    #[serde(default)]
    pub normalization: Normalization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub stability: f64,
    pub min_steps: usize,
    pub halving_tolerance: Option<f64>,
    /// SPRME kernel-grid spacing in ns.
    pub kernel_spacing: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let step = StepPolicy::default();
        Self { stability: step.stability, min_steps: step.min_steps, halving_tolerance: None, kernel_spacing: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    /// Write eigenvalue and Choi tables.
    pub spectra: bool,
    /// Write steady-state to Gibbs distances.
    pub steady_gibbs: bool,
    pub intervals: usize,
    pub choi_step: f64,
    pub tolerance: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        let p = PositivityPolicy::default();
        Self { spectra: true, steady_gibbs: true, intervals: p.intervals, choi_step: p.choi_step, tolerance: p.tolerance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    pub grid_points: usize,
    /// Width of the end-flattened variant compared against the linear ramp.
    pub flatten_delta: f64,
    pub fd_step: f64,
    /// Anneal times at which the measured error is checked against the bound.
    pub measure_tau: Vec<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { grid_points: 41, flatten_delta: 0.1, fd_step: FiniteDifference::default().h, measure_tau: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedConfig {
    pub bath_frequencies: Vec<f64>,
    pub g: f64,
    #[serde(default = "default_closed_coupling")]
    pub coupling: Pauli,
    #[serde(default = "default_steps_per_ns")]
    pub steps_per_ns: f64,
    #[serde(default = "default_phase_samples")]
    pub phase_samples: usize,
}

fn default_closed_coupling() -> Pauli {
    Pauli::Z
}

fn default_steps_per_ns() -> f64 {
    20.0
}

fn default_phase_samples() -> usize {
    12
}

fn default_coupling() -> Pauli {
    Pauli::Y
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: Model,
    pub k: Vec<usize>,
    pub tau: TauSpec,
    #[serde(default)]
    pub bath: BathConfig,
    #[serde(default)]
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default = "default_coupling")]
    pub coupling: Pauli,
    #[serde(default = "default_true")]
    pub lamb_shift: bool,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<ClosedConfig>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn positive(name: &str, v: f64, issues: &mut Vec<String>) {
    if !(v.is_finite() && v > 0.0) {
        issues.push(format!("{name} must be positive and finite, got {v}"));
    }
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let src = preset_source(name).ok_or_else(|| CliError::Validation(format!("unknown preset '{name}' (available: {})", PRESETS.join(", "))))?;
        Self::from_toml(src)
    }

    pub fn from_toml(src: &str) -> Result<Self, CliError> {
        toml::from_str(src).map_err(|e| CliError::Validation(format!("config does not parse: {e}")))
    }

    pub fn from_json(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::Validation(format!("config does not parse: {e}")))
    }

    /// Reads TOML, or JSON for a `.json` extension.
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&src),
            _ => Self::from_toml(&src),
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Validation(format!("config does not serialize: {e}")))
    }

    /// All problems found, one line each; empty for a valid config.
    pub fn issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.name.trim().is_empty() {
            issues.push("name must not be empty".into());
        }
        if self.k.is_empty() {
            issues.push("k list is empty".into());
        }
        if let Some(&k) = self.k.iter().find(|&&k| k > 8) {
            issues.push(format!("schedule order {k} is above the supported maximum 8"));
        }
        match &self.tau {
            TauSpec::List(v) if v.is_empty() => issues.push("tau list is empty".into()),
            TauSpec::List(v) => v.iter().for_each(|&t| positive("tau", t, &mut issues)),
            TauSpec::LogRange { start, stop, points } => {
                positive("tau.start", *start, &mut issues);
                positive("tau.stop", *stop, &mut issues);
                if *points == 0 {
                    issues.push("tau.points must be at least 1".into());
                }
                if stop < start {
                    issues.push(format!("tau.stop {stop} is below tau.start {start}"));
                }
            }
        }
        let b = &self.bath;
        for (n, v) in [("bath.g", b.g), ("bath.eta", b.eta), ("bath.omega_c", b.omega_c), ("bath.temperature_mk", b.temperature_mk)] {
            positive(n, v, &mut issues);
        }
        positive("hamiltonian.omega_x", self.hamiltonian.omega_x, &mut issues);
        positive("hamiltonian.omega_z", self.hamiltonian.omega_z, &mut issues);
        positive("integrator.stability", self.integrator.stability, &mut issues);
        positive("integrator.kernel_spacing", self.integrator.kernel_spacing, &mut issues);
        if self.integrator.min_steps == 0 {
            issues.push("integrator.min_steps must be positive".into());
        }
        if let Some(t) = self.integrator.halving_tolerance {
            positive("integrator.halving_tolerance", t, &mut issues);
        }
        if self.diagnostics.intervals == 0 {
            issues.push("diagnostics.intervals must be positive".into());
        }
        positive("diagnostics.choi_step", self.diagnostics.choi_step, &mut issues);
        positive("diagnostics.tolerance", self.diagnostics.tolerance, &mut issues);
        if self.bounds.grid_points < 2 {
            issues.push("bounds.grid_points must be at least 2".into());
        }
        if !(self.bounds.flatten_delta > 0.0 && self.bounds.flatten_delta < 1.0) {
            issues.push(format!("bounds.flatten_delta must lie in (0, 1), got {}", self.bounds.flatten_delta));
        }
        positive("bounds.fd_step", self.bounds.fd_step, &mut issues);
        self.bounds.measure_tau.iter().for_each(|&t| positive("bounds.measure_tau", t, &mut issues));
        match (self.model, &self.closed) {
            (Model::Hamiltonian, None) => issues.push("model 'hamiltonian' needs a [closed] section".into()),
            (Model::Hamiltonian, Some(c)) => {
                if c.bath_frequencies.is_empty() || c.bath_frequencies.len() > 3 {
                    issues.push(format!("closed.bath_frequencies needs 1 to 3 entries, got {}", c.bath_frequencies.len()));
                }
                c.bath_frequencies.iter().for_each(|&w| positive("closed.bath_frequencies", w, &mut issues));
                if !(c.g.is_finite() && c.g >= 0.0) {
                    issues.push(format!("closed.g must be nonnegative, got {}", c.g));
                }
                positive("closed.steps_per_ns", c.steps_per_ns, &mut issues);
                if c.phase_samples == 0 {
                    issues.push("closed.phase_samples must be positive".into());
                }
            }
            (_, Some(_)) => issues.push("a [closed] section only applies to model 'hamiltonian'".into()),
            _ => {}
        }
        issues
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(issues.join("; ")))
        }
    }

    /// SHA-256 over the canonical JSON form, with the output path removed.
    pub fn hash(&self) -> String {
        let mut semantic = self.clone();
        semantic.output = None;
        let value = serde_json::to_value(&semantic).expect("config serializes");
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sorted, deduplicated schedule orders.
    pub fn orders(&self) -> Vec<usize> {
        let mut k = self.k.clone();
        k.sort_unstable();
        k.dedup();
        k
    }

    /// Sorted, deduplicated anneal times.
    pub fn taus(&self) -> Vec<f64> {
        let mut t = self.tau.values();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    pub fn bath_spec(&self) -> Result<BathSpec, CliError> {
        let b = &self.bath;
        Ok(BathSpec::from_millikelvin(b.g, b.eta, b.omega_c, b.temperature_mk)?)
    }

    pub fn schedule(&self, k: usize) -> Schedule {
        let shape = match self.schedule.family {
            ScheduleFamily::EndCancel => Shape::EndCancel { k, normalization: self.schedule.normalization },
            ScheduleFamily::BothEnds => Shape::BothEnds { k },
        };
        Schedule::from_shape(shape).expect("Beta-family shapes are always valid")
    }

    pub fn annealer(&self, schedule: Schedule) -> AnnealHamiltonian {
        AnnealHamiltonian::new(self.hamiltonian.omega_x, self.hamiltonian.omega_z, schedule)
    }

    /// Open-system model for order `k` at anneal time `tau`.
    pub fn model(&self, k: usize, tau: f64) -> Result<GeneratorModel, CliError> {
        self.model_with(self.schedule(k), tau)
    }

    pub fn model_with(&self, schedule: Schedule, tau: f64) -> Result<GeneratorModel, CliError> {
        let kind = self.model.kind().ok_or_else(|| CliError::Validation("model 'hamiltonian' has no generator".into()))?;
        Ok(GeneratorModel::with_options(kind, self.annealer(schedule), self.coupling.operator(), self.bath_spec()?, tau, self.lamb_shift)?)
    }

    pub fn closed_case(&self, k: usize) -> Result<HamiltonianCase, CliError> {
        let c = self.closed.as_ref().ok_or_else(|| CliError::Validation("model 'hamiltonian' needs a [closed] section".into()))?;
        Ok(HamiltonianCase { system: self.annealer(self.schedule(k)), bath_frequencies: c.bath_frequencies.clone(), coupling: c.coupling.operator(), g: c.g })
    }

    pub fn error_policy(&self) -> ErrorPolicy {
        let i = &self.integrator;
        ErrorPolicy {
            step: StepPolicy { stability: i.stability, min_steps: i.min_steps, halving_tolerance: i.halving_tolerance, ..StepPolicy::default() },
            kernel_spacing: i.kernel_spacing,
        }
    }

    pub fn positivity_policy(&self) -> PositivityPolicy {
        let d = &self.diagnostics;
        PositivityPolicy { intervals: d.intervals, choi_step: d.choi_step, tolerance: d.tolerance, kernel_spacing: self.integrator.kernel_spacing }
    }

    pub fn norm_search(&self) -> NormSearch {
        NormSearch { seed: self.seed, ..NormSearch::default() }
    }

    pub fn finite_difference(&self) -> FiniteDifference {
        FiniteDifference { h: self.bounds.fd_step, ..FiniteDifference::default() }
    }
}
