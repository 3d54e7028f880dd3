//! Fixed-step integration of `∂_s ρ = τ 𝓛(s) ρ`, propagators and exact
//! unitary evolution.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::generators::{GeneratorModel, SprmeGrid};
use crate::qubit::Mat4;
use crate::qops::{devectorize, trace_norm, vectorize, CMatrix, CVector, Operator, SuperOperator};
use crate::scalar::{creal, lit, to_f64, Real};

/// A time-dependent generator in rescaled time `s ∈ [0, 1]`.
pub trait Generator<T: Real> {
    /// Operator dimension.
    fn dim(&self) -> usize;

    fn at(&mut self, s: T) -> Result<SuperOperator<T>>;

    /// Stack-allocated `𝓛(s)` for two-level systems, when available. Must
    /// agree with [`Generator::at`].
    fn at_qubit(&mut self, _s: T) -> Option<Result<Mat4<T>>> {
        None
    }

    /// Scale of `‖𝓛(s)‖` for step selection; defaults to the largest column
    /// sum over nine samples.
    fn norm_estimate(&mut self) -> Result<T> {
        let mut best = T::zero();
        for i in 0..=8 {
            best = best.max(self.at(lit(i as f64 / 8.0))?.column_sum_norm());
        }
        Ok(best)
    }
}

impl<T: Real> Generator<T> for GeneratorModel<T> {
    fn dim(&self) -> usize {
        self.coupling().dim()
    }

    fn at(&mut self, s: T) -> Result<SuperOperator<T>> {
        self.generator(s)
    }

    fn at_qubit(&mut self, s: T) -> Option<Result<Mat4<T>>> {
        self.qubit_generator(s)
    }

    fn norm_estimate(&mut self) -> Result<T> {
        GeneratorModel::norm_estimate(self)
    }
}

impl<T: Real> Generator<T> for SprmeGrid<T> {
    fn dim(&self) -> usize {
        self.model().coupling().dim()
    }

    fn at(&mut self, s: T) -> Result<SuperOperator<T>> {
        let t = s * self.model().tau();
        self.generator_at_time(t)
    }

    fn at_qubit(&mut self, s: T) -> Option<Result<Mat4<T>>> {
        let t = s * self.model().tau();
        Some(self.qubit_generator_at_time(t))
    }

    fn norm_estimate(&mut self) -> Result<T> {
        self.model().norm_estimate()
    }
}

/// Adapter turning a closure into a [`Generator`].
pub struct FnGenerator<F> {
    dim: usize,
    f: F,
}

impl<F> FnGenerator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Real, F: FnMut(T) -> Result<SuperOperator<T>>> Generator<T> for FnGenerator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn at(&mut self, s: T) -> Result<SuperOperator<T>> {
        (self.f)(s)
    }
}

/// Step selection for [`evolve`]: `h = min(stability/‖𝓛‖, τ/min_steps)` in
/// physical time, rounded so that the number of steps is even.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    pub stability: f64,
    pub min_steps: usize,
    /// Explicit step count over the full anneal, overriding the rule above.
    pub steps: Option<usize>,
    /// Fail when the Richardson estimate `‖ρ_h − ρ_{2h}‖₁/15` exceeds this.
    /// The check runs whenever the field is set.
    pub halving_tolerance: Option<f64>,
    /// Number of interior states to store (evenly spaced); the endpoints are
    /// always stored.
    pub records: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self { stability: 0.5, min_steps: 2000, steps: None, halving_tolerance: None, records: 0 }
    }
}

impl StepPolicy {
    /// Number of steps over the whole anneal `s ∈ [0, 1]`.
    pub fn step_count(&self, tau: f64, norm: f64) -> usize {
        if let Some(n) = self.steps {
            return n.max(1);
        }
        let h = if norm > 0.0 { (self.stability / norm).min(tau / self.min_steps as f64) } else { tau / self.min_steps as f64 };
        let n = (tau / h).ceil().max(2.0) as usize;
        n + n % 2
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub s: Vec<T>,
    pub states: Vec<Operator<T>>,
    /// Physical step size `τ/N`.
    pub step: T,
    pub steps: usize,
    pub order: usize,
    /// `‖ρ_h(1) − ρ_{2h}(1)‖₁/15` when the step-halving check ran.
    pub halving_estimate: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &Operator<T> {
        self.states.last().expect("trajectory stores its endpoints")
    }

    /// Largest `|Tr ρ − 1|` along the stored states.
    pub fn max_trace_defect(&self) -> T {
        self.states.iter().fold(T::zero(), |m, r| m.max((r.trace().re - T::one()).abs()))
    }

    pub fn max_hermiticity_defect(&self) -> T {
        self.states.iter().fold(T::zero(), |m, r| m.max(r.hermiticity_defect()))
    }
}

/// Classical RK4 for `∂_s X = τ 𝓛(s) X` on `[s0, s1]` with `n` steps, where
/// the columns of `X` are vectorized operators. The end-of-step generator is
/// reused as the start of the next step, and the state update uses
/// compensated summation: near a flat schedule end the increments fall below
/// the state's rounding unit and plain accumulation drifts. `record` receives `(step, s, X)`.
fn rk4<T: Real, G: Generator<T> + ?Sized>(
    gen: &mut G,
    x0: CMatrix<T>,
    tau: T,
    s0: T,
    s1: T,
    n: usize,
    mut record: impl FnMut(usize, T, &CMatrix<T>),
) -> Result<CMatrix<T>> {
    if x0.ncols() == 1 && gen.dim() == 2 {
        if let Some(l0) = gen.at_qubit(s0) {
            return rk4_qubit(gen, l0?, x0, tau, s0, s1, n, record);
        }
    }
    let ds = (s1 - s0) / lit(n as f64);
    let half: T = lit(0.5);
    let c = creal(tau * ds);
    let sixth = creal(tau * ds / lit(6.0));
    let mut x = x0;
    let mut comp = CMatrix::zeros(x.nrows(), x.ncols());
    let mut l0 = gen.at(s0)?;
    for step in 0..n {
        let s = s0 + (s1 - s0) * lit(step as f64 / n as f64);
        let s_end = s0 + (s1 - s0) * lit((step + 1) as f64 / n as f64);
        let lm = gen.at(s + ds * half)?;
        let l1 = gen.at(s_end)?;
        let k1 = l0.matrix() * &x;
        let k2 = lm.matrix() * (&x + &k1 * (c * creal(half)));
        let k3 = lm.matrix() * (&x + &k2 * (c * creal(half)));
        let k4 = l1.matrix() * (&x + &k3 * c);
        let dx = (k1 + (k2 + k3) * creal(lit(2.0)) + k4) * sixth - &comp;
        let next = &x + &dx;
        comp = (&next - &x) - dx;
        x = next;
        l0 = l1;
        record(step + 1, s_end, &x);
    }
    finite(x, n)
}

fn finite<T: Real>(x: CMatrix<T>, steps: usize) -> Result<CMatrix<T>> {
    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Diverged { steps })
    }
}

#[allow(clippy::too_many_arguments)]
fn rk4_qubit<T: Real, G: Generator<T> + ?Sized>(
    gen: &mut G,
    mut l0: Mat4<T>,
    x0: CMatrix<T>,
    tau: T,
    s0: T,
    s1: T,
    n: usize,
    mut record: impl FnMut(usize, T, &CMatrix<T>),
) -> Result<CMatrix<T>> {
    let missing = || Error::Domain("qubit generator became unavailable".into());
    let ds = (s1 - s0) / lit(n as f64);
    let half: T = lit(0.5);
    let c = creal(tau * ds);
    let ch = creal(tau * ds * half);
    let sixth = creal(tau * ds / lit(6.0));
    let two = creal(lit::<T>(2.0));
    let mut x = nalgebra::Vector4::from_column_slice(x0.as_slice());
    let mut comp = nalgebra::Vector4::zeros();
    let mut out = x0;
    for step in 0..n {
        let s = s0 + (s1 - s0) * lit(step as f64 / n as f64);
        let s_end = s0 + (s1 - s0) * lit((step + 1) as f64 / n as f64);
        let lm = gen.at_qubit(s + ds * half).ok_or_else(missing)??;
        let l1 = gen.at_qubit(s_end).ok_or_else(missing)??;
        let k1 = l0 * x;
        let k2 = lm * (x + k1 * ch);
        let k3 = lm * (x + k2 * ch);
        let k4 = l1 * (x + k3 * c);
        let dx = (k1 + (k2 + k3) * two + k4) * sixth - comp;
        let next = x + dx;
        comp = (next - x) - dx;
        x = next;
        l0 = l1;
        out.copy_from_slice(x.as_slice());
        record(step + 1, s_end, &out);
    }
    finite(out, n)
}

/// Interior step indices at which states are stored, evenly spaced.
fn record_marks(n: usize, records: usize) -> Vec<usize> {
    let mut marks: Vec<usize> = (1..=records).map(|i| ((i * n) as f64 / (records + 1) as f64).round() as usize).filter(|&m| m > 0 && m < n).collect();
    marks.dedup();
    marks
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if tau.is_finite() && tau > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("anneal time must be positive, got {}", to_f64(tau))))
    }
}

/// Integrates `ρ̇(s) = τ𝓛(s)ρ(s)` from `s = 0` to `1` with RK4.
pub fn evolve<T: Real, G: Generator<T> + ?Sized>(gen: &mut G, rho0: &Operator<T>, tau: T, policy: &StepPolicy) -> Result<Trajectory<T>> {
    check_tau(tau)?;
    rho0.validate_density()?;
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), found: rho0.dim() });
    }
    let n = match policy.steps {
        Some(n) => n.max(1),
        None => policy.step_count(to_f64(tau), to_f64(gen.norm_estimate()?)),
    };
    let x0 = CMatrix::from_column_slice(rho0.dim() * rho0.dim(), 1, vectorize(rho0).as_slice());
    let mut s_rec = vec![T::zero()];
    let mut states = vec![rho0.clone()];
    let marks = record_marks(n, policy.records);
    let x = rk4(gen, x0, tau, T::zero(), T::one(), n, |step, s, x| {
        if marks.binary_search(&step).is_ok() {
            if let Ok(r) = devectorize(&CVector::from_column_slice(x.as_slice())) {
                s_rec.push(s);
                states.push(r);
            }
        }
    })?;
    let final_state = devectorize(&CVector::from_column_slice(x.as_slice()))?;
    let mut halving_estimate = None;
    if let Some(tol) = policy.halving_tolerance {
        if n % 2 == 1 {
            return Err(Error::Domain("step-halving check needs an even step count".into()));
        }
        let x0 = CMatrix::from_column_slice(rho0.dim() * rho0.dim(), 1, vectorize(rho0).as_slice());
        let coarse = rk4(gen, x0, tau, T::zero(), T::one(), n / 2, |_, _, _| {})?;
        let coarse = devectorize(&CVector::from_column_slice(coarse.as_slice()))?;
        let est = trace_norm(&(&final_state - &coarse)) / lit(15.0);
        if est > lit(tol) {
            return Err(Error::StepHalving { discrepancy: to_f64(est), tolerance: tol });
        }
        halving_estimate = Some(est);
    }
    s_rec.push(T::one());
    states.push(final_state);
    Ok(Trajectory { s: s_rec, states, step: tau / lit(n as f64), steps: n, order: 4, halving_estimate })
}

/// Propagator `𝓔(s1, s0)` obtained by integrating the full operator basis.
/// The step count is the policy's full-anneal count scaled by `s1 − s0`.
pub fn propagator<T: Real, G: Generator<T> + ?Sized>(gen: &mut G, s1: T, s0: T, tau: T, policy: &StepPolicy) -> Result<SuperOperator<T>> {
    check_tau(tau)?;
    if s1 < s0 {
        return Err(Error::Domain("propagator needs s1 ≥ s0".into()));
    }
    let d = gen.dim() * gen.dim();
    if s1 == s0 {
        return Ok(SuperOperator::identity(gen.dim()));
    }
    let total = match policy.steps {
        Some(n) => n.max(1),
        None => policy.step_count(to_f64(tau), to_f64(gen.norm_estimate()?)),
    };
    let n = ((total as f64) * to_f64(s1 - s0)).ceil().max(1.0) as usize;
    let x = rk4(gen, DMatrix::identity(d, d), tau, s0, s1, n, |_, _, _| {})?;
    SuperOperator::from_matrix(x)
}

/// State-vector trajectory from [`exact_unitary_evolve`].
#[derive(Clone, Debug)]
pub struct StateTrajectory<T: Real> {
    pub s: Vec<T>,
    pub states: Vec<CVector<T>>,
    pub steps: usize,
}

impl<T: Real> StateTrajectory<T> {
    pub fn final_state(&self) -> &CVector<T> {
        self.states.last().expect("trajectory stores its endpoints")
    }
}

/// Schrödinger evolution `i∂_s ψ = τ H(s) ψ` over `s ∈ [0, 1]` with `steps`
/// chained short-time exponentials. Each step uses the fourth-order
/// commutator-free form `exp(−iΔt(α₁H₁ + α₂H₂)) exp(−iΔt(α₂H₁ + α₁H₂))`
/// with `H₁, H₂` at the two Gauss points of the step.
pub fn exact_unitary_evolve<T: Real>(
    mut h: impl FnMut(T) -> Operator<T>,
    psi0: &CVector<T>,
    tau: T,
    steps: usize,
    records: usize,
) -> Result<StateTrajectory<T>> {
    check_tau(tau)?;
    if steps == 0 {
        return Err(Error::Domain("unitary evolution needs at least one step".into()));
    }
    let norm = psi0.norm();
    if (norm - T::one()).abs() > lit(1e-9) {
        return Err(Error::InvalidData(format!("initial state norm {} is not 1", to_f64(norm))));
    }
    let sqrt3 = lit::<T>(3.0).sqrt();
    let c1 = lit::<T>(0.5) - sqrt3 / lit(6.0);
    let c2 = lit::<T>(0.5) + sqrt3 / lit(6.0);
    let a1 = (lit::<T>(3.0) - lit::<T>(2.0) * sqrt3) / lit(12.0);
    let a2 = (lit::<T>(3.0) + lit::<T>(2.0) * sqrt3) / lit(12.0);
    let ds = T::one() / lit(steps as f64);
    let dt = tau * ds;
    let marks = record_marks(steps, records);
    let mut psi = psi0.clone();
    let mut out_s = vec![T::zero()];
    let mut out = vec![psi0.clone()];
    for step in 0..steps {
        let s = lit::<T>(step as f64) * ds;
        let h1 = h(s + c1 * ds);
        let h2 = h(s + c2 * ds);
        let first = (h1.scale(a2) + h2.scale(a1)).unitary_propagator(dt);
        let second = (h1.scale(a1) + h2.scale(a2)).unitary_propagator(dt);
        psi = second.matrix() * (first.matrix() * psi);
        if marks.binary_search(&(step + 1)).is_ok() {
            out_s.push(lit(((step + 1) as f64) / steps as f64));
            out.push(psi.clone());
        }
    }
    out_s.push(T::one());
    out.push(psi);
    Ok(StateTrajectory { s: out_s, states: out, steps })
}
