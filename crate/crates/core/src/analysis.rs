//! Steady states, reduced resolvents, adiabatic-series terms, adiabatic
//! error experiments, bound constants, power-law fits and positivity
//! diagnostics.

use nalgebra::{ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{GeneratorModel, ModelKind, SprmeGrid};
use crate::propagation::{evolve, exact_unitary_evolve, Generator, StepPolicy};
use crate::qops::{choi_matrix, devectorize, gibbs_state, induced_norm_1_1, partial_trace, pauli, trace_norm, vectorize, CMatrix, CVector, NormSearch, Operator, Subsystem, SuperOperator, PRESERVATION_TOL};
use crate::scalar::{creal, lit, to_f64, Real};
use crate::schedules::AnnealHamiltonian;

/// Eigenvalue magnitude below which a second kernel direction is declared.
pub const ERGODIC_GAP_TOL: f64 = 1e-9;

/// Instantaneous steady state of a generator.
#[derive(Clone, Debug)]
pub struct SteadyStateResult<T: Real> {
    pub sigma: Operator<T>,
    /// `min |Re λ|` over the eigenvalues other than the kernel one.
    pub liouvillian_gap: T,
    pub ergodic: bool,
}

fn check_trace_preserving<T: Real>(l: &SuperOperator<T>) -> Result<()> {
    let defect = l.trace_defect();
    if defect > lit::<T>(PRESERVATION_TOL) * (T::one() + l.max_abs()) {
        return Err(Error::Domain(format!("generator is not trace preserving (defect {:e})", to_f64(defect))));
    }
    Ok(())
}

/// Kernel vector of a trace-preserving generator normalized to unit trace.
///
/// For TP generators the diagonal rows sum to zero, so the first one can be
/// replaced by the trace functional without losing information.
fn kernel_state<T: Real>(l: &SuperOperator<T>) -> Result<Operator<T>> {
    let n = l.dim();
    let d = n * n;
    let mut a = l.matrix().clone();
    for j in 0..d {
        a[(0, j)] = creal(if j % (n + 1) == 0 { T::one() } else { T::zero() });
    }
    let mut rhs = CVector::zeros(d);
    rhs[0] = creal(T::one());
    let x = a.lu().solve(&rhs).ok_or(Error::Singular("steady-state solve"))?;
    let sigma = devectorize(&x)?.hermitian_part();
    let tr = sigma.trace().re;
    Ok(sigma.scale(T::one() / tr))
}

/// Unique steady state of a trace-preserving generator.
pub fn steady_state<T: Real>(l: &SuperOperator<T>) -> Result<SteadyStateResult<T>> {
    check_trace_preserving(l)?;
    let mut eig = l.eigenvalues();
    eig.sort_by(|a, b| a.modulus().partial_cmp(&b.modulus()).unwrap_or(std::cmp::Ordering::Equal));
    let first = eig[0].modulus();
    let second = eig.get(1).map(|z| z.modulus()).unwrap_or(lit::<T>(f64::INFINITY));
    if second < lit(ERGODIC_GAP_TOL) {
        return Err(Error::NonErgodic { first: to_f64(first), second: to_f64(second) });
    }
    let liouvillian_gap = eig[1..].iter().fold(lit::<T>(f64::INFINITY), |m, z| m.min(z.re.abs()));
    Ok(SteadyStateResult { sigma: kernel_state(l)?, liouvillian_gap, ergodic: true })
}

/// `P = |σ⟩⟨𝟙|`, the spectral projector onto the kernel.
fn kernel_projector<T: Real>(sigma: &Operator<T>) -> CMatrix<T> {
    let v = vectorize(sigma);
    let id = vectorize(&Operator::identity(sigma.dim()));
    &v * id.adjoint()
}

/// Reduced resolvent `S = (𝓛 + P)⁻¹ − P`.
pub fn reduced_resolvent<T: Real>(l: &SuperOperator<T>, ss: &SteadyStateResult<T>) -> Result<SuperOperator<T>> {
    if !ss.ergodic {
        return Err(Error::NonErgodic { first: 0.0, second: 0.0 });
    }
    resolvent_from(l, &ss.sigma)
}

fn resolvent_from<T: Real>(l: &SuperOperator<T>, sigma: &Operator<T>) -> Result<SuperOperator<T>> {
    let p = kernel_projector(sigma);
    let inv = (l.matrix() + &p).try_inverse().ok_or(Error::Singular("reduced resolvent"))?;
    SuperOperator::from_matrix(inv - p)
}

/// Hermiticity-preserving part `(T + 𝒦 T̄ 𝒦)/2` of a superoperator, where
/// `𝒦` swaps `vec(X)` and `vec(Xᵀ)`. Used to remove rounding noise from
/// finite-difference derivatives before induced norms are taken.
fn hermiticity_preserving_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let d = m.nrows();
    let n = (d as f64).sqrt().round() as usize;
    let swap = |a: usize| (a % n) * n + a / n;
    let half = creal(lit::<T>(0.5));
    DMatrix::from_fn(d, d, |a, b| (m[(a, b)] + m[(swap(a), swap(b))].conj()) * half)
}

fn max_modulus<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// Central differences (five points, seven for the third derivative) with a
/// Richardson cross-check at `h/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifference {
    pub h: f64,
    /// Required agreement between the `h` and `h/2` estimates, relative to
    /// `1 + ‖D‖`.
    pub agreement: f64,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self { h: 1e-2, agreement: 1e-5 }
    }
}

fn stencil<T: Real>(f: &mut dyn FnMut(T) -> Result<CMatrix<T>>, s: T, order: usize, h: T) -> Result<CMatrix<T>> {
    let fm2 = f(s - h - h)?;
    let fm1 = f(s - h)?;
    let fp1 = f(s + h)?;
    let fp2 = f(s + h + h)?;
    let c = |x: f64| creal(lit::<T>(x));
    Ok(match order {
        1 => (&fm2 - &fp2 + (&fp1 - &fm1) * c(8.0)) * creal(T::one() / (lit::<T>(12.0) * h)),
        2 => {
            let f0 = f(s)?;
            ((&fm1 + &fp1) * c(16.0) - &fm2 - &fp2 - f0 * c(30.0)) * creal(T::one() / (lit::<T>(12.0) * h * h))
        }
        3 => {
            let fm3 = f(s - h - h - h)?;
            let fp3 = f(s + h + h + h)?;
            ((&fm3 - &fp3) + (&fp2 - &fm2) * c(8.0) + (&fm1 - &fp1) * c(13.0)) * creal(T::one() / (lit::<T>(8.0) * h * h * h))
        }
        _ => return Err(Error::Domain(format!("derivative order {order} is not supported"))),
    })
}

impl FiniteDifference {
    /// `d^order f / ds^order` at `s`, Richardson-extrapolated.
    pub fn derivative<T: Real>(&self, f: &mut dyn FnMut(T) -> Result<CMatrix<T>>, s: T, order: usize) -> Result<CMatrix<T>> {
        let h = self.h;
        let coarse = stencil(f, s, order, lit(h))?;
        let fine = stencil(f, s, order, lit(h / 2.0))?;
        let diff = max_modulus(&(&coarse - &fine));
        let scale = T::one() + max_modulus(&fine);
        if diff > lit::<T>(self.agreement) * scale {
            return Err(Error::DerivativeSelfTest(format!(
                "order-{order} derivative at s = {:.6}: h and h/2 estimates differ by {:e}",
                to_f64(s),
                to_f64(diff)
            )));
        }
        // every stencil is O(h⁴)
        Ok((fine * creal(lit::<T>(16.0)) - coarse) * creal(lit::<T>(1.0 / 15.0)))
    }
}

/// A generator family that depends on `s` only through a schedule value
/// `θ(s)`. Derivatives in `s` are taken by the chain rule: finite
/// differences act on `θ` and the exact schedule derivatives supply the
/// rest, so a schedule whose derivatives vanish at a point makes the
/// corresponding terms vanish there exactly.
pub trait ScheduledGenerator<T: Real> {
    fn at_theta(&self, theta: T) -> Result<SuperOperator<T>>;
    /// `[θ(s), θ′(s), …, θ^{(order)}(s)]`.
    fn theta_jet(&self, s: T, order: usize) -> Vec<T>;

    fn at(&self, s: T) -> Result<SuperOperator<T>> {
        self.at_theta(self.theta_jet(s, 0)[0])
    }
}

/// A plain family `s ↦ 𝓛(s)`, read as `θ = s`.
pub struct Direct<F>(pub F);

impl<T: Real, F: Fn(T) -> Result<SuperOperator<T>>> ScheduledGenerator<T> for Direct<F> {
    fn at_theta(&self, theta: T) -> Result<SuperOperator<T>> {
        (self.0)(theta)
    }

    fn theta_jet(&self, s: T, order: usize) -> Vec<T> {
        (0..=order).map(|j| match j { 0 => s, 1 => T::one(), _ => T::zero() }).collect()
    }
}

/// DLAME and ARME; SPRME fails in [`ScheduledGenerator::at_theta`].
impl<T: Real> ScheduledGenerator<T> for GeneratorModel<T> {
    fn at_theta(&self, theta: T) -> Result<SuperOperator<T>> {
        self.generator_at_theta(theta)
    }

    fn theta_jet(&self, s: T, order: usize) -> Vec<T> {
        let sched = &self.hamiltonian().schedule;
        (0..=order).map(|j| if j == 0 { sched.theta_smooth(s) } else { sched.theta_derivative_smooth(s, j) }).collect()
    }
}

fn sigma_vec<T: Real>(gen: &dyn ScheduledGenerator<T>, theta: T) -> Result<CMatrix<T>> {
    let sigma = kernel_state(&gen.at_theta(theta)?)?;
    let v = vectorize(&sigma);
    Ok(CMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

fn resolvent_at<T: Real>(gen: &dyn ScheduledGenerator<T>, theta: T) -> Result<SuperOperator<T>> {
    let l = gen.at_theta(theta)?;
    let sigma = kernel_state(&l)?;
    resolvent_from(&l, &sigma)
}

/// `[𝓛, 𝓛̇, 𝓛̈, 𝓛⃛]` at `s`.
pub fn generator_derivatives<T: Real>(gen: &dyn ScheduledGenerator<T>, s: T, fd: &FiniteDifference) -> Result<[CMatrix<T>; 4]> {
    let j = gen.theta_jet(s, 3);
    let mut f = |x: T| gen.at_theta(x).map(|m| m.into_matrix());
    let l = f(j[0])?;
    let d1 = fd.derivative(&mut f, j[0], 1)?;
    let d2 = fd.derivative(&mut f, j[0], 2)?;
    let d3 = fd.derivative(&mut f, j[0], 3)?;
    let c = |x: T| creal(x);
    let three: T = lit(3.0);
    Ok([
        l,
        &d1 * c(j[1]),
        &d2 * c(j[1] * j[1]) + &d1 * c(j[2]),
        &d3 * c(j[1] * j[1] * j[1]) + &d2 * c(three * j[1] * j[2]) + &d1 * c(j[3]),
    ])
}

/// `b_n` as a vectorized column, viewed as a function of the jet
/// `(θ, θ′, …, θ^{(n)})`; `b₁ = S σ_θ θ′` and
/// `b_{n+1} = S Σ_j ∂b_n/∂θ^{(j)} θ^{(j+1)}`.
///
/// `b_n` is a polynomial of degree at most `n` in each `θ^{(j)}`, `j ≥ 1`,
/// so the five-point stencil is exact in those directions for `n ≤ 4`.
fn series_term<T: Real>(gen: &dyn ScheduledGenerator<T>, n: usize, jet: &[T], fd: &FiniteDifference) -> Result<CMatrix<T>> {
    let s_op = resolvent_at(gen, jet[0])?;
    let d = s_op.matrix().nrows();
    let mut inner = CMatrix::zeros(d, 1);
    if n == 1 {
        if jet[1] != T::zero() {
            inner = fd.derivative(&mut |x| sigma_vec(gen, x), jet[0], 1)? * creal(jet[1]);
        }
    } else {
        for j in 0..n {
            if jet[j + 1] == T::zero() {
                continue;
            }
            let mut shifted = jet.to_vec();
            let mut f = |x: T| {
                shifted[j] = x;
                series_term(gen, n - 1, &shifted, fd)
            };
            let partial = if j == 0 { fd.derivative(&mut f, jet[0], 1)? } else { stencil(&mut f, jet[j], 1, T::one() + jet[j].abs())? };
            inner += partial * creal(jet[j + 1]);
        }
    }
    Ok(s_op.matrix() * inner)
}

/// Terms of the adiabatic expansion `ρ(s) = σ(s) + Σ ζⁿ b_n(s) + …`.
#[derive(Clone, Debug)]
pub struct AdiabaticSeries<T: Real> {
    pub order: usize,
    pub s: Vec<T>,
    /// `terms[n − 1][i] = b_n(s_i)` for `n = 1..=order + 1`.
    pub terms: Vec<Vec<Operator<T>>>,
}

impl<T: Real> AdiabaticSeries<T> {
    /// `‖ρ(1) − σ(1) − Σ_{n ≤ k+1} τ⁻ⁿ b_n(1)‖₁`; the grid must end at `s = 1`.
    pub fn remainder(&self, rho1: &Operator<T>, sigma1: &Operator<T>, tau: T) -> Result<T> {
        let last = self.s.len().checked_sub(1).ok_or_else(|| Error::InvalidData("empty series grid".into()))?;
        if (self.s[last] - T::one()).abs() > lit(1e-12) {
            return Err(Error::Domain("series grid must end at s = 1".into()));
        }
        let mut r = rho1 - sigma1;
        let mut zeta = T::one();
        for term in &self.terms {
            zeta /= tau;
            r = &r - &term[last].scale(zeta);
        }
        Ok(trace_norm(&r))
    }
}

/// Adiabatic-series terms `b_1..b_{k+1}` on `s_grid` (`k ≤ 3`).
pub fn adiabatic_series<T: Real>(gen: &dyn ScheduledGenerator<T>, k: usize, s_grid: &[T], fd: &FiniteDifference) -> Result<AdiabaticSeries<T>> {
    if k > 3 {
        return Err(Error::Domain(format!("adiabatic series supports k ≤ 3, got {k}")));
    }
    let mut terms = vec![Vec::with_capacity(s_grid.len()); k + 1];
    for &s in s_grid {
        let jet = gen.theta_jet(s, k + 1);
        steady_state(&gen.at_theta(jet[0])?)?;
        for (n, slot) in terms.iter_mut().enumerate() {
            let v = series_term(gen, n + 1, &jet, fd)?;
            slot.push(devectorize(&CVector::from_column_slice(v.as_slice()))?);
        }
    }
    Ok(AdiabaticSeries { order: k, s: s_grid.to_vec(), terms })
}

/// `b₁ = −S² 𝓛̇ σ`, the second expression for the first series term.
pub fn first_term_dual<T: Real>(gen: &dyn ScheduledGenerator<T>, s: T, fd: &FiniteDifference) -> Result<Operator<T>> {
    let jet = gen.theta_jet(s, 1);
    let l = gen.at_theta(jet[0])?;
    let sigma = kernel_state(&l)?;
    let s_op = resolvent_from(&l, &sigma)?;
    let ldot = fd.derivative(&mut |x| gen.at_theta(x).map(|m| m.into_matrix()), jet[0], 1)? * creal(jet[1]);
    let v = vectorize(&sigma);
    let b = -(s_op.matrix() * s_op.matrix() * ldot * v);
    devectorize(&b)
}

/// Integration and kernel-grid settings for [`adiabatic_error`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPolicy {
    #[serde(skip)]
    pub step: StepPolicy,
    /// Largest SPRME kernel-grid spacing in ns.
    pub kernel_spacing: f64,
}

impl Default for ErrorPolicy {
    fn default() -> Self {
        Self { step: StepPolicy::default(), kernel_spacing: 1e-3 }
    }
}

/// One adiabatic-error measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorPoint<T: Real> {
    pub tau: T,
    pub error: T,
    pub steps: usize,
    pub halving_estimate: Option<T>,
}

/// Initial state of an anneal: Gibbs for DLAME, the steady state of
/// `𝓛(0)` for ARME, and `𝟙/n` for SPRME (whose `t = 0` generator is a pure
/// commutator).
pub fn initial_state<T: Real>(model: &GeneratorModel<T>) -> Result<Operator<T>> {
    match model.kind() {
        ModelKind::Dlame => gibbs_state(&model.system_hamiltonian(T::zero()), model.bath().beta),
        ModelKind::Arme => Ok(steady_state(&model.generator(T::zero())?)?.sigma),
        ModelKind::Sprme => {
            let n = model.coupling().dim();
            Ok(Operator::identity(n).scale(T::one() / lit(n as f64)))
        }
    }
}

/// SPRME kernel grid aligned with an RK4 run of `steps` steps: RK4 stages
/// sit at half steps, which must be even grid indices.
fn aligned_grid<T: Real>(model: &GeneratorModel<T>, steps: usize, max_spacing: f64) -> Result<SprmeGrid<T>> {
    let half_step = to_f64(model.tau()) / steps as f64 / 2.0;
    let mut m = (half_step / max_spacing).ceil().max(1.0) as usize;
    m += m % 2;
    SprmeGrid::new(model, lit(half_step / m as f64))
}

/// `‖ρ(τ) − σ(τ)‖₁` for the model's anneal time.
pub fn adiabatic_error<T: Real>(model: &GeneratorModel<T>, policy: &ErrorPolicy) -> Result<ErrorPoint<T>> {
    let tau = model.tau();
    let rho0 = initial_state(model)?;
    match model.kind() {
        ModelKind::Dlame => {
            let mut m = model.clone();
            let traj = evolve(&mut m, &rho0, tau, &policy.step)?;
            let target = gibbs_state(&model.system_hamiltonian(T::one()), model.bath().beta)?;
            Ok(ErrorPoint { tau, error: trace_norm(&(traj.final_state() - &target)), steps: traj.steps, halving_estimate: traj.halving_estimate })
        }
        ModelKind::Arme => {
            let mut m = model.clone();
            let traj = evolve(&mut m, &rho0, tau, &policy.step)?;
            let target = steady_state(&model.generator(T::one())?)?.sigma;
            Ok(ErrorPoint { tau, error: trace_norm(&(traj.final_state() - &target)), steps: traj.steps, halving_estimate: traj.halving_estimate })
        }
        ModelKind::Sprme => {
            let steps = match policy.step.steps {
                Some(n) => n + n % 2,
                None => policy.step.step_count(to_f64(tau), to_f64(model.norm_estimate()?)),
            };
            let mut grid = aligned_grid(model, steps, policy.kernel_spacing)?;
            let step = StepPolicy { steps: Some(steps), ..policy.step };
            let traj = evolve(&mut grid, &rho0, tau, &step)?;
            let target = steady_state(&grid.generator_at_time(tau)?)?.sigma;
            Ok(ErrorPoint { tau, error: trace_norm(&(traj.final_state() - &target)), steps, halving_estimate: traj.halving_estimate })
        }
    }
}

/// Constants of the two-branch bound `min{B₀/τ, A₁/τ + B₁/τ²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants<T: Real> {
    pub b0: T,
    pub a1: T,
    pub b1: T,
    /// Crossover `B₁/(B₀ − A₁)` between the two branches.
    pub tau_star: T,
}

impl<T: Real> BoundConstants<T> {
    pub fn bound(&self, tau: T) -> T {
        (self.b0 / tau).min(self.a1 / tau + self.b1 / (tau * tau))
    }
}

/// Norms entering the bound constants at one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundNorms<T: Real> {
    pub s: T,
    pub resolvent: T,
    pub d1: T,
    pub d2: T,
    pub d3: T,
}

fn induced<T: Real>(m: CMatrix<T>, search: &NormSearch) -> Result<T> {
    induced_norm_1_1(&SuperOperator::from_matrix(hermiticity_preserving_part(&m))?, search)
}

/// `‖S‖`, `‖𝓛̇‖`, `‖𝓛̈‖`, `‖𝓛⃛‖` (induced 1→1 norms) at each grid point.
pub fn bound_norms<T: Real>(gen: &dyn ScheduledGenerator<T>, grid: &[T], fd: &FiniteDifference, search: &NormSearch) -> Result<Vec<BoundNorms<T>>> {
    grid.iter()
        .map(|&s| {
            let [l, d1, d2, d3] = generator_derivatives(gen, s, fd)?;
            let l = SuperOperator::from_matrix(l)?;
            let ss = steady_state(&l)?;
            let res = reduced_resolvent(&l, &ss)?;
            Ok(BoundNorms {
                s,
                resolvent: induced(res.into_matrix(), search)?,
                d1: induced(d1, search)?,
                d2: induced(d2, search)?,
                d3: induced(d3, search)?,
            })
        })
        .collect()
}

/// Bound constants from sampled norms; the grid must start at 0 and end at 1.
pub fn bound_constants_from_norms<T: Real>(norms: &[BoundNorms<T>]) -> Result<BoundConstants<T>> {
    let (first, last) = match (norms.first(), norms.last()) {
        (Some(f), Some(l)) if norms.len() >= 2 => (f, l),
        _ => return Err(Error::InvalidData("bound grid needs at least two points".into())),
    };
    if first.s.abs() > lit(1e-12) || (last.s - T::one()).abs() > lit(1e-12) {
        return Err(Error::Domain("bound grid must span [0, 1]".into()));
    }
    let c = |x: f64| lit::<T>(x);
    let edge0 = |n: &BoundNorms<T>| n.resolvent.powi(2) * n.d1;
    let edge1 = |n: &BoundNorms<T>| c(5.0) * n.resolvent.powi(4) * n.d1.powi(2) + n.resolvent.powi(3) * n.d2;
    let sup0 = norms.iter().fold(T::zero(), |m, n| m.max(c(6.0) * n.resolvent.powi(3) * n.d1.powi(2) + n.resolvent.powi(2) * n.d2));
    let sup1 = norms.iter().fold(T::zero(), |m, n| {
        m.max(c(60.0) * n.resolvent.powi(5) * n.d1.powi(3) + c(19.0) * n.resolvent.powi(4) * n.d1 * n.d2 + n.resolvent.powi(3) * n.d3)
    });
    let b0 = edge0(first) + edge0(last) + sup0;
    let a1 = edge0(last);
    let b1 = edge1(first) + edge1(last) + sup1;
    if a1 >= b0 {
        return Err(Error::BoundInconsistent { a1: to_f64(a1), b0: to_f64(b0) });
    }
    Ok(BoundConstants { b0, a1, b1, tau_star: b1 / (b0 - a1) })
}

pub fn bound_constants<T: Real>(gen: &dyn ScheduledGenerator<T>, grid: &[T], fd: &FiniteDifference, search: &NormSearch) -> Result<BoundConstants<T>> {
    bound_constants_from_norms(&bound_norms(gen, grid, fd, search)?)
}

/// Least-squares fit of `log e = c − α log τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InvalidData(format!("power-law fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(t, e)) = points.iter().find(|(t, e)| !(*t > 0.0 && *e > 0.0 && t.is_finite() && e.is_finite())) {
        return Err(Error::InvalidData(format!("nonpositive point ({t}, {e}) in power-law fit")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidData("power-law fit needs distinct τ values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(PowerLawFit { alpha: -slope, intercept, r_squared, points: points.len() })
}

/// Index range of the asymptotic window within points sorted by `τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: usize,
    /// One past the last point.
    pub end: usize,
    /// False when no run satisfied the slope criterion and the last three
    /// points were used.
    pub converged: bool,
}

impl FitWindow {
    pub fn contains(&self, i: usize) -> bool {
        (self.start..self.end).contains(&i)
    }
}

/// Largest contiguous run of at least three points spanning at most a
/// decade in `τ` whose local log-log slopes vary by less than 10%; ties go
/// to larger `τ`.
pub fn asymptotic_window(points: &[(f64, f64)]) -> Result<FitWindow> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidData(format!("window selection needs at least 3 points, got {n}")));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points.iter().any(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::InvalidData("points must be positive and sorted by increasing τ".into()));
    }
    let slopes: Vec<f64> = points.windows(2).map(|w| (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln()).collect();
    let mut best: Option<(usize, usize)> = None;
    for start in 0..n {
        for end in (start + 3)..=n {
            if points[end - 1].0 / points[start].0 > 10.0 * (1.0 + 1e-9) {
                break;
            }
            let local = &slopes[start..end - 1];
            let lo = local.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = local.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean = local.iter().sum::<f64>() / local.len() as f64;
            if (hi - lo) < 0.1 * mean.abs() {
                let better = match best {
                    None => true,
                    Some((bs, be)) => (end - start) > (be - bs) || ((end - start) == (be - bs) && start > bs),
                };
                if better {
                    best = Some((start, end));
                }
            }
        }
    }
    Ok(match best {
        Some((start, end)) => FitWindow { start, end, converged: true },
        None => FitWindow { start: n - 3, end: n, converged: false },
    })
}

/// Generator eigenvalues and short-time Choi minimum at one time.
#[derive(Clone, Debug)]
pub struct PositivitySample<T: Real> {
    pub t: T,
    /// Real parts of all eigenvalues, largest first.
    pub real_parts: Vec<T>,
    /// Smallest eigenvalue of the Choi matrix of `exp(Δt 𝓛(t))`.
    pub choi_min: T,
}

#[derive(Clone, Debug)]
pub struct PositivityReport<T: Real> {
    pub samples: Vec<PositivitySample<T>>,
    /// Largest eigenvalue real part over all samples.
    pub max_real_part: T,
    pub min_choi: T,
    /// Some eigenvalue real part exceeds [`PositivityPolicy::tolerance`].
    pub positive_real_part: bool,
    /// Some Choi minimum is below `−tolerance`.
    pub cp_violation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityPolicy {
    /// Number of intervals of `[0, τ]`; samples sit at their end points.
    pub intervals: usize,
    /// Short time of the Choi test in ns.
    pub choi_step: f64,
    pub tolerance: f64,
    pub kernel_spacing: f64,
}

impl Default for PositivityPolicy {
    fn default() -> Self {
        Self { intervals: 200, choi_step: 1e-2, tolerance: 1e-8, kernel_spacing: 1e-3 }
    }
}

/// Instantaneous spectra and short-time complete positivity along `[0, τ]`.
pub fn positivity_diagnostics<T: Real>(model: &GeneratorModel<T>, policy: &PositivityPolicy) -> Result<PositivityReport<T>> {
    if policy.intervals == 0 {
        return Err(Error::Domain("positivity diagnostics need at least one interval".into()));
    }
    let tau = model.tau();
    let mut grid = match model.kind() {
        ModelKind::Sprme => Some(aligned_grid(model, policy.intervals, policy.kernel_spacing)?),
        _ => None,
    };
    let mut samples = Vec::with_capacity(policy.intervals + 1);
    for j in 0..=policy.intervals {
        let s: T = lit(j as f64 / policy.intervals as f64);
        let t = s * tau;
        let l = match grid.as_mut() {
            Some(g) => Generator::at(g, s)?,
            None => model.generator(s)?,
        };
        let mut real_parts: Vec<T> = l.eigenvalues().iter().map(|z| z.re).collect();
        real_parts.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let choi = choi_matrix(&l.exp(lit(policy.choi_step)));
        let choi_min = choi.eigh().values[0];
        samples.push(PositivitySample { t, real_parts, choi_min });
    }
    let max_real_part = samples.iter().fold(lit::<T>(f64::NEG_INFINITY), |m, x| m.max(x.real_parts[0]));
    let min_choi = samples.iter().fold(lit::<T>(f64::INFINITY), |m, x| m.min(x.choi_min));
    Ok(PositivityReport {
        samples,
        max_real_part,
        min_choi,
        positive_real_part: max_real_part > lit(policy.tolerance),
        cp_violation: min_choi < -lit::<T>(policy.tolerance),
    })
}

/// `‖σ(τ) − e^{−βH_S(τ)}/Z‖₁` for the instantaneous steady state at the end
/// of the anneal.
pub fn steady_gibbs_distance<T: Real>(model: &GeneratorModel<T>, kernel_spacing: f64) -> Result<T> {
    let gibbs = gibbs_state(&model.system_hamiltonian(T::one()), model.bath().beta)?;
    let l = match model.kind() {
        ModelKind::Sprme => {
            let tau = to_f64(model.tau());
            let m = (tau / (2.0 * kernel_spacing)).ceil().max(1.0) as usize;
            let mut grid = SprmeGrid::new(model, lit(tau / (2 * m) as f64))?;
            grid.generator_at_time(model.tau())?
        }
        _ => model.generator(T::one())?,
    };
    Ok(trace_norm(&(&steady_state(&l)?.sigma - &gibbs)))
}

/// A qubit coupled to `m ≤ 3` bath qubits under one global Hamiltonian
/// `H_S(s) ⊗ 𝟙 + 𝟙 ⊗ Σ_j ω_j σ_z^{(j)} + g A ⊗ Σ_j σ_x^{(j)}`.
#[derive(Clone, Debug)]
pub struct HamiltonianCase<T: Real> {
    pub system: AnnealHamiltonian<T>,
    pub bath_frequencies: Vec<T>,
    pub coupling: Operator<T>,
    pub g: T,
}

/// Embeds a single-qubit operator at `site` of an `n`-qubit register.
fn embed<T: Real>(op: &Operator<T>, site: usize, n: usize) -> Operator<T> {
    let id = Operator::identity(2);
    (0..n).fold(Operator::identity(1), |acc, j| acc.kron(if j == site { op } else { &id }))
}

impl<T: Real> HamiltonianCase<T> {
    pub fn bath_qubits(&self) -> usize {
        self.bath_frequencies.len()
    }

    pub fn total_hamiltonian(&self, s: T) -> Operator<T> {
        let n = 1 + self.bath_qubits();
        let mut h = embed(&self.system.at(s), 0, n);
        for (j, &w) in self.bath_frequencies.iter().enumerate() {
            h += &embed(&pauli::z::<T>().scale(w), j + 1, n);
            let coupling = &embed(&self.coupling, 0, n) * &embed(&pauli::x(), j + 1, n);
            h += &coupling.scale(self.g);
        }
        h
    }

    fn validate(&self) -> Result<()> {
        if self.bath_qubits() > 3 {
            return Err(Error::Domain(format!("at most 3 bath qubits are supported, got {}", self.bath_qubits())));
        }
        if self.coupling.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.coupling.dim() });
        }
        self.coupling.validate_hermitian()
    }

    /// Smallest ground-state gap of the total Hamiltonian on `samples + 1`
    /// points of `[0, 1]`.
    pub fn min_gap(&self, samples: usize) -> T {
        (0..=samples).fold(lit::<T>(f64::INFINITY), |m, i| {
            let e = self.total_hamiltonian(lit(i as f64 / samples as f64)).eigh().values;
            m.min(e[1] - e[0])
        })
    }
}

/// Closed-evolution counterpart of the adiabatic error: the ground state of
/// `H_tot(0)` is evolved exactly and the reduced system state compared with
/// the reduced ground state of `H_tot(1)`.
pub fn hamiltonian_case_experiment<T: Real>(case: &HamiltonianCase<T>, tau: T, steps: usize) -> Result<T> {
    case.validate()?;
    let gap = case.min_gap(400);
    if !(gap > lit(1e-6)) {
        return Err(Error::GapClosure(to_f64(gap)));
    }
    let ground = |s: T| -> CVector<T> { case.total_hamiltonian(s).eigh().vectors.column(0).into_owned() };
    let psi0 = ground(T::zero());
    let traj = exact_unitary_evolve(|s| case.total_hamiltonian(s), &psi0, tau, steps, 0)?;
    let bath_dim = 1usize << case.bath_qubits();
    let reduce = |psi: &CVector<T>| partial_trace(&Operator::ket_bra(psi, psi), 2, bath_dim, Subsystem::Second);
    let rho = reduce(traj.final_state())?;
    let sigma = reduce(&ground(T::one()))?;
    Ok(trace_norm(&(&rho - &sigma)))
}

impl<T: Real> HamiltonianCase<T> {
    /// `∫₀¹ Δ(s) ds` of the total Hamiltonian by the midpoint rule.
    pub fn mean_gap(&self, samples: usize) -> T {
        let n = samples.max(1);
        let sum = (0..n).fold(T::zero(), |acc, i| {
            let e = self.total_hamiltonian(lit((i as f64 + 0.5) / n as f64)).eigh().values;
            acc + e[1] - e[0]
        });
        sum / lit(n as f64)
    }
}

/// Largest [`hamiltonian_case_experiment`] error over one period of the
/// dynamical phase, `τ′ ∈ [τ, τ + 2π/∫Δ)`, sampled at `samples` points with
/// `steps_per_ns` exponentials per ns. Boundary contributions from both
/// ends interfere, so the error at a single `τ` oscillates and only this
/// envelope follows a power law.
pub fn hamiltonian_case_envelope<T: Real>(case: &HamiltonianCase<T>, tau: T, steps_per_ns: f64, samples: usize) -> Result<T> {
    let period = lit::<T>(2.0 * std::f64::consts::PI) / case.mean_gap(64);
    let mut worst = T::zero();
    for j in 0..samples.max(1) {
        let t = tau + period * lit(j as f64 / samples.max(1) as f64);
        let steps = (to_f64(t) * steps_per_ns).ceil() as usize + 200;
        worst = worst.max(hamiltonian_case_experiment(case, t, steps)?);
    }
    Ok(worst)
}

/// Reduced single-qubit state after exact evolution of `H_S` alone from its
/// ground state; the decoupled reference for [`hamiltonian_case_experiment`].
pub fn closed_system_error<T: Real>(system: &AnnealHamiltonian<T>, tau: T, steps: usize) -> Result<T> {
    let ground = |s: T| -> CVector<T> { system.at(s).eigh().vectors.column(0).into_owned() };
    let traj = exact_unitary_evolve(|s| system.at(s), &ground(T::zero()), tau, steps, 0)?;
    let psi = traj.final_state();
    let phi = ground(T::one());
    Ok(trace_norm(&(&Operator::ket_bra(psi, psi) - &Operator::ket_bra(&phi, &phi))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathSpec;
    use crate::generators::davies_superoperator;
    use crate::qops::pauli;
    use crate::schedules::{AnnealHamiltonian, Schedule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig2_bath(t_mk: f64) -> BathSpec<f64> {
        BathSpec::from_millikelvin(10f64.powf(-2.5), 1.0, 8.0 * std::f64::consts::PI, t_mk).unwrap()
    }

    fn dlame(k: usize, t_mk: f64, lamb: bool) -> GeneratorModel<f64> {
        GeneratorModel::with_options(ModelKind::Dlame, AnnealHamiltonian::standard(k), pauli::y(), fig2_bath(t_mk), 1e3, lamb).unwrap()
    }

    fn max_abs(m: &CMatrix<f64>) -> f64 {
        max_modulus(m)
    }

    #[test]
    fn dlame_steady_state_is_gibbs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for lamb in [true, false] {
            let model = dlame(1, 12.0, lamb);
            for _ in 0..20 {
                let s: f64 = rng.random();
                let ss = steady_state(&model.generator(s).unwrap()).unwrap();
                let gibbs = gibbs_state(&model.system_hamiltonian(s), model.bath().beta).unwrap();
                assert!(trace_norm(&(&ss.sigma - &gibbs)) < 1e-7);
                assert!(ss.ergodic && ss.liouvillian_gap > 0.0);
            }
        }
    }

    #[test]
    fn pure_commutator_is_not_ergodic() {
        let l = SuperOperator::hamiltonian(&pauli::z::<f64>());
        assert!(matches!(steady_state(&l), Err(Error::NonErgodic { .. })));
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let l = SuperOperator::left(&pauli::z::<f64>());
        assert!(matches!(steady_state(&l), Err(Error::Domain(_))));
    }

    #[test]
    fn resolvent_identities() {
        let model = dlame(0, 12.0, true);
        let l = model.generator(0.37).unwrap();
        let ss = steady_state(&l).unwrap();
        let s = reduced_resolvent(&l, &ss).unwrap();
        let p = kernel_projector(&ss.sigma);
        let q = CMatrix::identity(4, 4) - &p;
        assert!(max_abs(&(l.matrix() * s.matrix() - &q)) < 1e-9);
        assert!(max_abs(&(s.matrix() * l.matrix() - &q)) < 1e-9);
        assert!(max_abs(&(s.matrix() * &p)) < 1e-9);
        assert!(max_abs(&(&p * s.matrix())) < 1e-9);
        assert!((s.matrix() * vectorize(&ss.sigma)).camax() < 1e-9);
    }

    #[test]
    fn stencils_are_exact_on_low_polynomials() {
        let fd = FiniteDifference::default();
        let mut f = |x: f64| Ok(CMatrix::from_element(1, 1, creal(x.powi(4) - 2.0 * x.powi(3) + x)));
        let s = 0.3;
        let d1 = fd.derivative(&mut f, s, 1).unwrap()[(0, 0)].re;
        let d2 = fd.derivative(&mut f, s, 2).unwrap()[(0, 0)].re;
        let d3 = fd.derivative(&mut f, s, 3).unwrap()[(0, 0)].re;
        assert!((d1 - (4.0 * s.powi(3) - 6.0 * s * s + 1.0)).abs() < 1e-9);
        assert!((d2 - (12.0 * s * s - 12.0 * s)).abs() < 1e-7);
        assert!((d3 - (24.0 * s - 12.0)).abs() < 1e-4);
    }

    #[test]
    fn derivative_self_test_flags_rough_functions() {
        let fd = FiniteDifference::default();
        let mut f = |x: f64| Ok(CMatrix::from_element(1, 1, creal((1e4 * x).sin())));
        assert!(matches!(fd.derivative(&mut f, 0.1, 1), Err(Error::DerivativeSelfTest(_))));
        assert!(fd.derivative(&mut f, 0.1, 4).is_err());
    }

    #[test]
    fn frozen_generator_has_no_series_terms() {
        let h = pauli::x::<f64>().scale(0.7) + pauli::z::<f64>().scale(0.4);
        let l = davies_superoperator(&h, &pauli::y(), &fig2_bath(12.0), None).unwrap();
        let gen = Direct(move |_s: f64| Ok(l.clone()));
        let series = adiabatic_series(&gen, 2, &[0.0, 0.5, 1.0], &FiniteDifference::default()).unwrap();
        for term in &series.terms {
            for b in term {
                assert!(b.max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn series_terms_vanish_at_end_up_to_order() {
        let fd = FiniteDifference::default();
        for k in 1..=3 {
            let model = dlame(k, 12.0, true);
            let series = adiabatic_series(&model, k, &[0.5, 1.0], &fd).unwrap();
            for n in 1..=k {
                let b = &series.terms[n - 1][1];
                assert!(trace_norm(b) < 1e-6, "k={k} n={n} |b|={:e}", trace_norm(b));
                assert!(b.trace().norm() < 1e-9);
            }
            let lead = trace_norm(&series.terms[k][1]);
            assert!(lead > 1e-3, "k={k} leading term {lead:e}");
            assert!(trace_norm(&series.terms[0][0]) > 1e-3);
        }
    }

    #[test]
    fn first_term_dual_formula_agrees() {
        let fd = FiniteDifference::default();
        let model = dlame(0, 12.0, true);
        for &s in &[0.0, 0.3, 0.8, 1.0] {
            let series = adiabatic_series(&model, 0, &[s], &fd).unwrap();
            let dual = first_term_dual(&model, s, &fd).unwrap();
            let b1 = &series.terms[0][0];
            let rel = trace_norm(&(b1 - &dual)) / trace_norm(b1);
            assert!(rel < 1e-6, "s={s} rel={rel:e}");
        }
    }

    #[test]
    fn series_remainder_subtracts_scaled_terms() {
        let z = Operator::<f64>::zeros(2);
        let b = pauli::z::<f64>().scale(0.5);
        let series = AdiabaticSeries { order: 0, s: vec![0.0, 1.0], terms: vec![vec![z.clone(), b.clone()]] };
        let sigma = Operator::identity(2).scale(0.5);
        let rho = &sigma + &b.scale(0.1);
        assert!(series.remainder(&rho, &sigma, 10.0).unwrap() < 1e-15);
        assert!((series.remainder(&rho, &sigma, 20.0).unwrap() - 0.05).abs() < 1e-15);
        let short = AdiabaticSeries { order: 0, s: vec![0.5], terms: vec![vec![b]] };
        assert!(short.remainder(&rho, &sigma, 10.0).is_err());
    }

    #[test]
    fn power_law_fit_is_exact_on_power_laws() {
        let pts: Vec<(f64, f64)> = [10.0, 30.0, 100.0, 300.0].iter().map(|&t: &f64| (t, 7.0 / t.powi(3))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.alpha - 3.0).abs() < 1e-10);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_fit_sees_the_dominant_term() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| 1e6 * 2f64.powi(i)).map(|t| (t, 3.0 / t + 50.0 / (t * t))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-4, "alpha {}", fit.alpha);
    }

    #[test]
    fn power_law_fit_rejects_bad_data() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 0.1)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (-2.0, 0.5), (3.0, 0.1)]).is_err());
        assert!(fit_power_law(&[(2.0, 1.0), (2.0, 0.5), (2.0, 0.1)]).is_err());
    }

    #[test]
    fn window_skips_the_preasymptotic_head() {
        // e = 1/τ² + 30/τ³ bends from slope 3 towards 2
        let pts: Vec<(f64, f64)> = (0..10).map(|i| 2f64.powi(i + 1)).map(|t| (t, 1.0 / (t * t) + 30.0 / t.powi(3))).collect();
        let w = asymptotic_window(&pts).unwrap();
        assert!(w.converged);
        assert_eq!(w.end, pts.len());
        let fit = fit_power_law(&pts[w.start..w.end]).unwrap();
        assert!((fit.alpha - 2.0).abs() < 0.2, "alpha {}", fit.alpha);
        assert!(w.start >= 5);
    }

    #[test]
    fn window_falls_back_without_a_straight_run() {
        let pts = [(1.0, 1.0), (2.0, 0.5), (3.0, 0.4), (4.0, 0.01), (5.0, 0.009)];
        let w = asymptotic_window(&pts).unwrap();
        assert!(!w.converged);
        assert_eq!((w.start, w.end), (2, 5));
        assert!(asymptotic_window(&pts[..2]).is_err());
        assert!(asymptotic_window(&[(2.0, 1.0), (1.0, 1.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn dlame_is_positive_and_gibbs_at_the_end() {
        for k in [0, 2] {
            let model = dlame(k, 1.0, true);
            let report = positivity_diagnostics(&model, &PositivityPolicy { intervals: 20, ..PositivityPolicy::default() }).unwrap();
            assert!(report.max_real_part <= 1e-8);
            assert!(report.min_choi >= -1e-8);
            assert!(!report.positive_real_part && !report.cp_violation);
            assert_eq!(report.samples.len(), 21);
            assert!(steady_gibbs_distance(&model, 1e-3).unwrap() < 1e-7);
        }
    }

    #[test]
    fn sprme_steady_state_starts_maximally_mixed() {
        let bath = BathSpec::from_millikelvin(0.1, 1.0, 16.0, 12.0).unwrap();
        let model = GeneratorModel::new(ModelKind::Sprme, AnnealHamiltonian::standard(0), bath, 20.0).unwrap();
        let mut grid = SprmeGrid::new(&model.with_tau(0.2).unwrap(), 1e-4).unwrap();
        let sigma = steady_state(&grid.generator_at_time(0.02).unwrap()).unwrap().sigma;
        let mixed = Operator::identity(2).scale(0.5);
        assert!(trace_norm(&(&sigma - &mixed)) < 1e-2, "{:e}", trace_norm(&(&sigma - &mixed)));
        assert_eq!(initial_state(&model).unwrap(), mixed);
    }

    #[test]
    fn bound_constants_are_consistent_and_improve_under_flattening() {
        let fd = FiniteDifference::default();
        let search = NormSearch::default();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let bath = fig2_bath(12.0);
        let make = |sched: Schedule<f64>| {
            GeneratorModel::with_options(ModelKind::Dlame, AnnealHamiltonian::new(1.0, 1.0, sched), pauli::y(), bath, 1e3, true).unwrap()
        };
        let linear = bound_constants(&make(Schedule::new(0)), &grid, &fd, &search).unwrap();
        assert!(linear.a1 < linear.b0 && linear.a1 > 0.0);
        assert!((linear.tau_star - linear.b1 / (linear.b0 - linear.a1)).abs() <= 1e-12 * linear.tau_star);
        for tau in [1e2, 1e4, 1e6] {
            let both = (linear.b0 / tau, linear.a1 / tau + linear.b1 / (tau * tau));
            assert_eq!(linear.bound(tau), both.0.min(both.1));
        }
        let flat = bound_constants(&make(Schedule::end_flattened(0.1).unwrap()), &grid, &fd, &search).unwrap();
        assert!(flat.b0 < linear.b0 && flat.a1 < linear.a1 && flat.b1 < linear.b1, "{flat:?} vs {linear:?}");
    }

    #[test]
    fn bound_grid_must_span_the_anneal() {
        let n = BoundNorms { s: 0.0, resolvent: 1.0, d1: 1.0, d2: 1.0, d3: 1.0 };
        assert!(bound_constants_from_norms(&[n]).is_err());
        assert!(bound_constants_from_norms(&[n, BoundNorms { s: 0.5, ..n }]).is_err());
        let c = bound_constants_from_norms(&[n, BoundNorms { s: 1.0, ..n }]).unwrap();
        assert_eq!((c.b0, c.a1, c.b1), (2.0 + 7.0, 1.0, 12.0 + 80.0));
    }

    #[test]
    fn decoupled_hamiltonian_case_matches_closed_system() {
        let system = AnnealHamiltonian::new(1.0, 1.0, Schedule::both_ends(1));
        let case = HamiltonianCase { system: system.clone(), bath_frequencies: vec![0.7], coupling: pauli::z(), g: 0.0 };
        for tau in [5.0, 20.0] {
            let open = hamiltonian_case_experiment(&case, tau, 400).unwrap();
            let closed = closed_system_error(&system, tau, 400).unwrap();
            assert!((open - closed).abs() < 1e-8, "{open:e} vs {closed:e}");
        }
        let crowded = HamiltonianCase { bath_frequencies: vec![0.5; 4], ..case };
        assert!(hamiltonian_case_experiment(&crowded, 5.0, 10).is_err());
    }
}
