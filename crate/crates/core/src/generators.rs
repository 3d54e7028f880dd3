//! Time-dependent Liouvillians: Davies–Lindblad (DLAME), adiabatic Redfield
//! (ARME) and Schrödinger-picture Redfield (SPRME).
//!
//! Times: the Davies generator is parametrized by the rescaled time
//! `s = t/τ`, the Redfield generators by the physical time `t` in ns. The
//! Redfield kernels use `W = ∫ G(r) U(t, t−r) A U(t, t−r)† dr` and assemble
//! `−i[H, ρ] + [Wρ, A] + [A, ρW†]`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, CorrelationTable, LambShiftTable};
use crate::error::{Error, Result};
use crate::qops::{pauli, Operator, SuperOperator, DEGENERACY_TOL};
use crate::quadrature::Tolerance;
use crate::qubit::{self, to_mat2, Mat4};
use crate::scalar::{cplx, creal, lit, to_f64, Cplx, Real};
use crate::schedules::AnnealHamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Dlame,
    Arme,
    Sprme,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dlame => "dlame",
            Self::Arme => "arme",
            Self::Sprme => "sprme",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct BohrTerm<T: Real> {
    pub omega: T,
    pub jump: Operator<T>,
}

/// `A = Σ_ω A(ω)` with `A(ω) = Σ_{E_b − E_a = ω} Π_a A Π_b`.
#[derive(Clone, Debug)]
pub struct BohrDecomposition<T: Real> {
    pub energies: Vec<T>,
    pub projectors: Vec<Operator<T>>,
    /// Sorted by increasing `ω`.
    pub terms: Vec<BohrTerm<T>>,
}

impl<T: Real> BohrDecomposition<T> {
    /// `Σ_ω e^{−iωt} A(ω)`, which equals `e^{iHt} A e^{−iHt}`.
    pub fn heisenberg(&self, t: T) -> Operator<T> {
        let n = self.terms.first().map_or(0, |b| b.jump.dim());
        self.terms.iter().fold(Operator::zeros(n), |acc, b| {
            let ph = cplx((b.omega * t).cos(), -(b.omega * t).sin());
            acc + b.jump.scale_c(ph)
        })
    }
}

/// Bohr-frequency decomposition of `A` with respect to `H`. Eigenvalues and
/// frequencies closer than the degeneracy tolerance are merged.
pub fn bohr_decompose<T: Real>(h: &Operator<T>, a: &Operator<T>) -> BohrDecomposition<T> {
    let tol: T = lit(DEGENERACY_TOL);
    let spaces = h.eigenspaces(tol);
    let mut raw: Vec<(T, Operator<T>)> = Vec::new();
    for (ia, pa) in spaces.projectors.iter().enumerate() {
        let left = pa * a;
        for (ib, pb) in spaces.projectors.iter().enumerate() {
            raw.push((spaces.energies[ib] - spaces.energies[ia], &left * pb));
        }
    }
    raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut terms: Vec<BohrTerm<T>> = Vec::new();
    let mut anchor = T::zero();
    for (w, op) in raw {
        match terms.last_mut() {
            Some(last) if w - anchor < tol => last.jump += &op,
            _ => {
                anchor = w;
                terms.push(BohrTerm { omega: w, jump: op });
            }
        }
    }
    let floor = a.max_abs() * lit(1e-14);
    terms.retain(|b| b.jump.max_abs() > floor);
    // pin the frequency of merged groups that straddle zero
    for t in &mut terms {
        if t.omega.abs() < tol {
            t.omega = T::zero();
        }
    }
    BohrDecomposition { energies: spaces.energies, projectors: spaces.projectors, terms }
}

/// `H_LS = Σ_ω S(ω) A(ω)† A(ω)`.
pub fn lamb_shift<T: Real>(decomp: &BohrDecomposition<T>, shift: impl Fn(T) -> Result<T>) -> Result<Operator<T>> {
    let n = decomp.projectors.first().map_or(0, |p| p.dim());
    let mut h = Operator::zeros(n);
    for b in &decomp.terms {
        let s = shift(b.omega)?;
        h += &(&b.jump.adjoint() * &b.jump).scale(s);
    }
    Ok(h.hermitian_part())
}

/// Davies generator `−i[H + H_LS, ·] + Σ_ω Ĝ(ω) D[A(ω)]` for a fixed `H`.
pub fn davies_superoperator<T: Real>(
    h: &Operator<T>,
    a: &Operator<T>,
    bath: &BathSpec<T>,
    shift: Option<&dyn Fn(T) -> Result<T>>,
) -> Result<SuperOperator<T>> {
    let decomp = bohr_decompose(h, a);
    let total = match shift {
        Some(f) => h + &lamb_shift(&decomp, f)?,
        None => h.clone(),
    };
    let mut out = SuperOperator::hamiltonian(&total);
    for b in &decomp.terms {
        let rate = bath.spectral_density(b.omega);
        if rate != T::zero() && b.jump.max_abs() > T::zero() {
            out.add_scaled(&SuperOperator::dissipator(&b.jump), creal(rate));
        }
    }
    Ok(out)
}

/// `ρ ↦ −i[H, ρ] + W ρ A − A W ρ + A ρ W† − ρ W† A`.
pub fn redfield_superoperator<T: Real>(h: &Operator<T>, a: &Operator<T>, w: &Operator<T>) -> SuperOperator<T> {
    let wd = w.adjoint();
    let one = creal(T::one());
    let mut out = SuperOperator::hamiltonian(h);
    out.add_scaled(&SuperOperator::sandwich(w, a), one);
    out.add_scaled(&SuperOperator::left(&(a * w)), -one);
    out.add_scaled(&SuperOperator::sandwich(a, &wd), one);
    out.add_scaled(&SuperOperator::right(&(&wd * a)), -one);
    out
}

/// Composite Simpson weight of node `j` out of `n` (n even).
#[inline]
pub fn simpson_weight<T: Real>(j: usize, n: usize) -> T {
    if j == 0 || j == n {
        lit(1.0 / 3.0)
    } else if j % 2 == 1 {
        lit(4.0 / 3.0)
    } else {
        lit(2.0 / 3.0)
    }
}

/// Simpson approximation of `W(t) = ∫₀^t G(r) T(r) A T(r)† dr` with the
/// chained propagator `T_{j+1} = T_j exp(−iΔr H(t − r_j))`, `Δr = t/n`.
pub fn simpson_kernel<T: Real>(
    h: impl Fn(T) -> Operator<T>,
    a: &Operator<T>,
    g: impl Fn(T) -> Result<Cplx<T>>,
    t: T,
    n: usize,
) -> Result<Operator<T>> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddSimpsonSteps(n));
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("kernel time must be nonnegative, got {}", to_f64(t))));
    }
    let dim = a.dim();
    if t == T::zero() {
        return Ok(Operator::zeros(dim));
    }
    let dr = t / lit(n as f64);
    let mut chain = Operator::identity(dim);
    let mut acc = Operator::zeros(dim);
    for j in 0..=n {
        let r = dr * lit(j as f64);
        let term = &(&chain * a) * &chain.adjoint();
        acc += &term.scale_c(g(r)? * simpson_weight::<T>(j, n));
        if j < n {
            chain = &chain * &h(t - r).unitary_propagator(dr);
        }
    }
    Ok(acc.scale(dr))
}

/// Default Simpson step count `n(t) = ⌈64 t^1.3⌉`, rounded up to even (t in ns).
pub fn default_simpson_steps(t: f64) -> usize {
    let n = (64.0 * t.max(0.0).powf(1.3)).ceil().max(2.0) as usize;
    n + n % 2
}

/// Frequency-shift lookup: Chebyshev tables away from zero, cached `S(0)`.
#[derive(Clone, Debug)]
struct Shifts<T: Real> {
    table: LambShiftTable<T>,
    zero: T,
}

impl<T: Real> Shifts<T> {
    fn get(&self, omega: T) -> Result<T> {
        if omega.abs() < lit(DEGENERACY_TOL) {
            Ok(self.zero)
        } else {
            self.table.shift(omega)
        }
    }
}

/// A fully specified open-system anneal: Hamiltonian, coupling, bath, τ and
/// master-equation kind. Bath-dependent tables are built on construction
/// (Lamb-shift) or on first use (correlation table for the exact SPRME kernel).
#[derive(Clone, Debug)]
pub struct GeneratorModel<T: Real> {
    kind: ModelKind,
    hamiltonian: AnnealHamiltonian<T>,
    coupling: Operator<T>,
    bath: BathSpec<T>,
    tau: T,
    lamb_shift_enabled: bool,
    shifts: Option<Arc<Shifts<T>>>,
    correlation: Arc<OnceLock<CorrelationTable<T>>>,
}

impl<T: Real> GeneratorModel<T> {
    /// Model with coupling `σ_y`; the Lamb shift is enabled.
    pub fn new(kind: ModelKind, hamiltonian: AnnealHamiltonian<T>, bath: BathSpec<T>, tau: T) -> Result<Self> {
        Self::with_options(kind, hamiltonian, pauli::y(), bath, tau, true)
    }

    pub fn with_options(
        kind: ModelKind,
        hamiltonian: AnnealHamiltonian<T>,
        coupling: Operator<T>,
        bath: BathSpec<T>,
        tau: T,
        lamb_shift_enabled: bool,
    ) -> Result<Self> {
        if !(tau.is_finite() && tau > T::zero()) {
            return Err(Error::Domain(format!("anneal time must be positive, got {}", to_f64(tau))));
        }
        if coupling.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: coupling.dim() });
        }
        coupling.validate_hermitian()?;
        let needs_shift = match kind {
            ModelKind::Dlame => lamb_shift_enabled,
            ModelKind::Arme => true,
            ModelKind::Sprme => false,
        };
        let shifts = if needs_shift { Some(Arc::new(Self::build_shifts(&hamiltonian, &bath)?)) } else { None };
        Ok(Self {
            kind,
            hamiltonian,
            coupling,
            bath,
            tau,
            lamb_shift_enabled,
            shifts,
            correlation: Arc::new(OnceLock::new()),
        })
    }

    fn build_shifts(h: &AnnealHamiltonian<T>, bath: &BathSpec<T>) -> Result<Shifts<T>> {
        // gaps over a slightly widened s-range (finite differences probe past the ends)
        let (mut lo, mut hi) = (T::max_value().unwrap_or(lit(f64::MAX)), T::zero());
        for i in 0..=440 {
            let s: T = lit(-0.1 + 1.2 * i as f64 / 440.0);
            let spec = h.at(s).eigh();
            let gap = spec.values[1] - spec.values[0];
            lo = lo.min(gap);
            hi = hi.max(gap);
        }
        if !(lo > lit(1e-6)) {
            return Err(Error::GapClosure(to_f64(lo)));
        }
        let table = LambShiftTable::new(*bath, lo * lit(0.8), hi * lit(1.25))?;
        let zero = bath.lamb_shift_integral(T::zero(), &Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 4000 })?;
        Ok(Shifts { table, zero })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn hamiltonian(&self) -> &AnnealHamiltonian<T> {
        &self.hamiltonian
    }

    pub fn coupling(&self) -> &Operator<T> {
        &self.coupling
    }

    pub fn bath(&self) -> &BathSpec<T> {
        &self.bath
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn lamb_shift_enabled(&self) -> bool {
        self.lamb_shift_enabled
    }

    /// Same physics at a different anneal time; tables are shared.
    pub fn with_tau(&self, tau: T) -> Result<Self> {
        if !(tau.is_finite() && tau > T::zero()) {
            return Err(Error::Domain(format!("anneal time must be positive, got {}", to_f64(tau))));
        }
        Ok(Self { tau, correlation: Arc::new(OnceLock::new()), ..self.clone() })
    }

    /// `H_S` at rescaled time `s`.
    pub fn system_hamiltonian(&self, s: T) -> Operator<T> {
        self.hamiltonian.at(s)
    }

    fn expect(&self, kind: ModelKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongKind { expected: kind.name(), found: self.kind.name() })
        }
    }

    /// Frequency shift `S(ω)` (principal-value part of the half-Fourier transform).
    pub fn frequency_shift(&self, omega: T) -> Result<T> {
        match &self.shifts {
            Some(s) => s.get(omega),
            None => self.bath.lamb_shift_integral(omega, &Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 4000 }),
        }
    }

    /// `H_LS(s)`.
    pub fn lamb_shift_at(&self, s: T) -> Result<Operator<T>> {
        let decomp = bohr_decompose(&self.system_hamiltonian(s), &self.coupling);
        lamb_shift(&decomp, |w| self.frequency_shift(w))
    }

    /// DLAME generator at rescaled time `s`.
    pub fn davies_generator(&self, s: T) -> Result<SuperOperator<T>> {
        self.expect(ModelKind::Dlame)?;
        self.davies_at(s)
    }

    fn davies_at(&self, s: T) -> Result<SuperOperator<T>> {
        self.davies_for(&self.system_hamiltonian(s))
    }

    fn davies_for(&self, h: &Operator<T>) -> Result<SuperOperator<T>> {
        if self.lamb_shift_enabled {
            let f = |w: T| self.frequency_shift(w);
            davies_superoperator(h, &self.coupling, &self.bath, Some(&f))
        } else {
            davies_superoperator(h, &self.coupling, &self.bath, None)
        }
    }

    /// Stack-allocated generator for the qubit kinds that do not need a
    /// history (DLAME and ARME).
    pub fn qubit_generator(&self, s: T) -> Option<Result<Mat4<T>>> {
        let h = to_mat2(&self.system_hamiltonian(s));
        let a = to_mat2(&self.coupling);
        match self.kind {
            ModelKind::Dlame if self.lamb_shift_enabled => {
                let f = |w: T| self.frequency_shift(w);
                Some(qubit::davies(&h, &a, &self.bath, Some(&f)))
            }
            ModelKind::Dlame => Some(qubit::davies(&h, &a, &self.bath, None)),
            ModelKind::Arme => Some(self.markov_kernel(&self.system_hamiltonian(s)).map(|w| qubit::redfield(&h, &a, &to_mat2(&w)))),
            ModelKind::Sprme => None,
        }
    }

    /// Static-limit kernel `W = Σ_ω Γ(ω) A(ω)`, `Γ(ω) = Ĝ(ω)/2 + i S(ω)`.
    pub fn markov_kernel(&self, h: &Operator<T>) -> Result<Operator<T>> {
        let decomp = bohr_decompose(h, &self.coupling);
        let half: T = lit(0.5);
        let mut w = Operator::zeros(h.dim());
        for b in &decomp.terms {
            let gamma = cplx(self.bath.spectral_density(b.omega) * half, self.frequency_shift(b.omega)?);
            w += &b.jump.scale_c(gamma);
        }
        Ok(w)
    }

    /// ARME generator at physical time `t`.
    pub fn arme_generator(&self, t: T) -> Result<SuperOperator<T>> {
        self.expect(ModelKind::Arme)?;
        let h = self.system_hamiltonian(t / self.tau);
        let w = self.markov_kernel(&h)?;
        Ok(redfield_superoperator(&h, &self.coupling, &w))
    }

    /// Correlation-table spacing used by the exact SPRME kernel.
    pub fn correlation_spacing(&self) -> T {
        lit::<T>(1e-3).min(T::one() / (lit::<T>(64.0) * self.bath.omega_c))
    }

    fn correlation_table(&self) -> Result<&CorrelationTable<T>> {
        if let Some(t) = self.correlation.get() {
            return Ok(t);
        }
        let table = CorrelationTable::build(&self.bath, self.correlation_spacing(), self.tau, &Tolerance::default())?;
        Ok(self.correlation.get_or_init(|| table))
    }

    /// SPRME kernel `W(t)` with `n_steps` Simpson intervals.
    pub fn sprme_w(&self, t: T, n_steps: usize) -> Result<Operator<T>> {
        self.expect(ModelKind::Sprme)?;
        if n_steps == 0 || n_steps % 2 == 1 {
            return Err(Error::OddSimpsonSteps(n_steps));
        }
        if t == T::zero() {
            return Ok(Operator::zeros(self.coupling.dim()));
        }
        let table = self.correlation_table()?;
        simpson_kernel(|x| self.system_hamiltonian(x / self.tau), &self.coupling, |r| table.eval(r), t, n_steps)
    }

    /// SPRME generator at physical time `t` with the default step count.
    pub fn sprme_generator(&self, t: T) -> Result<SuperOperator<T>> {
        let w = self.sprme_w(t, default_simpson_steps(to_f64(t)))?;
        Ok(redfield_superoperator(&self.system_hamiltonian(t / self.tau), &self.coupling, &w))
    }

    /// Generator of the model's kind at rescaled time `s`.
    pub fn generator(&self, s: T) -> Result<SuperOperator<T>> {
        match self.kind {
            ModelKind::Dlame => self.davies_at(s),
            ModelKind::Arme => self.arme_generator(s * self.tau),
            ModelKind::Sprme => self.sprme_generator(s * self.tau),
        }
    }

    /// Generator with `H_S` frozen at schedule value `θ`. SPRME has no such
    /// form because its kernel depends on the history.
    pub fn generator_at_theta(&self, theta: T) -> Result<SuperOperator<T>> {
        let h = self.hamiltonian.at_theta(theta);
        match self.kind {
            ModelKind::Dlame => self.davies_for(&h),
            ModelKind::Arme => Ok(redfield_superoperator(&h, &self.coupling, &self.markov_kernel(&h)?)),
            ModelKind::Sprme => Err(Error::WrongKind { expected: "DLAME or ARME", found: self.kind.name() }),
        }
    }

    /// Column-sum bound on `‖𝓛‖` from samples along the anneal. For the
    /// Redfield kinds the static-limit kernel stands in for `W(t)`.
    pub fn norm_estimate(&self) -> Result<T> {
        let mut best = T::zero();
        for i in 0..=8 {
            let s: T = lit(i as f64 / 8.0);
            let l = match self.kind {
                ModelKind::Dlame => self.davies_at(s)?,
                _ => {
                    let h = self.system_hamiltonian(s);
                    let w = match &self.shifts {
                        Some(_) => self.markov_kernel(&h)?,
                        None => self.markov_kernel_direct(&h)?,
                    };
                    redfield_superoperator(&h, &self.coupling, &w)
                }
            };
            best = best.max(l.column_sum_norm());
        }
        Ok(best)
    }

    fn markov_kernel_direct(&self, h: &Operator<T>) -> Result<Operator<T>> {
        let decomp = bohr_decompose(h, &self.coupling);
        let tol = Tolerance { abs: 1e-12, rel: 1e-10, max_intervals: 4000 };
        let mut w = Operator::zeros(h.dim());
        for b in &decomp.terms {
            w += &b.jump.scale_c(self.bath.half_fourier(b.omega, &tol)?);
        }
        Ok(w)
    }
}

/// SPRME kernel on a uniform grid `t_m = mΔ`, cached across evaluations.
///
/// With `U_m = exp(−iΔH(t_m)) U_{m−1}`, the Simpson chain at `t_n` is
/// `T_j = U_n U_{n−j}†`, so `W(t_n) = U_n [Δ Σ_j w_j G(jΔ) A_I(t_{n−j})] U_n†`
/// where `A_I(t_m) = U_m† A U_m`. Each evaluation is a single weighted sum
/// over the stored history, and the result coincides with
/// [`simpson_kernel`] at `n` steps up to rounding.
#[derive(Clone, Debug)]
pub struct SprmeGrid<T: Real> {
    model: GeneratorModel<T>,
    dt: T,
    corr: Vec<Cplx<T>>,
    unitaries: Vec<Operator<T>>,
    interaction: Vec<Cplx<T>>,
}

impl<T: Real> SprmeGrid<T> {
    /// Grid of spacing `dt`; `G(jΔ)` is tabulated up to `τ` on construction.
    pub fn new(model: &GeneratorModel<T>, dt: T) -> Result<Self> {
        model.expect(ModelKind::Sprme)?;
        if !(dt > T::zero()) {
            return Err(Error::Domain("grid spacing must be positive".into()));
        }
        let n = to_f64(model.tau / dt).ceil() as usize + 1;
        let tol = Tolerance::default();
        let corr = (0..=n).map(|j| model.bath.correlation(dt * lit(j as f64), &tol)).collect::<Result<Vec<_>>>()?;
        Ok(Self::with_samples(model, dt, corr))
    }

    /// Grid whose `G(jΔ)` samples are supplied by the caller.
    pub fn with_samples(model: &GeneratorModel<T>, dt: T, corr: Vec<Cplx<T>>) -> Self {
        let d = model.coupling.dim();
        let a = model.coupling.matrix();
        let interaction = a.iter().copied().collect();
        Self { model: model.clone(), dt, corr, unitaries: vec![Operator::identity(d)], interaction }
    }

    pub fn spacing(&self) -> T {
        self.dt
    }

    pub fn model(&self) -> &GeneratorModel<T> {
        &self.model
    }

    fn extend_to(&mut self, n: usize) {
        let d = self.model.coupling.dim();
        let tau = self.model.tau;
        while self.unitaries.len() <= n {
            let m = self.unitaries.len();
            let t = self.dt * lit(m as f64);
            let step = self.model.system_hamiltonian(t / tau).unitary_propagator(self.dt);
            let u = &step * self.unitaries.last().expect("history starts with identity");
            let ai = &(&u.adjoint() * &self.model.coupling) * &u;
            self.interaction.extend(ai.matrix().iter().copied());
            self.unitaries.push(u);
            debug_assert_eq!(self.interaction.len(), self.unitaries.len() * d * d);
        }
    }

    /// Grid index of physical time `t`, if it lies on the grid.
    pub fn index_of(&self, t: T) -> Result<usize> {
        let x = t / self.dt;
        let n = to_f64(x).round();
        if !(n >= 0.0) || (x - lit(n)).abs() > lit(1e-6) {
            return Err(Error::Domain(format!("time {} is not on the kernel grid (spacing {})", to_f64(t), to_f64(self.dt))));
        }
        Ok(n as usize)
    }

    /// `W(t_n)`; `n` must be even.
    pub fn kernel_at(&mut self, n: usize) -> Result<Operator<T>> {
        let d = self.model.coupling.dim();
        if n == 0 {
            return Ok(Operator::zeros(d));
        }
        if n % 2 == 1 {
            return Err(Error::OddSimpsonSteps(n));
        }
        if n >= self.corr.len() {
            return Err(Error::HorizonExceeded { t: to_f64(self.dt * lit(n as f64)), horizon: to_f64(self.dt * lit((self.corr.len() - 1) as f64)) });
        }
        self.extend_to(n);
        let dd = d * d;
        let mut acc = vec![cplx(T::zero(), T::zero()); dd];
        for j in 0..=n {
            let c = self.corr[j] * simpson_weight::<T>(j, n);
            let block = &self.interaction[(n - j) * dd..(n - j + 1) * dd];
            for (x, &y) in acc.iter_mut().zip(block) {
                *x += c * y;
            }
        }
        let inner = Operator::new(nalgebra::DMatrix::from_column_slice(d, d, &acc))?.scale(self.dt);
        let u = &self.unitaries[n];
        Ok(&(u * &inner) * &u.adjoint())
    }

    /// SPRME generator at physical time `t` (must be an even grid point).
    pub fn generator_at_time(&mut self, t: T) -> Result<SuperOperator<T>> {
        let n = self.index_of(t)?;
        let w = self.kernel_at(n)?;
        let h = self.model.system_hamiltonian(t / self.model.tau);
        Ok(redfield_superoperator(&h, &self.model.coupling, &w))
    }

    /// [`Self::generator_at_time`] without heap-allocated superoperators.
    pub fn qubit_generator_at_time(&mut self, t: T) -> Result<Mat4<T>> {
        let n = self.index_of(t)?;
        let w = self.kernel_at(n)?;
        let h = self.model.system_hamiltonian(t / self.model.tau);
        Ok(qubit::redfield(&to_mat2(&h), &to_mat2(&self.model.coupling), &to_mat2(&w)))
    }
}
