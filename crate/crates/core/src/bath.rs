//! Ohmic bosonic bath: spectral function, correlation function, Lamb-shift
//! integrals and Markov-approximation error estimates.
//!
//! Units: `ħ = 1`, time in ns, frequencies in ns⁻¹. The correlation function
//! and the spectral function are a Fourier pair,
//! `Ĝ(ω) = ∫ e^{iωt} G(t) dt`, `G(t) = (1/2π) ∫ e^{−iωt} Ĝ(ω) dω`.

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_real, Chebyshev, Tolerance};
use crate::scalar::{cplx, lit, to_f64, Cplx, Real};

/// `k_B/ħ` in ns⁻¹ per mK.
pub const KB_OVER_HBAR_PER_NS_MK: f64 = 1.380_649e-23 / 1.054_571_817e-34 * 1e-12;

/// Inverse temperature in ns for a temperature in mK.
pub fn beta_from_millikelvin(t_mk: f64) -> f64 {
    1.0 / (KB_OVER_HBAR_PER_NS_MK * t_mk)
}

/// `e^z − 1` without cancellation for small `|z|`.
fn complex_exp_m1<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let half: T = lit(0.5);
    let two: T = lit(2.0);
    let sh = (z.im * half).sin();
    cplx(z.re.exp_m1() * z.im.cos() - two * sh * sh, z.re.exp() * z.im.sin())
}

/// Ohmic bath `Ĝ(ω) = 2π g² η ω e^{−|ω|/ω_c} / (1 − e^{−βω})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec<T: Real> {
    pub g: T,
    pub eta: T,
    pub omega_c: T,
    pub beta: T,
}

impl<T: Real> BathSpec<T> {
    pub fn new(g: T, eta: T, omega_c: T, beta: T) -> Result<Self> {
        for (name, v) in [("g", g), ("eta", eta), ("omega_c", omega_c), ("beta", beta)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::Domain(format!("bath parameter {name} must be positive and finite, got {}", to_f64(v))));
            }
        }
        Ok(Self { g, eta, omega_c, beta })
    }

    pub fn from_millikelvin(g: T, eta: T, omega_c: T, t_mk: f64) -> Result<Self> {
        if !(t_mk.is_finite() && t_mk > 0.0) {
            return Err(Error::Domain(format!("temperature must be positive, got {t_mk} mK")));
        }
        Self::new(g, eta, omega_c, lit(beta_from_millikelvin(t_mk)))
    }

    /// `g² η`
    pub fn strength(&self) -> T {
        self.g * self.g * self.eta
    }

    /// Spectral function `Ĝ(ω)`; the `ω = 0` limit is `2π g² η / β`.
    pub fn spectral_density(&self, omega: T) -> T {
        let pref = T::two_pi() * self.strength();
        let x = self.beta * omega;
        // ω / (1 − e^{−βω}) = −ω / expm1(−βω)
        let bose = if x == T::zero() { T::one() / self.beta } else { -omega / (-x).exp_m1() };
        pref * bose * (-omega.abs() / self.omega_c).exp()
    }

    /// Half-axis integrand with the contour rotated off the real axis.
    ///
    /// For `t ≥ 0`, `∫₀^∞` over positive frequencies is taken along
    /// `ω = r e^{−iπ/4}` and the negative-frequency part along `ν = r e^{iπ/4}`
    /// (`ω = −ν`). Both rays avoid the Matsubara poles on the imaginary axis
    /// and the integrands decay like `e^{−r t/√2}` instead of oscillating.
    fn rotated_integrand(&self, r: T, t: T) -> Cplx<T> {
        let s = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
        let down = cplx(s, -s);
        let up = cplx(s, s);
        let i = cplx(T::zero(), T::one());
        let wc = cplx(self.omega_c, T::zero());
        let beta = cplx(self.beta, T::zero());
        let tt = cplx(t, T::zero());
        let rr = cplx(r, T::zero());
        // positive frequencies
        let w = down * rr;
        let bose_p = if r == T::zero() {
            cplx(T::one() / self.beta, T::zero())
        } else {
            -w / complex_exp_m1(-(beta * w))
        };
        let plus = down * bose_p * ComplexField::exp(-(w / wc) - i * w * tt);
        // negative frequencies, ν = −ω
        let v = up * rr;
        let bose_m = if r == T::zero() {
            cplx(T::one() / self.beta, T::zero())
        } else if self.beta * r > T::one() {
            // v e^{−βv} / (1 − e^{−βv}) avoids overflow of e^{βv}
            -(v * ComplexField::exp(-(beta * v))) / complex_exp_m1(-(beta * v))
        } else {
            v / complex_exp_m1(beta * v)
        };
        let minus = up * bose_m * ComplexField::exp(-(v / wc) + i * v * tt);
        plus + minus
    }

    /// `G(t)` by quadrature along rotated contours.
    pub fn correlation(&self, t: T, tol: &Tolerance) -> Result<Cplx<T>> {
        let tau = t.abs();
        let decay = (T::one() / self.omega_c + tau) * lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
        let reach = lit::<T>(45.0) / decay;
        let bps = [T::zero(), reach / lit(64.0), reach / lit(8.0), reach];
        let est = integrate(|r| self.rotated_integrand(r, tau), &bps, tol)?;
        let g = est.value * self.strength();
        Ok(if t < T::zero() { g.conj() } else { g })
    }

    /// `G(t)` by direct quadrature of the inverse Fourier integral on the real
    /// frequency axis, split at `0` and `±ω_c`. Practical for `|t|ω_c` up to a
    /// few hundred.
    pub fn correlation_real_axis(&self, t: T, tol: &Tolerance) -> Result<Cplx<T>> {
        let reach = lit::<T>(60.0) * self.omega_c;
        let mut bps = vec![-reach, -self.omega_c, T::zero(), self.omega_c, reach];
        if t != T::zero() {
            let period = T::two_pi() / t.abs();
            let chunks = to_f64(reach / period).ceil().min(4000.0) as usize;
            if chunks > 4 {
                bps = (0..=2 * chunks).map(|j| -reach + reach * lit::<T>(j as f64 / chunks as f64)).collect();
                bps.extend([-self.omega_c, T::zero(), self.omega_c]);
                bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
        }
        let tol = Tolerance { max_intervals: tol.max_intervals.max(4 * bps.len()), ..*tol };
        let est = integrate(
            |w| {
                let phase = -w * t;
                cplx(phase.cos(), phase.sin()) * self.spectral_density(w)
            },
            &bps,
            &tol,
        )?;
        Ok(est.value / T::two_pi())
    }

    /// Cauchy principal value `S(ω) = (1/2π) P∫ Ĝ(ω′)/(ω − ω′) dω′`.
    ///
    /// The interval `|ω′ − ω| < 10⁻³ ω_c` is excised and replaced by the
    /// symmetrized regular integrand `−(Ĝ(ω+u) − Ĝ(ω−u))/u` on `(0, ε)`.
    pub fn lamb_shift_integral(&self, omega: T, tol: &Tolerance) -> Result<T> {
        let reach = lit::<T>(60.0) * self.omega_c;
        if omega.abs() > reach * lit(0.5) {
            return Err(Error::Domain(format!("Lamb-shift frequency {} outside supported range", to_f64(omega))));
        }
        let eps = lit::<T>(1e-3) * self.omega_c;
        let (lo, hi) = (omega - eps, omega + eps);
        let mut left = vec![-reach];
        let mut right = vec![hi];
        for b in [-self.omega_c, T::zero(), self.omega_c] {
            if b < lo {
                left.push(b);
            } else if b > hi {
                right.push(b);
            }
        }
        left.push(lo);
        right.push(reach);
        let f = |w: T| self.spectral_density(w) / (omega - w);
        let (a, _) = integrate_real(f, &left, tol)?;
        let (b, _) = integrate_real(f, &right, tol)?;
        let mut inner_bps = vec![T::zero(), eps];
        if omega.abs() < eps && omega != T::zero() {
            // the kink of Ĝ at 0 sits inside the excision
            inner_bps = vec![T::zero(), omega.abs(), eps];
        }
        let (c, _) = integrate_real(
            |u: T| -(self.spectral_density(omega + u) - self.spectral_density(omega - u)) / u,
            &inner_bps,
            tol,
        )?;
        Ok((a + b + c) / T::two_pi())
    }

    /// One-sided transform `Γ(ω) = ∫₀^∞ G(r) e^{iωr} dr = Ĝ(ω)/2 + i S(ω)`.
    pub fn half_fourier(&self, omega: T, tol: &Tolerance) -> Result<Cplx<T>> {
        let half: T = lit(0.5);
        Ok(cplx(self.spectral_density(omega) * half, self.lamb_shift_integral(omega, tol)?))
    }
}

/// Chebyshev tables of `S(ω)` over `±[lo, hi]`, falling back to direct
/// quadrature outside them.
#[derive(Clone, Debug)]
pub struct LambShiftTable<T: Real> {
    bath: BathSpec<T>,
    positive: Chebyshev<T>,
    negative: Chebyshev<T>,
    tol: Tolerance,
}

impl<T: Real> LambShiftTable<T> {
    pub fn new(bath: BathSpec<T>, lo: T, hi: T) -> Result<Self> {
        if !(lo > T::zero() && hi > lo) {
            return Err(Error::Domain("Lamb-shift table needs 0 < lo < hi".into()));
        }
        let tol = Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 4000 };
        let positive = Chebyshev::adaptive(|w| bath.lamb_shift_integral(w, &tol), lo, hi, 1e-12, 16, 512)?;
        let negative = Chebyshev::adaptive(|w| bath.lamb_shift_integral(w, &tol), -hi, -lo, 1e-12, 16, 512)?;
        Ok(Self { bath, positive, negative, tol })
    }

    pub fn bath(&self) -> &BathSpec<T> {
        &self.bath
    }

    pub fn shift(&self, omega: T) -> Result<T> {
        if self.positive.contains(omega) {
            Ok(self.positive.eval(omega))
        } else if self.negative.contains(omega) {
            Ok(self.negative.eval(omega))
        } else {
            self.bath.lamb_shift_integral(omega, &self.tol)
        }
    }
}

/// `G(t)` sampled on a uniform grid `t_j = j·dt`, `0 ≤ t_j ≤ horizon`, with
/// four-point cubic interpolation in between and `G(−t) = G(t)*`.
#[derive(Clone, Debug)]
pub struct CorrelationTable<T: Real> {
    dt: T,
    values: Vec<Cplx<T>>,
}

impl<T: Real> CorrelationTable<T> {
    pub fn build(bath: &BathSpec<T>, dt: T, horizon: T, tol: &Tolerance) -> Result<Self> {
        if !(dt > T::zero() && horizon >= T::zero()) {
            return Err(Error::Domain("correlation table needs dt > 0 and horizon ≥ 0".into()));
        }
        let n = to_f64(horizon / dt).ceil() as usize + 1;
        let values = (0..=n)
            .map(|j| bath.correlation(dt * lit::<T>(j as f64), tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dt, values })
    }

    /// Wraps precomputed samples `G(j·dt)`.
    pub fn from_samples(dt: T, values: Vec<Cplx<T>>) -> Result<Self> {
        if values.len() < 4 || !(dt > T::zero()) {
            return Err(Error::Domain("correlation table needs at least four samples".into()));
        }
        Ok(Self { dt, values })
    }

    pub fn spacing(&self) -> T {
        self.dt
    }

    pub fn horizon(&self) -> T {
        self.dt * lit::<T>((self.values.len() - 1) as f64)
    }

    pub fn samples(&self) -> &[Cplx<T>] {
        &self.values
    }

    pub fn eval(&self, t: T) -> Result<Cplx<T>> {
        let tau = t.abs();
        if tau > self.horizon() {
            return Err(Error::HorizonExceeded { t: to_f64(t), horizon: to_f64(self.horizon()) });
        }
        let x = tau / self.dt;
        let n = self.values.len();
        let j = (to_f64(x).floor() as usize).min(n - 2);
        let frac = x - lit::<T>(j as f64);
        let g = if frac == T::zero() {
            self.values[j]
        } else {
            let start = j.saturating_sub(1).min(n - 4);
            let u = x - lit::<T>(start as f64);
            let mut acc = cplx(T::zero(), T::zero());
            for a in 0..4 {
                let mut w = T::one();
                for b in 0..4 {
                    if a != b {
                        w *= (u - lit::<T>(b as f64)) / lit::<T>(a as f64 - b as f64);
                    }
                }
                acc += self.values[start + a] * w;
            }
            acc
        };
        Ok(if t < T::zero() { g.conj() } else { g })
    }
}

/// Weight in the Markov-approximation error integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkovWeight {
    /// `∫₀^τ t |G(t)| dt` (time-local Redfield form).
    Redfield,
    /// `∫₀^τ (t/τ)² |G(t)| dt` (additional adiabatic expansion of the propagator).
    Adiabatic,
}

/// Correlation models for which Markov error estimates are available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MemoryKernel<T: Real> {
    Ohmic(BathSpec<T>),
    /// `G(t) = g² e^{−t/τ_B}`
    Exponential { g: T, tau_b: T },
    /// `|G(t)| = g² (τ_M/t)^θ` for `t > t₀`.
    Algebraic { g: T, theta: T, tau_m: T, t0: T },
}

/// Order-of-magnitude relative error of the Markov approximation.
pub fn markov_error_estimate<T: Real>(kernel: &MemoryKernel<T>, tau: T, weight: MarkovWeight) -> Result<T> {
    if !(tau > T::zero()) {
        return Err(Error::Domain("anneal time must be positive".into()));
    }
    let two: T = lit(2.0);
    match *kernel {
        MemoryKernel::Ohmic(bath) => {
            let tol = Tolerance { abs: 1e-13, rel: 1e-10, max_intervals: 4000 };
            let inner = Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 4000 };
            let scale = T::one() / bath.omega_c;
            let mut bps = vec![T::zero()];
            let mut b = scale;
            while b < tau {
                bps.push(b);
                b *= lit(4.0);
            }
            bps.push(tau);
            let mut failure = None;
            let (v, _) = integrate_real(
                |t: T| {
                    let g = bath.correlation(t, &inner).unwrap_or_else(|e| {
                        failure = Some(e);
                        cplx(T::zero(), T::zero())
                    });
                    let w = match weight {
                        MarkovWeight::Redfield => t,
                        MarkovWeight::Adiabatic => (t / tau) * (t / tau),
                    };
                    w * g.modulus()
                },
                &bps,
                &tol,
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        MemoryKernel::Exponential { g, tau_b } => {
            if !(tau_b > T::zero()) {
                return Err(Error::Domain("bath memory time must be positive".into()));
            }
            let x = tau / tau_b;
            let e = (-x).exp();
            Ok(match weight {
                MarkovWeight::Redfield => g * g * tau_b * tau_b * (T::one() - e * (T::one() + x)),
                MarkovWeight::Adiabatic => {
                    g * g * tau_b * tau_b * tau_b / (tau * tau) * (two - e * (x * x + two * x + two))
                }
            })
        }
        MemoryKernel::Algebraic { g, theta, tau_m, t0 } => {
            if !(theta > T::zero()) {
                return Err(Error::Domain(format!("algebraic decay exponent must be positive, got {}", to_f64(theta))));
            }
            if !(t0 > T::zero() && tau >= t0) {
                return Err(Error::Domain("algebraic estimate needs 0 < t₀ ≤ τ".into()));
            }
            let g2 = g * g * tau_m.powf(theta);
            // ∫_{t₀}^τ t^{p} dt with p = 1 − θ or 2 − θ
            let power_integral = |p: T| {
                let q = p + T::one();
                if q.abs() < lit(1e-12) {
                    (tau / t0).ln()
                } else {
                    (tau.powf(q) - t0.powf(q)) / q
                }
            };
            Ok(match weight {
                MarkovWeight::Redfield => g2 * power_integral(T::one() - theta),
                MarkovWeight::Adiabatic => g2 * power_integral(two - theta) / (tau * tau),
            })
        }
    }
}
