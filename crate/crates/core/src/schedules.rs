//! Annealing schedules with vanishing end-point derivatives and the
//! single-qubit annealing Hamiltonian built from them.
//!
//! The order-`k` boundary-cancellation schedule is
//! `θ_k(s) = 2 I_{(s+1)/2}(k+1, k+1) − 1`, whose derivative is proportional
//! to `(1 − s²)^k`. Every schedule here is a piecewise polynomial, so values
//! and derivatives of any order are evaluated exactly from stored
//! coefficients; the incomplete-Beta route is kept as an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qops::{pauli, Operator};
use crate::scalar::{lit, Real};
use crate::special::regularized_incomplete_beta;

/// Affine normalization of the Beta-function schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `2 I_{(s+1)/2}(k+1,k+1) − 1`, mapping `[0,1]` onto `[0,1]`.
    #[default]
    Corrected,
    /// `2 I_{(s+1)/2}(k+1,k+1)`, mapping `[0,1]` onto `[1,2]`.
    AsPrinted,
}

/// Shape family of a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Shape {
    /// Derivatives `1..=k` vanish at `s = 1` only.
    EndCancel { k: usize, normalization: Normalization },
    /// `I_s(k+1, k+1)`: derivatives `1..=k` vanish at both `s = 0` and `s = 1`.
    BothEnds { k: usize },
    /// Linear ramp on `[0, 1−δ]` whose slope is brought smoothly to zero on
    /// `[1−δ, 1]`. The first four derivatives vanish at `s = 1` and the
    /// junction is `C⁴`.
    EndFlattened { delta: f64 },
}

#[derive(Clone, Debug)]
struct Piece<T: Real> {
    /// Left end of the piece in `s`.
    start: T,
    origin: T,
    width: T,
    /// `θ` as a polynomial in `u = (s − origin)/width`, lowest order first.
    coeffs: Vec<T>,
}

impl<T: Real> Piece<T> {
    fn derivative(&self, s: T, j: usize) -> T {
        let u = (s - self.origin) / self.width;
        let mut acc = T::zero();
        for (p, &c) in self.coeffs.iter().enumerate().skip(j).rev() {
            // c · p (p−1) ... (p−j+1)
            let f = (0..j).fold(c, |f, q| f * lit::<T>((p - q) as f64));
            acc = acc * u + f;
        }
        acc / self.width.powi(j as i32)
    }
}

/// Annealing schedule `θ(s)` on rescaled time `s ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct Schedule<T: Real> {
    shape: Shape,
    pieces: Vec<Piece<T>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `B(k+1, k+1) = (k!)² / (2k+1)!`
fn symmetric_beta(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64 / (k + i) as f64) / (2 * k + 1) as f64
}

impl<T: Real> Schedule<T> {
    /// Order-`k` boundary-cancellation schedule with the corrected normalization.
    pub fn new(k: usize) -> Self {
        Self::from_shape(Shape::EndCancel { k, normalization: Normalization::Corrected }).expect("valid shape")
    }

    pub fn both_ends(k: usize) -> Self {
        Self::from_shape(Shape::BothEnds { k }).expect("valid shape")
    }

    pub fn end_flattened(delta: f64) -> Result<Self> {
        Self::from_shape(Shape::EndFlattened { delta })
    }

    pub fn from_shape(shape: Shape) -> Result<Self> {
        let pieces = match shape {
            Shape::EndCancel { k, normalization } => {
                // θ(s) = c Σ_m C(k,m) (−1)^m s^{2m+1}/(2m+1)
                let mut coeffs = vec![0.0f64; 2 * k + 2];
                for m in 0..=k {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    coeffs[2 * m + 1] = sign * binomial(k, m) / (2 * m + 1) as f64;
                }
                // ∫₀¹ (1−u²)^k du = 4^k B(k+1, k+1)
                let total = 4f64.powi(k as i32) * symmetric_beta(k);
                let mut coeffs: Vec<T> = coeffs.iter().map(|&c| lit(c / total)).collect();
                if normalization == Normalization::AsPrinted {
                    coeffs[0] = T::one();
                }
                vec![Piece { start: lit(f64::NEG_INFINITY), origin: T::zero(), width: T::one(), coeffs }]
            }
            Shape::BothEnds { k } => {
                // θ(s) ∝ ∫₀^s v^k (1−v)^k dv = Σ_m C(k,m) (−1)^m s^{k+m+1}/(k+m+1)
                let mut coeffs = vec![0.0f64; 2 * k + 2];
                for m in 0..=k {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    coeffs[k + m + 1] = sign * binomial(k, m) / (k + m + 1) as f64;
                }
                let total = symmetric_beta(k);
                let coeffs = coeffs.iter().map(|&c| lit(c / total)).collect();
                vec![Piece { start: lit(f64::NEG_INFINITY), origin: T::zero(), width: T::one(), coeffs }]
            }
            Shape::EndFlattened { delta } => {
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::Domain(format!("flattening width must lie in (0, 1), got {delta}")));
                }
                // slope 1 − φ(u), φ(u) = 35u⁴ − 84u⁵ + 70u⁶ − 20u⁷;
                // θ = (1−δ) + δ (u − 7u⁵ + 14u⁶ − 10u⁷ + 2.5u⁸)
                let a = 1.0 - delta;
                let tail = [a, delta, 0.0, 0.0, 0.0, -7.0 * delta, 14.0 * delta, -10.0 * delta, 2.5 * delta];
                vec![
                    Piece {
                        start: lit(f64::NEG_INFINITY),
                        origin: T::zero(),
                        width: T::one(),
                        coeffs: vec![T::zero(), T::one()],
                    },
                    Piece {
                        start: lit(a),
                        origin: lit(a),
                        width: lit(delta),
                        coeffs: tail.iter().map(|&c| lit(c)).collect(),
                    },
                ]
            }
        };
        Ok(Self { shape, pieces })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Number of derivatives guaranteed to vanish at `s = 1`.
    pub fn order(&self) -> usize {
        match self.shape {
            Shape::EndCancel { k, .. } | Shape::BothEnds { k } => k,
            Shape::EndFlattened { .. } => 4,
        }
    }

    fn piece(&self, s: T) -> &Piece<T> {
        self.pieces.iter().rev().find(|p| s >= p.start).unwrap_or(&self.pieces[0])
    }

    fn check_domain(s: T) -> Result<()> {
        if s >= T::zero() && s <= T::one() {
            Ok(())
        } else {
            Err(Error::Domain(format!("rescaled time must lie in [0, 1], got {}", crate::scalar::to_f64(s))))
        }
    }

    /// `θ(s)` for `s ∈ [0, 1]`.
    pub fn theta(&self, s: T) -> Result<T> {
        Self::check_domain(s)?;
        Ok(self.theta_smooth(s))
    }

    /// `θ(s)` continued polynomially outside `[0, 1]`; used by finite
    /// differences and integrator stages that touch the end points.
    pub fn theta_smooth(&self, s: T) -> T {
        self.piece(s).derivative(s, 0)
    }

    /// Exact `j`-th derivative `θ^{(j)}(s)` (`j = 0` gives `θ`).
    pub fn theta_derivative(&self, s: T, j: usize) -> Result<T> {
        Self::check_domain(s)?;
        Ok(self.theta_derivative_smooth(s, j))
    }

    /// `θ^{(j)}(s)` with the polynomial continued outside `[0, 1]`.
    /// The derivatives `1..=order()` are exactly zero at a flattened end
    /// rather than the rounding residue of the expanded polynomial.
    pub fn theta_derivative_smooth(&self, s: T, j: usize) -> T {
        let flat_end = s == T::one() || (s == T::zero() && matches!(self.shape, Shape::BothEnds { .. }));
        if flat_end && (1..=self.order()).contains(&j) {
            return T::zero();
        }
        self.piece(s).derivative(s, j)
    }

    /// `θ(s)` through the regularized incomplete Beta function, for the
    /// Beta-family shapes. Returns `None` for [`Shape::EndFlattened`].
    pub fn theta_via_beta(&self, s: T) -> Option<Result<T>> {
        let one = T::one();
        let two: T = lit(2.0);
        match self.shape {
            Shape::EndCancel { k, normalization } => {
                let a: T = lit((k + 1) as f64);
                Some(Self::check_domain(s).and_then(|_| {
                    let i = regularized_incomplete_beta((s + one) / two, a, a)?;
                    Ok(match normalization {
                        Normalization::Corrected => two * i - one,
                        Normalization::AsPrinted => two * i,
                    })
                }))
            }
            Shape::BothEnds { k } => {
                let a: T = lit((k + 1) as f64);
                Some(Self::check_domain(s).and_then(|_| regularized_incomplete_beta(s, a, a)))
            }
            Shape::EndFlattened { .. } => None,
        }
    }
}

/// `H_S(s) = ω_x σ_x (1 − θ(s)) + ω_z σ_z θ(s)`.
#[derive(Clone, Debug)]
pub struct AnnealHamiltonian<T: Real> {
    pub omega_x: T,
    pub omega_z: T,
    pub schedule: Schedule<T>,
}

impl<T: Real> AnnealHamiltonian<T> {
    pub fn new(omega_x: T, omega_z: T, schedule: Schedule<T>) -> Self {
        Self { omega_x, omega_z, schedule }
    }

    /// `ω_x = ω_z = 1 ns⁻¹` with the order-`k` end-cancellation schedule.
    pub fn standard(k: usize) -> Self {
        Self::new(T::one(), T::one(), Schedule::new(k))
    }

    pub fn system_hamiltonian(&self, s: T) -> Result<Operator<T>> {
        Schedule::<T>::check_domain(s)?;
        Ok(self.at(s))
    }

    /// `H_S(s)` with the schedule continued smoothly outside `[0, 1]`.
    pub fn at(&self, s: T) -> Operator<T> {
        self.at_theta(self.schedule.theta_smooth(s))
    }

    /// `ω_x σ_x (1 − θ) + ω_z σ_z θ` for a given schedule value.
    pub fn at_theta(&self, theta: T) -> Operator<T> {
        pauli::x::<T>().scale(self.omega_x * (T::one() - theta)) + pauli::z::<T>().scale(self.omega_z * theta)
    }

    /// `∂_s^j H_S(s) = θ^{(j)}(s) (ω_z σ_z − ω_x σ_x)` for `j ≥ 1`.
    pub fn derivative(&self, s: T, j: usize) -> Operator<T> {
        if j == 0 {
            return self.at(s);
        }
        let d = self.schedule.theta_derivative_smooth(s, j);
        (pauli::z::<T>().scale(self.omega_z) - pauli::x::<T>().scale(self.omega_x)).scale(d)
    }

    /// Smallest spectral gap of `H_S` on a uniform grid of `samples` points.
    pub fn min_gap(&self, samples: usize) -> T {
        let mut gap = T::max_value().unwrap_or(lit(f64::MAX));
        for i in 0..=samples {
            let s: T = lit(i as f64 / samples as f64);
            let spec = self.at(s).eigh();
            gap = gap.min(spec.values[1] - spec.values[0]);
        }
        gap
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Fourth-order central stencils for the first four derivatives.
    fn central_difference(f: impl Fn(f64) -> f64, s: f64, h: f64, j: usize) -> f64 {
        let g = |m: f64| f(s + m * h);
        match j {
            1 => (-g(2.0) + 8.0 * g(1.0) - 8.0 * g(-1.0) + g(-2.0)) / (12.0 * h),
            2 => (-g(2.0) + 16.0 * g(1.0) - 30.0 * g(0.0) + 16.0 * g(-1.0) - g(-2.0)) / (12.0 * h * h),
            3 => (-g(3.0) + 8.0 * g(2.0) - 13.0 * g(1.0) + 13.0 * g(-1.0) - 8.0 * g(-2.0) + g(-3.0)) / (8.0 * h.powi(3)),
            4 => {
                (-g(3.0) + 12.0 * g(2.0) - 39.0 * g(1.0) + 56.0 * g(0.0) - 39.0 * g(-1.0) + 12.0 * g(-2.0) - g(-3.0))
                    / (6.0 * h.powi(4))
            }
            _ => unreachable!(),
        }
    }

    /// Independent oracle for `θ_k(1 + v) − 1`. With `u = 1 + w`,
    /// `1 − u² = −w(2 + w)`, so the deviation is
    /// `c_k (−1)^k Σ_m C(k,m) 2^{k−m} v^{k+m+1}/(k+m+1)`, which keeps full
    /// relative precision for small `v`.
    fn end_deviation(k: usize, v: f64) -> f64 {
        let fact = |n: usize| (1..=n).fold(1.0, |a, i| a * i as f64);
        let c = fact(2 * k + 1) / (4f64.powi(k as i32) * fact(k) * fact(k));
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let sum: f64 = (0..=k)
            .map(|m| binomial(k, m) * 2f64.powi((k - m) as i32) * v.powi((k + m + 1) as i32) / (k + m + 1) as f64)
            .sum();
        c * sign * sum
    }

    #[test]
    fn deviation_oracle_matches_schedule() {
        for k in 0..6 {
            let sch = Schedule::<f64>::new(k);
            for v in [-0.3, -0.01, 0.01, 0.2] {
                assert!((sch.theta_smooth(1.0 + v) - 1.0 - end_deviation(k, v)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn k_zero_is_linear_ramp() {
        let sch = Schedule::<f64>::new(0);
        for s in [0.0, 0.2, 0.5, 0.91, 1.0] {
            assert!((sch.theta(s).unwrap() - s).abs() < 1e-15);
        }
    }

    #[test]
    fn k_one_midpoint_matches_closed_form() {
        // 2 I_{0.75}(2,2) − 1 = 2·0.84375 − 1
        let sch = Schedule::<f64>::new(1);
        assert!((sch.theta(0.5).unwrap() - 0.6875).abs() < 1e-15);
    }

    #[test]
    fn endpoints_are_zero_and_one() {
        for k in 0..6 {
            let sch = Schedule::<f64>::new(k);
            assert!(sch.theta(0.0).unwrap().abs() < 1e-15);
            assert!((sch.theta(1.0).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn as_printed_normalization_is_shifted_by_one() {
        let sch = Schedule::<f64>::from_shape(Shape::EndCancel { k: 2, normalization: Normalization::AsPrinted }).unwrap();
        assert!((sch.theta(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((sch.theta(1.0).unwrap() - 2.0).abs() < 1e-14);
        let beta = sch.theta_via_beta(0.3).unwrap().unwrap();
        assert!((sch.theta(0.3).unwrap() - beta).abs() < 1e-13);
    }

    #[test]
    fn polynomial_and_beta_routes_agree() {
        for k in 0..6 {
            let sch = Schedule::<f64>::new(k);
            let both = Schedule::<f64>::both_ends(k);
            for i in 0..=20 {
                let s = i as f64 / 20.0;
                let a = sch.theta(s).unwrap();
                let b = sch.theta_via_beta(s).unwrap().unwrap();
                assert!((a - b).abs() < 1e-13, "k={k} s={s}: {a} vs {b}");
                let a = both.theta(s).unwrap();
                let b = both.theta_via_beta(s).unwrap().unwrap();
                assert!((a - b).abs() < 1e-13, "both-ends k={k} s={s}");
            }
        }
    }

    #[test]
    fn end_derivatives_vanish_up_to_order_k() {
        let h = 1e-3;
        for k in 0..5 {
            let sch = Schedule::<f64>::new(k);
            for j in 1..=k {
                assert!(sch.theta_derivative(1.0, j).unwrap().abs() < 1e-10, "k={k} j={j}");
                let fd = central_difference(|s| end_deviation(k, s - 1.0), 1.0, h, j);
                assert!(fd.abs() < 1e-6, "k={k} j={j}: fd {fd}");
            }
            assert!(sch.theta_derivative(1.0, k + 1).unwrap().abs() > 1e-3, "k={k}");
            if k < 4 {
                let fd = central_difference(|s| end_deviation(k, s - 1.0), 1.0, h, k + 1);
                assert!(fd.abs() > 1e-3, "k={k}: fd {fd}");
                let exact = sch.theta_derivative(1.0, k + 1).unwrap();
                assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn first_derivative_matches_finite_difference_at_start() {
        let sch = Schedule::<f64>::new(2);
        let h = 1e-5;
        let fd = (sch.theta_smooth(h) - sch.theta_smooth(-h)) / (2.0 * h);
        assert!((sch.theta_derivative(0.0, 1).unwrap() - fd).abs() < 1e-8);
        // θ₂'(0) = 15/8
        assert!((sch.theta_derivative(0.0, 1).unwrap() - 1.875).abs() < 1e-14);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences_in_the_interior() {
        for k in 0..5 {
            let sch = Schedule::<f64>::new(k);
            for s in [0.2, 0.5, 0.8] {
                for j in 1..=3 {
                    let fd = central_difference(|x| sch.theta_smooth(x), s, 1e-2, j);
                    let exact = sch.theta_derivative(s, j).unwrap();
                    assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "k={k} s={s} j={j}");
                }
            }
        }
    }

    #[test]
    fn both_ends_schedule_is_flat_at_both_ends() {
        let sch = Schedule::<f64>::both_ends(2);
        for j in 1..=2 {
            assert!(sch.theta_derivative(0.0, j).unwrap().abs() < 1e-12);
            assert!(sch.theta_derivative(1.0, j).unwrap().abs() < 1e-12);
        }
        assert!(sch.theta_derivative(0.0, 3).unwrap().abs() > 1e-3);
    }

    #[test]
    fn end_flattened_matches_ramp_before_window() {
        let sch = Schedule::<f64>::end_flattened(0.25).unwrap();
        for s in [0.0, 0.3, 0.7, 0.75] {
            assert!((sch.theta(s).unwrap() - s).abs() < 1e-15);
        }
        for j in 1..=4 {
            assert!(sch.theta_derivative(1.0, j).unwrap().abs() < 1e-11, "j={j}");
        }
        // junction smoothness: derivatives agree from both sides
        for j in 1..=4 {
            let left = sch.theta_derivative_smooth(0.75 - 1e-12, j);
            let right = sch.theta_derivative_smooth(0.75 + 1e-12, j);
            assert!((left - right).abs() < 1e-6, "j={j}: {left} {right}");
        }
        assert!((sch.theta(1.0).unwrap() - 0.875).abs() < 1e-14);
        assert!(Schedule::<f64>::end_flattened(1.5).is_err());
    }

    #[test]
    fn out_of_domain_rejected() {
        let sch = Schedule::<f64>::new(1);
        assert!(sch.theta(-0.1).is_err());
        assert!(sch.theta(1.1).is_err());
        assert!(sch.theta_derivative(1.5, 1).is_err());
    }

    #[test]
    fn hamiltonian_end_points() {
        let h = AnnealHamiltonian::<f64>::new(0.7, 1.3, Schedule::new(2));
        let h0 = h.system_hamiltonian(0.0).unwrap();
        let h1 = h.system_hamiltonian(1.0).unwrap();
        assert!((h0 - pauli::x::<f64>().scale(0.7)).max_abs() < 1e-15);
        assert!((h1 - pauli::z::<f64>().scale(1.3)).max_abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_midpoint_spectrum() {
        let h = AnnealHamiltonian::<f64>::standard(0);
        let mid = h.system_hamiltonian(0.5).unwrap();
        let expect = (pauli::x::<f64>() + pauli::z::<f64>()).scale(0.5);
        assert!((&mid - &expect).max_abs() < 1e-15);
        let spec = mid.eigh();
        let r = 0.5f64.sqrt();
        assert!((spec.values[0] + r).abs() < 1e-14 && (spec.values[1] - r).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_derivatives_vanish_at_end() {
        let h = 1e-3;
        for k in 1..5 {
            let ham = AnnealHamiltonian::<f64>::standard(k);
            for j in 1..=k {
                assert!(ham.derivative(1.0, j).max_abs() < 1e-10);
            }
            // Direct evaluation is roundoff limited beyond second order at this step.
            for j in 1..=k.min(2) {
                let fd = central_difference(|s| ham.at(s).matrix()[(0, 0)].re, 1.0, h, j)
                    .abs()
                    .max(central_difference(|s| ham.at(s).matrix()[(0, 1)].re, 1.0, h, j).abs());
                assert!(fd < 1e-6, "k={k} j={j}: {fd}");
            }
        }
    }

    #[test]
    fn single_precision_schedule() {
        let sch = Schedule::<f32>::new(1);
        assert!((sch.theta(0.5).unwrap() - 0.6875).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn strictly_increasing(k in 0usize..5, s in 0.0f64..0.999) {
            let sch = Schedule::<f64>::new(k);
            prop_assert!(sch.theta(s + 1e-3).unwrap() > sch.theta(s).unwrap());
        }

        #[test]
        fn centered_schedule_is_odd(k in 0usize..5, s in 0.0f64..1.0) {
            let sch = Schedule::<f64>::new(k);
            prop_assert!((sch.theta_smooth(s) + sch.theta_smooth(-s)).abs() < 1e-14);
        }

        #[test]
        fn hamiltonian_is_hermitian(k in 0usize..4, s in 0.0f64..1.0) {
            let h = AnnealHamiltonian::<f64>::standard(k);
            prop_assert!(h.system_hamiltonian(s).unwrap().is_hermitian(1e-12));
        }
    }
}
