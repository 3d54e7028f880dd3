//! Adaptive Gauss–Kronrod quadrature and Chebyshev interpolation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use nalgebra::ComplexField;

use crate::scalar::{lit, to_f64, Cplx, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Stopping rule for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Largest number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-12, max_intervals: 4000 }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate<T: Real> {
    pub value: Cplx<T>,
    pub error: T,
    pub evaluations: usize,
}

struct Interval<T: Real> {
    a: T,
    b: T,
    value: Cplx<T>,
    error: T,
}

impl<T: Real> PartialEq for Interval<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Interval<T> {}
impl<T: Real> PartialOrd for Interval<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Interval<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Real>(f: &mut impl FnMut(T) -> Cplx<T>, a: T, b: T) -> (Cplx<T>, T) {
    let half: T = lit(0.5);
    let center = (a + b) * half;
    let radius = (b - a) * half;
    let fc = f(center);
    let mut kron = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    for i in 0..7 {
        let dx = radius * lit::<T>(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kron += pair * lit::<T>(WGK[i]);
        if i % 2 == 1 {
            gauss += pair * lit::<T>(WG[i / 2]);
        }
    }
    let value = kron * radius;
    let error = ((kron - gauss) * radius).modulus();
    (value, error)
}

/// Adaptive 7/15-point Gauss–Kronrod quadrature of a complex integrand over
/// consecutive `breakpoints`. The interval with the largest error estimate is
/// bisected until the summed estimate meets `tol`.
pub fn integrate<T: Real>(mut f: impl FnMut(T) -> Cplx<T>, breakpoints: &[T], tol: &Tolerance) -> Result<Estimate<T>> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain("quadrature needs at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = Cplx::new(T::zero(), T::zero());
    let mut err = T::zero();
    let mut evaluations = 0usize;
    for w in breakpoints.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = kronrod(&mut f, w[0], w[1]);
        evaluations += 15;
        total += value;
        err += error;
        heap.push(Interval { a: w[0], b: w[1], value, error });
    }
    let abs: T = lit(tol.abs);
    let rel: T = lit(tol.rel);
    let half: T = lit(0.5);
    while err > abs.max(rel * total.modulus()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature { error: to_f64(err), tolerance: tol.abs.max(tol.rel * to_f64(total.modulus())) });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = (worst.a + worst.b) * half;
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine precision
            heap.push(worst);
            return Err(Error::Quadrature { error: to_f64(err), tolerance: tol.abs });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // resum to avoid drift from incremental updates
    let value = heap.iter().fold(Cplx::new(T::zero(), T::zero()), |acc, iv| acc + iv.value);
    let error = heap.iter().fold(T::zero(), |acc, iv| acc + iv.error);
    Ok(Estimate { value, error, evaluations })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<T: Real>(mut f: impl FnMut(T) -> T, breakpoints: &[T], tol: &Tolerance) -> Result<(T, T)> {
    let est = integrate(|x| Cplx::new(f(x), T::zero()), breakpoints, tol)?;
    Ok((est.value.re, est.error))
}

/// Chebyshev expansion of a smooth function on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct Chebyshev<T: Real> {
    lo: T,
    hi: T,
    coeffs: Vec<T>,
}

impl<T: Real> Chebyshev<T> {
    /// Interpolates `f` at `n` Chebyshev points of the first kind.
    pub fn interpolate(f: impl Fn(T) -> Result<T>, lo: T, hi: T, n: usize) -> Result<Self> {
        let n = n.max(2);
        let pi = T::pi();
        let half: T = lit(0.5);
        let nf: T = lit(n as f64);
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            let x = (pi * (lit::<T>(j as f64) + half) / nf).cos();
            values.push(f((hi + lo) * half + (hi - lo) * half * x)?);
        }
        let two: T = lit(2.0);
        let coeffs = (0..n)
            .map(|k| {
                let kf: T = lit(k as f64);
                let s = values.iter().enumerate().fold(T::zero(), |acc, (j, &v)| {
                    acc + v * (pi * kf * (lit::<T>(j as f64) + half) / nf).cos()
                });
                let c = two * s / nf;
                if k == 0 {
                    c * half
                } else {
                    c
                }
            })
            .collect();
        Ok(Self { lo, hi, coeffs })
    }

    /// Doubles the number of nodes from `start` until the trailing
    /// coefficients fall below `tol` (relative to the largest one).
    pub fn adaptive(f: impl Fn(T) -> Result<T>, lo: T, hi: T, tol: f64, start: usize, max_nodes: usize) -> Result<Self> {
        let mut n = start.max(8);
        loop {
            let cheb = Self::interpolate(&f, lo, hi, n)?;
            if cheb.tail_magnitude() <= lit::<T>(tol) * cheb.scale() {
                return Ok(cheb.trimmed(lit(tol)));
            }
            if n >= max_nodes {
                return Err(Error::Quadrature { error: to_f64(cheb.tail_magnitude()), tolerance: tol });
            }
            n *= 2;
        }
    }

    fn scale(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    fn tail_magnitude(&self) -> T {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(4)..].iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    fn trimmed(mut self, tol: T) -> Self {
        let cut = tol * self.scale() * lit::<T>(0.1);
        while self.coeffs.len() > 2 && self.coeffs.last().is_some_and(|c| c.abs() < cut) {
            self.coeffs.pop();
        }
        self
    }

    pub fn domain(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw evaluation; callers keep `x` inside the domain.
    pub fn eval(&self, x: T) -> T {
        let two: T = lit(2.0);
        let u = (two * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = two * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs[0]
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polynomial_exact() {
        let (v, e) = integrate_real(|x: f64| 3.0 * x * x, &[0.0, 2.0], &Tolerance::default()).unwrap();
        assert!((v - 8.0).abs() < 1e-13 && e < 1e-10);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let est = integrate(|x: f64| Cplx::new((5.0 * x).cos() * x, (5.0 * x).sin() * x), &[0.0, 2.0 * std::f64::consts::PI], &Tolerance::default())
            .unwrap();
        // ∫₀^{2π} x e^{iax} dx = 2π/(ia) for integer a
        let exact = Cplx::new(0.0, -2.0 * std::f64::consts::PI / 5.0);
        assert!((est.value - exact).modulus() < 1e-10);
    }

    #[test]
    fn endpoint_singularity_resolved_adaptively() {
        let (v, _) = integrate_real(|x: f64| 1.0 / x.sqrt(), &[0.0, 1.0], &Tolerance { abs: 1e-9, rel: 0.0, max_intervals: 4000 }).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reports_nonconvergence() {
        let tol = Tolerance { abs: 1e-14, rel: 0.0, max_intervals: 10 };
        let r = integrate_real(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], &tol);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn chebyshev_reproduces_exponential() {
        let c = Chebyshev::adaptive(|x: f64| Ok(x.exp()), -1.0, 2.0, 1e-14, 8, 256).unwrap();
        for i in 0..=30 {
            let x = -1.0 + 3.0 * i as f64 / 30.0;
            assert!((c.eval(x) - x.exp()).abs() < 1e-13 * x.exp().max(1.0));
        }
        assert!(c.degree() < 30);
    }

    proptest! {
        #[test]
        fn gaussian_integral(s in 0.2f64..3.0) {
            let (v, _) = integrate_real(|x: f64| (-(x / s).powi(2)).exp(), &[-40.0 * s, 0.0, 40.0 * s], &Tolerance::default()).unwrap();
            prop_assert!((v - s * std::f64::consts::PI.sqrt()).abs() < 1e-9);
        }
    }
}
