use nalgebra::{ComplexField, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::qubit_center_radius;
use super::{CMatrix, CVector, Operator, SuperOperator, PRESERVATION_TOL};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Cplx, Real};

/// Trace norm `‖X‖₁ = Tr √(X†X)`: sum of singular values, or of absolute
/// eigenvalues when `X` is Hermitian.
pub fn trace_norm<T: Real>(op: &Operator<T>) -> T {
    let scale = T::one() + op.max_abs();
    if op.hermiticity_defect() <= lit::<T>(1e-13) * scale {
        return hermitian_trace_norm(op.matrix());
    }
    op.matrix().clone().svd(false, false).singular_values.sum()
}

fn hermitian_trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.nrows() == 2 {
        let (c, r) = qubit_center_radius(m);
        let two: T = lit(2.0);
        return two * c.abs().max(r);
    }
    Operator::from_square(m.clone())
        .eigh()
        .values
        .iter()
        .fold(T::zero(), |a, v| a + v.abs())
}

/// Search policy for [`induced_norm_1_1`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSearch {
    /// Bloch-sphere grid points in the polar angle (qubits).
    pub polar: usize,
    /// Bloch-sphere grid points in the azimuth (qubits).
    pub azimuth: usize,
    /// Angular (or coordinate) step at which local refinement stops.
    pub refine_tol: f64,
    /// Number of grid maxima refined locally.
    pub refine_starts: usize,
    /// Random starting states for dimensions above two.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for NormSearch {
    fn default() -> Self {
        Self { polar: 64, azimuth: 128, refine_tol: 1e-6, refine_starts: 4, multistart: 48, seed: 0x5eed }
    }
}

/// Induced trace norm `‖T‖₁,₁` of a Hermiticity-preserving map.
///
/// The extreme points of the Hermitian trace-norm unit ball are `±|ψ⟩⟨ψ|`, so
/// the supremum is taken over pure states. For `n = 2` the Bloch sphere is
/// scanned on a grid and the best points are refined locally, which pins the
/// maximum to the refinement tolerance. For `n > 2` a multistart local search
/// is used and the result is a lower bound.
pub fn induced_norm_1_1<T: Real>(map: &SuperOperator<T>, policy: &NormSearch) -> Result<T> {
    let defect = map.hermiticity_preservation_defect();
    let scale = T::one() + map.max_abs();
    if defect > lit::<T>(PRESERVATION_TOL) * scale {
        return Err(Error::NotHermiticityPreserving(to_f64(defect)));
    }
    let n = map.dim();
    if n == 1 {
        return Ok(map.matrix()[(0, 0)].modulus());
    }
    if n == 2 {
        Ok(qubit_search(map, policy))
    } else {
        Ok(multistart_search(map, policy))
    }
}

fn image_norm<T: Real>(map: &SuperOperator<T>, psi: &CVector<T>) -> T {
    let rho = psi * psi.adjoint();
    let v = DVector::from_column_slice(rho.as_slice());
    let img = map.matrix() * v;
    let n = psi.len();
    let m = CMatrix::<T>::from_column_slice(n, n, img.as_slice());
    let herm = (&m + m.adjoint()).map(|z| z * lit::<T>(0.5));
    hermitian_trace_norm(&herm)
}

fn bloch_state<T: Real>(theta: T, phi: T) -> CVector<T> {
    let half: T = lit(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    DVector::from_vec(vec![Cplx::new(c, T::zero()), Cplx::new(phi.cos() * s, phi.sin() * s)])
}

fn qubit_search<T: Real>(map: &SuperOperator<T>, policy: &NormSearch) -> T {
    let pi = T::pi();
    let np = policy.polar.max(2);
    let na = policy.azimuth.max(1);
    let mut samples: Vec<(T, T, T)> = Vec::with_capacity(np * na);
    for i in 0..np {
        let theta = pi * lit::<T>(i as f64 / (np - 1) as f64);
        for j in 0..na {
            let phi = T::two_pi() * lit::<T>(j as f64 / na as f64);
            samples.push((image_norm(map, &bloch_state(theta, phi)), theta, phi));
        }
    }
    samples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let step0 = pi / lit::<T>((np - 1) as f64);
    let tol: T = lit(policy.refine_tol);
    let mut best = samples[0].0;
    for &(v0, th, ph) in samples.iter().take(policy.refine_starts.max(1)) {
        let f = |x: &[T]| image_norm(map, &bloch_state(x[0], x[1]));
        let (v, _) = compass_maximize(f, vec![th, ph], v0, step0, tol);
        best = best.max(v);
    }
    best
}

fn multistart_search<T: Real>(map: &SuperOperator<T>, policy: &NormSearch) -> T {
    let n = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let to_state = |x: &[T]| {
        let v = CVector::<T>::from_fn(n, |k, _| Cplx::new(x[2 * k], x[2 * k + 1]));
        let norm = v.norm();
        v.map(|z| z / norm)
    };
    let mut starts: Vec<Vec<T>> = Vec::new();
    for k in 0..n {
        let mut x = vec![T::zero(); 2 * n];
        x[2 * k] = T::one();
        starts.push(x);
    }
    for _ in 0..policy.multistart {
        starts.push((0..2 * n).map(|_| lit(rng.random::<f64>() * 2.0 - 1.0)).collect());
    }
    let tol: T = lit(policy.refine_tol);
    let mut best = T::zero();
    for x0 in starts {
        let f = |x: &[T]| image_norm(map, &to_state(x));
        let v0 = f(&x0);
        let (v, _) = compass_maximize(f, x0, v0, lit(0.25), tol);
        best = best.max(v);
    }
    best
}

/// Coordinate pattern search: move along ±step in each coordinate while it
/// improves, halve the step otherwise.
fn compass_maximize<T: Real>(f: impl Fn(&[T]) -> T, mut x: Vec<T>, mut fx: T, mut step: T, tol: T) -> (T, Vec<T>) {
    let half: T = lit(0.5);
    while step > tol {
        let mut improved = false;
        for k in 0..x.len() {
            for sign in [T::one(), -T::one()] {
                let mut y = x.clone();
                y[k] += sign * step;
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= half;
        }
    }
    (fx, x)
}
