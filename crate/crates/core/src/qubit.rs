//! Stack-allocated two-level fast paths for generator assembly.
//!
//! Long anneals evaluate the generator millions of times; these routines
//! mirror [`crate::generators::davies_superoperator`] and
//! [`crate::generators::redfield_superoperator`] for `n = 2` without heap
//! allocation.

use nalgebra::{Matrix2, Matrix4};

use crate::bath::BathSpec;
use crate::error::Result;
use crate::qops::{Operator, SuperOperator};
use crate::scalar::{creal, imag_unit, lit, Cplx, Real};

pub type Mat2<T> = Matrix2<Cplx<T>>;
pub type Mat4<T> = Matrix4<Cplx<T>>;

pub fn to_mat2<T: Real>(op: &Operator<T>) -> Mat2<T> {
    let m = op.matrix();
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

pub fn to_superoperator<T: Real>(m: &Mat4<T>) -> SuperOperator<T> {
    SuperOperator::from_matrix(nalgebra::DMatrix::from_column_slice(4, 4, m.as_slice())).expect("4x4 is a qubit superoperator")
}

/// `a ⊗ b`
fn kron<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat4<T> {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `X ↦ A X B`
fn sandwich<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat4<T> {
    kron(&b.transpose(), a)
}

/// `X ↦ A X + X B`
fn left_plus_right<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat4<T> {
    kron(&Mat2::identity(), a) + kron(&b.transpose(), &Mat2::identity())
}

fn dissipator<T: Real>(l: &Mat2<T>) -> Mat4<T> {
    let ld = l.adjoint();
    let ldl = ld * l;
    let half = creal(lit::<T>(0.5));
    sandwich(l, &ld) - left_plus_right(&ldl, &ldl) * half
}

fn max_abs<T: Real>(m: &Mat2<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.norm_sqr())).sqrt()
}

/// Davies generator for a Hermitian `h`, same construction and degeneracy
/// handling as the general routine.
pub fn davies<T: Real>(h: &Mat2<T>, a: &Mat2<T>, bath: &BathSpec<T>, shift: Option<&dyn Fn(T) -> Result<T>>) -> Result<Mat4<T>> {
    let half: T = lit(0.5);
    let hr = h.map(|z| z.re);
    let off = (h[(0, 1)] + h[(1, 0)].conj()) * creal(half);
    let c = (hr[(0, 0)] + hr[(1, 1)]) * half;
    let d = (hr[(0, 0)] - hr[(1, 1)]) * half;
    let r = (d * d + off.norm_sqr()).sqrt();
    let id = Mat2::<T>::identity();
    let tol: T = lit(crate::qops::DEGENERACY_TOL);
    // (ω, A(ω)) with A(ω) = Σ_{E_b − E_a = ω} Π_a A Π_b
    let mut terms: [(T, Mat2<T>); 3] = [(T::zero(), Mat2::zeros()); 3];
    let count;
    if r + r < tol {
        terms[0] = (T::zero(), *a);
        count = 1;
    } else {
        let n = (h - id * creal(c)) * creal(half / r);
        let lower = id * creal(half) - n;
        let upper = id * creal(half) + n;
        let gap = r + r;
        terms[0] = (-gap, upper * a * lower);
        terms[1] = (T::zero(), lower * a * lower + upper * a * upper);
        terms[2] = (gap, lower * a * upper);
        count = 3;
    }
    let floor = max_abs(a) * lit(1e-14);
    let mut total = *h;
    let mut out = Mat4::zeros();
    for (w, l) in terms.iter().take(count) {
        if max_abs(l) <= floor {
            continue;
        }
        if let Some(f) = shift {
            total += (l.adjoint() * l) * creal(f(*w)?);
        }
        let rate = bath.spectral_density(*w);
        if rate != T::zero() {
            out += dissipator(l) * creal(rate);
        }
    }
    if shift.is_some() {
        total = (total + total.adjoint()) * creal(half);
    }
    out += hamiltonian(&total);
    Ok(out)
}

/// `X ↦ −i[H, X]`
pub fn hamiltonian<T: Real>(h: &Mat2<T>) -> Mat4<T> {
    let id = Mat2::<T>::identity();
    (kron(&id, h) - kron(&h.transpose(), &id)) * (-imag_unit::<T>())
}

/// `X ↦ −i[H, X] + W X A − A W X + A X W† − X W† A`.
pub fn redfield<T: Real>(h: &Mat2<T>, a: &Mat2<T>, w: &Mat2<T>) -> Mat4<T> {
    let wd = w.adjoint();
    let id = Mat2::<T>::identity();
    hamiltonian(h) + sandwich(w, a) - kron(&id, &(a * w)) + sandwich(a, &wd) - kron(&(wd * a).transpose(), &id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{davies_superoperator, redfield_superoperator};
    use crate::qops::pauli;
    use crate::test_util::random_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_general_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let bath = BathSpec::from_millikelvin(0.05, 1.0, 16.0, 12.0).unwrap();
        let shift = |w: f64| Ok(0.1 * w + 0.03);
        for _ in 0..10 {
            let h = Operator::new(random_matrix(2, &mut rng)).unwrap().hermitian_part();
            let a = Operator::new(random_matrix(2, &mut rng)).unwrap().hermitian_part();
            let w = Operator::new(random_matrix(2, &mut rng)).unwrap();
            let fast = to_superoperator(&davies(&to_mat2(&h), &to_mat2(&a), &bath, Some(&shift)).unwrap());
            let slow = davies_superoperator(&h, &a, &bath, Some(&shift)).unwrap();
            assert!((&fast - &slow).max_abs() < 1e-13);
            let fast = to_superoperator(&davies(&to_mat2(&h), &to_mat2(&a), &bath, None).unwrap());
            let slow = davies_superoperator(&h, &a, &bath, None).unwrap();
            assert!((&fast - &slow).max_abs() < 1e-13);
            let fast = to_superoperator(&redfield(&to_mat2(&h), &to_mat2(&a), &to_mat2(&w)));
            assert!((&fast - &redfield_superoperator(&h, &a, &w)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_hamiltonian_gives_single_term() {
        let bath = BathSpec::from_millikelvin(0.05, 1.0, 16.0, 12.0).unwrap();
        let h = Operator::<f64>::identity(2).scale(0.4);
        let a = pauli::x::<f64>();
        let fast = to_superoperator(&davies(&to_mat2(&h), &to_mat2(&a), &bath, None).unwrap());
        let slow = davies_superoperator(&h, &a, &bath, None).unwrap();
        assert!((&fast - &slow).max_abs() < 1e-14);
    }
}
