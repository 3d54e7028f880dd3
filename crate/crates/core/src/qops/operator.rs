use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};

use super::{CMatrix, CVector, DENSITY_TOL, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::scalar::{creal, imag_unit, lit, to_f64, Cplx, Real};

/// Dense operator on `C^n`: a Hamiltonian, an observable or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    mat: CMatrix<T>,
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectral<T: Real> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMatrix<T>,
}

/// Distinct energy levels and their orthogonal eigenprojectors.
#[derive(Clone, Debug)]
pub struct Eigenspaces<T: Real> {
    pub energies: Vec<T>,
    pub projectors: Vec<Operator<T>>,
}

impl<T: Real> Operator<T> {
    pub fn new(mat: CMatrix<T>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix already known to be square.
    pub(crate) fn from_square(mat: CMatrix<T>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        Self { mat: DMatrix::from_fn(n, n, f) }
    }

    /// Builds an operator from row-major complex entries.
    pub fn from_rows(n: usize, entries: &[Cplx<T>]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        Ok(Self { mat: DMatrix::from_row_slice(n, n, entries) })
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { mat: DMatrix::zeros(n, n) }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { creal(values[i]) } else { Cplx::new(T::zero(), T::zero()) })
    }

    /// `|a⟩⟨b|`
    pub fn ket_bra(a: &CVector<T>, b: &CVector<T>) -> Self {
        Self { mat: a * b.adjoint() }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(psi: &CVector<T>) -> Self {
        Self::ket_bra(psi, psi)
    }

    /// Computational basis element `|i⟩⟨j|` on `C^n`.
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        let mut mat = DMatrix::zeros(n, n);
        mat[(i, j)] = Cplx::new(T::one(), T::zero());
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose() }
    }

    pub fn conjugate(&self) -> Self {
        Self { mat: self.mat.conjugate() }
    }

    pub fn trace(&self) -> Cplx<T> {
        self.mat.trace()
    }

    pub fn scale(&self, c: T) -> Self {
        Self { mat: self.mat.map(|z| z * c) }
    }

    pub fn scale_c(&self, c: Cplx<T>) -> Self {
        Self { mat: &self.mat * c }
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        Self { mat: &self.mat * &other.mat - &other.mat * &self.mat }
    }

    /// `{self, other}`
    pub fn anticommutator(&self, other: &Self) -> Self {
        Self { mat: &self.mat * &other.mat + &other.mat * &self.mat }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { mat: self.mat.kronecker(&other.mat) }
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> T {
        self.mat.iter().fold(T::zero(), |m, z| m.max(z.modulus()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.mat.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// `max |M − M†|` elementwise.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for j in 0..n {
            for i in 0..=j {
                let d = (self.mat[(i, j)] - self.mat[(j, i)].conj()).modulus();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() < tol
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        let half: T = lit(0.5);
        Self { mat: (&self.mat + self.mat.adjoint()).map(|z| z * half) }
    }

    pub fn validate_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect < lit(HERMITIAN_TOL) {
            Ok(())
        } else {
            Err(Error::NotHermitian(to_f64(defect)))
        }
    }

    /// Checks Hermiticity, unit trace and positivity at the density tolerances.
    pub fn validate_density(&self) -> Result<()> {
        let tol: T = lit(DENSITY_TOL);
        let defect = self.hermiticity_defect();
        if defect >= tol {
            return Err(Error::InvalidDensity(format!("Hermiticity defect {:e}", to_f64(defect))));
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() >= tol || tr.im.abs() >= tol {
            return Err(Error::InvalidDensity(format!("trace {:e}", to_f64(tr.re))));
        }
        let min = self.hermitian_part().eigh().values[0];
        if min < -tol {
            return Err(Error::InvalidDensity(format!("minimum eigenvalue {:e}", to_f64(min))));
        }
        Ok(())
    }

    /// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
    pub fn eigh(&self) -> Spectral<T> {
        let n = self.dim();
        let eig = SymmetricEigen::new(self.hermitian_part().mat);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Spectral { values, vectors }
    }

    /// Distinct eigenvalues (grouped when closer than `gap_tol`) with their
    /// eigenprojectors. Two-level operators use the closed form
    /// `Π± = (𝟙 ± (H − m)/r)/2`, which is smooth in the matrix entries.
    pub fn eigenspaces(&self, gap_tol: T) -> Eigenspaces<T> {
        let n = self.dim();
        if n == 2 {
            let (m, r) = qubit_center_radius(&self.mat);
            if r + r < gap_tol {
                return Eigenspaces { energies: vec![m], projectors: vec![Self::identity(2)] };
            }
            let half: T = lit(0.5);
            let inv = half / r;
            let d = &self.mat - CMatrix::<T>::identity(2, 2) * creal(m);
            let id = CMatrix::<T>::identity(2, 2).map(|z| z * half);
            let lower = &id - d.map(|z| z * inv);
            let upper = &id + d.map(|z| z * inv);
            return Eigenspaces {
                energies: vec![m - r, m + r],
                projectors: vec![Self { mat: lower }, Self { mat: upper }],
            };
        }
        let spec = self.eigh();
        let mut energies: Vec<T> = Vec::new();
        let mut projectors: Vec<Self> = Vec::new();
        let mut members: Vec<T> = Vec::new();
        for (k, &e) in spec.values.iter().enumerate() {
            let col = spec.vectors.column(k).into_owned();
            let p = col.clone() * col.adjoint();
            match energies.last() {
                Some(_) if e - *members.last().unwrap() < gap_tol => {
                    let last = projectors.last_mut().unwrap();
                    last.mat += p;
                    members.push(e);
                    let mean = members.iter().fold(T::zero(), |a, &b| a + b) / lit(members.len() as f64);
                    *energies.last_mut().unwrap() = mean;
                }
                _ => {
                    energies.push(e);
                    projectors.push(Self { mat: p });
                    members.clear();
                    members.push(e);
                }
            }
        }
        Eigenspaces { energies, projectors }
    }

    /// `exp(−i t H)` for Hermitian `H`.
    pub fn unitary_propagator(&self, t: T) -> Self {
        let n = self.dim();
        if n == 2 {
            let (m, r) = qubit_center_radius(&self.mat);
            let phase = Cplx::new((t * m).cos(), -(t * m).sin());
            let id = CMatrix::<T>::identity(2, 2);
            let mut out = id.map(|z| z * (t * r).cos());
            if r > T::zero() {
                let d = &self.mat - &id * creal(m);
                let s = -imag_unit::<T>() * creal((t * r).sin() / r);
                out += d * s;
            }
            return Self { mat: out * phase };
        }
        let spec = self.eigh();
        let phases = DVector::from_iterator(
            n,
            spec.values.iter().map(|&e| Cplx::new((t * e).cos(), -(t * e).sin())),
        );
        let v = &spec.vectors;
        let scaled = DMatrix::from_fn(n, n, |r, c| v[(r, c)] * phases[c]);
        Self { mat: scaled * v.adjoint() }
    }

    /// Trace-norm distance `‖self − other‖₁`.
    pub fn trace_distance(&self, other: &Self) -> T {
        super::trace_norm(&(self - other))
    }
}

/// Center and half-splitting of a Hermitian 2×2 matrix: eigenvalues `m ± r`.
pub(crate) fn qubit_center_radius<T: Real>(m: &CMatrix<T>) -> (T, T) {
    let half: T = lit(0.5);
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * creal(half);
    let c = (a + d) * half;
    let h = (a - d) * half;
    (c, (h * h + b.norm_sqr()).sqrt())
}

/// Column-stacking vectorization: entry `(i, j)` lands at index `i + n j`.
pub fn vectorize<T: Real>(op: &Operator<T>) -> CVector<T> {
    DVector::from_column_slice(op.mat.as_slice())
}

/// Inverse of [`vectorize`].
pub fn devectorize<T: Real>(v: &CVector<T>) -> Result<Operator<T>> {
    let len = v.len();
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(Error::NotPerfectSquare(len));
    }
    Ok(Operator { mat: DMatrix::from_column_slice(n, n, v.as_slice()) })
}

/// Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x<T: Real>() -> Operator<T> {
        let (o, z) = (creal(T::one()), creal(T::zero()));
        Operator::from_rows(2, &[z, o, o, z]).unwrap()
    }

    pub fn y<T: Real>() -> Operator<T> {
        let i = imag_unit::<T>();
        let z = creal(T::zero());
        Operator::from_rows(2, &[z, -i, i, z]).unwrap()
    }

    pub fn z<T: Real>() -> Operator<T> {
        let (o, z) = (creal(T::one()), creal(T::zero()));
        Operator::from_rows(2, &[o, z, z, -o]).unwrap()
    }

    /// `σ⁻ = |1⟩⟨0|` with `σ_z|0⟩ = |0⟩`.
    pub fn lowering<T: Real>() -> Operator<T> {
        Operator::matrix_unit(2, 1, 0)
    }

    pub fn raising<T: Real>() -> Operator<T> {
        Operator::matrix_unit(2, 0, 1)
    }
}

macro_rules! impl_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<T: Real> $tr<&Operator<T>> for &Operator<T> {
            type Output = Operator<T>;
            fn $f(self, rhs: &Operator<T>) -> Operator<T> {
                Operator { mat: &self.mat $op &rhs.mat }
            }
        }
        impl<T: Real> $tr<Operator<T>> for Operator<T> {
            type Output = Operator<T>;
            fn $f(self, rhs: Operator<T>) -> Operator<T> {
                Operator { mat: self.mat $op rhs.mat }
            }
        }
        impl<T: Real> $tr<&Operator<T>> for Operator<T> {
            type Output = Operator<T>;
            fn $f(self, rhs: &Operator<T>) -> Operator<T> {
                Operator { mat: self.mat $op &rhs.mat }
            }
        }
        impl<T: Real> $tr<Operator<T>> for &Operator<T> {
            type Output = Operator<T>;
            fn $f(self, rhs: Operator<T>) -> Operator<T> {
                Operator { mat: &self.mat $op rhs.mat }
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl<T: Real> AddAssign<&Operator<T>> for Operator<T> {
    fn add_assign(&mut self, rhs: &Operator<T>) {
        self.mat += &rhs.mat;
    }
}

impl<T: Real> SubAssign<&Operator<T>> for Operator<T> {
    fn sub_assign(&mut self, rhs: &Operator<T>) {
        self.mat -= &rhs.mat;
    }
}

impl<T: Real> Neg for Operator<T> {
    type Output = Operator<T>;
    fn neg(self) -> Operator<T> {
        Operator { mat: -self.mat }
    }
}

impl<T: Real> Neg for &Operator<T> {
    type Output = Operator<T>;
    fn neg(self) -> Operator<T> {
        Operator { mat: -&self.mat }
    }
}
