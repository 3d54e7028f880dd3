use std::ops::{Add, Mul, Sub};

use nalgebra::{ComplexField, DMatrix};

use super::operator::{devectorize, vectorize};
use super::{CMatrix, CVector, Operator};
use crate::error::{Error, Result};
use crate::scalar::{creal, imag_unit, lit, Cplx, Real};

/// Linear map on operators of `C^n`, stored as an `n²×n²` matrix acting on
/// column-stacked operators.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator<T: Real> {
    n: usize,
    mat: CMatrix<T>,
}

impl<T: Real> SuperOperator<T> {
    pub fn from_matrix(mat: CMatrix<T>) -> Result<Self> {
        let rows = mat.nrows();
        if rows != mat.ncols() {
            return Err(Error::NotSquare { rows, cols: mat.ncols() });
        }
        let n = (rows as f64).sqrt().round() as usize;
        if n * n != rows {
            return Err(Error::NotPerfectSquare(rows));
        }
        Ok(Self { n, mat })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, mat: DMatrix::identity(n * n, n * n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, mat: DMatrix::zeros(n * n, n * n) }
    }

    /// `X ↦ A X B`, i.e. `Bᵀ ⊗ A`.
    pub fn sandwich(a: &Operator<T>, b: &Operator<T>) -> Self {
        Self { n: a.dim(), mat: b.matrix().transpose().kronecker(a.matrix()) }
    }

    /// `X ↦ A X`
    pub fn left(a: &Operator<T>) -> Self {
        let n = a.dim();
        Self { n, mat: CMatrix::<T>::identity(n, n).kronecker(a.matrix()) }
    }

    /// `X ↦ X B`
    pub fn right(b: &Operator<T>) -> Self {
        let n = b.dim();
        Self { n, mat: b.matrix().transpose().kronecker(&CMatrix::<T>::identity(n, n)) }
    }

    /// `X ↦ −i[H, X]`
    pub fn hamiltonian(h: &Operator<T>) -> Self {
        let i = imag_unit::<T>();
        let mut out = Self::left(h);
        out.mat -= Self::right(h).mat;
        out.mat *= -i;
        out
    }

    /// `X ↦ L X L† − ½{L†L, X}`
    pub fn dissipator(l: &Operator<T>) -> Self {
        let ld = l.adjoint();
        let ldl = &ld * l;
        let half: T = lit(0.5);
        let mut out = Self::sandwich(l, &ld);
        out.mat -= (Self::left(&ldl).mat + Self::right(&ldl).mat).map(|z| z * half);
        out
    }

    /// Operator dimension `n` (the matrix is `n²×n²`).
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.mat
    }

    pub fn apply(&self, x: &Operator<T>) -> Operator<T> {
        devectorize(&self.apply_vec(&vectorize(x))).expect("square by construction")
    }

    pub fn apply_vec(&self, v: &CVector<T>) -> CVector<T> {
        &self.mat * v
    }

    /// Hilbert–Schmidt adjoint: `Tr[A† T(B)] = Tr[T†(A)† B]`.
    pub fn adjoint(&self) -> Self {
        Self { n: self.n, mat: self.mat.adjoint() }
    }

    pub fn scale(&self, c: T) -> Self {
        Self { n: self.n, mat: self.mat.map(|z| z * c) }
    }

    pub fn add_scaled(&mut self, other: &Self, c: Cplx<T>) {
        self.mat += &other.mat * c;
    }

    /// `‖T†(𝟙)‖_F`; zero for trace-preserving maps.
    pub fn trace_defect(&self) -> T {
        self.adjoint().apply(&Operator::identity(self.n)).frobenius_norm()
    }

    /// Worst Hermiticity defect of the image of a Hermitian operator basis.
    pub fn hermiticity_preservation_defect(&self) -> T {
        hermitian_basis(self.n)
            .iter()
            .map(|x| self.apply(x).hermiticity_defect())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_trace_preserving(&self, tol: T) -> bool {
        self.trace_defect() < tol
    }

    pub fn is_hermiticity_preserving(&self, tol: T) -> bool {
        self.hermiticity_preservation_defect() < tol
    }

    /// `exp(t T)` by scaling and squaring.
    pub fn exp(&self, t: T) -> Self {
        Self { n: self.n, mat: self.mat.map(|z| z * t).exp() }
    }

    /// Eigenvalues of the `n²×n²` matrix (complex Schur form).
    pub fn eigenvalues(&self) -> Vec<Cplx<T>> {
        let schur = self.mat.clone().schur();
        let (_, tri) = schur.unpack();
        (0..tri.nrows()).map(|k| tri[(k, k)]).collect()
    }

    /// Largest column sum of moduli, used as a cheap scale for step sizes.
    pub fn column_sum_norm(&self) -> T {
        self.mat
            .column_iter()
            .map(|c| c.iter().fold(T::zero(), |a, z| a + z.modulus()))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Largest entry modulus of the matrix.
    pub fn max_abs(&self) -> T {
        self.mat.iter().fold(T::zero(), |m, z| m.max(z.modulus()))
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.mat
            .clone()
            .try_inverse()
            .map(|mat| Self { n: self.n, mat })
            .ok_or(Error::Singular("superoperator inverse"))
    }
}

/// Hermitian basis `{E_ii, E_ij + E_ji, i(E_ij − E_ji)}` of `n×n` matrices.
pub(crate) fn hermitian_basis<T: Real>(n: usize) -> Vec<Operator<T>> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(Operator::matrix_unit(n, i, i));
        for j in (i + 1)..n {
            let eij = Operator::matrix_unit(n, i, j);
            let eji = Operator::matrix_unit(n, j, i);
            out.push(&eij + &eji);
            out.push((&eij - &eji).scale_c(imag_unit()));
        }
    }
    out
}

/// Choi matrix `J(T) = Σ_ij T(|i⟩⟨j|) ⊗ |i⟩⟨j|`; `T` is completely positive
/// iff `J(T) ⪰ 0`.
pub fn choi_matrix<T: Real>(map: &SuperOperator<T>) -> Operator<T> {
    let n = map.n;
    let mut out = Operator::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            let eij = Operator::matrix_unit(n, i, j);
            out += &map.apply(&eij).kron(&eij);
        }
    }
    out
}

impl<T: Real> Mul<&SuperOperator<T>> for &SuperOperator<T> {
    type Output = SuperOperator<T>;
    fn mul(self, rhs: &SuperOperator<T>) -> SuperOperator<T> {
        SuperOperator { n: self.n, mat: &self.mat * &rhs.mat }
    }
}

impl<T: Real> Add<&SuperOperator<T>> for &SuperOperator<T> {
    type Output = SuperOperator<T>;
    fn add(self, rhs: &SuperOperator<T>) -> SuperOperator<T> {
        SuperOperator { n: self.n, mat: &self.mat + &rhs.mat }
    }
}

impl<T: Real> Sub<&SuperOperator<T>> for &SuperOperator<T> {
    type Output = SuperOperator<T>;
    fn sub(self, rhs: &SuperOperator<T>) -> SuperOperator<T> {
        SuperOperator { n: self.n, mat: &self.mat - &rhs.mat }
    }
}

impl<T: Real> Add<SuperOperator<T>> for SuperOperator<T> {
    type Output = SuperOperator<T>;
    fn add(self, rhs: SuperOperator<T>) -> SuperOperator<T> {
        SuperOperator { n: self.n, mat: self.mat + rhs.mat }
    }
}

impl<T: Real> Mul<Cplx<T>> for SuperOperator<T> {
    type Output = SuperOperator<T>;
    fn mul(self, c: Cplx<T>) -> SuperOperator<T> {
        SuperOperator { n: self.n, mat: self.mat * c }
    }
}

impl<T: Real> SuperOperator<T> {
    /// The transpose map `X ↦ Xᵀ`.
    pub fn transpose_map(n: usize) -> Self {
        let mut mat = DMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                mat[(j + n * i, i + n * j)] = creal(T::one());
            }
        }
        Self { n, mat }
    }
}
