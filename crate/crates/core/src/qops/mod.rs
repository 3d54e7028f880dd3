//! Dense operator and superoperator algebra.
//!
//! Operators are complex `n×n` matrices; superoperators act on operators
//! vectorized by stacking columns, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//! This convention is used everywhere in the crate.

mod norms;
mod operator;
mod states;
mod superop;

pub use norms::{induced_norm_1_1, trace_norm, NormSearch};
pub use operator::{devectorize, pauli, vectorize, Eigenspaces, Operator, Spectral};
pub use states::{gibbs_state, partial_trace, Subsystem};
pub use superop::{choi_matrix, SuperOperator};

use nalgebra::{DMatrix, DVector};

use crate::scalar::Cplx;

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Cplx<T>>;
/// Dense complex vector.
pub type CVector<T> = DVector<Cplx<T>>;

/// Gap below which neighbouring eigenvalues are treated as one level.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Hermiticity tolerance for operators flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace and eigenvalue tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Tolerance for the trace/Hermiticity preservation flags of superoperators.
pub const PRESERVATION_TOL: f64 = 1e-10;
/// Tolerance used by complete-positivity diagnostics.
pub const CP_TOL: f64 = 1e-8;
