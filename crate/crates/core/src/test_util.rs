//! Random fixtures shared by unit tests.

use nalgebra::DMatrix;
use rand::Rng;

use crate::qops::{CMatrix, Operator};
use crate::scalar::Cplx;

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> CMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| Cplx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

/// `G G† / Tr(G G†)` for a random complex `G`: full rank almost surely.
pub fn random_density(n: usize, rng: &mut impl Rng) -> Operator<f64> {
    let g = random_matrix(n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Operator::new(m / Cplx::new(tr, 0.0)).unwrap().hermitian_part()
}
