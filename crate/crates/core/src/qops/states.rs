use super::{Operator, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::scalar::{creal, lit, Cplx, Real};

/// Thermal state `exp(−βH)/Tr exp(−βH)` of a Hermitian operator.
pub fn gibbs_state<T: Real>(h: &Operator<T>, beta: T) -> Result<Operator<T>> {
    h.validate_hermitian()?;
    if !beta.is_finite() {
        return Err(Error::InfiniteBeta);
    }
    if beta < T::zero() {
        return Err(Error::Domain("inverse temperature must be nonnegative".into()));
    }
    let spaces = h.eigenspaces(lit(DEGENERACY_TOL));
    let e0 = spaces.energies[0];
    let weights: Vec<T> = spaces.energies.iter().map(|&e| (-(beta * (e - e0))).exp()).collect();
    let z = spaces
        .projectors
        .iter()
        .zip(&weights)
        .fold(T::zero(), |acc, (p, &w)| acc + w * p.trace().re);
    let mut rho = Operator::zeros(h.dim());
    for (p, &w) in spaces.projectors.iter().zip(&weights) {
        rho += &p.scale(w / z);
    }
    Ok(rho.hermitian_part())
}

/// Which tensor factor a partial trace removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// The left factor `A` in `A ⊗ B`.
    First,
    /// The right factor `B` in `A ⊗ B`.
    Second,
}

/// Partial trace over `traced` of an operator on `C^{dim_a} ⊗ C^{dim_b}`.
pub fn partial_trace<T: Real>(op: &Operator<T>, dim_a: usize, dim_b: usize, traced: Subsystem) -> Result<Operator<T>> {
    let n = op.dim();
    if dim_a == 0 || dim_b == 0 || dim_a * dim_b != n {
        return Err(Error::NotFactorizable { dim: n, left: dim_a, right: dim_b });
    }
    let m = op.matrix();
    let zero = creal(T::zero());
    let out = match traced {
        Subsystem::Second => Operator::from_fn(dim_a, |i, j| {
            (0..dim_b).fold(zero, |acc: Cplx<T>, k| acc + m[(i * dim_b + k, j * dim_b + k)])
        }),
        Subsystem::First => Operator::from_fn(dim_b, |i, j| {
            (0..dim_a).fold(zero, |acc: Cplx<T>, k| acc + m[(k * dim_b + i, k * dim_b + j)])
        }),
    };
    Ok(out)
}
