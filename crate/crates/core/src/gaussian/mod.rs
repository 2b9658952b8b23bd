//! Exact phase-space engine for Gaussian states and Gaussian unitaries.
//!
//! States are stored as a mean vector and covariance matrix over `n` modes in
//! the quadrature ordering `(q1, p1, …, qn, pn)`, with `ħ = 2` so that the
//! vacuum has identity covariance and `[x_i, x_j] = 2iΩ_ij`.

mod state;
mod symplectic;
mod williamson;

pub use state::{GaussianState, TRACE_TOL_SYMMETRY};
pub use symplectic::{gaussian_unitary, GaussianUnitary, SymplecticOp};
pub use williamson::{
    gaussian_entropy, schmidt_decompose, symplectic_eigenvalues, thermal_entropy, williamson, Williamson,
    WilliamsonSpectrum,
};

use nalgebra::DMatrix;

use crate::error::invalid_arg;
use crate::Result;

/// Block-diagonal symplectic form `Ω = ⊕ [[0, 1], [-1, 0]]` over `n` modes.
pub fn symplectic_form(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(invalid_arg!("symplectic form needs at least one mode"));
    }
    Ok(omega(n))
}

pub(crate) fn omega(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_form() {
        let o = symplectic_form(1).unwrap();
        assert_eq!(o, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn two_mode_form_is_direct_sum() {
        let o = symplectic_form(2).unwrap();
        let block = symplectic_form(1).unwrap();
        assert_eq!(o.view((0, 0), (2, 2)), block);
        assert_eq!(o.view((2, 2), (2, 2)), block);
        assert!(o.view((0, 2), (2, 2)).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn form_squares_to_minus_identity() {
        let o = symplectic_form(3).unwrap();
        assert_eq!(&o * &o, -DMatrix::<f64>::identity(6, 6));
        assert_eq!(o.transpose(), -o);
    }

    #[test]
    fn zero_modes_rejected() {
        assert!(matches!(symplectic_form(0), Err(crate::Error::InvalidArgument(_))));
    }
}
