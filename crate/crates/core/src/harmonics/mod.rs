//! Special functions behind the ball-harmonics basis.

mod bessel;
mod legendre;
mod wigner;

pub use bessel::{sph_bessel, sph_bessel_derivative, sph_bessel_zero, BesselZeroTable};
pub use legendre::{sph_harmonic, PolarTable};
pub use wigner::{
    wigner_D, wigner_D_matrices, wigner_D_matrix, wigner_d_matrices, wigner_d_small, WignerAngles,
    FACTORIAL_SUM_MAX_L,
};
#[allow(unused_imports)]
pub(crate) use wigner::matmul3;

use crate::scalar::Real;

/// `ln(k!)` for `k = 0..=n`, accumulated term by term.
#[derive(Debug, Clone)]
pub(crate) struct LogFactorial<T> {
    table: Vec<T>,
}

impl<T: Real> LogFactorial<T> {
    pub(crate) fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0f64;
        table.push(T::zero());
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(T::lit(acc));
        }
        Self { table }
    }

    #[inline]
    pub(crate) fn ln(&self, k: usize) -> T {
        self.table[k]
    }
}
