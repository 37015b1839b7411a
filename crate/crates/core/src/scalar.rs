//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written against [`Real`], which wraps `num_traits::Float` and
//! adds the one operation that is not expressible generically: a dense
//! Hermitian eigensolver, dispatched to `nalgebra` per concrete float type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Eigendecomposition of a dense Hermitian `dim x dim` matrix stored
    /// row-major. Returns eigenvalues and column-major eigenvectors
    /// (`vectors[col * dim + row]`), unordered. `None` if the solver does not
    /// converge.
    fn hermitian_eigen(dim: usize, matrix: &[Complex<Self>]) -> Option<(Vec<Self>, Vec<Complex<Self>>)>;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn nalgebra_eigen<T>(dim: usize, matrix: &[Complex<T>]) -> Option<(Vec<T>, Vec<Complex<T>>)>
where
    T: nalgebra::RealField + Copy,
    Complex<T>: nalgebra::ComplexField<RealField = T>,
{
    if dim == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    let m = DMatrix::from_row_slice(dim, dim, matrix);
    let eps = T::default_epsilon();
    let eig = SymmetricEigen::try_new(m, eps, 0)?;
    let values = eig.eigenvalues.iter().copied().collect();
    // nalgebra storage is column-major already.
    let vectors = eig.eigenvectors.as_slice().to_vec();
    Some((values, vectors))
}

impl Real for f64 {
    fn hermitian_eigen(dim: usize, matrix: &[Complex<f64>]) -> Option<(Vec<f64>, Vec<Complex<f64>>)> {
        nalgebra_eigen(dim, matrix)
    }
}

impl Real for f32 {
    fn hermitian_eigen(dim: usize, matrix: &[Complex<f32>]) -> Option<(Vec<f32>, Vec<Complex<f32>>)> {
        nalgebra_eigen(dim, matrix)
    }
}

/// Shorthand for a complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal() {
        let z = Complex::new(0.0, 0.0);
        let m = [Complex::new(3.0, 0.0), z, z, Complex::new(1.0, 0.0)];
        let (mut vals, _) = f64::hermitian_eigen(2, &m).unwrap();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(vals, vec![3.0, 1.0]);
    }

    #[test]
    fn eigen_complex_hermitian_residual() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = [
            Complex::new(2.0f64, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.0),
            Complex::new(2.0, 0.0),
        ];
        let (vals, vecs) = f64::hermitian_eigen(2, &m).unwrap();
        for (k, &lam) in vals.iter().enumerate() {
            let v = &vecs[k * 2..k * 2 + 2];
            for r in 0..2 {
                let mv = m[r * 2] * v[0] + m[r * 2 + 1] * v[1];
                assert!((mv - v[r] * lam).norm() < 1e-12);
            }
        }
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sorted[0] - 1.0).abs() < 1e-12 && (sorted[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn f32_path_works() {
        let m = [Complex::new(1.0f32, 0.0)];
        let (vals, vecs) = f32::hermitian_eigen(1, &m).unwrap();
        assert_eq!(vals, vec![1.0]);
        assert!((vecs[0].norm() - 1.0).abs() < 1e-6);
    }
}
