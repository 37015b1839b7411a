//! Independent complex Gaussian model on principal coefficients.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pca::{reconstruct, uncenter, PrincipalBasis};
use crate::scalar::Real;
use crate::transform::CoefficientVector;

/// `β_j ~ μ_j + σ_j (g₁ + i g₂)/√2` for the first `d` eigenvolumes.
#[derive(Debug, Clone)]
pub struct SynthesisModel<T> {
    basis: Arc<PrincipalBasis<T>>,
    mu: Vec<Complex<T>>,
    sigma: Vec<T>,
    mean_radial: Vec<Complex<T>>,
}

impl<T: Real> SynthesisModel<T> {
    pub fn new(basis: &Arc<PrincipalBasis<T>>, mu: Vec<Complex<T>>, sigma: Vec<T>, mean_radial: Vec<Complex<T>>) -> Result<Self> {
        let d = mu.len();
        if d == 0 || d > basis.dim() {
            return Err(Error::domain(format!("d = {d} outside 1..={}", basis.dim())));
        }
        if sigma.len() != d {
            return Err(Error::domain(format!("sigma has {} entries, mu has {d}", sigma.len())));
        }
        if let Some(j) = sigma.iter().position(|s| !(*s >= T::zero()) || !s.is_finite()) {
            return Err(Error::domain(format!("sigma[{j}] must be finite and >= 0")));
        }
        if mu.iter().any(|m| !m.re.is_finite() || !m.im.is_finite()) {
            return Err(Error::domain("mu must be finite"));
        }
        if mean_radial.len() != basis.spec().radial_count(0) {
            return Err(Error::domain("mean_radial length must equal S(0)"));
        }
        Ok(Self { basis: Arc::clone(basis), mu, sigma, mean_radial })
    }

    pub fn basis(&self) -> &Arc<PrincipalBasis<T>> {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[Complex<T>] {
        &self.mu
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn mean_radial(&self) -> &[Complex<T>] {
        &self.mean_radial
    }
}

/// Sample mean and unbiased variance `Σ|α - μ|² / (n - 1)` per component.
/// The radial mean comes from the basis.
pub fn fit_model<T: Real>(projections: &[Vec<Complex<T>>], basis: &Arc<PrincipalBasis<T>>) -> Result<SynthesisModel<T>> {
    let n = projections.len();
    if n < 2 {
        return Err(Error::domain("variance undefined for fewer than 2 samples"));
    }
    let d = projections[0].len();
    if let Some(i) = projections.iter().position(|a| a.len() != d) {
        return Err(Error::domain(format!("projection {i} has length {}, expected {d}", projections[i].len())));
    }
    let nf = T::from_usize_exact(n);
    let mut mu = vec![Complex::new(T::zero(), T::zero()); d];
    for a in projections {
        for (m, x) in mu.iter_mut().zip(a) {
            *m += x;
        }
    }
    mu.iter_mut().for_each(|m| *m /= nf);
    let mut var = vec![T::zero(); d];
    for a in projections {
        for ((v, x), m) in var.iter_mut().zip(a).zip(&mu) {
            *v += (x - m).norm_sqr();
        }
    }
    let denom = T::from_usize_exact(n - 1);
    let sigma = var.into_iter().map(|v| (v / denom).sqrt()).collect();
    SynthesisModel::new(basis, mu, sigma, basis.mean_radial().to_vec())
}

/// Principal coefficients `β` drawn for `seed`.
pub fn sample_coefficients<T: Real>(model: &SynthesisModel<T>, seed: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = T::FRAC_1_SQRT_2();
    model
        .mu
        .iter()
        .zip(&model.sigma)
        .map(|(m, s)| {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            m + Complex::new(T::lit(g1), T::lit(g2)) * (*s * scale)
        })
        .collect()
}

/// A new coefficient vector: `reconstruct(β)` plus the radial mean.
pub fn sample_volume<T: Real>(model: &SynthesisModel<T>, seed: u64) -> Result<CoefficientVector<T>> {
    let beta = sample_coefficients(model, seed);
    let f = reconstruct(&beta, &model.basis, model.d())?;
    uncenter(&f, &model.mean_radial)
}
