//! Brute-force reference implementations used for validation only.
//!
//! Nothing here shares code with the block pipeline beyond the basis
//! definition: the rotation action goes through the factorial-sum Wigner
//! matrices, the covariance is integrated over SO(3) by quadrature, and the
//! eigensolver is a plain cyclic Jacobi iteration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::harmonics::{wigner_D, WignerAngles};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;
use crate::transform::{synthesize, to_cartesian, to_spherical, CoefficientVector};

/// Largest degree the oracle accepts.
pub const ORACLE_MAX_L: usize = 6;
/// Largest dense dimension the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 256;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub dim: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    /// `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &[Complex<T>]) -> T {
        self.data.iter().zip(other).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }
}

/// ZYZ product rule: uniform `α`, `γ`, Gauss–Legendre in `cos β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarQuadrature {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl HaarQuadrature {
    /// Exact for products of two degree-`l_max` Wigner matrices.
    pub fn for_degree(l_max: usize) -> Self {
        Self { alpha: 2 * l_max + 1, beta: l_max + 1, gamma: 2 * l_max + 1 }
    }

    pub fn refined(&self) -> Self {
        Self { alpha: 2 * self.alpha, beta: 2 * self.beta, gamma: 2 * self.gamma }
    }

    /// Rotations with weights summing to 1.
    pub fn nodes<T: Real>(&self) -> Vec<(WignerAngles<T>, T)> {
        let (xs, ws) = gauss_legendre::<T>(self.beta);
        let two_pi = T::TAU();
        let na = T::from_usize_exact(self.alpha);
        let ng = T::from_usize_exact(self.gamma);
        let mut out = Vec::with_capacity(self.alpha * self.beta * self.gamma);
        for a in 0..self.alpha {
            let alpha = two_pi * T::from_usize_exact(a) / na;
            for (x, w) in xs.iter().zip(&ws) {
                let beta = x.acos();
                for g in 0..self.gamma {
                    let gamma = two_pi * T::from_usize_exact(g) / ng;
                    out.push((WignerAngles::new(alpha, beta, gamma), *w / (T::lit(2.0) * na * ng)));
                }
            }
        }
        out
    }
}

fn rotate_dense<T: Real>(f: &CoefficientVector<T>, mats: &[Vec<Complex<T>>]) -> Vec<Complex<T>> {
    let spec = f.spec();
    let mut out = vec![Complex::new(T::zero(), T::zero()); spec.dim()];
    for (i, (l, m, s)) in spec.indices().enumerate() {
        let dim = 2 * l + 1;
        let row = (m + l as i64) as usize;
        let li = l as i64;
        for k in -li..=li {
            out[i] += mats[l][row * dim + (k + li) as usize] * f.get(l, k, s);
        }
    }
    out
}

fn wigner_all<T: Real>(l_max: usize, angles: &WignerAngles<T>) -> Result<Vec<Vec<Complex<T>>>> {
    (0..=l_max)
        .map(|l| {
            let li = l as i64;
            let mut m = Vec::with_capacity((2 * l + 1) * (2 * l + 1));
            for a in -li..=li {
                for b in -li..=li {
                    m.push(wigner_D(l, a, b, angles)?);
                }
            }
            Ok(m)
        })
        .collect()
}

/// Dense SO(3)-averaged covariance `(1/n) Σ_i ∫ (R·f_i - μ)(R·f_i - μ)* dR`
/// with `μ = (1/n) Σ_i ∫ R·f_i dR`, both by quadrature.
pub fn haar_quadrature_covariance<T: Real>(samples: &[CoefficientVector<T>]) -> Result<(Vec<Complex<T>>, DenseMatrix<T>)> {
    let first = samples.first().ok_or_else(|| Error::domain("oracle needs at least one sample"))?;
    let l_max = first.spec().l_max();
    haar_quadrature_covariance_with(samples, HaarQuadrature::for_degree(l_max))
}

pub fn haar_quadrature_covariance_with<T: Real>(
    samples: &[CoefficientVector<T>],
    rule: HaarQuadrature,
) -> Result<(Vec<Complex<T>>, DenseMatrix<T>)> {
    let first = samples.first().ok_or_else(|| Error::domain("oracle needs at least one sample"))?;
    let spec = first.spec();
    if spec.l_max() > ORACLE_MAX_L || spec.dim() > ORACLE_MAX_DIM {
        return Err(Error::Refused(format!(
            "oracle limited to L <= {ORACLE_MAX_L} and D <= {ORACLE_MAX_DIM} (got L = {}, D = {})",
            spec.l_max(),
            spec.dim()
        )));
    }
    for f in samples {
        if !f.spec().same_as(spec) {
            return Err(Error::Compatibility("oracle samples use different bases".into()));
        }
    }
    let d = spec.dim();
    let nodes = rule.nodes::<T>();
    let mats: Vec<_> = nodes.iter().map(|(a, _)| wigner_all(spec.l_max(), a)).collect::<Result<_>>()?;
    let nf = T::from_usize_exact(samples.len());

    let mut mean = vec![Complex::new(T::zero(), T::zero()); d];
    for f in samples {
        for ((_, w), m) in nodes.iter().zip(&mats) {
            for (acc, v) in mean.iter_mut().zip(rotate_dense(f, m)) {
                *acc += v * (*w / nf);
            }
        }
    }

    let mut cov = DenseMatrix::zeros(d);
    for f in samples {
        for ((_, w), m) in nodes.iter().zip(&mats) {
            let g: Vec<Complex<T>> = rotate_dense(f, m).into_iter().zip(&mean).map(|(a, b)| a - b).collect();
            let scale = *w / nf;
            for i in 0..d {
                let gi = g[i] * scale;
                for j in 0..d {
                    cov.data[i * d + j] += gi * g[j].conj();
                }
            }
        }
    }
    Ok((mean, cov))
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix. Returns
/// eigenvalues in decreasing order and the matching eigenvectors as columns
/// (`vectors[row * dim + col]`).
pub fn jacobi_eigen<T: Real>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let n = a.dim;
    let mut m = a.clone();
    let mut v = DenseMatrix::zeros(n);
    for i in 0..n {
        v.data[i * n + i] = Complex::new(T::one(), T::zero());
    }
    let fro: T = m.data.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    let tol = T::epsilon() * T::epsilon() * fro * fro;
    let mut converged = fro == T::zero();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m.get(i, j).norm_sqr()).sum();
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = m.get(p, q);
                let babs = b.norm();
                if babs == T::zero() {
                    continue;
                }
                let e = b / babs;
                let tau = (m.get(q, q).re - m.get(p, p).re) / (T::lit(2.0) * babs);
                let sign = if tau >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (m.get(k, p), m.get(k, q));
                    m.data[k * n + p] = kp * c - kq * e.conj() * s;
                    m.data[k * n + q] = kp * e * s + kq * c;
                    let (vp, vq) = (v.get(k, p), v.get(k, q));
                    v.data[k * n + p] = vp * c - vq * e.conj() * s;
                    v.data[k * n + q] = vp * e * s + vq * c;
                }
                for k in 0..n {
                    let (pk, qk) = (m.get(p, k), m.get(q, k));
                    m.data[p * n + k] = pk * c - qk * e * s;
                    m.data[q * n + k] = pk * e.conj() * s + qk * c;
                }
                m.data[p * n + q] = Complex::new(T::zero(), T::zero());
                m.data[q * n + p] = Complex::new(T::zero(), T::zero());
                m.data[p * n + p].im = T::zero();
                m.data[q * n + q].im = T::zero();
            }
        }
    }
    if !converged {
        return Err(Error::Numerical { block: 0, message: "Jacobi iteration did not converge".into() });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).re.partial_cmp(&m.get(i, i).re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.data[row * n + col] = v.get(row, src);
        }
    }
    Ok((values, vectors))
}

/// `(R·φ)(x) = φ(Rᵀx)` evaluated by synthesis at the back-rotated points.
pub fn rotate_field_pointwise<T: Real>(
    coeffs: &CoefficientVector<T>,
    angles: &WignerAngles<T>,
    points: &[(T, T, T)],
) -> Result<Vec<Complex<T>>> {
    let r = angles.to_matrix();
    let moved: Vec<(T, T, T)> = points
        .iter()
        .map(|&(rad, theta, phi)| {
            let x = to_cartesian(rad, theta, phi);
            let y: Vec<T> = (0..3).map(|i| (0..3).map(|k| r[k][i] * x[k]).sum()).collect();
            let (r2, t2, p2) = to_spherical(y[0], y[1], y[2]);
            (r2.min(T::one()), t2, p2)
        })
        .collect();
    synthesize(coeffs, &moved)
}
