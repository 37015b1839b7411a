use std::sync::Arc;

use num_complex::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::harmonics::WignerAngles;
use crate::scalar::Real;
use crate::transform::{rotate_coeffs, CoefficientVector};

/// Parameters of a synthetic low-rank dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetOptions {
    pub n: usize,
    /// Number of compact components `(l, v)`; each spans `2l + 1` eigenvolumes.
    pub rank: usize,
    /// Standard deviation of white complex noise on every coefficient.
    pub noise: f64,
    pub seed: u64,
    /// Apply an independent Haar-random rotation to each sample.
    pub rotate: bool,
}

/// Generated samples and the degree of each planted component.
#[derive(Debug, Clone)]
pub struct SyntheticDataset<T> {
    pub samples: Vec<CoefficientVector<T>>,
    pub component_degrees: Vec<usize>,
}

impl<T> SyntheticDataset<T> {
    /// Eigenvolume count spanned by the planted components.
    pub fn expanded_rank(&self) -> usize {
        self.component_degrees.iter().map(|l| 2 * l + 1).sum()
    }
}

fn gaussian<T: Real>(rng: &mut ChaCha8Rng) -> Complex<T> {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(a * std::f64::consts::FRAC_1_SQRT_2), T::lit(b * std::f64::consts::FRAC_1_SQRT_2))
}

/// `count` orthonormal vectors in `C^dim` by Gram–Schmidt on Gaussian draws.
fn orthonormal<T: Real>(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex<T>>> {
    let mut out: Vec<Vec<Complex<T>>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &out {
                let dot: Complex<T> = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= y * dot);
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-3) {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

/// Samples `f_i = b + Σ_k a_k Σ_m c_{ikm} (v_k ⊗ e_m) + noise`, with `b` a
/// fixed radial offset, `a_k = 1/(k+1)`, `c` standard complex normal and the
/// `v_k` orthonormal within each degree. The planted directions are compact,
/// so `rank <= D'` is required.
pub fn generate_synthetic_dataset<T: Real>(spec: &Arc<BasisSpec<T>>, opts: &DatasetOptions) -> Result<SyntheticDataset<T>> {
    if opts.n == 0 {
        return Err(Error::domain("dataset size must be at least 1"));
    }
    if opts.rank > spec.dim_compact() {
        return Err(Error::domain(format!(
            "rank {} exceeds the {} compact directions (D = {})",
            opts.rank,
            spec.dim_compact(),
            spec.dim()
        )));
    }
    if !(opts.noise >= 0.0 && opts.noise.is_finite()) {
        return Err(Error::domain("noise must be finite and >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let slots: Vec<usize> = (0..=spec.l_max()).flat_map(|l| std::iter::repeat_n(l, spec.radial_count(l))).collect();
    let mut degrees: Vec<usize> = sample(&mut rng, slots.len(), opts.rank).into_iter().map(|i| slots[i]).collect();
    degrees.sort_unstable();
    let mut dirs: Vec<Vec<Complex<T>>> = Vec::with_capacity(opts.rank);
    for l in 0..=spec.l_max() {
        let count = degrees.iter().filter(|&&d| d == l).count();
        dirs.extend(orthonormal(spec.radial_count(l), count, &mut rng));
    }
    let offset: Vec<Complex<T>> = (0..spec.radial_count(0)).map(|_| gaussian(&mut rng)).collect();

    let noise = T::lit(opts.noise);
    let mut samples = Vec::with_capacity(opts.n);
    for _ in 0..opts.n {
        let mut f = CoefficientVector::zeros(spec);
        let data = f.data_mut();
        data[..offset.len()].copy_from_slice(&offset);
        for (k, (&l, v)) in degrees.iter().zip(&dirs).enumerate() {
            let amp = T::one() / T::from_usize_exact(k + 1);
            let li = l as i64;
            for m in -li..=li {
                let c = gaussian::<T>(&mut rng) * amp;
                let start = spec.index(l, m, 1);
                for (slot, x) in data[start..start + v.len()].iter_mut().zip(v) {
                    *slot += x * c;
                }
            }
        }
        if opts.noise > 0.0 {
            data.iter_mut().for_each(|x| *x += gaussian::<T>(&mut rng) * noise);
        }
        if opts.rotate {
            let alpha = T::lit(rng.random_range(0.0..std::f64::consts::TAU));
            let beta = T::lit(rng.random_range(-1.0f64..1.0).acos());
            let gamma = T::lit(rng.random_range(0.0..std::f64::consts::TAU));
            f = rotate_coeffs(&f, &WignerAngles::new(alpha, beta, gamma));
        }
        samples.push(f);
    }
    Ok(SyntheticDataset { samples, component_degrees: degrees })
}
