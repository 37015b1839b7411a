//! Conversion between sampled volumes and ball-harmonics coefficients, plus
//! the rotation and reflection actions on coefficient vectors.

use std::sync::Arc;

use num_complex::Complex;

use crate::basis::{build_grid, BasisSpec, SphericalGrid};
use crate::error::{Error, Result};
use crate::harmonics::{wigner_D_matrices, PolarTable, WignerAngles};
use crate::scalar::Real;

/// Complex coefficients `f_{lms}` in canonical layout for one volume.
#[derive(Debug, Clone)]
pub struct CoefficientVector<T> {
    spec: Arc<BasisSpec<T>>,
    data: Vec<Complex<T>>,
    real_volume: bool,
}

impl<T: Real> CoefficientVector<T> {
    pub fn zeros(spec: &Arc<BasisSpec<T>>) -> Self {
        Self { spec: Arc::clone(spec), data: vec![Complex::new(T::zero(), T::zero()); spec.dim()], real_volume: false }
    }

    pub fn from_data(spec: &Arc<BasisSpec<T>>, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != spec.dim() {
            return Err(Error::domain(format!("coefficient length {} does not match D = {}", data.len(), spec.dim())));
        }
        Ok(Self { spec: Arc::clone(spec), data, real_volume: false })
    }

    pub fn spec(&self) -> &Arc<BasisSpec<T>> {
        &self.spec
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Mutable access; clears the real-volume flag.
    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        self.real_volume = false;
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, l: usize, m: i64, s: usize) -> Complex<T> {
        self.data[self.spec.index(l, m, s)]
    }

    pub fn set(&mut self, l: usize, m: i64, s: usize, v: Complex<T>) {
        let i = self.spec.index(l, m, s);
        self.data_mut()[i] = v;
    }

    /// Coefficients of degree `l`, `(2l+1) * S(l)` entries, `s` fastest.
    pub fn block(&self, l: usize) -> &[Complex<T>] {
        &self.data[self.spec.block_range(l)]
    }

    /// `Σ |f|²`.
    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_real_volume(&self) -> bool {
        self.real_volume
    }

    /// Largest violation of `f_{l,-m,s} = (-1)^m conj(f_{l,m,s})`.
    pub fn real_symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for (l, m, s) in self.spec.indices() {
            if m <= 0 {
                continue;
            }
            let pos = self.get(l, m, s);
            let neg = self.get(l, -m, s);
            let expect = if m % 2 == 0 { pos.conj() } else { -pos.conj() };
            worst = worst.max((neg - expect).norm());
        }
        worst
    }

    /// Flags the vector as describing a real-valued volume after checking
    /// the conjugation symmetry to within `tol`.
    pub fn mark_real_volume(&mut self, tol: T) -> Result<()> {
        let defect = self.real_symmetry_defect();
        if defect > tol {
            return Err(Error::Data(format!("conjugation symmetry violated by {}", defect.to_f64_lossy())));
        }
        self.real_volume = true;
        Ok(())
    }

    pub(crate) fn set_real_flag(&mut self, real: bool) {
        self.real_volume = real;
    }

    pub(crate) fn check_same_spec(&self, other: &BasisSpec<T>) -> Result<()> {
        if !self.spec.same_as(other) {
            return Err(Error::Compatibility("coefficient vectors built on different bases".into()));
        }
        Ok(())
    }
}

impl<T: Real> PartialEq for CoefficientVector<T> {
    fn eq(&self, other: &Self) -> bool {
        self.spec.same_as(&other.spec) && self.data == other.data
    }
}

/// Real voxel volume on `[-1, 1]³`, `N³` samples, x fastest.
///
/// Voxel `(i, j, k)` is centered at `-1 + (2i + 1)/N` along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> VoxelGrid<T> {
    pub fn new(n: usize, data: Vec<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("voxel grid side must be >= 2, got {n}")));
        }
        if data.len() != n * n * n {
            return Err(Error::domain(format!("voxel data has {} values, expected N³ = {}", data.len(), n * n * n)));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite voxel value at index {i}")));
        }
        Ok(Self { n, data })
    }

    /// Samples `f(x, y, z)` at voxel centers.
    pub fn from_fn(n: usize, mut f: impl FnMut(T, T, T) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    data.push(f(voxel_center(n, i), voxel_center(n, j), voxel_center(n, k)));
                }
            }
        }
        Self::new(n, data)
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.data[i + self.n * (j + self.n * k)]
    }

    /// Trilinear interpolation with clamping to the outermost voxel centers.
    pub fn trilinear(&self, x: T, y: T, z: T) -> T {
        let n = self.n;
        let half = T::lit(0.5);
        let top = T::from_usize_exact(n - 1);
        let axis = |p: T| -> (usize, T) {
            let t = ((p + T::one()) * T::from_usize_exact(n) * half - half).max(T::zero()).min(top);
            let i0 = t.floor().to_usize().unwrap_or(0).min(n - 2);
            (i0, t - T::from_usize_exact(i0))
        };
        let (i, fx) = axis(x);
        let (j, fy) = axis(y);
        let (k, fz) = axis(z);
        let one = T::one();
        let c00 = self.at(i, j, k) * (one - fx) + self.at(i + 1, j, k) * fx;
        let c10 = self.at(i, j + 1, k) * (one - fx) + self.at(i + 1, j + 1, k) * fx;
        let c01 = self.at(i, j, k + 1) * (one - fx) + self.at(i + 1, j, k + 1) * fx;
        let c11 = self.at(i, j + 1, k + 1) * (one - fx) + self.at(i + 1, j + 1, k + 1) * fx;
        let c0 = c00 * (one - fy) + c10 * fy;
        let c1 = c01 * (one - fy) + c11 * fy;
        c0 * (one - fz) + c1 * fz
    }
}

#[inline]
pub fn voxel_center<T: Real>(n: usize, i: usize) -> T {
    -T::one() + T::from_usize_exact(2 * i + 1) / T::from_usize_exact(n)
}

/// Cartesian to `(r, θ, φ)` with `φ ∈ [0, 2π)`.
pub fn to_spherical<T: Real>(x: T, y: T, z: T) -> (T, T, T) {
    let r = (x * x + y * y + z * z).sqrt();
    if r == T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let theta = (z / r).max(-T::one()).min(T::one()).acos();
    let mut phi = y.atan2(x);
    if phi < T::zero() {
        phi += T::TAU();
    }
    (r, theta, phi)
}

pub fn to_cartesian<T: Real>(r: T, theta: T, phi: T) -> [T; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [r * st * cp, r * st * sp, r * ct]
}

/// Precomputed tables for quadrature expansion and synthesis on one grid.
///
/// Work is separable: an azimuthal DFT, a polar Legendre sum, then a radial
/// Bessel sum.
#[derive(Debug, Clone)]
pub struct BallTransform<T> {
    spec: Arc<BasisSpec<T>>,
    grid: SphericalGrid<T>,
    /// per degree: `radial[l][(s-1) * n_r + ir]`
    radial: Vec<Vec<T>>,
    polar: Vec<PolarTable<T>>,
    /// `e^{i m φ_k}` for `m = 0..=L`, `[m * n_phi + k]`
    azimuth: Vec<Complex<T>>,
}

impl<T: Real> BallTransform<T> {
    pub fn new(spec: &Arc<BasisSpec<T>>) -> Self {
        Self::with_grid(spec, build_grid(spec))
    }

    pub fn with_grid(spec: &Arc<BasisSpec<T>>, grid: SphericalGrid<T>) -> Self {
        let l_max = spec.l_max();
        let nr = grid.radial_nodes.len();
        let radial = (0..=l_max)
            .map(|l| {
                let mut t = Vec::with_capacity(spec.radial_count(l) * nr);
                for s in 1..=spec.radial_count(l) {
                    t.extend(grid.radial_nodes.iter().map(|&(r, _)| spec.radial(l, s, r)));
                }
                t
            })
            .collect();
        let polar = grid.polar_nodes.iter().map(|&(th, _)| PolarTable::new(l_max, th)).collect();
        let nphi = grid.azimuthal_count;
        let mut azimuth = Vec::with_capacity((l_max + 1) * nphi);
        for m in 0..=l_max {
            for k in 0..nphi {
                let (s, c) = (T::from_usize_exact(m) * grid.azimuth(k)).sin_cos();
                azimuth.push(Complex::new(c, s));
            }
        }
        Self { spec: Arc::clone(spec), grid, radial, polar, azimuth }
    }

    pub fn spec(&self) -> &Arc<BasisSpec<T>> {
        &self.spec
    }

    pub fn grid(&self) -> &SphericalGrid<T> {
        &self.grid
    }

    #[inline]
    fn e_imphi(&self, m: i64, k: usize) -> Complex<T> {
        let v = self.azimuth[m.unsigned_abs() as usize * self.grid.azimuthal_count + k];
        if m < 0 {
            v.conj()
        } else {
            v
        }
    }

    /// `f_{lms} = (1/8) Σ_nodes w f conj(j_{ls} Y_l^m)`; the factor `1/8`
    /// undoes the squared norm of the radial functions.
    pub fn expand(&self, samples: &[Complex<T>]) -> Result<CoefficientVector<T>> {
        let g = &self.grid;
        let (nr, nt, np) = (g.radial_nodes.len(), g.polar_nodes.len(), g.azimuthal_count);
        if samples.len() != g.node_count() {
            return Err(Error::domain(format!(
                "sample count {} does not match grid node count {}",
                samples.len(),
                g.node_count()
            )));
        }
        let l_max = self.spec.l_max();
        let nm = 2 * l_max + 1;
        let zero = Complex::new(T::zero(), T::zero());
        let wphi = g.azimuth_weight();

        // azimuthal: az[(ir * nt + it) * nm + (m + L)]
        let mut az = vec![zero; nr * nt * nm];
        for node in 0..nr * nt {
            let row = &samples[node * np..(node + 1) * np];
            for (mi, m) in (-(l_max as i64)..=l_max as i64).enumerate() {
                let mut acc = zero;
                for (k, v) in row.iter().enumerate() {
                    acc += v * self.e_imphi(m, k).conj();
                }
                az[node * nm + mi] = acc * wphi;
            }
        }

        // polar: pol[(ir * (L+1) + l) * nm + (m + L)]
        let mut pol = vec![zero; nr * (l_max + 1) * nm];
        for ir in 0..nr {
            for (it, &(_, wt)) in g.polar_nodes.iter().enumerate() {
                let tab = &self.polar[it];
                let src = &az[(ir * nt + it) * nm..(ir * nt + it + 1) * nm];
                for l in 0..=l_max {
                    if self.spec.radial_count(l) == 0 {
                        continue;
                    }
                    let li = l as i64;
                    let dst = &mut pol[(ir * (l_max + 1) + l) * nm..(ir * (l_max + 1) + l + 1) * nm];
                    for m in -li..=li {
                        let mi = (m + l_max as i64) as usize;
                        dst[mi] += src[mi] * (tab.get(l, m) * wt);
                    }
                }
            }
        }

        // radial
        let eighth = T::lit(0.125);
        let mut out = CoefficientVector::zeros(&self.spec);
        let data = out.data_mut();
        for l in 0..=l_max {
            let sc = self.spec.radial_count(l);
            let li = l as i64;
            let rt = &self.radial[l];
            for m in -li..=li {
                let mi = (m + l_max as i64) as usize;
                for s in 1..=sc {
                    let mut acc = zero;
                    for (ir, &(_, wr)) in g.radial_nodes.iter().enumerate() {
                        acc += pol[(ir * (l_max + 1) + l) * nm + mi] * (rt[(s - 1) * nr + ir] * wr);
                    }
                    data[self.spec.index(l, m, s)] = acc * eighth;
                }
            }
        }
        Ok(out)
    }

    /// Expands a real-valued sampled function.
    pub fn expand_real(&self, samples: &[T]) -> Result<CoefficientVector<T>> {
        let c: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.expand(&c)
    }

    /// Evaluates the expansion at every grid node (storage order).
    pub fn synthesize_grid(&self, coeffs: &CoefficientVector<T>) -> Result<Vec<Complex<T>>> {
        coeffs.check_same_spec(&self.spec)?;
        let g = &self.grid;
        let (nr, np) = (g.radial_nodes.len(), g.azimuthal_count);
        let l_max = self.spec.l_max();
        let nm = 2 * l_max + 1;
        let zero = Complex::new(T::zero(), T::zero());

        let mut rad = vec![zero; nr * (l_max + 1) * nm];
        for l in 0..=l_max {
            let sc = self.spec.radial_count(l);
            let li = l as i64;
            for m in -li..=li {
                let mi = (m + l_max as i64) as usize;
                for s in 1..=sc {
                    let f = coeffs.data()[self.spec.index(l, m, s)];
                    for ir in 0..nr {
                        rad[(ir * (l_max + 1) + l) * nm + mi] += f * self.radial[l][(s - 1) * nr + ir];
                    }
                }
            }
        }

        let mut out = Vec::with_capacity(g.node_count());
        let mut ang = vec![zero; nm];
        for ir in 0..nr {
            for tab in &self.polar {
                ang.iter_mut().for_each(|a| *a = zero);
                for l in 0..=l_max {
                    if self.spec.radial_count(l) == 0 {
                        continue;
                    }
                    let li = l as i64;
                    for m in -li..=li {
                        let mi = (m + l_max as i64) as usize;
                        ang[mi] += rad[(ir * (l_max + 1) + l) * nm + mi] * tab.get(l, m);
                    }
                }
                for k in 0..np {
                    let mut v = zero;
                    for (mi, a) in ang.iter().enumerate() {
                        v += a * self.e_imphi(mi as i64 - l_max as i64, k);
                    }
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Quadrature inner product `Σ w a conj(b)` over the grid.
    pub fn inner(&self, a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
        self.grid.nodes().zip(a.iter().zip(b)).map(|(n, (x, y))| x * y.conj() * n.3).sum()
    }

    /// Trilinearly resamples a voxel volume onto the grid nodes and expands.
    ///
    /// Approximate: the error is that of the interpolation, `O(h²)` in the
    /// voxel spacing, not of the quadrature.
    pub fn expand_voxels(&self, vox: &VoxelGrid<T>) -> Result<CoefficientVector<T>> {
        if vox.side() < 4 {
            return Err(Error::domain(format!("voxel expansion needs N >= 4, got {}", vox.side())));
        }
        let samples: Vec<T> = self
            .grid
            .nodes()
            .map(|(r, t, p, _)| {
                let [x, y, z] = to_cartesian(r, t, p);
                vox.trilinear(x, y, z)
            })
            .collect();
        let mut out = self.expand_real(&samples)?;
        // exact up to roundoff for a real input on a uniform azimuthal grid
        let tol = T::lit(1e-8) * out.norm_sqr().sqrt().max(T::one());
        out.mark_real_volume(tol)?;
        Ok(out)
    }
}

/// Direct-quadrature expansion of samples given at every node of `grid`.
pub fn expand_function<T: Real>(
    spec: &Arc<BasisSpec<T>>,
    grid: &SphericalGrid<T>,
    samples: &[Complex<T>],
) -> Result<CoefficientVector<T>> {
    BallTransform::with_grid(spec, grid.clone()).expand(samples)
}

/// Expands a voxel volume on the default grid of `spec`.
pub fn expand_voxels<T: Real>(spec: &Arc<BasisSpec<T>>, vox: &VoxelGrid<T>) -> Result<CoefficientVector<T>> {
    BallTransform::new(spec).expand_voxels(vox)
}

/// Evaluates the ball-harmonics expansion at arbitrary `(r, θ, φ)` points.
pub fn synthesize<T: Real>(coeffs: &CoefficientVector<T>, points: &[(T, T, T)]) -> Result<Vec<Complex<T>>> {
    let spec = coeffs.spec();
    let l_max = spec.l_max();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = Vec::with_capacity(points.len());
    for &(r, theta, phi) in points {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(Error::domain(format!("radius {} outside [0, 1]", r.to_f64_lossy())));
        }
        let tab = PolarTable::new(l_max, theta);
        let mut v = zero;
        for l in 0..=l_max {
            let sc = spec.radial_count(l);
            if sc == 0 {
                continue;
            }
            let radial: Vec<T> = (1..=sc).map(|s| spec.radial(l, s, r)).collect();
            let li = l as i64;
            for m in -li..=li {
                let mut acc = zero;
                for s in 1..=sc {
                    acc += coeffs.data()[spec.index(l, m, s)] * radial[s - 1];
                }
                let (sn, cs) = (T::from_i64(m).unwrap() * phi).sin_cos();
                v += acc * Complex::new(cs, sn) * tab.get(l, m);
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Real part of the expansion sampled at voxel centers; zero outside the
/// unit ball.
pub fn voxelize<T: Real>(coeffs: &CoefficientVector<T>, n: usize) -> Result<VoxelGrid<T>> {
    let mut pts = Vec::new();
    let mut slots = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let (x, y, z) = (voxel_center::<T>(n, i), voxel_center(n, j), voxel_center(n, k));
                let (r, t, p) = to_spherical(x, y, z);
                if r <= T::one() {
                    pts.push((r, t, p));
                    slots.push(i + n * (j + n * k));
                }
            }
        }
    }
    let vals = synthesize(coeffs, &pts)?;
    let mut data = vec![T::zero(); n * n * n];
    for (slot, v) in slots.into_iter().zip(vals) {
        data[slot] = v.re;
    }
    VoxelGrid::new(n, data)
}

/// `(R·f)_{lms} = Σ_k D^l_{mk}(R) f_{lks}`, applied per `(l, s)`.
pub fn rotate_coeffs<T: Real>(coeffs: &CoefficientVector<T>, angles: &WignerAngles<T>) -> CoefficientVector<T> {
    if angles.is_identity() {
        return coeffs.clone();
    }
    let spec = coeffs.spec();
    let mats = wigner_D_matrices(spec.l_max(), angles);
    let mut out = coeffs.clone();
    let real = coeffs.is_real_volume();
    let dst = out.data_mut();
    let zero = Complex::new(T::zero(), T::zero());
    for l in 0..=spec.l_max() {
        let sc = spec.radial_count(l);
        if sc == 0 {
            continue;
        }
        let dim = 2 * l + 1;
        let src = coeffs.block(l);
        let off = spec.offset(l);
        let d = &mats[l];
        for mi in 0..dim {
            for s in 0..sc {
                let mut acc = zero;
                for ki in 0..dim {
                    acc += d[mi * dim + ki] * src[ki * sc + s];
                }
                dst[off + mi * sc + s] = acc;
            }
        }
    }
    out.real_volume = real;
    out
}

/// Reflection through the xy-plane: `f_{lms} -> (-1)^{l+m} f_{lms}`.
pub fn reflect_coeffs<T: Real>(coeffs: &CoefficientVector<T>) -> CoefficientVector<T> {
    let spec = Arc::clone(coeffs.spec());
    let mut out = coeffs.clone();
    let real = coeffs.is_real_volume();
    for (i, (l, m, _)) in spec.indices().enumerate() {
        if (l as i64 + m).rem_euclid(2) == 1 {
            let v = out.data[i];
            out.data[i] = -v;
        }
    }
    out.real_volume = real;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn spec(l: usize, b: f64) -> Arc<BasisSpec<f64>> {
        Arc::new(build_basis(l, b).unwrap())
    }

    fn random_coeffs(spec: &Arc<BasisSpec<f64>>, rng: &mut ChaCha8Rng) -> CoefficientVector<f64> {
        let data = (0..spec.dim())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CoefficientVector::from_data(spec, data).unwrap()
    }

    fn rel_err(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    fn gram(tr: &BallTransform<f64>) -> Vec<Complex<f64>> {
        let spec = tr.spec();
        let d = spec.dim();
        let fields: Vec<Vec<Complex<f64>>> = (0..d)
            .map(|i| {
                let mut c = CoefficientVector::zeros(spec);
                c.data_mut()[i] = Complex::new(1.0, 0.0);
                tr.synthesize_grid(&c).unwrap()
            })
            .collect();
        let mut g = vec![Complex::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                g[i * d + j] = tr.inner(&fields[i], &fields[j]);
            }
        }
        g
    }

    #[test]
    fn gram_is_eight_identity_and_saturated() {
        let s = spec(3, 4.0 * PI);
        let tr = BallTransform::new(&s);
        let g = gram(&tr);
        let d = s.dim();
        for i in 0..d {
            for j in 0..d {
                let e = if i == j { 8.0 } else { 0.0 };
                assert!((g[i * d + j] - e).norm() < 1e-10, "G[{i},{j}] = {}", g[i * d + j]);
            }
        }
        let fine = BallTransform::with_grid(&s, tr.grid().refined());
        let g2 = gram(&fine);
        let worst = g.iter().zip(&g2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "node doubling moved the Gram matrix by {worst}");
    }

    #[test]
    fn expand_basis_function_and_zero() {
        let s = spec(2, 3.0 * PI);
        let tr = BallTransform::new(&s);
        let samples: Vec<Complex<f64>> = tr
            .grid()
            .nodes()
            .map(|(r, t, p, _)| s.eval_ball_harmonic(0, 0, 1, (r, t, p)).unwrap())
            .collect();
        let c = tr.expand(&samples).unwrap();
        for (i, v) in c.data().iter().enumerate() {
            let e = if i == 0 { 1.0 } else { 0.0 };
            assert!((v - e).norm() < 1e-10);
        }
        let z = tr.expand(&vec![Complex::new(0.0, 0.0); tr.grid().node_count()]).unwrap();
        assert!(z.data().iter().all(|v| v.norm() == 0.0));
        assert!(tr.expand(&[Complex::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn synthesize_expand_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = spec(8, 8.0 * PI);
        let tr = BallTransform::new(&s);
        let c = random_coeffs(&s, &mut rng);
        let field = tr.synthesize_grid(&c).unwrap();
        let back = tr.expand(&field).unwrap();
        assert!(rel_err(back.data(), c.data()) < 1e-10);
        // Parseval with the factor 8
        let q = tr.inner(&field, &field).re / 8.0;
        assert!((q - c.norm_sqr()).abs() < 1e-10 * c.norm_sqr());
        // free function agrees
        let again = expand_function(&s, tr.grid(), &field).unwrap();
        assert!(rel_err(again.data(), c.data()) < 1e-10);
    }

    #[test]
    fn pointwise_synthesis_matches_grid_synthesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = spec(4, 5.0 * PI);
        let tr = BallTransform::new(&s);
        let c = random_coeffs(&s, &mut rng);
        let grid_vals = tr.synthesize_grid(&c).unwrap();
        let pts: Vec<_> = tr.grid().nodes().map(|(r, t, p, _)| (r, t, p)).collect();
        let direct = synthesize(&c, &pts).unwrap();
        assert!(rel_err(&direct, &grid_vals) < 1e-12);
    }

    #[test]
    fn synthesize_examples() {
        let s = spec(1, 2.0 * PI);
        let mut c = CoefficientVector::zeros(&s);
        c.set(0, 0, 1, Complex::new(1.0, 0.0));
        let v = synthesize(&c, &[(0.0, 0.4, 1.0)]).unwrap();
        assert!((v[0].re - 2.0 * PI.sqrt()).abs() < 1e-10);
        let z = synthesize(&CoefficientVector::zeros(&s), &[(0.5, 0.4, 1.0)]).unwrap();
        assert_eq!(z[0].norm(), 0.0);
        assert!(synthesize(&c, &[(1.01, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn rotation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = spec(4, 6.0 * PI);
        let c = random_coeffs(&s, &mut rng);
        assert_eq!(rotate_coeffs(&c, &WignerAngles::identity()), c);
        for _ in 0..10 {
            let a = WignerAngles::new(rng.random_range(0.0..6.0), rng.random_range(0.0..3.0), rng.random_range(0.0..6.0));
            let r = rotate_coeffs(&c, &a);
            assert_eq!(r.block(0), c.block(0));
            assert!((r.norm_sqr() - c.norm_sqr()).abs() < 1e-12 * c.norm_sqr());
        }
    }

    #[test]
    fn rotation_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = spec(4, 6.0 * PI);
        let c = random_coeffs(&s, &mut rng);
        for _ in 0..10 {
            let r1 = WignerAngles::new(rng.random_range(0.0..6.0), rng.random_range(0.0..3.0), rng.random_range(0.0..6.0));
            let r2 = WignerAngles::new(rng.random_range(0.0..6.0), rng.random_range(0.0..3.0), rng.random_range(0.0..6.0));
            // rotate by r1, then by r2 == rotate by r2 ∘ r1
            let two_step = rotate_coeffs(&rotate_coeffs(&c, &r1), &r2);
            let one_step = rotate_coeffs(&c, &r2.compose(&r1));
            assert!(rel_err(two_step.data(), one_step.data()) < 1e-10);
        }
    }

    #[test]
    fn reflection_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = spec(3, 5.0 * PI);
        let c = random_coeffs(&s, &mut rng);
        let r = reflect_coeffs(&c);
        assert_eq!(r.get(0, 0, 1), c.get(0, 0, 1));
        assert_eq!(r.get(1, 0, 1), -c.get(1, 0, 1));
        assert_eq!(r.get(1, 1, 1), c.get(1, 1, 1));
        assert_eq!(reflect_coeffs(&r), c);
        assert_eq!(r.norm_sqr(), c.norm_sqr());
    }

    #[test]
    fn reflection_matches_pointwise_mirror() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = spec(3, 5.0 * PI);
        let c = random_coeffs(&s, &mut rng);
        let r = reflect_coeffs(&c);
        for _ in 0..20 {
            let (rad, t, p) = (rng.random_range(0.0..1.0), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let a = synthesize(&r, &[(rad, t, p)]).unwrap()[0];
            let b = synthesize(&c, &[(rad, PI - t, p)]).unwrap()[0];
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_volume_is_radial() {
        let s = spec(4, 4.0 * PI);
        let vox = VoxelGrid::from_fn(16, |_, _, _| 2.5f64).unwrap();
        let c = expand_voxels(&s, &vox).unwrap();
        let total = c.norm_sqr();
        let radial: f64 = c.block(0).iter().map(|v| v.norm_sqr()).sum();
        assert!(((total - radial) / total).sqrt() < 1e-3);
        assert!(c.is_real_volume());
        let z = expand_voxels(&s, &VoxelGrid::from_fn(8, |_, _, _| 0.0f64).unwrap()).unwrap();
        assert!(z.data().iter().all(|v| v.norm() == 0.0));
        assert!(expand_voxels(&s, &VoxelGrid::from_fn(3, |_, _, _| 0.0f64).unwrap()).is_err());
    }

    #[test]
    fn voxel_grid_validation() {
        assert!(matches!(VoxelGrid::new(2, vec![0.0f64, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, f64::NAN]), Err(Error::Data(_))));
        assert!(VoxelGrid::new(2, vec![0.0f64; 7]).is_err());
        assert!(VoxelGrid::new(1, vec![0.0f64]).is_err());
        // trilinear reproduces affine functions away from the clamped rim
        let v = VoxelGrid::from_fn(8, |x, y, z| 1.0 + 2.0 * x - y + 0.5 * z).unwrap();
        let (x, y, z): (f64, f64, f64) = (0.13, -0.41, 0.27);
        assert!((v.trilinear(x, y, z) - (1.0 + 2.0 * x - y + 0.5 * z)).abs() < 1e-12);
    }

    #[test]
    fn real_volume_symmetry_from_voxels() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = spec(4, 4.0 * PI);
        let vox = VoxelGrid::from_fn(12, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        let c = expand_voxels(&s, &vox).unwrap();
        assert!(c.real_symmetry_defect() < 1e-8);
    }
}
