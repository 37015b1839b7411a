//! Rotation-averaged mean and block covariance.
//!
//! Averaging over SO(3) leaves only the `l = 0` part of the mean, and the
//! covariance collapses to one `S(l) x S(l)` Hermitian block per degree:
//!
//! `C_l(s, s') = 1/(n (2l+1)) Σ_i Σ_m f_{lms} conj(f_{lms'})`
//!
//! with the full covariance `⊕_l (I_{2l+1} ⊗ C_l)` never formed.

use std::sync::Arc;

use num_complex::Complex;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::transform::{reflect_coeffs, CoefficientVector};

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBlock<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianBlock<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    /// Builds a block from row-major data; only the upper triangle is read.
    pub fn from_upper(dim: usize, data: &[Complex<T>]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::domain(format!("block data has {} entries, expected {}", data.len(), dim * dim)));
        }
        let mut b = Self::zeros(dim);
        for i in 0..dim {
            b.data[i * dim + i] = Complex::new(data[i * dim + i].re, T::zero());
            for j in i + 1..dim {
                b.data[i * dim + j] = data[i * dim + j];
                b.data[j * dim + i] = data[i * dim + j].conj();
            }
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Per-degree covariance blocks plus the radial mean they were centered with.
#[derive(Debug, Clone)]
pub struct BlockCovariance<T> {
    spec: Arc<BasisSpec<T>>,
    n: usize,
    mean_radial: Vec<Complex<T>>,
    blocks: Vec<HermitianBlock<T>>,
}

impl<T: Real> BlockCovariance<T> {
    /// Assembles a covariance from explicit blocks (one per degree).
    pub fn from_blocks(
        spec: &Arc<BasisSpec<T>>,
        n: usize,
        mean_radial: Vec<Complex<T>>,
        blocks: Vec<HermitianBlock<T>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sample count must be >= 1"));
        }
        if mean_radial.len() != spec.radial_count(0) {
            return Err(Error::domain("mean_radial length must equal S(0)"));
        }
        if blocks.len() != spec.l_max() + 1 {
            return Err(Error::domain("need one block per degree"));
        }
        for (l, b) in blocks.iter().enumerate() {
            if b.dim() != spec.radial_count(l) {
                return Err(Error::domain(format!("block l={l} has size {}, expected S(l) = {}", b.dim(), spec.radial_count(l))));
            }
        }
        Ok(Self { spec: Arc::clone(spec), n, mean_radial, blocks })
    }

    pub fn spec(&self) -> &Arc<BasisSpec<T>> {
        &self.spec
    }

    pub fn sample_count(&self) -> usize {
        self.n
    }

    pub fn mean_radial(&self) -> &[Complex<T>] {
        &self.mean_radial
    }

    pub fn blocks(&self) -> &[HermitianBlock<T>] {
        &self.blocks
    }

    pub fn block(&self, l: usize) -> &HermitianBlock<T> {
        &self.blocks[l]
    }

    /// Trace of the implied full matrix, `Σ_l (2l+1) tr C_l`.
    pub fn full_trace(&self) -> T {
        self.blocks
            .iter()
            .enumerate()
            .map(|(l, b)| T::from_usize_exact(2 * l + 1) * b.trace())
            .sum()
    }

    /// The implied `D x D` matrix `⊕_l (I_{2l+1} ⊗ C_l)`, row-major. Only for
    /// small bases (tests and oracle comparisons).
    pub fn to_dense(&self) -> Vec<Complex<T>> {
        let d = self.spec.dim();
        let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
        for l in 0..=self.spec.l_max() {
            let sc = self.spec.radial_count(l);
            let li = l as i64;
            for m in -li..=li {
                for s in 1..=sc {
                    for t in 1..=sc {
                        let i = self.spec.index(l, m, s);
                        let j = self.spec.index(l, m, t);
                        out[i * d + j] = self.blocks[l].get(s - 1, t - 1);
                    }
                }
            }
        }
        out
    }
}

/// Radial mean `(1/n) Σ_i f^{(i)}_{00s}`; every other mean coefficient
/// vanishes after averaging over rotations.
pub fn compute_mean<'a, T, I>(samples: I) -> Result<Vec<Complex<T>>>
where
    T: Real,
    I: IntoIterator<Item = &'a CoefficientVector<T>>,
{
    let (sum, n) = radial_sum(samples)?;
    finish_mean(sum, n)
}

fn radial_sum<'a, T, I>(samples: I) -> Result<(Vec<Complex<T>>, usize)>
where
    T: Real,
    I: IntoIterator<Item = &'a CoefficientVector<T>>,
{
    let mut it = samples.into_iter();
    let first = it.next().ok_or_else(|| Error::domain("mean of an empty dataset"))?;
    let spec = Arc::clone(first.spec());
    let mut sum: Vec<Complex<T>> = first.block(0).to_vec();
    let mut n = 1;
    for f in it {
        f.check_same_spec(&spec)?;
        for (acc, v) in sum.iter_mut().zip(f.block(0)) {
            *acc += v;
        }
        n += 1;
    }
    Ok((sum, n))
}

fn finish_mean<T: Real>(sum: Vec<Complex<T>>, n: usize) -> Result<Vec<Complex<T>>> {
    if n == 0 {
        return Err(Error::domain("mean of an empty dataset"));
    }
    let nf = T::from_usize_exact(n);
    Ok(sum.into_iter().map(|v| v / nf).collect())
}

/// Subtracts the radial mean from the `l = 0` coefficients.
pub fn center<T: Real>(coeffs: &CoefficientVector<T>, mean_radial: &[Complex<T>]) -> Result<CoefficientVector<T>> {
    if mean_radial.len() != coeffs.spec().radial_count(0) {
        return Err(Error::domain(format!(
            "mean has {} entries, expected S(0) = {}",
            mean_radial.len(),
            coeffs.spec().radial_count(0)
        )));
    }
    let mut out = coeffs.clone();
    let real = coeffs.is_real_volume();
    for (v, m) in out.data_mut()[..mean_radial.len()].iter_mut().zip(mean_radial) {
        *v -= m;
    }
    // l = 0 entries of a real volume are real; a real mean keeps the symmetry
    out.set_real_flag(real && mean_radial.iter().all(|m| m.im == T::zero()));
    Ok(out)
}

/// Adds the radial mean back onto the `l = 0` coefficients.
pub fn uncenter<T: Real>(coeffs: &CoefficientVector<T>, mean_radial: &[Complex<T>]) -> Result<CoefficientVector<T>> {
    let neg: Vec<Complex<T>> = mean_radial.iter().map(|v| -v).collect();
    center(coeffs, &neg)
}

/// Streaming sums for the block covariance; mergeable across shards.
#[derive(Debug, Clone)]
pub struct CovarianceAccumulator<T> {
    spec: Arc<BasisSpec<T>>,
    n: usize,
    // upper triangles stored in full row-major S(l) x S(l) buffers
    sums: Vec<Vec<Complex<T>>>,
}

impl<T: Real> CovarianceAccumulator<T> {
    pub fn new(spec: &Arc<BasisSpec<T>>) -> Self {
        let sums = (0..=spec.l_max())
            .map(|l| vec![Complex::new(T::zero(), T::zero()); spec.radial_count(l).pow(2)])
            .collect();
        Self { spec: Arc::clone(spec), n: 0, sums }
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// Adds one centered sample: a rank-one update per `(l, m)` slice.
    pub fn push(&mut self, centered: &CoefficientVector<T>) -> Result<()> {
        centered.check_same_spec(&self.spec)?;
        for l in 0..=self.spec.l_max() {
            let sc = self.spec.radial_count(l);
            if sc == 0 {
                continue;
            }
            let block = centered.block(l);
            let acc = &mut self.sums[l];
            for slice in block.chunks_exact(sc) {
                for s in 0..sc {
                    let a = slice[s];
                    let row = &mut acc[s * sc..(s + 1) * sc];
                    for t in s..sc {
                        row[t] += a * slice[t].conj();
                    }
                }
            }
        }
        self.n += 1;
        Ok(())
    }

    /// Sum of two partial accumulators over disjoint samples.
    pub fn merge(mut self, other: &Self) -> Result<Self> {
        if !self.spec.same_as(&other.spec) {
            return Err(Error::Compatibility("cannot merge accumulators over different bases".into()));
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.n += other.n;
        Ok(self)
    }

    pub fn finish(self, mean_radial: Vec<Complex<T>>) -> Result<BlockCovariance<T>> {
        if self.n == 0 {
            return Err(Error::domain("covariance of an empty dataset"));
        }
        let mut blocks = Vec::with_capacity(self.sums.len());
        for (l, sum) in self.sums.into_iter().enumerate() {
            let sc = self.spec.radial_count(l);
            let denom = T::from_usize_exact(self.n * (2 * l + 1));
            let scaled: Vec<Complex<T>> = sum.into_iter().map(|v| v / denom).collect();
            blocks.push(HermitianBlock::from_upper(sc, &scaled)?);
        }
        BlockCovariance::from_blocks(&self.spec, self.n, mean_radial, blocks)
    }
}

/// One-pass block covariance of already-centered samples.
pub fn accumulate_covariance<'a, T, I>(centered: I, mean_radial: Vec<Complex<T>>) -> Result<BlockCovariance<T>>
where
    T: Real,
    I: IntoIterator<Item = &'a CoefficientVector<T>>,
{
    let mut it = centered.into_iter().peekable();
    let spec = Arc::clone(it.peek().ok_or_else(|| Error::domain("covariance of an empty dataset"))?.spec());
    let mut acc = CovarianceAccumulator::new(&spec);
    for f in it {
        acc.push(f)?;
    }
    acc.finish(mean_radial)
}

/// Options for [`fit_covariance`].
#[derive(Debug, Clone, Copy)]
pub struct CovarianceOptions {
    /// Augment the dataset with xy-plane reflections (O(3) invariance).
    pub o3: bool,
    /// Worker count for sharded accumulation; 1 is sequential.
    pub threads: usize,
}

impl Default for CovarianceOptions {
    fn default() -> Self {
        Self { o3: false, threads: 1 }
    }
}

fn sharded<T: Real>(spec: &Arc<BasisSpec<T>>, centered: &[CoefficientVector<T>], threads: usize) -> Result<CovarianceAccumulator<T>> {
    let threads = threads.max(1).min(centered.len().max(1));
    if threads == 1 {
        let mut acc = CovarianceAccumulator::new(spec);
        for f in centered {
            acc.push(f)?;
        }
        return Ok(acc);
    }
    let chunk = centered.len().div_ceil(threads);
    let parts: Vec<Result<CovarianceAccumulator<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = centered
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut acc = CovarianceAccumulator::new(spec);
                    for f in part {
                        acc.push(f)?;
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("covariance worker panicked")).collect()
    });
    let mut merged = CovarianceAccumulator::new(spec);
    for p in parts {
        merged = merged.merge(&p?)?;
    }
    Ok(merged)
}

/// Mean, centering and block covariance in one call.
///
/// With `o3` set, every sample is paired with its reflection; the reflected
/// half is accumulated separately and merged, which reproduces the plain
/// SO(3) result bit for bit.
pub fn fit_covariance<T: Real>(samples: &[CoefficientVector<T>], opts: CovarianceOptions) -> Result<BlockCovariance<T>> {
    let first = samples.first().ok_or_else(|| Error::domain("covariance of an empty dataset"))?;
    let spec = Arc::clone(first.spec());
    let (mut sum, mut n) = radial_sum(samples)?;
    let reflected: Vec<CoefficientVector<T>> = if opts.o3 { samples.iter().map(reflect_coeffs).collect() } else { Vec::new() };
    if opts.o3 {
        let (rsum, rn) = radial_sum(&reflected)?;
        for (a, b) in sum.iter_mut().zip(rsum) {
            *a += b;
        }
        n += rn;
    }
    let mean = finish_mean(sum, n)?;
    let centered: Vec<CoefficientVector<T>> = samples.iter().map(|f| center(f, &mean)).collect::<Result<_>>()?;
    let mut acc = sharded(&spec, &centered, opts.threads)?;
    if opts.o3 {
        let centered_r: Vec<CoefficientVector<T>> = reflected.iter().map(|f| center(f, &mean)).collect::<Result<_>>()?;
        acc = acc.merge(&sharded(&spec, &centered_r, opts.threads)?)?;
    }
    let mut cov = acc.finish(mean)?;
    // report input volumes, not the augmented count
    cov.n = samples.len();
    Ok(cov)
}
