//! Eigenvolumes of the block covariance and the projections onto them.

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::pca::covariance::BlockCovariance;
use crate::scalar::Real;
use crate::transform::CoefficientVector;

/// One eigenpair `(λ_{l,s}, v_{l,s})` of a block `C_l`; `s` is its rank
/// inside the block (1 = largest).
#[derive(Debug, Clone, PartialEq)]
pub struct CompactEntry<T> {
    pub l: usize,
    pub s: usize,
    pub eigenvalue: T,
    pub vector: Vec<Complex<T>>,
}

/// Position `j` of the expanded ordering: eigenvolume `ψ_j` places the
/// radial vector of `compact` into the `(l, m, ·)` slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandedEntry {
    pub l: usize,
    pub s: usize,
    pub m: i64,
    pub compact: usize,
}

/// Ordered SO(3)-invariant principal basis.
///
/// Compact entries are sorted by decreasing eigenvalue, ties by `(l, s)`
/// ascending; each expands to `2l + 1` consecutive eigenvolumes, `m`
/// ascending.
#[derive(Debug, Clone)]
pub struct PrincipalBasis<T> {
    spec: Arc<BasisSpec<T>>,
    entries: Vec<CompactEntry<T>>,
    expanded: Vec<ExpandedEntry>,
    mean_radial: Vec<Complex<T>>,
    sample_count: usize,
}

impl<T: Real> PrincipalBasis<T> {
    /// Assembles a basis from compact entries, re-deriving the expanded order.
    pub fn from_entries(
        spec: &Arc<BasisSpec<T>>,
        entries: Vec<CompactEntry<T>>,
        mean_radial: Vec<Complex<T>>,
        sample_count: usize,
    ) -> Result<Self> {
        if entries.len() != spec.dim_compact() {
            return Err(Error::domain(format!("{} compact entries, expected D' = {}", entries.len(), spec.dim_compact())));
        }
        for e in &entries {
            if e.l > spec.l_max() || e.vector.len() != spec.radial_count(e.l) || e.s == 0 || e.s > spec.radial_count(e.l) {
                return Err(Error::domain(format!("compact entry (l={}, s={}) does not fit the basis", e.l, e.s)));
            }
        }
        for pair in entries.windows(2) {
            if order(&pair[0], &pair[1]) == Ordering::Greater {
                return Err(Error::domain("compact entries are not in decreasing eigenvalue order"));
            }
        }
        if mean_radial.len() != spec.radial_count(0) {
            return Err(Error::domain("mean_radial length must equal S(0)"));
        }
        let mut expanded = Vec::with_capacity(spec.dim());
        for (k, e) in entries.iter().enumerate() {
            let li = e.l as i64;
            for m in -li..=li {
                expanded.push(ExpandedEntry { l: e.l, s: e.s, m, compact: k });
            }
        }
        Ok(Self { spec: Arc::clone(spec), entries, expanded, mean_radial, sample_count })
    }

    pub fn spec(&self) -> &Arc<BasisSpec<T>> {
        &self.spec
    }

    pub fn entries(&self) -> &[CompactEntry<T>] {
        &self.entries
    }

    pub fn expanded(&self) -> &[ExpandedEntry] {
        &self.expanded
    }

    /// Radial mean of the training data (re-added on reconstruction).
    pub fn mean_radial(&self) -> &[Complex<T>] {
        &self.mean_radial
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn dim(&self) -> usize {
        self.expanded.len()
    }

    /// Eigenvalue of the `j`-th eigenvolume (0-based).
    pub fn eigenvalue(&self, j: usize) -> T {
        self.entries[self.expanded[j].compact].eigenvalue
    }

    /// Coefficients of eigenvolume `ψ_j` (0-based `j`).
    pub fn eigenvolume(&self, j: usize) -> CoefficientVector<T> {
        let e = self.expanded[j];
        let mut out = CoefficientVector::zeros(&self.spec);
        let start = self.spec.index(e.l, e.m, 1);
        let v = &self.entries[e.compact].vector;
        out.data_mut()[start..start + v.len()].copy_from_slice(v);
        out
    }

    /// Number of eigenvolumes covering the first `k` compact entries.
    pub fn expanded_len(&self, k: usize) -> usize {
        self.entries[..k].iter().map(|e| 2 * e.l + 1).sum()
    }
}

fn order<T: Real>(a: &CompactEntry<T>, b: &CompactEntry<T>) -> Ordering {
    b.eigenvalue
        .partial_cmp(&a.eigenvalue)
        .unwrap_or(Ordering::Equal)
        .then(a.l.cmp(&b.l))
        .then(a.s.cmp(&b.s))
}

/// Clamp tolerance for roundoff-negative eigenvalues.
fn psd_tolerance<T: Real>(trace: T) -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(100.0)) * trace.abs()
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
fn fix_phase<T: Real>(v: &mut [Complex<T>]) {
    let mut best = 0;
    let mut best_norm = T::zero();
    for (i, c) in v.iter().enumerate() {
        let n = c.norm();
        if n > best_norm {
            best = i;
            best_norm = n;
        }
    }
    if best_norm == T::zero() {
        return;
    }
    let phase = v[best].conj() / best_norm;
    for c in v.iter_mut() {
        *c *= phase;
    }
    v[best] = Complex::new(best_norm, T::zero());
}

/// Hermitian eigendecomposition of every block, globally ordered.
pub fn eigendecompose<T: Real>(cov: &BlockCovariance<T>) -> Result<PrincipalBasis<T>> {
    let spec = cov.spec();
    let mut entries = Vec::with_capacity(spec.dim_compact());
    for (l, block) in cov.blocks().iter().enumerate() {
        let dim = block.dim();
        if dim == 0 {
            continue;
        }
        let (values, vectors) = T::hermitian_eigen(dim, block.data())
            .ok_or_else(|| Error::Numerical { block: l, message: "Hermitian eigensolver did not converge".into() })?;
        let tol = psd_tolerance(block.trace());
        let mut pairs: Vec<(T, Vec<Complex<T>>)> = Vec::with_capacity(dim);
        for (k, &lam) in values.iter().enumerate() {
            if !lam.is_finite() {
                return Err(Error::Numerical { block: l, message: "non-finite eigenvalue".into() });
            }
            if lam < -tol {
                return Err(Error::Numerical {
                    block: l,
                    message: format!("eigenvalue {} below -{} (block not PSD)", lam.to_f64_lossy(), tol.to_f64_lossy()),
                });
            }
            let mut v = vectors[k * dim..(k + 1) * dim].to_vec();
            fix_phase(&mut v);
            pairs.push((lam.max(T::zero()), v));
        }
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        for (s, (lam, v)) in pairs.into_iter().enumerate() {
            entries.push(CompactEntry { l, s: s + 1, eigenvalue: lam, vector: v });
        }
    }
    entries.sort_by(order);
    PrincipalBasis::from_entries(spec, entries, cov.mean_radial().to_vec(), cov.sample_count())
}

fn check_d<T: Real>(basis: &PrincipalBasis<T>, d: usize) -> Result<()> {
    if d == 0 || d > basis.dim() {
        return Err(Error::domain(format!("d = {d} outside 1..={}", basis.dim())));
    }
    Ok(())
}

/// `α_j = Σ_t f_{l_j m_j t} conj(v_{l_j s_j})_t` for the first `d` eigenvolumes.
pub fn project<T: Real>(coeffs: &CoefficientVector<T>, basis: &PrincipalBasis<T>, d: usize) -> Result<Vec<Complex<T>>> {
    check_d(basis, d)?;
    coeffs.check_same_spec(basis.spec())?;
    let spec = basis.spec();
    let data = coeffs.data();
    Ok(basis.expanded[..d]
        .iter()
        .map(|e| {
            let start = spec.index(e.l, e.m, 1);
            let v = &basis.entries[e.compact].vector;
            data[start..start + v.len()].iter().zip(v).map(|(f, w)| f * w.conj()).sum()
        })
        .collect())
}

/// Coefficients of `Σ_{j<d} α_j ψ_j`.
pub fn reconstruct<T: Real>(alpha: &[Complex<T>], basis: &PrincipalBasis<T>, d: usize) -> Result<CoefficientVector<T>> {
    check_d(basis, d)?;
    if alpha.len() != d {
        return Err(Error::domain(format!("alpha has {} entries, expected d = {d}", alpha.len())));
    }
    let spec = basis.spec();
    let mut out = CoefficientVector::zeros(spec);
    let data = out.data_mut();
    for (a, e) in alpha.iter().zip(&basis.expanded[..d]) {
        let start = spec.index(e.l, e.m, 1);
        let v = &basis.entries[e.compact].vector;
        for (slot, w) in data[start..start + v.len()].iter_mut().zip(v) {
            *slot += a * w;
        }
    }
    Ok(out)
}

/// Rank selection for the truncated reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankRule<T> {
    /// Exactly `d` eigenvolumes.
    Explicit(usize),
    /// Smallest `d` whose eigenvalue mass reaches the fraction `τ`.
    Energy(T),
    /// Cut after the compact entry with the largest relative eigenvalue gap
    /// `(λ_k - λ_{k+1}) / λ_k`; the cut never splits an `m`-multiplet.
    Gap,
}

pub fn select_rank<T: Real>(basis: &PrincipalBasis<T>, rule: RankRule<T>) -> Result<usize> {
    match rule {
        RankRule::Explicit(d) => {
            check_d(basis, d)?;
            Ok(d)
        }
        RankRule::Energy(tau) => {
            if !(tau > T::zero() && tau <= T::one()) {
                return Err(Error::domain("energy threshold must lie in (0, 1]"));
            }
            let total: T = (0..basis.dim()).map(|j| basis.eigenvalue(j)).sum();
            if total <= T::zero() {
                return Err(Error::domain("undefined energy ratio: all eigenvalues are zero"));
            }
            let mut acc = T::zero();
            for j in 0..basis.dim() {
                acc += basis.eigenvalue(j);
                if acc / total >= tau {
                    return Ok(j + 1);
                }
            }
            Ok(basis.dim())
        }
        RankRule::Gap => {
            let lams: Vec<T> = basis.entries.iter().map(|e| e.eigenvalue).collect();
            let total: T = lams.iter().copied().sum();
            let floor = psd_tolerance(total);
            let live = |x: T| if x > floor { x } else { T::zero() };
            if lams.first().is_none_or(|&l| live(l) == T::zero()) {
                return Err(Error::domain("gap rule undefined: all eigenvalues are zero"));
            }
            let mut best = 0;
            let mut best_gap = -T::one();
            for k in 0..lams.len() {
                let cur = live(lams[k]);
                if cur == T::zero() {
                    break;
                }
                let next = lams.get(k + 1).map_or(T::zero(), |&x| live(x));
                let gap = (cur - next) / cur;
                if gap >= best_gap {
                    best_gap = gap;
                    best = k;
                }
            }
            Ok(basis.expanded_len(best + 1))
        }
    }
}
