//! Truncated ball-harmonics basis and the spherical quadrature grid used to
//! integrate against it.
//!
//! Coefficients use one canonical layout everywhere: `l = 0..=L` outermost,
//! then `m = -l..=l`, then `s = 1..=S(l)` fastest.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{sph_bessel, sph_harmonic, BesselZeroTable};
use crate::quadrature::{gauss_legendre, gauss_legendre_interval};
use crate::scalar::Real;

pub const LAYOUT_TAG: &str = "l-major,m-then-s";
pub const SPEC_VERSION: u32 = 1;

/// Largest supported angular degree.
pub const MAX_DEGREE: usize = 64;

/// Index set `{(l, m, s)}` with `u_{l,s} <= band_limit`, `l <= L`.
#[derive(Debug, Clone)]
pub struct BasisSpec<T> {
    l_max: usize,
    band_limit: T,
    radial_counts: Vec<usize>,
    zeros: Vec<Vec<T>>,
    norms: Vec<Vec<T>>,
    offsets: Vec<usize>,
    dim: usize,
    dim_compact: usize,
}

/// Wire form of a [`BasisSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpecJson {
    #[serde(rename = "L")]
    pub l_max: usize,
    pub band_limit: f64,
    #[serde(rename = "S")]
    pub radial_counts: Vec<usize>,
    pub layout: String,
    pub version: u32,
}

/// `πN/2`, the default Nyquist band limit for an `N³` grid.
pub fn nyquist_band_limit<T: Real>(n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::domain(format!("Nyquist band limit needs N >= 2, got {n}")));
    }
    Ok(T::PI() * T::from_usize_exact(n) / T::lit(2.0))
}

/// Builds the truncated basis: `S(l) = #{s : u_{l,s} <= band_limit}`.
pub fn build_basis<T: Real>(l_max: usize, band_limit: T) -> Result<BasisSpec<T>> {
    if !(band_limit > T::zero()) || !band_limit.is_finite() {
        return Err(Error::domain("band_limit must be positive and finite"));
    }
    if l_max > MAX_DEGREE {
        return Err(Error::domain(format!("L = {l_max} exceeds supported maximum {MAX_DEGREE}")));
    }
    if band_limit < T::PI() {
        return Err(Error::domain("empty basis: band_limit < pi leaves S(0) = 0"));
    }
    let table = BesselZeroTable::<T>::up_to(l_max, band_limit)?;
    let mut radial_counts = Vec::with_capacity(l_max + 1);
    let mut zeros = Vec::with_capacity(l_max + 1);
    let mut norms = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let kept: Vec<T> = table.row(l).iter().copied().take_while(|&u| u <= band_limit).collect();
        let nrm = kept
            .iter()
            .map(|&u| T::lit(4.0) / sph_bessel(l + 1, u).abs())
            .collect();
        radial_counts.push(kept.len());
        zeros.push(kept);
        norms.push(nrm);
    }
    let mut offsets = Vec::with_capacity(l_max + 2);
    let mut acc = 0;
    for (l, &s) in radial_counts.iter().enumerate() {
        offsets.push(acc);
        acc += (2 * l + 1) * s;
    }
    offsets.push(acc);
    let dim_compact = radial_counts.iter().sum();
    Ok(BasisSpec { l_max, band_limit, radial_counts, zeros, norms, offsets, dim: acc, dim_compact })
}

impl<T: Real> BasisSpec<T> {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn band_limit(&self) -> T {
        self.band_limit
    }

    /// `S(l)`; zero for `l > L`.
    pub fn radial_count(&self, l: usize) -> usize {
        self.radial_counts.get(l).copied().unwrap_or(0)
    }

    pub fn radial_counts(&self) -> &[usize] {
        &self.radial_counts
    }

    /// Total coefficient count `D = Σ (2l+1) S(l)`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D' = Σ S(l)`.
    pub fn dim_compact(&self) -> usize {
        self.dim_compact
    }

    /// Largest `S(l)`.
    pub fn max_radial_count(&self) -> usize {
        self.radial_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn zeros(&self, l: usize) -> &[T] {
        &self.zeros[l]
    }

    /// `u_{l,s}` with 1-based `s`.
    pub fn zero(&self, l: usize, s: usize) -> Option<T> {
        self.zeros.get(l).and_then(|z| z.get(s.checked_sub(1)?)).copied()
    }

    /// Radial normalization `4 / |j_{l+1}(u_{l,s})|`.
    pub fn radial_norm(&self, l: usize, s: usize) -> T {
        self.norms[l][s - 1]
    }

    /// Start of degree `l` in the canonical layout.
    pub fn offset(&self, l: usize) -> usize {
        self.offsets[l]
    }

    /// Range of degree `l` in the canonical layout.
    pub fn block_range(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    pub fn contains(&self, l: usize, m: i64, s: usize) -> bool {
        l <= self.l_max && m.unsigned_abs() as usize <= l && s >= 1 && s <= self.radial_counts[l]
    }

    /// Canonical position of `(l, m, s)`; `s` is 1-based.
    #[inline]
    pub fn index(&self, l: usize, m: i64, s: usize) -> usize {
        debug_assert!(self.contains(l, m, s));
        self.offsets[l] + (m + l as i64) as usize * self.radial_counts[l] + (s - 1)
    }

    /// Inverse of [`Self::index`].
    pub fn triple(&self, idx: usize) -> (usize, i64, usize) {
        let l = self.offsets.partition_point(|&o| o <= idx) - 1;
        let local = idx - self.offsets[l];
        let sc = self.radial_counts[l];
        (l, (local / sc) as i64 - l as i64, local % sc + 1)
    }

    /// All `(l, m, s)` in canonical order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, i64, usize)> + '_ {
        (0..=self.l_max).flat_map(move |l| {
            let sc = self.radial_counts[l];
            let li = l as i64;
            (-li..=li).flat_map(move |m| (1..=sc).map(move |s| (l, m, s)))
        })
    }

    /// Normalized radial function `j_{l,s}(r) = 4/|j_{l+1}(u)| j_l(u r)`.
    #[inline]
    pub fn radial(&self, l: usize, s: usize, r: T) -> T {
        self.norms[l][s - 1] * sph_bessel(l, self.zeros[l][s - 1] * r)
    }

    /// Ball harmonic `j_{l,s}(r) Y_l^m(θ, φ)`.
    pub fn eval_ball_harmonic(&self, l: usize, m: i64, s: usize, point: (T, T, T)) -> Result<Complex<T>> {
        if !self.contains(l, m, s) {
            return Err(Error::domain(format!("(l={l}, m={m}, s={s}) is not retained in this basis")));
        }
        let (r, theta, phi) = point;
        if r < T::zero() || r > T::one() {
            return Err(Error::domain("radius must lie in [0, 1]"));
        }
        Ok(sph_harmonic(l, m, theta, phi)? * self.radial(l, s, r))
    }

    /// Same index set (degree, band limit and radial counts).
    pub fn same_as(&self, other: &Self) -> bool {
        self.l_max == other.l_max && self.band_limit == other.band_limit && self.radial_counts == other.radial_counts
    }

    pub fn to_json(&self) -> BasisSpecJson {
        BasisSpecJson {
            l_max: self.l_max,
            band_limit: self.band_limit.to_f64_lossy(),
            radial_counts: self.radial_counts.clone(),
            layout: LAYOUT_TAG.to_string(),
            version: SPEC_VERSION,
        }
    }

    /// Rebuilds a spec from its wire form and checks the stored `S` agrees.
    pub fn from_json(json: &BasisSpecJson) -> Result<Self> {
        if json.version != SPEC_VERSION {
            return Err(Error::Compatibility(format!("unsupported basis spec version {}", json.version)));
        }
        if json.layout != LAYOUT_TAG {
            return Err(Error::Compatibility(format!("unknown coefficient layout {:?}", json.layout)));
        }
        let spec = build_basis(json.l_max, T::lit(json.band_limit))?;
        if spec.radial_counts != json.radial_counts {
            return Err(Error::Compatibility(format!(
                "field S: stored {:?} disagrees with rebuilt {:?}",
                json.radial_counts, spec.radial_counts
            )));
        }
        Ok(spec)
    }
}

impl<T: Real> PartialEq for BasisSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// Product quadrature over the unit ball: Gauss–Legendre in `r` (with `r²`
/// folded into the weights), Gauss–Legendre in `cos θ`, uniform in `φ`.
///
/// Nodes are enumerated radius-major, then polar, then azimuth.
#[derive(Debug, Clone)]
pub struct SphericalGrid<T> {
    pub radial_nodes: Vec<(T, T)>,
    pub polar_nodes: Vec<(T, T)>,
    pub azimuthal_count: usize,
}

impl<T: Real> SphericalGrid<T> {
    pub fn with_counts(radial: usize, polar: usize, azimuthal: usize) -> Self {
        assert!(radial >= 1 && polar >= 1 && azimuthal >= 1, "grid counts must be positive");
        let (r, wr) = gauss_legendre_interval::<T>(radial, T::zero(), T::one());
        let radial_nodes = r.into_iter().zip(wr).map(|(r, w)| (r, w * r * r)).collect();
        let (x, wx) = gauss_legendre::<T>(polar);
        // cos θ ascending -> θ descending; keep θ ascending
        let polar_nodes = x.into_iter().zip(wx).rev().map(|(x, w)| (x.max(-T::one()).min(T::one()).acos(), w)).collect();
        Self { radial_nodes, polar_nodes, azimuthal_count: azimuthal }
    }

    pub fn node_count(&self) -> usize {
        self.radial_nodes.len() * self.polar_nodes.len() * self.azimuthal_count
    }

    #[inline]
    pub fn azimuth(&self, k: usize) -> T {
        T::TAU() * T::from_usize_exact(k) / T::from_usize_exact(self.azimuthal_count)
    }

    #[inline]
    pub fn azimuth_weight(&self) -> T {
        T::TAU() / T::from_usize_exact(self.azimuthal_count)
    }

    /// `(r, θ, φ, weight)` for every node, in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (T, T, T, T)> + '_ {
        let wphi = self.azimuth_weight();
        self.radial_nodes.iter().flat_map(move |&(r, wr)| {
            self.polar_nodes.iter().flat_map(move |&(t, wt)| {
                (0..self.azimuthal_count).map(move |k| (r, t, self.azimuth(k), wr * wt * wphi))
            })
        })
    }

    /// Node counts doubled in every direction (saturation checks).
    pub fn refined(&self) -> Self {
        Self::with_counts(self.radial_nodes.len() * 2, self.polar_nodes.len() * 2, self.azimuthal_count * 2)
    }
}

/// Radial node count for a band limit.
///
/// At least `ceil((2 b/π + 3)/2)`; the extra `b/2 + 16` nodes bring
/// Gauss–Legendre into its spectrally converged regime for products of two
/// radial functions of frequency up to `b`.
pub fn radial_node_count<T: Real>(band_limit: T) -> usize {
    let b = band_limit.to_f64_lossy();
    let floor = ((2.0 * b / std::f64::consts::PI + 3.0) / 2.0).ceil() as usize;
    floor.max((0.5 * b).ceil() as usize + 16)
}

/// Quadrature grid exact (to roundoff) for products of retained basis
/// functions: `L + 1` polar nodes and `2L + 1` azimuthal nodes.
pub fn build_grid<T: Real>(spec: &BasisSpec<T>) -> SphericalGrid<T> {
    SphericalGrid::with_counts(radial_node_count(spec.band_limit()), spec.l_max() + 1, 2 * spec.l_max() + 1)
}
