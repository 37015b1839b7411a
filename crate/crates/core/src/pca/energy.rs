//! Cumulative energy curves `w(d) = Σ_{j<=d} |α_j|² / Σ_j |α_j|²`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::pca::principal::{project, PrincipalBasis};
use crate::scalar::Real;
use crate::transform::CoefficientVector;

/// Coefficients below this magnitude go last in the `u`-sorted ordering.
pub const NEAR_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyTag {
    Pca,
    BhSortedAbs,
    BhSortedUls,
}

impl fmt::Display for EnergyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyTag::Pca => "pca",
            EnergyTag::BhSortedAbs => "bh_sorted_abs",
            EnergyTag::BhSortedUls => "bh_sorted_uls",
        })
    }
}

/// Which orthonormal ordering the curve is computed in.
#[derive(Debug, Clone, Copy)]
pub enum EnergyBasis<'a, T> {
    Pca(&'a PrincipalBasis<T>),
    /// Ball-harmonics coefficients by decreasing `|f|` (per volume).
    BhSortedAbs,
    /// Ball-harmonics coefficients by increasing `u_{l,s}`, ties by `(l, m)`,
    /// near-zero coefficients last.
    BhSortedUls,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve<T> {
    pub values: Vec<T>,
    pub tag: EnergyTag,
}

impl<T: Real> EnergyCurve<T> {
    /// `w(d)` with 1-based `d`.
    pub fn at(&self, d: usize) -> T {
        self.values[d - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn cumulative<T: Real>(weights: impl Iterator<Item = T>, tag: EnergyTag) -> Result<EnergyCurve<T>> {
    let mut acc = T::zero();
    let partial: Vec<T> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if !(acc > T::zero()) {
        return Err(Error::domain("undefined energy ratio: zero total energy"));
    }
    Ok(EnergyCurve { values: partial.into_iter().map(|p| p / acc).collect(), tag })
}

pub fn energy_curve<T: Real>(coeffs: &CoefficientVector<T>, basis: EnergyBasis<'_, T>) -> Result<EnergyCurve<T>> {
    match basis {
        EnergyBasis::Pca(b) => {
            let alpha = project(coeffs, b, b.dim())?;
            cumulative(alpha.iter().map(|a| a.norm_sqr()), EnergyTag::Pca)
        }
        EnergyBasis::BhSortedAbs => {
            let mut w: Vec<T> = coeffs.data().iter().map(|c| c.norm_sqr()).collect();
            w.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
            cumulative(w.into_iter(), EnergyTag::BhSortedAbs)
        }
        EnergyBasis::BhSortedUls => {
            let spec = coeffs.spec();
            let small = T::lit(NEAR_ZERO);
            let mut keyed: Vec<(bool, T, usize, i64, T)> = spec
                .indices()
                .zip(coeffs.data())
                .map(|((l, m, s), c)| (c.norm() < small, spec.zero(l, s).unwrap(), l, m, c.norm_sqr()))
                .collect();
            keyed.sort_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
                    .then(a.2.cmp(&b.2))
                    .then(a.3.cmp(&b.3))
            });
            cumulative(keyed.into_iter().map(|k| k.4), EnergyTag::BhSortedUls)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis;
    use num_complex::Complex;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn direct_formula() {
        let spec = Arc::new(build_basis(1, 2.0 * PI).unwrap());
        let mut f = CoefficientVector::zeros(&spec);
        f.set(0, 0, 1, Complex::new(2.0, 0.0));
        f.set(1, 0, 1, Complex::new(0.0, 1.0));
        let c = energy_curve(&f, EnergyBasis::BhSortedAbs).unwrap();
        assert!((c.at(1) - 0.8).abs() < 1e-15);
        assert_eq!(c.at(spec.dim()), 1.0);
        assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(energy_curve(&CoefficientVector::zeros(&spec), EnergyBasis::BhSortedAbs).is_err());
    }

    #[test]
    fn uls_ordering_puts_small_last() {
        let spec = Arc::new(build_basis(1, 2.0 * PI).unwrap());
        // zeros: u01 = π, u11 ≈ 4.49, u02 = 2π
        let mut f = CoefficientVector::zeros(&spec);
        f.set(0, 0, 2, Complex::new(1.0, 0.0));
        f.set(1, -1, 1, Complex::new(1.0, 0.0));
        let c = energy_curve(&f, EnergyBasis::BhSortedUls).unwrap();
        // order: (1,-1,1) [4.49], then (0,0,2) [2π], then the zero entries
        assert!((c.at(1) - 0.5).abs() < 1e-15);
        assert_eq!(c.at(2), 1.0);
        assert_eq!(c.tag, EnergyTag::BhSortedUls);
    }
}
