//! SO(3)-invariant principal component analysis on coefficient vectors.

mod covariance;
mod energy;
mod principal;

pub use covariance::{
    accumulate_covariance, center, compute_mean, fit_covariance, uncenter, BlockCovariance, CovarianceAccumulator,
    CovarianceOptions, HermitianBlock,
};
pub use energy::{energy_curve, EnergyBasis, EnergyCurve, EnergyTag, NEAR_ZERO};
pub use principal::{
    eigendecompose, project, reconstruct, select_rank, CompactEntry, ExpandedEntry, PrincipalBasis, RankRule,
};
