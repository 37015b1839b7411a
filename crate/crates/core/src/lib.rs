//! Rotation-invariant principal component analysis of 3D volumes in a
//! ball-harmonics basis.
//!
//! Volumes on the unit ball are expanded in products of normalized spherical
//! Bessel functions and spherical harmonics. Averaging the covariance of a
//! dataset over all rotations makes it block diagonal in the degree `l`, so
//! the principal components come from one small Hermitian eigenproblem per
//! degree.
//!
//! Everything is generic over the scalar ([`Real`], implemented for `f32`
//! and `f64`); the aliases below fix it to one of them.

pub mod basis;
pub mod error;
pub mod harmonics;
pub mod io;
pub mod oracle;
pub mod pca;
pub mod quadrature;
pub mod scalar;
pub mod synthesis;
pub mod transform;

pub use basis::{build_basis, build_grid, nyquist_band_limit, BasisSpec, SphericalGrid};
pub use error::{Error, Result};
pub use harmonics::WignerAngles;
pub use pca::{
    eigendecompose, energy_curve, fit_covariance, project, reconstruct, select_rank, BlockCovariance, CovarianceOptions,
    EnergyBasis, EnergyCurve, PrincipalBasis, RankRule,
};
pub use scalar::Real;
pub use synthesis::{fit_model, sample_volume, SynthesisModel};
pub use transform::{
    expand_function, expand_voxels, reflect_coeffs, rotate_coeffs, synthesize, voxelize, BallTransform, CoefficientVector,
    VoxelGrid,
};

pub type BasisSpecF64 = BasisSpec<f64>;
pub type BasisSpecF32 = BasisSpec<f32>;
pub type CoefficientVectorF64 = CoefficientVector<f64>;
pub type CoefficientVectorF32 = CoefficientVector<f32>;
pub type VoxelGridF64 = VoxelGrid<f64>;
pub type VoxelGridF32 = VoxelGrid<f32>;
pub type BlockCovarianceF64 = BlockCovariance<f64>;
pub type BlockCovarianceF32 = BlockCovariance<f32>;
pub type PrincipalBasisF64 = PrincipalBasis<f64>;
pub type PrincipalBasisF32 = PrincipalBasis<f32>;
pub type SynthesisModelF64 = SynthesisModel<f64>;
pub type SynthesisModelF32 = SynthesisModel<f32>;
pub type WignerAnglesF64 = WignerAngles<f64>;
pub type WignerAnglesF32 = WignerAngles<f32>;
