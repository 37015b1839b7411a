//! Artifact files: voxel volumes, coefficient vectors, covariances,
//! principal bases, synthesis models and energy curves, plus synthetic
//! datasets for testing.
//!
//! Binary files share one container: an 8-byte magic, a little-endian `u32`
//! header length, a UTF-8 JSON header, then little-endian `f64` payload.

mod container;
mod dataset;
mod files;
mod voxels;

pub use dataset::{generate_synthetic_dataset, DatasetOptions, SyntheticDataset};
pub use files::{
    list_coeff_files, load_model, read_basis, read_coeffs, read_coeffs_expect, read_covariance, read_energy_csv,
    read_model, read_projection, write_basis, write_coeffs, write_covariance, write_energy_csv, write_model, write_projection, BasisFile, ModelFile, ProjectionFile,
    BASIS_MAGIC, COEFF_MAGIC, COVARIANCE_MAGIC, FILE_VERSION,
};
pub use voxels::{read_voxels, sidecar_path, write_voxels, VoxelSidecar};
