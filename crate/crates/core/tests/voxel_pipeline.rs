use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use so3_pca::io::{read_voxels, write_voxels};
use so3_pca::*;

/// Real band-limited volume with coefficients decaying in `u_{ls}`.
fn smooth_volume(spec: &Arc<BasisSpecF64>, seed: u64) -> CoefficientVectorF64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = CoefficientVector::zeros(spec);
    for l in 0..=spec.l_max() {
        for s in 1..=spec.radial_count(l) {
            let scale = (-0.4 * spec.zero(l, s).unwrap()).exp();
            f.set(l, 0, s, Complex::new(rng.random_range(-1.0..1.0) * scale, 0.0));
            for m in 1..=l as i64 {
                let v = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
                f.set(l, m, s, v);
                f.set(l, -m, s, if m % 2 == 0 { v.conj() } else { -v.conj() });
            }
        }
    }
    f
}

fn rel(a: &CoefficientVectorF64, b: &CoefficientVectorF64) -> f64 {
    let num: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).norm_sqr()).sum();
    (num / b.norm_sqr()).sqrt()
}

#[test]
fn voxelized_band_limited_volume_expands_back() {
    let spec = Arc::new(build_basis(8, 4.0 * PI).unwrap());
    let f = smooth_volume(&spec, 3);
    let vox = voxelize(&f, 64).unwrap();
    let back = expand_voxels(&spec, &vox).unwrap();
    let err = rel(&back, &f);
    assert!(err < 1e-2, "relative coefficient error {err}");
    assert!(back.is_real_volume());
}

#[test]
fn voxel_file_then_expand() {
    let dir = tempfile::tempdir().unwrap();
    let spec = Arc::new(build_basis(4, 3.0 * PI).unwrap());
    let f = smooth_volume(&spec, 4);
    let vox = voxelize(&f, 48).unwrap();
    let p = dir.path().join("v.raw");
    write_voxels(&p, &vox).unwrap();
    let read: VoxelGridF64 = read_voxels(&p).unwrap();
    // f32 storage costs ~1e-7 relative, far below interpolation error
    let a = expand_voxels(&spec, &vox).unwrap();
    let b = expand_voxels(&spec, &read).unwrap();
    assert!(rel(&b, &a) < 1e-6);
    assert!(rel(&b, &f) < 2e-2);
}

#[test]
fn constant_volume_is_radial() {
    let spec = Arc::new(build_basis(4, 8.0 * PI).unwrap());
    let vox = VoxelGrid::from_fn(32, |x, y, z| if x * x + y * y + z * z <= 1.0 { 1.0 } else { 0.0 }).unwrap();
    let c = expand_voxels(&spec, &vox).unwrap();
    let total = c.norm_sqr();
    let radial: f64 = c.block(0).iter().map(|v| v.norm_sqr()).sum();
    assert!((total - radial) / total < 1e-3);
}

#[test]
fn nyquist_rule() {
    let b: f64 = nyquist_band_limit(32).unwrap();
    assert_eq!(b, 16.0 * PI);
    let spec = build_basis(2, b).unwrap();
    assert!(spec.zeros(0).iter().all(|&u| u <= b));
}
