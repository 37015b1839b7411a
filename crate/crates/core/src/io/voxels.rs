use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::transform::VoxelGrid;

/// JSON sidecar describing a raw voxel file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoxelSidecar {
    #[serde(rename = "N")]
    pub n: usize,
    pub dtype: String,
    pub order: String,
}

/// `<path>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes raw little-endian `f32` samples and the sidecar.
pub fn write_voxels<T: Real>(path: &Path, grid: &VoxelGrid<T>) -> Result<()> {
    let mut out = Vec::with_capacity(grid.data().len() * 4);
    for v in grid.data() {
        let x = v.to_f64_lossy() as f32;
        if !x.is_finite() {
            return Err(Error::Data("voxel value does not fit in f32".into()));
        }
        out.extend_from_slice(&x.to_le_bytes());
    }
    let side = VoxelSidecar { n: grid.side(), dtype: "f32".into(), order: "x-fastest".into() };
    fs::write(sidecar_path(path), serde_json::to_vec(&side)?)?;
    fs::write(path, out)?;
    Ok(())
}

pub fn read_voxels<T: Real>(path: &Path) -> Result<VoxelGrid<T>> {
    let side_path = sidecar_path(path);
    let side: VoxelSidecar = serde_json::from_slice(&fs::read(&side_path)?)
        .map_err(|e| Error::format(0, format!("sidecar {}: {e}", side_path.display())))?;
    if side.dtype != "f32" {
        return Err(Error::format(0, format!("sidecar dtype: expected \"f32\", found {:?}", side.dtype)));
    }
    if side.order != "x-fastest" {
        return Err(Error::format(0, format!("sidecar order: expected \"x-fastest\", found {:?}", side.order)));
    }
    if side.n < 2 {
        return Err(Error::format(0, format!("sidecar N: must be >= 2, found {}", side.n)));
    }
    let bytes = fs::read(path)?;
    let want = side.n.checked_pow(3).and_then(|c| c.checked_mul(4)).ok_or_else(|| Error::format(0, "sidecar N: too large"))?;
    if bytes.len() != want {
        return Err(Error::format(
            bytes.len().min(want) as u64,
            format!("voxel payload: expected {want} bytes for N={}, found {}", side.n, bytes.len()),
        ));
    }
    let mut data = Vec::with_capacity(want / 4);
    for (k, c) in bytes.chunks_exact(4).enumerate() {
        let x = f32::from_le_bytes(c.try_into().unwrap());
        if !x.is_finite() {
            return Err(Error::Data(format!("voxel {k} (byte {}) is not finite", 4 * k)));
        }
        data.push(T::lit(x as f64));
    }
    VoxelGrid::new(side.n, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_size() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.raw");
        let g = VoxelGrid::<f32>::from_fn(5, |x, y, z| x * 0.5 - y * z).unwrap();
        write_voxels(&p, &g).unwrap();
        let back: VoxelGrid<f32> = read_voxels(&p).unwrap();
        assert_eq!(back.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), g.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>());

        let zero = VoxelGrid::<f64>::new(4, vec![0.0; 64]).unwrap();
        write_voxels(&p, &zero).unwrap();
        assert_eq!(fs::metadata(&p).unwrap().len(), 256);
        let side: serde_json::Value = serde_json::from_slice(&fs::read(sidecar_path(&p)).unwrap()).unwrap();
        assert_eq!(side, serde_json::json!({"N": 4, "dtype": "f32", "order": "x-fastest"}));
    }

    #[test]
    fn malformed_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.raw");
        write_voxels(&p, &VoxelGrid::<f64>::new(4, vec![1.0; 64]).unwrap()).unwrap();
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..100]).unwrap();
        let err = read_voxels::<f64>(&p).unwrap_err().to_string();
        assert!(err.contains("expected 256") && err.contains("found 100"), "{err}");

        let mut bad = bytes.clone();
        bad[8..12].copy_from_slice(&f32::NAN.to_le_bytes());
        fs::write(&p, &bad).unwrap();
        assert!(matches!(read_voxels::<f64>(&p), Err(Error::Data(_))));

        fs::write(&p, &bytes).unwrap();
        fs::write(sidecar_path(&p), br#"{"N":4,"dtype":"f64","order":"x-fastest"}"#).unwrap();
        assert!(read_voxels::<f64>(&p).unwrap_err().to_string().contains("dtype"));
        fs::remove_file(sidecar_path(&p)).unwrap();
        assert!(matches!(read_voxels::<f64>(&p), Err(Error::Io(_))));
    }
}
