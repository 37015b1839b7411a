use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::container::{self, from_pairs, push_complex, take_complex, to_pairs};
use crate::basis::{BasisSpec, BasisSpecJson};
use crate::error::{Error, Result};
use crate::pca::{BlockCovariance, CompactEntry, EnergyCurve, HermitianBlock, PrincipalBasis};
use crate::scalar::Real;
use crate::synthesis::SynthesisModel;
use crate::transform::CoefficientVector;

pub const COEFF_MAGIC: &[u8; 8] = b"BALLCOEF";
pub const BASIS_MAGIC: &[u8; 8] = b"SO3PCABA";
pub const COVARIANCE_MAGIC: &[u8; 8] = b"SO3PCACV";
/// Version written into basis, covariance and model headers.
pub const FILE_VERSION: u32 = 1;

fn check_version(found: u32, what: &str) -> Result<()> {
    if found != FILE_VERSION {
        return Err(Error::format(container::PREFIX, format!("{what} version: expected {FILE_VERSION}, found {found}")));
    }
    Ok(())
}

fn spec_from<T: Real>(json: &BasisSpecJson) -> Result<Arc<BasisSpec<T>>> {
    Ok(Arc::new(BasisSpec::from_json(json)?))
}

// ---- coefficient vectors ----

pub fn write_coeffs<T: Real>(path: &Path, coeffs: &CoefficientVector<T>) -> Result<()> {
    let mut payload = Vec::with_capacity(coeffs.len() * 16);
    push_complex(&mut payload, coeffs.data());
    container::write(path, COEFF_MAGIC, &coeffs.spec().to_json(), &payload)
}

pub fn read_coeffs<T: Real>(path: &Path) -> Result<CoefficientVector<T>> {
    let parsed = container::read::<BasisSpecJson>(path, COEFF_MAGIC)?;
    let spec = spec_from(&parsed.header)?;
    let data = take_complex(&parsed.payload, parsed.payload_offset, spec.dim(), "coefficients")?;
    CoefficientVector::from_data(&spec, data)
}

/// Reads a coefficient file that must use `spec`; the result shares it.
pub fn read_coeffs_expect<T: Real>(path: &Path, spec: &Arc<BasisSpec<T>>) -> Result<CoefficientVector<T>> {
    let parsed = container::read::<BasisSpecJson>(path, COEFF_MAGIC)?;
    let found = spec_from::<T>(&parsed.header)?;
    if !found.same_as(spec) {
        return Err(Error::Compatibility(format!(
            "{}: basis (L={}, band_limit={}) differs from expected (L={}, band_limit={})",
            path.display(),
            found.l_max(),
            found.band_limit().to_f64_lossy(),
            spec.l_max(),
            spec.band_limit().to_f64_lossy()
        )));
    }
    let data = take_complex(&parsed.payload, parsed.payload_offset, spec.dim(), "coefficients")?;
    CoefficientVector::from_data(spec, data)
}

/// `*.bhc` files in `dir`, sorted by name.
pub fn list_coeff_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "bhc"))
        .collect();
    out.sort();
    Ok(out)
}

// ---- covariance ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovarianceHeader {
    spec: BasisSpecJson,
    n: usize,
    mean_radial: Vec<[f64; 2]>,
    version: u32,
}

pub fn write_covariance<T: Real>(path: &Path, cov: &BlockCovariance<T>) -> Result<()> {
    let header = CovarianceHeader {
        spec: cov.spec().to_json(),
        n: cov.sample_count(),
        mean_radial: to_pairs(cov.mean_radial()),
        version: FILE_VERSION,
    };
    let mut payload = Vec::new();
    for b in cov.blocks() {
        push_complex(&mut payload, b.data());
    }
    container::write(path, COVARIANCE_MAGIC, &header, &payload)
}

pub fn read_covariance<T: Real>(path: &Path) -> Result<BlockCovariance<T>> {
    let parsed = container::read::<CovarianceHeader>(path, COVARIANCE_MAGIC)?;
    let h = parsed.header;
    check_version(h.version, "covariance")?;
    let spec = spec_from::<T>(&h.spec)?;
    let total: usize = spec.radial_counts().iter().map(|s| s * s).sum();
    let all = take_complex::<T>(&parsed.payload, parsed.payload_offset, total, "covariance blocks")?;
    let mut blocks = Vec::with_capacity(spec.l_max() + 1);
    let mut at = 0;
    for l in 0..=spec.l_max() {
        let s = spec.radial_count(l);
        let raw = &all[at..at + s * s];
        at += s * s;
        let block = HermitianBlock::from_upper(s, raw)?;
        let scale = raw.iter().map(|c| c.norm()).fold(T::one(), T::max);
        if raw.iter().zip(block.data()).any(|(a, b)| (a - b).norm() > T::lit(1e-12) * scale) {
            return Err(Error::Data(format!("covariance block l={l} is not Hermitian")));
        }
        blocks.push(block);
    }
    let mean = from_pairs(&h.mean_radial, "mean_radial")?;
    BlockCovariance::from_blocks(&spec, h.n, mean, blocks)
}

// ---- principal basis ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    l: usize,
    s: usize,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisHeader {
    spec: BasisSpecJson,
    n: usize,
    mean_radial: Vec<[f64; 2]>,
    entries: Vec<EntryJson>,
    selected_d: usize,
    version: u32,
}

/// A principal basis with the rank chosen when it was computed.
#[derive(Debug, Clone)]
pub struct BasisFile<T> {
    pub basis: PrincipalBasis<T>,
    pub selected_d: usize,
}

pub fn write_basis<T: Real>(path: &Path, basis: &PrincipalBasis<T>, selected_d: usize) -> Result<()> {
    if selected_d == 0 || selected_d > basis.dim() {
        return Err(Error::domain(format!("selected d = {selected_d} outside 1..={}", basis.dim())));
    }
    let header = BasisHeader {
        spec: basis.spec().to_json(),
        n: basis.sample_count(),
        mean_radial: to_pairs(basis.mean_radial()),
        entries: basis.entries().iter().map(|e| EntryJson { l: e.l, s: e.s, lambda: e.eigenvalue.to_f64_lossy() }).collect(),
        selected_d,
        version: FILE_VERSION,
    };
    let mut payload = Vec::new();
    for e in basis.entries() {
        push_complex(&mut payload, &e.vector);
    }
    container::write(path, BASIS_MAGIC, &header, &payload)
}

pub fn read_basis<T: Real>(path: &Path) -> Result<BasisFile<T>> {
    let parsed = container::read::<BasisHeader>(path, BASIS_MAGIC)?;
    let h = parsed.header;
    check_version(h.version, "basis")?;
    let spec = spec_from::<T>(&h.spec)?;
    if h.entries.len() != spec.dim_compact() {
        return Err(Error::format(
            container::PREFIX,
            format!("entries: expected D' = {} rows, found {}", spec.dim_compact(), h.entries.len()),
        ));
    }
    for (k, e) in h.entries.iter().enumerate() {
        if e.l > spec.l_max() || e.s == 0 || e.s > spec.radial_count(e.l) {
            return Err(Error::format(container::PREFIX, format!("entries[{k}]: (l={}, s={}) not in the basis", e.l, e.s)));
        }
        if !(e.lambda >= 0.0 && e.lambda.is_finite()) {
            return Err(Error::Data(format!("entries[{k}].lambda = {} is not a finite non-negative value", e.lambda)));
        }
    }
    let total: usize = h.entries.iter().map(|e| spec.radial_count(e.l)).sum();
    let all = take_complex::<T>(&parsed.payload, parsed.payload_offset, total, "eigenvectors")?;
    let mut at = 0;
    let mut entries = Vec::with_capacity(h.entries.len());
    for e in &h.entries {
        let s = spec.radial_count(e.l);
        entries.push(CompactEntry { l: e.l, s: e.s, eigenvalue: T::lit(e.lambda), vector: all[at..at + s].to_vec() });
        at += s;
    }
    let mean = from_pairs(&h.mean_radial, "mean_radial")?;
    let basis = PrincipalBasis::from_entries(&spec, entries, mean, h.n).map_err(|e| match e {
        Error::Domain(m) => Error::Data(m),
        other => other,
    })?;
    if h.selected_d == 0 || h.selected_d > basis.dim() {
        return Err(Error::Data(format!("selected_d = {} outside 1..={}", h.selected_d, basis.dim())));
    }
    Ok(BasisFile { basis, selected_d: h.selected_d })
}

// ---- synthesis model ----

/// Wire form of a synthesis model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub d: usize,
    pub mu: Vec<[f64; 2]>,
    pub sigma: Vec<f64>,
    pub basis_file: String,
    pub version: u32,
    pub mean_radial: Vec<[f64; 2]>,
}

pub fn write_model<T: Real>(path: &Path, model: &SynthesisModel<T>, basis_file: &Path) -> Result<()> {
    let file = ModelFile {
        d: model.d(),
        mu: to_pairs(model.mu()),
        sigma: model.sigma().iter().map(|s| s.to_f64_lossy()).collect(),
        basis_file: basis_file.to_string_lossy().into_owned(),
        version: FILE_VERSION,
        mean_radial: to_pairs(model.mean_radial()),
    };
    fs::write(path, serde_json::to_vec_pretty(&file)?)?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let bytes = fs::read(path)?;
    let file: ModelFile = serde_json::from_slice(&bytes).map_err(|e| Error::format(0, format!("model: {e}")))?;
    check_version(file.version, "model").map_err(|_| Error::format(0, format!("model version: expected {FILE_VERSION}, found {}", file.version)))?;
    if file.mu.len() != file.d || file.sigma.len() != file.d {
        return Err(Error::format(0, format!("model: d = {} but mu has {} and sigma {} entries", file.d, file.mu.len(), file.sigma.len())));
    }
    Ok(file)
}

/// Reads a model and the basis it references (relative paths resolve
/// against the model file's directory).
pub fn load_model<T: Real>(path: &Path) -> Result<SynthesisModel<T>> {
    let file = read_model(path)?;
    let mut bpath = PathBuf::from(&file.basis_file);
    if bpath.is_relative() {
        if let Some(dir) = path.parent() {
            bpath = dir.join(bpath);
        }
    }
    let basis = Arc::new(read_basis::<T>(&bpath)?.basis);
    if file.d > basis.dim() {
        return Err(Error::Compatibility(format!("model d = {} exceeds basis dimension {}", file.d, basis.dim())));
    }
    let mean = from_pairs(&file.mean_radial, "mean_radial")?;
    if mean.len() != basis.spec().radial_count(0) {
        return Err(Error::Compatibility("model mean_radial length differs from the basis S(0)".into()));
    }
    let mu = from_pairs(&file.mu, "mu")?;
    let sigma = file.sigma.iter().map(|s| T::lit(*s)).collect();
    SynthesisModel::new(&basis, mu, sigma, mean).map_err(|e| match e {
        Error::Domain(m) => Error::Data(m),
        other => other,
    })
}

// ---- projections ----

/// Principal coefficients of one volume, with the basis they refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionFile {
    pub d: usize,
    pub alpha: Vec<[f64; 2]>,
    pub spec: BasisSpecJson,
    pub version: u32,
}

pub fn write_projection<T: Real>(path: &Path, alpha: &[Complex<T>], spec: &BasisSpec<T>) -> Result<()> {
    let file = ProjectionFile { d: alpha.len(), alpha: to_pairs(alpha), spec: spec.to_json(), version: FILE_VERSION };
    fs::write(path, serde_json::to_vec_pretty(&file)?)?;
    Ok(())
}

/// Reads a projection whose basis must match `spec`.
pub fn read_projection<T: Real>(path: &Path, spec: &BasisSpec<T>) -> Result<Vec<Complex<T>>> {
    let file: ProjectionFile =
        serde_json::from_slice(&fs::read(path)?).map_err(|e| Error::format(0, format!("projection: {e}")))?;
    if file.version != FILE_VERSION {
        return Err(Error::format(0, format!("projection version: expected {FILE_VERSION}, found {}", file.version)));
    }
    if file.alpha.len() != file.d {
        return Err(Error::format(0, format!("projection: d = {} but alpha has {} entries", file.d, file.alpha.len())));
    }
    let found = BasisSpec::<T>::from_json(&file.spec)?;
    if !found.same_as(spec) {
        return Err(Error::Compatibility(format!("{}: projection refers to a different basis", path.display())));
    }
    from_pairs(&file.alpha, "alpha")
}

// ---- energy curves ----

pub fn write_energy_csv<T: Real>(path: &Path, curve: &EnergyCurve<T>) -> Result<()> {
    let mut out = String::from("d,w\n");
    for (k, w) in curve.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", k + 1, w.to_f64_lossy()));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads the `w` column, checking the header, row numbering and range.
pub fn read_energy_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut offset = 0u64;
    let mut lines = text.split_inclusive('\n');
    let head = lines.next().unwrap_or("");
    if head.trim_end() != "d,w" {
        return Err(Error::format(0, format!("energy header: expected \"d,w\", found {:?}", head.trim_end())));
    }
    offset += head.len() as u64;
    let mut out = Vec::new();
    for line in lines {
        let row = line.trim_end();
        let (d, w) = row.split_once(',').ok_or_else(|| Error::format(offset, format!("energy row {:?}: expected \"d,w\"", row)))?;
        let d: usize = d.parse().map_err(|_| Error::format(offset, format!("energy row d: {d:?} is not an integer")))?;
        if d != out.len() + 1 {
            return Err(Error::format(offset, format!("energy row d: expected {}, found {d}", out.len() + 1)));
        }
        let w: f64 = w.parse().map_err(|_| Error::format(offset, format!("energy row {d} w: {w:?} is not a number")))?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Data(format!("energy row {d}: w = {w} outside [0, 1]")));
        }
        out.push(w);
        offset += line.len() as u64;
    }
    Ok(out)
}
