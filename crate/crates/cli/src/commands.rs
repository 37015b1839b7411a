use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use so3_pca::io::{self, BasisFile, DatasetOptions};
use so3_pca::pca::{self, center, uncenter};
use so3_pca::transform::to_cartesian;
use so3_pca::{
    build_basis, eigendecompose, energy_curve, fit_covariance, nyquist_band_limit, rotate_coeffs,
    sample_volume, select_rank, BallTransform, BasisSpec, CoefficientVector, CovarianceOptions, EnergyBasis, Error,
    PrincipalBasis, RankRule, Result, WignerAngles,
};

use crate::spec_arg::parse_spec;
use crate::{
    EnergyArgs, EnergyKind, ExpandArgs, FitModelArgs, GenDatasetArgs, PcaArgs, ProjectArgs, ReconstructArgs, RotateArgs,
    SynthArgs,
};

/// 0 ok, 2 I/O or format, 3 domain, 4 numerical.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Format { .. } | Error::Data(_) => 2,
        Error::Domain(_) | Error::Compatibility(_) | Error::Refused(_) | Error::ZeroBracketing { .. } => 3,
        Error::Numerical { .. } => 4,
    }
}

fn norm(v: &[Complex<f64>]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn rel_error(a: &CoefficientVector<f64>, b: &CoefficientVector<f64>) -> f64 {
    let diff: Vec<Complex<f64>> = a.data().iter().zip(b.data()).map(|(x, y)| x - y).collect();
    let base = norm(b.data());
    if base == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / base
    }
}

/// `(input, output)` pairs: one pair for a file, or one per matching file
/// of a directory with outputs named after the inputs.
fn file_pairs(input: &Path, out: &Path, in_ext: &[&str], out_ext: &str) -> Result<Vec<(PathBuf, PathBuf)>> {
    if !input.is_dir() {
        return Ok(vec![(input.to_path_buf(), out.to_path_buf())]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| in_ext.iter().any(|e| x == *e)))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Domain(format!("{}: no input files", input.display())));
    }
    fs::create_dir_all(out)?;
    Ok(files
        .into_iter()
        .map(|f| {
            let name = f.file_stem().unwrap_or_default().to_owned();
            let dst = out.join(name).with_extension(out_ext);
            (f, dst)
        })
        .collect())
}

fn load_basis(path: &Path) -> Result<(Arc<PrincipalBasis<f64>>, usize)> {
    let BasisFile { basis, selected_d } = io::read_basis::<f64>(path)?;
    Ok((Arc::new(basis), selected_d))
}

pub fn expand(a: ExpandArgs) -> Result<()> {
    let vox = io::read_voxels::<f64>(&a.input)?;
    let (l_max, band) = match &a.spec {
        Some(s) => parse_spec(s)?,
        None => (a.lmax, nyquist_band_limit::<f64>(vox.side())?),
    };
    let spec = Arc::new(build_basis(l_max, band)?);
    let tr = BallTransform::new(&spec);
    let coeffs = tr.expand_voxels(&vox)?;

    let samples: Vec<Complex<f64>> = tr
        .grid()
        .nodes()
        .map(|(r, t, p, _)| {
            let [x, y, z] = to_cartesian(r, t, p);
            Complex::new(vox.trilinear(x, y, z), 0.0)
        })
        .collect();
    let synth = tr.synthesize_grid(&coeffs)?;
    let diff: Vec<Complex<f64>> = samples.iter().zip(&synth).map(|(a, b)| a - b).collect();
    let total = tr.inner(&samples, &samples).re;
    let residual = if total > 0.0 { (tr.inner(&diff, &diff).re / total).sqrt() } else { 0.0 };
    let energy = coeffs.norm_sqr();
    let high = energy - coeffs.block(0).iter().map(|c| c.norm_sqr()).sum::<f64>();

    io::write_coeffs(&a.out, &coeffs)?;
    println!("N = {}  L = {}  band_limit = {}", vox.side(), spec.l_max(), spec.band_limit());
    println!("D = {}  D' = {}", spec.dim(), spec.dim_compact());
    println!("relative residual on quadrature grid: {residual:.3e}");
    if energy > 0.0 {
        println!("l>0 energy fraction: {:.3e}", high / energy);
    }
    Ok(())
}

pub fn run_pca(a: PcaArgs) -> Result<()> {
    let files = io::list_coeff_files(&a.input)?;
    let first = files.first().ok_or_else(|| Error::Domain(format!("{}: no .bhc files", a.input.display())))?;
    let spec: Arc<BasisSpec<f64>> = Arc::clone(io::read_coeffs::<f64>(first)?.spec());
    let samples: Vec<CoefficientVector<f64>> = files.iter().map(|f| io::read_coeffs_expect(f, &spec)).collect::<Result<_>>()?;
    let cov = fit_covariance(&samples, CovarianceOptions { o3: a.o3, threads: a.threads })?;
    let basis = eigendecompose(&cov)?;
    let rule = match (a.d, a.energy) {
        (Some(d), _) => RankRule::Explicit(d),
        (_, Some(t)) => RankRule::Energy(t),
        _ => RankRule::Gap,
    };
    let d = select_rank(&basis, rule)?;
    io::write_basis(&a.out, &basis, d)?;
    if let Some(p) = &a.covariance_out {
        io::write_covariance(p, &cov)?;
    }

    println!("n = {}  D = {}  D' = {}", samples.len(), spec.dim(), spec.dim_compact());
    let total: f64 = basis.entries().iter().map(|e| e.eigenvalue * (2 * e.l + 1) as f64).sum();
    println!("{:>4} {:>3} {:>3} {:>14} {:>10}", "k", "l", "s", "lambda", "mass");
    for (k, e) in basis.entries().iter().take(12).enumerate() {
        let mass = if total > 0.0 { e.eigenvalue * (2 * e.l + 1) as f64 / total } else { 0.0 };
        println!("{:>4} {:>3} {:>3} {:>14.6e} {:>10.4}", k + 1, e.l, e.s, e.eigenvalue, mass);
    }
    println!("selected d = {d}");
    Ok(())
}

pub fn project(a: ProjectArgs) -> Result<()> {
    let (basis, stored) = load_basis(&a.basis)?;
    let d = a.d.unwrap_or(stored);
    for (src, dst) in file_pairs(&a.input, &a.out, &["bhc"], "json")? {
        let f = io::read_coeffs_expect(&src, basis.spec())?;
        let alpha = pca::project(&center(&f, basis.mean_radial())?, &basis, d)?;
        io::write_projection(&dst, &alpha, basis.spec())?;
        println!("{}: d = {d}  |alpha| = {:.6e}", src.display(), norm(&alpha));
    }
    Ok(())
}

fn is_coeff_file(path: &Path) -> Result<bool> {
    let mut head = [0u8; 8];
    let mut f = fs::File::open(path)?;
    Ok(std::io::Read::read_exact(&mut f, &mut head).is_ok() && &head == io::COEFF_MAGIC)
}

pub fn reconstruct(a: ReconstructArgs) -> Result<()> {
    let (basis, stored) = load_basis(&a.basis)?;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (src, dst) in file_pairs(&a.input, &a.out, &["bhc", "json"], "bhc")? {
        if is_coeff_file(&src)? {
            let d = a.d.unwrap_or(stored);
            let f = io::read_coeffs_expect(&src, basis.spec())?;
            let alpha = pca::project(&center(&f, basis.mean_radial())?, &basis, d)?;
            let g = uncenter(&pca::reconstruct(&alpha, &basis, d)?, basis.mean_radial())?;
            io::write_coeffs(&dst, &g)?;
            let err = rel_error(&g, &f);
            worst = worst.max(err);
            compared += 1;
            println!("{}: d = {d}  relative error = {err:.3e}", src.display());
        } else {
            let alpha = io::read_projection(&src, basis.spec())?;
            let g = uncenter(&pca::reconstruct(&alpha, &basis, alpha.len())?, basis.mean_radial())?;
            io::write_coeffs(&dst, &g)?;
            println!("{}: d = {}", src.display(), alpha.len());
        }
    }
    if compared > 1 {
        println!("max relative error over {compared} volumes = {worst:.3e}");
    }
    Ok(())
}

pub fn energy(a: EnergyArgs) -> Result<()> {
    let loaded = a.basis_file.as_deref().map(load_basis).transpose()?;
    let f = match &loaded {
        Some((b, _)) => center(&io::read_coeffs_expect(&a.input, b.spec())?, b.mean_radial())?,
        None => io::read_coeffs::<f64>(&a.input)?,
    };
    let which = match a.basis {
        EnergyKind::Pca => {
            let (b, _) = loaded.as_ref().ok_or_else(|| Error::Domain("--basis pca needs --basis-file".into()))?;
            EnergyBasis::Pca(b)
        }
        EnergyKind::BhAbs => EnergyBasis::BhSortedAbs,
        EnergyKind::BhUls => EnergyBasis::BhSortedUls,
    };
    let curve = energy_curve(&f, which)?;
    io::write_energy_csv(&a.out, &curve)?;
    let first_full = curve.values.iter().position(|&w| w >= 1.0 - 1e-12).map_or(curve.len(), |k| k + 1);
    println!("{}: D = {}  w(1) = {:.6}  w >= 1 - 1e-12 at d = {first_full}", curve.tag, curve.len(), curve.at(1));
    Ok(())
}

pub fn rotate(a: RotateArgs) -> Result<()> {
    let f = io::read_coeffs::<f64>(&a.input)?;
    let g = rotate_coeffs(&f, &WignerAngles::new(a.alpha, a.beta, a.gamma));
    io::write_coeffs(&a.out, &g)?;
    println!("rotated by (alpha, beta, gamma) = ({}, {}, {})", a.alpha, a.beta, a.gamma);
    Ok(())
}

pub fn fit_model(a: FitModelArgs) -> Result<()> {
    let (basis, stored) = load_basis(&a.basis)?;
    let d = a.d.unwrap_or(stored);
    let files = io::list_coeff_files(&a.input)?;
    let alphas: Vec<Vec<Complex<f64>>> = files
        .iter()
        .map(|p| pca::project(&center(&io::read_coeffs_expect(p, basis.spec())?, basis.mean_radial())?, &basis, d))
        .collect::<Result<_>>()?;
    let model = so3_pca::fit_model(&alphas, &basis)?;
    io::write_model(&a.out, &model, &a.basis)?;
    println!("n = {}  d = {d}  mean sigma = {:.6e}", alphas.len(), model.sigma().iter().sum::<f64>() / d as f64);
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let model = io::load_model::<f64>(&a.model)?;
    let f = sample_volume(&model, a.seed)?;
    io::write_coeffs(&a.out, &f)?;
    println!("seed = {}  d = {}  |f| = {:.6e}", a.seed, model.d(), f.norm_sqr().sqrt());
    Ok(())
}

pub fn gen_dataset(a: GenDatasetArgs) -> Result<()> {
    let (l, band) = parse_spec(&a.spec)?;
    let spec = Arc::new(build_basis(l, band)?);
    let opts = DatasetOptions { n: a.n, rank: a.rank, noise: a.noise, seed: a.seed, rotate: !a.no_rotate };
    let ds = io::generate_synthetic_dataset(&spec, &opts)?;
    fs::create_dir_all(&a.out)?;
    let width = a.n.to_string().len().max(4);
    for (i, f) in ds.samples.iter().enumerate() {
        io::write_coeffs(&a.out.join(format!("sample_{i:0width$}.bhc")), f)?;
    }
    println!("wrote {} volumes  D = {}  D' = {}", a.n, spec.dim(), spec.dim_compact());
    println!("planted degrees {:?}  expanded rank = {}", ds.component_degrees, ds.expanded_rank());
    Ok(())
}
