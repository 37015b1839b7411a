use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod spec_arg;

#[derive(Parser)]
#[command(name = "so3pca", version, about = "Rotation-invariant PCA of volumes in a ball-harmonics basis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a voxel volume into ball-harmonics coefficients.
    Expand(ExpandArgs),
    /// Fit the rotation-invariant principal basis of a coefficient directory.
    Pca(PcaArgs),
    /// Principal coefficients of a volume (centered with the basis mean).
    Project(ProjectArgs),
    /// Truncated reconstruction from a projection or a coefficient file.
    Reconstruct(ReconstructArgs),
    /// Cumulative energy curve as CSV.
    Energy(EnergyArgs),
    /// Rotate a coefficient file by ZYZ Euler angles.
    Rotate(RotateArgs),
    /// Fit a Gaussian synthesis model on projected training data.
    FitModel(FitModelArgs),
    /// Sample a new coefficient vector from a synthesis model.
    Synth(SynthArgs),
    /// Write a synthetic low-rank coefficient dataset.
    GenDataset(GenDatasetArgs),
}

#[derive(Args)]
struct ExpandArgs {
    /// Raw f32 voxel file with a `<file>.json` sidecar.
    #[arg(long = "in")]
    input: PathBuf,
    /// Basis as `L=<int>,band=<float>` (band accepts a `pi` suffix).
    #[arg(long, conflicts_with = "nyquist", required_unless_present = "nyquist")]
    spec: Option<String>,
    /// Use band limit πN/2 from the sidecar's N.
    #[arg(long)]
    nyquist: bool,
    /// Degree used with --nyquist.
    #[arg(long, default_value_t = 20, requires = "nyquist")]
    lmax: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PcaArgs {
    /// Directory of `.bhc` coefficient files.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Augment with reflections (O(3) invariance).
    #[arg(long)]
    o3: bool,
    /// Explicit number of eigenvolumes.
    #[arg(long, group = "rank")]
    d: Option<usize>,
    /// Smallest d whose eigenvalue mass reaches this fraction.
    #[arg(long, group = "rank")]
    energy: Option<f64>,
    /// Largest relative eigenvalue gap (default).
    #[arg(long, group = "rank")]
    gap: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Also write the block covariance.
    #[arg(long)]
    covariance_out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    /// Coefficient file or directory of them.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    basis: PathBuf,
    /// Defaults to the rank stored in the basis file.
    #[arg(long)]
    d: Option<usize>,
    /// Projection JSON, or a directory when --in is one.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Projection JSON, coefficient file, or a directory of either.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    basis: PathBuf,
    /// Used when the input is a coefficient file; defaults to the basis rank.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyKind {
    Pca,
    BhAbs,
    BhUls,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    basis: EnergyKind,
    /// Principal basis; required for `pca`. When given, coefficients are
    /// centered with its mean for every ordering.
    #[arg(long)]
    basis_file: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RotateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitModelArgs {
    /// Directory of `.bhc` training files.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    basis: PathBuf,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenDatasetArgs {
    /// Basis as `L=<int>,band=<float>`.
    #[arg(long)]
    spec: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave samples unrotated.
    #[arg(long)]
    no_rotate: bool,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Expand(a) => commands::expand(a),
        Command::Pca(a) => commands::run_pca(a),
        Command::Project(a) => commands::project(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Energy(a) => commands::energy(a),
        Command::Rotate(a) => commands::rotate(a),
        Command::FitModel(a) => commands::fit_model(a),
        Command::Synth(a) => commands::synth(a),
        Command::GenDataset(a) => commands::gen_dataset(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("so3pca: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
