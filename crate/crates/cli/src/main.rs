//! `cmc-glue`: every library operation as a subcommand.
//!
//! Exit codes: 0 success, 1 domain or usage error (JSON on stderr), 2 failed
//! verification invariants.

mod commands;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmc_glue::Error;

/// Relative `--out` paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "CMC_GLUE_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "cmc-glue",
    version,
    about = "Delaunay ends, Floquet data and leading-order end gluing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generating curve of D_tau as a versioned JSON document.
    Profile(ProfileArgs),
    /// Structured mesh of D_tau over an s-range.
    Mesh(MeshArgs),
    /// Monodromy and indicial roots for j = 0..=jmax, as CSV.
    Indicial(IndicialArgs),
    /// A geometric Jacobi field and its mode-operator residual, as CSV.
    Jacobi(JacobiArgs),
    /// Apply a harmonic boundary operator to Fourier data.
    Harmonic(HarmonicArgs),
    /// Solve the mode-by-mode Cauchy-data matching.
    Match(MatchArgs),
    /// Glue a half-Delaunay end onto a base surface.
    Glue(GlueArgs),
    /// Run invariant suites; exit 2 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeshFormatArg {
    Obj,
    Ply,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    /// `a,b`; defaults to one period starting at the neck.
    #[arg(long, allow_hyphen_values = true)]
    pub s_range: Option<String>,
    /// `NxM`: rows along s times samples around the axis.
    #[arg(long, default_value = "129x64")]
    pub res: String,
    #[arg(long, value_enum, default_value_t = MeshFormatArg::Obj)]
    pub format: MeshFormatArg,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct IndicialArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 4)]
    pub jmax: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct JacobiArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    /// trans_axis, trans_x, trans_y, rot_x, rot_y or delaunay_param.
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HarmonicOp {
    Interior,
    Exterior,
    Halfcyl,
    Dtn,
}

#[derive(Debug, Args)]
pub struct HarmonicArgs {
    #[arg(long, value_enum)]
    pub op: HarmonicOp,
    /// JSON array of [n, re, im] triples; a path, or `-` for stdin.
    #[arg(long = "in")]
    pub input: String,
    /// Radius of the data circle.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Evaluation radius (interior / exterior).
    #[arg(long)]
    pub r: Option<f64>,
    /// Distance along the half-cylinder.
    #[arg(long)]
    pub s: Option<f64>,
    /// Apply the inverse (dtn only).
    #[arg(long)]
    pub inverse: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    /// `{"dirichlet": [[n, re, im], ...], "neumann": [...]}`; path or `-`.
    #[arg(long)]
    pub delaunay_corr: String,
    #[arg(long)]
    pub surface_corr: String,
    /// Matching radius; defaults to r_tau of the profile.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaseArg {
    Sphere,
    Delaunay,
}

#[derive(Debug, Args)]
pub struct GlueArgs {
    #[arg(long, value_enum)]
    pub base: BaseArg,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    /// Mesh file (.obj or .ply by extension).
    #[arg(long)]
    pub out: PathBuf,
    /// Quality report path; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    /// Direction of p on the sphere, `x,y,z`.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,1")]
    pub point: String,
    /// Delaunay base parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub base_tau: Option<f64>,
    /// Delaunay base: p = X(s, 0); defaults to the bulb.
    #[arg(long, allow_hyphen_values = true)]
    pub base_s: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Comma-separated tau values.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 128)]
    pub glue_resolution: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

/// What a command produced.
pub enum Outcome {
    Done,
    VerificationFailed(Vec<String>),
}

fn report_error(e: &Error) {
    let msg = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    let _ = writeln!(std::io::stderr(), "{msg}");
}

/// Resolves `path` against the output-directory override.
pub fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes to `out` (resolved) or stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> cmc_glue::Result<()> {
    match out {
        Some(p) => {
            let p = output_path(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(p, bytes)?;
        }
        // a closed pipe (`| head`) is not an error
        None => match std::io::stdout().write_all(bytes) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = serde_json::json!({
                "error": { "kind": "usage", "message": e.to_string().trim_end() }
            });
            let _ = writeln!(std::io::stderr(), "{msg}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Profile(a) => commands::profile(&a),
        Command::Mesh(a) => commands::mesh(&a),
        Command::Indicial(a) => commands::indicial(&a),
        Command::Jacobi(a) => commands::jacobi(&a),
        Command::Harmonic(a) => commands::harmonic(&a),
        Command::Match(a) => commands::matching(&a),
        Command::Glue(a) => commands::glue(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed(names)) => {
            for n in names {
                let _ = writeln!(std::io::stderr(), "FAILED {n}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            report_error(&e);
            ExitCode::from(1)
        }
    }
}
