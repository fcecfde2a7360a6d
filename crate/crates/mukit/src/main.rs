//! Command-line front end: matrix and certificate file I/O, analysis
//! reports, the golden verification suite, and the brute-force oracle.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/input error,
//! 3 dimension mismatch, 4 numerical non-convergence, 5 unsupported
//! structure or complexity limit.

use clap::{Parser, Subcommand};
use mukit::blockstruct::BlockStructure;
use mukit::cli::{
    cmd_analyze, cmd_build, cmd_oracle, cmd_verify, exit_code_for, read_certificate, read_matrix,
    render_report, BuildFamily,
};
use mukit::mu::MuOptions;
use mukit::verify::{render_table, VerifyConfig};
use mukit::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mukit", version, about = "Structured singular value bounds and generalized stochastic matrix families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a matrix power against a block structure.
    Analyze {
        /// Matrix file (JSON with n and [re, im] entry pairs).
        matrix: PathBuf,
        /// Block structure spec, e.g. "r:1,r:1,r:1" or "r:2,f:3".
        #[arg(long)]
        structure: String,
        /// Analyze the m-th power of the matrix.
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Seed for the sampled optimizer starts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a matrix from one of the known families.
    Build {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the golden verification suite (exit 0 only if every check passes).
    Verify {
        /// Grid density for the oracle-based checks.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Base seed of the randomized sweeps.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force grid oracle for all-scalar structures.
    Oracle {
        matrix: PathBuf,
        #[arg(long)]
        structure: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Even circulant template [a+bi, a-bi, α₂(a+bi), α₂(a-bi), …].
    CirculantEven {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// Comma-separated α₂..α_k (may be empty).
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        alphas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Odd circulant template with the trailing real entry α₁.
    CirculantOdd {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha1: f64,
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        alphas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Doubly stochastic mixture of k seeded permutations.
    Birkhoff {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// The ±1 checkerboard (odd n).
    Checkerboard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Nonnegative combination described by a certificate file (its terms only).
    Cone {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full phase-twisted power δ(W_θ X W_γ)^m from a certificate file.
    Omega {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn optimizer_options(seed: u64) -> Result<MuOptions> {
    let mut opts = MuOptions { seed, ..MuOptions::default() };
    if let Ok(text) = std::env::var("MUKIT_TOL") {
        let tol: f64 = text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("MUKIT_TOL is not a number: {text}")))?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Parse("MUKIT_TOL must lie in (0, 1)".into()));
        }
        opts.tol = tol;
    }
    Ok(opts)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze { matrix, structure, m, seed, out } => {
            let mat = read_matrix(&matrix)?;
            let block = BlockStructure::parse(&structure, mat.n())?;
            let opts = optimizer_options(seed)?;
            let (report, exit) = cmd_analyze(&mat, &block, m, &opts)?;
            print!("{}", render_report(&report));
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                std::fs::write(&path, text)?;
                println!("report written to {}", path.display());
            }
            Ok(exit)
        }
        Command::Build { family } => {
            let (family, out) = match family {
                Family::CirculantEven { a, b, alphas, out } => {
                    (BuildFamily::CirculantEven { a, b, alphas }, out)
                }
                Family::CirculantOdd { a, b, alpha1, alphas, out } => {
                    (BuildFamily::CirculantOdd { a, b, alpha1, alphas }, out)
                }
                Family::Birkhoff { n, k, seed, out } => (BuildFamily::Birkhoff { n, k, seed }, out),
                Family::Checkerboard { n, out } => (BuildFamily::Checkerboard { n }, out),
                Family::Cone { cert, out } => {
                    (BuildFamily::Cone { cert: read_certificate(&cert)? }, out)
                }
                Family::Omega { cert, out } => {
                    (BuildFamily::Omega { cert: read_certificate(&cert)? }, out)
                }
            };
            let meta = cmd_build(&family, &out)?;
            println!("wrote {} ({}x{})", out.display(), meta.n, meta.n);
            if let Some(v) = meta.expected_row_sum {
                println!("expected row sum {v:.12}");
            }
            if let Some(v) = meta.expected_norm {
                println!("expected spectral norm {v:.12}");
            }
            if let Some(v) = meta.expected_mu {
                println!("expected structured singular value {v:.12}");
            }
            for w in &meta.warnings {
                eprintln!("warning: {w}");
            }
            Ok(0)
        }
        Command::Verify { grid, seed } => {
            let cfg = VerifyConfig { grid, seed, opts: optimizer_options(seed)? };
            let (rows, all_pass) = cmd_verify(&cfg)?;
            print!("{}", render_table(&rows));
            let passed = rows.iter().filter(|r| r.pass).count();
            println!("{passed}/{} checks passed", rows.len());
            Ok(if all_pass { 0 } else { 1 })
        }
        Command::Oracle { matrix, structure, grid } => {
            let mat = read_matrix(&matrix)?;
            let block = BlockStructure::parse(&structure, mat.n())?;
            let opts = MuOptions { grid, ..MuOptions::default() };
            let outcome = cmd_oracle(&mat, &block, &opts)?;
            println!("value {:.12}", outcome.value);
            println!("grid accuracy factor {:.3e}", outcome.grid_accuracy);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
