//! `asymnet`: command-line front end for discrete asymptotic nets.
//!
//! Every command reads a net document from a path or stdin (`-` or no path)
//! and prints a short human summary. `--json` prints the machine-readable
//! report instead; `--report PATH` writes it to a file as well.
//!
//! Exit codes: 0 success or predicate true, 1 predicate false, 2 input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "asymnet", version, about = "Discrete asymptotic nets, compatible quadrics and CAMC structure")]
pub struct Cli {
    /// Override every predicate tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the JSON report on stdout instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Net document; `-` or omitted reads stdin.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check planar crosses and non-degeneracy.
    Validate(Input),
    /// Propagate a co-normal field from a seed vector at vertex (0, 0).
    Conormal {
        #[command(flatten)]
        input: Input,
        /// Seed co-normal `x,y,z`; defaults to the oriented unit normal.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        seed: Option<[f64; 3]>,
    },
    /// Compatible quadric field for a black-white parameter.
    Quadrics {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
    },
    /// Solve for the CAMC field, or test a given field.
    Camc {
        #[command(flatten)]
        input: Input,
        /// Test the field whose reference quadrangle has this parameter.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "rho")]
        a: Option<f64>,
        /// Test the field with this black-white parameter.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Run all predicates and name the class of the net.
    Classify(Input),
    /// Coincidence roots on every interior edge of the CAMC field.
    Demoulin(Input),
    /// Write a generated net document.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        /// Output path; stdout when omitted.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Export the compatible field as an OBJ mesh.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Use this black-white parameter instead of the CAMC field.
        #[arg(long)]
        rho: Option<f64>,
        /// OBJ path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Affine minimal net from perturbed planar polylines.
    Minimal {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Polyline perturbation; 0 gives an improper affine sphere.
        #[arg(long, default_value_t = 0.3)]
        magnitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Net sampled from one interpolating quadric.
    Sphere {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        /// Parameter values `u0,u1,...` (also used for v unless --vgrid).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.5, 1.0])]
        grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        vgrid: Option<Vec<f64>>,
    },
    /// Two quadrangles in canonical position.
    Pair {
        #[arg(long, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, allow_hyphen_values = true)]
        y1: f64,
        #[arg(long, allow_hyphen_values = true)]
        x2: f64,
        #[arg(long, allow_hyphen_values = true)]
        y2: f64,
    },
    /// Generic net from random Moutard data.
    Moutard {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        spread: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected 3 components, found {}", v.len()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
