#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normsphere::checks::LemmaKind;
use normsphere::LinearMap2x2;

use commands::Failure;

/// Unit spheres of normed planes: parameterizations, jumps, lemma checks
/// and linear extension of sphere isometries. Reports are CSV.
#[derive(Debug, Parser)]
#[command(name = "normsphere", version)]
struct Cli {
    /// Write the CSV report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Args)]
struct Specs {
    /// Norm spec file; repeat for several norms.
    #[arg(long = "spec", value_name = "PATH", required = true)]
    paths: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct OneSpec {
    /// Norm spec file.
    #[arg(long = "spec", value_name = "PATH")]
    path: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Sampled norm axioms and convexity of each spec.
    Validate {
        #[command(flatten)]
        specs: Specs,
        /// Directions in the axiom grid.
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Polar parameterization `t, p1, p2, s`, or with --natural the natural
    /// one with one-sided derivatives.
    ParamTable {
        #[command(flatten)]
        spec: OneSpec,
        /// Uniform grid points per period.
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long)]
        natural: bool,
    },
    /// Half-length L of each sphere.
    HalfLength {
        #[command(flatten)]
        specs: Specs,
    },
    /// Jumps (jr, jt) on a uniform grid of the natural parameter.
    Jumps {
        #[command(flatten)]
        spec: OneSpec,
        #[arg(long, default_value_t = 128)]
        samples: usize,
    },
    /// Non-smooth points found by a derivative-gap scan.
    Nonsmooth {
        #[command(flatten)]
        spec: OneSpec,
        /// Coarse scan resolution.
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// Derivative gap that flags a point.
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
    /// Runs one lemma suite on each spec.
    Check {
        #[command(flatten)]
        specs: Specs,
        #[arg(long, value_name = "p|d|a|jj|xy|ns|sd")]
        lemma: LemmaKind,
    },
    /// Restricts a linear map to the sphere and recovers it from two
    /// independent corners.
    Extend {
        #[command(flatten)]
        spec: OneSpec,
        #[arg(long, value_name = "a,b,c,d", value_parser = parse_matrix, allow_hyphen_values = true)]
        matrix: LinearMap2x2,
        /// Table rows for a sampled map; 0 keeps the map exact.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Recovers a linear map from its restriction to a sphere with exactly
    /// two corners.
    Reconstruct {
        #[command(flatten)]
        spec: OneSpec,
        #[arg(long, value_name = "a,b,c,d", value_parser = parse_matrix, allow_hyphen_values = true)]
        matrix: LinearMap2x2,
        /// Table rows for a sampled map; 0 keeps the map exact.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Polyline arc length of the upper half-sphere against L.
    Oracle {
        #[command(flatten)]
        specs: Specs,
        /// Polyline segments.
        #[arg(long, default_value_t = normsphere::oracles::ARCLENGTH_N)]
        samples: usize,
    },
}

fn parse_matrix(text: &str) -> Result<LinearMap2x2, String> {
    normsphere::specfile::parse_matrix(text).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.into())
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let report = match cli.verb {
        Verb::Validate { specs, samples } => commands::validate(&specs.paths, samples)?,
        Verb::ParamTable {
            spec,
            samples,
            natural,
        } => commands::param_table(&spec.path, samples, natural)?,
        Verb::HalfLength { specs } => commands::half_length(&specs.paths)?,
        Verb::Jumps { spec, samples } => commands::jumps(&spec.path, samples)?,
        Verb::Nonsmooth {
            spec,
            samples,
            threshold,
        } => commands::nonsmooth(&spec.path, samples, threshold)?,
        Verb::Check { specs, lemma } => commands::check(&specs.paths, lemma)?,
        Verb::Extend {
            spec,
            matrix,
            samples,
        } => commands::extend(&spec.path, matrix, samples)?,
        Verb::Reconstruct {
            spec,
            matrix,
            samples,
        } => commands::reconstruct(&spec.path, matrix, samples)?,
        Verb::Oracle { specs, samples } => commands::oracle(&specs.paths, samples)?,
    };
    report.emit(cli.out.as_deref())?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("normsphere: check failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("normsphere: {f}");
            ExitCode::from(f.code())
        }
    }
}
