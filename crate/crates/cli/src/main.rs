//! Command-line front end: `classify` a developing-map JSON into a
//! singularity report, `verify` the built-in oracle suite, and `sample` a
//! metric onto a CSV grid.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypsing::classify::{classify_singularity, ClassifyConfig, ClassifyError};
use hypsing::devmap::DevelopingMapSpec;
use hypsing::metrics::ConformalMetric;
use hypsing::verify::{run_suite, VerifyConfig};
use hypsing::Complex64;

const EXIT_PARSE: u8 = 1;
const EXIT_CLASSIFY: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "hypsing", version, about = "classify isolated singularities of conformal hyperbolic metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// series truncation order N
    #[arg(long, default_value_t = 32)]
    order: usize,
    /// sampling circle radius
    #[arg(long, default_value_t = 0.25)]
    radius: f64,
    /// circle sample count M (power of two, ≥ 4N)
    #[arg(long, default_value_t = 512)]
    samples: usize,
    /// output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// tolerance override, repeatable: --tol name=value
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a developing-map JSON spec into a singularity report
    Classify {
        /// path to the DevelopingMapSpec JSON
        input: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run the built-in verification suite and emit the pass/fail table
    Verify {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Sample a metric on an annular grid as CSV (re, im, u, density,
    /// curvature_residual)
    Sample {
        /// path to the ConformalMetric JSON
        input: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        /// inner radius of the annular grid
        #[arg(long, default_value_t = 0.25)]
        rmin: f64,
        /// outer radius of the annular grid
        #[arg(long, default_value_t = 0.7)]
        rmax: f64,
        /// radial point count
        #[arg(long, default_value_t = 10)]
        nr: usize,
        /// angular point count
        #[arg(long, default_value_t = 10)]
        ntheta: usize,
        /// finite-difference step for the curvature residual
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

fn parse_tolerances(raw: &[String]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=VALUE, got '{item}'"))?;
        let v: f64 = value.parse().map_err(|_| format!("bad tolerance value '{value}'"))?;
        out.insert(name.to_string(), v);
    }
    Ok(out)
}

fn emit(flags: &RunFlags, content: &str) -> Result<(), String> {
    match &flags.out {
        Some(path) => fs::write(path, content).map_err(|e| format!("write {path:?}: {e}")),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_classify(input: &PathBuf, flags: &RunFlags) -> u8 {
    let cfg = ClassifyConfig {
        order: flags.order,
        radius: flags.radius,
        samples: flags.samples,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_PARSE;
    }
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: read {input:?}: {e}");
            return EXIT_PARSE;
        }
    };
    let map: DevelopingMapSpec = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: parse {input:?}: {e}");
            return EXIT_PARSE;
        }
    };
    match classify_singularity(&map, &cfg) {
        Ok(report) => {
            let mut body = serde_json::to_string_pretty(&report).expect("serializable report");
            body.push('\n');
            if let Err(e) = emit(flags, &body) {
                eprintln!("error: {e}");
                return EXIT_PARSE;
            }
            0
        }
        Err(e @ ClassifyError::BadConfig(_)) => {
            eprintln!("error: {e}");
            EXIT_PARSE
        }
        Err(e) => {
            eprintln!("classification error: {e}");
            EXIT_CLASSIFY
        }
    }
}

fn cmd_verify(flags: &RunFlags) -> u8 {
    let tolerances = match parse_tolerances(&flags.tolerances) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let cfg = VerifyConfig {
        order: flags.order,
        radius: flags.radius,
        samples: flags.samples,
        tolerances,
    };
    let outcome = run_suite(&cfg);
    let mut body = serde_json::to_string_pretty(&outcome).expect("serializable outcome");
    body.push('\n');
    if let Err(e) = emit(flags, &body) {
        eprintln!("error: {e}");
        return EXIT_PARSE;
    }
    if outcome.passed {
        0
    } else {
        EXIT_VERIFY
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    input: &PathBuf,
    flags: &RunFlags,
    rmin: f64,
    rmax: f64,
    nr: usize,
    ntheta: usize,
    step: f64,
) -> u8 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: read {input:?}: {e}");
            return EXIT_PARSE;
        }
    };
    let metric: ConformalMetric = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: parse {input:?}: {e}");
            return EXIT_PARSE;
        }
    };
    if let Err(e) = metric.validate() {
        eprintln!("error: {e}");
        return EXIT_PARSE;
    }
    if nr == 0 || ntheta == 0 || rmin <= 0.0 || rmax < rmin {
        eprintln!("error: bad grid: rmin {rmin}, rmax {rmax}, nr {nr}, ntheta {ntheta}");
        return EXIT_PARSE;
    }
    let mut csv = String::from("re,im,u,density,curvature_residual\n");
    for a in 0..nr {
        let r = if nr == 1 { rmin } else { rmin + (rmax - rmin) * a as f64 / (nr - 1) as f64 };
        for b in 0..ntheta {
            let th = 2.0 * std::f64::consts::PI * b as f64 / ntheta as f64;
            let z = Complex64::from_polar(r, th);
            let row = (|| -> Result<String, String> {
                let u = metric.log_density(z).map_err(|e| e.to_string())?;
                let density = metric.density(z).map_err(|e| e.to_string())?;
                let residual = metric
                    .log_density_gradient_check(z, step)
                    .map_err(|e| e.to_string())?;
                Ok(format!("{},{},{},{},{}\n", z.re, z.im, u, density, residual))
            })();
            match row {
                Ok(line) => csv.push_str(&line),
                Err(e) => {
                    eprintln!("error: at {z}: {e}");
                    return EXIT_PARSE;
                }
            }
        }
    }
    if let Err(e) = emit(flags, &csv) {
        eprintln!("error: {e}");
        return EXIT_PARSE;
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Classify { input, flags } => cmd_classify(input, flags),
        Command::Verify { flags } => cmd_verify(flags),
        Command::Sample { input, flags, rmin, rmax, nr, ntheta, step } => {
            cmd_sample(input, flags, *rmin, *rmax, *nr, *ntheta, *step)
        }
    };
    ExitCode::from(code)
}
