use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Deserialize;

use triple_lab::derivations::{local_derivation_residual, local_points, DEFAULT_LOCAL_SAMPLES};
use triple_lab::repro::{render_markdown, repro_all, ReproOptions, SuiteConfig};
use triple_lab::sampling::parse_seed;
use triple_lab::structure::{check_peirce_arithmetic, peirce};
use triple_lab::triple::{read_system, write_system};
use triple_lab::{
    build_factor, derivation_space, DerivationKind, FactorSpec, LinearMap, Report, Result,
    TripleError, TripleSystem,
};

const DEFAULT_SEED: u64 = 0xA11CE;

#[derive(Parser)]
#[command(name = "triple-lab", version, about = "Jordan triple systems: factors, derivations, local checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build Cartan factors.
    #[command(subcommand)]
    Factor(FactorCmd),
    /// Peirce decompositions.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Derivation spaces and local checks.
    #[command(subcommand)]
    Der(DerCmd),
    /// Run the reproduction suite.
    #[command(subcommand)]
    Repro(ReproCmd),
}

#[derive(Subcommand)]
enum FactorCmd {
    /// Write a factor's structure tensor as JSON.
    Build {
        /// I_R, I_C, I_H, II_R, II_C, II_H, III_R, III_H, SPIN_R or SPIN_C.
        #[arg(long)]
        kind: String,
        /// Comma-separated dimensions, e.g. `2,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum StructureCmd {
    /// Peirce projections of a tripotent.
    Peirce {
        #[command(flatten)]
        factor: FactorArg,
        /// A basis index, or comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        tripotent: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DerCmd {
    /// Basis of a derivation space.
    Compute {
        #[command(flatten)]
        factor: FactorArg,
        /// triple, symmetrized or inner.
        #[arg(long)]
        kind: DerivationKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampled test of whether a map is a local triple derivation.
    CheckLocal {
        #[command(flatten)]
        factor: FactorArg,
        /// JSON map: `{"dim": n, "entries": [...]}` or a list of rows.
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LOCAL_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
        seed: u64,
        #[arg(long, default_value_t = triple_lab::derivations::LOCAL_TOL)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReproCmd {
    /// Every statement over the suite.
    All {
        #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        markdown: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
        /// Corrupt one tensor entry of the first suite factor.
        #[arg(long)]
        fault: bool,
        /// Suite config; defaults to the bundled suite.
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Record wall-clock times (the report is then not byte-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args)]
struct FactorArg {
    /// A factor JSON file, or a spec such as `I_C(2,1)`.
    #[arg(long)]
    factor: String,
}

impl FactorArg {
    fn load(&self) -> Result<TripleSystem> {
        let path = Path::new(&self.factor);
        if path.exists() {
            return read_system(path);
        }
        build_factor(self.factor.parse::<FactorSpec>()?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    Map(LinearMap),
    Rows(Vec<Vec<f64>>),
}

fn read_map(path: &Path) -> Result<LinearMap> {
    let text = std::fs::read_to_string(path)?;
    match serde_json::from_str::<MapFile>(&text)? {
        MapFile::Map(m) => LinearMap::new(m.dim(), m.entries().to_vec()),
        MapFile::Rows(rows) => {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(TripleError::InvalidInput("map rows must form a square matrix".into()));
            }
            LinearMap::new(n, rows.concat())
        }
    }
}

fn tripotent_coords(system: &TripleSystem, arg: &str) -> Result<Vec<f64>> {
    if let Ok(i) = arg.trim().parse::<usize>() {
        if i >= system.dim() {
            return Err(TripleError::InvalidInput(format!(
                "basis index {i} out of range for dimension {}",
                system.dim()
            )));
        }
        return Ok(system.basis_element(i).into_coords());
    }
    arg.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| TripleError::InvalidInput(format!("bad coordinate {t:?}: {e}")))
        })
        .collect()
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn emit(report: &Report, path: Option<&Path>) -> Result<ExitCode> {
    let json = serde_json::to_string_pretty(report)?;
    match path {
        Some(p) => std::fs::write(p, &json)?,
        None => println!("{json}"),
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Factor(FactorCmd::Build { kind, dims, out }) => {
            let spec = FactorSpec::from_kind_dims(&kind, &dims)?;
            let s = build_factor(spec)?;
            write_system(&s, &out)?;
            info!("wrote {} (dimension {}) to {}", s.name(), s.dim(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Structure(StructureCmd::Peirce {
            factor,
            tripotent,
            report,
        }) => {
            let s = factor.load()?;
            let e = s.element(tripotent_coords(&s, &tripotent)?)?;
            let dims = peirce(&e)?.dims();
            let mut r = check_peirce_arithmetic(&e)?;
            r.residual("dim_p2", dims[2] as f64);
            r.residual("dim_p1", dims[1] as f64);
            r.residual("dim_p0", dims[0] as f64);
            println!("Peirce dimensions (2, 1, 0): ({}, {}, {})", dims[2], dims[1], dims[0]);
            emit(&r, report.as_deref())
        }
        Command::Der(DerCmd::Compute { factor, kind, out }) => {
            let s = factor.load()?;
            let der = derivation_space(&s, kind)?;
            write_json(&out, &der)?;
            println!("{kind} derivations of {}: dimension {}", s.name(), der.dim());
            Ok(ExitCode::SUCCESS)
        }
        Command::Der(DerCmd::CheckLocal {
            factor,
            map,
            samples,
            seed,
            tol,
            report,
        }) => {
            let s = factor.load()?;
            let t = read_map(&map)?;
            let der = derivation_space(&s, DerivationKind::Triple)?;
            let pts = local_points(&s, samples, seed);
            let r = local_derivation_residual(&der, &t, &pts, tol)?.with_seed(seed);
            emit(&r, report.as_deref())
        }
        Command::Repro(ReproCmd::All {
            seed,
            out,
            markdown,
            parallel,
            fault,
            suite,
            timings,
        }) => {
            let config = match suite {
                Some(p) => SuiteConfig::from_file(&p)?,
                None => SuiteConfig::standard(),
            };
            let options = ReproOptions {
                parallel,
                fault,
                timings,
            };
            let report = repro_all(seed, &config, options)?;
            std::fs::write(&out, report.to_json())?;
            if let Some(md) = markdown {
                std::fs::write(md, render_markdown(&report))?;
            }
            println!(
                "{} passed, {} failed, {} advisory",
                report.passed, report.failed, report.advisory
            );
            for r in report.statements.iter().filter(|r| r.status == triple_lab::Status::Fail) {
                println!("FAIL {}", r.statement_id);
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var("TRIPLE_LAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    warn!("could not size the thread pool: {e}");
                }
            }
            _ => warn!("ignoring TRIPLE_LAB_THREADS={v:?}"),
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
