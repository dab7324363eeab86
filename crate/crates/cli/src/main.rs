use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use vortexlab::bubbling::{check_convergence, extract_bubble_tree, BubblingError, ConfigurationFamily, MobiusFamily};
use vortexlab::index_maslov::{fredholm_index, maslov_index, IndexData, MaslovError, SymplecticLoop};
use vortexlab::stable_maps::BubbleTree;
use vortexlab::vortex::{default_probe_radius, export, local_degrees, solve_vortex, SolverError, SolverParams, ZeroConfig};
use vortexlab::weighted::{dbar_kernel_check, hardy_check, Domain, GridFunction, WeightParams};
use vortexlab::Complex64;

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Extraction(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Extraction(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NonConvergence(_) => Failure::Solver(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<MaslovError> for Failure {
    fn from(e: MaslovError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<BubblingError> for Failure {
    fn from(e: BubblingError) -> Self {
        match e {
            BubblingError::InvalidFamily(_) | BubblingError::SizeMismatch(_) => Failure::Validation(e.to_string()),
            BubblingError::AmbiguousExponents { .. } | BubblingError::UnstableLimit { .. } => {
                Failure::Extraction(e.to_string())
            }
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

#[derive(Parser)]
#[command(name = "vortexlab", version, about = "Ginzburg-Landau vortices, bubble trees and indices")]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = vortexlab_acceptance::DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the vortex equations for a zero configuration.
    Solve {
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        /// Write every k-th node to the CSV dump.
        #[arg(long, default_value_t = 4)]
        stride: usize,
    },
    /// Solve and recover the zeros with their local degrees.
    Degrees {
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        probe: Option<f64>,
    },
    /// Extract the limit bubble tree of a configuration family.
    Tree {
        #[arg(long)]
        family: PathBuf,
    },
    /// Check convergence of a family to a tree under given reparametrizations.
    Check {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        maps: PathBuf,
    },
    /// Maslov index of a unitary loop.
    Maslov {
        #[arg(long, value_enum)]
        family: Option<LoopFamily>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Exponents for the diagonal family.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        degrees: Vec<i64>,
        /// Loop JSON instead of a built-in family.
        #[arg(long = "loop", conflicts_with = "family")]
        loop_file: Option<PathBuf>,
    },
    /// Evaluate the Fredholm index formula.
    Index {
        #[arg(long = "dimM")]
        dim_m: u32,
        #[arg(long = "dimG")]
        dim_g: u32,
        #[arg(long, allow_hyphen_values = true)]
        chern: i64,
    },
    /// Check the weighted Hardy inequality on a grid function.
    Hardy {
        #[arg(long = "fn", value_enum, default_value_t = HardyFunction::Bracket)]
        function: HardyFunction,
        /// Real grid function CSV (x,y,v0) on a disk.
        #[arg(long, conflicts_with = "function")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 12.0)]
        radius: f64,
        #[arg(long, default_value_t = 240)]
        grid: usize,
    },
    /// Account for the kernel of the weighted d-bar operator.
    Kernel {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LoopFamily {
    ZdId,
    Diag,
    Const,
}

#[derive(Clone, Copy, ValueEnum)]
enum HardyFunction {
    Const,
    Bracket,
    Dipole,
    Bump,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String, Failure> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(dir.join(name), &text)?;
    Ok(text)
}

fn params(config: &ZeroConfig, grid: Option<usize>, radius: Option<f64>) -> SolverParams {
    let mut p = SolverParams::for_config(config);
    if let Some(n) = grid {
        p = p.with_grid(n);
    }
    if let Some(r) = radius {
        p = p.with_radius(r);
    }
    p
}

#[derive(Serialize)]
struct MaslovOutput {
    dim: usize,
    samples: usize,
    maslov_index: i64,
}

#[derive(Serialize)]
struct IndexOutput {
    data: IndexData,
    fredholm_index: i64,
}

fn bracket(z: Complex64) -> f64 {
    (1.0 + z.norm_sqr()).sqrt()
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let out = cli.out.as_path();
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Solve { zeros, grid, radius, stride } => {
            let config: ZeroConfig = read_json(&zeros)?;
            let sol = solve_vortex(&config, &params(&config, grid, radius))?;
            fs::create_dir_all(out)?;
            export::write_csv(&sol, stride, fs::File::create(out.join("solution.csv"))?)?;
            stdout.write_all(write_json(out, "summary.json", &export::summary(&sol))?.as_bytes())?;
        }
        Command::Degrees { zeros, grid, probe } => {
            let config: ZeroConfig = read_json(&zeros)?;
            let sol = solve_vortex(&config, &params(&config, grid, None))?;
            let found = local_degrees(&sol, probe.unwrap_or_else(|| default_probe_radius(&sol))).map_err(invalid)?;
            stdout.write_all(write_json(out, "degrees.json", &found)?.as_bytes())?;
        }
        Command::Tree { family } => {
            let family: ConfigurationFamily = read_json(&family)?;
            let extraction = extract_bubble_tree(&family)?;
            write_json(out, "reparams.json", &extraction.reparams)?;
            write_json(out, "extraction.json", &extraction.report)?;
            let report = check_convergence(&family, &extraction.tree, &extraction.reparams)?;
            write_json(out, "convergence.json", &report)?;
            stdout.write_all(write_json(out, "tree.json", &extraction.tree)?.as_bytes())?;
            writeln!(stdout, "{}\n{report}", extraction.report)?;
        }
        Command::Check { family, tree, maps } => {
            let family: ConfigurationFamily = read_json(&family)?;
            let tree: BubbleTree = read_json(&tree)?;
            let maps: MobiusFamily = read_json(&maps)?;
            let report = check_convergence(&family, &tree, &maps)?;
            write_json(out, "convergence.json", &report)?;
            writeln!(stdout, "{report}")?;
            if !report.passed() {
                return Ok(1);
            }
        }
        Command::Maslov { family, d, n, degrees, loop_file } => {
            let lp = match (loop_file, family) {
                (Some(path), _) => read_json::<SymplecticLoop>(&path)?,
                (None, Some(LoopFamily::Diag)) if !degrees.is_empty() => SymplecticLoop::diag(&degrees)?,
                (None, Some(LoopFamily::Diag)) => SymplecticLoop::diag(&vec![d; n])?,
                (None, Some(LoopFamily::Const)) => SymplecticLoop::diag(&vec![0; n])?,
                (None, Some(LoopFamily::ZdId) | None) => SymplecticLoop::zd_id(d, n)?,
            };
            let result = MaslovOutput { dim: lp.dim(), samples: lp.samples().len(), maslov_index: maslov_index(&lp)? };
            stdout.write_all(write_json(out, "maslov.json", &result)?.as_bytes())?;
        }
        Command::Index { dim_m, dim_g, chern } => {
            let data = IndexData::new(dim_m, dim_g, chern)?;
            let result = IndexOutput { data, fredholm_index: fredholm_index(&data) };
            stdout.write_all(write_json(out, "index.json", &result)?.as_bytes())?;
        }
        Command::Hardy { function, input, p, lambda, radius, grid } => {
            let w = WeightParams::new(p, lambda).map_err(invalid)?;
            let u = match input {
                Some(path) => {
                    let file = fs::File::open(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                    GridFunction::read_csv(file, Domain::Disk).map_err(invalid)?
                }
                None => {
                    let origin = Complex64::new(0.0, 0.0);
                    let f = move |z: Complex64| match function {
                        HardyFunction::Const => 1.0,
                        HardyFunction::Bracket => bracket(z).powi(-2),
                        HardyFunction::Dipole => z.re / bracket(z).powi(3),
                        HardyFunction::Bump => {
                            let r2 = (z / 3.0).norm_sqr();
                            if r2 < 1.0 { (-1.0 / (1.0 - r2)).exp() } else { 0.0 }
                        }
                    };
                    GridFunction::real(origin, radius, grid, Domain::Disk, f).map_err(invalid)?
                }
            };
            let report = hardy_check(&u, &w).map_err(invalid)?;
            stdout.write_all(write_json(out, "hardy.json", &report)?.as_bytes())?;
        }
        Command::Kernel { d, p, lambda } => {
            let w = WeightParams::new(p, lambda).map_err(invalid)?;
            let template = GridFunction::real(Complex64::new(0.0, 0.0), 1.0, 24, Domain::Square, |_| 0.0)
                .map_err(invalid)?;
            let report = dbar_kernel_check(d, &w, &template).map_err(invalid)?;
            stdout.write_all(write_json(out, "kernel.json", &report)?.as_bytes())?;
        }
        Command::Selftest { only } => {
            let outcomes = match only {
                Some(k) => vec![vortexlab_acceptance::run(k, cli.seed)
                    .ok_or_else(|| invalid(format!("no criterion {k}")))?],
                None => vortexlab_acceptance::run_all(cli.seed),
            };
            for o in &outcomes {
                writeln!(stdout, "{o}")?;
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("VORTEXLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
