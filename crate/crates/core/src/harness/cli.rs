//! The `wsms` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::config::ScenarioConfig;
use super::output::{emit_csv, emit_json, write_csv};
use super::run::{sweep, Scenario, SweepAxis};
use crate::error::Error;
use crate::estimators::{Method, Support};
use crate::geometry::fraunhofer_distance;
use crate::measurement::{make_combiner, total_coherence, write_combiner_csv, CombinerKind};

#[derive(Debug, Parser)]
#[command(name = "wsms", version, about = "Near-field WSMS channel estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write per-method means.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// One of snr, q, l, n.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values, e.g. -15,-10,-5.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Report zero runtimes so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run one method on one seeded draw.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        seed: u64,
    },
    /// Print dictionary sizes and grids.
    DictInfo {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build a combiner and report its total coherence.
    Combiner {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        seed: u64,
        /// Write the matrix as CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    ScenarioConfig::load(path).map_err(|e| Failure::Usage(e.to_string()))
}

fn usage<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn fmt_list(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
}

/// Parses `args` (including the program name) and runs the command.
/// Returns 0 on success, 1 on usage or config errors, 2 on runtime
/// failures.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    match command {
        Command::Bench { config, axis, values, out: path, format, no_timing } => {
            let cfg = load_config(&config)?;
            let axis: SweepAxis = usage(&axis)?;
            let values = values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Failure::Usage(format!("invalid axis value '{v}'")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let mut result = sweep(&cfg, axis, &values)?;
            if no_timing {
                result.points.iter_mut().for_each(|p| p.mean_runtime_s = 0.0);
            }
            match format {
                Format::Csv => emit_csv(&result, &path)?,
                Format::Json => emit_json(&result, &path)?,
            }
            write_csv(&result, out).map_err(io)?;
        }
        Command::Estimate { config, method, seed } => {
            let cfg = load_config(&config)?;
            let method: Method = usage(&method)?;
            let cfg = ScenarioConfig { methods: vec![method], ..cfg };
            let scenario = Scenario::build(&cfg)?;
            let real = scenario.realize(seed)?;
            let res = scenario.estimate(method, &real)?;
            let support = match &res.support {
                Support::Flat(v) => format!("{v:?}"),
                Support::Pairs(v) => format!("{v:?}"),
                Support::PerSubarray(v) => format!("{v:?}"),
                Support::Oracle => "oracle".into(),
            };
            writeln!(out, "method = {method}").map_err(io)?;
            writeln!(out, "seed = {seed}").map_err(io)?;
            writeln!(out, "true_theta_rad = {}", fmt_list(real.paths.iter().map(|p| p.theta)))
                .map_err(io)?;
            writeln!(out, "true_r_m = {}", fmt_list(real.paths.iter().map(|p| p.r))).map_err(io)?;
            writeln!(out, "support = {support}").map_err(io)?;
            writeln!(out, "theta_hat_rad = {}", fmt_list(res.theta_hat.iter().copied())).map_err(io)?;
            let r_hat = res.r_hat.as_ref().map_or_else(|| "none".into(), |r| fmt_list(r.iter().copied()));
            writeln!(out, "r_hat_m = {r_hat}").map_err(io)?;
            writeln!(out, "nmse = {:e}", res.nmse.unwrap_or(f64::NAN)).map_err(io)?;
            writeln!(out, "elapsed_s = {:e}", res.elapsed).map_err(io)?;
        }
        Command::DictInfo { config } => {
            let cfg = load_config(&config)?;
            let cfg = ScenarioConfig { methods: vec![Method::PdOmp], ..cfg };
            let s = Scenario::build(&cfg)?;
            let (m, n) = (s.array.subarrays, s.array.antennas);
            let (a, c) = (s.angles.len(), s.distances.len());
            writeln!(out, "wavelength_m = {}", s.array.wavelength).map_err(io)?;
            writeln!(out, "subarray_spacing_m = {}", s.array.subarray_spacing).map_err(io)?;
            writeln!(out, "fraunhofer_distance_m = {:.1}", fraunhofer_distance(&s.array)).map_err(io)?;
            writeln!(out, "pd_dictionary = {}x{}", m * n, a * c).map_err(io)?;
            writeln!(out, "angular_dictionary = {n}x{a}").map_err(io)?;
            writeln!(out, "intersub_dictionary = {m}x{}", a * c).map_err(io)?;
            writeln!(out, "pad2d_atoms = {}", a * c).map_err(io)?;
            writeln!(out, "angle_grid_sin = {}", fmt_list(s.angles.sin_values().iter().copied()))
                .map_err(io)?;
            writeln!(out, "distance_grid_mode = {}", s.distances.mode()).map_err(io)?;
            writeln!(out, "distance_grid_m = {}", fmt_list(s.distances.r_values().iter().copied()))
                .map_err(io)?;
            writeln!(out, "scenario_angles = {}", s.path_sines.len()).map_err(io)?;
            writeln!(out, "scenario_distances = {}", s.path_distances.len()).map_err(io)?;
        }
        Command::Combiner { kind, n, q, seed, dump } => {
            let kind: CombinerKind = usage(&kind)?;
            if n == 0 || q == 0 {
                return Err(Failure::Usage("--n and --q must be positive".into()));
            }
            let c = make_combiner(kind, n, q, seed)?;
            if c.is_overcomplete() {
                eprintln!("warning: q = {q} exceeds n = {n}; columns cannot be orthonormal");
            }
            writeln!(out, "kind = {kind}").map_err(io)?;
            writeln!(out, "shape = {n}x{q}").map_err(io)?;
            writeln!(out, "entry_modulus = {:e}", 1.0 / (n as f64).sqrt()).map_err(io)?;
            writeln!(out, "total_coherence = {:e}", total_coherence(&c.w)).map_err(io)?;
            if let Some(path) = dump {
                let mut file = std::fs::File::create(&path)
                    .map_err(|source| Error::Io { path: path.clone(), source })?;
                write_combiner_csv(&c.w, &mut file)
                    .map_err(|source| Error::Io { path: path.clone(), source })?;
            }
        }
    }
    Ok(())
}
