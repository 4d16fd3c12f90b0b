//! The `netpart` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use netpart_core::{enumerate_optimal, solve_with_cuts, Driver, Error, Parameters, PartitionProblem, SolveMode, SolveStatus};
use serde::Serialize;

use crate::benchmark::{cut_table, run_benchmark, BenchError, BenchmarkConfig};
use crate::generator::{generate_instance, GeneratorConfig};
use crate::network_file::{parse_network, serialize_network};
use crate::scenario::ScenarioBatch;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "netpart", version, about = "Network partitioning with lazy radiality and leader cuts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one network and print the report.
    Solve(SolveArgs),
    /// Solve a batch of demand scenarios in several modes.
    Bench(BenchArgs),
    /// Enumerate every topology of a small network.
    Oracle(OracleArgs),
    /// Write a random network file.
    Generate(GenerateArgs),
    /// Check a network file.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Maximum leaders per active component.
    #[arg(long)]
    kappa: Option<usize>,
    /// Load-shedding weight in [0, 1].
    #[arg(long)]
    nu: Option<f64>,
    /// Priority scale.
    #[arg(long)]
    gamma: Option<f64>,
}

impl Overrides {
    fn apply(&self, mut params: Parameters) -> Parameters {
        if let Some(k) = self.kappa {
            params.kappa = k;
        }
        if let Some(n) = self.nu {
            params.nu = n;
        }
        if let Some(g) = self.gamma {
            params.gamma = g;
        }
        params
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value = "cp-both", value_parser = parse_mode)]
    mode: SolveMode,
    #[arg(long, default_value = "callback", value_parser = parse_driver)]
    driver: Driver,
    #[command(flatten)]
    overrides: Overrides,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Network file. When absent, scenario `m` runs on the instance
    /// generated from seed `seed + m`.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Modes to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "full,cp-radial,cp-gf,cp-both", value_parser = parse_mode)]
    mode: Vec<SolveMode>,
    #[arg(long, default_value = "callback", value_parser = parse_driver)]
    driver: Driver,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, default_value_t = 250)]
    scenarios: usize,
    /// Relative half-width of the demand box.
    #[arg(long, default_value_t = 0.2)]
    rho: f64,
    /// Seed of the first scenario.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Shape of the generated family, used when no network is given.
    #[command(flatten)]
    instance: InstanceArgs,
    /// Worker threads; one per core when absent.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long, default_value_t = 8)]
    blocks: usize,
    /// Fraction of block pairs joined by a switch.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 6)]
    providers: usize,
    #[arg(long, default_value_t = 6)]
    max_leaders: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    network: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    network: PathBuf,
}

fn parse_mode(s: &str) -> Result<SolveMode, String> {
    s.parse()
}

fn parse_driver(s: &str) -> Result<Driver, String> {
    s.parse()
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self { code: EXIT_INPUT, message: message.to_string() }
    }
}

fn core_failure(e: Error) -> Failure {
    let code = match e {
        Error::InvalidProblem(_) | Error::StateSize { .. } | Error::OracleLimit(_) => EXIT_INPUT,
        Error::IterationCap(_) | Error::Contract(_) | Error::Solver(_) => EXIT_INTERNAL,
    };
    Failure { code, message: e.to_string() }
}

fn load(path: &Path, overrides: &Overrides) -> Result<PartitionProblem, Failure> {
    let problem = parse_network(path).map_err(|e| Failure::input(format!("{}: {}", path.display(), e)))?;
    let params = overrides.apply(*problem.params());
    problem.with_params(params).map_err(Failure::input)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure { code: EXIT_INTERNAL, message: format!("{}: {}", path.display(), e) }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })?;
    text.push('\n');
    emit(out, &text)
}

fn generator_config(instance: &InstanceArgs, seed: u64, params: Parameters) -> GeneratorConfig {
    GeneratorConfig {
        blocks: instance.blocks,
        density: instance.density,
        providers: instance.providers,
        max_leaders: instance.max_leaders,
        params,
        seed,
    }
}

fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Solve(args) => {
            let problem = load(&args.network, &args.overrides)?;
            let out = solve_with_cuts(&problem, args.mode, args.driver).map_err(core_failure)?;
            emit_json(&args.out, &out.report)?;
            Ok(if out.report.status == SolveStatus::Infeasible { EXIT_INFEASIBLE } else { EXIT_OK })
        }
        Command::Bench(args) => {
            if !(0.0..=1.0).contains(&args.rho) {
                return Err(Failure::input(format!("rho must lie in [0, 1], got {}", args.rho)));
            }
            let batch = match &args.network {
                Some(path) => ScenarioBatch::new(load(path, &args.overrides)?, args.scenarios, args.rho, args.seed),
                None => {
                    let config = generator_config(&args.instance, args.seed, args.overrides.apply(Parameters::default()));
                    generate_instance(&config).map_err(Failure::input)?;
                    ScenarioBatch::family(config, args.scenarios, args.rho, args.seed)
                }
            };
            let config = BenchmarkConfig { modes: args.mode.clone(), driver: args.driver, threads: args.threads, ..Default::default() };
            let report = run_benchmark(&batch, &config).map_err(|e| match e {
                BenchError::NoModes => Failure { code: EXIT_USAGE, message: e.to_string() },
                BenchError::Solve { source: Error::InvalidProblem(_), .. } | BenchError::Generator { .. } => Failure::input(e),
                _ => Failure { code: EXIT_INTERNAL, message: e.to_string() },
            })?;
            eprint!("{}", cut_table(&report));
            emit_json(&args.out, &report)?;
            Ok(EXIT_OK)
        }
        Command::Oracle(args) => {
            let problem = load(&args.network, &args.overrides)?;
            let result = enumerate_optimal(&problem).map_err(core_failure)?;
            emit_json(&args.out, &result)?;
            Ok(if result.objective.is_none() { EXIT_INFEASIBLE } else { EXIT_OK })
        }
        Command::Generate(args) => {
            let config = generator_config(&args.instance, args.seed, args.overrides.apply(Parameters::default()));
            let problem = generate_instance(&config).map_err(Failure::input)?;
            emit(&args.out, &serialize_network(&problem))?;
            Ok(EXIT_OK)
        }
        Command::Validate(args) => {
            let problem = load(&args.network, &Overrides::default())?;
            println!(
                "valid: {} blocks, {} switches, {} providers, {} eligible leaders",
                problem.num_blocks(),
                problem.num_switches(),
                problem.num_providers(),
                problem.num_leaders()
            );
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
