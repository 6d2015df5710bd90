use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracton::exec::Execution;

mod cache;
mod commands;
mod error;
mod report;

use cache::Cache;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "fracton", version, about = "Translation-invariant two-block CSS codes: lifts, instances, distances, barriers")]
struct Cli {
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Neither read nor write the report cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads; 1 runs every search sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Code description file.
    #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
    pub spec: Option<PathBuf>,
    /// Use a bundled fixture instead of a file.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Replace the boundary with these periods, e.g. `--periodic 4,4`.
    #[arg(long, value_delimiter = ',')]
    pub periodic: Option<Vec<i64>>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMethodArg {
    Auto,
    Exact,
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorArg {
    X,
    Z,
    Both,
    FourWay,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixArg {
    Hx,
    Hz,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Coo,
    Mtx,
}

#[derive(Args, Debug, Clone)]
pub struct DistanceOpts {
    /// Information-set trials for the randomized search.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Largest `n` for exact enumeration.
    #[arg(long, default_value_t = fracton::distance::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, value_enum, default_value_t = DistanceMethodArg::Auto)]
    pub method: DistanceMethodArg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Indecomposability of the code, and of its finite instance.
    Check(Input),
    /// Family-tree parity class.
    Classify(Input),
    /// Parent hypergraph product, substitutions and twists.
    Lift {
        #[command(flatten)]
        input: Input,
        /// Also write the lift as a code file.
        #[arg(long)]
        emit_spec: Option<PathBuf>,
    },
    /// Apply a file's [lift] data to its parent.
    Compactify {
        #[command(flatten)]
        input: Input,
        /// Apply the file's [erratum] replacements.
        #[arg(long)]
        erratum: bool,
    },
    /// Build check matrices on the file's boundary.
    Instantiate(Input),
    /// `n`, `k` and a distance estimate.
    Params {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        distance: DistanceOpts,
    },
    /// Minimum distance, exact or randomized.
    Distance {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        distance: DistanceOpts,
    },
    /// Exact energy barrier.
    Barrier {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = fracton::barrier::DEFAULT_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = SectorArg::Both)]
        sector: SectorArg,
        /// Include the flip sequences in the report.
        #[arg(long)]
        emit_path: bool,
    },
    /// Dimension-dependent distance scaling statements.
    Bounds {
        #[command(flatten)]
        input: Input,
        /// Qubit count to plug in; defaults to the instance size.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Replay the bundled compactification table.
    ReproduceAppendix {
        /// Exit with status 1 unless every row passes as printed.
        #[arg(long)]
        strict: bool,
    },
    /// Write a check matrix in a sparse text format.
    ExportMatrix {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = MatrixArg::Hx)]
        matrix: MatrixArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Mtx)]
        format: FormatArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

pub struct Context {
    pub seed: u64,
    pub exec: Execution,
}

type Compute = Box<dyn FnOnce() -> Result<report::ReportDocument, CliError>>;

fn run(cli: Cli) -> Result<(report::ReportDocument, bool), CliError> {
    let exec = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(1) => Execution::Sequential,
        Some(t) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    let ctx = Context { seed: cli.seed, exec };
    let cache = Cache::from_env(cli.no_cache);
    let start = Instant::now();
    let mut strict_failure = false;
    let (material, compute): (Option<String>, Compute) =
        match cli.command {
            Command::Check(input) => {
                let spec = commands::load(&input)?;
                (Some(commands::material("check", &spec, "")), Box::new(move || commands::check(&spec)))
            }
            Command::Classify(input) => {
                let spec = commands::load(&input)?;
                (None, Box::new(move || commands::classify(&spec)))
            }
            Command::Lift { input, emit_spec } => {
                let spec = commands::load(&input)?;
                let rep = commands::lift(&spec)?;
                if let (Some(path), Some(l)) = (&emit_spec, &rep.lift) {
                    std::fs::write(path, &l.lift_spec).map_err(|e| CliError::Io(path.display().to_string(), e))?;
                }
                (None, Box::new(move || Ok(rep)))
            }
            Command::Compactify { input, erratum } => {
                let spec = commands::load(&input)?;
                (None, Box::new(move || commands::compactify(&spec, erratum)))
            }
            Command::Instantiate(input) => {
                let spec = commands::load(&input)?;
                (
                    Some(commands::material("instantiate", &spec, "")),
                    Box::new(move || commands::instantiate(&spec)),
                )
            }
            Command::Params { input, distance } => {
                let spec = commands::load(&input)?;
                let key = commands::material("params", &spec, &commands::distance_params(&distance, &ctx));
                (Some(key), Box::new(move || commands::params(&spec, &distance, &ctx)))
            }
            Command::Distance { input, distance } => {
                let spec = commands::load(&input)?;
                let key = commands::material("distance", &spec, &commands::distance_params(&distance, &ctx));
                (Some(key), Box::new(move || commands::distance(&spec, &distance, &ctx)))
            }
            Command::Barrier {
                input,
                cap,
                sector,
                emit_path,
            } => {
                let spec = commands::load(&input)?;
                let key = commands::material("barrier", &spec, &format!("cap={cap} sector={sector:?} path={emit_path}"));
                (Some(key), Box::new(move || commands::barrier(&spec, cap, sector, emit_path, &ctx)))
            }
            Command::Bounds { input, n } => {
                let spec = commands::load(&input)?;
                (None, Box::new(move || commands::bounds(&spec, n)))
            }
            Command::ReproduceAppendix { strict } => {
                let rep = commands::reproduce_appendix()?;
                strict_failure = strict && !rep.appendix.as_ref().is_some_and(|a| a.all_pass_literal);
                (None, Box::new(move || Ok(rep)))
            }
            Command::ExportMatrix {
                input,
                matrix,
                format,
                output,
            } => {
                let spec = commands::load(&input)?;
                (None, Box::new(move || commands::export_matrix(&spec, matrix, format, output.as_deref())))
            }
        };

    let key = material.map(|m| Cache::key(&m));
    let mut report = match key.as_deref().and_then(|k| cache.get(k)) {
        Some(mut hit) => {
            hit.timing.cached = true;
            hit
        }
        None => {
            let rep = compute()?;
            if let Some(k) = &key {
                cache.put(k, &rep);
            }
            rep
        }
    };
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((report, strict_failure))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok((report, strict_failure)) => {
            let text = if json {
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
            } else {
                report.to_string()
            };
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(u8::from(strict_failure))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
