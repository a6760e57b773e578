mod commands;
mod error;
mod output;
mod plot;
mod source;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{usage, CliError, CliResult};
use output::{emit, RunManifest};
use source::{ChannelSource, Family};
use sweep::{Setting, SweepSpec};

#[derive(Parser, Debug)]
#[command(
    name = "qexp",
    version,
    about = "Error exponents, capacity bounds and small stabilizer-code simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Output file; stdout when absent. A manifest is written to `<FILE>.manifest.json`.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Input {
    /// Channel file (JSON Kraus operators).
    #[arg(long, value_name = "FILE")]
    channel: Option<PathBuf>,
    /// Built-in channel family instead of a file.
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Grid `VAR:START:STOP:STEP` with VAR one of R, p, gamma; repeatable,
    /// the first sweep varies slowest.
    #[arg(long, value_name = "SPEC")]
    sweep: Vec<SweepSpec>,
    /// Fixed parameter `KEY=VALUE` (R, p, gamma, d, n, k).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<Setting>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E(R, P_A) over a grid: R, E, H_Qstar, active_branch.
    Exponent {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Capacity lower bound, p' and the rival bound over a grid.
    Bounds {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Random starts of the p' search.
        #[arg(long, default_value_t = qexp::exponent::DEFAULT_STARTS)]
        starts: usize,
    },
    /// Fidelities of every syndrome code of a stabilizer under the channel.
    Simulate {
        #[arg(long, value_name = "FILE")]
        stabilizer: PathBuf,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Random starts of the fidelity searches.
        #[arg(long, default_value_t = 32)]
        starts: usize,
        /// Sum the bound over the coset leaders alone instead of leaders + stabilizer.
        #[arg(long)]
        leaders_only: bool,
    },
    /// Runs the invariant batteries; one line per invariant.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Prints a gnuplot script for a CSV produced by `exponent` or `bounds`.
    PlotScript {
        #[arg(long, value_enum)]
        figure: plot::Figure,
        /// CSV file the script reads.
        #[arg(long, value_name = "FILE")]
        data: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| usage(format!("cannot start {jobs} workers: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Exponent { input, common } => {
            let source = ChannelSource::resolve(input.channel.as_deref(), input.family)?;
            let table = pool(common.jobs)?
                .install(|| commands::exponent(&source, &input.sweep, &input.set))?;
            let manifest = RunManifest::new("exponent", None, &source.input_files())?;
            emit(&table.render(), common.out.as_deref(), &manifest)
        }
        Command::Bounds {
            input,
            common,
            starts,
        } => {
            let source = ChannelSource::resolve(input.channel.as_deref(), input.family)?;
            let table = pool(common.jobs)?.install(|| {
                commands::bounds(&source, &input.sweep, &input.set, starts, common.seed)
            })?;
            let manifest = RunManifest::new("bounds", Some(common.seed), &source.input_files())?;
            emit(&table.render(), common.out.as_deref(), &manifest)
        }
        Command::Simulate {
            stabilizer,
            input,
            common,
            starts,
            leaders_only,
        } => {
            if starts == 0 {
                return Err(usage("--starts must be at least 1"));
            }
            let source = ChannelSource::resolve(input.channel.as_deref(), input.family)?;
            let text = std::fs::read_to_string(&stabilizer)
                .map_err(|e| usage(format!("cannot read {}: {e}", stabilizer.display())))?;
            let table = pool(common.jobs)?.install(|| {
                commands::simulate(
                    &source,
                    &text,
                    &input.sweep,
                    &input.set,
                    !leaders_only,
                    starts,
                    common.seed,
                )
            })?;
            let mut inputs = source.input_files();
            inputs.push(stabilizer);
            let manifest = RunManifest::new("simulate", Some(common.seed), &inputs)?;
            emit(&table.render(), common.out.as_deref(), &manifest)
        }
        Command::Verify { suite, common } => {
            let lines = pool(common.jobs)?.install(|| verify::run(suite, common.seed));
            let table = verify::table(&lines);
            let manifest = RunManifest::new("verify", Some(common.seed), &[])?;
            emit(&table.render(), common.out.as_deref(), &manifest)?;
            let failed = lines.iter().filter(|l| !l.passed()).count();
            if failed > 0 {
                return Err(CliError::Failed(failed));
            }
            Ok(())
        }
        Command::PlotScript { figure, data, out } => {
            let manifest = RunManifest::new("plot-script", None, &[])?;
            emit(&plot::script(figure, &data), out.as_deref(), &manifest)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qexp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
