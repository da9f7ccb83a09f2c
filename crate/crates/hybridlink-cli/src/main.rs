//! `hybridlink` — fidelity and success-probability calculator for a
//! heralded QD-ion photonic link.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hybridlink::{FigureId, GridScale};
use hybridlink_cli::runner::{self, CliError, GridOverride, Options, OutputFormat, EXIT_USAGE};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

#[derive(Debug, Parser)]
#[command(
    name = "hybridlink",
    version,
    about = "Entanglement fidelity and heralding success for a cavity-QD / trapped-ion link",
    disable_help_subcommand = true
)]
struct Cli {
    /// Key-value config file; defaults to the built-in reference parameters.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for tables, plots, and the manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Table format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Also write an SVG plot next to each table.
    #[arg(long, global = true)]
    plot: bool,

    /// Override the quadrature relative tolerance.
    #[arg(long, global = true, value_name = "REAL")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-scenario report: spectral/recoil/multi-photon fidelity,
    /// success probability, and weak-excitation ratios.
    Eval,
    /// Fidelity vs pulse duration, one curve per atomic detuning.
    Fig3,
    /// Required pulse duration and pump intensity vs atomic detuning.
    Fig4,
    /// Recoil fidelity vs collection angle, one curve per nbar.
    Fig5,
    /// Success probability vs collection angle at the target fidelity.
    Fig6,
    /// Optimal success probability and collection angle vs nbar.
    Fig7,
    /// Any figure sweep with a custom grid.
    Sweep {
        /// Which figure to sweep (fig3..fig7).
        #[arg(long, value_name = "FIG")]
        figure: String,
        #[arg(long, value_name = "REAL")]
        grid_min: Option<f64>,
        #[arg(long, value_name = "REAL")]
        grid_max: Option<f64>,
        #[arg(long, value_name = "N")]
        grid_count: Option<usize>,
        #[arg(long, value_enum, value_name = "SCALE")]
        grid_scale: Option<ScaleArg>,
    },
    /// Weak-excitation validity check; exits nonzero when any verdict fails.
    Check,
}

fn run(cli: Cli) -> Result<runner::Outcome, CliError> {
    let opts = Options {
        config_path: cli.config,
        out_dir: cli.out,
        format: match cli.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
        plot: cli.plot,
        tol: cli.tol,
    };
    let cfg = runner::load_config(&opts)?;

    match cli.command {
        Command::Eval => runner::run_eval(&cfg),
        Command::Fig3 => runner::run_figure(FigureId::Fig3, &cfg, &opts, None),
        Command::Fig4 => runner::run_figure(FigureId::Fig4, &cfg, &opts, None),
        Command::Fig5 => runner::run_figure(FigureId::Fig5, &cfg, &opts, None),
        Command::Fig6 => runner::run_figure(FigureId::Fig6, &cfg, &opts, None),
        Command::Fig7 => runner::run_figure(FigureId::Fig7, &cfg, &opts, None),
        Command::Sweep {
            figure,
            grid_min,
            grid_max,
            grid_count,
            grid_scale,
        } => {
            let figure = FigureId::parse(&figure).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown figure `{figure}`; expected one of fig3, fig4, fig5, fig6, fig7"
                ))
            })?;
            let grid = GridOverride {
                min: grid_min,
                max: grid_max,
                count: grid_count,
                scale: grid_scale.map(|s| match s {
                    ScaleArg::Linear => GridScale::Linear,
                    ScaleArg::Log => GridScale::Log,
                }),
            };
            runner::run_figure(figure, &cfg, &opts, Some(grid))
        }
        Command::Check => runner::run_check(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit 0
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
