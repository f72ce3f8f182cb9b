use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freemin_cli::{
    emit_svg_plot, list_presets, parse_config, preset_config, read_trace_csv, run_experiment, CliError,
    ExperimentConfig, PlotKind,
};

#[derive(Parser)]
#[command(name = "freemin", version, about = "Mirror descent for interacting free energies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Run a shipped preset.
    Preset {
        name: String,
        /// Output directory, overriding the preset's.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the shipped presets.
    Presets,
    /// Plot a trace CSV as SVG.
    Plot {
        trace: PathBuf,
        #[arg(long)]
        kind: PlotKind,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(config: &ExperimentConfig) -> Result<(), CliError> {
    let outcome = run_experiment(config)?;
    println!(
        "{}: {} iterations, final error {:.3e}, stationarity residual {:.3e}",
        config.name,
        outcome.state.k,
        outcome.trace.final_error().unwrap_or(f64::NAN),
        outcome.stationarity_residual
    );
    for path in [&outcome.trace_path, &outcome.final_path, &outcome.meta_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_config(&text)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => load(&config).and_then(|c| execute(&c)),
        Command::Preset { name, out } => preset_config(&name).and_then(|mut c| {
            if let Some(dir) = out {
                c.output_dir = dir;
            }
            execute(&c)
        }),
        Command::Presets => {
            print!("{}", list_presets());
            Ok(())
        }
        Command::Plot { trace, kind, out } => read_trace_csv(&trace).and_then(|t| emit_svg_plot(&t, kind, &out)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
