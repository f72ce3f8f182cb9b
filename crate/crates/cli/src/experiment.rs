use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use freemin_core::descent::minimizer_without_interaction;
use freemin_core::io::fmt_f64;
use freemin_core::{run, stationarity_residual, Density, EnergyTrace, IterateState, Problem};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub trace: EnergyTrace,
    pub state: IterateState,
    pub stationarity_residual: f64,
    pub trace_path: PathBuf,
    pub final_path: PathBuf,
    pub meta_path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub problem: Problem,
    pub trace: EnergyTrace,
    pub state: IterateState,
    pub reference: Density,
    pub stationarity_residual: f64,
}

/// Runs the configured descent from the seeded random density, without I/O.
pub fn solve(config: &ExperimentConfig) -> Result<Solution, CliError> {
    config.validate()?;
    let problem = config.build_problem()?;
    let p0 = Density::random(config.n, config.seed)?;
    let (state, trace) = run(&problem, p0, config.iterations, 0.0)?;
    let stationarity_residual = stationarity_residual(&problem, &state.p)?;
    let reference = minimizer_without_interaction(&problem)?;
    Ok(Solution { problem, trace, state, reference, stationarity_residual })
}

pub fn write_trace_csv<W: Write>(out: W, trace: &EnergyTrace) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["iter", "energy", "error"])?;
    for (k, (e, err)) in trace.energies.iter().zip(&trace.errors).enumerate() {
        w.write_record([k.to_string(), fmt_f64(*e), fmt_f64(*err)])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut out = create(path)?;
    body(&mut out).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

fn csv_to_cli(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Solves and writes `<name>_trace.csv`, `<name>_final.txt` and `<name>_meta.txt`
/// into the configured output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, CliError> {
    let sol = solve(config)?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let trace_path = dir.join(format!("{}_trace.csv", config.name));
    let final_path = dir.join(format!("{}_final.txt", config.name));
    let meta_path = dir.join(format!("{}_meta.txt", config.name));

    write_trace_csv(create(&trace_path)?, &sol.trace).map_err(|e| csv_to_cli(&trace_path, e))?;

    let x = sol.problem.grid().points();
    let mu = sol.problem.mu().as_slice();
    write_file(&final_path, |out| {
        writeln!(out, "index x p mu reference")?;
        for i in 0..config.n {
            writeln!(
                out,
                "{} {} {} {} {}",
                i,
                fmt_f64(x[i]),
                fmt_f64(sol.state.p.as_slice()[i]),
                fmt_f64(mu[i]),
                fmt_f64(sol.reference.as_slice()[i])
            )?;
        }
        Ok(())
    })?;

    let first = sol.trace.first_below(1e-12).map_or("none".to_string(), |k| k.to_string());
    write_file(&meta_path, |out| {
        write!(out, "{config}")?;
        writeln!(out, "# results")?;
        writeln!(out, "# iterations_run = {}", sol.state.k)?;
        writeln!(out, "# final_energy = {}", fmt_f64(*sol.trace.energies.last().unwrap()))?;
        writeln!(out, "# reference_energy = {}", fmt_f64(sol.trace.reference_energy))?;
        writeln!(out, "# final_error = {}", fmt_f64(sol.trace.final_error().unwrap()))?;
        writeln!(out, "# first_iteration_error_le_1e-12 = {first}")?;
        writeln!(out, "# stationarity_residual = {}", fmt_f64(sol.stationarity_residual))
    })?;

    Ok(ExperimentOutcome {
        trace: sol.trace,
        state: sol.state,
        stationarity_residual: sol.stationarity_residual,
        trace_path,
        final_path,
        meta_path,
    })
}

/// Reads a trace CSV written by [`run_experiment`].
pub fn read_trace_csv(path: &Path) -> Result<EnergyTrace, CliError> {
    let bad = |message: String| CliError::BadTrace { path: path.to_path_buf(), message };
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_to_cli(path, e))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["iter", "energy", "error"] {
        return Err(bad(format!("expected header iter,energy,error, got {:?}", headers.as_slice())));
    }
    let mut energies = Vec::new();
    let mut errors = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record[i].parse().map_err(|_| bad(format!("row {}: bad number {:?}", row + 1, &record[i])))
        };
        energies.push(field(1)?);
        errors.push(field(2)?);
    }
    if energies.is_empty() {
        return Err(bad("no rows".into()));
    }
    let reference_energy = energies[0] - errors[0];
    Ok(EnergyTrace { energies, reference_energy, errors })
}
