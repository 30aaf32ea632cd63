//! Argument parsing and subcommand dispatch for the `fujita-lab` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::sweep::{csv_to_gnuplot, run_sweep, SweepPlan, CSV_FILE, GNUPLOT_FILE};
use super::verify::verify;
use super::{load_json, resolve_out_dir, to_json, unix_time, write_json, EXIT_FAILURE, EXIT_INADMISSIBLE, EXIT_OK};
use crate::error::{invalid, Result};
use crate::exponents::exponent_report;
use crate::field::GridGeometry;
use crate::oracles::Lemma;
use crate::problem::ProblemSpec;
use crate::solver::{run_with_state, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "fujita-lab", version, about = "Blow-up and global existence laboratory for a nonlocal semilinear heat equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exponent calculus for a problem.
    Exponents {
        #[arg(long)]
        spec: PathBuf,
        /// Print JSON instead of the key/value table.
        #[arg(long)]
        json: bool,
        /// Also write `exponents.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate one problem and persist the trajectory and final state.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid half-width `L`; the box is `[−L, L]ᴺ`.
        #[arg(long)]
        half_width: Option<f64>,
        /// Grid points per axis, a power of two.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Run a parameter sweep and write the phase diagram.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides the plan.
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write gnuplot-ready data.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Run the oracle suite.
    Verify {
        /// Run a single verifier.
        #[arg(long)]
        lemma: Option<Lemma>,
        /// Also write `verify.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Test hook: give the named verifier an unattainable tolerance.
        #[arg(long, hide = true)]
        inject_fault: Option<Lemma>,
    },
    /// Convert a phase-diagram CSV to gnuplot data.
    Gnuplot {
        #[arg(long)]
        csv: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct RunMetadata {
    started_unix: f64,
    finished_unix: f64,
    version: &'static str,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Exponents { spec, json, out } => cmd_exponents(&spec, json, out.as_deref(), stdout, stderr),
        Command::Simulate { spec, config, out, half_width, points } => {
            cmd_simulate(&spec, &config, out.as_deref(), half_width, points, stdout, stderr)
        }
        Command::Sweep { plan, out, jobs, gnuplot } => cmd_sweep(&plan, out.as_deref(), jobs, gnuplot, stdout),
        Command::Verify { lemma, out, inject_fault } => cmd_verify(lemma, inject_fault, out.as_deref(), stdout),
        Command::Gnuplot { csv, out } => {
            let data = csv_to_gnuplot(fs::File::open(&csv)?)?;
            match out {
                Some(path) => fs::write(path, data)?,
                None => stdout.write_all(data.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_exponents(
    spec: &Path,
    json: bool,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let spec: ProblemSpec = load_json(spec)?;
    let report = exponent_report(&spec);
    if json {
        stdout.write_all(to_json(&report)?.as_bytes())?;
    } else {
        for (k, v) in report.table() {
            writeln!(stdout, "{k}: {v}")?;
        }
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("exponents.json"), &report)?;
    }
    if !report.validation.base_ok {
        writeln!(stderr, "inadmissible parameters: base constraints fail")?;
        return Ok(EXIT_INADMISSIBLE);
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(
    spec_path: &Path,
    config_path: &Path,
    out: Option<&Path>,
    half_width: Option<f64>,
    points: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let spec: ProblemSpec = load_json(spec_path)?;
    let config: SolverConfig = load_json(config_path)?;
    if !spec.validate().base_ok {
        writeln!(stderr, "inadmissible parameters: base constraints fail")?;
        return Ok(EXIT_INADMISSIBLE);
    }
    let default = GridGeometry::default_for(spec.dim)?;
    let geometry = GridGeometry::new(
        spec.dim,
        half_width.unwrap_or(default.half_width),
        points.unwrap_or(default.points_per_axis),
    )?;
    let started = unix_time();
    let run = run_with_state(&spec, &config, geometry)?;
    let dir = resolve_out_dir(out, None);
    fs::create_dir_all(&dir)?;
    write_json(&dir.join("trajectory.json"), &run.record)?;
    run.record.write_csv(fs::File::create(dir.join("trajectory.csv"))?)?;
    run.final_state.write_binary(std::io::BufWriter::new(fs::File::create(dir.join("final_state.bin"))?))?;
    if spec.dim <= 2 {
        run.final_state.write_csv(std::io::BufWriter::new(fs::File::create(dir.join("final_state.csv"))?))?;
    }
    let meta = RunMetadata { started_unix: started, finished_unix: unix_time(), version: env!("CARGO_PKG_VERSION") };
    write_json(&dir.join("metadata.json"), &meta)?;
    let r = &run.record;
    write!(stdout, "verdict: {}\nfinal_time: {}\n", r.verdict, r.final_time())?;
    match r.blowup_time_estimate {
        Some(t) => writeln!(stdout, "blowup_time_estimate: {t}")?,
        None => writeln!(stdout, "blowup_time_estimate: n/a")?,
    }
    writeln!(stdout, "output: {}", dir.display())?;
    Ok(EXIT_OK)
}

fn cmd_sweep(plan_path: &Path, out: Option<&Path>, jobs: Option<usize>, gnuplot: bool, stdout: &mut dyn Write) -> Result<i32> {
    let plan: SweepPlan = load_json(plan_path)?;
    let jobs = jobs.unwrap_or(plan.jobs);
    if jobs == 0 {
        return Err(invalid("--jobs must be ≥ 1"));
    }
    let dir = resolve_out_dir(out, plan.out_dir.as_deref());
    let outcome = run_sweep(&plan, &dir, jobs)?;
    if gnuplot {
        let data = csv_to_gnuplot(fs::File::open(dir.join(CSV_FILE))?)?;
        fs::write(dir.join(GNUPLOT_FILE), data)?;
    }
    stdout.write_all(to_json(&outcome.summary)?.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_verify(lemma: Option<Lemma>, fault: Option<Lemma>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let lemmas: Vec<Lemma> = match lemma {
        Some(l) => vec![l],
        None => Lemma::ALL.to_vec(),
    };
    let report = verify(&lemmas, fault);
    stdout.write_all(to_json(&report)?.as_bytes())?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("verify.json"), &report)?;
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILURE })
}
