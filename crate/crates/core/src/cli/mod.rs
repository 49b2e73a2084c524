//! The `qsig` command line.
//!
//! Exit status: 0 success, 1 conjecture counterexample, 2 inadmissible
//! parameters, 64 usage error, 74 output error. Documents carry a
//! `schema_version`; every command is deterministic for fixed flags and seed.

mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    self, figures_of_merit, forgery_reject_probability, genuine_accept_probability, qubits_per_bit,
    repudiation_probability, set_parameters_with, OutcomeDistribution, SettingsOptions,
    SweepConfig, XAxis,
};
use crate::coding::CodeSpec;
use crate::conjecture::{self, Monotonicity};
use crate::gc::{gc_report, GcParams};
use crate::protocol::{run_trials, Engine, Scenario, SchemeParams};
use crate::Error;

pub use format::{format_number, json_to_csv, sweep_to_csv};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

const REPUDIATION_NOTE: &str =
    "repudiation_bound omits the 1 + O(alpha) factor of the underlying estimate";

#[derive(Debug, Parser)]
#[command(
    name = "qsig",
    version,
    about = "Simulation and analysis of a fingerprint-based quantum signature scheme"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive secure parameters and figures of merit.
    Params(ParamsArgs),
    /// Monte Carlo runs of genuine, forged or repudiated signatures.
    Simulate(SimulateArgs),
    /// Qubit cost against the baseline over a range of dimensions.
    Sweep(SweepArgs),
    /// Exact check of the shell-weight monotonicity conjecture.
    Conjecture(ConjectureArgs),
    /// Gottesman-Chuang baseline figures.
    Gc(GcArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub d: u64,
    #[arg(long = "T")]
    pub verifiers: u32,
    #[arg(long, default_value_t = 0.2)]
    pub nu: f64,
    #[arg(long = "eps-c", default_value_t = 1e-9)]
    pub eps_c: f64,
    #[arg(long = "eps-f", default_value_t = 1e-12)]
    pub eps_f: f64,
    /// Drop the finite-size term from p1.
    #[arg(long)]
    pub no_correction: bool,
}

impl SchemeArgs {
    fn derive(&self) -> crate::Result<SchemeParams> {
        set_parameters_with(
            self.alpha,
            self.d,
            self.verifiers,
            self.nu,
            self.eps_c,
            self.eps_f,
            SettingsOptions {
                include_correction: !self.no_correction,
                code_seed: 0,
            },
        )
    }
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Genuine,
    Forge,
    Repudiate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Aggregate,
    Full,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Override the codeword length N (requires --z-acc and --z-rej).
    #[arg(long = "codeword-len", requires_all = ["z_acc", "z_rej"])]
    pub codeword_len: Option<u64>,
    #[arg(long = "z-acc")]
    pub z_acc: Option<u64>,
    #[arg(long = "z-rej")]
    pub z_rej: Option<u64>,
    /// Override theta when N is overridden.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Number of codeword positions the forger alters (default round(2 theta N)).
    #[arg(long = "forged-positions")]
    pub forged_positions: Option<u64>,
    #[arg(long, value_enum, default_value_t = EngineArg::Aggregate)]
    pub engine: EngineArg,
    /// Write the tally histogram (z, count) as CSV to this file.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Gap,
    Codelength,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "T")]
    pub verifiers: u32,
    #[arg(long = "alpha-list", value_delimiter = ',', required = true)]
    pub alpha_list: Vec<f64>,
    #[arg(long = "d-min")]
    pub d_min: f64,
    #[arg(long = "d-max")]
    pub d_max: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long = "x-axis", value_enum, default_value_t = AxisArg::Gap)]
    pub x_axis: AxisArg,
    #[arg(long, default_value_t = 0.2)]
    pub nu: f64,
    #[arg(long = "eps-c", default_value_t = 1e-9)]
    pub eps_c: f64,
    #[arg(long = "eps-f", default_value_t = 1e-12)]
    pub eps_f: f64,
    #[arg(long)]
    pub no_correction: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[arg(long = "x-max", default_value_t = 1 << 14)]
    pub x_max: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GcArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long = "T")]
    pub verifiers: u32,
    /// Count re-used unspent states (halves the cost).
    #[arg(long)]
    pub reuse: bool,
    #[arg(long = "qr-target", default_value_t = 1.0 - 1e-12)]
    pub qr_target: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
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
    let outcome = match &cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Gc(a) => cmd_gc(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            eprintln!("qsig: {msg}");
            EXIT_IO
        }
        Err(Failure::Lib(e)) => {
            eprintln!("qsig: {e}");
            match e {
                Error::Usage(_) => EXIT_USAGE,
                _ => EXIT_INADMISSIBLE,
            }
        }
    }
}

fn document(command: &str, body: Value) -> Value {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn emit_document(doc: &Value, output: &OutputArgs) -> Result<(), Failure> {
    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
            s.push('\n');
            s
        }
        Format::Csv => json_to_csv(doc),
    };
    write_output(output.out.as_deref(), &text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn cmd_params(a: &ParamsArgs) -> Result<i32, Failure> {
    let params = a.scheme.derive()?;
    let figures = figures_of_merit(&params)?;
    let doc = document(
        "params",
        json!({
            "params": to_value(&params),
            "figures_of_merit": to_value(&figures),
            "qubits": to_value(&qubits_per_bit(&params)?),
            "genuine_accept_probability":
                genuine_accept_probability(params.codeword_len(), params.alpha, params.z_acc)?,
            "forgery_reject_bound": forgery_reject_probability(&params)?,
            "notes": [REPUDIATION_NOTE],
        }),
    );
    emit_document(&doc, &a.output)?;
    Ok(EXIT_OK)
}

fn simulate_params(a: &SimulateArgs) -> crate::Result<SchemeParams> {
    let s = &a.scheme;
    match a.codeword_len {
        None => s.derive(),
        Some(n) => {
            let theta = a
                .theta
                .unwrap_or_else(|| analysis::settings::theta(s.alpha, s.nu));
            let alphabet = crate::adversary::alphabet_size(s.alpha)?;
            let code = CodeSpec::synthetic(alphabet as u32, n as usize, theta, 0)?;
            let mut p = SchemeParams::custom(
                s.d,
                s.alpha,
                s.verifiers,
                code,
                a.z_acc.expect("required by clap"),
                a.z_rej.expect("required by clap"),
            )?;
            p.eps_c = s.eps_c;
            p.eps_f = s.eps_f;
            Ok(p)
        }
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<i32, Failure> {
    let params = simulate_params(a)?;
    let scenario = match a.mode {
        Mode::Genuine => Scenario::Genuine,
        Mode::Forge => Scenario::Forgery {
            mismatched: a.forged_positions,
        },
        Mode::Repudiate => Scenario::TunedRepudiation,
    };
    let engine = match a.engine {
        EngineArg::Aggregate => Engine::Aggregate,
        EngineArg::Full => Engine::Full,
    };
    let report = run_trials(scenario, &params, a.trials, engine, a.seed)?;
    let (qr, q0, q1) = (
        report.q_reject.value,
        report.q_zero.value,
        report.q_one.value,
    );
    let total = qr + q0 + q1;
    let predicted = OutcomeDistribution::new(qr / total, q0 / total, q1 / total)
        .and_then(|dist| repudiation_probability(&dist, params.verifiers))
        .map(|r| r.exact)
        .ok();
    let mut report_value = to_value(&report);
    if let Value::Object(m) = &mut report_value {
        m.remove("histogram");
    }
    let doc = document(
        "simulate",
        json!({
            "seed": a.seed,
            "params": to_value(&params),
            "report": report_value,
            "repudiation_from_outcomes": predicted,
            "repudiation_bound": analysis::repudiation_bound_scheme(&params),
            "notes": [REPUDIATION_NOTE],
        }),
    );
    emit_document(&doc, &a.output)?;
    if let Some(path) = &a.histogram {
        let mut text = String::from("z,count\n");
        for (z, c) in &report.histogram {
            text.push_str(&format!("{z},{c}\n"));
        }
        write_output(Some(path), &text)?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32, Failure> {
    let config = SweepConfig {
        verifiers: a.verifiers,
        alphas: a.alpha_list.clone(),
        d_min: a.d_min,
        d_max: a.d_max,
        points: a.points,
        nu: a.nu,
        eps_c: a.eps_c,
        eps_f: a.eps_f,
        x_axis: match a.x_axis {
            AxisArg::Gap => XAxis::Gap,
            AxisArg::Codelength => XAxis::Codelength,
        },
        include_correction: !a.no_correction,
    };
    let rows = analysis::sweep(&config)?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_to_csv(&rows),
        Format::Json => {
            let doc = document("sweep", json!({ "rows": to_value(&rows) }));
            let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
            s.push('\n');
            s
        }
    };
    write_output(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_conjecture(a: &ConjectureArgs) -> Result<i32, Failure> {
    let start = Instant::now();
    let report = conjecture::check_range(a.x_max);
    // Wall-clock goes to stderr so that output files stay reproducible.
    eprintln!(
        "qsig conjecture: checked x <= {} in {:.3} s",
        report.largest_checked,
        start.elapsed().as_secs_f64()
    );
    let holds = matches!(report.outcome, Monotonicity::Holds);
    let doc = document(
        "conjecture",
        json!({
            "x_max": report.x_max,
            "largest_checked": report.largest_checked,
            "holds": holds,
            "counterexample": match &report.outcome {
                Monotonicity::Holds => Value::Null,
                c => to_value(c),
            },
        }),
    );
    emit_document(&doc, &a.output)?;
    Ok(if holds { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

fn cmd_gc(a: &GcArgs) -> Result<i32, Failure> {
    let report = gc_report(GcParams {
        d: a.d,
        gamma: a.gamma,
        beta: a.beta,
        verifiers: a.verifiers,
        reuse: a.reuse,
        qr_target: a.qr_target,
    })?;
    let doc = document("gc", to_value(&report));
    emit_document(&doc, &a.output)?;
    Ok(EXIT_OK)
}
