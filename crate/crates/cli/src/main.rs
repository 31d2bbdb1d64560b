//! `purecliff` command-line driver.
//!
//! Exit codes: 0 success, 1 validation or catalog error, 2 I/O or parse
//! error, 3 when a sweep with both engines raises a cross-validation flag.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use purecliff::circuit::format::{deserialize, serialize};
use purecliff::circuit::{validate, Circuit};
use purecliff::harness::{invert_input_fidelity, run_sweep, threads_from_env, with_workers, Engine, SweepSpec, XAxis};
use purecliff::montecarlo::{reports_to_csv, run_mc};
use purecliff::noise::NoiseModel;
use purecliff::perturbative::{expand, ExpansionReport, DEFAULT_ALLOWANCE};
use purecliff::protocols::{builtin, BUILTIN_NAMES};
use purecliff::{Error, Rational};

#[derive(Parser)]
#[command(name = "purecliff", version, about = "Simulate entanglement purification circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate at a single noise point (CSV).
    Simulate(SimulateArgs),
    /// First-order polynomials for success probability and fidelity.
    Expand(ExpandArgs),
    /// Parameter sweep over protocols and noise levels (CSV).
    Sweep(SweepArgs),
    /// Write a built-in protocol in the circuit file format.
    ExportCircuit(ExportArgs),
    /// Read a circuit file, validate it and summarise it.
    ImportCircuit(ImportArgs),
    /// List the built-in protocols.
    ListProtocols,
    /// Validate a built-in protocol or a circuit file.
    Validate(Source),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in protocol name.
    #[arg(long)]
    protocol: Option<String>,
    /// Circuit file.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Network depolarization rate per Pauli.
    #[arg(long, conflicts_with = "f_in")]
    eps: Option<f64>,
    /// Input fidelity of the purified state, mapped to an eps.
    #[arg(long)]
    f_in: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    p_gate: f64,
    #[arg(long, default_value_t = 0.0)]
    p_meas: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply gate noise to preparation and frame-change gates.
    #[arg(long)]
    noisy_prep: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpandFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    source: Source,
    /// Also evaluate the polynomials at this eps.
    #[arg(long)]
    eps: Option<f64>,
    /// Include gate noise; the value is used for evaluation.
    #[arg(long)]
    p_gate: Option<f64>,
    /// Include measurement noise; the value is used for evaluation.
    #[arg(long)]
    p_meas: Option<f64>,
    #[arg(long)]
    noisy_prep: bool,
    #[arg(long, value_enum, default_value_t = ExpandFormat::Text)]
    format: ExpandFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Eps,
    InputFidelity,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Mc,
    Perturbative,
    Both,
}

#[derive(Args)]
struct SweepArgs {
    /// Protocol names, comma separated or repeated.
    #[arg(long, value_delimiter = ',', required = true)]
    protocol: Vec<String>,
    #[arg(long, value_enum, default_value_t = AxisArg::InputFidelity)]
    x_axis: AxisArg,
    /// X-axis values, comma separated.
    #[arg(long, value_delimiter = ',')]
    x_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_gate: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_meas: Vec<f64>,
    /// Pair the i-th p_gate with the i-th p_meas instead of all combinations.
    #[arg(long)]
    paired: bool,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Mc)]
    engine: EngineArg,
    #[arg(long)]
    noisy_prep: bool,
    /// Second-order allowance for cross-validation flags.
    #[arg(long, default_value_t = DEFAULT_ALLOWANCE)]
    allowance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    protocol: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportArgs {
    /// Circuit file to read.
    path: PathBuf,
    /// Write the normalised circuit here.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Error(Error),
    Invalid(String),
    Flagged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(failure: &Failure) -> u8 {
    match failure {
        Failure::Error(Error::Io(_) | Error::Parse { .. }) => 2,
        Failure::Error(_) | Failure::Invalid(_) => 1,
        Failure::Flagged(_) => 3,
    }
}

fn load(source: &Source) -> Result<(Circuit, Option<String>), Failure> {
    match (&source.protocol, &source.circuit) {
        (Some(name), _) => Ok((builtin(name)?.circuit, Some(name.clone()))),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(Error::from)?;
            Ok((deserialize(&text)?, None))
        }
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Error(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let (circuit, name) = load(&args.source)?;
    let eps = match (args.eps, args.f_in) {
        (Some(e), _) => e,
        (None, Some(f)) => {
            let state = match name {
                Some(n) => builtin(&n)?.purified,
                None => {
                    return Err(Failure::Invalid(
                        "--f-in needs a built-in --protocol to define the raw state".into(),
                    ))
                }
            };
            invert_input_fidelity(&state, f)?
        }
        (None, None) => 0.0,
    };
    let model = NoiseModel::new(eps, args.p_gate, args.p_meas)?.with_noisy_prep(args.noisy_prep);
    let report = run_mc(&circuit, &model, args.trials, args.seed)?;
    emit(&args.out, &reports_to_csv(&[report])?)
}

fn expand_cmd(args: ExpandArgs) -> Result<(), Failure> {
    let (circuit, _) = load(&args.source)?;
    let one = Rational::from_integer(1);
    let mut symbolic = NoiseModel::<Rational>::noiseless().with_noisy_prep(args.noisy_prep);
    symbolic.epsilon = one;
    if args.p_gate.is_some() {
        symbolic.p_gate = one;
    }
    if args.p_meas.is_some() {
        symbolic.p_meas = one;
    }
    let report = expand(&circuit, &symbolic)?;
    let mut text = match args.format {
        ExpandFormat::Text => report.to_text(),
        ExpandFormat::Csv => ExpansionReport::to_csv(std::slice::from_ref(&report))?,
    };
    if let (Some(eps), ExpandFormat::Text) = (args.eps, args.format) {
        let point = NoiseModel::new(eps, args.p_gate.unwrap_or(0.0), args.p_meas.unwrap_or(0.0))?;
        text.push_str(&format!(
            "success({eps}) = {}\nfidelity({eps}) = {}\n",
            report.success.evaluate_f64(&point),
            report.fidelity.evaluate_f64(&point)
        ));
    }
    emit(&args.out, &text)
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let names: Vec<&str> = args.protocol.iter().map(String::as_str).collect();
    let axis = match args.x_axis {
        AxisArg::Eps => XAxis::Eps,
        AxisArg::InputFidelity => XAxis::InputFidelity,
    };
    let mut spec = SweepSpec::new(&names, axis, args.x_values);
    spec.p_gate = args.p_gate;
    spec.p_meas = args.p_meas;
    spec.paired_noise = args.paired;
    spec.trials = args.trials;
    spec.seed = args.seed;
    spec.engine = match args.engine {
        EngineArg::Mc => Engine::Mc,
        EngineArg::Perturbative => Engine::Perturbative,
        EngineArg::Both => Engine::Both,
    };
    spec.noisy_prep = args.noisy_prep;
    spec.allowance = args.allowance;
    let output = run_sweep(&spec)?;
    emit(&args.out, &output.csv)?;
    if output.flags.is_empty() {
        Ok(())
    } else {
        Err(Failure::Flagged(output.flags.join("\n")))
    }
}

fn check(circuit: &Circuit) -> Result<(), Failure> {
    let diagnostics = validate(circuit);
    if diagnostics.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
    Err(Failure::Invalid(lines.join("\n")))
}

fn import(args: ImportArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.path).map_err(Error::from)?;
    let circuit = deserialize(&text)?;
    check(&circuit)?;
    if args.out.is_some() {
        emit(&args.out, &serialize(&circuit))?;
    }
    println!(
        "{}: {} qubits, {} registers, {} ops, {} measurements; valid",
        circuit.name(),
        circuit.n_qubits(),
        circuit.registers().len(),
        circuit.ops().len(),
        circuit.measurement_count()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Expand(a) => expand_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::ExportCircuit(a) => emit(&a.out, &serialize(&builtin(&a.protocol)?.circuit)),
        Command::ImportCircuit(a) => import(a),
        Command::ListProtocols => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::Validate(source) => {
            let (circuit, _) = load(&source)?;
            check(&circuit)?;
            println!("{}: valid", circuit.name());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env()
        .map_err(Failure::from)
        .and_then(|threads| with_workers(threads, || run(cli)).map_err(Failure::from)?);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Error(e) => eprintln!("error: {e}"),
                Failure::Invalid(m) => eprintln!("invalid: {m}"),
                Failure::Flagged(m) => eprintln!("cross-validation flags:\n{m}"),
            }
            ExitCode::from(exit_code(&failure))
        }
    }
}
