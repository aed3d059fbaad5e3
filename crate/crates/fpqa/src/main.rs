use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fpqa::bench::{Bench, BenchKind, BenchSpec};
use fpqa::formats::{write_edges, write_movement_csv, write_pauli, write_sweep_csv};
use fpqa::qasm::to_qasm;
use fpqa::{load_problem, problem_circuit, DEFAULT_ANGLE};
use fpqa_core::arch::FpqaConfig;
use fpqa_core::metrics::{evaluate, fidelity, sweep_array_width, Metrics, NoiseParams, Problem, TwoQubitExponent};
use fpqa_core::oracle::equivalence;
use fpqa_core::qsim::PauliTerm;
use fpqa_core::schedule::{validate, Schedule};
use serde::Serialize;

/// Fidelity below which `verify` reports a mismatch.
const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "fpqa", version, about = "Flying-ancilla compiler for field-programmable qubit arrays")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a .qasm, .json, .pauli or .edges file to a schedule.
    Compile {
        input: PathBuf,
        /// Defaults to the router matching the input format.
        #[arg(long, value_enum)]
        router: Option<Router>,
        /// FpqaConfig JSON; defaults to the smallest square array.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Angle for Pauli strings without one, and the QAOA γ.
        #[arg(long, default_value_t = DEFAULT_ANGLE)]
        angle: f64,
    },
    /// Generate a benchmark instance.
    Bench {
        #[command(flatten)]
        bench: BenchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a schedule and check it against the circuit it came from.
    Verify {
        circuit: PathBuf,
        schedule: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ANGLE)]
        angle: f64,
    },
    /// Recompile one workload at several array widths.
    Sweep {
        /// Workload file; otherwise one is generated from the bench options.
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
        widths: Vec<u32>,
        #[arg(long, value_enum)]
        router: Option<Router>,
        #[command(flatten)]
        bench: BenchArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = DEFAULT_ANGLE)]
        angle: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print metrics JSON and write the movement CSV.
    Stats {
        schedule: PathBuf,
        /// Defaults to the schedule path with a `.movement.csv` extension.
        #[arg(long)]
        movement: Option<PathBuf>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Router {
    Generic,
    Qsim,
    Qaoa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Random,
    Pauli,
    QaoaEr,
    QaoaRegular,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long, default_value_t = 10)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CNOTs per qubit for random circuits.
    #[arg(long, default_value_t = 10)]
    factor: u32,
    /// Number of Pauli strings.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Non-identity probability for Pauli strings, edge probability for
    /// random graphs.
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Degree of regular graphs.
    #[arg(long, default_value_t = 3)]
    k: u32,
}

impl BenchArgs {
    fn spec(&self) -> Option<BenchSpec> {
        let kind = match self.kind? {
            Kind::Random => BenchKind::RandomCircuit { n: self.n, cnot_factor: self.factor },
            Kind::Pauli => BenchKind::PauliStrings { n: self.n, count: self.count, p: self.p },
            Kind::QaoaEr => BenchKind::QaoaRandom { n: self.n, edge_p: self.p },
            Kind::QaoaRegular => BenchKind::QaoaRegular { n: self.n, k: self.k },
        };
        Some(BenchSpec { kind, seed: self.seed })
    }
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long, default_value_t = 0.999)]
    f1: f64,
    #[arg(long, default_value_t = 0.999)]
    f2: f64,
    #[arg(long, default_value_t = 1.5)]
    t2: f64,
    #[arg(long, default_value_t = 300e-6)]
    t0: f64,
    /// Count two-qubit errors per atom and layer, or per gate.
    #[arg(long, value_enum, default_value_t = Exponent::AtomsTimesDepth)]
    exponent: Exponent,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Exponent {
    AtomsTimesDepth,
    GateCount,
}

impl NoiseArgs {
    fn params(&self) -> (NoiseParams, TwoQubitExponent) {
        let p = NoiseParams { f1: self.f1, f2: self.f2, t2: self.t2, t0: self.t0 };
        let mode = match self.exponent {
            Exponent::AtomsTimesDepth => TwoQubitExponent::AtomsTimesDepth,
            Exponent::GateCount => TwoQubitExponent::GateCount,
        };
        (p, mode)
    }
}

/// Exit status 1; everything else exits with 2.
#[derive(Debug)]
struct ValidationFailure(String);

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

fn with_router(p: Problem, router: Option<Router>) -> anyhow::Result<Problem> {
    Ok(match (router, p) {
        (None, p)
        | (Some(Router::Qsim), p @ Problem::Pauli(_))
        | (Some(Router::Qaoa), p @ Problem::Qaoa { .. })
        | (Some(Router::Generic), p @ Problem::Circuit(_)) => p,
        (Some(Router::Generic), p) => Problem::Circuit(problem_circuit(&p)?),
        (Some(Router::Qsim), _) => bail!("the qsim router needs a .pauli input"),
        (Some(Router::Qaoa), _) => bail!("the qaoa router needs an .edges input"),
    })
}

fn bench_problem(b: Bench, angle: f64) -> Problem {
    match b {
        Bench::Circuit(c) => Problem::Circuit(c),
        Bench::Pauli(s) => Problem::Pauli(s.into_iter().map(|s| PauliTerm::new(s, angle)).collect()),
        Bench::Graph(graph) => Problem::Qaoa { graph, gamma: angle },
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn read_schedule(path: &Path) -> anyhow::Result<Schedule> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn checked_metrics(s: &Schedule) -> anyhow::Result<Metrics> {
    if let Err(violations) = validate(s) {
        let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(ValidationFailure(format!("schedule is invalid:\n  {}", lines.join("\n  "))).into());
    }
    Ok(evaluate(s)?)
}

#[derive(Serialize)]
struct Report<'a> {
    #[serde(flatten)]
    metrics: &'a Metrics,
    mean_parallelism: f64,
    mean_gate_parallelism: f64,
    epsilon: f64,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Compile { input, router, config, out, angle } => {
            let problem = with_router(load_problem(&input, angle)?, router)?;
            let cfg = match config {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(&p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => FpqaConfig::square_for(problem.n_qubits()),
            };
            let s = problem.compile(&cfg)?;
            let m = checked_metrics(&s)?;
            eprintln!("depth {} g1 {} g2 {} atoms {}", m.depth, m.g1, m.g2, m.n_atoms);
            write_json(&s, out.as_deref())
        }
        Cmd::Bench { bench, out } => {
            let spec = bench.spec().ok_or_else(|| anyhow!("--kind is required"))?;
            let text = match spec.generate()? {
                Bench::Circuit(c) => to_qasm(&c),
                Bench::Pauli(s) => {
                    write_pauli(&s.into_iter().map(|s| PauliTerm::new(s, DEFAULT_ANGLE)).collect::<Vec<_>>())
                }
                Bench::Graph(g) => write_edges(&g),
            };
            let mut w = output(out.as_deref())?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
            Ok(())
        }
        Cmd::Verify { circuit, schedule, angle } => {
            let c = problem_circuit(&load_problem(&circuit, angle)?)?;
            let s = read_schedule(&schedule)?;
            checked_metrics(&s)?;
            let f = equivalence(&c, &s)?;
            println!("fidelity {f:.12}");
            if f < 1.0 - EQUIVALENCE_TOLERANCE {
                return Err(
                    ValidationFailure(format!("schedule is not equivalent to the circuit (fidelity {f})")).into()
                );
            }
            Ok(())
        }
        Cmd::Sweep { input, widths, router, bench, noise, angle, out } => {
            let problem = match (input, bench.spec()) {
                (Some(path), _) => load_problem(&path, angle)?,
                (None, Some(spec)) => bench_problem(spec.generate()?, angle),
                (None, None) => bail!("give an input file or --kind"),
            };
            let problem = with_router(problem, router)?;
            let (p, mode) = noise.params();
            p.validate()?;
            let sweep = sweep_array_width(&problem, &widths)?;
            write_sweep_csv(&sweep, |m| fidelity(m, &p, mode).unwrap_or(f64::NAN), output(out.as_deref())?)?;
            Ok(())
        }
        Cmd::Stats { schedule, movement, noise } => {
            let s = read_schedule(&schedule)?;
            let m = checked_metrics(&s)?;
            let (p, mode) = noise.params();
            let report = Report {
                metrics: &m,
                mean_parallelism: m.mean_parallelism(),
                mean_gate_parallelism: m.mean_gate_parallelism(),
                epsilon: fidelity(&m, &p, mode)?,
            };
            let csv_path = movement.unwrap_or_else(|| schedule.with_extension("movement.csv"));
            write_movement_csv(&s, output(Some(&csv_path))?)?;
            write_json(&report, None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ValidationFailure>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
