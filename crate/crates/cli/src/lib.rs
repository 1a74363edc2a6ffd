//! Subcommands of the `qmap` binary: `gen`, `map` and `sweep`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmap_core::benchgen::{BenchSpec, Family, RandomPreset};
use qmap_core::{mapper, qubo, slicer, AnnealParams, Circuit, Config, Error, MappingReport, SolverChoice, TopologySpec};
use rayon::prelude::*;
use serde::Serialize;

/// Exit status of a valid mapping or a completed command.
pub const EXIT_OK: i32 = 0;
/// A report was written but the mapping violates a constraint.
pub const EXIT_INVALID: i32 = 1;
/// Input, I/O or pipeline failure; an error JSON is printed on stderr.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qmap", version, about = "Map quantum circuits onto multi-core architectures via QUBO")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark circuit as JSON.
    Gen(GenArgs),
    /// Map one circuit onto a topology and write a report.
    Map(MapArgs),
    /// Map a grid of benchmarks and write one CSV row per run.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Layer count of `random` circuits.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Layer count of `quantum_volume` circuits (defaults to n).
    #[arg(long)]
    pub layers: Option<usize>,
    /// Depth preset for `random`: XS, S, M or L.
    #[arg(long)]
    pub preset: Option<RandomPreset>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Anneal,
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Transfer weight; defaults to 0.99 / (T·n).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 50)]
    pub reads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest QUBO solved in one piece; larger ones are split into slice windows.
    #[arg(long, default_value_t = 50_000)]
    pub window_budget: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Anneal)]
    pub solver: SolverArg,
}

impl SolverArgs {
    fn config(&self, lambda: Option<f64>, seed: u64) -> Config {
        Config {
            lambda,
            solver: match self.solver {
                SolverArg::Anneal => SolverChoice::Anneal,
                SolverArg::Exact => SolverChoice::Exact,
            },
            anneal: AnnealParams { sweeps: self.sweeps, reads: self.reads, seed, ..AnnealParams::default() },
            window_budget: self.window_budget,
            ..Config::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Circuit JSON file `{"n": .., "gates": [[..], ..]}`.
    #[arg(long)]
    pub circuit: PathBuf,
    /// `all2all:k,c`, `grid:rows,cols,cap` or `file:<topology.json>`.
    #[arg(long)]
    pub topology: TopologySpec,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Report JSON file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a one-row CSV summary.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write an SVG timeline of the assignment.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Also write the full QUBO as `i j coeff` lines.
    #[arg(long)]
    pub export_qubo: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated benchmark families; may be empty.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub families: Vec<Family>,
    /// Comma-separated qubit counts.
    #[arg(long = "n", value_delimiter = ',', num_args = 0..)]
    pub sizes: Vec<usize>,
    /// Topology; repeat the flag for several.
    #[arg(long = "topology", default_value = "grid:2,2,4")]
    pub topologies: Vec<TopologySpec>,
    /// Comma-separated λ values; the default λ when absent.
    #[arg(long = "lambda", value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    /// Comma-separated seeds.
    #[arg(long = "seeds", value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub preset: Option<RandomPreset>,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 50)]
    pub reads: usize,
    #[arg(long, default_value_t = 50_000)]
    pub window_budget: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Anneal)]
    pub solver: SolverArg,
    /// Parallel rows; all cores when absent.
    #[arg(long, env = "QMAP_JOBS")]
    pub jobs: Option<usize>,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One CSV row of a map or sweep run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub topology: String,
    pub seed: u64,
    pub depth: Option<usize>,
    pub two_qubit_gates: Option<usize>,
    pub lambda: Option<f64>,
    pub valid: Option<bool>,
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub relative_m: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub error: Option<String>,
}

impl Row {
    fn fill(&mut self, circuit: &Circuit, report: &MappingReport) {
        self.depth = Some(circuit.depth());
        self.two_qubit_gates = Some(report.two_qubit_gates);
        self.lambda = Some(report.lambda);
        self.valid = Some(report.valid);
        self.m = Some(report.m);
        self.relative_m = Some(report.relative_m);
        self.wall_time_s = Some(report.wall_time_s);
    }
}

#[derive(Debug, Serialize)]
struct ErrorDoc<'a> {
    error: &'a str,
    message: String,
}

/// Prints `{"error": kind, "message": ..}` on stderr and returns the error exit code.
pub fn report_error(e: &Error) -> i32 {
    let doc = ErrorDoc { error: e.kind(), message: e.to_string() };
    eprintln!("{}", serde_json::to_string(&doc).expect("error doc serializes"));
    EXIT_ERROR
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Map(a) => cmd_map(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    };
    outcome.unwrap_or_else(|e| report_error(&e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn spec(family: Family, n: usize, depth: Option<usize>, layers: Option<usize>, preset: Option<RandomPreset>, seed: u64) -> BenchSpec {
    BenchSpec { family, n, depth, layers, preset, seed }
}

pub fn cmd_gen(a: &GenArgs) -> Result<i32, Error> {
    let circuit = spec(a.family, a.n, a.depth, a.layers, a.preset, a.seed).generate()?;
    emit(a.out.as_deref(), &(circuit.to_json() + "\n"))?;
    Ok(EXIT_OK)
}

fn write_csv<W: Write>(w: W, rows: &[Row]) -> Result<(), Error> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record([
        "family",
        "n",
        "topology",
        "seed",
        "depth",
        "two_qubit_gates",
        "lambda",
        "valid",
        "M",
        "relative_m",
        "wall_time_s",
        "error",
    ])
    .map_err(csv_err)?;
    for r in rows {
        wr.serialize(r).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

fn csv_to(path: Option<&Path>, rows: &[Row]) -> Result<(), Error> {
    match path {
        Some(p) => write_csv(fs::File::create(p)?, rows),
        None => write_csv(io::stdout().lock(), rows),
    }
}

pub fn cmd_map(a: &MapArgs) -> Result<i32, Error> {
    let circuit = Circuit::parse(&fs::read_to_string(&a.circuit)?)?;
    let topo = a.topology.resolve()?;
    let report = mapper::map_circuit(&circuit, &topo, &a.solver.config(a.solver.lambda, a.solver.seed))?;

    emit(a.out.as_deref(), &(report.to_json() + "\n"))?;
    if let Some(p) = &a.svg {
        fs::write(p, report.to_svg())?;
    }
    if let Some(p) = &a.csv {
        let family = a.circuit.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut row = Row { family, n: circuit.n(), topology: a.topology.to_string(), seed: a.solver.seed, ..Row::default() };
        row.fill(&circuit, &report);
        csv_to(Some(p), &[row])?;
    }
    if let Some(p) = &a.export_qubo {
        let slices = slicer::slice(&circuit);
        let dist = topo.hop_matrix()?;
        let lambda = report.lambda;
        let q = qubo::build::<f64>(&slices, &topo, &dist, lambda)?;
        fs::write(p, q.to_text())?;
    }
    Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
}

struct Job {
    family: Family,
    n: usize,
    topology: TopologySpec,
    lambda: Option<f64>,
    seed: u64,
}

fn sweep_row(a: &SweepArgs, solver: &SolverArgs, job: &Job) -> Row {
    let start = Instant::now();
    let mut row = Row {
        family: job.family.to_string(),
        n: job.n,
        topology: job.topology.to_string(),
        seed: job.seed,
        lambda: job.lambda,
        ..Row::default()
    };
    let outcome = spec(job.family, job.n, a.depth, a.layers, a.preset, job.seed)
        .generate()
        .and_then(|c| {
            let topo = job.topology.resolve()?;
            let report = mapper::map_circuit(&c, &topo, &solver.config(job.lambda, job.seed))?;
            Ok((c, report))
        });
    match outcome {
        Ok((c, report)) => row.fill(&c, &report),
        Err(e) => {
            row.error = Some(format!("{}: {e}", e.kind()));
            row.wall_time_s = Some(start.elapsed().as_secs_f64());
        }
    }
    row
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<i32, Error> {
    let lambdas: Vec<Option<f64>> = if a.lambdas.is_empty() { vec![None] } else { a.lambdas.iter().copied().map(Some).collect() };
    let mut jobs = Vec::new();
    for &family in &a.families {
        for &n in &a.sizes {
            for topology in &a.topologies {
                for &lambda in &lambdas {
                    for &seed in &a.seeds {
                        jobs.push(Job { family, n, topology: topology.clone(), lambda, seed });
                    }
                }
            }
        }
    }
    let solver = SolverArgs {
        lambda: None,
        sweeps: a.sweeps,
        reads: a.reads,
        seed: 0,
        window_budget: a.window_budget,
        solver: a.solver,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Io(io::Error::other(e)))?;
    let rows: Vec<Row> = pool.install(|| jobs.par_iter().map(|j| sweep_row(a, &solver, j)).collect());
    csv_to(a.out.as_deref(), &rows)?;
    Ok(EXIT_OK)
}
