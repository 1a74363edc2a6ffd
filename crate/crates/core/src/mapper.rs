//! End-to-end mapping: slice, encode, solve, decode, validate, measure.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::architecture::{CoreTopology, DistanceMatrix};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qubo::{self, SolutionVector, VariableIndex};
use crate::scalar::Scalar;
use crate::slicer::{self, SliceSet, SliceStats};
use crate::solver::{self, AnnealParams, ExactBudget};

/// Per-slice placement: `assignment[t][i]` is the core holding qubit `i`
/// during slice `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Mapping {
    assignment: Vec<Vec<usize>>,
}

impl Mapping {
    pub fn new(assignment: Vec<Vec<usize>>) -> Self {
        Self { assignment }
    }

    pub fn slices(&self) -> usize {
        self.assignment.len()
    }

    pub fn core(&self, slice: usize, qubit: usize) -> usize {
        self.assignment[slice][qubit]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.assignment
    }

    /// Bits for this mapping with slack slots set to each core's load.
    pub fn encode(&self, index: &VariableIndex) -> SolutionVector {
        index.encode(&self.assignment)
    }

    /// Qubits per core for every slice.
    pub fn loads(&self, cores: usize) -> Vec<Vec<usize>> {
        self.assignment
            .iter()
            .map(|row| {
                let mut load = vec![0; cores];
                for &j in row {
                    load[j] += 1;
                }
                load
            })
            .collect()
    }
}

/// A `(slice, qubit)` cell that does not select exactly one core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignmentIssue {
    pub slice: usize,
    pub qubit: usize,
    pub cores: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Mapping(Mapping),
    Diagnosis(Vec<AssignmentIssue>),
}

/// Reads the assignment bits; slack bits are ignored.
pub fn decode(x: &SolutionVector, index: &VariableIndex) -> Result<Decoded> {
    if x.len() != index.len() {
        return Err(Error::LengthMismatch { expected: index.len(), got: x.len() });
    }
    let mut table = Vec::with_capacity(index.slices());
    let mut issues = Vec::new();
    for t in 0..index.slices() {
        let mut row = Vec::with_capacity(index.qubits());
        for i in 0..index.qubits() {
            let cores: Vec<usize> = (0..index.cores()).filter(|&j| x.get(index.assign(t, i, j))).collect();
            if cores.len() == 1 {
                row.push(cores[0]);
            } else {
                row.push(cores.first().copied().unwrap_or(usize::MAX));
                issues.push(AssignmentIssue { slice: t, qubit: i, cores });
            }
        }
        table.push(row);
    }
    Ok(if issues.is_empty() { Decoded::Mapping(Mapping::new(table)) } else { Decoded::Diagnosis(issues) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SplitEdge { slice: usize, a: usize, b: usize },
    OverCapacity { slice: usize, core: usize, load: usize, capacity: usize },
}

/// Co-location of every interaction edge and per-core capacity, slice by slice.
pub fn validate(m: &Mapping, slices: &SliceSet, topo: &CoreTopology) -> Vec<Violation> {
    let mut out = Vec::new();
    for (t, slice) in slices.slices().iter().enumerate() {
        for (a, b) in slice.graph().edges() {
            if m.core(t, a) != m.core(t, b) {
                out.push(Violation::SplitEdge { slice: t, a, b });
            }
        }
    }
    for (t, load) in m.loads(topo.cores()).into_iter().enumerate() {
        for (core, &l) in load.iter().enumerate() {
            if l > topo.capacity(core) {
                out.push(Violation::OverCapacity { slice: t, core, load: l, capacity: topo.capacity(core) });
            }
        }
    }
    out
}

/// A qubit state moving between cores from slice `t-1` to slice `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferEvent {
    /// Slice the qubit arrives in.
    pub t: usize,
    pub qubit: usize,
    pub from: usize,
    pub to: usize,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferSummary {
    pub events: Vec<TransferEvent>,
    /// Hop-weighted total.
    pub m: u64,
    pub transfer_count: usize,
}

pub fn transfers(m: &Mapping, dist: &DistanceMatrix) -> TransferSummary {
    transfers_of_rows(m.rows(), dist)
}

// Cells holding usize::MAX (undecodable) are skipped.
fn transfers_of_rows(rows: &[Vec<usize>], dist: &DistanceMatrix) -> TransferSummary {
    let mut events = Vec::new();
    for t in 1..rows.len() {
        for (qubit, (&from, &to)) in rows[t - 1].iter().zip(&rows[t]).enumerate() {
            if from != to && from != usize::MAX && to != usize::MAX {
                events.push(TransferEvent { t, qubit, from, to, hops: dist.get(from, to) });
            }
        }
    }
    TransferSummary {
        m: events.iter().map(|e| e.hops as u64).sum(),
        transfer_count: events.len(),
        events,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Anneal,
    Exact,
}

#[derive(Debug, Clone)]
pub struct MapConfig<F> {
    /// `None` selects `0.99 / (T·n)`.
    pub lambda: Option<F>,
    pub solver: SolverChoice,
    pub anneal: AnnealParams<F>,
    /// Problems above this many variables are solved in slice windows.
    pub window_budget: usize,
    pub exact_budget: ExactBudget,
}

impl<F: Scalar> Default for MapConfig<F> {
    fn default() -> Self {
        Self {
            lambda: None,
            solver: SolverChoice::Anneal,
            anneal: AnnealParams::default(),
            window_budget: 50_000,
            exact_budget: ExactBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MappingReport {
    pub valid: bool,
    pub n: usize,
    #[serde(rename = "T")]
    pub slices: usize,
    pub k: usize,
    pub lambda: f64,
    pub energy: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub transfer_count: usize,
    pub wall_time_s: f64,
    /// `assignment[t][i]`; `null` where the solution selects no core.
    pub assignment: Vec<Vec<Option<usize>>>,
    pub transfers: Vec<TransferEvent>,
    pub loads: Vec<Vec<usize>>,
    pub penalty: qubo::Penalties,
    pub violations: Vec<Violation>,
    pub issues: Vec<AssignmentIssue>,
    pub two_qubit_gates: usize,
    pub multi_qubit_gates: usize,
    /// `M` per two-qubit gate of the input circuit.
    pub relative_m: f64,
    pub slice_stats: SliceStats,
    pub windows: usize,
    pub variables: usize,
}

impl MappingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Timeline of the placement: slices left to right, cores top to bottom,
    /// qubits that just arrived drawn in red.
    pub fn to_svg(&self) -> String {
        const CELL_W: usize = 90;
        const ROW_PAD: usize = 8;
        const DOT: usize = 22;
        let per_row = self.loads.iter().flatten().copied().max().unwrap_or(1).max(1);
        let cols = 3usize.min(per_row);
        let lines = per_row.div_ceil(cols);
        let cell_h = lines * DOT + 2 * ROW_PAD;
        let width = 60 + self.slices * CELL_W + 20;
        let height = 40 + self.k * cell_h + 20;
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
        for t in 0..self.slices {
            let x = 60 + t * CELL_W + CELL_W / 2;
            writeln!(s, r#"<text x="{x}" y="20" text-anchor="middle">t={}</text>"#, t + 1).unwrap();
        }
        for j in 0..self.k {
            let y = 40 + j * cell_h;
            writeln!(s, r#"<text x="6" y="{}">core {j}</text>"#, y + cell_h / 2 + 4).unwrap();
            writeln!(
                s,
                r##"<rect x="56" y="{y}" width="{}" height="{cell_h}" fill="none" stroke="#bbb"/>"##,
                self.slices * CELL_W
            )
            .unwrap();
        }
        let moved: std::collections::HashSet<(usize, usize)> =
            self.transfers.iter().map(|e| (e.t, e.qubit)).collect();
        for (t, row) in self.assignment.iter().enumerate() {
            let mut slot = vec![0usize; self.k];
            for (q, core) in row.iter().enumerate() {
                let Some(j) = *core else { continue };
                let pos = slot[j];
                slot[j] += 1;
                let cx = 60 + t * CELL_W + 14 + (pos % cols) * DOT + DOT / 2;
                let cy = 40 + j * cell_h + ROW_PAD + (pos / cols) * DOT + DOT / 2;
                let fill = if moved.contains(&(t, q)) { "#d62728" } else { "#1f77b4" };
                writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="9" fill="{fill}"/>"#).unwrap();
                writeln!(
                    s,
                    r#"<text x="{cx}" y="{}" text-anchor="middle" fill="white">{q}</text>"#,
                    cy + 4
                )
                .unwrap();
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Runs the whole pipeline. A report is produced whenever the inputs are
/// mappable; `valid` is true iff the solution has `H_a = 0`.
pub fn map_circuit<F: Scalar>(
    circuit: &Circuit,
    topo: &CoreTopology,
    config: &MapConfig<F>,
) -> Result<MappingReport> {
    let start = Instant::now();
    let n = circuit.n();
    if topo.total_capacity() < n {
        return Err(Error::InfeasibleCapacity { qubits: n, capacity: topo.total_capacity() });
    }
    let slices = slicer::slice(circuit);
    slices.check_gate_widths(topo.max_capacity())?;
    let dist = topo.hop_matrix()?;
    let lambda = config.lambda.unwrap_or_else(|| qubo::default_lambda(slices.len(), n));
    if lambda.is_nan() || lambda < F::zero() {
        return Err(Error::NegativeLambda(lambda.as_f64()));
    }
    let index = VariableIndex::new(n, slices.len(), topo.capacities());

    let (best, windows) = match config.solver {
        SolverChoice::Exact => {
            let r = solver::exact_solve(&slices, topo, &dist, lambda, config.exact_budget)?;
            (r.best, 1)
        }
        SolverChoice::Anneal if index.len() <= config.window_budget => {
            let q = qubo::build(&slices, topo, &dist, lambda)?;
            (solver::anneal(&q, &config.anneal).best, 1)
        }
        SolverChoice::Anneal => {
            let w = solver::solve_windowed_partial(
                &slices,
                topo,
                &dist,
                lambda,
                config.window_budget,
                &config.anneal,
            )?;
            (w.result.best, w.windows.len())
        }
    };

    Ok(report(circuit, &slices, topo, &dist, &index, &best, lambda, windows, start))
}

#[allow(clippy::too_many_arguments)]
fn report<F: Scalar>(
    circuit: &Circuit,
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    index: &VariableIndex,
    best: &SolutionVector,
    lambda: F,
    windows: usize,
    start: Instant,
) -> MappingReport {
    let penalty = qubo::eval_ha_terms(best, slices, topo);
    let ht = qubo::eval_ht(best, index, dist);
    let energy = F::of_u64(penalty.total()) + lambda * F::of_u64(ht);

    let (rows, issues, violations) = match decode(best, index).expect("length matches") {
        Decoded::Mapping(m) => {
            let v = validate(&m, slices, topo);
            (m.assignment, Vec::new(), v)
        }
        Decoded::Diagnosis(issues) => {
            let rows = index_rows(best, index);
            (rows, issues, Vec::new())
        }
    };
    let summary = transfers_of_rows(&rows, dist);
    let loads = rows
        .iter()
        .map(|row| {
            let mut l = vec![0; topo.cores()];
            for &j in row.iter().filter(|&&j| j != usize::MAX) {
                l[j] += 1;
            }
            l
        })
        .collect();
    let two_qubit_gates = circuit.two_qubit_count();

    MappingReport {
        valid: penalty.total() == 0,
        n: circuit.n(),
        slices: slices.len(),
        k: topo.cores(),
        lambda: lambda.as_f64(),
        energy: energy.as_f64(),
        m: summary.m,
        transfer_count: summary.transfer_count,
        wall_time_s: start.elapsed().as_secs_f64(),
        assignment: rows
            .iter()
            .map(|r| r.iter().map(|&j| (j != usize::MAX).then_some(j)).collect())
            .collect(),
        transfers: summary.events,
        loads,
        penalty,
        violations,
        issues,
        two_qubit_gates,
        multi_qubit_gates: circuit.multi_qubit_count(),
        relative_m: if two_qubit_gates == 0 { 0.0 } else { summary.m as f64 / two_qubit_gates as f64 },
        slice_stats: slices.stats(),
        windows,
        variables: index.len(),
    }
}

fn index_rows(x: &SolutionVector, index: &VariableIndex) -> Vec<Vec<usize>> {
    (0..index.slices())
        .map(|t| {
            (0..index.qubits())
                .map(|i| (0..index.cores()).find(|&j| x.get(index.assign(t, i, j))).unwrap_or(usize::MAX))
                .collect()
        })
        .collect()
}
