//! QUBO encoding of the per-slice assignment problem plus transfer cost.
//!
//! For every slice `t` the assignment part is
//!
//! ```text
//! F(x^t) = Σ_i (Σ_j x^t_ij - 1)²                      one core per qubit
//!        + Σ_j (Σ_i x^t_ij - Σ_s y^t_sj)²             capacity via slack slots
//!        + Σ_j (x^t_j)ᵀ L_t x^t_j                      interacting qubits co-located
//! ```
//!
//! and consecutive slices are coupled by `λ · d_jl · x^{t-1}_ij · x^t_il`.
//! Constants dropped by the expansion are kept in `offset`, so `energy`
//! reproduces `H_a + λ·H_t` exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::architecture::{CoreTopology, DistanceMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::slicer::SliceSet;

/// Flat layout: assignment bits ordered by slice, core, qubit; slack bits
/// (one per capacity slot) appended after all assignment bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableIndex {
    n: usize,
    k: usize,
    slices: usize,
    capacities: Vec<usize>,
    slack_offsets: Vec<usize>,
    slack_per_slice: usize,
}

/// Meaning of one flat variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Assign { slice: usize, qubit: usize, core: usize },
    Slack { slice: usize, core: usize, slot: usize },
}

impl VariableIndex {
    pub fn new(n: usize, slices: usize, capacities: &[usize]) -> Self {
        let mut slack_offsets = Vec::with_capacity(capacities.len());
        let mut acc = 0;
        for &c in capacities {
            slack_offsets.push(acc);
            acc += c;
        }
        Self {
            n,
            k: capacities.len(),
            slices,
            capacities: capacities.to_vec(),
            slack_offsets,
            slack_per_slice: acc,
        }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn cores(&self) -> usize {
        self.k
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    /// `N = T·k·n`.
    pub fn assignment_count(&self) -> usize {
        self.slices * self.k * self.n
    }

    pub fn slack_count(&self) -> usize {
        self.slices * self.slack_per_slice
    }

    pub fn len(&self) -> usize {
        self.assignment_count() + self.slack_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Variables (assignment plus slack) belonging to one slice.
    pub fn per_slice(&self) -> usize {
        self.k * self.n + self.slack_per_slice
    }

    #[inline]
    pub fn assign(&self, slice: usize, qubit: usize, core: usize) -> usize {
        debug_assert!(slice < self.slices && qubit < self.n && core < self.k);
        (slice * self.k + core) * self.n + qubit
    }

    #[inline]
    pub fn slack(&self, slice: usize, core: usize, slot: usize) -> usize {
        debug_assert!(slot < self.capacities[core]);
        self.assignment_count() + slice * self.slack_per_slice + self.slack_offsets[core] + slot
    }

    pub fn decode(&self, flat: usize) -> Option<Variable> {
        if flat < self.assignment_count() {
            let qubit = flat % self.n;
            let rest = flat / self.n;
            return Some(Variable::Assign { slice: rest / self.k, qubit, core: rest % self.k });
        }
        let s = flat - self.assignment_count();
        if s >= self.slack_count() {
            return None;
        }
        let slice = s / self.slack_per_slice;
        let within = s % self.slack_per_slice;
        let core = self.slack_offsets.partition_point(|&o| o <= within) - 1;
        Some(Variable::Slack { slice, core, slot: within - self.slack_offsets[core] })
    }

    /// Bits for a full assignment table (`table[t][i]` = core), with the
    /// first `min(load, c_j)` slack slots of each core switched on.
    pub fn encode(&self, table: &[Vec<usize>]) -> SolutionVector {
        assert_eq!(table.len(), self.slices, "assignment table has wrong slice count");
        let mut x = SolutionVector::zeros(self.len());
        for (t, row) in table.iter().enumerate() {
            assert_eq!(row.len(), self.n, "assignment row has wrong qubit count");
            let mut load = vec![0usize; self.k];
            for (i, &j) in row.iter().enumerate() {
                x.set(self.assign(t, i, j), true);
                load[j] += 1;
            }
            for (j, &l) in load.iter().enumerate() {
                for s in 0..l.min(self.capacities[j]) {
                    x.set(self.slack(t, j, s), true);
                }
            }
        }
        x
    }
}

/// Binary vector over all assignment and slack variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionVector {
    bits: Vec<bool>,
}

impl SolutionVector {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Low `len` bits of `mask`, variable 0 first.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self { bits: (0..len).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Sparse upper-triangular QUBO: `E(x) = offset + Σ_i Q_ii x_i + Σ_{i<j} Q_ij x_i x_j`.
#[derive(Debug, Clone)]
pub struct QuboProblem<F> {
    index: VariableIndex,
    linear: Vec<F>,
    couplings: Vec<(usize, usize, F)>,
    offset: F,
    lambda: F,
}

#[derive(Default)]
struct Accumulator<F> {
    linear: Vec<F>,
    quad: HashMap<(usize, usize), F>,
    offset: F,
}

impl<F: Scalar> Accumulator<F> {
    fn new(len: usize) -> Self {
        Self { linear: vec![F::zero(); len], quad: HashMap::new(), offset: F::zero() }
    }

    fn add(&mut self, a: usize, b: usize, v: F) {
        if a == b {
            self.linear[a] = self.linear[a] + v;
        } else {
            let e = self.quad.entry((a.min(b), a.max(b))).or_insert_with(F::zero);
            *e = *e + v;
        }
    }
}

/// Weighting parameter `0.99 / (T·n)`.
pub fn default_lambda<F: Scalar>(slices: usize, n: usize) -> F {
    let tn = (slices.max(1) * n.max(1)) as f64;
    F::of_f64(0.99 / tn)
}

/// Assembles `H_a + λ·H_t` for the given slices.
pub fn build<F: Scalar>(
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    lambda: F,
) -> Result<QuboProblem<F>> {
    build_window(slices, topo, dist, lambda, None)
}

/// Like [`build`], optionally charging transfers out of a fixed `boundary`
/// assignment (core per qubit) that precedes the first slice. The boundary
/// cost enters as linear terms `λ·d_jl` on `x^0_il`.
pub fn build_window<F: Scalar>(
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    lambda: F,
    boundary: Option<&[usize]>,
) -> Result<QuboProblem<F>> {
    let n = slices.n();
    check_inputs(n, topo, dist, lambda)?;
    let index = VariableIndex::new(n, slices.len(), topo.capacities());
    let k = index.cores();
    let two = F::of_f64(2.0);
    let mut acc = Accumulator::new(index.len());

    for (t, slice) in slices.slices().iter().enumerate() {
        // one core per qubit: (Σ_j x_ij - 1)²
        for i in 0..n {
            acc.offset = acc.offset + F::one();
            for j in 0..k {
                acc.add(index.assign(t, i, j), index.assign(t, i, j), -F::one());
                for l in j + 1..k {
                    acc.add(index.assign(t, i, j), index.assign(t, i, l), two);
                }
            }
        }
        // capacity: (Σ_i x_ij - Σ_s y_sj)²
        for j in 0..k {
            let terms: Vec<(usize, F)> = (0..n)
                .map(|i| (index.assign(t, i, j), F::one()))
                .chain((0..topo.capacity(j)).map(|s| (index.slack(t, j, s), -F::one())))
                .collect();
            for (a, &(u, su)) in terms.iter().enumerate() {
                acc.add(u, u, su * su);
                for &(v, sv) in &terms[a + 1..] {
                    acc.add(u, v, two * su * sv);
                }
            }
        }
        // co-location: Σ_j x_jᵀ L_t x_j
        let lap = slice.laplacian();
        for j in 0..k {
            for i in 0..n {
                let deg = lap.degree(i);
                if deg > 0 {
                    acc.add(index.assign(t, i, j), index.assign(t, i, j), F::of_u64(deg as u64));
                }
            }
            for &(u, v) in lap.edges() {
                acc.add(index.assign(t, u, j), index.assign(t, v, j), -two);
            }
        }
    }

    // transfers between consecutive slices
    if lambda > F::zero() {
        for t in 1..index.slices() {
            for i in 0..n {
                for j in 0..k {
                    for l in 0..k {
                        let hops = dist.get(j, l);
                        if hops > 0 {
                            acc.add(
                                index.assign(t - 1, i, j),
                                index.assign(t, i, l),
                                lambda * F::of_u64(hops as u64),
                            );
                        }
                    }
                }
            }
        }
        if let (Some(prev), true) = (boundary, index.slices() > 0) {
            assert_eq!(prev.len(), n, "boundary assignment has wrong qubit count");
            for (i, &j) in prev.iter().enumerate() {
                for l in 0..k {
                    let hops = dist.get(j, l);
                    if hops > 0 {
                        let v = index.assign(0, i, l);
                        acc.add(v, v, lambda * F::of_u64(hops as u64));
                    }
                }
            }
        }
    }

    let mut couplings: Vec<(usize, usize, F)> = acc
        .quad
        .into_iter()
        .filter(|&(_, v)| v != F::zero())
        .map(|((a, b), v)| (a, b, v))
        .collect();
    couplings.sort_unstable_by_key(|&(a, b, _)| (a, b));

    Ok(QuboProblem { index, linear: acc.linear, couplings, offset: acc.offset, lambda })
}

fn check_inputs<F: Scalar>(
    n: usize,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    lambda: F,
) -> Result<()> {
    if topo.total_capacity() < n {
        return Err(Error::InfeasibleCapacity { qubits: n, capacity: topo.total_capacity() });
    }
    if lambda.is_nan() || lambda < F::zero() {
        return Err(Error::NegativeLambda(lambda.as_f64()));
    }
    if dist.cores() != topo.cores() {
        return Err(Error::InvalidTopology(format!(
            "distance matrix covers {} cores, topology has {}",
            dist.cores(),
            topo.cores()
        )));
    }
    Ok(())
}

impl<F: Scalar> QuboProblem<F> {
    /// Assembles a problem from raw coefficients; used for hand-made instances.
    pub fn from_parts(
        index: VariableIndex,
        linear: Vec<F>,
        couplings: Vec<(usize, usize, F)>,
        offset: F,
        lambda: F,
    ) -> Self {
        assert_eq!(linear.len(), index.len());
        let mut acc = Accumulator { linear, quad: HashMap::new(), offset };
        for (a, b, v) in couplings {
            acc.add(a, b, v);
        }
        let mut couplings: Vec<_> = acc
            .quad
            .into_iter()
            .filter(|&(_, v)| v != F::zero())
            .map(|((a, b), v)| (a, b, v))
            .collect();
        couplings.sort_unstable_by_key(|&(a, b, _)| (a, b));
        Self { index, linear: acc.linear, couplings, offset: acc.offset, lambda }
    }

    pub fn index(&self) -> &VariableIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn linear(&self) -> &[F] {
        &self.linear
    }

    /// Off-diagonal entries `(i, j, Q_ij)` with `i < j`, sorted.
    pub fn couplings(&self) -> &[(usize, usize, F)] {
        &self.couplings
    }

    pub fn offset(&self) -> F {
        self.offset
    }

    pub fn lambda(&self) -> F {
        self.lambda
    }

    /// Nonzero entries including the diagonal.
    pub fn nnz(&self) -> usize {
        self.linear.iter().filter(|&&v| v != F::zero()).count() + self.couplings.len()
    }

    /// `xᵀQx + offset`.
    pub fn energy(&self, x: &SolutionVector) -> Result<F> {
        if x.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: x.len() });
        }
        let mut e = self.offset;
        for (i, &q) in self.linear.iter().enumerate() {
            if x.get(i) {
                e = e + q;
            }
        }
        for &(a, b, q) in &self.couplings {
            if x.get(a) && x.get(b) {
                e = e + q;
            }
        }
        Ok(e)
    }

    /// Text export: header `# vars <total> offset <value>`, then `i j coeff`
    /// per nonzero entry (diagonal as `i i`), ascending.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# vars {} offset {}", self.len(), self.offset).unwrap();
        let mut entries: Vec<(usize, usize, F)> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != F::zero())
            .map(|(i, &v)| (i, i, v))
            .chain(self.couplings.iter().copied())
            .collect();
        entries.sort_unstable_by_key(|&(a, b, _)| (a, b));
        for (a, b, v) in entries {
            writeln!(out, "{a} {b} {v}").unwrap();
        }
        out
    }
}

/// QUBO read back from the text export, without structural metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RawQubo {
    pub vars: usize,
    pub offset: f64,
    pub entries: Vec<(usize, usize, f64)>,
}

impl RawQubo {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty QUBO file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (vars, offset) = match h.as_slice() {
            ["#", "vars", v, "offset", o] => (
                v.parse().map_err(|_| Error::Parse(format!("bad variable count `{v}`")))?,
                o.parse().map_err(|_| Error::Parse(format!("bad offset `{o}`")))?,
            ),
            _ => return Err(Error::Parse(format!("bad QUBO header `{header}`"))),
        };
        let mut entries = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("bad QUBO entry `{line}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let a: usize = parts[0].parse().map_err(|_| bad())?;
            let b: usize = parts[1].parse().map_err(|_| bad())?;
            let v: f64 = parts[2].parse().map_err(|_| bad())?;
            if a >= vars || b >= vars {
                return Err(bad());
            }
            entries.push((a, b, v));
        }
        Ok(Self { vars, offset, entries })
    }

    pub fn energy(&self, x: &SolutionVector) -> f64 {
        self.offset
            + self
                .entries
                .iter()
                .filter(|&&(a, b, _)| x.get(a) && x.get(b))
                .map(|&(_, _, v)| v)
                .sum::<f64>()
    }
}

/// The three assignment penalties summed over slices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Penalties {
    pub one_core: u64,
    pub capacity: u64,
    pub colocation: u64,
}

impl Penalties {
    pub fn total(&self) -> u64 {
        self.one_core + self.capacity + self.colocation
    }
}

/// `H_a` term by term, straight from the penalty definitions.
pub fn eval_ha_terms(x: &SolutionVector, slices: &SliceSet, topo: &CoreTopology) -> Penalties {
    let index = VariableIndex::new(slices.n(), slices.len(), topo.capacities());
    assert_eq!(x.len(), index.len(), "solution length does not match problem");
    let (n, k) = (index.qubits(), index.cores());
    let mut p = Penalties::default();
    for (t, slice) in slices.slices().iter().enumerate() {
        for i in 0..n {
            let placed = (0..k).filter(|&j| x.get(index.assign(t, i, j))).count() as i64;
            p.one_core += ((placed - 1) * (placed - 1)) as u64;
        }
        for j in 0..k {
            let load = (0..n).filter(|&i| x.get(index.assign(t, i, j))).count() as i64;
            let slack = (0..topo.capacity(j)).filter(|&s| x.get(index.slack(t, j, s))).count() as i64;
            p.capacity += ((load - slack) * (load - slack)) as u64;
            let z: Vec<bool> = (0..n).map(|i| x.get(index.assign(t, i, j))).collect();
            p.colocation += slice.laplacian().quadratic_form(&z) as u64;
        }
    }
    p
}

/// `H_a(x)`; a solution is valid iff this is zero.
pub fn eval_ha(x: &SolutionVector, slices: &SliceSet, topo: &CoreTopology) -> u64 {
    eval_ha_terms(x, slices, topo).total()
}

/// `H_t(x) = Σ_{t≥1} Σ_i Σ_{j≠l} d_jl x^{t-1}_ij x^t_il`.
pub fn eval_ht(x: &SolutionVector, index: &VariableIndex, dist: &DistanceMatrix) -> u64 {
    assert_eq!(x.len(), index.len(), "solution length does not match problem");
    let (n, k) = (index.qubits(), index.cores());
    let mut total = 0u64;
    for t in 1..index.slices() {
        for i in 0..n {
            for j in 0..k {
                if !x.get(index.assign(t - 1, i, j)) {
                    continue;
                }
                for l in 0..k {
                    if l != j && x.get(index.assign(t, i, l)) {
                        total += dist.get(j, l) as u64;
                    }
                }
            }
        }
    }
    total
}
