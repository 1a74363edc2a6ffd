//! Layering of a circuit into slices of concurrently executable gates.
//!
//! Each multi-qubit gate descends from the first empty slice towards slice 0
//! until it meets a slice that either already holds the same gate (it is
//! dropped) or uses one of its qubits (it lands one slice above). Reaching
//! slice 0 without meeting either places it there.

use serde::Serialize;

use crate::circuit::{Circuit, Gate, InteractionGraph, Laplacian};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Slice {
    gates: Vec<Gate>,
    graph: InteractionGraph,
    laplacian: Laplacian,
}

impl Slice {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }
}

#[derive(Debug, Clone)]
pub struct SliceSet {
    n: usize,
    slices: Vec<Slice>,
    dropped_duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceStats {
    #[serde(rename = "T")]
    pub slices: usize,
    pub gates_per_slice: Vec<usize>,
    pub max_parallelism: usize,
    pub dropped_duplicates: usize,
}

struct Builder {
    gates: Vec<Gate>,
    busy: Vec<bool>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self { gates: Vec::new(), busy: vec![false; n] }
    }

    fn contains(&self, gate: &Gate) -> bool {
        self.gates.iter().any(|g| g.same_qubits(gate))
    }

    fn conflicts(&self, gate: &Gate) -> bool {
        gate.qubits().iter().any(|&q| self.busy[q])
    }

    fn finish(self, n: usize) -> Slice {
        let graph = InteractionGraph::from_gates(n, &self.gates);
        let laplacian = graph.laplacian();
        Slice { gates: self.gates, graph, laplacian }
    }

    fn push(&mut self, gate: Gate) {
        for &q in gate.qubits() {
            self.busy[q] = true;
        }
        self.gates.push(gate);
    }
}

/// Slices the multi-qubit gates of `circuit`; single-qubit gates are skipped.
pub fn slice(circuit: &Circuit) -> SliceSet {
    let n = circuit.n();
    let mut layers: Vec<Builder> = Vec::new();
    let mut dropped = 0;

    for gate in circuit.multi_qubit_gates() {
        // layers[layers.len()] is the first empty slice; it never matches, so
        // start the descent one below it.
        let mut target = 0;
        let mut level = layers.len();
        while level > 0 {
            let below = &layers[level - 1];
            if below.contains(gate) {
                target = usize::MAX;
                break;
            }
            if below.conflicts(gate) {
                target = level;
                break;
            }
            level -= 1;
        }
        if target == usize::MAX {
            dropped += 1;
            continue;
        }
        if target == layers.len() {
            layers.push(Builder::new(n));
        }
        layers[target].push(gate.clone());
    }

    let slices = layers.into_iter().map(|b| b.finish(n)).collect();

    SliceSet { n, slices, dropped_duplicates: dropped }
}

impl SliceSet {
    /// Builds a slice set from explicit per-slice gate lists. Gates inside a
    /// slice must act on disjoint qubits; empty slices are accepted here.
    pub fn from_slices(n: usize, slices: Vec<Vec<Gate>>) -> Result<Self> {
        let mut idx = 0;
        let mut out = Vec::with_capacity(slices.len());
        for gates in slices {
            let mut b = Builder::new(n);
            for g in gates {
                if let Some(&q) = g.qubits().iter().find(|&&q| q >= n) {
                    return Err(Error::QubitOutOfRange { gate: idx, qubit: q, n });
                }
                if b.conflicts(&g) {
                    return Err(Error::Malformed(format!("gate {idx} overlaps another gate in its slice")));
                }
                b.push(g);
                idx += 1;
            }
            out.push(b.finish(n));
        }
        Ok(Self { n, slices: out, dropped_duplicates: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of slices `T`.
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn get(&self, t: usize) -> &Slice {
        &self.slices[t]
    }

    pub fn dropped_duplicates(&self) -> usize {
        self.dropped_duplicates
    }

    /// Sub-range of slices as a new set (used for windowed solving).
    pub fn window(&self, range: std::ops::Range<usize>) -> SliceSet {
        SliceSet {
            n: self.n,
            slices: self.slices[range].to_vec(),
            dropped_duplicates: 0,
        }
    }

    pub fn stats(&self) -> SliceStats {
        let gates_per_slice: Vec<usize> = self.slices.iter().map(|s| s.gates.len()).collect();
        SliceStats {
            slices: self.slices.len(),
            max_parallelism: gates_per_slice.iter().copied().max().unwrap_or(0),
            gates_per_slice,
            dropped_duplicates: self.dropped_duplicates,
        }
    }

    /// Rejects gates wider than the largest core.
    pub fn check_gate_widths(&self, max_capacity: usize) -> Result<()> {
        let mut idx = 0;
        for s in &self.slices {
            for g in &s.gates {
                if g.width() > max_capacity {
                    return Err(Error::UnmappableGate { gate: idx, width: g.width(), max_capacity });
                }
                idx += 1;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(n: usize, gates: &[&[usize]]) -> Circuit {
        Circuit::from_tuples(n, gates.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    fn keys(s: &SliceSet) -> Vec<Vec<Vec<usize>>> {
        s.slices().iter().map(|sl| sl.gates().iter().map(|g| g.qubits().to_vec()).collect()).collect()
    }

    #[test]
    fn six_qubit_example_gives_three_slices() {
        let c = circuit(6, &[&[0, 1], &[2, 4, 5], &[0, 4], &[2, 5], &[1, 3], &[0, 3, 5], &[2, 4]]);
        let s = slice(&c);
        assert_eq!(
            keys(&s),
            vec![
                vec![vec![0, 1], vec![2, 4, 5]],
                vec![vec![0, 4], vec![2, 5], vec![1, 3]],
                vec![vec![0, 3, 5], vec![2, 4]],
            ]
        );
        assert_eq!(s.stats().slices, 3);
    }

    #[test]
    fn repeated_gate_is_dropped() {
        let s = slice(&circuit(2, &[&[0, 1], &[0, 1]]));
        assert_eq!(keys(&s), vec![vec![vec![0, 1]]]);
        assert_eq!(s.dropped_duplicates(), 1);

        let s = slice(&circuit(2, &[&[0, 1], &[1, 0]]));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn conflict_opens_next_slice() {
        let s = slice(&circuit(4, &[&[0, 1], &[2, 3], &[0, 2]]));
        assert_eq!(keys(&s), vec![vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2]]]);
    }

    #[test]
    fn duplicate_found_during_descent() {
        let s = slice(&circuit(6, &[&[0, 1], &[2, 3], &[4, 5], &[2, 3]]));
        assert_eq!(keys(&s), vec![vec![vec![0, 1], vec![2, 3], vec![4, 5]]]);
        assert_eq!(s.dropped_duplicates(), 1);
    }

    #[test]
    fn duplicate_behind_a_conflict_is_kept() {
        let s = slice(&circuit(3, &[&[0, 1], &[1, 2], &[0, 1]]));
        assert_eq!(s.len(), 3);
        assert_eq!(s.dropped_duplicates(), 0);
    }

    #[test]
    fn stats_edge_cases() {
        let s = slice(&circuit(2, &[&[0, 1]]));
        let st = s.stats();
        assert_eq!((st.slices, st.max_parallelism), (1, 1));

        let s = slice(&circuit(3, &[&[0], &[2]]));
        assert_eq!(s.stats().slices, 0);
        assert!(s.is_empty());
    }

    #[test]
    fn wide_gate_rejected() {
        let s = slice(&circuit(4, &[&[0, 1, 2]]));
        assert!(matches!(s.check_gate_widths(2), Err(Error::UnmappableGate { width: 3, .. })));
        assert!(s.check_gate_widths(3).is_ok());
    }
}
