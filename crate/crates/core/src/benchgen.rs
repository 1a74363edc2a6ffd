//! Benchmark circuit families, emitted as multi-qubit interaction sequences.
//!
//! Controlled-phase gates become two interactions on the same pair and
//! Toffoli gates a fixed six-CNOT pattern on their triple; only which
//! qubits interact, and in which order, matters for mapping. Single-qubit
//! gates are emitted only where they shape depth (Toffoli interiors).

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Qft,
    MultiTarget,
    CuccaroAdder,
    DraperAdder,
    Random,
    QuantumVolume,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Qft,
        Family::MultiTarget,
        Family::CuccaroAdder,
        Family::DraperAdder,
        Family::Random,
        Family::QuantumVolume,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Qft => "qft",
            Family::MultiTarget => "multi_target",
            Family::CuccaroAdder => "cuccaro_adder",
            Family::DraperAdder => "draper_adder",
            Family::Random => "random",
            Family::QuantumVolume => "quantum_volume",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidBenchmark(format!("unknown family `{s}`")))
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Depth intervals of the random presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomPreset {
    Xs,
    S,
    M,
    L,
}

impl RandomPreset {
    pub fn depth_range(self) -> (usize, usize) {
        match self {
            RandomPreset::Xs => (13, 19),
            RandomPreset::S => (38, 54),
            RandomPreset::M => (88, 120),
            RandomPreset::L => (529, 596),
        }
    }
}

impl FromStr for RandomPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "XS" => Ok(Self::Xs),
            "S" => Ok(Self::S),
            "M" => Ok(Self::M),
            "L" => Ok(Self::L),
            _ => Err(Error::InvalidBenchmark(format!("unknown preset `{s}`"))),
        }
    }
}

/// One benchmark request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchSpec {
    pub family: Family,
    pub n: usize,
    pub depth: Option<usize>,
    pub layers: Option<usize>,
    pub preset: Option<RandomPreset>,
    pub seed: u64,
}

impl BenchSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n, depth: None, layers: None, preset: None, seed: 0 }
    }

    pub fn generate(&self) -> Result<Circuit> {
        match self.family {
            Family::Qft => qft(self.n),
            Family::MultiTarget => multi_target(self.n),
            Family::CuccaroAdder => cuccaro_adder(self.n),
            Family::DraperAdder => draper_adder(self.n),
            Family::Random => {
                let depth = match (self.depth, self.preset) {
                    (Some(d), _) => d,
                    (None, Some(p)) => {
                        let (lo, hi) = p.depth_range();
                        ChaCha8Rng::seed_from_u64(self.seed).gen_range(lo..=hi)
                    }
                    (None, None) => self.n,
                };
                random_circuit(self.n, depth, self.seed)
            }
            Family::QuantumVolume => quantum_volume(self.n, self.layers.unwrap_or(self.n), self.seed),
        }
    }
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidBenchmark(msg()))
    }
}

fn build(n: usize, pairs: Vec<(usize, usize)>) -> Result<Circuit> {
    Circuit::new(n, pairs.into_iter().map(|(a, b)| Gate::pair(a, b)).collect())
}

/// `(0, i)` for `i = 1..n`.
pub fn multi_target(n: usize) -> Result<Circuit> {
    need(n >= 2, || format!("multi_target needs n >= 2, got {n}"))?;
    build(n, (1..n).map(|i| (0, i)).collect())
}

/// Two interactions per controlled phase `(i, j)`, `j > i`, target-major.
pub fn qft(n: usize) -> Result<Circuit> {
    need(n >= 2, || format!("qft needs n >= 2, got {n}"))?;
    let mut pairs = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            pairs.push((i, j));
        }
    }
    build(n, pairs)
}

// Toffoli(c1, c2, t) in the standard six-CNOT decomposition, with its
// H/T/T† gates kept as single-qubit entries so depth stays realistic.
fn toffoli(out: &mut Vec<Gate>, c1: usize, c2: usize, t: usize) {
    let one = |q| Gate::new(vec![q]).expect("single qubit");
    out.extend([
        one(t),
        Gate::pair(c2, t),
        one(t),
        Gate::pair(c1, t),
        one(t),
        Gate::pair(c2, t),
        one(t),
        Gate::pair(c1, t),
        one(c2),
        one(t),
        one(t),
        Gate::pair(c1, c2),
        one(c1),
        one(c2),
        Gate::pair(c1, c2),
    ]);
}

/// Ripple-carry adder without carry-out on `n = 2m + 1` qubits laid out as
/// `[cin, a_0..a_m, b_0..b_m]`.
pub fn cuccaro_adder(n: usize) -> Result<Circuit> {
    need(n >= 3 && n % 2 == 1, || format!("cuccaro_adder needs odd n >= 3, got {n}"))?;
    let m = (n - 1) / 2;
    let cin = 0;
    let a = |i: usize| 1 + i;
    let b = |i: usize| 1 + m + i;
    let mut g = Vec::new();

    // MAJ(c, b, a): CX(a,b) CX(a,c) CCX(c,b,a)
    let maj = |g: &mut Vec<Gate>, c: usize, bq: usize, aq: usize| {
        g.push(Gate::pair(aq, bq));
        g.push(Gate::pair(aq, c));
        toffoli(g, c, bq, aq);
    };
    // UMA(c, b, a): CCX(c,b,a) CX(a,c) CX(c,b)
    let uma = |g: &mut Vec<Gate>, c: usize, bq: usize, aq: usize| {
        toffoli(g, c, bq, aq);
        g.push(Gate::pair(aq, c));
        g.push(Gate::pair(c, bq));
    };

    maj(&mut g, cin, b(0), a(0));
    for i in 1..m {
        maj(&mut g, a(i - 1), b(i), a(i));
    }
    for i in (1..m).rev() {
        uma(&mut g, a(i - 1), b(i), a(i));
    }
    uma(&mut g, cin, b(0), a(0));
    Circuit::new(n, g)
}

/// QFT-based adder on `n = 2m` qubits `[a_0..a_m, b_0..b_m]`: QFT on `b`
/// without swaps, phase additions from `a`, inverse QFT.
pub fn draper_adder(n: usize) -> Result<Circuit> {
    need(n >= 2 && n.is_multiple_of(2), || format!("draper_adder needs even n >= 2, got {n}"))?;
    let m = n / 2;
    let a = |i: usize| i;
    let b = |i: usize| m + i;
    let mut qft_part = Vec::new();
    for j in (0..m).rev() {
        for k in (0..j).rev() {
            qft_part.push((b(j), b(k)));
            qft_part.push((b(j), b(k)));
        }
    }
    let mut g = qft_part.clone();
    for j in 0..m {
        for k in 0..m - j {
            g.push((a(j), b(j + k)));
            g.push((a(j), b(j + k)));
        }
    }
    g.extend(qft_part.into_iter().rev());
    build(n, g)
}

/// Each layer is a uniformly random maximal pairing of the qubits.
pub fn random_circuit(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    need(n >= 2, || format!("random needs n >= 2, got {n}"))?;
    need(depth >= 1, || "random needs depth >= 1".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(depth * (n / 2));
    for _ in 0..depth {
        order.shuffle(&mut rng);
        pairs.extend(order.chunks_exact(2).map(|p| (p[0], p[1])));
    }
    build(n, pairs)
}

/// Per layer a random permutation, adjacent qubits paired, three
/// interactions per pair (one SU(4) block).
pub fn quantum_volume(n: usize, layers: usize, seed: u64) -> Result<Circuit> {
    need(n >= 2, || format!("quantum_volume needs n >= 2, got {n}"))?;
    need(layers >= 1, || "quantum_volume needs at least one layer".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(layers * (n / 2) * 3);
    for _ in 0..layers {
        perm.shuffle(&mut rng);
        for p in perm.chunks_exact(2) {
            for _ in 0..3 {
                pairs.push((p[0], p[1]));
            }
        }
    }
    build(n, pairs)
}
