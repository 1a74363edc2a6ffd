use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{mix_seed, AnnealParams, SolveResult};
use crate::qubo::{QuboProblem, SolutionVector};
use crate::scalar::Scalar;

/// Compressed neighbour lists of a QUBO, for O(degree) single-flip updates.
#[derive(Debug, Clone)]
pub struct Adjacency<F> {
    linear: Vec<F>,
    starts: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<F>,
}

impl<F: Scalar> Adjacency<F> {
    pub fn of(q: &QuboProblem<F>) -> Self {
        let n = q.len();
        let mut degree = vec![0usize; n];
        for &(a, b, _) in q.couplings() {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut starts = vec![0usize; n + 1];
        for i in 0..n {
            starts[i + 1] = starts[i] + degree[i];
        }
        let mut fill = starts.clone();
        let mut neighbors = vec![0u32; starts[n]];
        let mut weights = vec![F::zero(); starts[n]];
        for &(a, b, w) in q.couplings() {
            neighbors[fill[a]] = b as u32;
            weights[fill[a]] = w;
            fill[a] += 1;
            neighbors[fill[b]] = a as u32;
            weights[fill[b]] = w;
            fill[b] += 1;
        }
        Self { linear: q.linear().to_vec(), starts, neighbors, weights }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let r = self.starts[i]..self.starts[i + 1];
        self.neighbors[r.clone()].iter().map(|&j| j as usize).zip(self.weights[r].iter().copied())
    }

    /// Local fields `h_i = Q_ii + Σ_j Q_ij x_j`; flipping `i` changes the
    /// energy by `±h_i`.
    fn fields(&self, x: &[bool]) -> Vec<F> {
        (0..self.len())
            .map(|i| {
                self.row(i)
                    .filter(|&(j, _)| x[j])
                    .fold(self.linear[i], |acc, (_, w)| acc + w)
            })
            .collect()
    }
}

/// Inverse temperature endpoints `(ln 2 / ΔE_max, ln 100 / ΔE_min)`.
///
/// `ΔE_max` is the largest absolute row sum of Q (the biggest possible
/// single-flip change) and `ΔE_min` the smallest nonzero coefficient
/// magnitude.
pub fn beta_range<F: Scalar>(q: &QuboProblem<F>) -> (F, F) {
    let n = q.len();
    let mut row = q.linear().iter().map(|v| v.abs()).collect::<Vec<F>>();
    let mut min_nonzero = F::infinity();
    for &v in q.linear() {
        if v != F::zero() {
            min_nonzero = min_nonzero.min(v.abs());
        }
    }
    for &(a, b, w) in q.couplings() {
        row[a] = row[a] + w.abs();
        row[b] = row[b] + w.abs();
        min_nonzero = min_nonzero.min(w.abs());
    }
    let max_row = row.into_iter().fold(F::zero(), F::max);
    if n == 0 || max_row == F::zero() {
        return (F::of_f64(0.1), F::one());
    }
    let ln2 = F::of_f64(std::f64::consts::LN_2);
    let ln100 = F::of_f64(100f64.ln());
    (ln2 / max_row, ln100 / min_nonzero)
}

fn schedule<F: Scalar>(sweeps: usize, (lo, hi): (F, F)) -> Vec<F> {
    if sweeps <= 1 {
        return vec![hi; sweeps];
    }
    let ratio = hi / lo;
    let last = F::of_u64((sweeps - 1) as u64);
    (0..sweeps).map(|s| lo * ratio.powf(F::of_u64(s as u64) / last)).collect()
}

/// One Metropolis chain; returns the lowest-energy state it visited.
fn run_read<F: Scalar>(adj: &Adjacency<F>, betas: &[F], seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = adj.len();
    let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut h = adj.fields(&x);
    // energy relative to the start state; only differences matter
    let mut e = F::zero();
    let mut best_e = F::zero();
    let mut best = x.clone();
    for &beta in betas {
        for i in 0..n {
            let delta = if x[i] { -h[i] } else { h[i] };
            let accept = delta <= F::zero() || {
                let p = (-beta * delta).exp();
                p > F::zero() && F::of_f64(rng.gen::<f64>()) < p
            };
            if accept {
                x[i] = !x[i];
                e = e + delta;
                let s = if x[i] { F::one() } else { -F::one() };
                for (j, w) in adj.row(i) {
                    h[j] = h[j] + s * w;
                }
                if e < best_e {
                    best_e = e;
                    best.copy_from_slice(&x);
                }
            }
        }
    }
    best
}

/// Independent single-bit-flip Metropolis chains over a geometric inverse
/// temperature schedule. Reads run in parallel; read `r` is seeded from
/// `(seed, r)` so the result does not depend on scheduling. Ties go to the
/// lowest read index.
pub fn anneal<F: Scalar>(q: &QuboProblem<F>, p: &AnnealParams<F>) -> SolveResult<F> {
    let start = Instant::now();
    let adj = Adjacency::of(q);
    let range = p.beta_range.unwrap_or_else(|| beta_range(q));
    assert!(
        range.0 > F::zero() && range.0 < range.1,
        "beta range must satisfy 0 < beta_min < beta_max"
    );
    let betas = schedule(p.sweeps, range);
    let reads = p.reads.max(1);

    let states: Vec<Vec<bool>> = (0..reads)
        .into_par_iter()
        .map(|r| run_read(&adj, &betas, mix_seed(p.seed, r as u64)))
        .collect();

    let mut read_energies = Vec::with_capacity(reads);
    let mut best = 0;
    for (r, s) in states.iter().enumerate() {
        let e = q.energy(&SolutionVector::from_bits(s.clone())).expect("length matches");
        if r > 0 && e < read_energies[best] {
            best = r;
        }
        read_energies.push(e);
    }
    let best_vec = SolutionVector::from_bits(states.into_iter().nth(best).unwrap_or_default());
    let best_energy = q.energy(&best_vec).expect("length matches");
    SolveResult { best: best_vec, best_energy, read_energies, wall_time: start.elapsed().as_secs_f64() }
}
