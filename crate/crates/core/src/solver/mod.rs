//! Solvers for the mapping QUBO: simulated annealing, an exact dynamic
//! programming oracle for small instances, and a windowed driver that
//! splits long slice sequences into consecutive sub-problems.

mod anneal;
mod exact;
mod windowed;

pub use anneal::{anneal, beta_range, Adjacency};
pub use exact::{exact_optimum, exact_solve, valid_partitions, ExactBudget, ExactOptimum};
pub use windowed::{solve_windowed, solve_windowed_partial, WindowReport, WindowedSolution};

use crate::qubo::SolutionVector;
use crate::scalar::Scalar;

/// Simulated annealing parameters. `beta_range = None` derives the inverse
/// temperature endpoints from the problem coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealParams<F> {
    pub sweeps: usize,
    pub reads: usize,
    pub beta_range: Option<(F, F)>,
    pub seed: u64,
}

impl<F: Scalar> Default for AnnealParams<F> {
    fn default() -> Self {
        Self { sweeps: 1000, reads: 50, beta_range: None, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult<F> {
    pub best: SolutionVector,
    pub best_energy: F,
    /// Final energy of every read (annealing), or of every window (windowed).
    pub read_energies: Vec<F>,
    /// Seconds.
    pub wall_time: f64,
}

/// SplitMix64 finalizer; derives independent sub-seeds from one seed.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
