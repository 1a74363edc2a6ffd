use std::ops::Range;
use std::time::Instant;

use super::{anneal, mix_seed, AnnealParams, SolveResult};
use crate::architecture::{CoreTopology, DistanceMatrix};
use crate::error::{Error, Result};
use crate::qubo::{self, SolutionVector, VariableIndex};
use crate::scalar::Scalar;
use crate::slicer::SliceSet;

/// Bookkeeping for one window of a windowed solve.
#[derive(Debug, Clone)]
pub struct WindowReport<F> {
    pub slices: Range<usize>,
    /// Energy of the window problem, boundary terms included.
    pub energy: F,
    /// Energy of the window problem built without a boundary.
    pub interior_energy: F,
    /// `λ · Σ_i d(core before window, core in first window slice)`.
    pub boundary_energy: F,
    /// `H_a` of the window solution.
    pub penalty: u64,
    /// Annealing attempts spent (2 when the retry was needed).
    pub attempts: usize,
}

#[derive(Debug, Clone)]
pub struct WindowedSolution<F> {
    pub result: SolveResult<F>,
    pub windows: Vec<WindowReport<F>>,
    /// First window that stayed invalid after its retry.
    pub failed_window: Option<usize>,
}

fn window_ranges(total: usize, per_window: usize) -> Vec<Range<usize>> {
    (0..total).step_by(per_window).map(|a| a..(a + per_window).min(total)).collect()
}

/// Core of every qubit in the last slice of a window solution; qubits
/// without exactly one core fall back to the lowest set core or core 0.
fn last_slice_cores(x: &SolutionVector, index: &VariableIndex) -> Vec<usize> {
    let t = index.slices() - 1;
    (0..index.qubits())
        .map(|i| (0..index.cores()).find(|&j| x.get(index.assign(t, i, j))).unwrap_or(0))
        .collect()
}

/// Windowed solve that always returns the stitched vector; a window that
/// stays invalid after one retry with four times the reads is flagged in
/// `failed_window` and the remaining windows are still solved.
pub fn solve_windowed_partial<F: Scalar>(
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    lambda: F,
    window_vars_budget: usize,
    params: &AnnealParams<F>,
) -> Result<WindowedSolution<F>> {
    let start = Instant::now();
    let full = VariableIndex::new(slices.n(), slices.len(), topo.capacities());
    let per_slice = full.per_slice();
    let per_window = window_vars_budget / per_slice.max(1);
    if per_window == 0 {
        return Err(Error::WindowTooSmall { budget: window_vars_budget, per_slice });
    }

    let mut stitched = SolutionVector::zeros(full.len());
    let mut windows = Vec::new();
    let mut failed_window = None;
    let mut boundary: Option<Vec<usize>> = None;

    for (w, range) in window_ranges(slices.len(), per_window).into_iter().enumerate() {
        let sub = slices.window(range.clone());
        let problem = qubo::build_window(&sub, topo, dist, lambda, boundary.as_deref())?;

        let seed = if w == 0 { params.seed } else { mix_seed(params.seed, 1 << 32 | w as u64) };
        let mut result = anneal(&problem, &AnnealParams { seed, ..params.clone() });
        let mut penalty = qubo::eval_ha(&result.best, &sub, topo);
        let mut attempts = 1;
        if penalty > 0 {
            let retry = AnnealParams {
                reads: params.reads * 4,
                seed: mix_seed(params.seed, 2 << 32 | w as u64),
                ..params.clone()
            };
            result = anneal(&problem, &retry);
            penalty = qubo::eval_ha(&result.best, &sub, topo);
            attempts = 2;
        }
        if penalty > 0 && failed_window.is_none() {
            failed_window = Some(w);
        }

        let interior = qubo::build_window(&sub, topo, dist, lambda, None)?
            .energy(&result.best)
            .expect("same layout");
        let sub_index = problem.index();
        let boundary_hops: u64 = match &boundary {
            Some(prev) => prev
                .iter()
                .enumerate()
                .map(|(i, &j)| {
                    (0..sub_index.cores())
                        .filter(|&l| result.best.get(sub_index.assign(0, i, l)))
                        .map(|l| dist.get(j, l) as u64)
                        .sum::<u64>()
                })
                .sum(),
            None => 0,
        };

        copy_window(&result.best, sub_index, &mut stitched, &full, range.start);
        boundary = Some(last_slice_cores(&result.best, sub_index));
        windows.push(WindowReport {
            slices: range,
            energy: result.best_energy,
            interior_energy: interior,
            boundary_energy: lambda * F::of_u64(boundary_hops),
            penalty,
            attempts,
        });
    }

    let best_energy = F::of_u64(qubo::eval_ha(&stitched, slices, topo))
        + lambda * F::of_u64(qubo::eval_ht(&stitched, &full, dist));
    Ok(WindowedSolution {
        result: SolveResult {
            best: stitched,
            best_energy,
            read_energies: windows.iter().map(|w| w.energy).collect(),
            wall_time: start.elapsed().as_secs_f64(),
        },
        windows,
        failed_window,
    })
}

/// Divide-and-conquer solve over consecutive slice windows of at most
/// `window_vars_budget` variables each. Every window after the first sees
/// the previous window's final placement as fixed linear transfer costs.
pub fn solve_windowed<F: Scalar>(
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    lambda: F,
    window_vars_budget: usize,
    params: &AnnealParams<F>,
) -> Result<WindowedSolution<F>> {
    let sol = solve_windowed_partial(slices, topo, dist, lambda, window_vars_budget, params)?;
    match sol.failed_window {
        Some(w) => Err(Error::WindowFailed { window: w, penalty: sol.windows[w].penalty }),
        None => Ok(sol),
    }
}

fn copy_window(
    part: &SolutionVector,
    part_index: &VariableIndex,
    full: &mut SolutionVector,
    full_index: &VariableIndex,
    first_slice: usize,
) {
    for t in 0..part_index.slices() {
        for j in 0..part_index.cores() {
            for i in 0..part_index.qubits() {
                full.set(full_index.assign(first_slice + t, i, j), part.get(part_index.assign(t, i, j)));
            }
            for s in 0..part_index.capacities()[j] {
                full.set(full_index.slack(first_slice + t, j, s), part.get(part_index.slack(t, j, s)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_all_slices() {
        assert_eq!(window_ranges(6, 2), vec![0..2, 2..4, 4..6]);
        assert_eq!(window_ranges(7, 3), vec![0..3, 3..6, 6..7]);
        assert_eq!(window_ranges(2, 10), vec![0..2]);
        assert!(window_ranges(0, 3).is_empty());
    }
}
