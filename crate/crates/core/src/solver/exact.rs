use std::time::Instant;

use super::SolveResult;
use crate::architecture::{CoreTopology, DistanceMatrix};
use crate::error::{Error, Result};
use crate::qubo::{self, VariableIndex};
use crate::scalar::Scalar;
use crate::slicer::SliceSet;

/// Limits for the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactBudget {
    /// Valid partitions enumerated for any single slice.
    pub max_partitions: usize,
    /// Total `|S_{t-1}|·|S_t|` pairs visited by the dynamic program.
    pub max_transitions: u64,
}

impl Default for ExactBudget {
    fn default() -> Self {
        Self { max_partitions: 200_000, max_transitions: 400_000_000 }
    }
}

/// Optimal valid placement and its hop-weighted transfer count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOptimum {
    /// `assignment[t][i]` = core of qubit `i` in slice `t`.
    pub assignment: Vec<Vec<usize>>,
    pub hops: u64,
}

/// All placements of one slice that respect co-location and capacities.
///
/// Connected components of the interaction graph move as units. With
/// `canonical`, cores are handed out in first-use order, which enumerates one
/// representative per relabeling class (only sound for uniform capacities).
pub fn valid_partitions(
    slices: &SliceSet,
    t: usize,
    topo: &CoreTopology,
    canonical: bool,
    limit: usize,
) -> Result<Vec<Vec<usize>>> {
    let n = slices.n();
    let comps = slices.get(t).graph().components();
    let k = topo.cores();
    let mut out = Vec::new();
    let mut load = vec![0usize; k];
    let mut assign = vec![usize::MAX; n];

    struct Ctx<'a> {
        comps: &'a [Vec<usize>],
        topo: &'a CoreTopology,
        canonical: bool,
        limit: usize,
    }

    fn rec(
        ctx: &Ctx<'_>,
        c: usize,
        used: usize,
        load: &mut [usize],
        assign: &mut [usize],
        out: &mut Vec<Vec<usize>>,
    ) -> bool {
        if c == ctx.comps.len() {
            if out.len() >= ctx.limit {
                return false;
            }
            out.push(assign.to_vec());
            return true;
        }
        let size = ctx.comps[c].len();
        let k = ctx.topo.cores();
        let upper = if ctx.canonical { (used + 1).min(k) } else { k };
        for j in 0..upper {
            if load[j] + size > ctx.topo.capacity(j) {
                continue;
            }
            load[j] += size;
            for &q in &ctx.comps[c] {
                assign[q] = j;
            }
            let more = rec(ctx, c + 1, used.max(j + 1), load, assign, out);
            load[j] -= size;
            if !more {
                return false;
            }
        }
        true
    }

    let ctx = Ctx { comps: &comps, topo, canonical, limit };
    if !rec(&ctx, 0, 0, &mut load, &mut assign, &mut out) {
        return Err(Error::BudgetExceeded(format!(
            "slice {t} has more than {limit} valid partitions"
        )));
    }
    if out.is_empty() {
        return Err(Error::NoValidPartition { slice: t });
    }
    Ok(out)
}

fn transition_cost(prev: &[usize], next: &[usize], dist: &DistanceMatrix) -> u64 {
    prev.iter().zip(next).map(|(&a, &b)| dist.get(a, b) as u64).sum()
}

/// Minimum hop-weighted transfer count over all valid placements, by
/// shortest path through the per-slice partition lists.
pub fn exact_optimum(
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    budget: ExactBudget,
) -> Result<ExactOptimum> {
    let n = slices.n();
    if topo.total_capacity() < n {
        return Err(Error::InfeasibleCapacity { qubits: n, capacity: topo.total_capacity() });
    }
    if slices.is_empty() {
        return Ok(ExactOptimum { assignment: Vec::new(), hops: 0 });
    }
    // A global relabeling of cores preserves every cost only when all cores
    // look alike, so the first slice may then be restricted to canonical labels.
    let symmetric = topo.is_uniform() && dist.is_uniform();
    let stages: Vec<Vec<Vec<usize>>> = (0..slices.len())
        .map(|t| valid_partitions(slices, t, topo, symmetric && t == 0, budget.max_partitions))
        .collect::<Result<_>>()?;

    let work: u64 = stages.windows(2).map(|w| (w[0].len() * w[1].len()) as u64).sum();
    if work > budget.max_transitions {
        return Err(Error::BudgetExceeded(format!(
            "{work} stage transitions exceed the limit of {}",
            budget.max_transitions
        )));
    }

    let mut cost: Vec<u64> = vec![0; stages[0].len()];
    let mut back: Vec<Vec<usize>> = vec![Vec::new()];
    for t in 1..stages.len() {
        let mut next_cost = vec![u64::MAX; stages[t].len()];
        let mut next_back = vec![0usize; stages[t].len()];
        for (b, to) in stages[t].iter().enumerate() {
            for (a, from) in stages[t - 1].iter().enumerate() {
                let c = cost[a] + transition_cost(from, to, dist);
                if c < next_cost[b] {
                    next_cost[b] = c;
                    next_back[b] = a;
                }
            }
        }
        cost = next_cost;
        back.push(next_back);
    }

    let (mut state, &hops) = cost
        .iter()
        .enumerate()
        .min_by_key(|&(i, &c)| (c, i))
        .expect("non-empty stage");
    let mut assignment = vec![Vec::new(); stages.len()];
    for t in (0..stages.len()).rev() {
        assignment[t] = stages[t][state].clone();
        if t > 0 {
            state = back[t][state];
        }
    }
    Ok(ExactOptimum { assignment, hops })
}

/// Global optimum of `H` over valid assignments, encoded as a full solution
/// vector with slack slots filled to each core's load.
pub fn exact_solve<F: Scalar>(
    slices: &SliceSet,
    topo: &CoreTopology,
    dist: &DistanceMatrix,
    lambda: F,
    budget: ExactBudget,
) -> Result<SolveResult<F>> {
    let start = Instant::now();
    if lambda.is_nan() || lambda < F::zero() {
        return Err(Error::NegativeLambda(lambda.as_f64()));
    }
    let opt = exact_optimum(slices, topo, dist, budget)?;
    let index = VariableIndex::new(slices.n(), slices.len(), topo.capacities());
    let best = index.encode(&opt.assignment);
    let best_energy = F::of_u64(qubo::eval_ha(&best, slices, topo))
        + lambda * F::of_u64(qubo::eval_ht(&best, &index, dist));
    Ok(SolveResult {
        best,
        best_energy,
        read_energies: vec![best_energy],
        wall_time: start.elapsed().as_secs_f64(),
    })
}
