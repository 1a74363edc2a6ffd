#![allow(dead_code)]

use qmap_core::{Circuit, CoreTopology, Gate, SliceSet};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random small mapping instance: disjoint pairs per slice on a random
/// connected core graph with enough total capacity for every qubit.
pub struct Instance {
    pub slices: SliceSet,
    pub topo: CoreTopology,
}

pub fn random_topology<R: Rng>(rng: &mut R, k: usize, n: usize, cap_max: usize) -> CoreTopology {
    let caps: Vec<usize> = loop {
        let c: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=cap_max.max(2))).collect();
        if c.iter().sum::<usize>() >= n {
            break c;
        }
    };
    let mut links: Vec<(usize, usize)> = (1..k).map(|j| (rng.gen_range(0..j), j)).collect();
    for a in 0..k {
        for b in a + 1..k {
            if !links.contains(&(a, b)) && rng.gen_bool(0.3) {
                links.push((a, b));
            }
        }
    }
    CoreTopology::new(caps, links).unwrap()
}

pub fn random_slices<R: Rng>(rng: &mut R, n: usize, t: usize) -> SliceSet {
    let slices = (0..t)
        .map(|_| {
            let mut q: Vec<usize> = (0..n).collect();
            q.shuffle(rng);
            let m = rng.gen_range(1..=(n / 2).max(1));
            q.chunks_exact(2).take(m).map(|p| Gate::pair(p[0], p[1])).collect()
        })
        .collect();
    SliceSet::from_slices(n, slices).unwrap()
}

pub fn random_instance<R: Rng>(rng: &mut R, n_max: usize, k_max: usize, t_max: usize) -> Instance {
    let n = rng.gen_range(2..=n_max);
    let k = rng.gen_range(2..=k_max);
    let t = rng.gen_range(1..=t_max);
    let topo = random_topology(rng, k, n, 4);
    let slices = random_slices(rng, n, t);
    Instance { slices, topo }
}

/// Random valid-or-not assignment table `table[t][i]`.
pub fn random_table<R: Rng>(rng: &mut R, n: usize, t: usize, k: usize) -> Vec<Vec<usize>> {
    (0..t).map(|_| (0..n).map(|_| rng.gen_range(0..k)).collect()).collect()
}

/// Random circuit of 1-, 2- and 3-qubit gates on `n` qubits.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, gates: usize) -> Circuit {
    let tuples = (0..gates)
        .map(|_| {
            let w = match rng.gen_range(0..10) {
                0..=1 => 1,
                2..=8 => 2,
                _ => 3,
            }
            .min(n);
            let mut q: Vec<usize> = (0..n).collect();
            q.shuffle(rng);
            q.truncate(w);
            q
        })
        .collect();
    Circuit::from_tuples(n, tuples).unwrap()
}

/// Independent slicing reference: each multi-qubit gate lands one slice
/// above the latest slice touching any of its qubits, unless that slice
/// already holds a gate on the same qubit set.
pub fn reference_slices(circuit: &Circuit) -> (Vec<Vec<Vec<usize>>>, usize) {
    let mut last: Vec<Option<usize>> = vec![None; circuit.n()];
    let mut slices: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut dropped = 0;
    for g in circuit.multi_qubit_gates() {
        let key = g.key();
        let s = g.qubits().iter().filter_map(|&q| last[q]).max();
        let target = match s {
            Some(s) if slices[s].iter().any(|h| {
                let mut h = h.clone();
                h.sort_unstable();
                h == key
            }) => {
                dropped += 1;
                continue;
            }
            Some(s) => s + 1,
            None => 0,
        };
        if target == slices.len() {
            slices.push(Vec::new());
        }
        slices[target].push(g.qubits().to_vec());
        for &q in g.qubits() {
            last[q] = Some(target);
        }
    }
    (slices, dropped)
}
