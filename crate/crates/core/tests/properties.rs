mod common;

use common::{random_circuit, random_instance, random_table, reference_slices};
use proptest::prelude::*;
use qmap_core::mapper::{self, Decoded};
use qmap_core::qubo::{self, eval_ha, eval_ht};
use qmap_core::solver::{self, anneal, solve_windowed_partial};
use qmap_core::{slicer, AnnealParams, Mapping, VariableIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_inverts_encode(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 6, 4, 5);
        let (n, t, k) = (inst.slices.n(), inst.slices.len(), inst.topo.cores());
        let index = VariableIndex::new(n, t, inst.topo.capacities());
        let table = random_table(&mut rng, n, t, k);
        let x = index.encode(&table);
        match mapper::decode(&x, &index).unwrap() {
            Decoded::Mapping(m) => prop_assert_eq!(m.rows(), &table[..]),
            Decoded::Diagnosis(d) => prop_assert!(false, "diagnosis {:?}", d),
        }
    }

    #[test]
    fn validate_agrees_with_penalty(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 6, 3, 4);
        let (n, t, k) = (inst.slices.n(), inst.slices.len(), inst.topo.cores());
        let index = VariableIndex::new(n, t, inst.topo.capacities());
        let table = random_table(&mut rng, n, t, k);
        let x = index.encode(&table);
        let violations = mapper::validate(&Mapping::new(table), &inst.slices, &inst.topo);
        prop_assert_eq!(violations.is_empty(), eval_ha(&x, &inst.slices, &inst.topo) == 0);
    }

    #[test]
    fn transfer_cost_matches_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 6, 4, 5);
        let (n, t, k) = (inst.slices.n(), inst.slices.len(), inst.topo.cores());
        let dist = inst.topo.hop_matrix().unwrap();
        let index = VariableIndex::new(n, t, inst.topo.capacities());
        let table = random_table(&mut rng, n, t, k);
        let x = index.encode(&table);
        let summary = mapper::transfers(&Mapping::new(table), &dist);
        prop_assert_eq!(summary.m, eval_ht(&x, &index, &dist));
    }

    #[test]
    fn f32_and_f64_agree_on_energy(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 5, 3, 3);
        let dist = inst.topo.hop_matrix().unwrap();
        let q64 = qubo::build::<f64>(&inst.slices, &inst.topo, &dist, 0.125).unwrap();
        let q32 = qubo::build::<f32>(&inst.slices, &inst.topo, &dist, 0.125).unwrap();
        let x = qmap_core::SolutionVector::from_bits(
            (0..q64.len()).map(|_| rand::Rng::gen_bool(&mut rng, 0.3)).collect(),
        );
        let e64 = q64.energy(&x).unwrap();
        let e32 = q32.energy(&x).unwrap() as f64;
        prop_assert!((e64 - e32).abs() <= 1e-4 * e64.abs().max(1.0));
    }
}

#[test]
fn slicer_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let n = rand::Rng::gen_range(&mut rng, 2..=8);
        let g = rand::Rng::gen_range(&mut rng, 0..=30);
        let c = random_circuit(&mut rng, n, g);
        let s = slicer::slice(&c);
        let (expected, dropped) = reference_slices(&c);
        let got: Vec<Vec<Vec<usize>>> =
            s.slices().iter().map(|sl| sl.gates().iter().map(|g| g.qubits().to_vec()).collect()).collect();
        assert_eq!(got, expected);
        assert_eq!(s.dropped_duplicates(), dropped);
    }
}

#[test]
fn single_window_equals_plain_anneal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inst = random_instance(&mut rng, 5, 3, 3);
    let dist = inst.topo.hop_matrix().unwrap();
    let lambda = qubo::default_lambda::<f64>(inst.slices.len(), inst.slices.n());
    let q = qubo::build(&inst.slices, &inst.topo, &dist, lambda).unwrap();
    let params = AnnealParams { sweeps: 200, reads: 8, seed: 5, ..Default::default() };
    let plain = anneal(&q, &params);
    let windowed = solve_windowed_partial(&inst.slices, &inst.topo, &dist, lambda, q.len(), &params).unwrap();
    assert_eq!(windowed.windows.len(), 1);
    if windowed.windows[0].attempts == 1 {
        assert_eq!(windowed.result.best, plain.best);
    }
}

#[test]
fn windowed_energy_accounting() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let inst = random_instance(&mut rng, 5, 3, 6);
        let dist = inst.topo.hop_matrix().unwrap();
        let lambda = qubo::default_lambda::<f64>(inst.slices.len(), inst.slices.n());
        let index = VariableIndex::new(inst.slices.n(), inst.slices.len(), inst.topo.capacities());
        let params = AnnealParams { sweeps: 300, reads: 10, seed: 1, ..Default::default() };
        let w = solve_windowed_partial(&inst.slices, &inst.topo, &dist, lambda, 2 * index.per_slice(), &params)
            .unwrap();
        let full = qubo::build(&inst.slices, &inst.topo, &dist, lambda).unwrap();
        let e = full.energy(&w.result.best).unwrap();
        assert!((e - w.result.best_energy).abs() < 1e-9);
        if w.failed_window.is_none() {
            let sum: f64 = w.windows.iter().map(|r| r.interior_energy + r.boundary_energy).sum();
            assert!((e - sum).abs() < 1e-9, "{e} vs {sum}");
        }
    }
}

#[test]
fn exact_solution_is_valid_and_optimal_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10 {
        let inst = random_instance(&mut rng, 5, 3, 3);
        let dist = inst.topo.hop_matrix().unwrap();
        let r = solver::exact_solve::<f64>(&inst.slices, &inst.topo, &dist, 0.05, Default::default()).unwrap();
        assert_eq!(eval_ha(&r.best, &inst.slices, &inst.topo), 0);
        let q = qubo::build(&inst.slices, &inst.topo, &dist, 0.05).unwrap();
        assert!((q.energy(&r.best).unwrap() - r.best_energy).abs() < 1e-9);
    }
}
