use qmap_core::solver::anneal;
use qmap_core::{AnnealParams, QuboProblem, SolutionVector, VariableIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn finds_ground_state_of_random_dense_qubos() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let n = 16;
        let index = VariableIndex::new(n - 1, 1, &[1]);
        let linear: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut couplings = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.4) {
                    couplings.push((a, b, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let q = QuboProblem::from_parts(index, linear, couplings, 0.0, 0.0);
        let brute = (0..1u64 << n)
            .map(|m| q.energy(&SolutionVector::from_mask(m, n)).unwrap())
            .fold(f64::INFINITY, f64::min);
        let r = anneal(&q, &AnnealParams { sweeps: 500, reads: 20, ..Default::default() });
        assert!((r.best_energy - brute).abs() < 1e-9, "{} vs {brute}", r.best_energy);
    }
}
