use levycap::equilibrium::{
    brute_force_simplex, capacity_estimate, min_energy, CapacityControls, CapacityVerdict, SolverControls,
};
use levycap::measure::{riesz_kernel, KernelMatrix, SetGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_psd(rng: &mut ChaCha8Rng) -> KernelMatrix<f64> {
    // B Bᵀ with B ≥ 0 is PSD with nonnegative entries
    let b: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (0..3).map(|l| b[3 * i + l] * b[3 * j + l]).sum::<f64>();
        }
    }
    let max = k.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let rows: Vec<Vec<f64>> = k.iter().map(|r| r.iter().map(|v| v / max).collect()).collect();
    KernelMatrix::from_rows(&rows).unwrap()
}

#[test]
fn solver_matches_lattice_scan_on_random_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let k = random_psd(&mut rng);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        let (_, brute) = brute_force_simplex(&k, 1e-4).unwrap();
        assert!((r.min_energy - brute).abs() <= 1e-6, "{} vs {brute}", r.min_energy);
        assert!(r.min_energy <= brute + 1e-12);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn riesz_interval_capacity_stabilises() {
    let schedule: Vec<SetGrid> = [256, 512, 1024].iter().map(|&n| SetGrid::interval(0.0, 1.0, n)).collect();
    let report = capacity_estimate(
        |m| riesz_kernel(0.5, m.atoms(), m.natural_policy()),
        &schedule,
        &CapacityControls::default(),
    )
    .unwrap();
    let e = report.finest.min_energy;
    assert!(e <= 8.0 / 3.0, "{e}");
    assert!(report.relative_changes[1] < 0.01);
    assert!(matches!(report.verdict, CapacityVerdict::Positive { .. }));
    assert!(report.finest.gap <= 1e-8 * e.max(1.0));
    println!("{:?} {:?}", report.trace, report.finest.iterations);
}

#[test]
fn cantor_verdicts_follow_dimension() {
    let schedule: Vec<SetGrid> = (4..=9).map(SetGrid::cantor).collect();
    for (gamma, positive) in [(0.4, true), (0.8, false)] {
        let report = capacity_estimate(
            |m| riesz_kernel(gamma, m.atoms(), m.natural_policy()),
            &schedule,
            &CapacityControls::default(),
        )
        .unwrap();
        assert_eq!(matches!(report.verdict, CapacityVerdict::Positive { .. }), positive);
        if !positive {
            assert_eq!(report.verdict, CapacityVerdict::Zero);
        }
    }
}
