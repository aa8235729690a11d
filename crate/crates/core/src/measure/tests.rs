use super::*;
use std::f64::consts::PI;

fn half_half() -> DiscreteMeasure<f64> {
    DiscreteMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()
}

#[test]
fn measure_invariants() {
    assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
    assert!(DiscreteMeasure::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    assert!(DiscreteMeasure::new(vec![-1.0, 0.0], vec![0.5, 0.5]).is_err());
    assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    let m = SetGrid::interval(0.0, 1.0, 4).measure::<f64>().unwrap();
    assert_eq!(m.atoms(), &[0.125, 0.375, 0.625, 0.875]);
    assert_eq!(m.cell_width(), Some(0.25));
    assert!(half_half().with_cell_width(2.0).is_err());
}

#[test]
fn cantor_grid() {
    let g = SetGrid::cantor(2);
    let a = g.atoms();
    let h = 1.0 / 9.0;
    let expect = [h / 2.0, 2.0 * h + h / 2.0, 6.0 * h + h / 2.0, 8.0 * h + h / 2.0];
    for (x, y) in a.iter().zip(expect) {
        assert!((x - y).abs() < 1e-15);
    }
    let m = SetGrid::cantor(6).measure::<f64>().unwrap();
    assert_eq!(m.len(), 64);
    assert_eq!(SetGrid::cantor(0).atoms(), vec![0.5]);
}

#[test]
fn constant_kernel_energy() {
    let m = DiscreteMeasure::<f64>::new(vec![0.0, 0.3, 2.0], vec![0.2, 0.5, 0.3]).unwrap();
    let k = KernelMatrix::constant(3, 4.5).unwrap();
    assert!((energy(&k, &m).unwrap() - 4.5).abs() < 1e-12);
    let k2 = KernelMatrix::constant(2, 1.0).unwrap();
    assert!(matches!(energy(&k2, &m), Err(Error::Dimension { .. })));
}

#[test]
fn infinite_entries_give_infinite_energy() {
    let k = riesz_kernel(0.5, &[0.0, 1.0], DiagonalPolicy::Raw).unwrap();
    assert_eq!(k.rows(), vec![vec![f64::INFINITY, 1.0], vec![1.0, f64::INFINITY]]);
    assert_eq!(energy(&k, &half_half()).unwrap(), f64::INFINITY);
}

#[test]
fn riesz_examples() {
    let k = riesz_kernel(1.0, &[0.0, 0.5, 1.0], DiagonalPolicy::Raw).unwrap();
    assert_eq!(k.get(0, 2), 1.0);
    assert_eq!(k.get(0, 1), 2.0);
    assert_eq!(k.get(1, 2), 2.0);
    let k = riesz_kernel(0.5f64, &[0.5], DiagonalPolicy::CellAveraged(1.0)).unwrap();
    assert!((k.get(0, 0) - 8.0 / 3.0).abs() < 1e-15);
    assert!(matches!(
        riesz_kernel(1.0, &[0.5], DiagonalPolicy::CellAveraged(1.0)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn riesz_cell_average_matches_quadrature() {
    use crate::quadrature::{integrate, QuadTolerance};
    let h = 0.01;
    for &beta in &[0.25, 0.5, 0.75] {
        for &d in &[0.01, 0.02, 0.05, 0.3, 0.64, 0.65, 5.0] {
            let tol = QuadTolerance {
                rel: 1e-13,
                ..Default::default()
            };
            let f = |u: f64| (h - (u - d).abs()) / (h * h) * u.abs().powf(-beta);
            let lo = integrate(f, (d - h).max(0.0), d, tol).value;
            let hi = integrate(f, d, d + h, tol).value;
            let exact = lo + hi;
            let v = riesz_cell_average(d, h, beta);
            assert!((v - exact).abs() < 1e-11 * exact, "β={beta} D={d}: {v} vs {exact}");
        }
    }
}

#[test]
fn riesz_energy_of_interval() {
    for &beta in &[0.25, 0.5, 0.75] {
        let m = SetGrid::interval(0.0, 1.0, 256).measure::<f64>().unwrap();
        let k = riesz_kernel(beta, m.atoms(), m.natural_policy()).unwrap();
        let e = energy(&k, &m).unwrap();
        let exact = 2.0 / ((1.0 - beta) * (2.0 - beta));
        assert!((e - exact).abs() < 1e-9 * exact, "β={beta}: {e}");
    }
}

#[test]
fn permutation_invariance() {
    let k = KernelMatrix::from_rows(&[
        vec![1.0, 0.2, 0.3],
        vec![0.2, 2.0, 0.5],
        vec![0.3, 0.5, 3.0],
    ])
    .unwrap();
    let w = [0.2, 0.5, 0.3];
    let perm = [2usize, 0, 1];
    let kp = KernelMatrix::from_fn(3, DiagonalPolicy::Raw, |i, j| k.get(perm[i], perm[j])).unwrap();
    let wp: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
    let a = quadratic_form(&k, &w).unwrap();
    let b = quadratic_form(&kp, &wp).unwrap();
    assert!((a - b).abs() < 1e-14);
}

#[test]
fn asymmetric_or_negative_kernels_rejected() {
    assert!(KernelMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
    assert!(KernelMatrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, 1.0]]).is_err());
}

#[test]
fn chi_energy_examples() {
    let drift = LevyTriplet::drift(1.0);
    let brown = LevyTriplet::brownian();
    let poisson = LevyTriplet::poisson();
    let m = half_half();
    for spec in [&drift, &brown, &poisson] {
        assert_eq!(chi_energy(spec, &[0.0], &m).unwrap(), 1.0);
        assert_eq!(signed_chi_energies(spec, &[0.0], &m).unwrap(), (1.0, 0.0));
    }
    let e = chi_energy(&drift, &[0.7], &m).unwrap();
    assert!((e - (1.0 + 0.7f64.cos()) / 2.0).abs() < 1e-15);
    assert!(chi_energy(&drift, &[PI], &m).unwrap().abs() < 1e-15);
    let e = chi_energy(&brown, &[1.0], &m).unwrap();
    assert!((e - 0.5 * (1.0 + (-0.5f64).exp())).abs() < 1e-15);
    let (p, q) = signed_chi_energies(&drift, &[PI], &m).unwrap();
    assert!((p - 0.5).abs() < 1e-15 && (q - 0.5).abs() < 1e-15);
    let m2 = DiscreteMeasure::new(vec![0.0, 0.5], vec![0.5, 0.5]).unwrap();
    let (p, q) = signed_chi_energies(&poisson, &[PI], &m2).unwrap();
    assert_eq!(q, 0.0);
    assert!((p - chi_energy(&poisson, &[PI], &m2).unwrap()).abs() < 1e-15);
}

#[test]
fn cell_chi_energy_of_drift_is_fourier_modulus() {
    // drift: E = |∫ e^{iξt} dt|² over [0,1] = sinc²(ξ/2)
    let drift = LevyTriplet::drift(1.0);
    let m = SetGrid::interval(0.0, 1.0, 16).measure::<f64>().unwrap();
    for &xi in &[0.3, 2.0, 17.0, 250.0] {
        let e = chi_energy_with(&drift, &[xi], &m, m.natural_policy()).unwrap();
        let s = (xi / 2.0).sin() / (xi / 2.0);
        assert!((e - s * s).abs() < 1e-12, "ξ={xi}: {e} vs {}", s * s);
        let (p, q) = signed_chi_energies_with(&drift, &[xi], &m, m.natural_policy()).unwrap();
        assert!((p - q - e).abs() < 1e-12);
    }
}

#[test]
fn pair_table_weights_sum_to_one() {
    let m = SetGrid::interval(0.0, 1.0, 64).measure::<f64>().unwrap();
    let t = PairTable::new(&m);
    assert_eq!(t.pairs.len(), 63);
    assert!((t.total_weight() - 1.0).abs() < 1e-14);
}

#[test]
fn gauge_kernel_examples() {
    let c = GaugeControls::default();
    let drift = LevyTriplet::drift(1.0);
    let k = gauge_kernel(&drift, 0.5, SignPart::Plus, &[0.0, 1.0], DiagonalPolicy::Raw, &c).unwrap();
    assert!(k.entries().iter().all(|v| v.is_infinite()));
    let k = gauge_kernel(&drift, 0.5, SignPart::Minus, &[0.3], DiagonalPolicy::Raw, &c).unwrap();
    assert_eq!(k.rows(), vec![vec![0.0]]);
    let m = DiscreteMeasure::dirac(0.3).unwrap();
    assert_eq!(energy(&k, &m).unwrap(), 0.0);
    let brown = LevyTriplet::brownian();
    let k = gauge_kernel(&brown, 0.5, SignPart::Minus, &[0.0, 0.5, 2.0], DiagonalPolicy::Raw, &c).unwrap();
    assert!(k.entries().iter().all(|&v| v == 0.0));
}

#[test]
fn cell_averaged_gauge_kernel_matches_closed_form() {
    // Brownian, γ = 0.5: g(u) = (u/2)^{-1/4} Γ(1/4); average over the diagonal window
    // 2∫_0^h (h-u)/h² g(u) du = Γ(1/4) 2^{1/4} · 2 h^{-1/4} / ((3/4)(7/4))
    let brown = LevyTriplet::brownian();
    let h = 0.125;
    let k = gauge_kernel(
        &brown,
        0.5,
        SignPart::Plus,
        &[0.0625, 0.1875],
        DiagonalPolicy::CellAveraged(h),
        &GaugeControls::default(),
    )
    .unwrap();
    let g14 = statrs::function::gamma::gamma(0.25);
    let c = g14 * 2f64.powf(0.25);
    let diag = c * riesz_cell_average(0.0, h, 0.25);
    let off = c * riesz_cell_average(h, h, 0.25);
    assert!((k.get(0, 0) - diag).abs() < 1e-7 * diag, "{} vs {diag}", k.get(0, 0));
    assert!((k.get(0, 1) - off).abs() < 1e-7 * off, "{} vs {off}", k.get(0, 1));
}

#[test]
fn measure_files() {
    let m: DiscreteMeasure<f64> = MeasureFile::parse(r#"{"uniform":{"a":0,"b":1,"n":8}}"#).unwrap();
    assert_eq!(m.len(), 8);
    let m: DiscreteMeasure<f64> = MeasureFile::parse(r#"{"cantor":{"depth":3}}"#).unwrap();
    assert_eq!(m.len(), 8);
    let m: DiscreteMeasure<f64> = MeasureFile::parse(r#"{"atoms":[0,1],"weights":[0.5,0.5]}"#).unwrap();
    assert_eq!(m, half_half());
    let e = MeasureFile::<f64>::parse(r#"{"atoms":[0,1],"weigths":[0.5,0.5]}"#).unwrap_err();
    assert!(e.to_string().contains("weigths"), "{e}");
    let e = MeasureFile::<f64>::parse("{\"atoms\":[0,1],\n\"weights\":[0.5,0.6]}").unwrap_err();
    assert!(e.to_string().contains("weights"), "{e}");
    let e = MeasureFile::<f64>::parse("{\"atoms\":[0,1],\n\"weights\":[0.5,}").unwrap_err();
    assert!(e.to_string().contains("line 2"), "{e}");
    let s = serde_json::to_string(&MeasureFile::from(&half_half())).unwrap();
    let back: DiscreteMeasure<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, half_half());
}

#[test]
fn single_precision_energy() {
    let m = SetGrid::interval(0.0, 1.0, 64).measure::<f32>().unwrap();
    let k = riesz_kernel(0.5f32, m.atoms(), m.natural_policy()).unwrap();
    let e = energy(&k, &m).unwrap();
    assert!((e - 8.0 / 3.0).abs() < 1e-4);
}
