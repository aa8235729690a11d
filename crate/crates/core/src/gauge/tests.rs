use super::*;
use statrs::function::gamma::gamma;

fn gaussian_oracle(gamma_: f64, x: f64) -> f64 {
    let a = x.abs() / 2.0;
    a.powf((gamma_ - 1.0) / 2.0) * gamma((1.0 - gamma_) / 2.0)
}

fn finite(v: &GaugeValue) -> f64 {
    match v {
        GaugeValue::Finite { value, .. } => *value,
        other => panic!("expected finite, got {other:?}"),
    }
}

#[test]
fn brownian_matches_gaussian_integral() {
    let spec = LevyTriplet::brownian();
    let c = GaugeControls::default();
    for &g in &[0.25, 0.5, 0.75] {
        for &x in &[0.5, 1.0, 2.0] {
            let v = finite(&f_gamma(&spec, g, x, &c).unwrap());
            let exact = gaussian_oracle(g, x);
            assert!((v - exact).abs() <= 1e-6 * exact, "γ={g} x={x}: {v} vs {exact}");
        }
    }
    let v = finite(&f_gamma(&spec, 0.5, 2.0, &c).unwrap());
    assert!((v - gamma(0.25)).abs() < 1e-6 * gamma(0.25));
}

#[test]
fn cauchy_matches_gamma_integral() {
    let spec = LevyTriplet::symmetric_stable(1.0, 1.0).unwrap();
    let v = finite(&f_gamma(&spec, 0.5, 1.0, &GaugeControls::default()).unwrap());
    let exact = 2.0 * PI.sqrt();
    assert!((v - exact).abs() < 1e-6 * exact, "{v}");
}

#[test]
fn zero_time_difference() {
    let spec = LevyTriplet::brownian();
    let c = GaugeControls::default();
    assert!(f_gamma(&spec, 0.5, 0.0, &c).unwrap().is_divergent());
    let q = GaugeQuery::new(&spec, 0.5, 0.0, SignPart::Minus);
    assert_eq!(g_gamma(&q).unwrap(), GaugeValue::zero());
    let q = GaugeQuery::new(&spec, 0.5, 0.0, SignPart::Plus);
    let GaugeValue::Divergent { witness, .. } = g_gamma(&q).unwrap() else {
        panic!()
    };
    assert_eq!(witness.len(), 21);
    assert!(witness.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn poisson_parts() {
    let spec = LevyTriplet::poisson();
    let q = GaugeQuery::new(&spec, 0.5, 0.5, SignPart::Minus);
    assert_eq!(g_gamma(&q).unwrap(), GaugeValue::zero());
    let q = GaugeQuery::new(&spec, 0.5, 0.5, SignPart::Plus);
    assert!(g_gamma(&q).unwrap().is_divergent());
}

#[test]
fn drift_parts_diverge() {
    let spec = LevyTriplet::drift(1.0);
    for sign in [SignPart::Plus, SignPart::Minus] {
        let q = GaugeQuery::new(&spec, 0.5, 1.0, sign);
        assert!(g_gamma(&q).unwrap().is_divergent(), "{sign:?}");
    }
}

#[test]
fn symmetric_plus_equals_f_and_minus_vanishes() {
    let spec = LevyTriplet::brownian();
    let c = GaugeControls::default();
    let f = f_gamma(&spec, 0.5, 2.0, &c).unwrap();
    for sign in [SignPart::Plus, SignPart::Full] {
        let g = g_gamma(&GaugeQuery::new(&spec, 0.5, 2.0, sign)).unwrap();
        assert!((g.extended() - f.extended()).abs() <= g.error() + f.error());
    }
    let m = g_gamma(&GaugeQuery::new(&spec, 0.5, 2.0, SignPart::Minus)).unwrap();
    assert_eq!(m.extended(), 0.0);
}

#[test]
fn plus_minus_difference_is_signed_integral() {
    // Brownian motion with drift: Ψ = ξ²/2 - iξ, so both parts converge
    let spec = LevyTriplet::new(1, vec![1.0], vec![1.0], vec![], None).unwrap();
    let x = 1.5;
    let gamma_ = 0.5;
    let c = GaugeControls::default();
    let p = g_gamma(&GaugeQuery::new(&spec, gamma_, x, SignPart::Plus)).unwrap();
    let m = g_gamma(&GaugeQuery::new(&spec, gamma_, x, SignPart::Minus)).unwrap();
    assert!(m.extended() > 0.0);
    let signed = radial_reduce(
        |r: f64| (-x * r * r / 2.0).exp() * ((x * r).cos() + 1.0),
        gamma_,
        1,
        &c,
    )
    .unwrap();
    let ones = radial_reduce(|r: f64| (-x * r * r / 2.0).exp(), gamma_, 1, &c).unwrap();
    let diff = signed.extended() - ones.extended();
    assert!((p.extended() - m.extended() - diff).abs() < 1e-7, "{p:?} {m:?} {diff}");
}

#[test]
fn rejects_asymmetric_full_and_bad_gamma() {
    let spec = LevyTriplet::poisson();
    let c = GaugeControls::default();
    assert!(matches!(
        f_gamma(&spec, 0.5, 1.0, &c),
        Err(Error::NotSymmetric { .. })
    ));
    assert!(matches!(
        g_gamma(&GaugeQuery::new(&spec, 0.5, 1.0, SignPart::Full)),
        Err(Error::NotSymmetric { .. })
    ));
    let b = LevyTriplet::brownian();
    assert!(matches!(f_gamma(&b, 1.0, 1.0, &c), Err(Error::Domain(_))));
    assert!(matches!(f_gamma(&b, 0.0, 1.0, &c), Err(Error::Domain(_))));
}

#[test]
fn anisotropic_is_unsupported() {
    let spec = LevyTriplet::new(2, vec![0.0, 0.0], vec![1.0, 0.0, 0.0, 2.0], vec![], None).unwrap();
    let q = GaugeQuery::new(&spec, 0.5, 1.0, SignPart::Plus);
    assert!(matches!(g_gamma(&q), Err(Error::Unsupported(_))));
}

#[test]
fn isotropic_two_dimensional_brownian() {
    // ∫_{ℝ²} e^{-a‖ξ‖²} ‖ξ‖^{-γ} dξ = π a^{(γ-2)/2} Γ((2-γ)/2)
    let spec = LevyTriplet::isotropic_brownian(2, 1.0).unwrap();
    let (g, x) = (0.5, 1.0);
    let v = finite(&f_gamma(&spec, g, x, &GaugeControls::default()).unwrap());
    let a: f64 = 0.5;
    let exact = PI * a.powf((g - 2.0) / 2.0) * gamma((2.0 - g) / 2.0);
    assert!((v - exact).abs() < 1e-6 * exact);
}

#[test]
fn radial_reduce_examples() {
    let c = GaugeControls::default();
    let disk = radial_reduce(|r: f64| if r <= 1.0 { 1.0 } else { 0.0 }, 0.0, 2, &c).unwrap();
    assert!((disk.extended() - PI).abs() < 1e-9);
    let g = radial_reduce(|r: f64| (-r * r).exp(), 0.0, 1, &c).unwrap();
    assert!((g.extended() - PI.sqrt()).abs() < 1e-9);
    let e = radial_reduce(|r: f64| (-r).exp(), 0.5, 2, &c).unwrap();
    assert!((e.extended() - 2.0 * PI * gamma(1.5)).abs() < 1e-8);
    assert!(matches!(radial_reduce(|_| 1.0, 0.5, 0, &c), Err(Error::Domain(_))));
}

#[test]
fn controls_are_validated() {
    let spec = LevyTriplet::brownian();
    let bad = GaugeControls {
        r_max: 100.0,
        ..Default::default()
    };
    assert!(matches!(f_gamma(&spec, 0.5, 1.0, &bad), Err(Error::Config { .. })));
    let bad = GaugeControls {
        rel_tol: 0.1,
        ..Default::default()
    };
    assert!(matches!(f_gamma(&spec, 0.5, 1.0, &bad), Err(Error::Config { .. })));
    assert_eq!(GaugeControls::default().ring_count(), 20);
}

#[test]
fn gauge_value_json_shape() {
    let v = GaugeValue::Finite { value: 1.5, err: 0.0 };
    let s = serde_json::to_string(&v).unwrap();
    assert_eq!(s, r#"{"kind":"finite","value":1.5,"err":0.0}"#);
    let d: GaugeValue = serde_json::from_str(r#"{"kind":"divergent","witness":[1.0,2.0],"note":"x"}"#).unwrap();
    assert!(d.is_divergent());
}
