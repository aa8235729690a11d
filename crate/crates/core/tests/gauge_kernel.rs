use levycap::levy::LevyTriplet;
use levycap::measure::{gauge_kernel, DiagonalPolicy};
use levycap::{GaugeControls, SignPart};
use statrs::function::gamma::gamma;

#[test]
fn brownian_diagonal_cell_average_on_small_cells() {
    // g(u) = Γ(p) (u/2)^{-p}, p = (1-γ)/2; averaged against 2(h-u)/h² on [0, h]:
    // 2 Γ(p) 2^p h^{-p} / ((1-p)(2-p))
    let brown = LevyTriplet::brownian();
    for gamma_exp in [0.2, 0.4, 0.8] {
        let p: f64 = (1.0 - gamma_exp) / 2.0;
        for m in [5, 7, 10] {
            let h = 2f64.powi(-m);
            let k = gauge_kernel(
                &brown,
                gamma_exp,
                SignPart::Plus,
                &[0.5 * h],
                DiagonalPolicy::CellAveraged(h),
                &GaugeControls::default(),
            )
            .unwrap();
            let oracle = 2.0 * gamma(p) * 2f64.powf(p) * h.powf(-p) / ((1.0 - p) * (2.0 - p));
            let got = k.get(0, 0);
            assert!((got - oracle).abs() < 1e-6 * oracle, "γ={gamma_exp} h=2^-{m}: {got} vs {oracle}");
        }
    }
}
