//! Scripted reproductions of the worked cases: the drift counterexample, the
//! Poisson example, the symmetric reduction and the energy-identity audit.
//!
//! Every assertion compares against a closed form, a stated value or an
//! independently summed series. Reports say "surrogate verified": the
//! almost-sure capacity statements themselves are not finitely checkable.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{condition_e_check, energy_integral, EnergyPart};
use crate::error::{Error, Result};
use crate::gauge::{f_gamma, g_gamma, g_gamma_trace, GaugeControls, GaugeQuery, GaugeValue, SignPart};
use crate::levy::LevyTriplet;
use crate::measure::{
    chi_energy_with, energy, riesz_kernel, signed_chi_energies_with, DiscreteMeasure, SetGrid,
};
use crate::quadrature::{integrate, QuadTolerance};

/// Grid size for the uniform-measure Riesz energy certificate.
pub const RIESZ_GRID: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub name: String,
    #[serde(with = "crate::json::extended")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub evidence: Vec<Evidence>,
}

impl Assertion {
    fn new(id: &str, description: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            passed: true,
            evidence: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool) -> &mut Self {
        self.passed &= ok;
        self
    }

    fn record(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.evidence.push(Evidence {
            name: name.into(),
            value,
        });
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: String,
    pub beta: f64,
    pub gamma: f64,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
    pub summary: String,
}

impl CaseReport {
    fn finish(case: &str, beta: f64, gamma: f64, assertions: Vec<Assertion>, notes: Vec<String>) -> Self {
        let passed = assertions.iter().all(|a| a.passed);
        let failed: Vec<&str> = assertions.iter().filter(|a| !a.passed).map(|a| a.id.as_str()).collect();
        let summary = if passed {
            "surrogate verified".to_string()
        } else {
            format!("surrogate not verified: failed {}", failed.join(", "))
        };
        Self {
            case: case.into(),
            beta,
            gamma,
            assertions,
            notes,
            verdict: if passed { Verdict::Pass } else { Verdict::Fail },
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn assertion(&self, id: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.id == id)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("β = {beta} must lie in (0, 1)")));
    }
    Ok(())
}

/// `b^β - a^β` for `0 < a < b` without cancellation.
fn power_difference(a: f64, b: f64, beta: f64) -> f64 {
    a.powf(beta) * (beta * ((b - a) / a).ln_1p()).exp_m1()
}

/// Ordered pairwise sum of `(6k - 1)^{β-1}`, `k = 1..=terms`.
pub fn series_partial_sum(beta: f64, terms: usize) -> f64 {
    fn sum(beta: f64, lo: usize, hi: usize) -> f64 {
        if hi - lo <= 64 {
            return (lo..hi).map(|k| (6.0 * k as f64 - 1.0).powf(beta - 1.0)).sum();
        }
        let mid = lo + (hi - lo) / 2;
        sum(beta, lo, mid) + sum(beta, mid, hi)
    }
    sum(beta, 1, terms + 1)
}

/// Lower bound `(π^β / (2β|x|^β)) [(2k + 1/3)^β - (2k - 1/3)^β]` for the
/// `k`-th panel of `∫ (cos |x|ξ)_+ ξ^{β-1} dξ`.
pub fn drift_series_term(beta: f64, x: f64, k: usize) -> f64 {
    let k = k as f64;
    let hi = (4.0 * k + 1.0) / 2.0 - 1.0 / 6.0;
    let lo = (4.0 * k - 1.0) / 2.0 + 1.0 / 6.0;
    PI.powf(beta) / (2.0 * beta * x.abs().powf(beta)) * power_difference(lo, hi, beta)
}

/// `∫ (cos |x|ξ)_+ ξ^{β-1} dξ` over `[(2kπ - π/3)/|x|, (2kπ + π/3)/|x|]`.
pub fn drift_panel_integral(beta: f64, x: f64, k: usize) -> f64 {
    let ax = x.abs();
    let c = 2.0 * PI * k as f64;
    let (a, b) = ((c - FRAC_PI_3) / ax, (c + FRAC_PI_3) / ax);
    let tol = QuadTolerance {
        abs: 0.0,
        rel: 1e-12,
        max_subdivisions: 64,
    };
    integrate(|xi| (ax * xi).cos().max(0.0) * xi.powf(beta - 1.0), a, b, tol).value
}

/// Cell-averaged Riesz energy of the uniform measure on a grid of `[0, 1]`.
pub fn uniform_riesz_energy(beta: f64, n: usize) -> Result<f64> {
    let mu = SetGrid::interval(0.0, 1.0, n).measure::<f64>()?;
    let k = riesz_kernel(beta, mu.atoms(), mu.natural_policy())?;
    energy(&k, &mu)
}

/// `2/((1-β)(2-β))`, the Riesz energy of Lebesgue measure on `[0, 1]`.
pub fn riesz_closed_form(beta: f64) -> f64 {
    2.0 / ((1.0 - beta) * (2.0 - beta))
}

const SIGN_TYPO_NOTE: &str = "the source chain writes the panel bound with (-cos); the checked \
     version is the coherent one, cos(|x|ξ) ≥ 1/2 on each panel";

/// Drift process `X(t) = t`: both signed gauges diverge although `C_β([0,1]) > 0`.
pub fn drift_counterexample(beta: f64, k_terms: usize, controls: &GaugeControls) -> Result<CaseReport> {
    check_beta(beta)?;
    if k_terms < 100 {
        return Err(Error::config("k_terms", "need at least 100 terms"));
    }
    let gamma = 1.0 - beta;
    let spec = LevyTriplet::drift(1.0);
    let xs = [0.5, 1.0];
    let mut out = Vec::new();

    let mut a = Assertion::new("i", "cos(|x|ξ) ≥ 1/2 on every panel [(2kπ-π/3)/|x|, (2kπ+π/3)/|x|], 32 samples each");
    for &x in &xs {
        let worst = (1..=k_terms)
            .into_par_iter()
            .map(|k| {
                let c = 2.0 * PI * k as f64;
                (0..32)
                    .map(|j| {
                        let xi = (c - FRAC_PI_3 + (2.0 * FRAC_PI_3) * j as f64 / 31.0) / x;
                        (x * xi).cos()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min);
        // the endpoints sit exactly at 1/2; ξ ~ 1e7 leaves ~1e-9 of rounding in the phase
        a.check(worst >= 0.5 - 1e-8).record(format!("min cos, x={x}"), worst);
    }
    out.push(a);

    let mut a = Assertion::new("ii", "each series term ≤ numeric panel integral × (1 + 1e-8)");
    for &x in &xs {
        let (violations, min_ratio) = (1..=k_terms)
            .into_par_iter()
            .map(|k| {
                let term = drift_series_term(beta, x, k);
                let panel = drift_panel_integral(beta, x, k);
                ((term > panel * (1.0 + 1e-8)) as usize, panel / term)
            })
            .reduce(|| (0, f64::INFINITY), |p, q| (p.0 + q.0, p.1.min(q.1)));
        a.check(violations == 0)
            .record(format!("violations, x={x}"), violations as f64)
            .record(format!("min panel/term, x={x}"), min_ratio);
    }
    out.push(a);

    let mut a = Assertion::new("iii", "h(y) = (1+y)^β - 1 ≥ β 2^{β-1} y on y ∈ [0, 1]");
    let slope = beta * 2f64.powf(beta - 1.0);
    let worst = (0..=1000)
        .map(|j| {
            let y = j as f64 / 1000.0;
            (1.0 + y).powf(beta) - 1.0 - slope * y
        })
        .fold(f64::INFINITY, f64::min);
    a.check(worst >= -1e-15).record("min h(y) - bound", worst);
    out.push(a);

    let mut a = Assertion::new("iv", format!("Σ_{{k≤{k_terms}}} (6k-1)^{{β-1}} > 100 × Σ_{{k≤100}}"));
    let big = series_partial_sum(beta, k_terms);
    let small = series_partial_sum(beta, 100);
    a.check(big > 100.0 * small)
        .record("partial sum, K terms", big)
        .record("partial sum, 100 terms", small)
        .record("ratio", big / small);
    out.push(a);

    let mut a = Assertion::new("v", "g_{1-β,±}(x) divergent for x ∈ {0.5, 1}; g_{1-β,-}(0) = 0");
    for &x in &xs {
        for sign in [SignPart::Plus, SignPart::Minus] {
            let v = g_gamma(&GaugeQuery::new(&spec, gamma, x, sign).with_controls(controls.clone()))?;
            a.check(v.is_divergent())
                .record(format!("g_{sign:?}({x})").to_lowercase(), v.extended());
        }
    }
    let v = g_gamma(&GaugeQuery::new(&spec, gamma, 0.0, SignPart::Minus).with_controls(controls.clone()))?;
    a.check(v == GaugeValue::zero()).record("g_minus(0)", v.extended());
    out.push(a);

    let mut a = Assertion::new(
        "vi",
        format!("uniform interval(0,1,{RIESZ_GRID}) Riesz energy within 1e-3 of 2/((1-β)(2-β))"),
    );
    let e = uniform_riesz_energy(beta, RIESZ_GRID)?;
    let target = riesz_closed_form(beta);
    let rel = (e - target).abs() / target;
    a.check(rel <= 1e-3)
        .record("energy", e)
        .record("target", target)
        .record("relative error", rel)
        .record("capacity lower bound", 1.0 / e);
    out.push(a);

    let notes = vec![
        SIGN_TYPO_NOTE.to_string(),
        "finite uniform-measure energy certifies C_β([0,1]) > 0 while both signed gauge capacities vanish".into(),
    ];
    Ok(CaseReport::finish("drift", beta, gamma, out, notes))
}

/// Ring contributions `(2/β)(2^{(m+1)β} - 2^{mβ})` of `∫ |ξ|^{β-1} dξ` over `2^m ≤ |ξ| ≤ 2^{m+1}`.
pub fn power_ring_integral(beta: f64, m: usize) -> f64 {
    let lo = 2f64.powi(m as i32);
    2.0 / beta * power_difference(lo, 2.0 * lo, beta)
}

/// Controls used for ring-by-ring witnesses: every ring up to `r_max` is evaluated.
pub fn exhaustive(controls: &GaugeControls) -> GaugeControls {
    GaugeControls {
        exhaust: true,
        ..controls.clone()
    }
}

/// Poisson process with unit drift on `G = [0, π/3]`.
pub fn poisson_example(beta: f64, xs: &[f64], samples: usize, controls: &GaugeControls) -> Result<CaseReport> {
    check_beta(beta)?;
    if xs.is_empty() {
        return Err(Error::config("x", "need at least one x"));
    }
    if let Some(x) = xs.iter().find(|&&x| !(x > 0.0 && x <= FRAC_PI_3)) {
        return Err(Error::config("x", format!("{x} outside (0, π/3]")));
    }
    let gamma = 1.0 - beta;
    let spec = LevyTriplet::poisson();
    let mut out = Vec::new();

    let mut a = Assertion::new("i", format!("(cos(x sin ξ))_- = 0 at {samples} points of [-1e4, 1e4]"));
    for &x in xs {
        let count = (0..samples)
            .into_par_iter()
            .filter(|&j| {
                let xi = -1e4 + 2e4 * j as f64 / (samples.max(2) - 1) as f64;
                (x * xi.sin()).cos() < 0.0
            })
            .count();
        a.check(count == 0 && x < FRAC_PI_2)
            .record(format!("negative samples, x={x}"), count as f64)
            .record(format!("bound |x sin ξ| ≤ x, x={x}"), x);
    }
    out.push(a);

    let mut a = Assertion::new("ii", "g_{1-β,-}(x) = Finite(0)");
    for &x in xs {
        let v = g_gamma(&GaugeQuery::new(&spec, gamma, x, SignPart::Minus).with_controls(controls.clone()))?;
        a.check(v == GaugeValue::zero()).record(format!("g_minus({x})"), v.extended());
    }
    out.push(a);

    let mut a = Assertion::new("iii", "g_{1-β,+}(x) divergent; every ring ≥ e^{-2x}/2 × ring integral of |ξ|^{β-1}");
    let full = exhaustive(controls);
    for &x in xs {
        let trace = g_gamma_trace(&GaugeQuery::new(&spec, gamma, x, SignPart::Plus).with_controls(full.clone()))?;
        let mut worst = f64::INFINITY;
        for (m, ring) in trace.rings.iter().enumerate() {
            let bound = 0.5 * (-2.0 * x).exp() * power_ring_integral(beta, m);
            worst = worst.min(ring / bound);
        }
        a.check(trace.value.is_divergent() && trace.rings.len() == full.ring_count() && worst >= 1.0 - 1e-9)
            .record(format!("rings, x={x}"), trace.rings.len() as f64)
            .record(format!("min ring/bound, x={x}"), worst);
    }
    out.push(a);

    let mut a = Assertion::new("iv", "condition_e_check on uniform [0, π/3]: minus integral Finite(0)");
    let mu = SetGrid::interval(0.0, FRAC_PI_3, 64).measure::<f64>()?;
    let e = condition_e_check(&spec, &mu, beta, controls)?;
    a.check(e.minus_integral == GaugeValue::zero())
        .record("minus integral", e.minus_integral.extended())
        .record("plus energy", e.plus_energy);
    out.push(a);

    let mut a = Assertion::new("v", "Ψ(π/2) = 1 - i: nonvanishing imaginary part");
    let psi = spec.exponent(&[FRAC_PI_2])?;
    a.check(psi.im.abs() > 0.5 && (psi.re - 1.0).abs() < 1e-12 && (psi.im + 1.0).abs() < 1e-12)
        .record("Re Ψ(π/2)", psi.re)
        .record("Im Ψ(π/2)", psi.im);
    out.push(a);

    let notes = vec![format!("condition (e) verdict for the uniform measure: {:?}", e.verdict)];
    Ok(CaseReport::finish("poisson", beta, gamma, out, notes))
}

/// For a symmetric process `g_{γ,+} = f_γ` and `g_{γ,-} ≡ 0`.
pub fn symmetric_reduction_check(
    spec: &LevyTriplet<f64>,
    gamma: f64,
    xs: &[f64],
    controls: &GaugeControls,
) -> Result<CaseReport> {
    if let Some((xi, im)) = spec.asymmetry_witness() {
        return Err(Error::NotSymmetric { xi, im });
    }
    let d = spec.dim() as f64;
    let mut minus = Assertion::new("minus", "g_{γ,-}(x) = 0 exactly");
    let mut plus = Assertion::new("plus", "g_{γ,+}(x) = f_γ(x) within combined quadrature error");
    for &x in xs {
        let q = |sign| GaugeQuery::new(spec, gamma, x, sign).with_controls(controls.clone());
        let m = g_gamma(&q(SignPart::Minus))?;
        minus.check(m == GaugeValue::zero()).record(format!("g_minus({x})"), m.extended());
        let p = g_gamma(&q(SignPart::Plus))?;
        let f = f_gamma(spec, gamma, x, controls)?;
        let ok = match (&p, &f) {
            (GaugeValue::Finite { value: a, err: ea }, GaugeValue::Finite { value: b, err: eb }) => {
                (a - b).abs() <= ea + eb + 1e-12 * b.abs()
            }
            _ => p.is_divergent() && f.is_divergent(),
        };
        plus.check(ok)
            .record(format!("g_plus({x})"), p.extended())
            .record(format!("f({x})"), f.extended());
    }
    Ok(CaseReport::finish("symmetric", d - gamma, gamma, vec![minus, plus], Vec::new()))
}

fn audit_frequencies(dim: usize) -> Vec<Vec<f64>> {
    let radii = [0.1, 0.5, 1.0, 2.0, PI, 10.0, 100.0];
    let mut dirs = vec![{
        let mut e = vec![0.0; dim];
        e[0] = 1.0;
        e
    }];
    if dim > 1 {
        dirs.push(vec![1.0 / (dim as f64).sqrt(); dim]);
    }
    dirs.iter()
        .flat_map(|u| radii.iter().map(move |r| u.iter().map(|c| c * r).collect()))
        .collect()
}

/// Per-ξ energy identities and the ring-level implication "plus finite ⇒ chi and minus finite".
pub fn implication_audit(
    spec: &LevyTriplet<f64>,
    mu: &DiscreteMeasure<f64>,
    beta: f64,
    controls: &GaugeControls,
) -> Result<CaseReport> {
    let d = spec.dim() as f64;
    if !(beta > 0.0 && beta < d) {
        return Err(Error::Domain(format!("β = {beta} must lie in (0, {d})")));
    }
    let gamma = d - beta;
    let policy = mu.natural_policy();
    let mut notes = Vec::new();

    let mut a = Assertion::new("identity", "plus - minus = chi_energy within 1e-12 and minus ≤ plus at sampled ξ");
    let mut worst = 0.0f64;
    for xi in audit_frequencies(spec.dim()) {
        let chi = chi_energy_with(spec, &xi, mu, policy)?;
        let (p, m) = signed_chi_energies_with(spec, &xi, mu, policy)?;
        worst = worst.max((p - m - chi).abs());
        a.check((p - m - chi).abs() <= 1e-12 && m <= p);
        if xi.iter().skip(1).all(|&c| c == 0.0) && xi[0] == PI {
            a.record("plus at ξ=π", p).record("minus at ξ=π", m).record("chi at ξ=π", chi);
        }
    }
    a.record("max |plus - minus - chi|", worst);
    let mut out = vec![a];

    let mut a = Assertion::new("implication", "plus integral finite ⇒ chi and minus integrals finite with plus = chi + minus");
    let plus = energy_integral(spec, mu, gamma, EnergyPart::Plus, controls)?.value;
    a.record("plus integral", plus.extended());
    match plus {
        GaugeValue::Finite { value: p, .. } => {
            let chi = energy_integral(spec, mu, gamma, EnergyPart::Chi, controls)?.value;
            let minus = energy_integral(spec, mu, gamma, EnergyPart::Minus, controls)?.value;
            let both = chi.is_finite() && minus.is_finite();
            let rel = if both {
                (p - chi.extended() - minus.extended()).abs() / p.abs().max(f64::MIN_POSITIVE)
            } else {
                f64::INFINITY
            };
            a.check(both && rel <= 1e-4)
                .record("chi integral", chi.extended())
                .record("minus integral", minus.extended())
                .record("relative gap", rel);
        }
        GaugeValue::Divergent { .. } => {
            notes.push("plus-part integral divergent: the implication's hypothesis fails for this measure".into());
        }
    }
    out.push(a);

    let e = condition_e_check(spec, mu, beta, controls)?;
    let mut a = Assertion::new("condition-e", "condition (e) hypotheses recorded for this measure");
    a.record("minus integral", e.minus_integral.extended())
        .record("plus energy", e.plus_energy);
    out.push(a);
    notes.push(format!("condition (e) verdict: {:?}", e.verdict));
    Ok(CaseReport::finish("implication", beta, gamma, out, notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_bound_example() {
        // β = 0.5, k = 1, x = 1: panel [2π - π/3, 2π + π/3], cos = 1/2 at both ends
        let c = 2.0 * PI;
        assert!(((c - FRAC_PI_3).cos() - 0.5).abs() < 1e-15);
        assert!(((c + FRAC_PI_3).cos() - 0.5).abs() < 1e-15);
        // closed form of the bound: (1/(2β)) (b^β - a^β) for cos ≥ 1/2
        let (a, b) = (c - FRAC_PI_3, c + FRAC_PI_3);
        let direct = (b.sqrt() - a.sqrt()) / (2.0 * 0.5);
        assert!((drift_series_term(0.5, 1.0, 1) - direct).abs() < 1e-14);
        assert!(drift_panel_integral(0.5, 1.0, 1) > direct);
    }

    #[test]
    fn series_matches_direct_summation() {
        for &beta in &[0.25, 0.5, 0.75] {
            let mut s = 0.0;
            for k in 1..=10_000 {
                s += (6.0 * k as f64 - 1.0).powf(beta - 1.0);
            }
            assert!((series_partial_sum(beta, 10_000) - s).abs() < 1e-11 * s);
        }
    }

    #[test]
    fn ring_integral_closed_form() {
        // β = 0.5, ring [2^10, 2^11]: (2/β)(2^{5.5} - 2^5)
        let expected = 4.0 * (2f64.powf(5.5) - 32.0);
        assert!((power_ring_integral(0.5, 10) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn drift_case_at_half() {
        let r = drift_counterexample(0.5, 1_000_000, &GaugeControls::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
        let vi = r.assertion("vi").unwrap();
        let target = vi.evidence.iter().find(|e| e.name == "target").unwrap().value;
        assert!((target - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.summary, "surrogate verified");
    }

    #[test]
    fn poisson_preconditions() {
        let c = GaugeControls::default();
        assert!(poisson_example(0.5, &[1.2], 100, &c).is_err());
        assert!(poisson_example(0.5, &[0.0], 100, &c).is_err());
        assert!(poisson_example(1.5, &[0.5], 100, &c).is_err());
    }

    #[test]
    fn symmetric_reduction_examples() {
        let c = GaugeControls::default();
        let r = symmetric_reduction_check(&LevyTriplet::brownian(), 0.5, &[0.5, 2.0], &c).unwrap();
        assert!(r.passed(), "{r:#?}");
        let f2 = r.assertion("plus").unwrap().evidence[3].value;
        assert!((f2 - 3.625_609_908_221_908).abs() < 1e-6 * f2);
        let r = symmetric_reduction_check(&LevyTriplet::symmetric_stable(1.0, 1.0).unwrap(), 0.5, &[1.0], &c).unwrap();
        assert!(r.passed(), "{r:#?}");
        let f1 = r.assertion("plus").unwrap().evidence[1].value;
        assert!((f1 - 2.0 * PI.sqrt()).abs() < 1e-6 * f1);
        let r = symmetric_reduction_check(&LevyTriplet::symmetric_compound_poisson(), 0.5, &[1.0], &c).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(matches!(
            symmetric_reduction_check(&LevyTriplet::poisson(), 0.5, &[1.0], &c),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn audit_examples() {
        let c = GaugeControls::default();
        let mu = SetGrid::interval(0.0, 1.0, 8).measure::<f64>().unwrap();
        let r = implication_audit(&LevyTriplet::brownian(), &mu, 0.5, &c).unwrap();
        assert!(r.passed(), "{r:#?}");
        let two = DiscreteMeasure::uniform(vec![0.0, 1.0]).unwrap();
        let r = implication_audit(&LevyTriplet::drift(1.0), &two, 0.5, &c).unwrap();
        assert!(r.passed(), "{r:#?}");
        let id = r.assertion("identity").unwrap();
        let get = |n: &str| id.evidence.iter().find(|e| e.name == n).unwrap().value;
        assert!((get("plus at ξ=π") - 0.5).abs() < 1e-15);
        assert!((get("minus at ξ=π") - 0.5).abs() < 1e-15);
        assert!(get("chi at ξ=π").abs() < 1e-15);
        let r = implication_audit(&LevyTriplet::brownian(), &DiscreteMeasure::dirac(0.3).unwrap(), 0.5, &c).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("hypothesis fails")));
    }
}
