//! Integrals of `χ_ξ`-energies over frequency space:
//!
//! ```text
//! ∫ E_{χ_ξ}(μ) ‖ξ‖^{β-d} dξ            criterion integral
//! ∫ E_{(Re χ_ξ)±}(μ) ‖ξ‖^{-γ} dξ        signed parts (Fubini check, condition (e))
//! ```
//!
//! Every integral runs on the dyadic-ring machinery of [`crate::gauge`], so a
//! divergent result comes with a witness of cumulative partial integrals.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{
    integrate_rings, ExponentBounds, GaugeControls, GaugeValue, RadialIntegrand, RadialWeight,
    RingTrace, SignPart,
};
use crate::levy::LevyTriplet;
use crate::measure::chi::{cell_chi_energy_at, cell_signed_chi_energies_at};
use crate::measure::{
    chi_energy_at, energy, gauge_kernel, minus_part_vanishes, signed_chi_energies_at,
    DiscreteMeasure, MeasureFile, PairTable,
};

/// Slack allowed around `[0, 1]` for `E_{χ_ξ}(μ)` at quadrature nodes.
pub const ENERGY_RANGE_SLACK: f64 = 1e-10;

/// Which energy is integrated against `‖ξ‖^{-γ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyPart {
    /// `E_{χ_ξ}(μ) = E_{Re χ_ξ}(μ)`.
    Chi,
    Plus,
    Minus,
}

struct EnergyIntegrand<'a> {
    spec: &'a LevyTriplet<f64>,
    pairs: PairTable<f64>,
    cell: Option<f64>,
    part: EnergyPart,
    bounds: ExponentBounds,
    span: f64,
    minus_vanishes: bool,
    violation: Mutex<Option<(f64, f64)>>,
}

impl EnergyIntegrand<'_> {
    fn energy(&self, r: f64) -> f64 {
        let psi = self.spec.radial_exponent(r);
        match (self.part, self.cell) {
            (EnergyPart::Chi, None) => chi_energy_at(psi, &self.pairs),
            (EnergyPart::Chi, Some(h)) => cell_chi_energy_at(psi, &self.pairs, h),
            (part, cell) => {
                let (p, m) = match cell {
                    None => signed_chi_energies_at(psi, &self.pairs),
                    Some(h) => cell_signed_chi_energies_at(psi, &self.pairs, h),
                };
                if part == EnergyPart::Plus {
                    p
                } else {
                    m
                }
            }
        }
    }
}

impl RadialIntegrand for EnergyIntegrand<'_> {
    fn value(&self, r: f64) -> f64 {
        let e = self.energy(r);
        if self.part == EnergyPart::Chi
            && !(e >= -ENERGY_RANGE_SLACK && e <= 1.0 + ENERGY_RANGE_SLACK)
        {
            self.violation.lock().unwrap().get_or_insert((r, e));
        }
        e.max(0.0)
    }

    fn max_panel(&self) -> Option<f64> {
        let omega = self.bounds.oscillation(self.span);
        (omega > 0.0).then(|| 2.0 * std::f64::consts::PI / (1.0 + omega))
    }

    fn vanishes_on(&self, _a: f64, _b: f64) -> bool {
        self.part == EnergyPart::Minus && self.minus_vanishes
    }

    fn vanishes_beyond(&self, _r: f64) -> bool {
        self.part == EnergyPart::Minus && self.minus_vanishes
    }

    fn trend_test(&self) -> bool {
        self.bounds.bounded_re
    }
}

fn check_supported(spec: &LevyTriplet<f64>) -> Result<()> {
    if spec.dim() > 1 && !spec.is_isotropic() {
        return Err(Error::Unsupported(
            "anisotropic exponents in dimension ≥ 2 are not integrated".into(),
        ));
    }
    Ok(())
}

/// `∫ E(ξ) ‖ξ‖^{-γ} dξ` for the chosen energy part, with the measure's
/// natural policy (cell averages when it carries a cell width).
pub fn energy_integral(
    spec: &LevyTriplet<f64>,
    mu: &DiscreteMeasure<f64>,
    gamma: f64,
    part: EnergyPart,
    controls: &GaugeControls,
) -> Result<RingTrace> {
    let d = spec.dim() as f64;
    if !(gamma > 0.0 && gamma < d) {
        return Err(Error::Domain(format!("γ = {gamma} must lie in (0, {d})")));
    }
    controls.validate()?;
    check_supported(spec)?;
    let span = mu.span();
    let f = EnergyIntegrand {
        spec,
        pairs: PairTable::new(mu),
        cell: mu.cell_width(),
        part,
        bounds: ExponentBounds::of(spec),
        span,
        minus_vanishes: minus_part_vanishes(spec, span),
        violation: Mutex::new(None),
    };
    let trace = integrate_rings(
        &f,
        RadialWeight {
            dim: spec.dim(),
            gamma,
        },
        controls,
    )?;
    if let Some((r, e)) = f.violation.into_inner().unwrap() {
        return Err(Error::Invariant(format!(
            "E_χ(μ) = {e} outside [0, 1] at ‖ξ‖ = {r}"
        )));
    }
    Ok(trace)
}

/// What a criterion value says about `C_β(X(G))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpretation {
    /// Finite for this μ, so `C_β(X(G)) > 0` almost surely.
    PositiveCapacityForThisSet,
    /// Divergent for this μ only; the criterion needs divergence for every μ.
    InconclusiveForThisMeasure,
}

impl Interpretation {
    pub fn describe(&self) -> &'static str {
        match self {
            Interpretation::PositiveCapacityForThisSet => "C_β(X(G)) > 0 a.s. for this G",
            Interpretation::InconclusiveForThisMeasure => {
                "inconclusive alone; the criterion requires divergence for all μ"
            }
        }
    }
}

/// Criterion integral for one `(spec, μ, β)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub spec: LevyTriplet<f64>,
    pub measure: MeasureFile<f64>,
    pub beta: f64,
    pub value: GaugeValue,
    pub interpretation: Interpretation,
    /// Cumulative partial integrals `S_0, S_1, …` (core, then dyadic rings).
    pub partial_sums: Vec<f64>,
}

/// `∫ E_{χ_ξ}(μ) ‖ξ‖^{β-d} dξ`; the integrand is checked to lie in `[0, 1]`
/// at every quadrature node.
pub fn criterion_integral(
    spec: &LevyTriplet<f64>,
    mu: &DiscreteMeasure<f64>,
    beta: f64,
    controls: &GaugeControls,
) -> Result<CriterionReport> {
    let d = spec.dim() as f64;
    if !(beta > 0.0 && beta < d) {
        return Err(Error::Domain(format!("β = {beta} must lie in (0, {d})")));
    }
    let trace = energy_integral(spec, mu, d - beta, EnergyPart::Chi, controls)?;
    let interpretation = if trace.value.is_finite() {
        Interpretation::PositiveCapacityForThisSet
    } else {
        Interpretation::InconclusiveForThisMeasure
    };
    Ok(CriterionReport {
        spec: spec.clone(),
        measure: MeasureFile::from(mu),
        beta,
        partial_sums: trace.partial_sums(),
        value: trace.value,
        interpretation,
    })
}

/// Both sides of `∫ E_{(Re χ_ξ)±}(μ) ‖ξ‖^{-γ} dξ = E_{g_{γ,±}}(μ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FubiniReport {
    pub gamma: f64,
    pub sign: SignPart,
    /// Left side: frequency integral of the signed-part energy.
    pub iterated: GaugeValue,
    /// Right side: energy of the gauge kernel, `+∞` when divergent.
    #[serde(with = "crate::json::extended")]
    pub energy_of_gauge: f64,
    /// `|L - R| / max(|L|, |R|)` when both are finite (0 when both vanish).
    pub relative_gap: Option<f64>,
    pub kinds_agree: bool,
}

/// Computes both sides of the Fubini–Tonelli identity independently.
///
/// `SignPart::Full` pairs `∫ E_{χ_ξ}(μ)` with the energy of `f_γ` and is only
/// defined for symmetric processes.
pub fn fubini_check(
    spec: &LevyTriplet<f64>,
    mu: &DiscreteMeasure<f64>,
    gamma: f64,
    sign: SignPart,
    controls: &GaugeControls,
) -> Result<FubiniReport> {
    let part = match sign {
        SignPart::Plus => EnergyPart::Plus,
        SignPart::Minus => EnergyPart::Minus,
        SignPart::Full => EnergyPart::Chi,
    };
    let k = gauge_kernel(spec, gamma, sign, mu.atoms(), mu.natural_policy(), controls)?;
    let right = energy(&k, mu)?;
    let iterated = energy_integral(spec, mu, gamma, part, controls)?.value;
    let kinds_agree = iterated.is_finite() == right.is_finite();
    let relative_gap = match (&iterated, right.is_finite()) {
        (GaugeValue::Finite { value, .. }, true) => {
            let scale = value.abs().max(right.abs());
            Some(if scale == 0.0 {
                0.0
            } else {
                (value - right).abs() / scale
            })
        }
        _ => None,
    };
    Ok(FubiniReport {
        gamma,
        sign,
        iterated,
        energy_of_gauge: right,
        relative_gap,
        kinds_agree,
    })
}

/// Per-measure status of the hypotheses of part (e).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionEVerdict {
    /// Minus integral finite and plus energy infinite for this μ.
    HoldsForThisMeasure,
    /// Minus integral finite but the plus energy is finite.
    PlusEnergyFinite,
    /// Minus integral divergent.
    MinusIntegralDivergent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEReport {
    pub beta: f64,
    /// `E_{g_{d-β,+}}(μ)`.
    #[serde(with = "crate::json::extended")]
    pub plus_energy: f64,
    /// `∫ E_{(Re χ_ξ)-}(μ) ‖ξ‖^{β-d} dξ`.
    pub minus_integral: GaugeValue,
    pub minus_finite: bool,
    pub plus_infinite: bool,
    pub verdict: ConditionEVerdict,
}

pub fn condition_e_check(
    spec: &LevyTriplet<f64>,
    mu: &DiscreteMeasure<f64>,
    beta: f64,
    controls: &GaugeControls,
) -> Result<ConditionEReport> {
    let d = spec.dim() as f64;
    if !(beta > 0.0 && beta < d) {
        return Err(Error::Domain(format!("β = {beta} must lie in (0, {d})")));
    }
    let gamma = d - beta;
    let minus_integral = energy_integral(spec, mu, gamma, EnergyPart::Minus, controls)?.value;
    let policy = mu.natural_policy();
    let k = gauge_kernel(spec, gamma, SignPart::Plus, mu.atoms(), policy, controls)?;
    let plus_energy = energy(&k, mu)?;
    let minus_finite = minus_integral.is_finite();
    let plus_infinite = plus_energy.is_infinite();
    let verdict = match (minus_finite, plus_infinite) {
        (false, _) => ConditionEVerdict::MinusIntegralDivergent,
        (true, true) => ConditionEVerdict::HoldsForThisMeasure,
        (true, false) => ConditionEVerdict::PlusEnergyFinite,
    };
    Ok(ConditionEReport {
        beta,
        plus_energy,
        minus_integral,
        minus_finite,
        plus_infinite,
        verdict,
    })
}
