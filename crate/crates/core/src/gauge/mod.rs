//! Gauge functions
//!
//! ```text
//! f_γ(x)   = ∫ e^{-|x|Ψ(ξ)} ‖ξ‖^{-γ} dξ                 (symmetric processes)
//! g_γ,±(x) = ∫ (Re χ_ξ(x))_± ‖ξ‖^{-γ} dξ
//! ```
//!
//! evaluated as improper integrals over `ℝ^d`. Results are either finite with
//! an error estimate or a divergence verdict carrying the cumulative
//! dyadic-ring partial integrals as witness.

mod rings;

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{LevyTriplet, ExponentValue};
use crate::scalar::{neg, pos};

pub use rings::{RingTrace, TREND_SLACK, TREND_WINDOW};
pub(crate) use rings::{integrate_rings, FnIntegrand, RadialIntegrand, RadialWeight};

/// Which part of `Re χ_ξ(x)` is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignPart {
    Plus,
    Minus,
    /// The full real part; only defined here for symmetric processes, where it
    /// coincides with `f_γ`.
    Full,
}

impl std::str::FromStr for SignPart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(SignPart::Plus),
            "minus" | "-" => Ok(SignPart::Minus),
            "full" => Ok(SignPart::Full),
            other => Err(Error::config("sign", format!("unknown sign part `{other}`"))),
        }
    }
}

/// Extended-real outcome of a nonnegative improper integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GaugeValue {
    Finite { value: f64, err: f64 },
    Divergent { witness: Vec<f64>, note: String },
}

impl GaugeValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, GaugeValue::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        !self.is_finite()
    }

    /// The value as an extended real: `+∞` for divergent results.
    pub fn extended(&self) -> f64 {
        match self {
            GaugeValue::Finite { value, .. } => *value,
            GaugeValue::Divergent { .. } => f64::INFINITY,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            GaugeValue::Finite { err, .. } => *err,
            GaugeValue::Divergent { .. } => f64::INFINITY,
        }
    }

    pub(crate) fn zero() -> Self {
        GaugeValue::Finite {
            value: 0.0,
            err: 0.0,
        }
    }
}

/// Numerical controls shared by every radial integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaugeControls {
    /// Outer radius; the ring count is `log2(r_max)`.
    pub r_max: f64,
    /// Per-panel relative tolerance.
    pub rel_tol: f64,
    /// Cumulative value above which the integral is declared divergent.
    pub threshold: f64,
    /// Stop once the extrapolated geometric tail falls below this fraction of
    /// the running integral.
    pub tail_rel_tol: f64,
    /// Keep integrating every ring up to `r_max` even after a verdict.
    pub exhaust: bool,
}

impl Default for GaugeControls {
    fn default() -> Self {
        Self {
            r_max: 1048576.0,
            rel_tol: 1e-9,
            threshold: 1e6,
            tail_rel_tol: 1e-7,
            exhaust: false,
        }
    }
}

impl GaugeControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max >= 1024.0) || !self.r_max.is_finite() {
            return Err(Error::config("r_max", "must be finite and at least 2^10"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-3) {
            return Err(Error::config("rel_tol", "must lie in (0, 1e-3)"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::config("threshold", "must be positive"));
        }
        if !(self.tail_rel_tol > 0.0) {
            return Err(Error::config("tail_rel_tol", "must be positive"));
        }
        Ok(())
    }

    pub fn ring_count(&self) -> usize {
        self.r_max.log2().ceil() as usize
    }
}

/// Arguments of [`g_gamma`].
#[derive(Clone, Debug)]
pub struct GaugeQuery<'a> {
    pub spec: &'a LevyTriplet<f64>,
    pub gamma: f64,
    pub x: f64,
    pub sign: SignPart,
    pub controls: GaugeControls,
}

impl<'a> GaugeQuery<'a> {
    pub fn new(spec: &'a LevyTriplet<f64>, gamma: f64, x: f64, sign: SignPart) -> Self {
        Self {
            spec,
            gamma,
            x,
            sign,
            controls: GaugeControls::default(),
        }
    }

    pub fn with_controls(mut self, controls: GaugeControls) -> Self {
        self.controls = controls;
        self
    }

    fn validate(&self) -> Result<()> {
        check_gamma(self.gamma, self.spec.dim())?;
        if !self.x.is_finite() {
            return Err(Error::Domain("x must be finite".into()));
        }
        self.controls.validate()
    }
}

fn check_gamma(gamma: f64, dim: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma < dim as f64) {
        return Err(Error::Domain(format!("γ = {gamma} must lie in (0, {dim})")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Part {
    Plus,
    Minus,
    /// `e^{-|x| Re Ψ}`, the `f_γ` integrand.
    Modulus,
}

/// Cached structural bounds of an exponent used for panel placement.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ExponentBounds {
    /// `‖-b + Σ_{‖y‖≤1} λ y‖`.
    pub im_linear: f64,
    /// `Σ λ`.
    pub jump_mass: f64,
    /// `Σ λ ‖y‖`.
    pub jump_moment: f64,
    pub symmetric: bool,
    pub bounded_re: bool,
}

impl ExponentBounds {
    pub fn of(spec: &LevyTriplet<f64>) -> Self {
        let c = spec.im_linear_coefficient();
        Self {
            im_linear: c.iter().map(|v| v * v).sum::<f64>().sqrt(),
            jump_mass: spec.jump_mass(),
            jump_moment: spec.jump_moment(),
            symmetric: spec.is_symmetric(),
            bounded_re: spec.has_bounded_real_part(),
        }
    }

    /// Bound for `|Im Ψ(ξ)|` over `‖ξ‖ ≤ r`.
    pub fn im_abs(&self, r: f64) -> f64 {
        if self.symmetric {
            0.0
        } else {
            self.im_linear * r + self.jump_mass
        }
    }

    /// Lipschitz bound for `Im Ψ`.
    pub fn im_lipschitz(&self) -> f64 {
        if self.symmetric {
            0.0
        } else {
            self.im_linear + self.jump_moment
        }
    }

    /// Angular-frequency bound of `ξ ↦ Re χ_ξ(u)` for `|u| ≤ span`.
    pub fn oscillation(&self, span: f64) -> f64 {
        span * (self.im_lipschitz() + self.jump_moment)
    }
}

struct GaugeIntegrand<'a> {
    spec: &'a LevyTriplet<f64>,
    ax: f64,
    part: Part,
    bounds: ExponentBounds,
}

impl GaugeIntegrand<'_> {
    fn psi(&self, r: f64) -> ExponentValue<f64> {
        self.spec.radial_exponent(r)
    }

    fn phase_cos(&self, r: f64) -> f64 {
        (self.ax * self.psi(r).im).cos()
    }
}

impl RadialIntegrand for GaugeIntegrand<'_> {
    fn value(&self, r: f64) -> f64 {
        let psi = self.psi(r);
        let envelope = (-self.ax * psi.re).exp();
        match self.part {
            Part::Modulus => envelope,
            Part::Plus => pos(envelope * (self.ax * psi.im).cos()),
            Part::Minus => neg(envelope * (self.ax * psi.im).cos()),
        }
    }

    fn kinks(&self, a: f64, b: f64) -> Vec<f64> {
        if self.part == Part::Modulus || self.ax * self.bounds.im_abs(b) < FRAC_PI_2 {
            return Vec::new();
        }
        let step = PI / (8.0 * (1.0 + self.ax * self.bounds.im_lipschitz()));
        sign_changes(|r| self.phase_cos(r), a, b, step)
    }

    fn max_panel(&self) -> Option<f64> {
        let omega = self.ax * (self.bounds.im_lipschitz() + self.bounds.jump_moment);
        (omega > 0.0).then(|| 2.0 * PI / (1.0 + omega))
    }

    fn vanishes_on(&self, _a: f64, b: f64) -> bool {
        self.part == Part::Minus && self.ax * self.bounds.im_abs(b) < FRAC_PI_2
    }

    fn vanishes_beyond(&self, _r: f64) -> bool {
        self.part == Part::Minus
            && (self.bounds.symmetric
                || (self.bounds.im_linear == 0.0 && self.ax * self.bounds.jump_mass < FRAC_PI_2))
    }

    fn trend_test(&self) -> bool {
        self.bounds.bounded_re
    }
}

/// Zeros of a continuous function on `(a, b)`, bracketed on a grid of the
/// given step and refined by bisection.
pub(crate) fn sign_changes<F: Fn(f64) -> f64 + Sync>(g: F, a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    const CHUNK: usize = 4096;
    let chunks = n.div_ceil(CHUNK);
    let grid = |i: usize| if i >= n { b } else { a + (b - a) * i as f64 / n as f64 };
    let scan = |c: usize| {
        let mut out = Vec::new();
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n);
        let mut x0 = grid(lo);
        let mut g0 = g(x0);
        for i in (lo + 1)..=hi {
            let x1 = grid(i);
            let g1 = g(x1);
            if (g0 > 0.0 && g1 < 0.0) || (g0 < 0.0 && g1 > 0.0) {
                let (mut l, mut r, gl) = (x0, x1, g0);
                for _ in 0..100 {
                    let m = 0.5 * (l + r);
                    if m <= l || m >= r {
                        break;
                    }
                    let gm = g(m);
                    if (gm > 0.0) == (gl > 0.0) && gm != 0.0 {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                out.push(0.5 * (l + r));
            }
            x0 = x1;
            g0 = g1;
        }
        out
    };
    if chunks > 1 {
        (0..chunks).into_par_iter().map(scan).collect::<Vec<_>>().concat()
    } else {
        scan(0)
    }
}

fn check_radial_support(spec: &LevyTriplet<f64>) -> Result<()> {
    if spec.dim() > 1 && !spec.is_isotropic() {
        return Err(Error::Unsupported(
            "anisotropic exponents in dimension ≥ 2 are not integrated".into(),
        ));
    }
    Ok(())
}

/// Divergence witness for `x = 0`, where the integrand is the pure power
/// `‖ξ‖^{-γ}`: `S_m = s_{d-1} 2^{m(d-γ)} / (d-γ)`.
fn power_witness(dim: usize, gamma: f64, controls: &GaugeControls) -> GaugeValue {
    let w = RadialWeight { dim, gamma };
    let s = dim as f64 - gamma;
    let surface = w.surface();
    let mut witness = Vec::new();
    for m in 0..=controls.ring_count() {
        let v = surface * (m as f64 * s).exp2() / s;
        witness.push(v);
        if v > controls.threshold {
            break;
        }
    }
    GaugeValue::Divergent {
        witness,
        note: "x = 0: integrand reduces to ‖ξ‖^{-γ}, not integrable at infinity".into(),
    }
}

fn run(
    spec: &LevyTriplet<f64>,
    gamma: f64,
    x: f64,
    part: Part,
    controls: &GaugeControls,
) -> Result<RingTrace> {
    let integrand = GaugeIntegrand {
        spec,
        ax: x.abs(),
        part,
        bounds: ExponentBounds::of(spec),
    };
    integrate_rings(
        &integrand,
        RadialWeight {
            dim: spec.dim(),
            gamma,
        },
        controls,
    )
}

/// `f_γ(x) = ∫ e^{-|x|Ψ(ξ)} ‖ξ‖^{-γ} dξ` for a symmetric process.
pub fn f_gamma(
    spec: &LevyTriplet<f64>,
    gamma: f64,
    x: f64,
    controls: &GaugeControls,
) -> Result<GaugeValue> {
    check_gamma(gamma, spec.dim())?;
    controls.validate()?;
    if let Some((xi, im)) = spec.asymmetry_witness() {
        return Err(Error::NotSymmetric { xi, im });
    }
    check_radial_support(spec)?;
    if x == 0.0 {
        return Ok(power_witness(spec.dim(), gamma, controls));
    }
    Ok(run(spec, gamma, x, Part::Modulus, controls)?.value)
}

/// `g_{γ,±}(x)`, with `SignPart::Full` accepted for symmetric processes.
pub fn g_gamma(query: &GaugeQuery<'_>) -> Result<GaugeValue> {
    Ok(g_gamma_trace(query)?.value)
}

/// Like [`g_gamma`] but returns the per-ring contributions as well.
pub fn g_gamma_trace(query: &GaugeQuery<'_>) -> Result<RingTrace> {
    query.validate()?;
    check_radial_support(query.spec)?;
    let part = match query.sign {
        SignPart::Plus => Part::Plus,
        SignPart::Minus => Part::Minus,
        SignPart::Full => {
            if let Some((xi, im)) = query.spec.asymmetry_witness() {
                return Err(Error::NotSymmetric { xi, im });
            }
            Part::Plus
        }
    };
    if query.x == 0.0 {
        let value = if part == Part::Minus {
            GaugeValue::zero()
        } else {
            power_witness(query.spec.dim(), query.gamma, &query.controls)
        };
        return Ok(RingTrace {
            core: 0.0,
            rings: Vec::new(),
            quad_error: 0.0,
            value,
        });
    }
    run(query.spec, query.gamma, query.x, part, &query.controls)
}

/// `s_{d-1} ∫₀^∞ F(r) r^{d-1-γ} dr` for a nonnegative radial profile `F`.
pub fn radial_reduce<F>(profile: F, gamma: f64, dim: usize, controls: &GaugeControls) -> Result<GaugeValue>
where
    F: Fn(f64) -> f64 + Sync,
{
    if dim < 1 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !(gamma < dim as f64) || !gamma.is_finite() {
        return Err(Error::Domain(format!("γ = {gamma} must be below d = {dim}")));
    }
    controls.validate()?;
    Ok(integrate_rings(&FnIntegrand(profile), RadialWeight { dim, gamma }, controls)?.value)
}

#[cfg(test)]
mod tests;
