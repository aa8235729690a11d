//! Dyadic-ring integration of radial integrands `s_{d-1} ∫₀^∞ F(r) r^{d-1-γ} dr`.
//!
//! The half-line is cut into a core panel `[0, 1]` and rings `[2^m, 2^{m+1}]`.
//! The core uses the substitution `u = r^{d-γ}`, which absorbs the algebraic
//! weight exactly. Each ring is split at integrand kinks and at a maximum panel
//! length, panels are integrated independently (in parallel) and summed in
//! panel order, so results do not depend on the thread count.

use rayon::prelude::*;

use super::{GaugeControls, GaugeValue};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadTolerance};

/// Consecutive non-decreasing rings needed to call a trend non-summable.
pub const TREND_WINDOW: usize = 8;
/// Allowed shrink factor per ring inside the non-summable trend window.
pub const TREND_SLACK: f64 = 1e-3;
/// Rings that must shrink by at least this factor before the tail is extrapolated.
const DECAY_RATIO: f64 = 0.9;
const DECAY_WINDOW: usize = 4;
const MAX_PANELS_PER_RING: usize = 1 << 24;

/// A nonnegative radial integrand together with the structural hints the ring
/// engine uses to place panels and short-circuit work.
pub(crate) trait RadialIntegrand: Sync {
    fn value(&self, r: f64) -> f64;

    /// Interior points of `(a, b)` where the integrand has a kink.
    fn kinks(&self, _a: f64, _b: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Upper bound on panel length (oscillation scale).
    fn max_panel(&self) -> Option<f64> {
        None
    }

    /// True only if the integrand is identically zero on `[a, b]`.
    fn vanishes_on(&self, _a: f64, _b: f64) -> bool {
        false
    }

    /// True only if the integrand is identically zero on `[r, ∞)`.
    fn vanishes_beyond(&self, _r: f64) -> bool {
        false
    }

    /// Whether sustained ring growth is evidence of divergence. Integrands that
    /// eventually decay for structural reasons switch this off.
    fn trend_test(&self) -> bool {
        true
    }
}

/// Adapter for plain closures.
pub(crate) struct FnIntegrand<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> RadialIntegrand for FnIntegrand<F> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r)
    }
}

/// Per-ring record of a radial integration.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RingTrace {
    /// Contribution of `‖ξ‖ ≤ 1`.
    pub core: f64,
    /// Contribution of `‖ξ‖ ∈ [2^m, 2^{m+1}]`, for every ring that was evaluated.
    pub rings: Vec<f64>,
    /// Summed quadrature error estimates.
    pub quad_error: f64,
    /// Final classification.
    pub value: GaugeValue,
}

impl RingTrace {
    /// Cumulative partial integrals `S_0 = core`, `S_{m+1} = S_m + ring_m`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut s = self.core;
        let mut out = Vec::with_capacity(self.rings.len() + 1);
        out.push(s);
        for r in &self.rings {
            s += r;
            out.push(s);
        }
        out
    }
}

/// Geometry of the reduction: dimension, power `γ` and the surface factor.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RadialWeight {
    pub dim: usize,
    pub gamma: f64,
}

impl RadialWeight {
    pub fn exponent(&self) -> f64 {
        self.dim as f64 - 1.0 - self.gamma
    }

    /// `s_{d-1} = 2 π^{d/2} / Γ(d/2)`; equals 2 for `d = 1`.
    pub fn surface(&self) -> f64 {
        let h = self.dim as f64 / 2.0;
        2.0 * std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h)
    }
}

fn split_points<I: RadialIntegrand + ?Sized>(f: &I, a: f64, b: f64) -> Result<Vec<f64>> {
    let mut pts = vec![a];
    pts.extend(f.kinks(a, b).into_iter().filter(|&k| k > a && k < b));
    pts.push(b);
    let Some(maxp) = f.max_panel() else {
        return Ok(pts);
    };
    let mut out = Vec::with_capacity(pts.len());
    out.push(a);
    for w in pts.windows(2) {
        let len = w[1] - w[0];
        let pieces = (len / maxp).ceil().max(1.0);
        if pieces > MAX_PANELS_PER_RING as f64 {
            return Err(Error::Unsupported(format!(
                "integrand oscillates too fast to resolve on [{a}, {b}]"
            )));
        }
        let pieces = pieces as usize;
        for k in 1..pieces {
            out.push(w[0] + len * k as f64 / pieces as f64);
        }
        out.push(w[1]);
    }
    if out.len() > MAX_PANELS_PER_RING {
        return Err(Error::Unsupported(format!(
            "too many panels on [{a}, {b}]"
        )));
    }
    Ok(out)
}

fn panel_sum<G: Fn(f64) -> f64 + Sync>(pts: &[f64], g: &G, tol: QuadTolerance) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = if pts.len() > 64 {
        pts.par_windows(2)
            .map(|w| {
                let r = integrate(g, w[0], w[1], tol);
                (r.value, r.error)
            })
            .collect()
    } else {
        pts.windows(2)
            .map(|w| {
                let r = integrate(g, w[0], w[1], tol);
                (r.value, r.error)
            })
            .collect()
    };
    parts
        .iter()
        .fold((0.0, 0.0), |(v, e), &(pv, pe)| (v + pv, e + pe))
}

fn core_contribution<I: RadialIntegrand + ?Sized>(
    f: &I,
    w: RadialWeight,
    tol: QuadTolerance,
) -> Result<(f64, f64)> {
    if f.vanishes_on(0.0, 1.0) {
        return Ok((0.0, 0.0));
    }
    let s = w.dim as f64 - w.gamma;
    let inv = 1.0 / s;
    let pts: Vec<f64> = split_points(f, 0.0, 1.0)?
        .into_iter()
        .map(|r| r.powf(s))
        .collect();
    let g = |u: f64| f.value(u.powf(inv)) * inv;
    Ok(panel_sum(&pts, &g, tol))
}

fn ring_contribution<I: RadialIntegrand + ?Sized>(
    f: &I,
    w: RadialWeight,
    a: f64,
    b: f64,
    tol: QuadTolerance,
) -> Result<(f64, f64)> {
    if f.vanishes_on(a, b) {
        return Ok((0.0, 0.0));
    }
    let p = w.exponent();
    let pts = split_points(f, a, b)?;
    let g = |r: f64| f.value(r) * r.powf(p);
    Ok(panel_sum(&pts, &g, tol))
}

fn non_summable(rings: &[f64]) -> bool {
    if rings.len() < TREND_WINDOW + 1 {
        return false;
    }
    let tail = &rings[rings.len() - TREND_WINDOW - 1..];
    tail.windows(2)
        .all(|w| w[0] > 0.0 && w[1] > 0.0 && w[1] >= (1.0 - TREND_SLACK) * w[0])
}

/// Largest ratio over the decay window, or `None` if the rings are not
/// (yet) decaying geometrically.
fn decay_ratio(rings: &[f64]) -> Option<f64> {
    if rings.len() < DECAY_WINDOW + 1 {
        return None;
    }
    let tail = &rings[rings.len() - DECAY_WINDOW - 1..];
    if tail[0] <= 0.0 {
        return None;
    }
    let mut q_max: f64 = 0.0;
    for w in tail.windows(2) {
        if w[0] > 0.0 {
            let q = w[1] / w[0];
            if q > DECAY_RATIO {
                return None;
            }
            q_max = q_max.max(q);
        } else if w[1] > 0.0 {
            return None;
        }
    }
    Some(q_max)
}

/// Integrates `s_{d-1} ∫₀^{R_max} F(r) r^{d-1-γ} dr` ring by ring and
/// classifies the result as finite or divergent.
pub(crate) fn integrate_rings<I: RadialIntegrand + ?Sized>(
    f: &I,
    w: RadialWeight,
    controls: &GaugeControls,
) -> Result<RingTrace> {
    let tol = QuadTolerance {
        abs: 0.0,
        rel: controls.rel_tol,
        max_subdivisions: 64,
    };
    let surface = w.surface();
    let (core_raw, core_err) = core_contribution(f, w, tol)?;
    let core = surface * core_raw;
    let mut quad_error = surface * core_err;
    let mut rings: Vec<f64> = Vec::new();
    let mut cumulative = core;
    let mut divergent: Option<String> = None;
    let mut tail_estimate = None;
    let ring_count = controls.ring_count();
    for m in 0..ring_count {
        let a = (m as f64).exp2();
        let b = 2.0 * a;
        if divergent.is_none() && !controls.exhaust && f.vanishes_beyond(a) {
            tail_estimate = Some(0.0);
            break;
        }
        let (v, e) = ring_contribution(f, w, a, b, tol)?;
        let contribution = surface * v;
        quad_error += surface * e;
        rings.push(contribution);
        cumulative += contribution;

        if divergent.is_none() {
            if cumulative > controls.threshold {
                divergent = Some(format!(
                    "cumulative integral {cumulative:.6e} exceeds threshold {:.1e} at radius 2^{}",
                    controls.threshold,
                    m + 1
                ));
            } else if f.trend_test() && non_summable(&rings) {
                divergent = Some(format!(
                    "{TREND_WINDOW} consecutive ring contributions without decay up to radius 2^{}; \
                     ring growth ratio {:.4}",
                    m + 1,
                    rings[rings.len() - 1] / rings[rings.len() - 2]
                ));
            }
        }
        if divergent.is_some() {
            if controls.exhaust {
                continue;
            }
            break;
        }
        if !controls.exhaust {
            if let Some(q) = decay_ratio(&rings) {
                let last = *rings.last().unwrap();
                let tail = if q > 0.0 { last * q / (1.0 - q) } else { 0.0 };
                if tail <= controls.tail_rel_tol * cumulative {
                    tail_estimate = Some(tail);
                    break;
                }
            }
        }
    }

    let partial = {
        let mut s = core;
        let mut v = vec![s];
        for r in &rings {
            s += r;
            v.push(s);
        }
        v
    };
    let value = if let Some(note) = divergent {
        GaugeValue::Divergent {
            witness: partial,
            note,
        }
    } else {
        let tail = match tail_estimate {
            Some(t) => t,
            None => {
                let n = rings.len();
                let last = rings.last().copied().unwrap_or(0.0);
                let prev = if n >= 2 { rings[n - 2] } else { core };
                if last > 0.0 && last >= (1.0 - TREND_SLACK) * prev {
                    return Ok(RingTrace {
                        core,
                        rings,
                        quad_error,
                        value: GaugeValue::Divergent {
                            witness: partial,
                            note: format!(
                                "ring contributions still non-decreasing at R_max = {:.3e}; \
                                 integral not summable within range",
                                controls.r_max
                            ),
                        },
                    });
                }
                if last > 0.0 && prev > 0.0 {
                    let q = last / prev;
                    last * q / (1.0 - q)
                } else {
                    0.0
                }
            }
        };
        GaugeValue::Finite {
            value: cumulative,
            err: quad_error + tail,
        }
    };
    Ok(RingTrace {
        core,
        rings,
        quad_error,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn controls() -> GaugeControls {
        GaugeControls::default()
    }

    #[test]
    fn surface_factors() {
        let w1 = RadialWeight { dim: 1, gamma: 0.5 };
        let w2 = RadialWeight { dim: 2, gamma: 0.5 };
        let w3 = RadialWeight { dim: 3, gamma: 0.5 };
        assert!((w1.surface() - 2.0).abs() < 1e-14);
        assert!((w2.surface() - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((w3.surface() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn gaussian_is_finite() {
        let t = integrate_rings(
            &FnIntegrand(|r: f64| (-r * r).exp()),
            RadialWeight { dim: 1, gamma: 0.0 },
            &controls(),
        )
        .unwrap();
        match t.value {
            GaugeValue::Finite { value, err } => {
                assert!((value - std::f64::consts::PI.sqrt()).abs() < 1e-9, "{value}");
                assert!(err < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pure_power_diverges_with_monotone_witness() {
        let t = integrate_rings(
            &FnIntegrand(|_r: f64| 1.0),
            RadialWeight { dim: 1, gamma: 0.5 },
            &controls(),
        )
        .unwrap();
        match &t.value {
            GaugeValue::Divergent { witness, .. } => {
                assert!(witness.windows(2).all(|w| w[1] >= w[0]));
                assert_eq!(witness.len(), TREND_WINDOW + 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn slow_growth_is_caught_by_trend_not_threshold() {
        // ring ratio 2^0.01: cumulative stays tiny but the rings never shrink
        let t = integrate_rings(
            &FnIntegrand(|_r: f64| 1.0),
            RadialWeight { dim: 1, gamma: 0.99 },
            &controls(),
        )
        .unwrap();
        let GaugeValue::Divergent { witness, note } = t.value else {
            panic!("expected divergence")
        };
        assert!(*witness.last().unwrap() < 1e3);
        assert!(note.contains("without decay"));
    }

    #[test]
    fn threshold_triggers_divergence() {
        let c = GaugeControls {
            threshold: 10.0,
            ..controls()
        };
        let t = integrate_rings(
            &FnIntegrand(|_r: f64| 1.0),
            RadialWeight { dim: 1, gamma: 0.1 },
            &c,
        )
        .unwrap();
        let GaugeValue::Divergent { witness, note } = t.value else {
            panic!()
        };
        assert!(*witness.last().unwrap() > 10.0);
        assert!(note.contains("threshold"));
    }
}
