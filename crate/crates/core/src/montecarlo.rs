//! Exact path simulation at a measure's atoms and empirical checks of
//! `E e^{i⟨ξ, X(t) - X(s)⟩} = χ_ξ(t - s)` and `E_{χ_ξ}(μ) = E|∫ e^{i⟨ξ, X(t)⟩} μ(dt)|²`.
//!
//! Path `k` draws from the ChaCha8 stream `k` of the master seed, so results do
//! not depend on batch layout or thread count.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::LevyTriplet;
use crate::linalg::psd_factor;
use crate::measure::{chi_energy, DiscreteMeasure};

/// Cap on `‖X(t_i) - X(t_j)‖^{-β}` for coincident image points.
pub const IMAGE_ENERGY_CAP: f64 = 1e12;
/// Acceptance band in standard errors.
pub const ACCEPT_SIGMAS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    /// Pair path `2k+1` with path `2k` by negating its Gaussian and stable draws.
    pub antithetic: bool,
    pub batch_size: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            seed: 0x5eed,
            antithetic: false,
            batch_size: 1000,
        }
    }
}

impl McConfig {
    pub fn new(paths: usize, seed: u64) -> Self {
        let batch_size = if paths % 1000 == 0 { 1000 } else { paths };
        Self {
            paths,
            seed,
            antithetic: false,
            batch_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 100 {
            return Err(Error::config("paths", "need at least 100 paths"));
        }
        if self.batch_size == 0 || self.paths % self.batch_size != 0 {
            return Err(Error::config("batch_size", "must divide the path count"));
        }
        if self.antithetic && self.batch_size % 2 != 0 {
            return Err(Error::config("batch_size", "must be even for antithetic pairs"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths: usize,
    pub seed: u64,
    pub batch_means: Vec<f64>,
}

impl McEstimate {
    /// `|mean - target| ≤ 4 se` (plus rounding slack).
    pub fn accepts(&self, target: f64) -> bool {
        (self.mean - target).abs() <= ACCEPT_SIGMAS * self.std_error + 1e-12
    }
}

/// Exact increment sampler for a fixed list of times.
struct PathSampler {
    dim: usize,
    /// `(b - Σ_{‖y‖≤1} λ y) dt` per step.
    shifts: Vec<Vec<f64>>,
    sqrt_dt: Vec<f64>,
    /// Lower-triangular factor of `A`, or `None` without a Gaussian part.
    factor: Option<Vec<f64>>,
    jumps: Vec<(Vec<f64>, Vec<Option<Poisson<f64>>>)>,
    /// `(α, (c dt)^{1/α})` per step.
    stable: Option<(f64, Vec<f64>)>,
}

impl PathSampler {
    fn new(spec: &LevyTriplet<f64>, times: &[f64]) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::config("times", "need at least one time"));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::config("times", "times must be finite and nonnegative"));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("times", "times must be nondecreasing"));
        }
        let d = spec.dim();
        if spec.stable().is_some() && d >= 2 {
            return Err(Error::Unsupported(
                "stable increments are only sampled in dimension 1".into(),
            ));
        }
        let dts: Vec<f64> = std::iter::once(times[0])
            .chain(times.windows(2).map(|w| w[1] - w[0]))
            .collect();
        let mut velocity = spec.drift_vector().to_vec();
        for atom in spec.jumps() {
            if atom.y.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                for (v, y) in velocity.iter_mut().zip(&atom.y) {
                    *v -= atom.lambda * y;
                }
            }
        }
        let shifts = dts.iter().map(|dt| velocity.iter().map(|v| v * dt).collect()).collect();
        let a = spec.diffusion();
        let factor = a.iter().any(|&v| v != 0.0).then(|| psd_factor(a, d));
        let jumps = spec
            .jumps()
            .iter()
            .map(|atom| {
                let dists = dts
                    .iter()
                    .map(|dt| Poisson::new(atom.lambda * dt).ok())
                    .collect();
                (atom.y.clone(), dists)
            })
            .collect();
        let stable = spec
            .stable()
            .map(|s| (s.alpha, dts.iter().map(|dt| (s.c * dt).powf(1.0 / s.alpha)).collect()));
        Ok(Self {
            dim: d,
            shifts,
            sqrt_dt: dts.iter().map(|dt| dt.sqrt()).collect(),
            factor,
            jumps,
            stable,
        })
    }

    /// Fills `out` (row-major `times × dim`) with one path.
    fn sample(&self, rng: &mut ChaCha8Rng, flip: bool, out: &mut [f64]) {
        let d = self.dim;
        let sign = if flip { -1.0 } else { 1.0 };
        let mut x = vec![0.0; d];
        let mut z = vec![0.0; d];
        for (step, shift) in self.shifts.iter().enumerate() {
            for (xi, s) in x.iter_mut().zip(shift) {
                *xi += s;
            }
            if let Some(l) = &self.factor {
                for zi in z.iter_mut() {
                    *zi = sign * rng.sample::<f64, _>(StandardNormal);
                }
                let h = self.sqrt_dt[step];
                for i in 0..d {
                    let g: f64 = (0..=i).map(|k| l[i * d + k] * z[k]).sum();
                    x[i] += h * g;
                }
            }
            for (y, dists) in &self.jumps {
                if let Some(p) = &dists[step] {
                    let count = p.sample(rng);
                    if count > 0.0 {
                        for (xi, yi) in x.iter_mut().zip(y) {
                            *xi += count * yi;
                        }
                    }
                }
            }
            if let Some((alpha, scales)) = &self.stable {
                let v = (rng.sample::<f64, _>(Open01) - 0.5) * PI;
                let w: f64 = Exp1.sample(rng);
                x[0] += sign * scales[step] * stable_variate(*alpha, v, w);
            }
            out[step * d..(step + 1) * d].copy_from_slice(&x);
        }
    }
}

/// Chambers–Mallows–Stuck variate with `E e^{iξZ} = e^{-|ξ|^α}`,
/// from `V ~ U(-π/2, π/2)` and `W ~ Exp(1)`.
fn stable_variate(alpha: f64, v: f64, w: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `X(t_1), ..., X(t_n)` for one path, as `n` vectors of length `d`.
pub fn sample_path(spec: &LevyTriplet<f64>, times: &[f64], seed: u64, stream: u64) -> Result<Vec<Vec<f64>>> {
    let sampler = PathSampler::new(spec, times)?;
    let mut out = vec![0.0; times.len() * spec.dim()];
    sampler.sample(&mut stream_rng(seed, stream), false, &mut out);
    Ok(out.chunks(spec.dim()).map(|c| c.to_vec()).collect())
}

/// Batch accumulator: count, mean, sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let m2 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Self { n, mean, m2 }
    }

    fn merge(self, o: Self) -> Self {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Runs `f` on every path of every batch; `f` receives the positions at the
/// sampler's times and returns `K` per-path statistics.
fn run_paths<const K: usize, F>(
    spec: &LevyTriplet<f64>,
    times: &[f64],
    config: &McConfig,
    f: F,
) -> Result<[McEstimate; K]>
where
    F: Fn(&[f64]) -> [f64; K] + Sync,
{
    config.validate()?;
    let sampler = PathSampler::new(spec, times)?;
    let width = times.len() * spec.dim();
    let batches = config.paths / config.batch_size;
    let per_batch: Vec<[Moments; K]> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut buf = vec![0.0; width];
            let mut values: [Vec<f64>; K] = std::array::from_fn(|_| Vec::with_capacity(config.batch_size));
            let first = b * config.batch_size;
            if config.antithetic {
                for pair in (first / 2)..((first + config.batch_size) / 2) {
                    let mut rng = stream_rng(config.seed, pair as u64);
                    let mut rng2 = rng.clone();
                    sampler.sample(&mut rng, false, &mut buf);
                    let a = f(&buf);
                    sampler.sample(&mut rng2, true, &mut buf);
                    let c = f(&buf);
                    for k in 0..K {
                        values[k].push(0.5 * (a[k] + c[k]));
                    }
                }
            } else {
                for path in first..first + config.batch_size {
                    let mut rng = stream_rng(config.seed, path as u64);
                    sampler.sample(&mut rng, false, &mut buf);
                    let a = f(&buf);
                    for k in 0..K {
                        values[k].push(a[k]);
                    }
                }
            }
            std::array::from_fn(|k| Moments::of(&values[k]))
        })
        .collect();
    Ok(std::array::from_fn(|k| {
        let total = per_batch
            .iter()
            .fold(Moments::default(), |acc, m| acc.merge(m[k]));
        let var = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
        McEstimate {
            mean: total.mean,
            std_error: (var / total.n).sqrt(),
            paths: config.paths,
            seed: config.seed,
            batch_means: per_batch.iter().map(|m| m[k].mean).collect(),
        }
    }))
}

fn check_xi(spec: &LevyTriplet<f64>, xi: &[f64]) -> Result<()> {
    if xi.len() != spec.dim() {
        return Err(Error::Dimension {
            expected: spec.dim(),
            got: xi.len(),
        });
    }
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("xi", "must be finite"));
    }
    Ok(())
}

fn phase(xi: &[f64], x: &[f64]) -> f64 {
    xi.iter().zip(x).map(|(a, b)| a * b).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiCheck {
    pub real: McEstimate,
    pub imag: McEstimate,
    pub analytic_re: f64,
    pub analytic_im: f64,
    pub accepted: bool,
}

/// Empirical `E e^{i⟨ξ, X(t) - X(s)⟩}` against `χ_ξ(t - s)`.
pub fn mc_chi_check(spec: &LevyTriplet<f64>, xi: &[f64], t: f64, s: f64, config: &McConfig) -> Result<ChiCheck> {
    check_xi(spec, xi)?;
    if !(s >= 0.0 && t >= s) {
        return Err(Error::config("t", "need t ≥ s ≥ 0"));
    }
    let d = spec.dim();
    let [real, imag] = run_paths(spec, &[s, t], config, |x| {
        let p = phase(xi, &x[d..]) - phase(xi, &x[..d]);
        [p.cos(), p.sin()]
    })?;
    let chi = spec.chi(xi, t - s)?;
    let accepted = real.accepts(chi.re) && imag.accepts(chi.im);
    Ok(ChiCheck {
        real,
        imag,
        analytic_re: chi.re,
        analytic_im: chi.im,
        accepted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub estimate: McEstimate,
    pub analytic: f64,
    pub accepted: bool,
}

/// Empirical `E|Σ_j w_j e^{i⟨ξ, X(t_j)⟩}|²` against the point-mass `E_{χ_ξ}(μ)`.
pub fn mc_chi_energy(
    spec: &LevyTriplet<f64>,
    xi: &[f64],
    mu: &DiscreteMeasure<f64>,
    config: &McConfig,
) -> Result<EnergyCheck> {
    check_xi(spec, xi)?;
    let d = spec.dim();
    let w = mu.weights();
    let [estimate] = run_paths(spec, mu.atoms(), config, |x| {
        let mut s = Complex::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            s += Complex::from_polar(*wj, phase(xi, &x[j * d..(j + 1) * d]));
        }
        let v = s.norm_sqr();
        // Σ w_j = 1 up to rounding, so only the last bits can exceed 1
        [v.min(1.0)]
    })?;
    let analytic = chi_energy(spec, xi, mu)?;
    Ok(EnergyCheck {
        accepted: estimate.accepts(analytic),
        estimate,
        analytic,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageEnergyEstimate {
    pub estimate: McEstimate,
    /// Fraction of pair terms hit by the cap, over all paths.
    pub capped_fraction: f64,
    /// Max batch mean over median batch mean.
    pub batch_instability: f64,
    /// True when any term was capped or the batch means disagree by more than 2×.
    pub heavy_tail: bool,
}

/// Per-path Riesz energy `Σ_{i≠j} w_i w_j ‖X(t_i) - X(t_j)‖^{-β}` of the image measure.
pub fn mc_image_riesz_energy(
    spec: &LevyTriplet<f64>,
    mu: &DiscreteMeasure<f64>,
    beta: f64,
    config: &McConfig,
) -> Result<ImageEnergyEstimate> {
    let d = spec.dim();
    if !(beta > 0.0 && beta < d as f64) {
        return Err(Error::Domain(format!("β = {beta} must lie in (0, {d})")));
    }
    let w = mu.weights();
    let n = mu.len();
    let pairs = (n * n.saturating_sub(1)).max(1) as f64;
    let [estimate, capped] = run_paths(spec, mu.atoms(), config, |x| {
        let mut e = 0.0;
        let mut hits = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                let r2: f64 = (0..d).map(|k| (x[i * d + k] - x[j * d + k]).powi(2)).sum();
                let term = r2.powf(-0.5 * beta);
                let term = if term >= IMAGE_ENERGY_CAP {
                    hits += 1;
                    IMAGE_ENERGY_CAP
                } else {
                    term
                };
                e += 2.0 * w[i] * w[j] * term;
            }
        }
        [e, 2.0 * hits as f64 / pairs]
    })?;
    let mut sorted = estimate.batch_means.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let max = *sorted.last().unwrap();
    let batch_instability = if median > 0.0 { max / median } else if max > 0.0 { f64::INFINITY } else { 1.0 };
    let capped_fraction = capped.mean;
    Ok(ImageEnergyEstimate {
        heavy_tail: capped_fraction > 0.0 || batch_instability > 2.0,
        estimate,
        capped_fraction,
        batch_instability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::JumpAtom;

    #[test]
    fn drift_path_is_deterministic() {
        let spec = LevyTriplet::drift(1.0);
        let x = sample_path(&spec, &[0.0, 0.5, 1.0], 3, 9).unwrap();
        assert_eq!(x, vec![vec![0.0], vec![0.5], vec![1.0]]);
    }

    #[test]
    fn paths_are_reproducible_per_stream() {
        let spec = LevyTriplet::poisson();
        let t = [0.25, 1.0, 3.0];
        assert_eq!(sample_path(&spec, &t, 1, 4).unwrap(), sample_path(&spec, &t, 1, 4).unwrap());
        let b = LevyTriplet::brownian();
        assert_ne!(sample_path(&b, &t, 1, 4).unwrap(), sample_path(&b, &t, 1, 5).unwrap());
    }

    #[test]
    fn poisson_path_is_a_counting_process() {
        // compensated atom: X(t) = N_t
        let spec = LevyTriplet::poisson();
        let t: Vec<f64> = (1..=20).map(|k| k as f64 * 0.25).collect();
        for stream in 0..50 {
            let x = sample_path(&spec, &t, 11, stream).unwrap();
            for w in x.windows(2) {
                let inc = w[1][0] - w[0][0];
                assert!(inc >= -1e-12 && (inc - inc.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stable_in_two_dimensions_is_unsupported() {
        let spec = LevyTriplet::new(
            2,
            vec![0.0, 0.0],
            vec![0.0; 4],
            vec![],
            Some(crate::levy::StablePart { alpha: 1.5, c: 1.0 }),
        )
        .unwrap();
        assert!(matches!(sample_path(&spec, &[1.0], 0, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(50, 0).validate().is_err());
        let c = McConfig {
            paths: 1000,
            batch_size: 300,
            ..McConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_frequency_is_exact() {
        let spec = LevyTriplet::symmetric_compound_poisson();
        let c = mc_chi_check(&spec, &[0.0], 1.0, 0.25, &McConfig::new(1000, 1)).unwrap();
        assert_eq!(c.real.mean, 1.0);
        assert_eq!(c.real.std_error, 0.0);
        assert_eq!(c.imag.mean, 0.0);
        let mu = DiscreteMeasure::uniform(vec![0.0, 0.3, 0.9]).unwrap();
        let e = mc_chi_energy(&spec, &[0.0], &mu, &McConfig::new(1000, 1)).unwrap();
        assert!((e.estimate.mean - 1.0).abs() < 1e-15);
        assert!(e.estimate.std_error < 1e-15);
    }

    #[test]
    fn chi_check_examples() {
        let cfg = McConfig::new(100_000, 7);
        let c = mc_chi_check(&LevyTriplet::poisson(), &[PI], 1.0, 0.0, &cfg).unwrap();
        assert!((c.analytic_re - (-2.0f64).exp()).abs() < 1e-14);
        assert!(c.analytic_im.abs() < 1e-14);
        assert!(c.accepted, "{c:?}");
        let c = mc_chi_check(&LevyTriplet::brownian(), &[1.0], 1.5, 0.5, &cfg).unwrap();
        assert!((c.analytic_re - (-0.5f64).exp()).abs() < 1e-14);
        assert!(c.accepted, "{c:?}");
    }

    #[test]
    fn antithetic_is_unbiased() {
        let cfg = McConfig {
            antithetic: true,
            ..McConfig::new(20_000, 3)
        };
        let spec = LevyTriplet::symmetric_stable(1.5, 0.7).unwrap();
        let c = mc_chi_check(&spec, &[1.3], 2.0, 0.5, &cfg).unwrap();
        assert!(c.accepted, "{c:?}");
        // odd part cancels exactly under antithetic pairs
        assert!(c.imag.mean.abs() < 1e-15);
    }

    #[test]
    fn stable_variates_match_exponent() {
        // independent route: empirical E cos(ξZ) against e^{-c dt |ξ|^α}
        for &(alpha, c) in &[(0.7, 1.0), (1.0, 0.5), (1.8, 2.0)] {
            let spec = LevyTriplet::symmetric_stable(alpha, c).unwrap();
            let r = mc_chi_check(&spec, &[0.8], 1.0, 0.0, &McConfig::new(100_000, 21)).unwrap();
            let expected = (-c * 0.8f64.powf(alpha)).exp();
            assert!((r.analytic_re - expected).abs() < 1e-14);
            assert!(r.accepted, "α={alpha}: {r:?}");
        }
    }

    #[test]
    fn multidimensional_gaussian_and_jumps() {
        let spec = LevyTriplet::new(
            2,
            vec![0.3, -0.1],
            vec![1.0, 0.5, 0.5, 2.0],
            vec![JumpAtom {
                y: vec![0.5, 2.0],
                lambda: 0.8,
            }],
            None,
        )
        .unwrap();
        let r = mc_chi_check(&spec, &[0.7, -0.4], 1.2, 0.2, &McConfig::new(100_000, 5)).unwrap();
        assert!(r.accepted, "{r:?}");
    }

    #[test]
    fn energy_examples() {
        let mu = DiscreteMeasure::uniform(vec![0.0, 1.0]).unwrap();
        let cfg = McConfig::new(100_000, 13);
        let e = mc_chi_energy(&LevyTriplet::brownian(), &[1.0], &mu, &cfg).unwrap();
        assert!((e.analytic - 0.5 * (1.0 + (-0.5f64).exp())).abs() < 1e-14);
        assert!(e.accepted, "{e:?}");
        let e = mc_chi_energy(&LevyTriplet::poisson(), &[PI], &mu, &cfg).unwrap();
        assert!((e.analytic - 0.5 * (1.0 + (-2.0f64).exp())).abs() < 1e-14);
        assert!(e.accepted, "{e:?}");
    }

    #[test]
    fn batch_layout_does_not_change_results() {
        let spec = LevyTriplet::poisson();
        let mu = DiscreteMeasure::uniform(vec![0.0, 0.5, 1.0]).unwrap();
        let a = mc_chi_energy(&spec, &[1.0], &mu, &McConfig::new(2000, 4)).unwrap();
        let b = mc_chi_energy(
            &spec,
            &[1.0],
            &mu,
            &McConfig {
                batch_size: 100,
                ..McConfig::new(2000, 4)
            },
        )
        .unwrap();
        assert!((a.estimate.mean - b.estimate.mean).abs() < 1e-14);
        assert!((a.estimate.std_error - b.estimate.std_error).abs() < 1e-14);
    }

    #[test]
    fn image_energy_examples() {
        let grid = crate::measure::SetGrid::interval(0.0, 1.0, 64);
        let mu = DiscreteMeasure::uniform(grid.atoms()).unwrap();
        let cfg = McConfig::new(1000, 2);
        let r = mc_image_riesz_energy(&LevyTriplet::drift(1.0), &mu, 0.5, &cfg).unwrap();
        // deterministic: the off-diagonal discrete Riesz energy of the atoms
        let t = mu.atoms();
        let mut direct = 0.0;
        for i in 0..64 {
            for j in 0..64 {
                if i != j {
                    direct += (t[i] - t[j]).abs().powf(-0.5) / 4096.0;
                }
            }
        }
        assert!((r.estimate.mean - direct).abs() < 1e-12 * direct);
        assert!(r.estimate.std_error < 1e-12);
        assert!(!r.heavy_tail);
        let r = mc_image_riesz_energy(&LevyTriplet::brownian(), &mu, 0.5, &McConfig::new(10_000, 2)).unwrap();
        assert!(r.estimate.mean.is_finite() && r.batch_instability < 2.0, "{r:?}");
        let tight = DiscreteMeasure::uniform(vec![0.1, 0.2, 0.3]).unwrap();
        let r = mc_image_riesz_energy(&LevyTriplet::poisson(), &tight, 0.5, &cfg).unwrap();
        assert!(r.capped_fraction > 0.5 && r.heavy_tail, "{r:?}");
    }
}
