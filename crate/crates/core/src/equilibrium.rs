//! Minimal energies `inf_w wᵀKw` over the probability simplex and the
//! resulting capacities `C = 1/E` (with `1/∞ = 0`, `1/0 = ∞`).
//!
//! The solver is Frank–Wolfe with away steps followed by an active-set
//! polish on the support. Coordinates with an infinite diagonal are excluded
//! first; remaining infinite off-diagonal entries are replaced by a large
//! finite penalty and the optimum is checked to put (almost) no mass on them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve};
use crate::measure::{quadratic_form, DiscreteMeasure, KernelMatrix, SetGrid};

/// Penalty replacing `+∞` off-diagonal entries, relative to the largest finite entry.
pub const BIG_M: f64 = 1e12;
/// Largest admissible weight product on infinite off-diagonal pairs.
pub const INFINITE_PAIR_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverControls {
    pub max_iterations: usize,
    /// Target for the optimality gap, relative to `max(1, wᵀKw)`.
    pub gap_tolerance: f64,
    /// Random restarts used when the kernel is not certified positive semidefinite.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverControls {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            gap_tolerance: 1e-8,
            restarts: 8,
            seed: 0x5eed,
        }
    }
}

impl SolverControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tolerance > 0.0) {
            return Err(Error::config("gap_tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("max_iterations", "must be positive"));
        }
        Ok(())
    }
}

/// One grid of a refinement schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub n: usize,
    #[serde(with = "crate::json::extended")]
    pub min_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub weights: Vec<f64>,
    #[serde(with = "crate::json::extended")]
    pub min_energy: f64,
    #[serde(with = "crate::json::extended")]
    pub capacity: f64,
    pub iterations: usize,
    /// `max(max_{supp}(Kw)_i - wᵀKw, wᵀKw - min_i (Kw)_i)`, clipped at 0.
    pub gap: f64,
    /// True when the finite part of the kernel was certified positive semidefinite,
    /// so the minimum is global.
    pub certified: bool,
    /// Coordinates excluded because of an infinite diagonal.
    pub excluded: Vec<usize>,
    /// `Σ w_i w_j` over pairs with `K_ij = +∞` (ignored in `min_energy` when
    /// below [`INFINITE_PAIR_TOLERANCE`]).
    pub infinite_pair_mass: f64,
    pub refinement: Vec<RefinementStep>,
}

/// `1/E` with `1/∞ = 0` and `1/0 = ∞`.
pub fn capacity_from_energy(e: f64) -> f64 {
    if e.is_infinite() {
        0.0
    } else if e == 0.0 {
        f64::INFINITY
    } else {
        1.0 / e
    }
}

struct Dense {
    n: usize,
    m: Vec<f64>,
}

impl Dense {
    fn col(&self, j: usize) -> &[f64] {
        &self.m[j * self.n..(j + 1) * self.n]
    }

    fn mul(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let row = &self.m[i * n..(i + 1) * n];
                row.iter().zip(w).map(|(a, b)| a * b).sum()
            })
            .with_min_len(64)
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gap_of(w: &[f64], y: &[f64]) -> f64 {
    let f = dot(w, y);
    let max_supp = w
        .iter()
        .zip(y)
        .filter(|(wi, _)| **wi > 0.0)
        .map(|(_, yi)| *yi)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_all = y.iter().copied().fold(f64::INFINITY, f64::min);
    (max_supp - f).max(f - min_all).max(0.0)
}

struct Run {
    w: Vec<f64>,
    energy: f64,
    gap: f64,
    iterations: usize,
}

fn frank_wolfe(k: &Dense, mut w: Vec<f64>, controls: &SolverControls) -> Run {
    let n = k.n;
    let mut y = k.mul(&w);
    let mut iterations = 0;
    for it in 0..controls.max_iterations {
        iterations = it + 1;
        if it % 512 == 511 {
            y = k.mul(&w);
        }
        let f = dot(&w, &y);
        let (s, ys) = y
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let (a, ya) = y
            .iter()
            .enumerate()
            .filter(|(i, _)| w[*i] > 0.0)
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let fw_gap = f - ys;
        let away_gap = ya - f;
        if fw_gap.max(away_gap) <= controls.gap_tolerance * f.abs().max(1.0) {
            break;
        }
        if fw_gap >= away_gap {
            let dy = ys - f;
            let curv = k.m[s * n + s] - 2.0 * ys + f;
            let step = if curv > 0.0 { (-dy / curv).clamp(0.0, 1.0) } else { 1.0 };
            if step == 0.0 {
                break;
            }
            for wi in w.iter_mut() {
                *wi *= 1.0 - step;
            }
            w[s] += step;
            let col = k.col(s);
            for (yi, ci) in y.iter_mut().zip(col) {
                *yi = (1.0 - step) * *yi + step * ci;
            }
        } else {
            let wa = w[a];
            let max_step = if wa < 1.0 { wa / (1.0 - wa) } else { f64::INFINITY };
            let dy = f - ya;
            let curv = f - 2.0 * ya + k.m[a * n + a];
            let step = if curv > 0.0 {
                (-dy / curv).clamp(0.0, max_step)
            } else {
                max_step
            };
            if step == 0.0 || !step.is_finite() {
                break;
            }
            for wi in w.iter_mut() {
                *wi *= 1.0 + step;
            }
            w[a] -= step;
            if step == max_step {
                w[a] = 0.0;
            }
            let col = k.col(a);
            for (yi, ci) in y.iter_mut().zip(col) {
                *yi = (1.0 + step) * *yi - step * ci;
            }
        }
        for wi in w.iter_mut() {
            if *wi < 0.0 {
                *wi = 0.0;
            }
        }
    }
    let total: f64 = w.iter().sum();
    for wi in w.iter_mut() {
        *wi /= total;
    }
    let y = k.mul(&w);
    Run {
        energy: dot(&w, &y),
        gap: gap_of(&w, &y),
        w,
        iterations,
    }
}

/// Active-set refinement: solve `K_SS v = 1` on a support `S`, normalise, and
/// adjust `S` until the KKT conditions hold.
fn polish(k: &Dense, run: &Run, tol: f64) -> Option<Run> {
    let n = k.n;
    let scale = run.w.iter().copied().fold(0.0, f64::max);
    let mut support: Vec<usize> = (0..n).filter(|&i| run.w[i] > 1e-9 * scale).collect();
    for _round in 0..(2 * n + 4) {
        let s = support.len();
        if s == 0 {
            return None;
        }
        let sub: Vec<f64> = support
            .iter()
            .flat_map(|&i| support.iter().map(move |&j| (i, j)))
            .map(|(i, j)| k.m[i * n + j])
            .collect();
        let l = cholesky(&sub, s)?;
        let v = cholesky_solve(&l, s, &vec![1.0; s]);
        let total: f64 = v.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        if let Some((pos, _)) = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x <= 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
        {
            support.remove(pos);
            continue;
        }
        let mut w = vec![0.0; n];
        for (&i, &vi) in support.iter().zip(&v) {
            w[i] = vi / total;
        }
        let y = k.mul(&w);
        let f = dot(&w, &y);
        let gap = gap_of(&w, &y);
        if gap <= tol * f.abs().max(1.0) {
            return Some(Run {
                w,
                energy: f,
                gap,
                iterations: 0,
            });
        }
        // add the most violated off-support coordinate
        let (i, _) = y
            .iter()
            .enumerate()
            .filter(|(i, _)| w[*i] == 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        if y[i] >= f {
            return Some(Run {
                w,
                energy: f,
                gap,
                iterations: 0,
            });
        }
        support.push(i);
        support.sort_unstable();
    }
    None
}

fn psd_certified(k: &Dense) -> bool {
    let scale = k.m.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    let mut shifted = k.m.clone();
    for i in 0..k.n {
        shifted[i * k.n + i] += 1e-12 * scale;
    }
    cholesky(&shifted, k.n).is_some()
}

fn dirichlet_start(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut w: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
    w
}

fn solve_dense(k: &Dense, controls: &SolverControls) -> (Run, bool) {
    let n = k.n;
    let certified = psd_certified(k);
    let best_of = |w0: Vec<f64>| {
        let run = frank_wolfe(k, w0, controls);
        match polish(k, &run, controls.gap_tolerance) {
            Some(p) if p.energy <= run.energy + 1e-12 * run.energy.abs().max(1.0) => Run {
                iterations: run.iterations,
                ..p
            },
            _ => run,
        }
    };
    let first = best_of(vec![1.0 / n as f64; n]);
    if certified || controls.restarts == 0 {
        return (first, certified);
    }
    let others: Vec<Run> = (0..controls.restarts)
        .into_par_iter()
        .map(|r| best_of(dirichlet_start(n, controls.seed, r as u64)))
        .collect();
    let mut best = first;
    for run in others {
        if run.energy < best.energy {
            best = run;
        }
    }
    (best, false)
}

/// Minimal energy of `K` over the probability simplex.
pub fn min_energy(k: &KernelMatrix<f64>, controls: &SolverControls) -> Result<EquilibriumResult> {
    controls.validate()?;
    let n = k.size();
    if n == 0 {
        return Err(Error::config("kernel", "empty kernel matrix"));
    }
    let active: Vec<usize> = (0..n).filter(|&i| k.get(i, i).is_finite()).collect();
    let excluded: Vec<usize> = (0..n).filter(|&i| !k.get(i, i).is_finite()).collect();
    if active.is_empty() {
        return Ok(EquilibriumResult {
            weights: vec![1.0 / n as f64; n],
            min_energy: f64::INFINITY,
            capacity: 0.0,
            iterations: 0,
            gap: 0.0,
            certified: true,
            excluded,
            infinite_pair_mass: 0.0,
            refinement: vec![RefinementStep {
                n,
                min_energy: f64::INFINITY,
            }],
        });
    }
    let m = active.len();
    let max_finite = active
        .iter()
        .flat_map(|&i| active.iter().map(move |&j| (i, j)))
        .map(|(i, j)| k.get(i, j))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let big = BIG_M * max_finite;
    let mut has_infinite = false;
    let mut dense = Vec::with_capacity(m * m);
    for &i in &active {
        for &j in &active {
            let v = k.get(i, j);
            if v.is_finite() {
                dense.push(v);
            } else {
                has_infinite = true;
                dense.push(big);
            }
        }
    }
    let dense = Dense { n: m, m: dense };
    let (run, mut certified) = solve_dense(&dense, controls);
    let mut weights = vec![0.0; n];
    for (&i, &wi) in active.iter().zip(&run.w) {
        weights[i] = wi;
    }
    let mut infinite_pair_mass = 0.0;
    let mut finite_energy = 0.0;
    for &i in &active {
        for &j in &active {
            let p = weights[i] * weights[j];
            let v = k.get(i, j);
            if v.is_finite() {
                finite_energy += p * v;
            } else {
                infinite_pair_mass += p;
            }
        }
    }
    if has_infinite {
        certified = false;
    }
    let min_energy = if infinite_pair_mass > INFINITE_PAIR_TOLERANCE {
        f64::INFINITY
    } else {
        finite_energy
    };
    Ok(EquilibriumResult {
        weights,
        min_energy,
        capacity: capacity_from_energy(min_energy),
        iterations: run.iterations,
        gap: run.gap,
        certified,
        excluded,
        infinite_pair_mass,
        refinement: vec![RefinementStep { n, min_energy }],
    })
}

/// Exhaustive scan of the simplex lattice `{w : w_i ∈ step·ℕ}` (test oracle).
pub fn brute_force_simplex(k: &KernelMatrix<f64>, step: f64) -> Result<(Vec<f64>, f64)> {
    let n = k.size();
    if n == 0 || n > 4 {
        return Err(Error::config("kernel", "brute force is limited to 1..=4 atoms"));
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::config("step", "must lie in (0, 1e-2]"));
    }
    let m = (1.0 / step).round() as usize;
    let mf = m as f64;
    let energy = |w: &[f64]| quadratic_form(k, w).unwrap_or(f64::INFINITY);
    let scan_first = |i0: usize| -> (Vec<f64>, f64) {
        let mut best = (Vec::new(), f64::INFINITY);
        let mut w = vec![0.0; n];
        w[0] = i0 as f64 / mf;
        let rest = m - i0;
        let mut consider = |w: &[f64]| {
            let mut s = 0.0;
            for a in 0..n {
                if w[a] == 0.0 {
                    continue;
                }
                for b in 0..n {
                    if w[b] != 0.0 {
                        s += w[a] * w[b] * k.get(a, b);
                    }
                }
            }
            if s < best.1 {
                best = (w.to_vec(), s);
            }
        };
        match n {
            1 => consider(&w),
            2 => {
                w[1] = rest as f64 / mf;
                consider(&w);
            }
            3 => {
                for i1 in 0..=rest {
                    w[1] = i1 as f64 / mf;
                    w[2] = (rest - i1) as f64 / mf;
                    consider(&w);
                }
            }
            _ => {
                for i1 in 0..=rest {
                    for i2 in 0..=(rest - i1) {
                        w[1] = i1 as f64 / mf;
                        w[2] = i2 as f64 / mf;
                        w[3] = (rest - i1 - i2) as f64 / mf;
                        consider(&w);
                    }
                }
            }
        }
        best
    };
    let starts: Vec<usize> = if n == 1 { vec![m] } else { (0..=m).collect() };
    let results: Vec<(Vec<f64>, f64)> = starts.into_par_iter().map(scan_first).collect();
    let mut best = (Vec::new(), f64::INFINITY);
    for r in results {
        if r.1 < best.1 {
            best = r;
        }
    }
    if best.0.is_empty() {
        // every lattice point has infinite energy
        let w = vec![1.0 / n as f64; n];
        let e = energy(&w);
        return Ok((w, e));
    }
    Ok(best)
}

/// Heuristic reading of a refinement trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum CapacityVerdict {
    /// Minimal energies stabilised; `capacity` is the estimate at the finest grid.
    Positive {
        #[serde(with = "crate::json::extended")]
        capacity: f64,
    },
    /// Minimal energies infinite, above the threshold, or growing.
    Zero,
    /// Neither stabilised nor clearly growing.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CapacityControls {
    pub solver: SolverControls,
    /// Relative change below which two successive grids count as stable.
    pub stabilization: f64,
    /// Growth exponent of `ln E` against `ln n` above which energies count as growing.
    pub growth_exponent: f64,
    pub energy_threshold: f64,
}

impl Default for CapacityControls {
    fn default() -> Self {
        Self {
            solver: SolverControls::default(),
            stabilization: 0.01,
            growth_exponent: 0.05,
            energy_threshold: 1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub verdict: CapacityVerdict,
    pub trace: Vec<RefinementStep>,
    /// `|E_k - E_{k-1}| / E_k` for successive grids.
    pub relative_changes: Vec<f64>,
    /// Least-squares slope of `ln E` against `ln n` (finite, positive energies only).
    pub growth_exponent: Option<f64>,
    /// Solver output on the finest grid.
    pub finest: EquilibriumResult,
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Judges a refinement trace of minimal energies.
pub fn judge_trace(trace: &[RefinementStep], controls: &CapacityControls) -> (CapacityVerdict, Vec<f64>, Option<f64>) {
    let energies: Vec<f64> = trace.iter().map(|s| s.min_energy).collect();
    let changes: Vec<f64> = energies
        .windows(2)
        .map(|w| {
            if w[1].is_finite() && w[0].is_finite() && w[1] != 0.0 {
                (w[1] - w[0]).abs() / w[1].abs()
            } else if w[0] == w[1] {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .filter(|s| s.min_energy.is_finite() && s.min_energy > 0.0)
        .map(|s| ((s.n as f64).ln(), s.min_energy.ln()))
        .collect();
    let growth = if pts.len() == trace.len() { slope(&pts) } else { None };
    let last = *energies.last().unwrap();
    let verdict = if energies.iter().any(|e| e.is_infinite()) || last > controls.energy_threshold {
        CapacityVerdict::Zero
    } else if changes.len() >= 2 && changes[changes.len() - 2..].iter().all(|&c| c < controls.stabilization) {
        CapacityVerdict::Positive {
            capacity: capacity_from_energy(last),
        }
    } else if growth.is_some_and(|g| g > controls.growth_exponent) {
        CapacityVerdict::Zero
    } else {
        CapacityVerdict::Inconclusive
    };
    (verdict, changes, growth)
}

/// Minimal energies along a refinement schedule and a zero/positive verdict.
///
/// `kernel` maps a grid measure to its kernel matrix.
pub fn capacity_estimate<F>(kernel: F, schedule: &[SetGrid], controls: &CapacityControls) -> Result<CapacityReport>
where
    F: Fn(&DiscreteMeasure<f64>) -> Result<KernelMatrix<f64>>,
{
    if schedule.len() < 3 {
        return Err(Error::config("schedule", "need at least 3 grids"));
    }
    let mut trace = Vec::with_capacity(schedule.len());
    let mut finest = None;
    for grid in schedule {
        let mu = grid.measure::<f64>()?;
        let k = kernel(&mu)?;
        let r = min_energy(&k, &controls.solver)?;
        trace.push(RefinementStep {
            n: mu.len(),
            min_energy: r.min_energy,
        });
        finest = Some(r);
    }
    let (verdict, relative_changes, growth_exponent) = judge_trace(&trace, controls);
    let mut finest = finest.unwrap();
    finest.refinement = trace.clone();
    Ok(CapacityReport {
        verdict,
        trace,
        relative_changes,
        growth_exponent,
        finest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{energy, riesz_kernel};

    fn kernel(rows: &[Vec<f64>]) -> KernelMatrix<f64> {
        KernelMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let k = kernel(&[vec![3.0, 1.0], vec![1.0, 3.0]]);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert!((r.min_energy - 2.0).abs() < 1e-12);
        assert!((r.weights[0] - 0.5).abs() < 1e-9);
        assert!((r.capacity * r.min_energy - 1.0).abs() < 1e-10);
        let (w, e) = brute_force_simplex(&k, 1e-4).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        assert!((w[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_and_infinite_kernels() {
        let k = KernelMatrix::constant(5, 2.5).unwrap();
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert!((r.min_energy - 2.5).abs() < 1e-12);
        assert!(r.gap <= 1e-8);
        let k = kernel(&[vec![f64::INFINITY, 1.0], vec![1.0, f64::INFINITY]]);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert_eq!(r.min_energy, f64::INFINITY);
        assert_eq!(r.capacity, 0.0);
        let k = kernel(&[vec![0.0]]);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert_eq!(r.min_energy, 0.0);
        assert_eq!(r.capacity, f64::INFINITY);
    }

    #[test]
    fn infinite_diagonal_coordinates_are_excluded() {
        let inf = f64::INFINITY;
        let k = kernel(&[
            vec![inf, 1.0, 1.0],
            vec![1.0, 2.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ]);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert_eq!(r.excluded, vec![0]);
        assert_eq!(r.weights[0], 0.0);
        assert!((r.min_energy - 1.5).abs() < 1e-10);
    }

    #[test]
    fn infinite_off_diagonal_pairs_are_avoided() {
        let inf = f64::INFINITY;
        let k = kernel(&[vec![1.0, inf], vec![inf, 2.0]]);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert!(r.infinite_pair_mass <= INFINITE_PAIR_TOLERANCE);
        assert!((r.min_energy - 1.0).abs() < 1e-6, "{r:?}");
        assert!(!r.certified);
    }

    #[test]
    fn brute_force_examples() {
        let id = kernel(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let (_, e) = brute_force_simplex(&id, 1e-3).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-6);
        let k = kernel(&[vec![0.0, 5.0], vec![5.0, 0.0]]);
        let (w, e) = brute_force_simplex(&k, 1e-2).unwrap();
        assert_eq!(e, 0.0);
        assert!(w == vec![1.0, 0.0] || w == vec![0.0, 1.0]);
        let big = KernelMatrix::constant(5, 1.0).unwrap();
        assert!(brute_force_simplex(&big, 1e-2).is_err());
    }

    #[test]
    fn non_psd_vertex_solution() {
        let k = kernel(&[vec![0.0, 5.0], vec![5.0, 0.0]]);
        let r = min_energy(&k, &SolverControls::default()).unwrap();
        assert!(r.min_energy.abs() < 1e-12);
        assert!(!r.certified);
    }

    #[test]
    fn scaling_and_feasibility() {
        let m = SetGrid::interval(0.0, 1.0, 64).measure::<f64>().unwrap();
        let k = riesz_kernel(0.5, m.atoms(), m.natural_policy()).unwrap();
        let c = SolverControls::default();
        let r = min_energy(&k, &c).unwrap();
        let uniform = energy(&k, &m).unwrap();
        assert!(r.min_energy <= uniform + 1e-10);
        let r3 = min_energy(&k.scaled(3.0).unwrap(), &c).unwrap();
        assert!((r3.min_energy - 3.0 * r.min_energy).abs() < 1e-8 * r3.min_energy);
        assert!(r.certified);
        assert!(r.gap <= 1e-8 * r.min_energy.max(1.0));
    }

    #[test]
    fn capacity_schedule_needs_three_grids() {
        let s = [SetGrid::interval(0.0, 1.0, 8), SetGrid::interval(0.0, 1.0, 16)];
        let r = capacity_estimate(
            |m| riesz_kernel(0.5, m.atoms(), m.natural_policy()),
            &s,
            &CapacityControls::default(),
        );
        assert!(matches!(r, Err(Error::Config { .. })));
    }

    #[test]
    fn judge_rules() {
        let c = CapacityControls::default();
        let t = |e: &[f64]| -> Vec<RefinementStep> {
            e.iter()
                .enumerate()
                .map(|(i, &v)| RefinementStep {
                    n: 64 << i,
                    min_energy: v,
                })
                .collect()
        };
        assert!(matches!(judge_trace(&t(&[2.0, 2.001, 2.0015]), &c).0, CapacityVerdict::Positive { .. }));
        assert_eq!(judge_trace(&t(&[2.0, f64::INFINITY, 3.0]), &c).0, CapacityVerdict::Zero);
        assert_eq!(judge_trace(&t(&[10.0, 12.5, 15.6]), &c).0, CapacityVerdict::Zero);
        assert_eq!(judge_trace(&t(&[10.0, 10.3, 10.2]), &c).0, CapacityVerdict::Inconclusive);
    }
}
