//! Discrete probability measures on `ℝ₊`, kernel matrices with extended-real
//! entries, and the energies `E_f(μ) = Σ_i Σ_j w_i w_j f(t_i - t_j)`.
//!
//! A measure may carry a cell width `h`: atom `t_i` then stands for the
//! uniform distribution on `[t_i - h/2, t_i + h/2]`, and cell-averaged
//! kernels replace `f(t_i - t_j)` by its average over the two cells.

mod cells;
pub(crate) mod chi;

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{g_gamma, GaugeControls, GaugeQuery, SignPart};
use crate::levy::LevyTriplet;
use crate::quadrature::{integrate, QuadTolerance};
use crate::scalar::Real;

pub use chi::{
    chi_energy, chi_energy_with, signed_chi_energies, signed_chi_energies_with, PairTable,
};
pub(crate) use chi::{chi_energy_at, signed_chi_energies_at};

/// Atoms `t_1 < … < t_n` in `ℝ₊` with positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct DiscreteMeasure<T> {
    atoms: Vec<T>,
    weights: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell_width: Option<T>,
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn new(atoms: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::config("atoms", "measure needs at least one atom"));
        }
        if atoms.len() != weights.len() {
            return Err(Error::Dimension {
                expected: atoms.len(),
                got: weights.len(),
            });
        }
        for (i, &t) in atoms.iter().enumerate() {
            if !t.is_finite() || t < T::zero() {
                return Err(Error::config(
                    format!("atoms[{i}]"),
                    "atoms must be finite and nonnegative",
                ));
            }
        }
        if let Some(i) = atoms.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::config(
                format!("atoms[{}]", i + 1),
                "atoms must be strictly increasing",
            ));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::config(format!("weights[{i}]"), "weights must be positive"));
            }
        }
        let total: T = weights.iter().copied().sum();
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(weights.len() as f64 * 4.0));
        if (total - T::one()).abs() > tol {
            return Err(Error::config(
                "weights",
                format!("weights sum to {total}, expected 1"),
            ));
        }
        Ok(Self {
            atoms,
            weights,
            cell_width: None,
        })
    }

    /// Equal weights on the given atoms.
    pub fn uniform(atoms: Vec<T>) -> Result<Self> {
        let n = atoms.len();
        let w = T::one() / T::lit(n as f64);
        Self::new(atoms, vec![w; n])
    }

    /// `δ_t`.
    pub fn dirac(t: T) -> Result<Self> {
        Self::new(vec![t], vec![T::one()])
    }

    /// Attach cells of width `h`; neighbouring atoms must be at least `h` apart
    /// and every cell must stay inside `ℝ₊`.
    pub fn with_cell_width(mut self, h: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::config("cell_width", "must be positive"));
        }
        let slack = T::one() - T::lit(1e-9);
        if self.atoms.windows(2).any(|w| w[1] - w[0] < h * slack) {
            return Err(Error::config("cell_width", "cells of neighbouring atoms overlap"));
        }
        if self.atoms[0] < h * T::lit(0.5) * slack {
            return Err(Error::config("cell_width", "first cell extends below zero"));
        }
        self.cell_width = Some(h);
        Ok(self)
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn cell_width(&self) -> Option<T> {
        self.cell_width
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `max t_i - min t_i`, widened by one cell when cells are attached.
    pub fn span(&self) -> T {
        let s = self.atoms[self.atoms.len() - 1] - self.atoms[0];
        s + self.cell_width.unwrap_or(T::zero())
    }

    /// Diagonal policy matching the measure: cell-averaged when cells are attached.
    pub fn natural_policy(&self) -> DiagonalPolicy<T> {
        match self.cell_width {
            Some(h) => DiagonalPolicy::CellAveraged(h),
            None => DiagonalPolicy::Raw,
        }
    }
}

impl<'de, T: Real> Deserialize<'de> for DiscreteMeasure<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MeasureFile::<T>::deserialize(d)?;
        file.build().map_err(serde::de::Error::custom)
    }
}

/// Generators for the sets used in the examples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetGrid {
    /// `n` cells of width `(b - a)/n` with midpoint atoms and uniform weights.
    Interval { a: f64, b: f64, n: usize },
    /// The `2^depth` intervals of the middle-thirds construction at scale
    /// `3^{-depth}`, with midpoint atoms and uniform weights.
    Cantor { depth: u32 },
}

impl SetGrid {
    pub fn interval(a: f64, b: f64, n: usize) -> Self {
        SetGrid::Interval { a, b, n }
    }

    pub fn cantor(depth: u32) -> Self {
        SetGrid::Cantor { depth }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SetGrid::Interval { a, b, n } => {
                if !(a >= 0.0 && b > a && b.is_finite()) {
                    return Err(Error::config("uniform", "need 0 ≤ a < b"));
                }
                if n == 0 {
                    return Err(Error::config("uniform.n", "need at least one cell"));
                }
            }
            SetGrid::Cantor { depth } => {
                if depth > 24 {
                    return Err(Error::config("cantor.depth", "depth above 24 is not supported"));
                }
            }
        }
        Ok(())
    }

    pub fn cell_width(&self) -> f64 {
        match *self {
            SetGrid::Interval { a, b, n } => (b - a) / n as f64,
            SetGrid::Cantor { depth } => 3f64.powi(-(depth as i32)),
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            SetGrid::Interval { n, .. } => n,
            SetGrid::Cantor { depth } => 1 << depth,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell midpoints.
    pub fn atoms(&self) -> Vec<f64> {
        match *self {
            SetGrid::Interval { a, b, n } => {
                let h = (b - a) / n as f64;
                (0..n).map(|i| a + (i as f64 + 0.5) * h).collect()
            }
            SetGrid::Cantor { depth } => {
                let mut left = vec![0.0f64];
                let mut scale = 1.0;
                for _ in 0..depth {
                    scale /= 3.0;
                    left = left.iter().flat_map(|&l| [l, l + 2.0 * scale]).collect();
                }
                left.into_iter().map(|l| l + 0.5 * scale).collect()
            }
        }
    }

    /// Uniform measure on the cells, with the cell width attached.
    pub fn measure<T: Real>(&self) -> Result<DiscreteMeasure<T>> {
        self.validate()?;
        let atoms = self.atoms().into_iter().map(T::lit).collect();
        DiscreteMeasure::uniform(atoms)?.with_cell_width(T::lit(self.cell_width()))
    }

    /// The same generator with twice the resolution.
    pub fn refined(&self) -> Self {
        match *self {
            SetGrid::Interval { a, b, n } => SetGrid::Interval { a, b, n: 2 * n },
            SetGrid::Cantor { depth } => SetGrid::Cantor { depth: depth + 1 },
        }
    }
}

/// JSON layouts accepted for measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Real")]
pub enum MeasureFile<T> {
    Atoms {
        atoms: Vec<T>,
        weights: Vec<T>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cell_width: Option<T>,
    },
    Uniform {
        uniform: UniformSpec,
    },
    Cantor {
        cantor: CantorSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub depth: u32,
}

impl<T: Real> MeasureFile<T> {
    pub fn build(self) -> Result<DiscreteMeasure<T>> {
        match self {
            MeasureFile::Atoms {
                atoms,
                weights,
                cell_width,
            } => {
                let m = DiscreteMeasure::new(atoms, weights)?;
                match cell_width {
                    Some(h) => m.with_cell_width(h),
                    None => Ok(m),
                }
            }
            MeasureFile::Uniform { uniform: u } => SetGrid::interval(u.a, u.b, u.n).measure(),
            MeasureFile::Cantor { cantor } => SetGrid::cantor(cantor.depth).measure(),
        }
    }

    /// Parses a measure document, naming the offending field on failure.
    pub fn parse(text: &str) -> Result<DiscreteMeasure<T>> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::config("measure", format!("line {}: {e}", e.line())))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::config("measure", "expected a JSON object"))?;
        let kind = if obj.contains_key("uniform") {
            "uniform"
        } else if obj.contains_key("cantor") {
            "cantor"
        } else if obj.contains_key("atoms") {
            "atoms"
        } else {
            return Err(Error::config(
                "measure",
                "expected one of \"atoms\"/\"weights\", \"uniform\" or \"cantor\"",
            ));
        };
        let allowed: &[&str] = match kind {
            "atoms" => &["atoms", "weights", "cell_width"],
            k => std::slice::from_ref(match k {
                "uniform" => &"uniform",
                _ => &"cantor",
            }),
        };
        if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::config(k.clone(), "unexpected field"));
        }
        let file: MeasureFile<T> = match kind {
            "uniform" => MeasureFile::Uniform {
                uniform: serde_json::from_value(obj["uniform"].clone())
                    .map_err(|e| Error::config("uniform", e.to_string()))?,
            },
            "cantor" => MeasureFile::Cantor {
                cantor: serde_json::from_value(obj["cantor"].clone())
                    .map_err(|e| Error::config("cantor", e.to_string()))?,
            },
            _ => {
                let field = |name: &str| -> Result<Vec<T>> {
                    let v = obj
                        .get(name)
                        .ok_or_else(|| Error::config(name, "missing field"))?;
                    serde_json::from_value(v.clone()).map_err(|e| Error::config(name, e.to_string()))
                };
                let cell_width = match obj.get("cell_width") {
                    Some(v) => Some(
                        serde_json::from_value(v.clone())
                            .map_err(|e| Error::config("cell_width", e.to_string()))?,
                    ),
                    None => None,
                };
                MeasureFile::Atoms {
                    atoms: field("atoms")?,
                    weights: field("weights")?,
                    cell_width,
                }
            }
        };
        file.build()
    }
}

impl<T: Real> From<&DiscreteMeasure<T>> for MeasureFile<T> {
    fn from(m: &DiscreteMeasure<T>) -> Self {
        MeasureFile::Atoms {
            atoms: m.atoms.clone(),
            weights: m.weights.clone(),
            cell_width: m.cell_width,
        }
    }
}

/// How `f(0)` on the diagonal (and, for cells, every entry) is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "h", rename_all = "kebab-case")]
pub enum DiagonalPolicy<T> {
    /// Point evaluation; the diagonal is the raw value `f(0)`, possibly `+∞`.
    Raw,
    /// Average of `f(t - s)` over `t, s` in cells of width `h` around the atoms.
    CellAveraged(T),
}

/// Symmetric `n × n` matrix of kernel values in `[0, +∞]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<T> {
    n: usize,
    entries: Vec<T>,
    policy: DiagonalPolicy<T>,
}

impl<T: Real> KernelMatrix<T> {
    /// Checks symmetry (to a relative `1e-12`) and nonnegativity.
    pub fn new(n: usize, entries: Vec<T>, policy: DiagonalPolicy<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: entries.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if v.is_nan() || v < T::zero() {
                    return Err(Error::Domain(format!(
                        "kernel entry ({i},{j}) = {v} is not in [0, ∞]"
                    )));
                }
                let u = entries[j * n + i];
                let asym = if v.is_infinite() || u.is_infinite() {
                    v != u
                } else {
                    (v - u).abs() > T::lit(1e-12) * v.abs().max(u.abs()).max(T::one())
                };
                if j > i && asym {
                    return Err(Error::Domain(format!(
                        "kernel is not symmetric at ({i},{j}): {v} vs {u}"
                    )));
                }
            }
        }
        Ok(Self { n, entries, policy })
    }

    pub fn from_fn<F: Fn(usize, usize) -> T>(n: usize, policy: DiagonalPolicy<T>, f: F) -> Result<Self> {
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self::new(n, entries, policy)
    }

    pub fn constant(n: usize, c: T) -> Result<Self> {
        Self::new(n, vec![c; n * n], DiagonalPolicy::Raw)
    }

    /// Row-major nested rows, as in `[[a, b], [b, a]]`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: r.len(),
            });
        }
        Self::new(n, rows.concat(), DiagonalPolicy::Raw)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn policy(&self) -> DiagonalPolicy<T> {
        self.policy
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    /// `c K`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(
            self.n,
            self.entries.iter().map(|&v| v * c).collect(),
            self.policy,
        )
    }
}

/// `Σ_i Σ_j w_i w_j K_ij`; `+∞` exactly when an infinite entry meets positive
/// weights (weights are positive by construction).
pub fn energy<T: Real>(k: &KernelMatrix<T>, mu: &DiscreteMeasure<T>) -> Result<T> {
    quadratic_form(k, mu.weights())
}

/// `wᵀ K w` for an arbitrary nonnegative weight vector; zero weights never
/// meet infinite entries.
pub fn quadratic_form<T: Real>(k: &KernelMatrix<T>, w: &[T]) -> Result<T> {
    let n = k.size();
    if w.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: w.len(),
        });
    }
    let rows: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| {
            if w[i] == T::zero() {
                return T::zero();
            }
            let mut s = T::zero();
            for j in 0..n {
                if w[j] != T::zero() {
                    s += w[j] * k.entries[i * n + j];
                }
            }
            w[i] * s
        })
        .collect();
    Ok(rows.into_iter().sum())
}

/// Second primitive of `|u|^{-β}`: `G(u) = |u|^{2-β} / ((1-β)(2-β))`.
fn riesz_second_primitive(u: f64, beta: f64) -> f64 {
    u.abs().powf(2.0 - beta) / ((1.0 - beta) * (2.0 - beta))
}

/// Average of `|t - s|^{-β}` over two cells of width `h` whose centres are
/// `dist` apart (`dist = 0` or `dist ≥ h`).
pub fn riesz_cell_average(dist: f64, h: f64, beta: f64) -> f64 {
    let dist = dist.abs();
    if dist == 0.0 {
        return h.powf(-beta) * 2.0 / ((1.0 - beta) * (2.0 - beta));
    }
    let rho = h / dist;
    if rho < 1.0 / 64.0 {
        // second central difference expanded in (h/D)²
        let r2 = rho * rho;
        let c1 = beta * (beta + 1.0) / 12.0;
        let c2 = beta * (beta + 1.0) * (beta + 2.0) * (beta + 3.0) / 360.0;
        let c3 = c2 * (beta + 4.0) * (beta + 5.0) / 56.0;
        return dist.powf(-beta) * (1.0 + r2 * (c1 + r2 * (c2 + r2 * c3)));
    }
    (riesz_second_primitive(dist + h, beta) - 2.0 * riesz_second_primitive(dist, beta)
        + riesz_second_primitive(dist - h, beta))
        / (h * h)
}

/// Riesz kernel `|t_i - t_j|^{-β}` on a list of distinct atoms in `ℝ₊`.
///
/// Raw policy: point values off the diagonal and `+∞` on it. Cell-averaged
/// policy: every entry is the exact average over the two cells, which needs
/// `β < 1` in dimension one.
pub fn riesz_kernel<T: Real>(beta: T, atoms: &[T], policy: DiagonalPolicy<T>) -> Result<KernelMatrix<T>> {
    let b = beta.as_f64();
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("β = {b} must be positive and finite")));
    }
    if matches!(policy, DiagonalPolicy::CellAveraged(_)) && b >= 1.0 {
        return Err(Error::Unsupported(format!(
            "cell-averaged Riesz kernel needs β < 1 in dimension one (β = {b})"
        )));
    }
    if atoms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("atoms must be strictly increasing".into()));
    }
    let n = atoms.len();
    let t: Vec<f64> = atoms.iter().map(|a| a.as_f64()).collect();
    let entry = |i: usize, j: usize| -> f64 {
        match policy {
            DiagonalPolicy::Raw => {
                if i == j {
                    f64::INFINITY
                } else {
                    (t[i] - t[j]).abs().powf(-b)
                }
            }
            DiagonalPolicy::CellAveraged(h) => {
                let d = if i == j { 0.0 } else { (t[i] - t[j]).abs() };
                riesz_cell_average(d, h.as_f64(), b)
            }
        }
    };
    let mut entries = vec![T::zero(); n * n];
    entries
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            for (j, e) in row.iter_mut().enumerate() {
                *e = T::lit(entry(i.min(j), i.max(j)));
            }
        });
    let k = KernelMatrix::new(n, entries, policy)?;
    if let Some(i) = (0..n).find(|&i| !k.get(i, i).is_finite() && policy != DiagonalPolicy::Raw) {
        return Err(Error::Invariant(format!(
            "cell-averaged Riesz kernel has infinite diagonal entry {i}"
        )));
    }
    Ok(k)
}

/// Gauge kernel `K_ij = g_{γ,sign}(t_i - t_j)` with divergent values recorded
/// as `+∞`.
///
/// Under the cell-averaged policy each entry is the average of `g` over the
/// two cells, computed by adaptive quadrature in the time difference; an entry
/// is `+∞` as soon as one quadrature node is divergent.
pub fn gauge_kernel(
    spec: &LevyTriplet<f64>,
    gamma: f64,
    sign: SignPart,
    atoms: &[f64],
    policy: DiagonalPolicy<f64>,
    controls: &GaugeControls,
) -> Result<KernelMatrix<f64>> {
    if atoms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("atoms must be strictly increasing".into()));
    }
    let n = atoms.len();
    let mut dists: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in i..n {
            dists.push((atoms[j] - atoms[i]).abs());
        }
    }
    dists.sort_by(f64::total_cmp);
    dists.dedup();
    let mut controls = controls.clone();
    if matches!(policy, DiagonalPolicy::CellAveraged(_)) {
        // cell averages sample g at time differences far below the cell width,
        // where integrable singularities make g large but finite
        controls.r_max = controls.r_max.max(CELL_R_MAX);
        controls.threshold = controls.threshold.max(CELL_THRESHOLD);
    }
    let evaluator = GaugeEvaluator::new(spec, gamma, sign, &controls)?;
    let values: Vec<f64> = match policy {
        DiagonalPolicy::Raw => dists
            .par_iter()
            .map(|&d| evaluator.at(d))
            .collect::<Result<_>>()?,
        DiagonalPolicy::CellAveraged(h) => {
            if !(h > 0.0) {
                return Err(Error::config("cell_width", "must be positive"));
            }
            dists
                .par_iter()
                .map(|&d| evaluator.cell_average(d, h))
                .collect::<Result<_>>()?
        }
    };
    let lookup: HashMap<u64, f64> = dists.iter().map(|d| d.to_bits()).zip(values).collect();
    KernelMatrix::from_fn(n, policy, |i, j| lookup[&(atoms[j] - atoms[i]).abs().to_bits()])
}

/// Outer radius used when `g` is averaged over cells.
pub const CELL_R_MAX: f64 = 1099511627776.0;

/// Divergence threshold used when `g` is averaged over cells.
pub const CELL_THRESHOLD: f64 = 1e12;

/// Memoised `u ↦ g_{γ,sign}(u)` as an extended real.
pub(crate) struct GaugeEvaluator<'a> {
    spec: &'a LevyTriplet<f64>,
    gamma: f64,
    sign: SignPart,
    controls: GaugeControls,
    cache: std::sync::Mutex<HashMap<u64, f64>>,
}

impl<'a> GaugeEvaluator<'a> {
    pub fn new(
        spec: &'a LevyTriplet<f64>,
        gamma: f64,
        sign: SignPart,
        controls: &GaugeControls,
    ) -> Result<Self> {
        // surface parameter and symmetry errors once, up front
        g_gamma(&GaugeQuery::new(spec, gamma, 1.0, sign).with_controls(controls.clone()))?;
        Ok(Self {
            spec,
            gamma,
            sign,
            controls: controls.clone(),
            cache: Default::default(),
        })
    }

    pub fn at(&self, u: f64) -> Result<f64> {
        let key = u.abs().to_bits();
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let q = GaugeQuery::new(self.spec, self.gamma, u.abs(), self.sign)
            .with_controls(self.controls.clone());
        let v = g_gamma(&q)?.extended();
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Average of `g` over two cells of width `h` with centres `dist` apart:
    /// `∫ g(u) (h - |u - D|)/h² du` over `u ∈ [D - h, D + h]`, folded to `u ≥ 0`.
    pub fn cell_average(&self, dist: f64, h: f64) -> Result<f64> {
        let tol = QuadTolerance {
            abs: 0.0,
            // g itself is only accurate to the panel tolerance
            rel: self.controls.rel_tol.max(1e-10),
            max_subdivisions: 100,
        };
        let failed = std::sync::Mutex::new(None);
        let g = |u: f64| -> f64 {
            match self.at(u) {
                Ok(v) => v,
                Err(e) => {
                    failed.lock().unwrap().get_or_insert(e);
                    f64::NAN
                }
            }
        };
        // substitution u = a + (b - a) s⁴ absorbs the integrable singularity at u = 0
        let near_zero = |a: f64, b: f64, weight: &dyn Fn(f64) -> f64| -> f64 {
            let w = b - a;
            integrate(
                |s: f64| {
                    let u = a + w * s.powi(4);
                    weight(u) * g(u) * 4.0 * w * s.powi(3)
                },
                0.0,
                1.0,
                tol,
            )
            .value
        };
        if self.at(dist.max(0.5 * h))?.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let value = if dist < 0.5 * h {
            near_zero(0.0, h, &|u| 2.0 * (h - u) / (h * h))
        } else {
            let lo = (dist - h).max(0.0);
            let left = &|u: f64| (u - (dist - h)) / (h * h);
            let right = &|u: f64| (dist + h - u) / (h * h);
            let l = if lo == 0.0 {
                near_zero(0.0, dist, left)
            } else {
                integrate(|u| left(u) * g(u), lo, dist, tol).value
            };
            let r = integrate(|u| right(u) * g(u), dist, dist + h, tol).value;
            l + r
        };
        if let Some(e) = failed.into_inner().unwrap() {
            return Err(e);
        }
        Ok(if value.is_nan() { f64::INFINITY } else { value })
    }
}

/// True when `|u| Im Ψ` stays inside `(-π/2, π/2)` for all time differences up
/// to `span`, so `(Re χ_ξ(u))_-` vanishes for every `ξ`.
pub(crate) fn minus_part_vanishes(spec: &LevyTriplet<f64>, span: f64) -> bool {
    let b = crate::gauge::ExponentBounds::of(spec);
    b.symmetric || (b.im_linear == 0.0 && span * b.jump_mass < FRAC_PI_2)
}

#[cfg(test)]
mod tests;
