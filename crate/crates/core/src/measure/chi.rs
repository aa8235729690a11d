//! `χ_ξ`-energies `E_{χ_ξ}(μ) = Σ_i Σ_j w_i w_j Re χ_ξ(t_i - t_j)` and their
//! positive/negative parts.

use num_complex::Complex;

use super::cells::{cell_pair_parts, cell_pair_signed};
use super::{DiagonalPolicy, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::levy::{re_chi_from_exponent, ExponentValue, LevyTriplet};
use crate::scalar::{neg, pos, Real};

/// Distinct time differences of a measure with aggregated weights:
/// `Σ_{i,j} w_i w_j F(|t_i - t_j|) = diag·F(0) + Σ_k W_k F(D_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTable<T> {
    pub diag: T,
    pub pairs: Vec<(T, T)>,
}

impl<T: Real> PairTable<T> {
    /// Differences closer than `1e-12` relative are merged.
    pub fn new(mu: &DiscreteMeasure<T>) -> Self {
        let t = mu.atoms();
        let w = mu.weights();
        let diag = w.iter().map(|&v| v * v).sum();
        let mut raw: Vec<(T, T)> = Vec::with_capacity(t.len() * (t.len().saturating_sub(1)) / 2);
        for i in 0..t.len() {
            for j in (i + 1)..t.len() {
                raw.push((t[j] - t[i], T::lit(2.0) * w[i] * w[j]));
            }
        }
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut pairs: Vec<(T, T)> = Vec::new();
        let tol = T::lit(1e-12);
        for (d, wt) in raw {
            match pairs.last_mut() {
                Some(last) if d - last.0 <= tol * d => last.1 += wt,
                _ => pairs.push((d, wt)),
            }
        }
        Self { diag, pairs }
    }

    pub fn total_weight(&self) -> T {
        self.diag + self.pairs.iter().map(|p| p.1).sum::<T>()
    }
}

fn check_xi<T: Real>(spec: &LevyTriplet<T>, xi: &[T]) -> Result<ExponentValue<T>> {
    spec.exponent(xi)
}

/// Atomic energy at a precomputed exponent value.
pub(crate) fn chi_energy_at<T: Real>(psi: ExponentValue<T>, pairs: &PairTable<T>) -> T {
    let mut s = pairs.diag;
    for &(d, w) in &pairs.pairs {
        s += w * re_chi_from_exponent(psi, d);
    }
    s
}

/// Atomic `(plus, minus)` at a precomputed exponent value.
pub(crate) fn signed_chi_energies_at<T: Real>(psi: ExponentValue<T>, pairs: &PairTable<T>) -> (T, T) {
    let mut p = pairs.diag;
    let mut m = T::zero();
    for &(d, w) in &pairs.pairs {
        let r = re_chi_from_exponent(psi, d);
        p += w * pos(r);
        m += w * neg(r);
    }
    (p, m)
}

/// `E_{χ_ξ}(μ)` with `μ` read as point masses.
pub fn chi_energy<T: Real>(spec: &LevyTriplet<T>, xi: &[T], mu: &DiscreteMeasure<T>) -> Result<T> {
    let psi = check_xi(spec, xi)?;
    Ok(chi_energy_at(psi, &PairTable::new(mu)))
}

/// `(E_{(Re χ_ξ)+}(μ), E_{(Re χ_ξ)-}(μ))` with `μ` read as point masses.
pub fn signed_chi_energies<T: Real>(
    spec: &LevyTriplet<T>,
    xi: &[T],
    mu: &DiscreteMeasure<T>,
) -> Result<(T, T)> {
    let psi = check_xi(spec, xi)?;
    Ok(signed_chi_energies_at(psi, &PairTable::new(mu)))
}

/// Energy under a diagonal policy: point masses for `Raw`, cell averages of
/// `Re χ_ξ` for `CellAveraged(h)`.
pub fn chi_energy_with(
    spec: &LevyTriplet<f64>,
    xi: &[f64],
    mu: &DiscreteMeasure<f64>,
    policy: DiagonalPolicy<f64>,
) -> Result<f64> {
    let psi = check_xi(spec, xi)?;
    let table = PairTable::new(mu);
    match policy {
        DiagonalPolicy::Raw => Ok(chi_energy_at(psi, &table)),
        DiagonalPolicy::CellAveraged(h) => {
            check_cells(mu, h)?;
            Ok(cell_chi_energy_at(psi, &table, h))
        }
    }
}

/// Signed parts under a diagonal policy.
pub fn signed_chi_energies_with(
    spec: &LevyTriplet<f64>,
    xi: &[f64],
    mu: &DiscreteMeasure<f64>,
    policy: DiagonalPolicy<f64>,
) -> Result<(f64, f64)> {
    let psi = check_xi(spec, xi)?;
    let table = PairTable::new(mu);
    match policy {
        DiagonalPolicy::Raw => Ok(signed_chi_energies_at(psi, &table)),
        DiagonalPolicy::CellAveraged(h) => {
            check_cells(mu, h)?;
            Ok(cell_signed_chi_energies_at(psi, &table, h))
        }
    }
}

fn check_cells(mu: &DiscreteMeasure<f64>, h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::config("cell_width", "must be positive"));
    }
    let slack = 1.0 - 1e-9;
    if mu.atoms().windows(2).any(|w| w[1] - w[0] < h * slack) {
        return Err(Error::config("cell_width", "cells of neighbouring atoms overlap"));
    }
    Ok(())
}

pub(crate) fn cell_chi_energy_at(psi: ExponentValue<f64>, pairs: &PairTable<f64>, h: f64) -> f64 {
    let z = Complex::new(psi.re, psi.im.abs());
    let mut s = pairs.diag * cell_pair_signed(z, 0.0, h);
    for &(d, w) in &pairs.pairs {
        s += w * cell_pair_signed(z, d, h);
    }
    s
}

pub(crate) fn cell_signed_chi_energies_at(
    psi: ExponentValue<f64>,
    pairs: &PairTable<f64>,
    h: f64,
) -> (f64, f64) {
    let (a, omega) = (psi.re, psi.im.abs());
    let (dp, dm) = cell_pair_parts(a, omega, 0.0, h);
    let mut p = pairs.diag * dp;
    let mut m = pairs.diag * dm;
    for &(d, w) in &pairs.pairs {
        let (pp, pm) = cell_pair_parts(a, omega, d, h);
        p += w * pp;
        m += w * pm;
    }
    (p, m)
}
