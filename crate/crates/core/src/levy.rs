//! Lévy triplets, the Lévy–Khinchine exponent and the time-difference kernel
//! `χ_ξ(x) = exp(-|x| Ψ(sign(x) ξ))`.
//!
//! The jump measure is a finite sum of atoms `Σ λ_k δ_{y_k}`, optionally
//! augmented by an isotropic symmetric stable part contributing `c‖ξ‖^α`.
//! The small-jump compensator uses the cut-off `1{‖y‖ ≤ 1}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::scalar::{neg, pos, Real};

/// One atom `λ δ_y` of the jump measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct JumpAtom<T> {
    pub y: Vec<T>,
    pub lambda: T,
}

/// Isotropic symmetric stable component with exponent contribution `c‖ξ‖^α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StablePart<T> {
    pub alpha: T,
    pub c: T,
}

/// Value of `Ψ(ξ)`: real part is nonnegative and even, imaginary part odd.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ExponentValue<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> ExponentValue<T> {
    pub fn as_complex(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }
}

/// On-disk layout: `{"d":1,"b":[..],"A":[[..]],"jumps":[{"y":[..],"lambda":..}],"stable":{"alpha":..,"c":..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
struct TripletFile<T> {
    d: usize,
    b: Vec<T>,
    #[serde(rename = "A")]
    a: Vec<Vec<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    jumps: Vec<JumpAtom<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stable: Option<StablePart<T>>,
}

/// Drift `b`, diffusion `A`, finite atomic jump measure and optional stable part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    bound = "T: Real",
    try_from = "TripletFile<T>",
    into = "TripletFile<T>"
)]
pub struct LevyTriplet<T> {
    dim: usize,
    drift: Vec<T>,
    /// Row-major `dim × dim`.
    diffusion: Vec<T>,
    jumps: Vec<JumpAtom<T>>,
    stable: Option<StablePart<T>>,
}

impl<T: Real> TryFrom<TripletFile<T>> for LevyTriplet<T> {
    type Error = Error;

    fn try_from(f: TripletFile<T>) -> Result<Self> {
        if f.a.len() != f.d || f.a.iter().any(|row| row.len() != f.d) {
            return Err(Error::config("A", format!("expected a {0}×{0} matrix", f.d)));
        }
        let diffusion = f.a.into_iter().flatten().collect();
        LevyTriplet::new(f.d, f.b, diffusion, f.jumps, f.stable)
    }
}

impl<T: Real> From<LevyTriplet<T>> for TripletFile<T> {
    fn from(t: LevyTriplet<T>) -> Self {
        let d = t.dim;
        TripletFile {
            d,
            b: t.drift,
            a: t.diffusion.chunks(d).map(|r| r.to_vec()).collect(),
            jumps: t.jumps,
            stable: t.stable,
        }
    }
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

impl<T: Real> LevyTriplet<T> {
    /// Validates and builds a triplet. `diffusion` is row-major `dim × dim`.
    pub fn new(
        dim: usize,
        drift: Vec<T>,
        diffusion: Vec<T>,
        jumps: Vec<JumpAtom<T>>,
        stable: Option<StablePart<T>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("d", "dimension must be positive"));
        }
        if drift.len() != dim {
            return Err(Error::config("b", format!("expected length {dim}, got {}", drift.len())));
        }
        if drift.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("b", "drift must be finite"));
        }
        if diffusion.len() != dim * dim {
            return Err(Error::config("A", format!("expected {} entries", dim * dim)));
        }
        if diffusion.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("A", "diffusion entries must be finite"));
        }
        let tol = T::default_tol();
        let scale = diffusion.iter().fold(T::one(), |m, v| m.max(v.abs()));
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (diffusion[i * dim + j] - diffusion[j * dim + i]).abs() > tol * scale {
                    return Err(Error::config("A", format!("not symmetric at ({i},{j})")));
                }
            }
        }
        let min_ev = symmetric_eigenvalues(&diffusion, dim)
            .into_iter()
            .fold(T::infinity(), T::min);
        if min_ev < -tol * scale {
            return Err(Error::config(
                "A",
                format!("not positive semidefinite (eigenvalue {min_ev:e})"),
            ));
        }
        for (k, atom) in jumps.iter().enumerate() {
            if atom.y.len() != dim {
                return Err(Error::config(
                    format!("jumps[{k}].y"),
                    format!("expected length {dim}"),
                ));
            }
            if atom.y.iter().any(|v| !v.is_finite()) || norm(&atom.y) == T::zero() {
                return Err(Error::config(
                    format!("jumps[{k}].y"),
                    "jump location must be finite and nonzero",
                ));
            }
            if !(atom.lambda > T::zero()) || !atom.lambda.is_finite() {
                return Err(Error::config(
                    format!("jumps[{k}].lambda"),
                    "jump mass must be positive and finite",
                ));
            }
        }
        if let Some(s) = stable {
            if !(s.alpha > T::zero() && s.alpha < T::lit(2.0)) {
                return Err(Error::config("stable.alpha", "index must lie in (0, 2)"));
            }
            if !(s.c > T::zero()) || !s.c.is_finite() {
                return Err(Error::config("stable.c", "intensity must be positive"));
            }
        }
        Ok(Self {
            dim,
            drift,
            diffusion,
            jumps,
            stable,
        })
    }

    /// Parses a spec document; errors carry the line and the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("spec", e.to_string()))
    }

    /// Standard one-dimensional Brownian motion, `Ψ(ξ) = ξ²/2`.
    pub fn brownian() -> Self {
        Self::new(1, vec![T::zero()], vec![T::one()], vec![], None).unwrap()
    }

    /// `X(t) = b t` in one dimension, `Ψ(ξ) = -i b ξ`.
    pub fn drift(b: T) -> Self {
        Self::new(1, vec![b], vec![T::zero()], vec![], None).unwrap()
    }

    /// Rate-one Poisson process written with triplet `(1, 0, δ_1)`, so that
    /// `Ψ(ξ) = (1 - cos ξ) - i sin ξ`.
    pub fn poisson() -> Self {
        let atom = JumpAtom {
            y: vec![T::one()],
            lambda: T::one(),
        };
        Self::new(1, vec![T::one()], vec![T::zero()], vec![atom], None).unwrap()
    }

    /// Jumps of size ±1, each with mass ½; `Ψ(ξ) = 1 - cos ξ`.
    pub fn symmetric_compound_poisson() -> Self {
        let half = T::lit(0.5);
        let jumps = vec![
            JumpAtom {
                y: vec![T::one()],
                lambda: half,
            },
            JumpAtom {
                y: vec![-T::one()],
                lambda: half,
            },
        ];
        Self::new(1, vec![T::zero()], vec![T::zero()], jumps, None).unwrap()
    }

    /// One-dimensional symmetric stable process with `Ψ(ξ) = c|ξ|^α`.
    pub fn symmetric_stable(alpha: T, c: T) -> Result<Self> {
        Self::new(
            1,
            vec![T::zero()],
            vec![T::zero()],
            vec![],
            Some(StablePart { alpha, c }),
        )
    }

    /// `d`-dimensional Brownian motion with covariance `σ² I`.
    pub fn isotropic_brownian(dim: usize, sigma2: T) -> Result<Self> {
        let mut a = vec![T::zero(); dim * dim];
        for i in 0..dim {
            a[i * dim + i] = sigma2;
        }
        Self::new(dim, vec![T::zero(); dim], a, vec![], None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift_vector(&self) -> &[T] {
        &self.drift
    }

    pub fn diffusion(&self) -> &[T] {
        &self.diffusion
    }

    pub fn jumps(&self) -> &[JumpAtom<T>] {
        &self.jumps
    }

    pub fn stable(&self) -> Option<StablePart<T>> {
        self.stable
    }

    /// `Ψ(ξ)`, rejecting a `ξ` of the wrong length or with non-finite entries.
    pub fn exponent(&self, xi: &[T]) -> Result<ExponentValue<T>> {
        if xi.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: xi.len(),
            });
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("ξ must be finite".into()));
        }
        Ok(self.exponent_unchecked(xi))
    }

    pub(crate) fn exponent_unchecked(&self, xi: &[T]) -> ExponentValue<T> {
        let d = self.dim;
        let half = T::lit(0.5);
        let mut re = T::zero();
        for i in 0..d {
            for j in 0..d {
                re += self.diffusion[i * d + j] * xi[i] * xi[j];
            }
        }
        re *= half;
        let mut im = -dot(&self.drift, xi);
        for atom in &self.jumps {
            let theta = dot(&atom.y, xi);
            // 1 - cos θ = 2 sin²(θ/2) keeps small arguments accurate
            let s = (theta * half).sin();
            re += atom.lambda * T::lit(2.0) * s * s;
            let mut im_term = theta.sin();
            if norm(&atom.y) <= T::one() {
                im_term -= theta;
            }
            im -= atom.lambda * im_term;
        }
        if let Some(st) = self.stable {
            let r = norm(xi);
            if r > T::zero() {
                re += st.c * r.powf(st.alpha);
            }
        }
        ExponentValue { re, im }
    }

    /// `χ_ξ(x) = exp(-|x| Ψ(sign(x) ξ))` with `sign(0) = +1`; `χ_ξ(0) = 1` exactly.
    pub fn chi(&self, xi: &[T], x: T) -> Result<Complex<T>> {
        let psi = self.exponent(xi)?;
        Ok(chi_from_exponent(psi, x))
    }

    /// `((Re χ_ξ(x))_+, (Re χ_ξ(x))_-)`.
    pub fn re_chi_parts(&self, xi: &[T], x: T) -> Result<(T, T)> {
        let psi = self.exponent(xi)?;
        let r = re_chi_from_exponent(psi, x);
        Ok((pos(r), neg(r)))
    }

    /// Searches a fixed set of frequencies for a nonzero imaginary part of `Ψ`.
    /// Returns the first witness `(ξ, Im Ψ(ξ))`, or `None` if every sample has
    /// `|Im Ψ(ξ)| ≤ 1e-12 (1 + ‖ξ‖)`.
    pub fn asymmetry_witness(&self) -> Option<(Vec<T>, T)> {
        let d = self.dim;
        let mut directions: Vec<Vec<T>> = (0..d)
            .map(|i| {
                let mut e = vec![T::zero(); d];
                e[i] = T::one();
                e
            })
            .collect();
        if d > 1 {
            let s = T::one() / T::from_usize(d).unwrap().sqrt();
            directions.push(vec![s; d]);
        }
        let tol = T::lit(1e-12).max(T::default_tol());
        for dir in &directions {
            for k in 0..48 {
                // geometric sweep from 1e-3 to ~1e4 with irrational-ish spacing
                let r = T::lit(1e-3 * 1.4142_f64.powf(k as f64 * 0.98));
                let xi: Vec<T> = dir.iter().map(|&v| v * r).collect();
                let im = self.exponent_unchecked(&xi).im;
                if im.abs() > tol * (T::one() + r) {
                    return Some((xi, im));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry_witness().is_none()
    }

    /// `-b + Σ_{‖y‖≤1} λ y`: the coefficient of the linear part of `Im Ψ`.
    pub fn im_linear_coefficient(&self) -> Vec<T> {
        let mut c: Vec<T> = self.drift.iter().map(|&v| -v).collect();
        for atom in &self.jumps {
            if norm(&atom.y) <= T::one() {
                for (ci, &yi) in c.iter_mut().zip(&atom.y) {
                    *ci += atom.lambda * yi;
                }
            }
        }
        c
    }

    /// Total jump mass `Σ λ_k`.
    pub fn jump_mass(&self) -> T {
        self.jumps.iter().map(|a| a.lambda).sum()
    }

    /// `Σ λ_k ‖y_k‖`, a Lipschitz bound for the oscillatory parts of `Ψ`.
    pub fn jump_moment(&self) -> T {
        self.jumps.iter().map(|a| a.lambda * norm(&a.y)).sum()
    }

    /// Lipschitz constant bound for `ξ ↦ Im Ψ(ξ)`.
    pub fn im_lipschitz(&self) -> T {
        norm(&self.im_linear_coefficient()) + self.jump_moment()
    }

    /// Upper bound for `|Im Ψ(ξ)|` over `‖ξ‖ ≤ r`.
    pub fn im_abs_bound(&self, r: T) -> T {
        if self.is_symmetric() {
            return T::zero();
        }
        norm(&self.im_linear_coefficient()) * r + self.jump_mass()
    }

    /// True when `Re Ψ` is bounded: no Gaussian and no stable component.
    pub fn has_bounded_real_part(&self) -> bool {
        self.stable.is_none() && self.diffusion.iter().all(|&v| v == T::zero())
    }

    /// Rotation-invariant exponent: always in `d = 1`; in higher dimension only
    /// for `b = 0`, no jump atoms and `A = σ² I`.
    pub fn is_isotropic(&self) -> bool {
        if self.dim == 1 {
            return true;
        }
        let d = self.dim;
        let s = self.diffusion[0];
        let diag_ok = (0..d).all(|i| {
            (0..d).all(|j| {
                let v = self.diffusion[i * d + j];
                if i == j {
                    v == s
                } else {
                    v == T::zero()
                }
            })
        });
        self.drift.iter().all(|&v| v == T::zero()) && self.jumps.is_empty() && diag_ok
    }

    /// `Ψ(r e_1)`; equals `Ψ(ξ)` for any `‖ξ‖ = r` when the triplet is isotropic.
    pub(crate) fn radial_exponent(&self, r: T) -> ExponentValue<T> {
        if self.dim == 1 {
            return self.exponent_unchecked(&[r]);
        }
        let mut xi = vec![T::zero(); self.dim];
        xi[0] = r;
        self.exponent_unchecked(&xi)
    }
}

/// `χ` from a precomputed exponent: `exp(-|x| Re Ψ(ξ) - i x Im Ψ(ξ))`.
pub(crate) fn chi_from_exponent<T: Real>(psi: ExponentValue<T>, x: T) -> Complex<T> {
    if x == T::zero() {
        return Complex::new(T::one(), T::zero());
    }
    let modulus = (-x.abs() * psi.re).exp();
    let phase = x * psi.im;
    Complex::new(modulus * phase.cos(), -modulus * phase.sin())
}

/// `Re χ_ξ(x) = e^{-|x| Re Ψ} cos(|x| Im Ψ)`.
pub(crate) fn re_chi_from_exponent<T: Real>(psi: ExponentValue<T>, x: T) -> T {
    if x == T::zero() {
        return T::one();
    }
    let ax = x.abs();
    (-ax * psi.re).exp() * (ax * psi.im).cos()
}
