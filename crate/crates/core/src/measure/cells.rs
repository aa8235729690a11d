//! Cell-pair averages of `Re e^{-uΨ}` and of its positive/negative parts.
//!
//! For two cells of width `h` whose centres are `D` apart, the difference
//! `u = t - s` has the triangular density `(h - |u - D|)/h²` on `[D - h, D + h]`.
//! On the diagonal (`D = 0`) it folds to `2(h - u)/h²` on `[0, h]`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex;

use crate::quadrature::gauss_legendre8;

/// `φ(w) = (w - 1 + e^{-w}) / w²`.
fn phi(w: Complex<f64>) -> Complex<f64> {
    if w.norm() < 0.5 {
        // Σ (-w)^k / (k+2)!
        let mut term = Complex::new(0.5, 0.0);
        let mut s = term;
        for k in 1..24 {
            term = term * (-w) / (k as f64 + 2.0);
            s += term;
        }
        s
    } else {
        (w - 1.0 + (-w).exp()) / (w * w)
    }
}

/// `sinh(v)/v`.
fn sinhc(v: Complex<f64>) -> Complex<f64> {
    if v.norm() < 0.25 {
        let v2 = v * v;
        1.0 + v2 / 6.0 * (1.0 + v2 / 20.0 * (1.0 + v2 / 42.0 * (1.0 + v2 / 72.0)))
    } else {
        v.sinh() / v
    }
}

/// Cell-pair average of `Re e^{-uΨ}` with `psi = Re Ψ + i |Im Ψ|`.
pub(crate) fn cell_pair_signed(psi: Complex<f64>, dist: f64, h: f64) -> f64 {
    let w = psi * h;
    if dist < 0.5 * h {
        return (2.0 * phi(w)).re;
    }
    if w.norm() < 0.5 {
        let s = sinhc(w * 0.5);
        ((-psi * dist).exp() * s * s).re
    } else {
        let e = |u: f64| (-psi * u).exp();
        ((e(dist - h) - 2.0 * e(dist) + e(dist + h)) / (w * w)).re
    }
}

/// Cell-pair averages of `(Re e^{-uΨ})_+` and `(Re e^{-uΨ})_-` for
/// `Re Ψ = a ≥ 0` and `|Im Ψ| = omega`.
pub(crate) fn cell_pair_parts(a: f64, omega: f64, dist: f64, h: f64) -> (f64, f64) {
    let reach = if dist < 0.5 * h { h } else { dist + h };
    if omega * reach < FRAC_PI_2 {
        // cos(uω) > 0 on the whole window
        return (cell_pair_signed(Complex::new(a, omega), dist, h), 0.0);
    }
    let h2 = h * h;
    let pieces: [(f64, f64, f64, f64); 2] = if dist < 0.5 * h {
        [(2.0 / h, -2.0 / h2, 0.0, h), (0.0, 0.0, 0.0, 0.0)]
    } else {
        [
            (-(dist - h) / h2, 1.0 / h2, dist - h, dist),
            ((dist + h) / h2, -1.0 / h2, dist, dist + h),
        ]
    };
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (p, q, u0, u1) in pieces {
        if u1 > u0 {
            let (pp, mm) = window_parts(a, omega, p, q, u0, u1);
            plus += pp;
            minus += mm;
        }
    }
    (plus, minus)
}

/// `Re F(u)` with `F(u) = e^{zu}[(p + qu)/z - q/z²]`, an antiderivative of
/// `(p + qu) e^{zu}`.
fn antiderivative(z: Complex<f64>, p: f64, q: f64, u: f64) -> f64 {
    ((z * u).exp() * ((p + q * u) / z - q / (z * z))).re
}

/// `Σ_{j<J} r^j` and `Σ_{j<J} j r^j` for `r = e^{-ε}`.
fn geometric_sums(eps: f64, j: f64) -> (f64, f64) {
    if eps == 0.0 {
        return (j, j * (j - 1.0) / 2.0);
    }
    let s0 = (-j * eps).exp_m1() / (-eps).exp_m1();
    if eps * j < 1e-4 {
        let p1 = j * (j - 1.0) / 2.0;
        let p2 = (j - 1.0) * j * (2.0 * j - 1.0) / 6.0;
        let p3 = p1 * p1;
        return (s0, p1 - eps * p2 + 0.5 * eps * eps * p3);
    }
    let r = (-eps).exp();
    let s0_minus_one = r * (-(j - 1.0) * eps).exp_m1() / (-eps).exp_m1();
    let s1 = (s0_minus_one - (j - 1.0) * (-j * eps).exp()) / -(-eps).exp_m1();
    (s0, s1)
}

/// `∫_{u0}^{u1} (p + qu) e^{-au} (cos ωu)_±`, `0 ≤ u0 < u1`, `ω > 0`.
pub(crate) fn window_parts(a: f64, omega: f64, p: f64, q: f64, u0: f64, u1: f64) -> (f64, f64) {
    let f = |u: f64| (p + q * u) * (-a * u).exp() * (omega * u).cos();
    let k0 = (((u0 * omega - FRAC_PI_2) / PI).floor() + 1.0).max(0.0);
    let kmax = ((u1 * omega - FRAC_PI_2) / PI).ceil() - 1.0;
    let zero = |k: f64| (FRAC_PI_2 + k * PI) / omega;
    let split = |v: f64| if v >= 0.0 { (v, 0.0) } else { (0.0, -v) };
    let z = Complex::new(-a, omega);
    let width = u1 - u0;

    if kmax < k0 {
        let v = if z.norm() * width < 0.25 {
            gauss_legendre8(f, u0, u1)
        } else {
            antiderivative(z, p, q, u1) - antiderivative(z, p, q, u0)
        };
        let mid = (omega * 0.5 * (u0 + u1)).cos();
        return if mid >= 0.0 { (v.max(0.0), 0.0) } else { (0.0, (-v).max(0.0)) };
    }
    if z.norm() * width < 0.25 {
        let mut knots = vec![u0];
        let mut k = k0;
        while k <= kmax {
            knots.push(zero(k));
            k += 1.0;
        }
        knots.push(u1);
        let (mut plus, mut minus) = (0.0, 0.0);
        for w in knots.windows(2) {
            let (pp, mm) = split(gauss_legendre8(f, w[0], w[1]));
            plus += pp;
            minus += mm;
        }
        return (plus, minus);
    }

    let g = |u: f64| antiderivative(z, p, q, u);
    let signed = g(u1) - g(u0);
    let parity = |k: f64| if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let s_first = parity(k0);
    let s_last = -parity(kmax);
    let count = kmax - k0 + 1.0;
    // Σ_k (-1)^k Re F(u_k) = Re[i Σ_k e^{-a u_k} ((p + q u_k)/z - q/z²)]
    let alternating = if count <= 64.0 {
        let mut s = 0.0;
        let mut k = k0;
        while k <= kmax {
            s += parity(k) * g(zero(k));
            k += 1.0;
        }
        s
    } else {
        let first = zero(k0);
        let delta = PI / omega;
        let (s0, s1) = geometric_sums(a * delta, count);
        let pf = p + q * first;
        let inner = (pf * s0 + q * delta * s1) / z - q * s0 / (z * z);
        (Complex::i() * (-a * first).exp() * inner).re
    };
    let absolute = s_last * g(u1) - s_first * g(u0) + 2.0 * alternating;
    (
        (0.5 * (absolute + signed)).max(0.0),
        (0.5 * (absolute - signed)).max(0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadTolerance};

    fn brute(a: f64, omega: f64, dist: f64, h: f64) -> (f64, f64, f64) {
        // independent route: adaptive quadrature of the triangular window,
        // split at the sign changes of cos(ωu)
        let lo = if dist < 0.5 * h { -h } else { dist - h };
        let hi = if dist < 0.5 * h { h } else { dist + h };
        let c = if dist < 0.5 * h { 0.0 } else { dist };
        let dens = |u: f64| (h - (u - c).abs()) / (h * h);
        let val = |u: f64| (-a * u.abs()).exp() * (omega * u.abs()).cos();
        let mut knots = vec![lo, c, hi];
        if omega > 0.0 {
            let mut k = 0.0;
            loop {
                let zk = (FRAC_PI_2 + k * PI) / omega;
                if zk >= hi.abs().max(lo.abs()) {
                    break;
                }
                knots.push(zk);
                knots.push(-zk);
                k += 1.0;
            }
        }
        knots.retain(|&x| x >= lo && x <= hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let tol = QuadTolerance {
            rel: 1e-13,
            abs: 1e-16,
            max_subdivisions: 400,
        };
        let (mut s, mut p, mut m) = (0.0, 0.0, 0.0);
        for w in knots.windows(2) {
            s += integrate(|u| dens(u) * val(u), w[0], w[1], tol).value;
            p += integrate(|u| dens(u) * val(u).max(0.0), w[0], w[1], tol).value;
            m += integrate(|u| dens(u) * (-val(u)).max(0.0), w[0], w[1], tol).value;
        }
        (s, p, m)
    }

    #[test]
    fn cell_averages_match_direct_quadrature() {
        let h = 0.125;
        for &(a, omega) in &[
            (0.0, 0.0),
            (3.0, 0.0),
            (0.0, 5.0),
            (0.7, 40.0),
            (1e-3, 900.0),
            (0.2, 20000.0),
            (50.0, 3.0),
            (1e-9, 1e-9),
        ] {
            for &dist in &[0.0, 0.125, 0.25, 0.875] {
                let (s, p, m) = brute(a, omega, dist, h);
                let sig = cell_pair_signed(Complex::new(a, omega), dist, h);
                let (pp, mm) = cell_pair_parts(a, omega, dist, h);
                let tol = 1e-10 * (p + m).max(1e-3);
                assert!((sig - s).abs() < tol, "signed a={a} ω={omega} D={dist}: {sig} vs {s}");
                assert!((pp - p).abs() < tol, "plus a={a} ω={omega} D={dist}: {pp} vs {p}");
                assert!((mm - m).abs() < tol, "minus a={a} ω={omega} D={dist}: {mm} vs {m}");
            }
        }
    }

    #[test]
    fn geometric_sums_agree_with_direct_summation() {
        for &eps in &[0.0, 1e-9, 1e-6, 1e-3, 0.1, 2.0] {
            for &j in &[65usize, 300, 5000] {
                let (mut s0, mut s1) = (0.0, 0.0);
                for i in 0..j {
                    let r = (-eps * i as f64).exp();
                    s0 += r;
                    s1 += i as f64 * r;
                }
                let (g0, g1) = geometric_sums(eps, j as f64);
                assert!((g0 - s0).abs() < 1e-11 * s0, "{eps} {j}");
                assert!((g1 - s1).abs() < 1e-9 * s1.max(1.0), "{eps} {j}: {g1} vs {s1}");
            }
        }
    }
}
