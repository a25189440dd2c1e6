//! Independent oracles shared by the integration tests and the acceptance run.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Ground state of `u'' + u'/r - c u + c u^{q+1} = 0`, `c = 2/q`, found by
/// second-order Heun shooting; deliberately unrelated to the library's RK4 integrator.
#[derive(Debug, Clone, Copy)]
pub struct OracleSoliton {
    pub u0: f64,
    pub norm2_sq: f64,
    pub grad_sq: f64,
    /// `int |x|^2 u^2 / int u^2`.
    pub second_moment: f64,
}

enum Fate {
    Crosses,
    TurnsUp,
    Survives,
}

fn shoot(q: f64, u0: f64, dr: f64, r_max: f64, acc: Option<&mut (f64, f64, f64)>) -> Fate {
    let c = 2.0 / q;
    let rhs = |r: f64, u: f64, v: f64| -> (f64, f64) { (v, -v / r + c * u - c * u.abs().powf(q) * u) };
    let upp0 = 0.5 * c * (u0 - u0.powf(q + 1.0));
    let mut r = dr;
    let mut u = u0 + 0.5 * upp0 * dr * dr;
    let mut v = upp0 * dr;
    let mut sums = (PI * u0 * u0 * dr * dr / 2.0, 0.0, 0.0);
    while r < r_max {
        let (k1u, k1v) = rhs(r, u, v);
        let (k2u, k2v) = rhs(r + dr, u + dr * k1u, v + dr * k1v);
        let (un, vn) = (u + 0.5 * dr * (k1u + k2u), v + 0.5 * dr * (k1v + k2v));
        if un < 0.0 {
            return Fate::Crosses;
        }
        if vn > 0.0 {
            if let Some(a) = acc {
                *a = sums;
            }
            return Fate::TurnsUp;
        }
        sums.0 += PI * dr * (r * u * u + (r + dr) * un * un);
        sums.1 += PI * dr * (r * v * v + (r + dr) * vn * vn);
        sums.2 += PI * dr * (r.powi(3) * u * u + (r + dr).powi(3) * un * un);
        r += dr;
        u = un;
        v = vn;
    }
    if let Some(a) = acc {
        *a = sums;
    }
    Fate::Survives
}

/// Shoots with step `dr` to radius 20, bisecting `u(0)` to `1e-12`.
pub fn oracle_soliton(q: f64, dr: f64) -> OracleSoliton {
    let (mut lo, mut hi) = (1.0 + 1e-6, 4.0);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        match shoot(q, mid, dr, 20.0, None) {
            Fate::Crosses => hi = mid,
            _ => lo = mid,
        }
    }
    let mut sums = (0.0, 0.0, 0.0);
    shoot(q, lo, dr, 20.0, Some(&mut sums));
    OracleSoliton { u0: lo, norm2_sq: sums.0, grad_sq: sums.1, second_moment: sums.2 / sums.0 }
}

/// `a_q* = ||phi_q||^q` from the oracle.
pub fn oracle_a_q_star(q: f64, dr: f64) -> f64 {
    oracle_soliton(q, dr).norm2_sq.powf(0.5 * q)
}

/// Central difference of `f` at 0 with one Richardson step.
pub fn fd_derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}
