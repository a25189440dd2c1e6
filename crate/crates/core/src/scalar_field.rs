//! Radial ground states of `-Laplacian u + c u = c u^{q+1}` in the plane, `c = 2/q`.
//!
//! `q = 2` gives the cubic ground state `Q`; `q > 2` gives the soliton `phi_q`.
//! Profiles are found by shooting on `u(0)` with RK4 and bisection between
//! trajectories that cross zero and trajectories that turn upward. Past the
//! point where the bracketing trajectories separate, the profile is continued
//! by the linearized tail `C K0(kappa r)`, `kappa = sqrt(c)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D, Point};

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub dr: f64,
    pub r_max: f64,
    /// Relative width of the final bisection bracket on `u(0)`.
    pub tol: f64,
    pub max_bisections: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { dr: 1e-3, r_max: 25.0, tol: 1e-15, max_bisections: 200 }
    }
}

/// Positive radial solution on a uniform grid `r_k = k dr`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub q: f64,
    pub dr: f64,
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    pub u0: f64,
    /// Fitted `(C, delta)` with `u(r) ~ C exp(-delta r)` on the tail.
    pub decay: (f64, f64),
    /// Radius where the shooting trajectory hands over to the linear tail.
    pub r_match: f64,
    tail_coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    Crosses,
    TurnsUp,
    Undecided,
}

fn rhs(q: f64, c: f64, r: f64, u: f64, v: f64) -> f64 {
    -v / r + c * u - c * u.abs().powf(q) * u
}

/// Integrates from the series start; records values if `record` is set.
fn trajectory(q: f64, u0: f64, dr: f64, r_end: f64, record: Option<&mut (Vec<f64>, Vec<f64>)>) -> Fate {
    let c = 2.0 / q;
    let upp = 0.5 * (c * u0 - c * u0.powf(q + 1.0));
    let mut rec = record;
    if let Some(buf) = rec.as_deref_mut() {
        buf.0.clear();
        buf.1.clear();
        buf.0.push(u0);
        buf.1.push(0.0);
    }
    let mut r = dr;
    let mut u = u0 + 0.5 * upp * dr * dr;
    let mut v = upp * dr;
    let steps = (r_end / dr).ceil() as usize;
    for _ in 1..steps {
        if let Some(buf) = rec.as_deref_mut() {
            buf.0.push(u);
            buf.1.push(v);
        }
        if u < 0.0 {
            return Fate::Crosses;
        }
        if v > 0.0 {
            return Fate::TurnsUp;
        }
        let h = dr;
        let k1u = v;
        let k1v = rhs(q, c, r, u, v);
        let k2u = v + 0.5 * h * k1v;
        let k2v = rhs(q, c, r + 0.5 * h, u + 0.5 * h * k1u, k2u);
        let k3u = v + 0.5 * h * k2v;
        let k3v = rhs(q, c, r + 0.5 * h, u + 0.5 * h * k2u, k3u);
        let k4u = v + h * k3v;
        let k4v = rhs(q, c, r + h, u + h * k3u, k4u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
    }
    Fate::Undecided
}

/// Modified Bessel functions `(K0(z), K1(z))` for `z > 0`, from
/// `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt` by the trapezoidal rule.
pub fn bessel_k01(z: f64) -> (f64, f64) {
    let h: f64 = 0.02;
    let (mut k0, mut k1) = (0.5 * (-z).exp(), 0.5 * (-z).exp());
    let mut t = h;
    loop {
        let ch = t.cosh();
        let e = (-z * ch).exp();
        k0 += e;
        k1 += e * ch;
        if z * (ch - 1.0) > 60.0 {
            break;
        }
        t += h;
    }
    (k0 * h, k1 * h)
}

/// Composite Simpson rule on a uniform grid (3/8 rule on the last panel when
/// the number of intervals is odd).
fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        3 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) { (n - 1, 0.0) } else {
                let k = n - 4;
                (k, 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]))
            };
            let mut s = f[0] + f[even_end];
            for (k, v) in f.iter().enumerate().take(even_end).skip(1) {
                s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            s * h / 3.0 + tail
        }
    }
}

/// Shoots the positive radial solution for exponent `q` with default options
/// and bisection tolerance `tol`.
pub fn shoot_soliton(q: f64, tol: f64) -> Result<RadialProfile> {
    shoot_soliton_with(q, ShootOptions { tol, ..Default::default() })
}

pub fn shoot_soliton_with(q: f64, opts: ShootOptions) -> Result<RadialProfile> {
    if !(2.0..=4.0).contains(&q) {
        return Err(Error::Domain(format!("shooting needs q in [2, 4], got {q}")));
    }
    if !(opts.tol > 0.0 && opts.dr > 0.0 && opts.r_max > 0.0) {
        return Err(Error::Domain("shooting tolerance, step and radius must be positive".into()));
    }
    let (dr, horizon) = (opts.dr, 80.0);
    let mut lo = 1.0 + 1e-9;
    let mut hi = 10.0;
    if trajectory(q, lo, dr, horizon, None) != Fate::TurnsUp || trajectory(q, hi, dr, horizon, None) != Fate::Crosses {
        return Err(Error::NonBracketed { lo, hi });
    }
    let mut converged = false;
    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= opts.tol * hi {
            converged = true;
            break;
        }
        match trajectory(q, mid, dr, horizon, None) {
            Fate::Crosses => hi = mid,
            Fate::TurnsUp => lo = mid,
            Fate::Undecided => {
                lo = mid;
                hi = mid;
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "soliton shooting",
            iterations: opts.max_bisections,
            residual: (hi - lo) / hi,
        });
    }
    let mut a = (Vec::new(), Vec::new());
    let mut b = (Vec::new(), Vec::new());
    trajectory(q, lo, dr, horizon, Some(&mut a));
    trajectory(q, hi, dr, horizon, Some(&mut b));
    let len = a.0.len().min(b.0.len());
    let kappa = (2.0 / q).sqrt();
    let mut m = len - 1;
    for k in 1..len {
        let mid = 0.5 * (a.0[k] + b.0[k]);
        if (a.0[k] - b.0[k]).abs() > 1e-8 * mid || a.1[k] >= 0.0 || b.1[k] >= 0.0 || mid <= 0.0 {
            m = k.saturating_sub(1);
            break;
        }
    }
    if (m as f64) * dr * kappa < 6.0 {
        return Err(Error::BadTail(format!(
            "shooting trajectories separate at r = {:.3}, too early to match the tail",
            m as f64 * dr
        )));
    }
    let u0 = 0.5 * (lo + hi);
    let r_match = m as f64 * dr;
    let mut values: Vec<f64> = (0..=m).map(|k| 0.5 * (a.0[k] + b.0[k])).collect();
    let mut slopes: Vec<f64> = (0..=m).map(|k| 0.5 * (a.1[k] + b.1[k])).collect();
    let tail_coeff = values[m] / bessel_k01(kappa * r_match).0;
    let mut r_max = opts.r_max.max(r_match);
    loop {
        let n = (r_max / dr).round() as usize;
        for k in values.len()..=n {
            let (k0, k1) = bessel_k01(kappa * k as f64 * dr);
            values.push(tail_coeff * k0);
            slopes.push(-tail_coeff * kappa * k1);
        }
        if *values.last().unwrap() < 1e-8 * u0 {
            break;
        }
        r_max += 5.0;
    }
    let r: Vec<f64> = (0..values.len()).map(|k| k as f64 * dr).collect();
    let mut profile = RadialProfile { q, dr, r, values, slopes, u0, decay: (0.0, 0.0), r_match, tail_coeff };
    profile.decay = decay_fit(&profile)?;
    Ok(profile)
}

/// Least-squares fit of `log u = log C - delta r` on the last quarter of the grid.
pub fn decay_fit(profile: &RadialProfile) -> Result<(f64, f64)> {
    let n = profile.r.len();
    let start = n - n / 4;
    let pts: Vec<(f64, f64)> = (start..n)
        .filter(|&k| profile.values[k] > 1e-290)
        .map(|k| (profile.r[k], profile.values[k].ln()))
        .collect();
    if pts.len() < 20 {
        return Err(Error::BadTail(format!("only {} usable tail points", pts.len())));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (pts.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    if !(slope < 0.0) || rms > 1e-2 {
        return Err(Error::BadTail(format!("log-linear tail fit failed: slope {slope}, rms {rms}")));
    }
    Ok((intercept.exp(), -slope))
}

impl RadialProfile {
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// The profile multiplied by a constant `c > 0`.
    pub fn scaled(&self, c: f64) -> RadialProfile {
        RadialProfile {
            values: self.values.iter().map(|v| c * v).collect(),
            slopes: self.slopes.iter().map(|v| c * v).collect(),
            u0: c * self.u0,
            decay: (c * self.decay.0, self.decay.1),
            tail_coeff: c * self.tail_coeff,
            ..self.clone()
        }
    }

    fn kappa(&self) -> f64 {
        (2.0 / self.q).sqrt()
    }

    /// `u(r)` by cubic Hermite interpolation; the linear tail beyond the grid.
    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_slope(r).0
    }

    pub fn eval_with_slope(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        let n = self.r.len();
        let x = r / self.dr;
        if x >= (n - 1) as f64 {
            let z = self.kappa() * r;
            if z > 700.0 {
                return (0.0, 0.0);
            }
            let (k0, k1) = bessel_k01(z);
            return (self.tail_coeff * k0, -self.tail_coeff * self.kappa() * k1);
        }
        let k = x.floor() as usize;
        let t = x - k as f64;
        let h = self.dr;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let der = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (val, der)
    }

    /// `2 pi int f(r, u, u') r dr` over the stored grid.
    pub fn radial_integral(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let g: Vec<f64> = (0..self.r.len())
            .map(|k| f(self.r[k], self.values[k], self.slopes[k]) * self.r[k])
            .collect();
        2.0 * PI * simpson(&g, self.dr)
    }

    pub fn norm2_sq(&self) -> f64 {
        self.radial_integral(|_, u, _| u * u)
    }

    pub fn grad_sq(&self) -> f64 {
        self.radial_integral(|_, _, v| v * v)
    }

    pub fn power_integral(&self, p: f64) -> f64 {
        self.radial_integral(|_, u, _| u.abs().powf(p))
    }

    /// Largest pointwise ODE residual at interior nodes, using centred
    /// differences of the stored slopes.
    pub fn ode_residual(&self) -> f64 {
        let c = 2.0 / self.q;
        let mut worst = 0.0_f64;
        for k in 1..self.r.len() - 1 {
            let upp = (self.slopes[k + 1] - self.slopes[k - 1]) / (2.0 * self.dr);
            let u = self.values[k];
            let res = upp + self.slopes[k] / self.r[k] - c * u + c * u.abs().powf(self.q) * u;
            worst = worst.max(res.abs());
        }
        worst
    }

    /// `||u - other||_{H^1}` by radial quadrature on this profile's nodes.
    pub fn h1_distance(&self, other: &RadialProfile) -> f64 {
        let r_end = self.r_max().max(other.r_max());
        let n = (r_end / self.dr).round() as usize + 1;
        let g: Vec<f64> = (0..n)
            .map(|k| {
                let r = k as f64 * self.dr;
                let (a, da) = self.eval_with_slope(r);
                let (b, db) = other.eval_with_slope(r);
                ((a - b).powi(2) + (da - db).powi(2)) * r
            })
            .collect();
        (2.0 * PI * simpson(&g, self.dr)).sqrt()
    }

    pub fn h1_norm(&self) -> f64 {
        (self.norm2_sq() + self.grad_sq()).sqrt()
    }
}

/// Norms and derived constants of `phi_q` together with `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonConstants {
    pub q: f64,
    pub u0: f64,
    pub norm2_sq: f64,
    pub a_q_star: f64,
    pub a_star: f64,
    pub grad_sq: f64,
    pub pot_q2: f64,
    pub second_moment: f64,
    /// Largest of the two relative Pohozaev defects of the profile.
    pub pohozaev_res: f64,
}

pub fn soliton_constants(profile: &RadialProfile, profile_q: &RadialProfile) -> SolitonConstants {
    let q = profile.q;
    let norm2_sq = profile.norm2_sq();
    let grad_sq = profile.grad_sq();
    let pot_q2 = profile.power_integral(q + 2.0);
    let a_star = profile_q.norm2_sq();
    let second_moment = profile_q.radial_integral(|r, u, _| r * r * u * u) / a_star;
    let res1 = (grad_sq - norm2_sq).abs();
    let res2 = (norm2_sq - 2.0 / (q + 2.0) * pot_q2).abs();
    SolitonConstants {
        q,
        u0: profile.u0,
        norm2_sq,
        a_q_star: norm2_sq.powf(q / 2.0),
        a_star,
        grad_sq,
        pot_q2,
        second_moment,
        pohozaev_res: res1.max(res2) / norm2_sq,
    }
}

/// Blow-up scale `(2 a_q* / (q a))^{1/(q-2)}`.
pub fn tau_q(a: f64, consts: &SolitonConstants) -> Result<f64> {
    if consts.q <= 2.0 {
        return Err(Error::Domain(format!("tau_q needs q > 2, got {}", consts.q)));
    }
    if !(a > 0.0 && a < consts.a_star) {
        return Err(Error::Domain(format!("a = {a} must lie in (0, a* = {})", consts.a_star)));
    }
    Ok(tau_formula(a, consts.a_q_star, consts.q))
}

/// `(2 a_q* / (q a))^{1/(q-2)}` without range checks on `a`.
pub fn tau_formula(a: f64, a_q_star: f64, q: f64) -> f64 {
    (2.0 * a_q_star / (q * a)).powf(1.0 / (q - 2.0))
}

/// Mountain-pass level of the trap-free problem, `(q-2)/(2q) tau^2`.
pub fn c_tilde(q: f64, tau: f64) -> f64 {
    (q - 2.0) / (2.0 * q) * tau * tau
}

/// `w(x) = tau / ||phi|| phi(tau (x - center))` sampled on `grid`.
pub fn rescaled_soliton_with_tau(profile: &RadialProfile, tau: f64, center: Point, grid: Grid2D) -> Result<Field2D> {
    if 1.0 / tau < 8.0 * grid.max_spacing() {
        return Err(Error::UnderResolved { width: 1.0 / tau, h: grid.max_spacing() });
    }
    let amp = tau / profile.norm2_sq().sqrt();
    Ok(Field2D::from_fn(grid, |p| {
        let r = tau * (p[0] - center[0]).hypot(p[1] - center[1]);
        amp * profile.eval(r)
    }))
}

/// The rescaled soliton `w_q` for interaction strength `a`.
pub fn rescaled_soliton(profile: &RadialProfile, a: f64, center: Point, grid: Grid2D) -> Result<Field2D> {
    if profile.q <= 2.0 || !(a > 0.0) {
        return Err(Error::Domain(format!("rescaling needs q > 2 and a > 0, got q = {}, a = {a}", profile.q)));
    }
    let a_q_star = profile.norm2_sq().powf(profile.q / 2.0);
    let tau = tau_formula(a, a_q_star, profile.q);
    rescaled_soliton_with_tau(profile, tau, center, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        // Reference values of K0, K1 at z = 1 and z = 10.
        let (k0, k1) = bessel_k01(1.0);
        assert!((k0 - 0.42102443824070834).abs() < 1e-14);
        assert!((k1 - 0.6019072301972346).abs() < 1e-14);
        let (k0, _) = bessel_k01(10.0);
        assert!((k0 / 1.778006231616918e-5 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        for n in [5usize, 6, 7, 10] {
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|k| (k as f64 * h).powi(3)).collect();
            assert!((simpson(&f, h) - 0.25).abs() < 1e-14, "{n}");
        }
    }

    #[test]
    fn ground_state_shape() {
        let p = shoot_soliton(2.0, 1e-15).unwrap();
        assert!((p.u0 - 2.2062).abs() < 1e-3);
        assert!((p.norm2_sq() - 11.70).abs() < 0.01);
        assert!(p.values.windows(2).all(|w| w[1] < w[0]));
        assert!(*p.values.last().unwrap() < 1e-8 * p.u0);
        assert!(p.ode_residual() < 1e-5, "{}", p.ode_residual());
    }

    #[test]
    fn decay_rates_follow_linearization() {
        let p2 = shoot_soliton(2.0, 1e-15).unwrap();
        assert!((p2.decay.1 - 1.0).abs() < 0.05, "{:?}", p2.decay);
        let p3 = shoot_soliton(3.0, 1e-15).unwrap();
        assert!((p3.decay.1 - (2.0f64 / 3.0).sqrt()).abs() < 0.05, "{:?}", p3.decay);
        let (c, d) = decay_fit(&p3.scaled(3.0)).unwrap();
        assert!((d - p3.decay.1).abs() < 1e-12);
        assert!((c / p3.decay.0 - 3.0).abs() < 1e-10);
    }

    #[test]
    fn pohozaev_identities_hold() {
        let pq = shoot_soliton(2.0, 1e-15).unwrap();
        for q in [2.05, 2.5, 3.0, 4.0] {
            let p = shoot_soliton(q, 1e-15).unwrap();
            let c = soliton_constants(&p, &pq);
            assert!(c.pohozaev_res < 1e-6, "q = {q}: {}", c.pohozaev_res);
        }
    }

    #[test]
    fn constants_at_q_two_coincide() {
        let pq = shoot_soliton(2.0, 1e-15).unwrap();
        let c = soliton_constants(&pq, &pq);
        assert_eq!(c.a_q_star, c.a_star);
    }

    #[test]
    fn tau_formula_and_domain() {
        let pq = shoot_soliton(2.0, 1e-15).unwrap();
        let p4 = shoot_soliton(4.0, 1e-15).unwrap();
        let c4 = soliton_constants(&p4, &pq);
        // a_4*/2 exceeds a*, so only the bare formula accepts it.
        assert!((tau_formula(c4.a_q_star / 2.0, c4.a_q_star, 4.0) - 1.0).abs() < 1e-12);
        assert!(tau_q(c4.a_q_star / 2.0, &c4).is_err());
        let p3 = shoot_soliton(3.0, 1e-15).unwrap();
        let c3 = soliton_constants(&p3, &pq);
        assert!((tau_formula(2.0 * c3.a_q_star / 3.0, c3.a_q_star, 3.0) - 1.0).abs() < 1e-12);
        let t = tau_q(c3.a_star / 2.0, &c3).unwrap();
        assert!((t.powf(1.0) - 4.0 * c3.a_q_star / (3.0 * c3.a_star)).abs() < 1e-12 * t);
        assert!(tau_q(c3.a_star, &c3).is_err());
        let c2 = soliton_constants(&pq, &pq);
        assert!(tau_q(1.0, &c2).is_err());
    }

    #[test]
    fn out_of_range_exponent_is_rejected() {
        assert!(matches!(shoot_soliton(1.5, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(shoot_soliton(4.5, 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn hermite_interpolation_matches_nodes() {
        let p = shoot_soliton(2.5, 1e-15).unwrap();
        assert_eq!(p.eval(p.r[1234]), p.values[1234]);
        let (v, d) = p.eval_with_slope(1.2345);
        let (v0, d0) = p.eval_with_slope(1.2345 - 1e-6);
        let (v1, _) = p.eval_with_slope(1.2345 + 1e-6);
        assert!(((v1 - v0) / 2e-6 - d).abs() < 1e-6);
        assert!((v - v0).abs() < 1e-5 && d0 < 0.0);
        assert!(p.eval(p.r_max() + 1.0) < p.eval(p.r_max()));
    }

    #[test]
    fn unit_rescale_is_normalized_ground_state() {
        let pq = shoot_soliton(2.0, 1e-15).unwrap();
        let g = Grid2D::centered([0.0, 0.0], 14.0, 255).unwrap();
        let w = rescaled_soliton_with_tau(&pq, 1.0, [0.0, 0.0], g).unwrap();
        assert!((w.mass() - 1.0).abs() < 1e-6);
        let coarse = Grid2D::centered([0.0, 0.0], 14.0, 63).unwrap();
        assert!(matches!(
            rescaled_soliton_with_tau(&pq, 1.0, [0.0, 0.0], coarse),
            Err(Error::UnderResolved { .. })
        ));
    }
}
