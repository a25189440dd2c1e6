//! Normalized excited states by bordered Newton iteration.
//!
//! The unknowns are `(u, mu, sigma_1, sigma_2)`. Besides the Euler-Lagrange
//! equation and the mass constraint, two phase conditions
//! `<t_i, u - u_ref> = 0` remove the translation modes, with `t_i` the
//! normalized partial derivatives of a reference profile; `sigma_i` are their
//! multipliers. The concentration point is then moved until the translation
//! solvability condition `int grad V u^2 = 0` holds, which makes `sigma` vanish.
//!
//! The computational box is a square window of half-width `radius / tau`
//! around the concentration point, resolved by `n x n` interior nodes.

use crate::asymptotics::{bracket_verdict, BracketVerdict};
use crate::error::{Error, Result};
use crate::field::{dot, neg_laplacian_into, Field2D, Grid2D, Point, ProblemParams, Stencil};
use crate::functionals::{EnergyBreakdown, Functional, Potential};
use crate::linalg::{minres, DirichletSolver};
use crate::scalar_field::{c_tilde, rescaled_soliton_with_tau, tau_q, RadialProfile, SolitonConstants};

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Interior nodes per axis.
    pub n: usize,
    /// Window half-width in units of `1/tau`.
    pub radius: f64,
    /// Bound on `eps^3 ||F||_inf`, the residual in blow-up units.
    pub tol_residual: f64,
    /// Bound on `|Q_q(u)| / ||grad u||^2`.
    pub tol_pohozaev: f64,
    pub max_newton_iters: usize,
    pub max_center_iters: usize,
    /// Descending list of exponents ending at the target `q`.
    pub q_schedule: Vec<f64>,
    pub min_damping: f64,
    pub seed_x0: Point,
    pub stencil: Stencil,
    pub krylov_tol: f64,
}

impl SolveConfig {
    pub fn new(params: &ProblemParams) -> Self {
        Self {
            n: 255,
            radius: 11.0,
            tol_residual: 1e-8,
            tol_pohozaev: 1e-4,
            max_newton_iters: 30,
            max_center_iters: 12,
            q_schedule: vec![params.q],
            min_damping: 1.0 / 64.0,
            seed_x0: [params.b1 * params.ring, 0.0],
            stencil: Stencil::Fourth,
            krylov_tol: 1e-11,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < crate::field::MIN_NODES {
            return Err(Error::Range { key: "nx".into(), msg: format!("need at least {} nodes", crate::field::MIN_NODES) });
        }
        if !(self.tol_residual > 0.0 && self.tol_pohozaev > 0.0) {
            return Err(Error::Range { key: "tol_residual".into(), msg: "tolerances must be positive".into() });
        }
        if !(self.radius > 0.0) {
            return Err(Error::Range { key: "L".into(), msg: "window radius must be positive".into() });
        }
        if self.q_schedule.is_empty() || self.q_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Range { key: "q_schedule".into(), msg: "must be non-empty and strictly decreasing".into() });
        }
        Ok(())
    }

    /// The window for blow-up scale `tau` centred at `center`.
    pub fn window(&self, tau: f64, center: Point) -> Result<Grid2D> {
        Grid2D::centered(center, self.radius / tau, self.n)
    }
}

/// Converged excited state and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub q: f64,
    pub a: f64,
    pub tau: f64,
    pub u: Field2D,
    pub mu: f64,
    pub energy: EnergyBreakdown,
    /// `eps^3 ||-Laplacian u + V u - a|u|^q u - mu u||_inf`.
    pub residual_inf: f64,
    /// The same residual in physical units.
    pub residual_raw: f64,
    pub pohozaev: f64,
    /// `|Q_q(u)| / ||grad u||^2`.
    pub pohozaev_res: f64,
    pub eps: f64,
    pub iterations: usize,
    pub center: Point,
    /// Phase multipliers at the accepted centre.
    pub sigma: [f64; 2],
    pub grad_sq: f64,
    /// `tau^2 + ||grad u||^2 - ||grad u_ref||^2`, with `u_ref` the trap-free solution on the same grid.
    pub grad_sq_corr: f64,
    /// `E(u) - E_0(u_ref)`, an estimate of `E(u) - (q-2)/(2q) tau^2` free of discretization bias.
    pub gap: f64,
    pub energy_corr: f64,
    pub lower_bound: f64,
    pub upper_bound_stmt: f64,
    pub upper_bound_proof: f64,
    pub bracket: BracketVerdict,
    pub mass_err: f64,
    /// `min u / max u` over interior nodes.
    pub min_ratio: f64,
    pub reference_mu: f64,
    pub threads: usize,
    pub stencil: Stencil,
}

#[derive(Debug, Clone)]
struct PhaseCondition {
    tangents: [Vec<f64>; 2],
    reference: Vec<f64>,
}

impl PhaseCondition {
    fn from_profile(u: &Field2D) -> Self {
        let g = &u.grid;
        let mut tx = vec![0.0; g.len()];
        let mut ty = vec![0.0; g.len()];
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
                0.0
            } else {
                u.values[g.index(i as usize, j as usize)]
            }
        };
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (ii, jj) = (i as isize, j as isize);
                tx[g.index(i, j)] = (at(ii + 1, jj) - at(ii - 1, jj)) / (2.0 * g.hx);
                ty[g.index(i, j)] = (at(ii, jj + 1) - at(ii, jj - 1)) / (2.0 * g.hy);
            }
        }
        let w = g.cell_area();
        for t in [&mut tx, &mut ty] {
            let n = (dot(t, t) * w).sqrt();
            t.iter_mut().for_each(|v| *v /= n);
        }
        Self { tangents: [tx, ty], reference: u.values.clone() }
    }
}

/// Raw outcome of one bordered Newton solve on a fixed grid.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub u: Field2D,
    pub mu: f64,
    pub sigma: [f64; 2],
    pub iterations: usize,
    pub residual_inf: f64,
}

struct Bordered<'a> {
    functional: &'a Functional,
    grid: Grid2D,
    vpot: Vec<f64>,
    dst: DirichletSolver,
    phase: Option<&'a PhaseCondition>,
}

impl<'a> Bordered<'a> {
    fn new(functional: &'a Functional, grid: Grid2D, phase: Option<&'a PhaseCondition>) -> Self {
        let vpot = functional.potential.sample(grid).values;
        Self { functional, grid, vpot, dst: DirichletSolver::new(&grid, functional.stencil), phase }
    }

    fn n_border(&self) -> usize {
        if self.phase.is_some() {
            3
        } else {
            1
        }
    }

    /// Residual `(F_u, F_mass, F_phase)` with the `sigma` forcing included.
    fn residual(&self, u: &[f64], mu: f64, sigma: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
        let (a, q) = (self.functional.a, self.functional.q);
        let mut f = vec![0.0; u.len()];
        neg_laplacian_into(&self.grid, u, self.functional.stencil, &mut f);
        for k in 0..u.len() {
            let v = u[k];
            f[k] += (self.vpot[k] - mu) * v - a * v.abs().powf(q) * v;
        }
        let w = self.grid.cell_area();
        let mut border = vec![0.5 * (1.0 - w * dot(u, u))];
        if let Some(ph) = self.phase {
            for (i, t) in ph.tangents.iter().enumerate() {
                for k in 0..u.len() {
                    f[k] += sigma[i] * t[k];
                }
                let d: f64 = t.iter().zip(u).zip(&ph.reference).map(|((t, u), r)| t * (u - r)).sum();
                border.push(w * d);
            }
        }
        (f, border)
    }

    fn scaled_norm(&self, f: &[f64], border: &[f64], eps: f64) -> f64 {
        let fu = f.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * eps.powi(3);
        border.iter().fold(fu, |m, v| m.max(v.abs()))
    }

    fn solve(&self, u0: &[f64], mu0: f64, tol: f64, max_iter: usize, min_damping: f64, krylov_tol: f64) -> Result<NewtonOutcome> {
        let n = u0.len();
        let nb = self.n_border();
        let w = self.grid.cell_area();
        let (a, q) = (self.functional.a, self.functional.q);
        let stencil = self.functional.stencil;
        let mut u = u0.to_vec();
        let mut mu = mu0;
        let mut sigma = [0.0; 2];
        let eps_of = |u: &[f64]| {
            let mut tmp = vec![0.0; u.len()];
            neg_laplacian_into(&self.grid, u, stencil, &mut tmp);
            1.0 / (w * dot(u, &tmp)).sqrt()
        };
        let mut eps = eps_of(&u);
        let (mut f, mut border) = self.residual(&u, mu, sigma);
        let mut merit = self.scaled_norm(&f, &border, eps);
        for it in 0..=max_iter {
            if merit < tol {
                let raw = self.residual(&u, mu, [0.0; 2]).0;
                let residual_inf = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * eps.powi(3);
                return Ok(NewtonOutcome {
                    u: Field2D { grid: self.grid, values: u },
                    mu,
                    sigma,
                    iterations: it,
                    residual_inf,
                });
            }
            if it == max_iter {
                break;
            }
            let diag: Vec<f64> = u.iter().zip(&self.vpot).map(|(v, p)| p - mu - a * (q + 1.0) * v.abs().powf(q)).collect();
            let shift = (-mu).max(1.0 / (eps * eps * 100.0)).max(1e-8);
            let tangents: Vec<&Vec<f64>> = self.phase.map(|p| p.tangents.iter().collect()).unwrap_or_default();
            let mut scratch = vec![0.0; n];
            // Border columns: -w u for the mass row, w t_i for the phase rows.
            let mut cols: Vec<Vec<f64>> = vec![u.iter().map(|v| -w * v).collect()];
            for t in &tangents {
                cols.push(t.iter().map(|v| w * v).collect());
            }
            let schur: Vec<f64> = cols
                .iter()
                .map(|c| {
                    self.dst.solve(c, shift, &mut scratch);
                    dot(c, &scratch) / w
                })
                .collect();
            let op = |x: &[f64], y: &mut [f64]| {
                let (xu, xb) = x.split_at(n);
                let (yu, yb) = y.split_at_mut(n);
                neg_laplacian_into(&self.grid, xu, stencil, yu);
                for k in 0..n {
                    yu[k] = w * (yu[k] + diag[k] * xu[k]);
                }
                for (c, &s) in cols.iter().zip(xb) {
                    for k in 0..n {
                        yu[k] += c[k] * s;
                    }
                }
                for (c, yb) in cols.iter().zip(yb.iter_mut()) {
                    *yb = dot(c, xu);
                }
            };
            let prec = |r: &[f64], z: &mut [f64]| {
                let (ru, rb) = r.split_at(n);
                let (zu, zb) = z.split_at_mut(n);
                self.dst.solve(ru, shift, zu);
                zu.iter_mut().for_each(|v| *v /= w);
                for ((zb, rb), s) in zb.iter_mut().zip(rb).zip(&schur) {
                    *zb = rb / s;
                }
            };
            let mut rhs = vec![0.0; n + nb];
            for k in 0..n {
                rhs[k] = -w * f[k];
            }
            for (k, b) in border.iter().enumerate() {
                rhs[n + k] = -b;
            }
            let mut step = vec![0.0; n + nb];
            minres(op, prec, &rhs, &mut step, krylov_tol, 2000)?;
            // Unknown ordering is (u, mu, sigma); the mass column carries -w u so
            // its multiplier is the increment of mu.
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&step).map(|(v, d)| v + lambda * d).collect();
                let tmu = mu + lambda * step[n];
                let mut ts = sigma;
                for i in 0..nb - 1 {
                    ts[i] += lambda * step[n + 1 + i];
                }
                let teps = eps_of(&trial);
                let (tf, tb) = self.residual(&trial, tmu, ts);
                let tm = self.scaled_norm(&tf, &tb, teps);
                if tm < merit || lambda <= min_damping {
                    u = trial;
                    mu = tmu;
                    sigma = ts;
                    eps = teps;
                    f = tf;
                    border = tb;
                    merit = tm;
                    break;
                }
                lambda *= 0.5;
            }
        }
        Err(Error::NoConvergence { what: "bordered newton", iterations: max_iter, residual: merit })
    }
}

/// Runs the bordered Newton iteration on `u0.grid` from `(u0, mu0)`.
pub fn newton(functional: &Functional, u0: &Field2D, mu0: f64, phase_ref: Option<&Field2D>, cfg: &SolveConfig) -> Result<NewtonOutcome> {
    let phase = phase_ref.map(PhaseCondition::from_profile);
    let b = Bordered::new(functional, u0.grid, phase.as_ref());
    b.solve(&u0.values, mu0, 0.1 * cfg.tol_residual, cfg.max_newton_iters, cfg.min_damping, cfg.krylov_tol)
}

/// `w_q^{t_q}` at `x0`, sampled on `grid` and renormalized to unit discrete mass.
pub fn initial_guess(profile: &RadialProfile, tau: f64, t_q: f64, x0: Point, grid: Grid2D) -> Result<Field2D> {
    let mut u = rescaled_soliton_with_tau(profile, tau * t_q, x0, grid)?;
    u.normalize();
    Ok(u)
}

/// Translation force `int grad V u^2` and its Jacobian `int Hess V u^2` in the first coordinate.
fn center_force(pot: &Potential, u: &Field2D) -> (Point, [f64; 3]) {
    let g = &u.grid;
    let (mut f, mut h) = ([0.0; 2], [0.0; 3]);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let w = u.values[g.index(i, j)].powi(2);
            if w == 0.0 {
                continue;
            }
            let p = g.node(i, j);
            let gr = pot.gradient(p);
            let he = pot.hessian(p);
            f[0] += gr[0] * w;
            f[1] += gr[1] * w;
            for k in 0..3 {
                h[k] += he[k] * w;
            }
        }
    }
    let a = g.cell_area();
    ([f[0] * a, f[1] * a], [h[0] * a, h[1] * a, h[2] * a])
}

fn shifted(u: &Field2D, center: Point) -> Field2D {
    Field2D { grid: u.grid.translated([center[0] - u.grid.center()[0], center[1] - u.grid.center()[1]]), values: u.values.clone() }
}

/// Trap-free solution on the window, reused for every centre.
#[derive(Debug, Clone)]
pub struct Reference {
    pub u: Field2D,
    pub mu: f64,
    pub iterations: usize,
}

/// Solves the trap-free problem on `guess.grid`, warm-started from `guess`.
pub fn solve_reference(params: &ProblemParams, guess: &Field2D, cfg: &SolveConfig) -> Result<Reference> {
    let f = Functional::free(params.a, params.q).with_stencil(cfg.stencil);
    let mu0 = f.multiplier(guess);
    let out = newton(&f, guess, mu0, Some(guess), cfg)?;
    Ok(Reference { u: out.u, mu: out.mu, iterations: out.iterations })
}

/// Solves the trapped problem at exponent `params.q`, starting from the
/// trap-free reference translated to `seed`.
pub fn solve_with_reference(
    params: &ProblemParams,
    consts: &SolitonConstants,
    reference: &Reference,
    seed: Point,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let tau = tau_q(params.a, consts)?;
    let functional = Functional::new(params).with_stencil(cfg.stencil);
    let pot = functional.potential;
    let h = reference.u.grid.max_spacing();
    let mut center = seed;
    let mut iterations = 0;
    let mut u = shifted(&reference.u, center);
    let mut mu = reference.mu;
    let mut outcome = None;
    for round in 0..cfg.max_center_iters {
        // Move the window on the frozen profile first; this is where the force varies most.
        for _ in 0..50 {
            let (force, hess) = center_force(&pot, &u);
            let dc = -force[0] / hess[0];
            if !dc.is_finite() {
                break;
            }
            center[0] += dc;
            u = shifted(&u, center);
            if dc.abs() <= 1e-12 * h.max(f64::MIN_POSITIVE) + f64::EPSILON * center[0].abs() {
                break;
            }
        }
        let guess = shifted(&if round == 0 { reference.u.clone() } else { u.clone() }, center);
        let phase_ref = shifted(&reference.u, center);
        let out = newton(&functional, &guess, mu, Some(&phase_ref), cfg)?;
        iterations += out.iterations;
        u = out.u.clone();
        mu = out.mu;
        let (force, hess) = center_force(&pot, &u);
        let dc = -force[0] / hess[0];
        outcome = Some(out);
        if dc.abs() <= 1e-9 * h + 4.0 * f64::EPSILON * center[0].abs() {
            break;
        }
    }
    let out = outcome.expect("at least one centre round");
    let mut report = build_report(params, consts, tau, &functional, reference, out, center, iterations, cfg)?;
    if report.min_ratio < 0.0 {
        // Clip sign changes and re-solve, at most twice.
        for _ in 0..2 {
            let clipped = report.u.map(|v| v.max(0.0));
            let phase_ref = shifted(&reference.u, center);
            let out = newton(&functional, &clipped, report.mu, Some(&phase_ref), cfg)?;
            iterations += out.iterations;
            report = build_report(params, consts, tau, &functional, reference, out, center, iterations, cfg)?;
            if report.min_ratio >= 0.0 {
                break;
            }
        }
        if report.min_ratio < 0.0 {
            return Err(Error::WrongBranch(format!("solution changes sign (min/max = {:.3e})", report.min_ratio)));
        }
    }
    if report.pohozaev_res > cfg.tol_pohozaev {
        return Err(Error::WrongBranch(format!(
            "|Q_q(u)| / ||grad u||^2 = {:.3e} exceeds {:.1e}",
            report.pohozaev_res, cfg.tol_pohozaev
        )));
    }
    if report.bracket == BracketVerdict::Below || report.gap * tau * tau > 10.0 * consts.second_moment {
        return Err(Error::WrongBranch(format!(
            "energy gap tau^2 (E - lower) = {:.4e} is far outside the bracket",
            report.gap * tau * tau
        )));
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    params: &ProblemParams,
    consts: &SolitonConstants,
    tau: f64,
    functional: &Functional,
    reference: &Reference,
    out: NewtonOutcome,
    center: Point,
    iterations: usize,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let q = params.q;
    let u = out.u;
    let r = &reference.u.values;
    let energy = functional.energy(&u);
    let grad_sq = 2.0 * energy.kinetic;
    let eps = 1.0 / grad_sq.sqrt();
    let el = functional.euler_lagrange_residual(&u, out.mu);
    let residual_raw = el.max_abs();
    let pohozaev = functional.pohozaev_q(&u);
    // Differences against the trap-free reference, free of first-order cancellation.
    let mut sum_uv = vec![0.0; r.len()];
    let mut diff = vec![0.0; r.len()];
    for k in 0..r.len() {
        sum_uv[k] = u.values[k] + r[k];
        diff[k] = u.values[k] - r[k];
    }
    let mut lap = vec![0.0; r.len()];
    neg_laplacian_into(&u.grid, &sum_uv, cfg.stencil, &mut lap);
    let w = u.grid.cell_area();
    let d_grad = dot(&diff, &lap) * w;
    let p = q + 2.0;
    let d_pow: f64 = u
        .values
        .iter()
        .zip(r)
        .map(|(&a, &b)| {
            let (a, b) = (a.abs(), b.abs());
            if b == 0.0 {
                a.powf(p)
            } else {
                b.powf(p) * (p * ((a - b) / b).ln_1p()).exp_m1()
            }
        })
        .sum::<f64>()
        * w;
    let gap = 0.5 * d_grad + energy.potential - params.a / p * d_pow;
    let lower = c_tilde(q, tau);
    let tau2 = tau * tau;
    let verdict = bracket_verdict(gap, tau, consts, params.b1);
    let interior_max = u.max_abs();
    let min_val = u.values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(SolveReport {
        q,
        a: params.a,
        tau,
        mu: out.mu,
        energy,
        residual_inf: residual_raw * eps.powi(3),
        residual_raw,
        pohozaev,
        pohozaev_res: pohozaev.abs() / grad_sq,
        eps,
        iterations,
        center,
        sigma: out.sigma,
        grad_sq,
        grad_sq_corr: tau2 + d_grad,
        gap,
        energy_corr: lower + gap,
        lower_bound: lower,
        upper_bound_stmt: lower + 0.5 * consts.second_moment / tau2,
        upper_bound_proof: lower + consts.second_moment / (2.0 * params.b1 * params.b1 * tau2),
        bracket: verdict,
        mass_err: (u.mass() - 1.0).abs(),
        min_ratio: min_val / interior_max,
        reference_mu: reference.mu,
        threads: rayon::current_num_threads(),
        stencil: cfg.stencil,
        u,
    })
}

/// Full solve at `params.q` from the soliton ansatz.
pub fn solve(cfg: &SolveConfig, params: &ProblemParams, profile: &RadialProfile, consts: &SolitonConstants) -> Result<SolveReport> {
    cfg.validate()?;
    let tau = tau_q(params.a, consts)?;
    let grid = cfg.window(tau, cfg.seed_x0)?;
    let guess = initial_guess(profile, tau, 1.0, cfg.seed_x0, grid)?;
    let reference = solve_reference(params, &guess, cfg)?;
    solve_with_reference(params, consts, &reference, cfg.seed_x0, cfg)
}

/// Per-exponent inputs of a continuation sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub profile: RadialProfile,
    pub consts: SolitonConstants,
}

/// Solves along a strictly decreasing list of exponents, warm-starting each
/// trap-free reference from the previous one rescaled by the ratio of blow-up scales.
pub fn continuation_sweep(cfg: &SolveConfig, params: &ProblemParams, points: &[SweepPoint]) -> Result<Vec<SolveReport>> {
    cfg.validate()?;
    if points.windows(2).any(|w| w[1].consts.q >= w[0].consts.q) {
        return Err(Error::Range { key: "q_schedule".into(), msg: "exponents must be strictly decreasing".into() });
    }
    let mut reports = Vec::with_capacity(points.len());
    let mut previous: Option<(Reference, f64)> = None;
    for pt in points {
        let q = pt.consts.q;
        let at = |e: Error| Error::AtExponent { q, source: Box::new(e) };
        let pq = params.with_q(q).map_err(at)?;
        let tau = tau_q(pq.a, &pt.consts).map_err(at)?;
        let grid = cfg.window(tau, cfg.seed_x0).map_err(at)?;
        let guess = match &previous {
            Some((prev, prev_tau)) => {
                let ratio = tau / prev_tau;
                let mut g = Field2D { grid, values: prev.u.values.iter().map(|v| v * ratio).collect() };
                g.normalize();
                g
            }
            None => initial_guess(&pt.profile, tau, 1.0, cfg.seed_x0, grid).map_err(at)?,
        };
        let reference = solve_reference(&pq, &guess, cfg).map_err(at)?;
        let report = solve_with_reference(&pq, &pt.consts, &reference, cfg.seed_x0, cfg).map_err(at)?;
        previous = Some((reference, tau));
        reports.push(report);
    }
    Ok(reports)
}

/// Dilates `u` about its centre of mass so that `Q_q` vanishes; a diagnostic
/// projection onto the Pohozaev manifold along the scaling direction.
pub fn pohozaev_rescale(functional: &Functional, u: &Field2D) -> Result<(f64, Field2D)> {
    let k = functional.grad_sq(u);
    let p = functional.power(u);
    let q = functional.q;
    let a = functional.a;
    let virial = |t: f64| -> f64 {
        let c = crate::scaling::center_of_mass(u);
        let pot = functional.potential;
        0.5 * u.weighted_mass(|x| pot.virial([c[0] + (x[0] - c[0]) / t, c[1] + (x[1] - c[1]) / t]))
    };
    let qf = |t: f64| t * t * k - virial(t) - q * a / (q + 2.0) * t.powf(q) * p;
    let mut t = (k / (q * a / (q + 2.0) * p)).powf(1.0 / (q - 2.0));
    for _ in 0..60 {
        let h = 1e-6 * t;
        let d = (qf(t + h) - qf(t - h)) / (2.0 * h);
        let step = qf(t) / d;
        t -= step;
        if !(t > 0.0) {
            return Err(Error::NoConvergence { what: "pohozaev rescale", iterations: 60, residual: f64::NAN });
        }
        if step.abs() < 1e-14 * t {
            break;
        }
    }
    Ok((t, crate::scaling::scale(u, t)?))
}
