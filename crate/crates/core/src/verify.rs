//! The property suite behind the `verify` command: every invariant of the
//! library checked on one configuration, one pass/fail row each.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{blowup_rescale, convergence_table, BlowupRecord};
use crate::config::{parse_config, RunConfig};
use crate::error::Result;
use crate::field::{Field2D, Grid2D, ProblemParams, Stencil};
use crate::functionals::{lowest_eigenvalue, Functional};
use crate::manifest::{check_manifest, manifests_in};
use crate::scalar_field::{c_tilde, rescaled_soliton_with_tau, shoot_soliton, soliton_constants, RadialProfile, SolitonConstants};
use crate::scaling::{build_path, compact_bump, path_max, vzero_scaled_max, PathOptions, Segment};
use crate::solver::{continuation_sweep, solve, SolveConfig, SolveReport, SweepPoint};

/// Exponents of the soliton trend checks, decreasing toward `q = 2`.
pub const TREND_EXPONENTS: [f64; 5] = [3.0, 2.5, 2.2, 2.1, 2.05];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: String) -> Self {
        Self { name: name.into(), ok, detail }
    }
}

/// Smooth positive test field: a sum of `terms` random Gaussians, unit mass.
pub fn random_smooth_field(rng: &mut impl Rng, grid: Grid2D, terms: usize) -> Field2D {
    let (lo, hi) = grid.bounds();
    let span = [hi[0] - lo[0], hi[1] - lo[1]];
    let bumps: Vec<(f64, [f64; 2], f64)> = (0..terms)
        .map(|_| {
            let c = [lo[0] + span[0] * rng.random_range(0.35..0.65), lo[1] + span[1] * rng.random_range(0.35..0.65)];
            let w = span[0].min(span[1]) * rng.random_range(0.06..0.12);
            (rng.random_range(0.5..1.5), c, w)
        })
        .collect();
    let mut u = Field2D::from_fn(grid, |p| {
        bumps.iter().map(|(amp, c, w)| amp * (-((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / (w * w)).exp()).sum()
    });
    u.normalize();
    u
}

/// Richardson-extrapolated central difference of `f` at 0.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// `int |x|^2 Q^2 / int Q^2` by 2D quadrature of the sampled profile.
pub fn second_moment_2d(profile: &RadialProfile, half: f64, n: usize) -> Result<f64> {
    let grid = Grid2D::centered([0.0, 0.0], half, n)?;
    let u = Field2D::from_fn(grid, |p| profile.eval(p[0].hypot(p[1])));
    Ok(u.weighted_mass(|p| p[0] * p[0] + p[1] * p[1]) / u.mass())
}

/// Relative deviation of the sphere-tangent gradient from the derivative along
/// the great circle `u cos s + v sin s`, with `v` a unit tangent direction.
pub fn tangent_gradient_fd_error(f: &Functional, u: &Field2D, v: &Field2D) -> f64 {
    let mut dir = v.clone();
    let c = dir.dot(u) / u.mass();
    dir.values.iter_mut().zip(&u.values).for_each(|(d, x)| *d -= c * x);
    dir.normalize();
    let curve = |s: f64| {
        let vals = u.values.iter().zip(&dir.values).map(|(a, b)| a * s.cos() + b * s.sin()).collect();
        f.energy(&u.with_values(vals)).total
    };
    let fd = richardson_derivative(curve, 1e-3);
    let exact = f.tangent_gradient(u).dot(&dir);
    (fd - exact).abs() / exact.abs().max(f.grad_sq(u) * 1e-3)
}

/// Shared profiles and constants for the checks.
pub struct Context {
    pub ground: RadialProfile,
    pub profiles: Vec<(RadialProfile, SolitonConstants)>,
}

impl Context {
    pub fn build(exponents: &[f64]) -> Result<Self> {
        let ground = shoot_soliton(2.0, 1e-15)?;
        let profiles = exponents
            .iter()
            .map(|&q| {
                let p = shoot_soliton(q, 1e-15)?;
                let c = soliton_constants(&p, &ground);
                Ok((p, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ground, profiles })
    }

    pub fn at(&self, q: f64) -> Option<&(RadialProfile, SolitonConstants)> {
        self.profiles.iter().find(|(p, _)| p.q == q)
    }

    pub fn a_star(&self) -> f64 {
        self.ground.norm2_sq()
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn soliton_checks(ctx: &Context, out: &mut Vec<Check>) -> Result<()> {
    let res: Vec<f64> = ctx.profiles.iter().map(|(_, c)| c.pohozaev_res).collect();
    out.push(Check::new("soliton_pohozaev", res.iter().all(|r| *r < 1e-6), fmt_list(&res)));
    let trend: Vec<&(RadialProfile, SolitonConstants)> =
        TREND_EXPONENTS.iter().filter_map(|q| ctx.at(*q)).collect();
    let h1: Vec<f64> = trend.iter().map(|(p, _)| p.h1_distance(&ctx.ground)).collect();
    let da: Vec<f64> = trend.iter().map(|(_, c)| (c.a_q_star - c.a_star).abs()).collect();
    let h1_ok = strictly_decreasing(&h1) && h1.last().is_some_and(|d| *d < 0.1 * ctx.ground.h1_norm());
    out.push(Check::new("soliton_h1_trend", h1_ok, fmt_list(&h1)));
    out.push(Check::new("critical_mass_trend", strictly_decreasing(&da), fmt_list(&da)));
    let radial = ctx.profiles[0].1.second_moment;
    let planar = second_moment_2d(&ctx.ground, 14.0, 511)?;
    let rel = (planar - radial).abs() / radial;
    out.push(Check::new("second_moment_oracle", rel < 1e-4, format!("radial {radial:.8}, planar {planar:.8}, rel {rel:.1e}")));
    Ok(())
}

fn functional_checks(cfg: &RunConfig, ctx: &Context, params: &ProblemParams, out: &mut Vec<Check>) -> Result<()> {
    let (profile, consts) = ctx.at(params.q).expect("target exponent in context");
    let tau = crate::scalar_field::tau_q(params.a, consts)?;
    let grid = Grid2D::centered([params.b1 * params.ring, 0.0], cfg.l / tau, 2 * cfg.nx + 1)?;
    let w = rescaled_soliton_with_tau(profile, tau, [params.b1 * params.ring, 0.0], grid)?;
    let (t, e) = vzero_scaled_max(&w, params.a, params.q, Stencil::Fourth);
    let lower = c_tilde(params.q, tau);
    let rel = (e - lower).abs() / lower;
    out.push(Check::new("vzero_scaled_max", rel < 1e-5 && (t - 1.0).abs() < 1e-4, format!("t* = {t:.8}, rel {rel:.2e}")));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = Grid2D::centered([params.b1 * params.ring, 0.0], 3.0, 128)?;
    let f = Functional::new(params).with_stencil(Stencil::Fourth);
    let (mut grad_err, mut aug_err, mut id_err, mut variant_err) = (0.0_f64, 0.0_f64, 0.0_f64, f64::INFINITY);
    for _ in 0..10 {
        let u = random_smooth_field(&mut rng, g, 3);
        let v = random_smooth_field(&mut rng, g, 2);
        grad_err = grad_err.max(tangent_gradient_fd_error(&f, &u, &v));
        let fd = richardson_derivative(|s| f.augmented_energy(&u, s), 1e-3);
        let pq = f.pohozaev_q(&u);
        aug_err = aug_err.max((fd - pq).abs() / pq.abs().max(f.grad_sq(&u) * 1e-3));
        let (lhs, rhs) = f.dilation_identity(&u);
        id_err = id_err.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
        variant_err = variant_err.min((f.dilation_identity_variant_lhs(&u) - rhs).abs() / rhs.abs());
    }
    out.push(Check::new("tangent_gradient_fd", grad_err < 1e-6, format!("max rel {grad_err:.2e}")));
    out.push(Check::new("augmented_energy_derivative", aug_err < 1e-5, format!("max rel {aug_err:.2e}")));
    out.push(Check::new("dilation_identity", id_err < 1e-10, format!("max rel {id_err:.2e}")));
    out.push(Check::new(
        "dilation_identity_variant_misprint",
        variant_err > 1e-6,
        format!("coefficient-1 variant misses by at least {variant_err:.2e} relative"),
    ));

    let dump = {
        let mut buf = Vec::new();
        w.write_dump(&mut buf)?;
        let back = Field2D::read_dump(&buf[..])?;
        back == w && back.values.iter().zip(&w.values).all(|(a, b)| a.to_bits() == b.to_bits())
    };
    out.push(Check::new("field_dump_round_trip", dump, "bit-exact".into()));
    let cfg_ok = parse_config(&cfg.serialize()).map(|c| c == *cfg).unwrap_or(false);
    out.push(Check::new("config_round_trip", cfg_ok, String::new()));
    Ok(())
}

fn path_checks(ctx: &Context, params: &ProblemParams, out: &mut Vec<Check>) -> Result<()> {
    let (profile, consts) = ctx.at(params.q).expect("target exponent in context");
    let phi = compact_bump(0.5, 127)?;
    let path = build_path(params, &phi, profile, consts, [params.b1 * params.ring, 0.0], PathOptions::default())?;
    let m = path_max(&path)?;
    let ends = m.endpoint_energies.0 < m.e_max && m.endpoint_energies.1 < m.e_max;
    out.push(Check::new(
        "path_endpoints_below_max",
        ends,
        format!("ends ({:.4e}, {:.4e}), max {:.6e}", m.endpoint_energies.0, m.endpoint_energies.1, m.e_max),
    ));
    out.push(Check::new("path_max_on_g3", m.segment == Segment::G3, format!("segment {}", m.segment.name())));
    let bound = 1.5 * m.scaled_bounds.0.max(m.scaled_bounds.1);
    let bracket_ok = m.scaled_gap >= -1e-3 * path.tau.powi(4) && m.scaled_gap <= bound;
    out.push(Check::new("path_energy_bracket", bracket_ok, format!("tau^2 gap {:.6e} <= {bound:.6e}", m.scaled_gap)));
    let h = path.w.grid.max_spacing();
    let t_ok = (m.t_q - 1.0).abs() <= path.tau.powf(-1.5) + 10.0 * h;
    out.push(Check::new("path_maximizer_near_one", t_ok, format!("|t_q - 1| = {:.3e}", (m.t_q - 1.0).abs())));
    Ok(())
}

fn acceptance_detail(r: &SolveReport, lambda1: f64) -> (bool, String) {
    let positive = r.u.values.iter().all(|v| *v > 0.0);
    let ok = r.residual_inf < 1e-8 && r.mass_err < 1e-10 && r.pohozaev_res < 1e-4 && positive && r.mu < lambda1;
    let detail = format!(
        "residual {:.2e}, mass err {:.1e}, |Q|/K {:.2e}, positive {positive}, mu {:.4e} < lambda1 {lambda1:.4}",
        r.residual_inf, r.mass_err, r.pohozaev_res, r.mu
    );
    (ok, detail)
}

fn solver_checks(cfg: &RunConfig, ctx: &Context, params: &ProblemParams, out: &mut Vec<Check>) -> Result<()> {
    let (profile, consts) = ctx.at(params.q).expect("target exponent in context");
    let scfg = cfg.solve_config(params);
    let r = solve(&scfg, params, profile, consts)?;
    let lambda1 = lowest_eigenvalue(params, 4.0, 127, 1e-8)?.value;
    let (ok, detail) = acceptance_detail(&r, lambda1);
    out.push(Check::new("solve_accepted", ok, detail));
    out.push(Check::new("energy_bracket", r.bracket.is_inside(), format!("tau^2 gap {:.6e}: {}", r.gap * r.tau * r.tau, r.bracket)));

    let f = Functional::new(params).with_stencil(scfg.stencil);
    let (lhs, _) = f.dilation_identity(&r.u);
    let qe = params.q * r.energy.total;
    let id_rel = (lhs - qe).abs() / r.grad_sq;
    out.push(Check::new("dilation_identity_at_solution", id_rel < scfg.tol_pohozaev, format!("|lhs - qE| / K = {id_rel:.2e}")));

    let mirrored = SolveConfig { seed_x0: [-scfg.seed_x0[0], scfg.seed_x0[1]], ..scfg.clone() };
    let rm = solve(&mirrored, params, profile, consts)?.u.reflect_x1();
    let scale = r.u.max_abs();
    let diff = rm.values.iter().zip(&r.u.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    let grids = (rm.grid.origin[0] - r.u.grid.origin[0]).abs() <= 1e-12 * r.u.grid.origin[0].abs().max(1.0);
    out.push(Check::new("reflection_equivariance", grids && diff < 1e-6, format!("max rel diff {diff:.2e}")));

    let fine = SolveConfig { n: 2 * scfg.n + 1, ..scfg.clone() };
    let rf = solve(&fine, params, profile, consts)?;
    let change = (rf.energy.total - r.energy.total).abs() / r.energy.total.abs();
    out.push(Check::new("grid_refinement", change < 0.01, format!("relative energy change {change:.2e}")));
    Ok(())
}

fn sweep_checks(cfg: &RunConfig, ctx: &Context, out: &mut Vec<Check>) -> Result<Vec<BlowupRecord>> {
    let points: Vec<SweepPoint> = cfg
        .q_schedule
        .iter()
        .map(|q| {
            let (profile, consts) = ctx.at(*q).expect("schedule exponent in context").clone();
            SweepPoint { profile, consts }
        })
        .collect();
    let params = cfg.params_at(cfg.q_schedule[0], ctx.a_star())?;
    let reports = continuation_sweep(&cfg.solve_config(&params), &params, &points)?;
    let rows = reports
        .iter()
        .map(|r| blowup_rescale(r, &ctx.ground, &params.with_q(r.q)?))
        .collect::<Result<Vec<_>>>()?;
    let near: Vec<f64> = rows.iter().map(|r| r.dist_to_z / r.h).collect();
    out.push(Check::new("concentration_near_z", near.iter().all(|d| *d <= 3.0), format!("dist/h {}", fmt_list(&near))));
    let last = rows.last().unwrap();
    out.push(Check::new("grad_ratio_near_one", (last.grad_ratio - 1.0).abs() < 0.1, format!("{:.8}", last.grad_ratio)));
    out.push(Check::new("beta_hat_near_one", (last.beta_hat - 1.0).abs() < 0.1, format!("{:.6}", last.beta_hat)));
    let prof: Vec<f64> = rows.iter().map(|r| r.profile_err_l2).collect();
    out.push(Check::new("profile_err_terminal", last.profile_err_l2 < 0.15, fmt_list(&prof)));
    let mu: Vec<f64> = rows.iter().map(|r| r.mu_scaled).collect();
    out.push(Check::new("mu_scaled_negative", mu.iter().all(|m| *m < 0.0), fmt_list(&mu)));
    let inside = rows.iter().all(|r| r.bracket.is_inside());
    out.push(Check::new("sweep_energy_bracket", inside, rows.iter().map(|r| r.bracket.as_str()).collect::<Vec<_>>().join(" ")));
    if rows.len() >= 3 {
        let table = convergence_table(rows.clone())?;
        for t in &table.trends {
            out.push(Check::new(&format!("trend_{}", t.column), t.ok, t.detail.clone()));
        }
        out.push(Check::new(
            "gradient_sandwich",
            table.c1 > 0.0 && table.c2 > 0.0,
            format!("C1 = {:.6}, C2 = {:.3e}", table.c1, table.c2),
        ));
    }
    Ok(rows)
}

/// Runs every check; `artifacts` is a directory whose manifests are re-verified.
pub fn run_checks(cfg: &RunConfig, artifacts: Option<&Path>) -> Result<Vec<Check>> {
    let mut exps: Vec<f64> = TREND_EXPONENTS.to_vec();
    exps.push(cfg.q);
    exps.extend(&cfg.q_schedule);
    exps.sort_by(|a, b| b.total_cmp(a));
    exps.dedup();
    let ctx = Context::build(&exps)?;
    let params = cfg.params(ctx.a_star())?;
    let mut out = Vec::new();
    soliton_checks(&ctx, &mut out)?;
    functional_checks(cfg, &ctx, &params, &mut out)?;
    path_checks(&ctx, &params, &mut out)?;
    solver_checks(cfg, &ctx, &params, &mut out)?;
    sweep_checks(cfg, &ctx, &mut out)?;
    let rerun = path_samples_csv(&ctx, &params)? == path_samples_csv(&ctx, &params)?;
    out.push(Check::new("deterministic_output", rerun, "path CSV identical across runs".into()));
    if let Some(dir) = artifacts.filter(|d| d.is_dir()) {
        let mut problems = Vec::new();
        let manifests = manifests_in(dir)?;
        for m in &manifests {
            problems.extend(check_manifest(m)?);
        }
        out.push(Check::new(
            "manifests",
            problems.is_empty(),
            if problems.is_empty() { format!("{} manifests verified", manifests.len()) } else { problems.join("; ") },
        ));
    }
    Ok(out)
}

fn path_samples_csv(ctx: &Context, params: &ProblemParams) -> Result<String> {
    let (profile, consts) = ctx.at(params.q).expect("target exponent in context");
    let phi = compact_bump(0.5, 127)?;
    let path = build_path(params, &phi, profile, consts, [params.b1 * params.ring, 0.0], PathOptions::default())?;
    let m = path_max(&path)?;
    Ok(m.samples.iter().map(|s| format!("{:.16e},{:.16e}\n", s.t, s.energy)).collect())
}
