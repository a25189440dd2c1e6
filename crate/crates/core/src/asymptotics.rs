//! Blow-up analysis of converged solutions: concentration points, rescaled
//! profiles against the ground state `Q`, and trend tables across exponents.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D, Point, ProblemParams};
use crate::functionals::qtilde_root;
use crate::scalar_field::{RadialProfile, SolitonConstants};
use crate::scaling::golden_max;
use crate::solver::SolveReport;

/// Position of the solution energy relative to the two candidate upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketVerdict {
    Below,
    /// Within the bound with constant `int |x|^2 Q^2 / (2 b1^2 ||Q||^2)`.
    InsideProof,
    /// Within the bound with constant `int |x|^2 Q^2 / (2 ||Q||^2)` only.
    InsideStmt,
    Above,
}

impl BracketVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            BracketVerdict::Below => "below",
            BracketVerdict::InsideProof => "inside_proof",
            BracketVerdict::InsideStmt => "inside_stmt",
            BracketVerdict::Above => "above",
        }
    }

    pub fn is_inside(self) -> bool {
        matches!(self, BracketVerdict::InsideProof | BracketVerdict::InsideStmt)
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "below" => BracketVerdict::Below,
            "inside_proof" => BracketVerdict::InsideProof,
            "inside_stmt" => BracketVerdict::InsideStmt,
            "above" => BracketVerdict::Above,
            _ => return None,
        })
    }
}

impl fmt::Display for BracketVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies `gap = E - (q-2)/(2q) tau^2`. The lower bound tolerates a slack of
/// one percent of the second moment on the `tau^{-2}` scale.
pub fn bracket_verdict(gap: f64, tau: f64, consts: &SolitonConstants, b1: f64) -> BracketVerdict {
    let scaled = gap * tau * tau;
    let sm = consts.second_moment;
    let (stmt, proof) = (0.5 * sm, sm / (2.0 * b1 * b1));
    if scaled < -0.01 * sm {
        BracketVerdict::Below
    } else if scaled <= proof {
        BracketVerdict::InsideProof
    } else if scaled <= stmt {
        BracketVerdict::InsideStmt
    } else {
        BracketVerdict::Above
    }
}

/// Verdict for a converged report.
pub fn energy_bracket_check(report: &SolveReport, consts: &SolitonConstants, params: &ProblemParams) -> BracketVerdict {
    bracket_verdict(report.gap, report.tau, consts, params.b1)
}

/// Argmax of `|u|` refined by a three-point parabola in each coordinate.
pub fn concentration_point(u: &Field2D) -> Result<Point> {
    let g = &u.grid;
    let at = |i: usize, j: usize| u.values[g.index(i, j)].abs();
    let mut maxima: Vec<(f64, usize, usize)> = Vec::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let v = at(i, j);
            if v == 0.0 {
                continue;
            }
            let mut is_max = true;
            'nb: for dj in -1isize..=1 {
                for di in -1isize..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as isize + di, j as isize + dj);
                    if ii < 0 || jj < 0 || ii >= g.nx as isize || jj >= g.ny as isize {
                        continue;
                    }
                    if at(ii as usize, jj as usize) > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                maxima.push((v, i, j));
            }
        }
    }
    maxima.sort_by(|a, b| b.0.total_cmp(&a.0));
    let &(peak, i, j) = maxima.first().ok_or(Error::MultiPeak { ratio: f64::NAN })?;
    let rival = maxima.iter().skip(1).find(|&&(_, si, sj)| si.abs_diff(i) > 1 || sj.abs_diff(j) > 1);
    if let Some(&(second, _, _)) = rival {
        if second * 3.0 > peak {
            return Err(Error::MultiPeak { ratio: peak / second });
        }
    }
    let fit = |m: f64, c: f64, p: f64| {
        let den = m - 2.0 * c + p;
        if den >= 0.0 {
            0.0
        } else {
            0.5 * (m - p) / den
        }
    };
    let dx = if i > 0 && i + 1 < g.nx { fit(at(i - 1, j), peak, at(i + 1, j)) } else { 0.0 };
    let dy = if j > 0 && j + 1 < g.ny { fit(at(i, j - 1), peak, at(i, j + 1)) } else { 0.0 };
    let node = g.node(i, j);
    Ok([node[0] + dx * g.hx, node[1] + dy * g.hy])
}

/// `||u(x) - beta/(eps ||Q||) Q(beta |x - xc| / eps)||_{L^2}`, which equals the
/// blow-up profile error `||eps u(eps . + xc) - beta Q(beta .)/||Q||||`, evaluated
/// on the solution grid with `Q` taken radially.
pub fn profile_error(u: &Field2D, eps: f64, xc: Point, profile_q: &RadialProfile, beta: f64) -> f64 {
    let nq = profile_q.norm2_sq().sqrt();
    let amp = beta / (eps * nq);
    let g = &u.grid;
    let mut acc = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.node(i, j);
            let r = beta * (p[0] - xc[0]).hypot(p[1] - xc[1]) / eps;
            let d = u.values[g.index(i, j)] - amp * profile_q.eval(r);
            acc += d * d;
        }
    }
    // Mass of the model profile outside the window.
    let inside: f64 = {
        let mut s = 0.0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let p = g.node(i, j);
                let r = beta * (p[0] - xc[0]).hypot(p[1] - xc[1]) / eps;
                s += (amp * profile_q.eval(r)).powi(2);
            }
        }
        s * g.cell_area()
    };
    (acc * g.cell_area() + (1.0 - inside).max(0.0)).sqrt()
}

/// `eps u(eps y + xc)` sampled by cubic convolution on an `n x n` grid of half-width `half` in `y`.
pub fn blowup_field(u: &Field2D, eps: f64, xc: Point, half: f64, n: usize) -> Result<Field2D> {
    let grid = Grid2D::centered([0.0, 0.0], half, n)?;
    Ok(Field2D::from_fn(grid, |y| eps * u.sample([xc[0] + eps * y[0], xc[1] + eps * y[1]])))
}

/// One row of the blow-up table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupRecord {
    pub q: f64,
    pub tau: f64,
    pub eps: f64,
    pub x_c: Point,
    pub profile_err_l2: f64,
    /// `tau | |x_c|_b - A |`.
    pub ring_defect: f64,
    /// `tau^{-2} ||grad u||^2`, reference-corrected.
    pub grad_ratio: f64,
    pub grad_ratio_raw: f64,
    pub grad_sq_corr: f64,
    pub mu_scaled: f64,
    pub beta_hat: f64,
    /// `(|x_c|_b - A t) / (eps t)` with `t` the root of `Qtilde(u^t) = 0`.
    pub c0: f64,
    /// `tau^2 (E - lower bound)`.
    pub scaled_gap: f64,
    pub bracket: BracketVerdict,
    /// Distance from `x_c` to the nearer point of `{(+-b1 A, 0)}`.
    pub dist_to_z: f64,
    pub h: f64,
}

pub fn blowup_rescale(report: &SolveReport, profile_q: &RadialProfile, params: &ProblemParams) -> Result<BlowupRecord> {
    let u = &report.u;
    let xc = concentration_point(u)?;
    let eps = report.eps;
    let err = profile_error(u, eps, xc, profile_q, 1.0);
    let (beta_hat, _) = golden_max(|b| -profile_error(u, eps, xc, profile_q, b), 0.5, 1.5, 1e-7);
    let metric = params.metric();
    let nb = metric.norm(xc);
    let t = qtilde_root(u, params.a, params.q, report.stencil).unwrap_or(f64::NAN);
    let z = params.concentration_set();
    let dist = z.iter().map(|p| (p[0] - xc[0]).hypot(p[1] - xc[1])).fold(f64::INFINITY, f64::min);
    let tau2 = report.tau * report.tau;
    Ok(BlowupRecord {
        q: report.q,
        tau: report.tau,
        eps,
        x_c: xc,
        profile_err_l2: err,
        ring_defect: report.tau * (nb - params.ring).abs(),
        grad_ratio: report.grad_sq_corr / tau2,
        grad_ratio_raw: report.grad_sq / tau2,
        grad_sq_corr: report.grad_sq_corr,
        mu_scaled: eps * eps * report.mu,
        beta_hat,
        c0: (nb - params.ring * t) / (eps * t),
        scaled_gap: report.gap * tau2,
        bracket: report.bracket,
        dist_to_z: dist,
        h: u.grid.max_spacing(),
    })
}

/// A monotone-trend check on one column.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendCheck {
    pub column: &'static str,
    pub ok: bool,
    pub detail: String,
}

/// Blow-up rows with fitted gradient-bound constants and trend diagnostics.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<BlowupRecord>,
    /// Largest `C1` with `C1 (q-2) tau^2 <= ||grad u||^2` at every row.
    pub c1: f64,
    /// Smallest `C2` with `||grad u||^2 <= tau^2 + C2/(q-2)` at every row.
    pub c2: f64,
    pub trends: Vec<TrendCheck>,
}

impl ConvergenceTable {
    pub fn violations(&self) -> Vec<&'static str> {
        self.trends.iter().filter(|t| !t.ok).map(|t| t.column).collect()
    }
}

fn strictly(values: &[f64], decreasing: bool) -> bool {
    values.windows(2).all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] })
}

/// Rows must be ordered by decreasing `q`.
pub fn convergence_table(rows: Vec<BlowupRecord>) -> Result<ConvergenceTable> {
    if rows.len() < 3 {
        return Err(Error::Domain(format!("a convergence table needs at least 3 rows, got {}", rows.len())));
    }
    let (c1, c2) = gradient_bound_constants(&rows);
    let col = |f: fn(&BlowupRecord) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let grad_dev = col(|r| (r.grad_ratio - 1.0).abs());
    let ring = col(|r| r.ring_defect);
    let prof = col(|r| r.profile_err_l2);
    let mu = col(|r| r.mu_scaled);
    let sep = col(|r| (r.q - 2.0) * r.tau * r.tau);
    let mu_dev = col(|r| (r.mu_scaled + 1.0).abs());
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(" -> ");
    let trends = vec![
        TrendCheck { column: "grad_ratio", ok: strictly(&grad_dev, true) || grad_dev.iter().all(|d| *d < 1e-6), detail: fmt(&grad_dev) },
        TrendCheck { column: "ring_defect", ok: strictly(&ring, true), detail: fmt(&ring) },
        TrendCheck { column: "profile_err_L2", ok: strictly(&prof, true), detail: fmt(&prof) },
        TrendCheck { column: "mu_scaled", ok: mu.iter().all(|m| *m < 0.0) && strictly(&mu_dev, true), detail: fmt(&mu) },
        TrendCheck { column: "scale_separation", ok: strictly(&sep, false), detail: fmt(&sep) },
    ];
    Ok(ConvergenceTable { rows, c1, c2, trends })
}

/// `(C1, C2)` for `C1 (q-2) tau^2 <= K <= tau^2 + C2/(q-2)`.
pub fn gradient_bound_constants(rows: &[BlowupRecord]) -> (f64, f64) {
    let c1 = rows
        .iter()
        .map(|r| r.grad_sq_corr / ((r.q - 2.0) * r.tau * r.tau))
        .fold(f64::INFINITY, f64::min);
    let c2 = rows
        .iter()
        .map(|r| (r.q - 2.0) * (r.grad_sq_corr - r.tau * r.tau).abs())
        .fold(0.0_f64, f64::max);
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_field::{rescaled_soliton_with_tau, shoot_soliton};

    fn q_profile() -> RadialProfile {
        shoot_soliton(2.0, 1e-15).unwrap()
    }

    #[test]
    fn concentration_point_of_sampled_ground_state() {
        let pq = q_profile();
        let p = [0.3137, -0.2221];
        let g = Grid2D::centered([0.3, -0.2], 8.0, 127).unwrap();
        let u = rescaled_soliton_with_tau(&pq, 1.0, p, g).unwrap();
        let c = concentration_point(&u).unwrap();
        let h = g.hx;
        assert!((c[0] - p[0]).abs() < h * h && (c[1] - p[1]).abs() < h * h, "{c:?}");
        let shifted = Field2D { grid: g.translated([1.0, 2.0]), values: u.values.clone() };
        let cs = concentration_point(&shifted).unwrap();
        assert!((cs[0] - c[0] - 1.0).abs() < 1e-12 && (cs[1] - c[1] - 2.0).abs() < 1e-12);
        let r = concentration_point(&u.reflect_x1()).unwrap();
        assert!((r[0] + c[0]).abs() < 1e-12 && (r[1] - c[1]).abs() < 1e-12);
    }

    #[test]
    fn two_equal_bumps_are_rejected() {
        let g = Grid2D::centered([0.0, 0.0], 5.0, 64).unwrap();
        let u = Field2D::from_fn(g, |p| (-(p[0] - 2.0).powi(2) - p[1] * p[1]).exp() + (-(p[0] + 2.0).powi(2) - p[1] * p[1]).exp());
        assert!(matches!(concentration_point(&u), Err(Error::MultiPeak { .. })));
    }

    #[test]
    fn exact_soliton_has_small_profile_error_and_unit_blowup_mass() {
        let pq = q_profile();
        let tau = 37.0;
        let x0 = [1.2, 0.0];
        let g = Grid2D::centered(x0, 11.0 / tau, 255).unwrap();
        let u = rescaled_soliton_with_tau(&pq, tau, x0, g).unwrap();
        let eps = 1.0 / u.grad_norm_sq_with(crate::field::Stencil::Fourth).sqrt();
        let err = profile_error(&u, eps, x0, &pq, 1.0);
        assert!(err < 1e-3, "{err}");
        let b = blowup_field(&u, eps, x0, 10.0, 255).unwrap();
        assert!((b.mass() - 1.0).abs() < 1e-3, "{}", b.mass());
    }

    #[test]
    fn verdicts_follow_both_constants() {
        let c = SolitonConstants {
            q: 2.2,
            u0: 2.0,
            norm2_sq: 11.0,
            a_q_star: 14.0,
            a_star: 11.7,
            grad_sq: 11.0,
            pot_q2: 20.0,
            second_moment: 2.0,
            pohozaev_res: 0.0,
        };
        let tau = 10.0;
        assert_eq!(bracket_verdict(-1.0, tau, &c, 1.2), BracketVerdict::Below);
        assert_eq!(bracket_verdict(0.5 / 100.0, tau, &c, 1.2), BracketVerdict::InsideProof);
        assert_eq!(bracket_verdict(0.9 / 100.0, tau, &c, 1.2), BracketVerdict::InsideStmt);
        assert_eq!(bracket_verdict(1.1 / 100.0, tau, &c, 1.2), BracketVerdict::Above);
        assert_eq!(BracketVerdict::parse("inside_stmt"), Some(BracketVerdict::InsideStmt));
    }
}
