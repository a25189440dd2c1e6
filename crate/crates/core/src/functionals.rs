//! Energy, Euler-Lagrange residual, Pohozaev functionals and the
//! Gagliardo-Nirenberg ratio on the discrete grid.
//!
//! All quantities share one quadrature: midpoint weights and the quadratic form
//! of the chosen Laplacian stencil for `int |grad u|^2`.

use crate::error::{Error, Result};
use crate::field::{neg_laplacian_into, EllipseMetric, Field2D, Grid2D, Point, ProblemParams, Stencil};
use crate::linalg::{pcg, DirichletSolver};
use crate::scalar_field::SolitonConstants;

/// Trap potential: absent, or the ellipse ring `(|x|_b - A)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Zero,
    Ellipse { metric: EllipseMetric, ring: f64 },
}

impl Potential {
    pub fn ellipse(params: &ProblemParams) -> Self {
        Potential::Ellipse { metric: params.metric(), ring: params.ring }
    }

    #[inline]
    pub fn value(&self, p: Point) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Ellipse { metric, ring } => {
                let d = metric.norm(p) - ring;
                d * d
            }
        }
    }

    /// `x . grad V(x)`, evaluated analytically as `2 |x|_b (|x|_b - A)`.
    #[inline]
    pub fn virial(&self, p: Point) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Ellipse { metric, ring } => {
                let n = metric.norm(p);
                2.0 * n * (n - ring)
            }
        }
    }

    #[inline]
    pub fn gradient(&self, p: Point) -> Point {
        match self {
            Potential::Zero => [0.0, 0.0],
            Potential::Ellipse { metric, ring } => {
                let d = 2.0 * (metric.norm(p) - ring);
                let g = metric.norm_gradient(p);
                [d * g[0], d * g[1]]
            }
        }
    }

    /// Hessian `[d11, d12, d22]`.
    pub fn hessian(&self, p: Point) -> [f64; 3] {
        match self {
            Potential::Zero => [0.0; 3],
            Potential::Ellipse { metric, ring } => {
                let n = metric.norm(p);
                let g = metric.norm_gradient(p);
                let h = metric.norm_hessian(p);
                let d = 2.0 * (n - ring);
                [2.0 * g[0] * g[0] + d * h[0], 2.0 * g[0] * g[1] + d * h[1], 2.0 * g[1] * g[1] + d * h[2]]
            }
        }
    }

    /// `V` sampled at the nodes of `grid`.
    pub fn sample(&self, grid: Grid2D) -> Field2D {
        Field2D::from_fn(grid, |p| self.value(p))
    }
}

/// `kinetic - interaction + potential` split of the energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, potential: f64, interaction: f64) -> Self {
        Self { kinetic, potential, interaction, total: kinetic + potential - interaction }
    }
}

/// The energy functional for a given potential, interaction `a`, exponent `q`
/// and Laplacian stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functional {
    pub potential: Potential,
    pub a: f64,
    pub q: f64,
    pub stencil: Stencil,
}

impl Functional {
    pub fn new(params: &ProblemParams) -> Self {
        Self { potential: Potential::ellipse(params), a: params.a, q: params.q, stencil: Stencil::Second }
    }

    /// The same functional with `V = 0`.
    pub fn free(a: f64, q: f64) -> Self {
        Self { potential: Potential::Zero, a, q, stencil: Stencil::Second }
    }

    pub fn with_stencil(self, stencil: Stencil) -> Self {
        Self { stencil, ..self }
    }

    pub fn with_potential(self, potential: Potential) -> Self {
        Self { potential, ..self }
    }

    pub fn grad_sq(&self, u: &Field2D) -> f64 {
        u.grad_norm_sq_with(self.stencil)
    }

    pub fn power(&self, u: &Field2D) -> f64 {
        crate::field::lp_power(u, self.q + 2.0)
    }

    pub fn potential_mass(&self, u: &Field2D) -> f64 {
        match self.potential {
            Potential::Zero => 0.0,
            pot => u.weighted_mass(|p| pot.value(p)),
        }
    }

    pub fn virial_mass(&self, u: &Field2D) -> f64 {
        match self.potential {
            Potential::Zero => 0.0,
            pot => u.weighted_mass(|p| pot.virial(p)),
        }
    }

    pub fn energy(&self, u: &Field2D) -> EnergyBreakdown {
        EnergyBreakdown::new(
            0.5 * self.grad_sq(u),
            0.5 * self.potential_mass(u),
            self.a / (self.q + 2.0) * self.power(u),
        )
    }

    /// `g = -Laplacian u + V u - a |u|^q u`, the unconstrained gradient.
    pub fn gradient(&self, u: &Field2D) -> Field2D {
        let mut g = u.neg_laplacian(self.stencil);
        let grid = u.grid;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let k = grid.index(i, j);
                let v = u.values[k];
                g.values[k] += self.potential.value(grid.node(i, j)) * v - self.a * v.abs().powf(self.q) * v;
            }
        }
        g
    }

    /// `-Laplacian u + V u - a |u|^q u - mu u`.
    pub fn euler_lagrange_residual(&self, u: &Field2D, mu: f64) -> Field2D {
        let mut g = self.gradient(u);
        g.values.iter_mut().zip(&u.values).for_each(|(r, v)| *r -= mu * v);
        g
    }

    /// Projection of the gradient onto the tangent space of the mass sphere at `u`.
    pub fn tangent_gradient(&self, u: &Field2D) -> Field2D {
        let mut g = self.gradient(u);
        let m = u.mass();
        if m > 0.0 {
            let c = g.dot(u) / m;
            g.values.iter_mut().zip(&u.values).for_each(|(r, v)| *r -= c * v);
        }
        g
    }

    /// The multiplier `<g, u> / <u, u>` (Rayleigh quotient of the nonlinear operator).
    pub fn multiplier(&self, u: &Field2D) -> f64 {
        self.gradient(u).dot(u) / u.mass()
    }

    /// `int |grad u|^2 - (1/2) int x.grad V u^2 - q a/(q+2) int |u|^{q+2}`.
    pub fn pohozaev_q(&self, u: &Field2D) -> f64 {
        self.grad_sq(u) - 0.5 * self.virial_mass(u) - self.q * self.a / (self.q + 2.0) * self.power(u)
    }

    /// The trap-free Pohozaev functional.
    pub fn pohozaev_qtilde(&self, u: &Field2D) -> f64 {
        self.grad_sq(u) - self.q * self.a / (self.q + 2.0) * self.power(u)
    }

    /// Both sides of `(q-2)/2 K + 1/2 int [q V + x.grad V] u^2 = q E - Q`.
    pub fn dilation_identity(&self, u: &Field2D) -> (f64, f64) {
        let q = self.q;
        let k = self.grad_sq(u);
        let weighted = match self.potential {
            Potential::Zero => 0.0,
            pot => u.weighted_mass(|p| q * pot.value(p) + pot.virial(p)),
        };
        let lhs = 0.5 * (q - 2.0) * k + 0.5 * weighted;
        let rhs = q * self.energy(u).total - self.pohozaev_q(u);
        (lhs, rhs)
    }

    /// Left side with coefficient 1 on `|x|_b (|x|_b - A)`, as printed in two
    /// later displays; it differs from the identity by `1/4 int x.grad V u^2`.
    pub fn dilation_identity_variant_lhs(&self, u: &Field2D) -> f64 {
        let q = self.q;
        let weighted = match self.potential {
            Potential::Zero => 0.0,
            pot => u.weighted_mass(|p| q * pot.value(p) + 0.5 * pot.virial(p)),
        };
        0.5 * (q - 2.0) * self.grad_sq(u) + 0.5 * weighted
    }

    /// Energy of `e^s u(e^s x)` from the closed form, without resampling.
    pub fn augmented_energy(&self, u: &Field2D, s: f64) -> f64 {
        let es = s.exp();
        let pot = match self.potential {
            Potential::Zero => 0.0,
            pot => u.weighted_mass(|p| pot.value([p[0] / es, p[1] / es])),
        };
        0.5 * (2.0 * s).exp() * self.grad_sq(u) + 0.5 * pot
            - self.a / (self.q + 2.0) * (s * self.q).exp() * self.power(u)
    }

    /// Gagliardo-Nirenberg ratio `int |u|^{q+2} / [(q+2)/(2 a_q*) K^{q/2} M]`.
    pub fn gn_ratio(&self, u: &Field2D, consts: &SolitonConstants) -> f64 {
        let q = consts.q;
        let k = self.grad_sq(u);
        let m = u.mass();
        crate::field::lp_power(u, q + 2.0) / ((q + 2.0) / (2.0 * consts.a_q_star) * k.powf(q / 2.0) * m)
    }
}

pub fn energy(u: &Field2D, params: &ProblemParams) -> EnergyBreakdown {
    Functional::new(params).energy(u)
}

pub fn euler_lagrange_residual(u: &Field2D, mu: f64, params: &ProblemParams) -> Field2D {
    Functional::new(params).euler_lagrange_residual(u, mu)
}

pub fn tangent_gradient(u: &Field2D, params: &ProblemParams) -> Field2D {
    Functional::new(params).tangent_gradient(u)
}

pub fn pohozaev_q(u: &Field2D, params: &ProblemParams) -> f64 {
    Functional::new(params).pohozaev_q(u)
}

pub fn pohozaev_qtilde(u: &Field2D, a: f64, q: f64) -> f64 {
    Functional::free(a, q).pohozaev_qtilde(u)
}

pub fn gn_check(u: &Field2D, consts: &SolitonConstants) -> f64 {
    Functional::free(1.0, consts.q).gn_ratio(u, consts)
}

pub fn dilation_identity(u: &Field2D, params: &ProblemParams) -> (f64, f64) {
    Functional::new(params).dilation_identity(u)
}

pub fn augmented_energy(u: &Field2D, s: f64, params: &ProblemParams) -> f64 {
    Functional::new(params).augmented_energy(u, s)
}

/// Unique positive `t` with `Qtilde(t u(t .)) = 0`, i.e. `t^{q-2} = K / (q a/(q+2) P)`.
pub fn qtilde_root(u: &Field2D, a: f64, q: f64, stencil: Stencil) -> Option<f64> {
    let k = u.grad_norm_sq_with(stencil);
    let p = crate::field::lp_power(u, q + 2.0);
    if !(k > 0.0 && p > 0.0) {
        return None;
    }
    Some((k / (q * a / (q + 2.0) * p)).powf(1.0 / (q - 2.0)))
}

/// Result of [`lowest_eigenvalue`].
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Field2D,
    pub iterations: usize,
}

/// Smallest eigenvalue of `-Laplacian + V` (5-point stencil) on the box
/// `[-(b1 A + margin), b1 A + margin]^2` with `n x n` nodes, by inverse
/// iteration with spectrally preconditioned CG inner solves.
pub fn lowest_eigenvalue(params: &ProblemParams, margin: f64, n: usize, tol: f64) -> Result<Eigenpair> {
    let half = params.b1 * params.ring + margin;
    let grid = Grid2D::centered([0.0, 0.0], half, n)?;
    let pot = Potential::ellipse(params).sample(grid);
    let solver = DirichletSolver::new(&grid, Stencil::Second);
    let shift = 1.0;
    let op = |x: &[f64], y: &mut [f64]| {
        neg_laplacian_into(&grid, x, Stencil::Second, y);
        for k in 0..x.len() {
            y[k] += pot.values[k] * x[k];
        }
    };
    let metric = params.metric();
    let mut x = Field2D::from_fn(grid, |p| (-(metric.norm(p) - params.ring).powi(2)).exp());
    x.normalize();
    let mut hx = vec![0.0; grid.len()];
    op(&x.values, &mut hx);
    let mut lambda = x.dot(&x.with_values(hx.clone()));
    for it in 1..=1000 {
        let mut y = x.values.clone();
        pcg(op, |r, z| solver.solve(r, shift, z), &x.values, &mut y, 1e-12, 2000)?;
        let mut next = x.with_values(y);
        next.normalize();
        op(&next.values, &mut hx);
        let rq = next.dot(&next.with_values(hx.clone()));
        let res: f64 = hx
            .iter()
            .zip(&next.values)
            .map(|(a, b)| (a - rq * b).powi(2))
            .sum::<f64>()
            .sqrt()
            * grid.cell_area().sqrt();
        let change = (rq - lambda).abs();
        x = next;
        lambda = rq;
        if change < tol * lambda.abs().max(1.0) && res < tol.sqrt() {
            return Ok(Eigenpair { value: lambda, vector: x, iterations: it });
        }
    }
    Err(Error::NoConvergence { what: "inverse iteration", iterations: 1000, residual: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProblemParams {
        ProblemParams::new(5.85, 2.5, 1.2, 1.0, 1.0).unwrap()
    }

    fn bump(grid: Grid2D) -> Field2D {
        let mut u = Field2D::from_fn(grid, |p| {
            (-((p[0] - 1.0).powi(2) + 2.0 * (p[1] - 0.2).powi(2))).exp() * (1.0 + 0.3 * p[0])
        });
        u.normalize();
        u
    }

    #[test]
    fn zero_field_has_zero_functionals() {
        let g = Grid2D::centered([0.0, 0.0], 3.0, 32).unwrap();
        let u = Field2D::zeros(g);
        let f = Functional::new(&params());
        assert_eq!(f.energy(&u), EnergyBreakdown::default());
        assert_eq!(f.pohozaev_q(&u), 0.0);
        assert_eq!(f.pohozaev_qtilde(&u), 0.0);
        assert_eq!(f.dilation_identity(&u), (0.0, 0.0));
        assert!(f.euler_lagrange_residual(&u, -3.0).max_abs() == 0.0);
    }

    #[test]
    fn potential_derivatives_match_differences() {
        let pot = Potential::ellipse(&params());
        let p = [0.7, -0.4];
        let h = 1e-6;
        let g = pot.gradient(p);
        let fd0 = (pot.value([p[0] + h, p[1]]) - pot.value([p[0] - h, p[1]])) / (2.0 * h);
        let fd1 = (pot.value([p[0], p[1] + h]) - pot.value([p[0], p[1] - h])) / (2.0 * h);
        assert!((g[0] - fd0).abs() < 1e-8 && (g[1] - fd1).abs() < 1e-8);
        assert!((pot.virial(p) - (p[0] * g[0] + p[1] * g[1])).abs() < 1e-12);
        let hs = pot.hessian(p);
        let gp = pot.gradient([p[0] + h, p[1]]);
        let gm = pot.gradient([p[0] - h, p[1]]);
        assert!(((gp[0] - gm[0]) / (2.0 * h) - hs[0]).abs() < 1e-6);
        assert!(((gp[1] - gm[1]) / (2.0 * h) - hs[1]).abs() < 1e-6);
    }

    #[test]
    fn tangent_gradient_is_orthogonal() {
        let g = Grid2D::centered([0.5, 0.0], 4.0, 64).unwrap();
        let u = bump(g);
        let t = tangent_gradient(&u, &params());
        assert!(t.dot(&u).abs() < 1e-13 * t.l2_norm());
    }

    #[test]
    fn identity_closes_on_shared_quadrature() {
        let g = Grid2D::centered([0.5, 0.0], 4.0, 64).unwrap();
        let u = bump(g).scaled(1.7);
        let (l, r) = dilation_identity(&u, &params());
        assert!((l - r).abs() < 1e-12 * (l.abs() + 1.0), "{l} {r}");
    }

    #[test]
    fn augmented_energy_matches_energy_and_pohozaev() {
        let g = Grid2D::centered([0.5, 0.0], 4.0, 64).unwrap();
        let u = bump(g);
        let f = Functional::new(&params());
        assert!((f.augmented_energy(&u, 0.0) - f.energy(&u).total).abs() < 1e-14);
        let h = 1e-4;
        let d = (f.augmented_energy(&u, h) - f.augmented_energy(&u, -h)) / (2.0 * h);
        let q = f.pohozaev_q(&u);
        assert!((d - q).abs() < 1e-6 * q.abs().max(1.0), "{d} {q}");
    }

    #[test]
    fn qtilde_root_is_unique_scaling_zero() {
        let g = Grid2D::centered([0.0, 0.0], 4.0, 64).unwrap();
        let u = bump(g);
        let (a, q) = (5.85, 2.5);
        let t = qtilde_root(&u, a, q, Stencil::Second).unwrap();
        let ut = Field2D { grid: g.dilated(t, [0.0, 0.0]), values: u.values.iter().map(|v| t * v).collect() };
        assert!(pohozaev_qtilde(&ut, a, q).abs() < 1e-10 * ut.grad_norm_sq_with(Stencil::Second));
    }

    #[test]
    fn lowest_eigenvalue_of_harmonic_trap() {
        // For b1 = b2 and A -> 0 the trap tends to |x|^2, whose ground level is 2.
        let p = ProblemParams::new(1.0, 2.5, 1.0 + 1e-12, 1.0, 1e-9).unwrap();
        let e = lowest_eigenvalue(&p, 6.0, 127, 1e-10).unwrap();
        assert!((e.value - 2.0).abs() < 5e-3, "{}", e.value);
    }
}
