//! Uniform 2D grids, real fields on them, quadrature and finite-difference operators.
//!
//! A [`Grid2D`] stores interior nodes only. Node `(i, j)` sits at
//! `origin + (i * hx, j * hy)` and the homogeneous Dirichlet boundary lies one
//! spacing outside the stored block, so the computational box is
//! `[x0 - hx, x0 + nx * hx] x [y0 - hy, y0 + ny * hy]`.
//! Values are stored row-major: index `j * nx + i`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Smallest admissible node count per axis.
pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub origin: Point,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, origin: Point) -> Result<Self> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::Domain(format!(
                "grid needs at least {MIN_NODES} nodes per axis, got {nx}x{ny}"
            )));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(Error::Domain(format!("grid spacings must be positive, got ({hx}, {hy})")));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::Domain("grid origin must be finite".into()));
        }
        Ok(Self { nx, ny, hx, hy, origin })
    }

    /// Square grid with `n x n` interior nodes whose Dirichlet box is
    /// `center +- half_width` in both directions. Node `(n-1)/2` lands on the
    /// center when `n` is odd.
    pub fn centered(center: Point, half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        let h = 2.0 * half_width / (n as f64 + 1.0);
        Self::new(n, n, h, h, [center[0] - half_width + h, center[1] - half_width + h])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        [self.origin[0] + i as f64 * self.hx, self.origin[1] + j as f64 * self.hy]
    }

    /// Quadrature weight of every node.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn center(&self) -> Point {
        [
            self.origin[0] + 0.5 * (self.nx as f64 - 1.0) * self.hx,
            self.origin[1] + 0.5 * (self.ny as f64 - 1.0) * self.hy,
        ]
    }

    /// Lower-left and upper-right corners of the Dirichlet box.
    pub fn bounds(&self) -> (Point, Point) {
        (
            [self.origin[0] - self.hx, self.origin[1] - self.hy],
            [
                self.origin[0] + self.nx as f64 * self.hx,
                self.origin[1] + self.ny as f64 * self.hy,
            ],
        )
    }

    pub fn max_spacing(&self) -> f64 {
        self.hx.max(self.hy)
    }

    /// The grid seen through `x -> anchor + (x - anchor) / t`.
    pub fn dilated(&self, t: f64, anchor: Point) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            hx: self.hx / t,
            hy: self.hy / t,
            origin: [
                anchor[0] + (self.origin[0] - anchor[0]) / t,
                anchor[1] + (self.origin[1] - anchor[1]) / t,
            ],
        }
    }

    pub fn translated(&self, shift: Point) -> Self {
        Self { origin: [self.origin[0] + shift[0], self.origin[1] + shift[1]], ..*self }
    }

    /// Whether two Dirichlet boxes intersect.
    pub fn overlaps(&self, other: &Grid2D) -> bool {
        let (a0, a1) = self.bounds();
        let (b0, b1) = other.bounds();
        a0[0] < b1[0] && b0[0] < a1[0] && a0[1] < b1[1] && b0[1] < a1[1]
    }
}

/// Finite-difference stencil for the Laplacian.
///
/// `Second` is the 5-point stencil. `Fourth` is the fourth-order 9-point
/// cross; near the box it uses the odd reflection `u[-2] = -u[0]` about the
/// zero boundary node, which keeps it symmetric and diagonal in the sine basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

impl Stencil {
    /// Coefficients of the 1D `-d^2/dx^2` stencil times `h^2`: centre, then offsets 1 and 2.
    fn coefficients(self) -> [f64; 3] {
        match self {
            Stencil::Second => [2.0, -1.0, 0.0],
            Stencil::Fourth => [2.5, -4.0 / 3.0, 1.0 / 12.0],
        }
    }

    /// Eigenvalue of the 1D `-d^2/dx^2` stencil on the sine mode with angle `theta`.
    pub fn symbol(self, theta: f64, h: f64) -> f64 {
        let [c0, c1, c2] = self.coefficients();
        (c0 + 2.0 * c1 * theta.cos() + 2.0 * c2 * (2.0 * theta).cos()) / (h * h)
    }

    pub fn name(self) -> &'static str {
        match self {
            Stencil::Second => "second",
            Stencil::Fourth => "fourth",
        }
    }
}

#[inline]
fn ext(v: &[f64], base: usize, stride: usize, n: usize, k: isize) -> f64 {
    // Odd-periodic extension with period 2(n+1): zero at k = -1 and k = n.
    if k >= 0 && (k as usize) < n {
        v[base + k as usize * stride]
    } else if k == -1 || k == n as isize {
        0.0
    } else if k < -1 {
        -v[base + (-2 - k) as usize * stride]
    } else {
        -v[base + (2 * n as isize - k) as usize * stride]
    }
}

/// `out = -Laplacian(u)` with the chosen stencil and homogeneous Dirichlet data.
pub fn neg_laplacian_into(grid: &Grid2D, values: &[f64], stencil: Stencil, out: &mut [f64]) {
    let (nx, ny) = (grid.nx, grid.ny);
    let [c0, c1, c2] = stencil.coefficients();
    let (ix2, iy2) = (1.0 / (grid.hx * grid.hx), 1.0 / (grid.hy * grid.hy));
    let diag = c0 * (ix2 + iy2);
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            let (ii, jj) = (i as isize, j as isize);
            let row = j * nx;
            let mut acc = diag * values[k];
            acc += c1 * ix2 * (ext(values, row, 1, nx, ii - 1) + ext(values, row, 1, nx, ii + 1));
            acc += c1 * iy2 * (ext(values, i, nx, ny, jj - 1) + ext(values, i, nx, ny, jj + 1));
            if c2 != 0.0 {
                acc += c2 * ix2 * (ext(values, row, 1, nx, ii - 2) + ext(values, row, 1, nx, ii + 2));
                acc += c2 * iy2 * (ext(values, i, nx, ny, jj - 2) + ext(values, i, nx, ny, jj + 2));
            }
            out[k] = acc;
        }
    }
}

/// Axis-aligned ellipse metric `|x|_b = sqrt(x1^2/b1^2 + x2^2/b2^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseMetric {
    pub b1: f64,
    pub b2: f64,
}

impl EllipseMetric {
    pub fn new(b1: f64, b2: f64) -> Result<Self> {
        if !(b1 > 0.0 && b2 > 0.0) {
            return Err(Error::Domain(format!("semi-axes must be positive, got ({b1}, {b2})")));
        }
        Ok(Self { b1, b2 })
    }

    #[inline]
    pub fn norm(&self, p: Point) -> f64 {
        ellipse_norm(p, self)
    }

    /// Gradient of `|x|_b`; zero at the origin by convention.
    #[inline]
    pub fn norm_gradient(&self, p: Point) -> Point {
        let n = self.norm(p);
        if n == 0.0 {
            return [0.0, 0.0];
        }
        [p[0] / (self.b1 * self.b1 * n), p[1] / (self.b2 * self.b2 * n)]
    }

    /// Hessian of `|x|_b` as `[d11, d12, d22]`.
    pub fn norm_hessian(&self, p: Point) -> [f64; 3] {
        let n = self.norm(p);
        if n == 0.0 {
            return [0.0; 3];
        }
        let g = self.norm_gradient(p);
        let (i1, i2) = (1.0 / (self.b1 * self.b1), 1.0 / (self.b2 * self.b2));
        [(i1 - g[0] * g[0]) / n, -g[0] * g[1] / n, (i2 - g[1] * g[1]) / n]
    }
}

#[inline]
pub fn ellipse_norm(p: Point, m: &EllipseMetric) -> f64 {
    let (u, v) = (p[0] / m.b1, p[1] / m.b2);
    u.hypot(v)
}

/// Model parameters: interaction strength `a`, exponent `q`, semi-axes `b1 > b2`
/// and ring radius `A` of the trap `V(x) = (|x|_b - A)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub a: f64,
    pub q: f64,
    pub b1: f64,
    pub b2: f64,
    pub ring: f64,
}

impl ProblemParams {
    pub fn new(a: f64, q: f64, b1: f64, b2: f64, ring: f64) -> Result<Self> {
        let range = |key: &str, msg: String| Error::Range { key: key.into(), msg };
        if !(q > 2.0 && q <= 4.0) {
            return Err(range("q", format!("q must lie in (2, 4], got {q}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(range("a", format!("a must be positive, got {a}")));
        }
        if !(b2 > 0.0 && b1 > b2 && b1.is_finite()) {
            return Err(range("b1", format!("semi-axes need b1 > b2 > 0, got b1 = {b1}, b2 = {b2}")));
        }
        if !(ring > 0.0 && ring.is_finite()) {
            return Err(range("A", format!("ring radius must be positive, got {ring}")));
        }
        Ok(Self { a, q, b1, b2, ring })
    }

    /// Rejects `a >= a*` once the critical mass is known.
    pub fn check_below_critical(&self, a_star: f64) -> Result<()> {
        if self.a >= a_star {
            return Err(Error::Range {
                key: "a".into(),
                msg: format!("a = {} must be below the critical mass a* = {a_star}", self.a),
            });
        }
        Ok(())
    }

    pub fn metric(&self) -> EllipseMetric {
        EllipseMetric { b1: self.b1, b2: self.b2 }
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.a, q, self.b1, self.b2, self.ring)
    }

    /// The two minima of `|grad |x|_b|` on the ring, `(+-b1 A, 0)`.
    pub fn concentration_set(&self) -> [Point; 2] {
        [[self.b1 * self.ring, 0.0], [-self.b1 * self.ring, 0.0]]
    }
}

#[inline]
pub fn potential(p: Point, params: &ProblemParams) -> f64 {
    let d = ellipse_norm(p, &params.metric()) - params.ring;
    d * d
}

/// Real field on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "expected {} values for a {}x{} grid, got {}",
                grid.len(),
                grid.nx,
                grid.ny,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at index {k}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.node(i, j)));
            }
        }
        Self { grid, values }
    }

    /// A field on the same grid with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { grid: self.grid, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Weighted inner product `sum u v hx hy`.
    pub fn dot(&self, other: &Field2D) -> f64 {
        dot(&self.values, &other.values) * self.grid.cell_area()
    }

    pub fn mass(&self) -> f64 {
        mass(self)
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Rescales in place to unit mass; returns the previous L2 norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.l2_norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
        n
    }

    pub fn neg_laplacian(&self, stencil: Stencil) -> Field2D {
        let mut out = vec![0.0; self.values.len()];
        neg_laplacian_into(&self.grid, &self.values, stencil, &mut out);
        self.with_values(out)
    }

    /// `int |grad u|^2` as the quadratic form `<u, -Laplacian u>` of the stencil.
    pub fn grad_norm_sq_with(&self, stencil: Stencil) -> f64 {
        self.dot(&self.neg_laplacian(stencil))
    }

    /// `int f(x) u(x)^2 dx`.
    pub fn weighted_mass(&self, f: impl Fn(Point) -> f64) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let u = self.values[g.index(i, j)];
                if u != 0.0 {
                    acc += f(g.node(i, j)) * u * u;
                }
            }
        }
        acc * g.cell_area()
    }

    /// Cubic-convolution interpolation; zero outside the Dirichlet box.
    pub fn sample(&self, p: Point) -> f64 {
        let g = &self.grid;
        let fx = (p[0] - g.origin[0]) / g.hx;
        let fy = (p[1] - g.origin[1]) / g.hy;
        if !(fx > -1.0 && fx < g.nx as f64 && fy > -1.0 && fy < g.ny as f64) {
            return 0.0;
        }
        let (i0, j0) = (fx.floor() as isize, fy.floor() as isize);
        let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
        let wx = cubic_weights(tx);
        let wy = cubic_weights(ty);
        let mut acc = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            let j = j0 - 1 + b as isize;
            if j < 0 || j >= g.ny as isize {
                continue;
            }
            let mut row = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                let i = i0 - 1 + a as isize;
                if i < 0 || i >= g.nx as isize {
                    continue;
                }
                row += wxa * self.values[g.index(i as usize, j as usize)];
            }
            acc += wyb * row;
        }
        acc
    }

    /// Resamples onto another grid by cubic convolution.
    pub fn resample(&self, grid: Grid2D) -> Field2D {
        Field2D::from_fn(grid, |p| self.sample(p))
    }

    /// Mirror image under `x1 -> -x1`.
    pub fn reflect_x1(&self) -> Field2D {
        let g = self.grid;
        let grid = Grid2D {
            origin: [-(g.origin[0] + (g.nx as f64 - 1.0) * g.hx), g.origin[1]],
            ..g
        };
        let mut values = vec![0.0; g.len()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                values[g.index(g.nx - 1 - i, j)] = self.values[g.index(i, j)];
            }
        }
        Field2D { grid, values }
    }

    /// Writes the `FIELD2D` dump: one text header line, then little-endian f64 values.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.grid;
        writeln!(w, "FIELD2D {} {} {:?} {:?} {:?} {:?}", g.nx, g.ny, g.hx, g.hy, g.origin[0], g.origin[1])?;
        let mut buf = Vec::with_capacity(8 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_dump<R: BufRead>(mut r: R) -> Result<Field2D> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 7 || parts[0] != "FIELD2D" {
            return Err(Error::Format(format!("bad header {:?}", header.trim_end())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| Error::Format(format!("{s}: {e}")));
        let flt = |s: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("{s}: {e}")));
        let grid = Grid2D::new(
            int(parts[1])?,
            int(parts[2])?,
            flt(parts[3])?,
            flt(parts[4])?,
            [flt(parts[5])?, flt(parts[6])?],
        )
        .map_err(|e| Error::Format(e.to_string()))?;
        let mut bytes = vec![0u8; 8 * grid.len()];
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("payload shorter than {} values: {e}", grid.len())))?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Field2D::new(grid, values).map_err(|e| Error::Format(e.to_string()))
    }
}

fn cubic_weights(t: f64) -> [f64; 4] {
    // Keys cubic convolution, a = -1/2.
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `int |u|^2` by the midpoint rule.
pub fn mass(u: &Field2D) -> f64 {
    u.values.iter().map(|v| v * v).sum::<f64>() * u.grid.cell_area()
}

/// `int |grad u|^2` with the 5-point stencil.
pub fn grad_norm_sq(u: &Field2D) -> f64 {
    u.grad_norm_sq_with(Stencil::Second)
}

/// `int |u|^p`.
pub fn lp_power(u: &Field2D, p: f64) -> f64 {
    u.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * u.grid.cell_area()
}

/// `Laplacian(u)` with the 5-point stencil and homogeneous Dirichlet extension.
pub fn laplacian(u: &Field2D) -> Field2D {
    u.neg_laplacian(Stencil::Second).scaled(-1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(grid: Grid2D) -> Field2D {
        Field2D::from_fn(grid, |p| (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp() / PI.sqrt())
    }

    #[test]
    fn ellipse_norm_values() {
        let m = EllipseMetric::new(2.0, 1.0).unwrap();
        assert_eq!(ellipse_norm([0.0, 0.0], &m), 0.0);
        assert!((ellipse_norm([2.0, 0.0], &m) - 1.0).abs() < 1e-15);
        assert!((ellipse_norm([1.0, 1.0], &m) - 5f64.sqrt() / 2.0).abs() < 1e-15);
        let e = EllipseMetric::new(1.0, 1.0).unwrap();
        assert!((e.norm([3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn potential_values() {
        let p = ProblemParams::new(1.0, 2.5, 1.2, 1.0, 1.0).unwrap();
        assert!(potential([1.2, 0.0], &p).abs() < 1e-15);
        assert!(potential([0.0, 1.0], &p).abs() < 1e-15);
        assert_eq!(potential([0.0, 0.0], &p), 1.0);
        assert!((potential([2.0 * 1.2, 0.0], &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn params_reject_bad_ranges() {
        assert!(matches!(ProblemParams::new(1.0, 1.5, 1.2, 1.0, 1.0), Err(Error::Range { .. })));
        assert!(ProblemParams::new(1.0, 4.5, 1.2, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(1.0, 2.5, 1.0, 1.2, 1.0).is_err());
        assert!(ProblemParams::new(-1.0, 2.5, 1.2, 1.0, 1.0).is_err());
        let p = ProblemParams::new(12.0, 2.5, 1.2, 1.0, 1.0).unwrap();
        assert!(p.check_below_critical(11.7).is_err());
    }

    #[test]
    fn zero_field_quadratures_vanish() {
        let g = Grid2D::centered([0.0, 0.0], 3.0, 32).unwrap();
        let u = Field2D::zeros(g);
        assert_eq!(mass(&u), 0.0);
        assert_eq!(grad_norm_sq(&u), 0.0);
        assert_eq!(lp_power(&u, 4.0), 0.0);
    }

    #[test]
    fn gaussian_mass_and_gradient() {
        let g = Grid2D::centered([0.0, 0.0], 9.0, 255).unwrap();
        let u = gaussian(g);
        assert!((mass(&u) - 1.0).abs() < 1e-10);
        // Second-order stencil: error ~ h^2/12 * int |grad u|^2 ...
        assert!((grad_norm_sq(&u) - 1.0).abs() < 2e-3);
        assert!((u.grad_norm_sq_with(Stencil::Fourth) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn gradient_refinement_is_second_order() {
        let errs: Vec<f64> = [63usize, 127, 255]
            .iter()
            .map(|&n| {
                let g = Grid2D::centered([0.0, 0.0], 9.0, n).unwrap();
                (grad_norm_sq(&gaussian(g)) - 1.0).abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }

    #[test]
    fn quadrature_refinement_is_at_least_second_order() {
        // Off-centre box so the integrand is not periodic-smooth at the edges.
        let f = |p: Point| (p[0] * 0.7).sin().powi(2) + (p[1] * 1.3).cos() * p[0];
        let exact = {
            // [0,1]x[0,1]: int sin^2(0.7x) dx * 1 + int x dx * int cos(1.3y) dy
            let sx = 0.5 - (1.4f64).sin() / 2.8;
            sx + 0.5 * (1.3f64).sin() / 1.3
        };
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let g = Grid2D::new(n, n, h, h, [0.5 * h, 0.5 * h]).unwrap();
            let u = Field2D::from_fn(g, f);
            (u.values.iter().sum::<f64>() * g.cell_area() - exact).abs()
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn constant_field_has_zero_interior_laplacian() {
        let g = Grid2D::centered([0.0, 0.0], 1.0, 20).unwrap();
        let u = Field2D::from_fn(g, |_| 3.0);
        let lap = laplacian(&u);
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                assert!(lap.values[g.index(i, j)].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sine_mode_is_a_discrete_eigenfunction() {
        let (n, len) = (31usize, 2.0);
        let h = len / (n as f64 + 1.0);
        let g = Grid2D::new(n, n, h, h, [h, h]).unwrap();
        let u = Field2D::from_fn(g, |p| (PI * p[0] / len).sin() * (PI * p[1] / len).sin());
        let expect = 2.0 * (2.0 / (h * h)) * (1.0 - (PI * h / len).cos());
        let lu = laplacian(&u);
        for (a, b) in lu.values.iter().zip(&u.values) {
            assert!((a + expect * b).abs() < 1e-10 * expect);
        }
        let theta = PI * h / len;
        let lu4 = u.neg_laplacian(Stencil::Fourth);
        let expect4 = 2.0 * Stencil::Fourth.symbol(theta, h);
        for (a, b) in lu4.values.iter().zip(&u.values) {
            assert!((a - expect4 * b).abs() < 1e-10 * expect4);
        }
    }

    #[test]
    fn laplacian_is_symmetric_and_negative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = Grid2D::new(17, 23, 0.3, 0.2, [0.1, -1.0]).unwrap();
        for stencil in [Stencil::Second, Stencil::Fourth] {
            let u = Field2D::from_fn(g, |_| rng.random_range(-1.0..1.0));
            let v = Field2D::from_fn(g, |_| rng.random_range(-1.0..1.0));
            let a = u.neg_laplacian(stencil).dot(&v);
            let b = u.dot(&v.neg_laplacian(stencil));
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
            assert!(u.grad_norm_sq_with(stencil) > 0.0);
        }
    }

    #[test]
    fn dilation_is_exact_for_scaling_laws() {
        let g = Grid2D::centered([0.3, 0.0], 6.0, 64).unwrap();
        let u = gaussian(g);
        let t = 1.7;
        let ut = Field2D { grid: g.dilated(t, [0.0, 0.0]), values: u.values.iter().map(|v| t * v).collect() };
        assert!((mass(&ut) - mass(&u)).abs() < 1e-14);
        assert!((grad_norm_sq(&ut) - t * t * grad_norm_sq(&u)).abs() < 1e-12);
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let g = Grid2D::new(16, 18, 0.1, 0.3, [-1.0 / 3.0, 2.0f64.sqrt()]).unwrap();
        let u = Field2D::from_fn(g, |p| (p[0] * 7.3).sin() / 3.0 + p[1].exp() * 1e-300);
        let mut buf = Vec::new();
        u.write_dump(&mut buf).unwrap();
        assert!(buf.starts_with(b"FIELD2D 16 18 "));
        let back = Field2D::read_dump(&buf[..]).unwrap();
        assert_eq!(back.grid, u.grid);
        assert!(back.values.iter().zip(&u.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn truncated_dump_is_rejected() {
        let g = Grid2D::new(16, 16, 0.1, 0.1, [0.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        Field2D::zeros(g).write_dump(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(Field2D::read_dump(&buf[..]), Err(Error::Format(_))));
    }

    #[test]
    fn cubic_sampling_reproduces_nodes_and_smooth_fields() {
        let g = Grid2D::centered([0.0, 0.0], 8.0, 161).unwrap();
        let u = gaussian(g);
        let k = g.index(40, 77);
        assert!((u.sample(g.node(40, 77)) - u.values[k]).abs() < 1e-15);
        let p = [0.2345, -0.777];
        let exact = (-(p[0] * p[0] + p[1] * p[1]) / 2.0f64).exp() / PI.sqrt();
        assert!((u.sample(p) - exact).abs() < 1e-4);
        assert_eq!(u.sample([100.0, 0.0]), 0.0);
    }

    #[test]
    fn reflection_mirrors_nodes() {
        let g = Grid2D::centered([1.2, 0.1], 0.5, 21).unwrap();
        let u = Field2D::from_fn(g, |p| p[0] * 10.0 + p[1]);
        let r = u.reflect_x1();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let p = r.grid.node(i, j);
                assert!((r.values[g.index(i, j)] - (-p[0] * 10.0 + p[1])).abs() < 1e-12);
            }
        }
    }
}
