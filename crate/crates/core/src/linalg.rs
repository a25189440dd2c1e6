//! Sine transforms, a fast Dirichlet Poisson solver and Krylov iterations.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{dot, Grid2D, Stencil};

/// Unnormalized DST-I of length `n`: `y_k = sum_j x_j sin(pi (j+1)(k+1) / (n+1))`.
pub struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fft: planner.plan_fft_forward(2 * (n + 1)) }
    }

    /// Transforms `n` strided entries of `data` starting at `base`, using `buf` as scratch.
    fn apply_strided(&self, data: &mut [f64], base: usize, stride: usize, buf: &mut Vec<Complex64>) {
        let n = self.n;
        let m = 2 * (n + 1);
        buf.clear();
        buf.resize(m, Complex64::new(0.0, 0.0));
        for j in 0..n {
            let x = data[base + j * stride];
            buf[j + 1].re = x;
            buf[m - 1 - j].re = -x;
        }
        self.fft.process(buf);
        for k in 0..n {
            data[base + k * stride] = -0.5 * buf[k + 1].im;
        }
    }

    pub fn apply(&self, data: &mut [f64]) {
        let mut buf = Vec::new();
        self.apply_strided(data, 0, 1, &mut buf);
    }
}

/// Solves `(-Laplacian_h + shift) u = f` on a grid with homogeneous Dirichlet data.
pub struct DirichletSolver {
    nx: usize,
    ny: usize,
    lam_x: Vec<f64>,
    lam_y: Vec<f64>,
    dst_x: Dst1,
    dst_y: Dst1,
}

impl DirichletSolver {
    pub fn new(grid: &Grid2D, stencil: Stencil) -> Self {
        let sym = |n: usize, h: f64| -> Vec<f64> {
            (1..=n)
                .map(|k| stencil.symbol(std::f64::consts::PI * k as f64 / (n as f64 + 1.0), h))
                .collect()
        };
        Self {
            nx: grid.nx,
            ny: grid.ny,
            lam_x: sym(grid.nx, grid.hx),
            lam_y: sym(grid.ny, grid.hy),
            dst_x: Dst1::new(grid.nx),
            dst_y: Dst1::new(grid.ny),
        }
    }

    /// Smallest eigenvalue of `-Laplacian_h`.
    pub fn min_eigenvalue(&self) -> f64 {
        self.lam_x[0] + self.lam_y[0]
    }

    fn transform(&self, data: &mut [f64], buf: &mut Vec<Complex64>) {
        for j in 0..self.ny {
            self.dst_x.apply_strided(data, j * self.nx, 1, buf);
        }
        for i in 0..self.nx {
            self.dst_y.apply_strided(data, i, self.nx, buf);
        }
    }

    /// `out = (-Laplacian_h + shift)^{-1} rhs`. `shift` must keep the operator positive.
    pub fn solve(&self, rhs: &[f64], shift: f64, out: &mut [f64]) {
        out.copy_from_slice(rhs);
        let mut buf = Vec::new();
        self.transform(out, &mut buf);
        let norm = 4.0 / ((self.nx as f64 + 1.0) * (self.ny as f64 + 1.0));
        for j in 0..self.ny {
            for i in 0..self.nx {
                out[j * self.nx + i] *= norm / (self.lam_x[i] + self.lam_y[j] + shift);
            }
        }
        self.transform(out, &mut buf);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KrylovOutcome {
    pub iterations: usize,
    /// Relative residual in the preconditioner norm.
    pub relative_residual: f64,
}

/// Preconditioned MINRES for a symmetric (possibly indefinite) operator with an
/// SPD preconditioner. Starts from `x = 0`.
pub fn minres(
    mut op: impl FnMut(&[f64], &mut [f64]),
    mut prec: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<KrylovOutcome> {
    let n = b.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    let mut r1 = b.to_vec();
    let mut y = vec![0.0; n];
    prec(&r1, &mut y);
    let beta1_sq = dot(&r1, &y);
    if beta1_sq < 0.0 {
        return Err(Error::Domain("preconditioner is not positive definite".into()));
    }
    let beta1 = beta1_sq.sqrt();
    if beta1 == 0.0 {
        return Ok(KrylovOutcome { iterations: 0, relative_residual: 0.0 });
    }
    let mut r2 = r1.clone();
    let (mut oldb, mut beta, mut dbar, mut epsln, mut phibar) = (0.0, beta1, 0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0, 0.0);
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    for itn in 1..=max_iter {
        let s = 1.0 / beta;
        for k in 0..n {
            v[k] = s * y[k];
        }
        op(&v, &mut y);
        if itn >= 2 {
            let c = beta / oldb;
            for k in 0..n {
                y[k] -= c * r1[k];
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for k in 0..n {
            y[k] -= c * r2[k];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        prec(&r2, &mut y);
        oldb = beta;
        let bsq = dot(&r2, &y);
        if bsq < 0.0 {
            return Err(Error::Domain("preconditioner is not positive definite".into()));
        }
        beta = bsq.sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        let denom = 1.0 / gamma;
        for k in 0..n {
            w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) * denom;
            x[k] += phi * w[k];
        }
        let rel = phibar / beta1;
        if rel <= tol || beta == 0.0 {
            return Ok(KrylovOutcome { iterations: itn, relative_residual: rel });
        }
    }
    Err(Error::NoConvergence { what: "minres", iterations: max_iter, residual: phibar / beta1 })
}

/// Preconditioned conjugate gradients for an SPD operator, warm-started from `x`.
pub fn pcg(
    mut op: impl FnMut(&[f64], &mut [f64]),
    mut prec: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<KrylovOutcome> {
    let n = b.len();
    let mut r = vec![0.0; n];
    op(x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut z = vec![0.0; n];
    prec(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for itn in 0..=max_iter {
        let rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= tol {
            return Ok(KrylovOutcome { iterations: itn, relative_residual: rel });
        }
        if itn == max_iter {
            return Err(Error::NoConvergence { what: "pcg", iterations: max_iter, residual: rel });
        }
        op(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Domain("pcg operator is not positive definite".into()));
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        prec(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    unreachable!()
}
