//! The positive two-dimensional structure `h = diag(h₁₁, h₁₁⁻¹)` on a rectangle of the
//! `t²`-plane at `t¹ = 0`, where `∂̄∂ log h₁₁ = h₁₁²|∂₂³F|² − h₁₁⁻²`.
//!
//! With `v = log h₁₁` and `∂∂̄ = ¼Δ` this is `¼Δv = a e^{2v} − e^{−2v}`, `a = |∂₂³F|²`,
//! solved by damped Newton on a uniform grid with the 5-point Laplacian and Dirichlet data.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::Error;
use crate::numerics::{BandedSpd, NumericsError};
use crate::potential::PotentialSpec;

/// `n × n` nodes on `[x0, x1] × [y0, y1]` with `t² = x + iy`; node `(i, j)` sits at
/// `(x0 + i·hx, y0 + j·hy)` and is stored at `j·n + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64, n: usize) -> Result<Self, Error> {
        if n < 3 {
            return Err(Error::Validation("grid needs at least 3 nodes per side".into()));
        }
        if !(x1 > x0 && y1 > y0) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("rectangle corners must be finite with x1 > x0 and y1 > y0".into()));
        }
        Ok(Self { x0, y0, x1, y1, n })
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.n - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    fn interior(&self) -> usize {
        self.n - 2
    }

    /// Unknown index of interior node `(i, j)`.
    #[inline]
    fn unknown(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.interior() + (i - 1)
    }
}

/// Dirichlet data for `h₁₁` (not `log h₁₁`).
#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    Constant(f64),
    /// Full `n·n` node array; only boundary nodes are read.
    Values(Vec<f64>),
}

impl Boundary {
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n;
        let mut values = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                if grid.is_boundary(i, j) {
                    values[grid.idx(i, j)] = f(grid.x(i), grid.y(j));
                }
            }
        }
        Boundary::Values(values)
    }

    fn value(&self, grid: &Grid, i: usize, j: usize) -> f64 {
        match self {
            Boundary::Constant(c) => *c,
            Boundary::Values(v) => v[grid.idx(i, j)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialGuess {
    /// Interior `h₁₁` set to this value.
    Constant(f64),
    /// Harmonic extension of the boundary `log h₁₁`.
    HarmonicExtension,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tt2dOptions {
    pub boundary: Boundary,
    pub initial: InitialGuess,
    pub max_iter: usize,
    /// Target for the max-norm of the discrete residual at interior nodes.
    pub tol: f64,
}

impl Default for Tt2dOptions {
    fn default() -> Self {
        Self { boundary: Boundary::Constant(1.0), initial: InitialGuess::HarmonicExtension, max_iter: 50, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tt2dSolution {
    pub grid: Grid,
    /// `h₁₁` at every node, boundary included.
    pub h11: Vec<f64>,
    /// Max-norm of the 5-point residual at interior nodes.
    pub residual: f64,
    pub iterations: usize,
    /// `residual <= tol`; otherwise this is the last iterate.
    pub converged: bool,
    /// Residual before the first step and after each step.
    pub history: Vec<f64>,
    /// `max |(ℰ − ℰ̄) h₁₁|` at interior nodes, central differences.
    pub invariance_residual: f64,
    /// `max |∂h₁₁/∂(Im t²)|` at interior nodes, central differences.
    pub im_derivative: f64,
}

/// `|∂₂³F(0, x + iy)|²` at every node.
fn source(spec: &PotentialSpec, grid: &Grid) -> Result<Vec<f64>, Error> {
    if spec.dim() != 2 {
        return Err(Error::Validation("the two-dimensional equation needs m = 2".into()));
    }
    let n = grid.n;
    let mut a = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let t = [Complex64::new(0.0, 0.0), Complex64::new(grid.x(i), grid.y(j))];
            let f = spec.eval_derivative(&[0, 3], &t);
            if !(f.re.is_finite() && f.im.is_finite()) {
                return Err(NumericsError::NonFinite.into());
            }
            a[grid.idx(i, j)] = f.norm_sqr();
        }
    }
    Ok(a)
}

/// 5-point residual `¼Δv − a e^{2v} + e^{−2v}` at interior nodes, zero on the boundary.
fn residual_field(grid: &Grid, v: &[f64], a: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let (ix, iy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
    let mut r = vec![0.0; n * n];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let p = grid.idx(i, j);
            let lap = (v[p - 1] - 2.0 * v[p] + v[p + 1]) * ix + (v[p - n] - 2.0 * v[p] + v[p + n]) * iy;
            r[p] = 0.25 * lap - a[p] * Float::exp(2.0 * v[p]) + Float::exp(-2.0 * v[p]);
        }
    }
    r
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `−¼L` on the interior unknowns plus `diag`, as a banded SPD matrix.
fn assemble(grid: &Grid, diag: impl Fn(usize) -> f64) -> BandedSpd {
    let k = grid.interior();
    let (ix, iy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
    let mut m = BandedSpd::zeros(k * k, k);
    for j in 1..grid.n - 1 {
        for i in 1..grid.n - 1 {
            let u = grid.unknown(i, j);
            m.add(u, u, 0.5 * (ix + iy) + diag(grid.idx(i, j)));
            if i > 1 {
                m.add(u, grid.unknown(i - 1, j), -0.25 * ix);
            }
            if j > 1 {
                m.add(u, grid.unknown(i, j - 1), -0.25 * iy);
            }
        }
    }
    m
}

fn initial_field(grid: &Grid, opts: &Tt2dOptions) -> Result<Vec<f64>, Error> {
    let n = grid.n;
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            if grid.is_boundary(i, j) {
                let b = opts.boundary.value(grid, i, j);
                if !(b > 0.0 && b.is_finite()) {
                    return Err(Error::Validation("boundary values of h11 must be positive and finite".into()));
                }
                v[grid.idx(i, j)] = Float::ln(b);
            }
        }
    }
    match opts.initial {
        InitialGuess::Constant(c) => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Validation("initial h11 must be positive and finite".into()));
            }
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    v[grid.idx(i, j)] = Float::ln(c);
                }
            }
        }
        InitialGuess::HarmonicExtension => {
            let mut lap = assemble(grid, |_| 0.0);
            lap.factor()?;
            let (ix, iy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
            let k = grid.interior();
            let mut rhs = vec![0.0; k * k];
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    let mut s = 0.0;
                    for (ii, jj, w) in [(i - 1, j, ix), (i + 1, j, ix), (i, j - 1, iy), (i, j + 1, iy)] {
                        if grid.is_boundary(ii, jj) {
                            s += 0.25 * w * v[grid.idx(ii, jj)];
                        }
                    }
                    rhs[grid.unknown(i, j)] = s;
                }
            }
            let sol = lap.solve(&rhs);
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    v[grid.idx(i, j)] = sol[grid.unknown(i, j)];
                }
            }
        }
    }
    Ok(v)
}

/// Damped Newton solve. A run that reaches `max_iter` returns its last iterate with
/// `converged = false`; a line search that cannot reduce the residual is an error.
pub fn solve_tt2d(spec: &PotentialSpec, grid: &Grid, opts: &Tt2dOptions) -> Result<Tt2dSolution, Error> {
    let a = source(spec, grid)?;
    let mut v = initial_field(grid, opts)?;
    let n = grid.n;
    let mut r = residual_field(grid, &v, &a);
    let mut norm = max_abs(&r);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > opts.tol && iterations < opts.max_iter {
        let mut jac = assemble(grid, |p| 2.0 * a[p] * Float::exp(2.0 * v[p]) + 2.0 * Float::exp(-2.0 * v[p]));
        jac.factor()?;
        let k = grid.interior();
        let mut rhs = vec![0.0; k * k];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                rhs[grid.unknown(i, j)] = r[grid.idx(i, j)];
            }
        }
        let delta = jac.solve(&rhs);
        let mut lambda = 1.0;
        loop {
            let mut trial = v.clone();
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    trial[grid.idx(i, j)] += lambda * delta[grid.unknown(i, j)];
                }
            }
            let rt = residual_field(grid, &trial, &a);
            let nt = max_abs(&rt);
            if nt.is_finite() && nt <= (1.0 - 1e-4 * lambda) * norm {
                v = trial;
                r = rt;
                norm = nt;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::NonPositiveIterate { iteration: iterations });
            }
        }
        iterations += 1;
        history.push(norm);
    }
    let h11: Vec<f64> = v.iter().map(|x| Float::exp(*x)).collect();
    let (invariance_residual, im_derivative) = invariance(spec, grid, &h11, false);
    Ok(Tt2dSolution {
        grid: *grid,
        h11,
        residual: norm,
        iterations,
        converged: norm <= opts.tol,
        history,
        invariance_residual,
        im_derivative,
    })
}

/// Per-node 5-point residual of a solution, zero on the boundary.
pub fn node_residuals(spec: &PotentialSpec, sol: &Tt2dSolution) -> Result<Vec<f64>, Error> {
    let a = source(spec, &sol.grid)?;
    let v: Vec<f64> = sol.h11.iter().map(|h| Float::ln(*h)).collect();
    Ok(residual_field(&sol.grid, &v, &a).iter().map(|x| x.abs()).collect())
}

/// `(max |(ℰ − ℰ̄)h₁₁|, max |∂_y h₁₁|)` with second- or fourth-order central differences.
fn invariance(spec: &PotentialSpec, grid: &Grid, h: &[f64], fourth: bool) -> (f64, f64) {
    let n = grid.n;
    let margin = if fourth { 2 } else { 1 };
    let (mut inv, mut dy_max) = (0.0_f64, 0.0_f64);
    if n <= 2 * margin {
        return (0.0, 0.0);
    }
    for j in margin..n - margin {
        for i in margin..n - margin {
            let p = grid.idx(i, j);
            let d = |s: usize, step: f64| {
                if fourth {
                    (8.0 * (h[p + s] - h[p - s]) - (h[p + 2 * s] - h[p - 2 * s])) / (12.0 * step)
                } else {
                    (h[p + s] - h[p - s]) / (2.0 * step)
                }
            };
            let (dx, dy) = (d(1, grid.hx()), d(n, grid.hy()));
            let t = [Complex64::new(0.0, 0.0), Complex64::new(grid.x(i), grid.y(j))];
            let e2 = spec.euler_vector(&t)[1];
            let dh = 0.5 * Complex64::new(dx, -dy);
            let eh = e2 * dh;
            inv = inv.max((eh - eh.conj()).norm());
            dy_max = dy_max.max(dy.abs());
        }
    }
    (inv, dy_max)
}

/// Independent re-evaluation with fourth-order stencils at nodes two or more steps from the
/// boundary: `(max |¼Δ₄v − a e^{2v} + e^{−2v}|, max |(ℰ − ℰ̄)h₁₁|)`.
pub fn tt2d_residual(spec: &PotentialSpec, sol: &Tt2dSolution) -> Result<(f64, f64), Error> {
    let grid = &sol.grid;
    let n = grid.n;
    if sol.h11.len() != n * n {
        return Err(Error::Validation("solution size does not match its grid".into()));
    }
    let a = source(spec, grid)?;
    let v: Vec<f64> = sol.h11.iter().map(|h| Float::ln(*h)).collect();
    let (ix, iy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
    let second =
        |p: usize, s: usize| (-v[p + 2 * s] + 16.0 * v[p + s] - 30.0 * v[p] + 16.0 * v[p - s] - v[p - 2 * s]) / 12.0;
    let mut pde = 0.0_f64;
    for j in 2..n.saturating_sub(2) {
        for i in 2..n - 2 {
            let p = grid.idx(i, j);
            let lap = second(p, 1) * ix + second(p, n) * iy;
            pde = pde.max((0.25 * lap - a[p] * Float::exp(2.0 * v[p]) + Float::exp(-2.0 * v[p])).abs());
        }
    }
    let (inv, _) = invariance(spec, grid, &sol.h11, true);
    Ok((pde, inv))
}
