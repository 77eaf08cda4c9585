//! Eigen-decomposition of small dense complex matrices.
//!
//! The characteristic polynomial comes from the Faddeev–LeVerrier recursion,
//! its roots from simultaneous Aberth–Ehrlich iteration, and eigenvectors from
//! shifted inverse iteration. Roots that coincide to within [`CLUSTER_RTOL`]
//! are merged to their mean, which is the well-conditioned quantity for a
//! multiple root.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::linsolve::Lu;
use super::matrix::vec_norm;
use super::{CMatrix, NumericsError};

/// Relative distance below which two computed roots are treated as one multiple root.
pub const CLUSTER_RTOL: f64 = 3e-5;

const MAX_ABERTH_ITER: usize = 800;
const INVERSE_ITERATIONS: usize = 3;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Sorted lexicographically by (re, im).
    pub eigenvalues: Vec<Complex64>,
    /// Unit 2-norm eigenvectors, column `k` paired with `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
    /// `max_k ||M v_k - lambda_k v_k||_2`.
    pub residual: f64,
}

/// Coefficients `c_0..=c_n` of `det(lambda I - M)`, lowest degree first.
pub fn characteristic_polynomial(m: &CMatrix) -> Result<Vec<Complex64>, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(n, n);
    let eye = CMatrix::identity(n);
    for k in 1..=n {
        mk = &(m * &mk) + &eye.scale(coeffs[n - k + 1]);
        let am = m * &mk;
        coeffs[n - k] = -am.trace() / (k as f64);
    }
    Ok(coeffs)
}

/// Horner evaluation of `p` and `p'` with a running rounding-error bound for `p`.
fn eval_poly(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let n = coeffs.len() - 1;
    let mut p = coeffs[n];
    let mut dp = Complex64::new(0.0, 0.0);
    let az = z.norm();
    let mut bound = p.norm();
    for k in (0..n).rev() {
        dp = dp * z + p;
        p = p * z + coeffs[k];
        bound = bound * az + p.norm();
    }
    (p, dp, bound * 4.0 * f64::EPSILON * (n as f64 + 1.0))
}

/// Lexicographic (re, im) order; real parts within `tie` count as equal.
fn lex_cmp(a: &Complex64, b: &Complex64, tie: f64) -> Ordering {
    if (a.re - b.re).abs() > tie {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    } else {
        a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
    }
}

/// Insertion sort; the tolerant comparator is not a total order, so the std sorts are avoided.
fn sort_lexicographic(values: &mut [Complex64]) {
    let scale = 1.0 + values.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let tie = 1e-12 * scale;
    for i in 1..values.len() {
        let mut j = i;
        while j > 0 && lex_cmp(&values[j - 1], &values[j], tie) == Ordering::Greater {
            values.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// All roots of a monic-normalisable polynomial, sorted lexicographically.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1].norm() == 0.0 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    c.iter_mut().for_each(|x| *x /= lead);

    // Exact zero roots are split off first.
    let zeros = c.iter().take_while(|x| x.norm() == 0.0).count();
    let reduced: Vec<Complex64> = c[zeros..].to_vec();
    let deg = reduced.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];

    if deg > 0 {
        let center = -reduced[deg - 1] / (deg as f64);
        let mut radius = 0.0_f64;
        for k in 1..=deg {
            radius = radius.max(Float::powf(reduced[deg - k].norm(), 1.0 / k as f64));
        }
        radius = 2.0 * radius.max(f64::MIN_POSITIVE);
        let mut z: Vec<Complex64> =
            (0..deg).map(|j| center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / deg as f64 + 0.7)).collect();
        let mut done = vec![false; deg];
        for _ in 0..MAX_ABERTH_ITER {
            let mut all_done = true;
            for i in 0..deg {
                if done[i] {
                    continue;
                }
                let (p, dp, bound) = eval_poly(&reduced, z[i]);
                if p.norm() <= bound {
                    done[i] = true;
                    continue;
                }
                all_done = false;
                let ratio = p / dp;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..deg {
                    if j != i {
                        let diff = z[i] - z[j];
                        if diff.norm() > 0.0 {
                            s += diff.inv();
                        }
                    }
                }
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                } else {
                    z[i] += Complex64::new(radius * 1e-3, radius * 1e-3);
                }
            }
            if all_done {
                break;
            }
        }
        if done.iter().any(|d| !d) {
            // Accept roots that are merely stuck at the rounding floor of a cluster.
            for i in 0..deg {
                if !done[i] {
                    let (p, _, bound) = eval_poly(&reduced, z[i]);
                    if p.norm() > 1e6 * bound {
                        return Err(NumericsError::NoConvergence { iterations: MAX_ABERTH_ITER });
                    }
                }
            }
        }
        roots.extend(z);
    }

    merge_clusters(&mut roots);
    polish_multiple_roots(&c, &mut roots);
    polish_simple_roots(&c, &mut roots);
    sort_lexicographic(&mut roots);
    Ok(roots)
}

fn merge_clusters(roots: &mut [Complex64]) {
    let n = roots.len();
    if n < 2 {
        return;
    }
    let scale = 1.0 + roots.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let tol = CLUSTER_RTOL * scale;
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let groups: Vec<usize> = (0..n).map(|i| find(&mut label, i)).collect();
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| groups[i] == g).collect();
        if members.len() > 1 {
            let mean: Complex64 = members.iter().map(|&i| roots[i]).sum::<Complex64>() / members.len() as f64;
            for &i in &members {
                roots[i] = mean;
            }
        }
    }
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// A root of multiplicity `k` is a simple root of `p^(k-1)`; Newton on that derivative
/// recovers the accuracy Aberth loses on clusters.
fn polish_multiple_roots(coeffs: &[Complex64], roots: &mut [Complex64]) {
    let n = roots.len();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| roots[j] == roots[i]).collect();
        members.iter().for_each(|&j| seen[j] = true);
        let k = members.len();
        if k < 2 {
            continue;
        }
        let mut d = coeffs.to_vec();
        for _ in 0..k - 1 {
            d = derivative(&d);
        }
        let mut z = roots[i];
        for _ in 0..4 {
            let (p, dp, bound) = eval_poly(&d, z);
            if p.norm() <= bound || dp.norm() == 0.0 {
                break;
            }
            let next = z - p / dp;
            if (next - z).norm() > CLUSTER_RTOL * (1.0 + z.norm()) {
                break;
            }
            z = next;
        }
        members.iter().for_each(|&j| roots[j] = z);
    }
}

fn polish_simple_roots(coeffs: &[Complex64], roots: &mut [Complex64]) {
    let n = roots.len();
    for i in 0..n {
        let simple = (0..n).all(|j| j == i || roots[j] != roots[i]);
        if !simple {
            continue;
        }
        let mut z = roots[i];
        for _ in 0..3 {
            let (p, dp, bound) = eval_poly(coeffs, z);
            if p.norm() <= bound || dp.norm() == 0.0 {
                break;
            }
            let next = z - p / dp;
            let (pn, _, _) = eval_poly(coeffs, next);
            if pn.norm() < p.norm() {
                z = next;
            } else {
                break;
            }
        }
        roots[i] = z;
    }
}

fn start_vector(n: usize, k: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let phase = 0.37 * ((i + 1) * (k + 2)) as f64;
            Complex64::new(1.0 + 0.1 * Float::cos(phase), 0.05 * Float::sin(phase))
        })
        .collect()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let nrm = vec_norm(v);
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let dot: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
    }
}

/// Eigenvalues and eigenvectors of a square matrix.
pub fn solve_eig(m: &CMatrix) -> Result<EigenDecomposition, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let n = m.rows();
    let coeffs = characteristic_polynomial(m)?;
    let mut eigenvalues = polynomial_roots(&coeffs)?;
    let scale = 1.0 + m.max_abs();

    let mut vectors = CMatrix::zeros(n, n);
    let mut residual = 0.0_f64;
    let mut k = 0;
    while k < n {
        let lambda = eigenvalues[k];
        let mult = eigenvalues[k..].iter().take_while(|&&z| z == lambda).count();
        let mut cluster: Vec<Vec<Complex64>> = Vec::with_capacity(mult);
        for r in 0..mult {
            let mut shift = Complex64::new(1e-10 * scale, 0.7e-10 * scale);
            let mut lu = Lu::new(&shifted(m, lambda + shift))?;
            while lu.min_pivot() == 0.0 {
                shift *= 10.0;
                lu = Lu::new(&shifted(m, lambda + shift))?;
            }
            let mut v = start_vector(n, k + r);
            project_out(&mut v, &cluster);
            normalize(&mut v);
            for _ in 0..INVERSE_ITERATIONS {
                let mut w = lu.solve(&v);
                project_out(&mut w, &cluster);
                if normalize(&mut w) == 0.0 || w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    break;
                }
                v = w;
            }
            let mv = m.mul_vec(&v);
            let res_of =
                |l: Complex64| Float::sqrt(mv.iter().zip(&v).map(|(a, b)| (a - l * b).norm_sqr()).sum::<f64>());
            let mut res = res_of(lambda);
            if mult == 1 {
                // Rayleigh quotient of the unit vector; kept only if it lowers the residual.
                let rho: Complex64 = v.iter().zip(&mv).map(|(x, y)| x.conj() * y).sum();
                let res_rho = res_of(rho);
                if res_rho < res {
                    eigenvalues[k] = rho;
                    res = res_rho;
                }
            }
            residual = residual.max(res);
            vectors.set_column(k + r, &v);
            cluster.push(v);
        }
        k += mult;
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors, residual })
}

fn shifted(m: &CMatrix, sigma: Complex64) -> CMatrix {
    let mut a = m.clone();
    for i in 0..a.rows() {
        a[(i, i)] -= sigma;
    }
    a
}
