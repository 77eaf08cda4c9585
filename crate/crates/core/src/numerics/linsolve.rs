use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::{CMatrix, NumericsError};

/// Default relative determinant threshold for [`invert`].
pub const DEFAULT_INVERT_EPS: f64 = 1e-12;

/// LU factorisation with partial pivoting, `P A = L U` packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self, NumericsError> {
        if !a.is_square() {
            return Err(NumericsError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.rows();
        let mut d = Complex64::new(self.sign, 0.0);
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }

    pub fn min_pivot(&self) -> f64 {
        (0..self.lu.rows()).fold(f64::INFINITY, |acc, i| acc.min(self.lu[(i, i)].norm()))
    }

    /// Solves `A x = b`. Zero pivots yield non-finite output; callers check singularity first.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

pub fn determinant(a: &CMatrix) -> Result<Complex64, NumericsError> {
    Ok(Lu::new(a)?.determinant())
}

/// Inverse with partial pivoting; `Singular` when `|det M| <= eps * max|M_ij|^m`.
pub fn invert_with(a: &CMatrix, eps: f64) -> Result<CMatrix, NumericsError> {
    let lu = Lu::new(a)?;
    let n = a.rows();
    let scale = a.max_abs();
    let det = lu.determinant().norm();
    if scale == 0.0 || det <= eps * Float::powi(scale, n as i32) || lu.min_pivot() == 0.0 {
        return Err(NumericsError::Singular { det });
    }
    let mut inv = CMatrix::zeros(n, n);
    let mut e = alloc::vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        e[j] = Complex64::new(1.0, 0.0);
        let col = lu.solve(&e);
        inv.set_column(j, &col);
    }
    Ok(inv)
}

pub fn invert(a: &CMatrix) -> Result<CMatrix, NumericsError> {
    invert_with(a, DEFAULT_INVERT_EPS)
}
