//! Frobenius potentials in flat coordinates: exact derivatives, the flat-frame
//! multiplication tensors and the structural checks (WDVV, unit, homogeneity).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Error;
use crate::numerics::{determinant, invert, CMatrix};
use crate::report::{CheckEntry, VerificationReport};

/// Threshold on `|det g|` below which the metric is rejected.
pub const DEGENERATE_METRIC_EPS: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `coeff * t^powers`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub powers: Vec<u32>,
}

/// `coeff * t^powers * exp(Σ w_i t^i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub coeff: Complex64,
    pub powers: Vec<u32>,
    pub linear_form: Vec<Complex64>,
}

/// Euler field `Σ (d_i t^i + r_i) ∂_i` with conformal dimension `d` and potential degree `d_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerData {
    pub degrees: Vec<f64>,
    pub shifts: Vec<f64>,
    pub d: f64,
    pub d_f: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    dim: usize,
    monomials: Vec<Monomial>,
    exponentials: Vec<ExpTerm>,
    euler: EulerData,
    normal_form: bool,
}

impl PotentialSpec {
    /// Validates shapes, finiteness, the Euler-shift rule, the normal-form degree
    /// relations when declared, and that `g = C_1ij` is constant and nondegenerate.
    pub fn new(
        dim: usize,
        monomials: Vec<Monomial>,
        exponentials: Vec<ExpTerm>,
        euler: EulerData,
        normal_form: bool,
    ) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        for (k, mono) in monomials.iter().enumerate() {
            if mono.powers.len() != dim {
                return Err(Error::Validation(format!(
                    "monomial {k} has {} powers, expected {dim}",
                    mono.powers.len()
                )));
            }
            if !finite(mono.coeff) {
                return Err(Error::Validation(format!("monomial {k} has a non-finite coefficient")));
            }
        }
        for (k, term) in exponentials.iter().enumerate() {
            if term.powers.len() != dim || term.linear_form.len() != dim {
                return Err(Error::Validation(format!(
                    "exponential {k} has {} powers and {} linear-form entries, expected {dim}",
                    term.powers.len(),
                    term.linear_form.len()
                )));
            }
            if !finite(term.coeff) || !term.linear_form.iter().all(|w| finite(*w)) {
                return Err(Error::Validation(format!("exponential {k} has non-finite data")));
            }
        }
        if euler.degrees.len() != dim || euler.shifts.len() != dim {
            return Err(Error::Validation(format!(
                "Euler data has {} degrees and {} shifts, expected {dim}",
                euler.degrees.len(),
                euler.shifts.len()
            )));
        }
        let reals = euler.degrees.iter().chain(&euler.shifts).chain([&euler.d, &euler.d_f]);
        if !reals.into_iter().all(|x| x.is_finite()) {
            return Err(Error::Validation("Euler data must be finite".into()));
        }
        for i in 0..dim {
            if euler.shifts[i] != 0.0 && euler.degrees[i] != 0.0 {
                return Err(Error::Validation(format!(
                    "shift r_{} is nonzero but degree d_{} = {} is not",
                    i + 1,
                    i + 1,
                    euler.degrees[i]
                )));
            }
        }
        if normal_form {
            const TOL: f64 = 1e-12;
            if (euler.degrees[0] - 1.0).abs() > TOL {
                return Err(Error::NotNormalForm("d_1 must equal 1"));
            }
            for i in 0..dim {
                if (euler.degrees[i] + euler.degrees[dim - 1 - i] - (2.0 - euler.d)).abs() > TOL {
                    return Err(Error::NotNormalForm("degrees must satisfy d_i + d_(m+1-i) = 2 - d"));
                }
            }
            if (euler.d_f - (3.0 - euler.d)).abs() > TOL {
                return Err(Error::NotNormalForm("d_F must equal 3 - d"));
            }
        }
        let spec = Self { dim, monomials, exponentials, euler, normal_form };
        spec.validate_metric()?;
        if normal_form && !spec.metric().is_antidiagonal_identity() {
            return Err(Error::NotNormalForm("g must be the antidiagonal identity"));
        }
        Ok(spec)
    }

    fn validate_metric(&self) -> Result<(), Error> {
        let origin = vec![ZERO; self.dim];
        let probe: Vec<Complex64> =
            (0..self.dim).map(|i| Complex64::new(0.31 + 0.17 * i as f64, -0.23 + 0.11 * i as f64)).collect();
        let g0 = self.metric_at(&origin);
        let g1 = self.metric_at(&probe);
        let scale = 1.0 + g0.max_abs();
        if !g0.is_finite() || !g1.is_finite() || (&g0 - &g1).max_abs() > 1e-14 * scale {
            return Err(Error::Validation("g = C_1ij must be constant in t".into()));
        }
        let det = determinant(&g0)?.norm();
        if det < DEGENERATE_METRIC_EPS {
            return Err(Error::DegenerateMetric { det });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn exponentials(&self) -> &[ExpTerm] {
        &self.exponentials
    }

    pub fn euler(&self) -> &EulerData {
        &self.euler
    }

    pub fn normal_form(&self) -> bool {
        self.normal_form
    }

    /// Copy with replaced Euler data; the normal-form flag is dropped so that
    /// deliberately inconsistent data can be used as a negative control.
    pub fn with_euler(&self, euler: EulerData) -> Result<Self, Error> {
        Self::new(self.dim, self.monomials.clone(), self.exponentials.clone(), euler, false)
    }

    /// Components `E^i = d_i t^i + r_i` of the Euler field.
    pub fn euler_vector(&self, t: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim).map(|i| t[i] * self.euler.degrees[i] + self.euler.shifts[i]).collect()
    }

    /// Flat metric `g_ij = C_1ij`; constant by validation.
    pub fn metric(&self) -> CMatrix {
        self.metric_at(&vec![ZERO; self.dim])
    }

    fn metric_at(&self, t: &[Complex64]) -> CMatrix {
        let m = self.dim;
        let mut idx = vec![0u32; m];
        CMatrix::from_fn(m, m, |i, j| {
            idx.iter_mut().for_each(|x| *x = 0);
            idx[0] += 1;
            idx[i] += 1;
            idx[j] += 1;
            self.eval_derivative(&idx, t)
        })
    }

    /// Exact partial derivative `∂^multi_index F` at `t`.
    pub fn eval_derivative(&self, multi_index: &[u32], t: &[Complex64]) -> Complex64 {
        assert_eq!(multi_index.len(), self.dim, "multi-index length must equal dim");
        assert_eq!(t.len(), self.dim, "point length must equal dim");
        let mut total = ZERO;
        for mono in &self.monomials {
            let mut term = mono.coeff;
            for i in 0..self.dim {
                let (p, a) = (mono.powers[i], multi_index[i]);
                if a > p {
                    term = ZERO;
                    break;
                }
                term *= falling(p, a) * t[i].powu(p - a);
            }
            total += term;
        }
        for e in &self.exponentials {
            let mut term = e.coeff;
            let mut exponent = ZERO;
            for i in 0..self.dim {
                exponent += e.linear_form[i] * t[i];
                // Leibniz: ∂^a (t^p e^{w t}) = Σ_k C(a,k) p!/(p-k)! t^{p-k} w^{a-k} e^{w t}.
                let (p, a, w) = (e.powers[i], multi_index[i], e.linear_form[i]);
                let mut factor = ZERO;
                for k in 0..=a.min(p) {
                    factor += binomial(a, k) * falling(p, k) * t[i].powu(p - k) * w.powu(a - k);
                }
                term *= factor;
            }
            total += term * exponent.exp();
        }
        total
    }

    /// `F_ijk` as a dense `m^3` array indexed by [`idx3`].
    pub fn third_derivatives(&self, t: &[Complex64]) -> Vec<Complex64> {
        self.symmetric_derivatives(t, 3)
    }

    /// `F_ijkl` as a dense `m^4` array indexed by [`idx4`].
    pub fn fourth_derivatives(&self, t: &[Complex64]) -> Vec<Complex64> {
        self.symmetric_derivatives(t, 4)
    }

    /// Each unordered index tuple is evaluated once and copied, so permuted entries are bit-identical.
    fn symmetric_derivatives(&self, t: &[Complex64], order: u32) -> Vec<Complex64> {
        let m = self.dim;
        let n = m.pow(order);
        let mut out = vec![ZERO; n];
        let mut cache: Vec<(Vec<u32>, Complex64)> = Vec::new();
        for flat in 0..n {
            let mut multi = vec![0u32; m];
            let mut r = flat;
            for _ in 0..order {
                multi[r % m] += 1;
                r /= m;
            }
            let value = match cache.iter().find(|(k, _)| *k == multi) {
                Some((_, v)) => *v,
                None => {
                    let v = self.eval_derivative(&multi, t);
                    cache.push((multi, v));
                    v
                }
            };
            out[flat] = value;
        }
        out
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `p! / (p - k)!`.
fn falling(p: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (p - j) as f64)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[inline]
pub fn idx3(m: usize, i: usize, j: usize, k: usize) -> usize {
    (i * m + j) * m + k
}

#[inline]
pub fn idx4(m: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * m + j) * m + k) * m + l
}

trait AntidiagonalIdentity {
    fn is_antidiagonal_identity(&self) -> bool;
}

impl AntidiagonalIdentity for CMatrix {
    fn is_antidiagonal_identity(&self) -> bool {
        let m = self.rows();
        (0..m).all(|i| {
            (0..m).all(|j| {
                let want = if i + j == m - 1 { 1.0 } else { 0.0 };
                (self[(i, j)] - want).norm() <= 1e-14
            })
        })
    }
}

/// Flat-frame data at one point.
#[derive(Clone, Debug)]
pub struct FlatPointEval {
    pub point: Vec<Complex64>,
    /// `C_ijk = ∂_i ∂_j ∂_k F`, indexed by [`idx3`].
    pub c3: Vec<Complex64>,
    /// `C_ij^k = Σ_l C_ijl g^{lk}`, indexed by [`idx3`] as `(i, j, k)`.
    pub cmix: Vec<Complex64>,
    pub g: CMatrix,
    pub g_inv: CMatrix,
    /// Matrix of `ℰ∘` in the flat basis: column `j` holds the components of `ℰ ∘ ∂_j`.
    pub u: CMatrix,
    /// Components of the Euler field.
    pub euler: Vec<Complex64>,
}

impl FlatPointEval {
    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c3[idx3(self.dim(), i, j, k)]
    }

    #[inline]
    pub fn cm(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.cmix[idx3(self.dim(), i, j, k)]
    }

    /// Matrix of `∂_i ∘` in the flat basis: entry `(k, j)` is `C_ij^k`.
    pub fn mult_matrix(&self, i: usize) -> CMatrix {
        let m = self.dim();
        CMatrix::from_fn(m, m, |k, j| self.cm(i, j, k))
    }

    /// Components of `X ∘ Y` for flat-basis vectors.
    pub fn product(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let m = self.dim();
        let mut out = vec![ZERO; m];
        for i in 0..m {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..m {
                let xy = x[i] * y[j];
                if xy == ZERO {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += xy * self.cm(i, j, k);
                }
            }
        }
        out
    }

    /// `g(X, Y)`, complex bilinear.
    pub fn metric(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let m = self.dim();
        let mut s = ZERO;
        for i in 0..m {
            for j in 0..m {
                s += x[i] * self.g[(i, j)] * y[j];
            }
        }
        s
    }
}

pub fn flat_eval(spec: &PotentialSpec, t: &[Complex64]) -> Result<FlatPointEval, Error> {
    let m = spec.dim();
    if t.len() != m {
        return Err(Error::Validation(format!("point has {} coordinates, expected {m}", t.len())));
    }
    if !t.iter().all(|z| finite(*z)) {
        return Err(Error::Validation("point must be finite".into()));
    }
    let c3 = spec.third_derivatives(t);
    if !c3.iter().all(|z| finite(*z)) {
        return Err(Error::Numerics(crate::numerics::NumericsError::NonFinite));
    }
    let g = CMatrix::from_fn(m, m, |i, j| c3[idx3(m, 0, i, j)]);
    let det = determinant(&g)?.norm();
    if det < DEGENERATE_METRIC_EPS {
        return Err(Error::DegenerateMetric { det });
    }
    let g_inv = invert(&g)?;
    let mut cmix = vec![ZERO; m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                cmix[idx3(m, i, j, k)] = (0..m).map(|l| c3[idx3(m, i, j, l)] * g_inv[(l, k)]).sum();
            }
        }
    }
    let euler = spec.euler_vector(t);
    let u = CMatrix::from_fn(m, m, |k, j| (0..m).map(|i| euler[i] * cmix[idx3(m, i, j, k)]).sum());
    Ok(FlatPointEval { point: t.to_vec(), c3, cmix, g, g_inv, u, euler })
}

/// Max over points and indices of `|Σ_l C_ij^l C_lk^p − Σ_l C_jk^l C_il^p|` as entry `wdvv`;
/// for a three-dimensional normal-form spec also `wdvv_m3_scalar`, the max of
/// `|C_223^2 − C_222 C_233 − C_333|`.
pub fn check_wdvv(spec: &PotentialSpec, points: &[Vec<Complex64>], tol: f64) -> Result<VerificationReport, Error> {
    let m = spec.dim();
    let mut full = 0.0_f64;
    let mut scalar = 0.0_f64;
    for t in points {
        let fe = flat_eval(spec, t)?;
        full = full.max(associativity_residual(&fe));
        if m == 3 && spec.normal_form() {
            scalar = scalar.max(wdvv_m3_scalar(&fe).norm());
        }
    }
    let mut report = VerificationReport::new();
    let mut push = |name: &str, r: f64| {
        let mut e = CheckEntry::new(name, r, tol);
        e.points_checked = points.len();
        report.push(e);
    };
    push("wdvv", full);
    if m == 3 && spec.normal_form() {
        push("wdvv_m3_scalar", scalar);
    }
    Ok(report)
}

pub fn associativity_residual(fe: &FlatPointEval) -> f64 {
    let m = fe.dim();
    let mut r = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for p in 0..m {
                    let mut s = ZERO;
                    for l in 0..m {
                        s += fe.cm(i, j, l) * fe.cm(l, k, p) - fe.cm(j, k, l) * fe.cm(i, l, p);
                    }
                    r = r.max(s.norm());
                }
            }
        }
    }
    r
}

/// `C_223^2 − C_222 C_233 − C_333` in one-based indices.
pub fn wdvv_m3_scalar(fe: &FlatPointEval) -> Complex64 {
    let c223 = fe.c(1, 1, 2);
    c223 * c223 - fe.c(1, 1, 1) * fe.c(1, 2, 2) - fe.c(2, 2, 2)
}

/// Max over points and `(a, b, c)` of the third derivative of `ℒ_ℰ F − d_F F`:
/// `Σ_i E^i F_iabc + (d_a + d_b + d_c − d_F) F_abc`.
pub fn check_homogeneity(spec: &PotentialSpec, points: &[Vec<Complex64>], tol: f64) -> VerificationReport {
    let m = spec.dim();
    let eu = spec.euler();
    let mut worst = 0.0_f64;
    for t in points {
        let f3 = spec.third_derivatives(t);
        let f4 = spec.fourth_derivatives(t);
        let e = spec.euler_vector(t);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let mut s: Complex64 = (0..m).map(|i| e[i] * f4[idx4(m, i, a, b, c)]).sum();
                    s += f3[idx3(m, a, b, c)] * (eu.degrees[a] + eu.degrees[b] + eu.degrees[c] - eu.d_f);
                    worst = worst.max(s.norm());
                }
            }
        }
    }
    let mut report = VerificationReport::new();
    let mut e = CheckEntry::new("homogeneity", worst, tol);
    e.points_checked = points.len();
    report.push(e);
    report
}

/// Unit law `C_1j^k = δ_j^k` and constancy of `g` across the points.
pub fn check_flat(spec: &PotentialSpec, points: &[Vec<Complex64>], tol: f64) -> Result<VerificationReport, Error> {
    let m = spec.dim();
    let g_ref = spec.metric();
    let mut unit = 0.0_f64;
    let mut drift = 0.0_f64;
    for t in points {
        let fe = flat_eval(spec, t)?;
        for j in 0..m {
            for k in 0..m {
                let want = if j == k { 1.0 } else { 0.0 };
                unit = unit.max((fe.cm(0, j, k) - want).norm());
            }
        }
        drift = drift.max((&fe.g - &g_ref).max_abs());
    }
    let mut report = VerificationReport::new();
    for (name, r) in [("unit_law", unit), ("metric_constant", drift)] {
        let mut e = CheckEntry::new(name, r, tol);
        e.points_checked = points.len();
        report.push(e);
    }
    Ok(report)
}
