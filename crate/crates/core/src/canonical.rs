//! Canonical frames of idempotents at semi-simple points, metric potentials and
//! the Levi-Civita connection expressed in the canonical frame.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::Error;
use crate::numerics::{invert, solve_eig, vec_norm, wirtinger_fd_along, CMatrix, FdConfig};
use crate::potential::{flat_eval, idx4, FlatPointEval, PotentialSpec};
use crate::report::{CheckEntry, VerificationReport};

/// Default relative eigenvalue gap below which a point counts as non-semi-simple.
pub const DEFAULT_EPS_SS: f64 = 1e-4;
/// Relative eigenvector residual above which `ℰ∘` is declared defective.
const DEFECT_RTOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How `η_αβ = e_α η_β` is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EtaDerivatives {
    /// Differentiating `e_α ∘ e_α = e_α` with exact fourth derivatives of `F`.
    Analytic,
    /// Wirtinger finite differences of `η_β` along `e_α`, frames matched to the centre.
    FiniteDifference(FdConfig),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameOptions {
    pub eps_ss: f64,
    pub eta_derivatives: EtaDerivatives,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { eps_ss: DEFAULT_EPS_SS, eta_derivatives: EtaDerivatives::Analytic }
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalFrame {
    pub point: Vec<Complex64>,
    /// Eigenvalues of `ℰ∘`, so that `ℰ = Σ u^α e_α`.
    pub u: Vec<Complex64>,
    /// Column `α` holds `e_α` in the flat basis.
    pub a: CMatrix,
    /// Inverse of `a`: row `α` holds the frame component `α` of each flat basis vector.
    pub a_inv: CMatrix,
    /// `η_α = g(e_α, e_α)`.
    pub eta: Vec<Complex64>,
    /// Entry `(α, β)` is `η_αβ = e_α η_β`.
    pub eta_d: CMatrix,
    /// `da[k] = ∂_{t^k} a`.
    pub da: Vec<CMatrix>,
    /// Entry `(k, β)` is `∂_{t^k} η_β`.
    pub deta_flat: CMatrix,
    /// Minimum pairwise `|u^α − u^β|`.
    pub gap: f64,
    /// Eigenvector residual of `ℰ∘`.
    pub eig_residual: f64,
    pub flat: FlatPointEval,
}

impl CanonicalFrame {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// Frame vector `e_α` in flat components.
    pub fn e(&self, alpha: usize) -> Vec<Complex64> {
        self.a.column(alpha)
    }

    /// Frame components of a flat-basis vector.
    pub fn to_frame(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.a_inv.mul_vec(x)
    }
}

/// Eigen-data only: `u`, `A`, `η`, the gap and residual.
struct FrameCore {
    u: Vec<Complex64>,
    a: CMatrix,
    eta: Vec<Complex64>,
    gap: f64,
    eig_residual: f64,
    flat: FlatPointEval,
}

fn frame_core(spec: &PotentialSpec, t: &[Complex64], eps_ss: f64) -> Result<FrameCore, Error> {
    let flat = flat_eval(spec, t)?;
    let m = flat.dim();
    let eig = solve_eig(&flat.u)?;
    let u = eig.eigenvalues;
    let umax = u.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let gap = min_gap(&u);
    let threshold = eps_ss * (1.0 + umax);
    if gap <= threshold {
        return Err(Error::NotSemisimple { gap, threshold });
    }
    if eig.residual > DEFECT_RTOL * (1.0 + flat.u.max_abs()) {
        return Err(Error::DefectiveU { residual: eig.residual });
    }
    let mut a = CMatrix::zeros(m, m);
    for alpha in 0..m {
        let v = eig.eigenvectors.column(alpha);
        // v ∘ v = c v for an eigenvector of a semi-simple algebra; e = v / c is idempotent.
        let vv = flat.product(&v, &v);
        let num: Complex64 = v.iter().zip(&vv).map(|(x, y)| x.conj() * y).sum();
        let c = num / Float::powi(vec_norm(&v), 2);
        if !(c.norm() > 1e-12 * (1.0 + vec_norm(&vv))) {
            return Err(Error::DegenerateIdempotent { scale: c.norm() });
        }
        let e: Vec<Complex64> = v.iter().map(|x| x / c).collect();
        a.set_column(alpha, &e);
    }
    let eta: Vec<Complex64> = (0..m).map(|al| flat.metric(&a.column(al), &a.column(al))).collect();
    Ok(FrameCore { u, a, eta, gap, eig_residual: eig.residual, flat })
}

fn min_gap(u: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            gap = gap.min((u[i] - u[j]).norm());
        }
    }
    gap
}

/// Canonical frame at `t` with analytic `η_αβ` and the default semi-simplicity threshold.
pub fn canonical_frame(spec: &PotentialSpec, t: &[Complex64], eps_ss: f64) -> Result<CanonicalFrame, Error> {
    canonical_frame_with(spec, t, &FrameOptions { eps_ss, ..FrameOptions::default() })
}

pub fn canonical_frame_with(
    spec: &PotentialSpec,
    t: &[Complex64],
    opts: &FrameOptions,
) -> Result<CanonicalFrame, Error> {
    let core = frame_core(spec, t, opts.eps_ss)?;
    let m = spec.dim();
    let a_inv = invert(&core.a)?;
    let f4 = spec.fourth_derivatives(t);
    let g_inv = &core.flat.g_inv;

    // ∂_k C_ij^l = Σ_p F_ijpk g^{pl}.
    let dcmix = |k: usize, i: usize, j: usize, l: usize| -> Complex64 {
        (0..m).map(|p| f4[idx4(m, i, j, p, k)] * g_inv[(p, l)]).sum()
    };

    // Differentiating e∘e = e: with b = A⁻¹ (∂_k C)(e_α, e_α), ∂_k e_α has frame
    // components b_γ (γ ≠ α) and −b_α.
    let mut da = Vec::with_capacity(m);
    for k in 0..m {
        let mut dak = CMatrix::zeros(m, m);
        for alpha in 0..m {
            let e = core.a.column(alpha);
            let mut b_flat = vec![ZERO; m];
            for i in 0..m {
                for j in 0..m {
                    let ee = e[i] * e[j];
                    if ee == ZERO {
                        continue;
                    }
                    for (l, b) in b_flat.iter_mut().enumerate() {
                        *b += ee * dcmix(k, i, j, l);
                    }
                }
            }
            let mut x = a_inv.mul_vec(&b_flat);
            x[alpha] = -x[alpha];
            dak.set_column(alpha, &core.a.mul_vec(&x));
        }
        da.push(dak);
    }

    // ∂_k η_β = 2 g(e_β, ∂_k e_β).
    let deta_flat = CMatrix::from_fn(m, m, |k, beta| 2.0 * core.flat.metric(&core.a.column(beta), &da[k].column(beta)));
    let mut eta_d =
        CMatrix::from_fn(m, m, |alpha, beta| (0..m).map(|k| core.a[(k, alpha)] * deta_flat[(k, beta)]).sum());

    if let EtaDerivatives::FiniteDifference(cfg) = opts.eta_derivatives {
        let reference = (core.u.clone(), core.gap);
        for alpha in 0..m {
            let dir = core.a.column(alpha);
            let d = wirtinger_fd_along(
                |p| {
                    let other = frame_core(spec, p, opts.eps_ss)?;
                    let perm = match_to(&reference.0, reference.1, &other.u)?;
                    Ok::<_, Error>(perm.iter().map(|&j| other.eta[j]).collect())
                },
                t,
                &dir,
                &cfg,
            )?;
            for beta in 0..m {
                eta_d[(alpha, beta)] = d[beta].holomorphic;
            }
        }
    }

    Ok(CanonicalFrame {
        point: t.to_vec(),
        u: core.u,
        a: core.a,
        a_inv,
        eta: core.eta,
        eta_d,
        da,
        deta_flat,
        gap: core.gap,
        eig_residual: core.eig_residual,
        flat: core.flat,
    })
}

/// Permutation `perm` with `other[perm[α]]` nearest to `reference[α]`, assigned greedily in
/// reference order; a shift above `gap / 4` is a frame discontinuity.
pub fn match_to(reference: &[Complex64], gap: f64, other: &[Complex64]) -> Result<Vec<usize>, Error> {
    let m = reference.len();
    let mut used = vec![false; m];
    let mut perm = Vec::with_capacity(m);
    for r in reference {
        let mut best = usize::MAX;
        let mut dist = f64::INFINITY;
        for (j, o) in other.iter().enumerate() {
            if !used[j] && (r - o).norm() < dist {
                dist = (r - o).norm();
                best = j;
            }
        }
        if best == usize::MAX || dist > gap / 4.0 {
            return Err(Error::FrameDiscontinuity { shift: dist, gap });
        }
        used[best] = true;
        perm.push(best);
    }
    Ok(perm)
}

/// Frame at `t` with its labels permuted to follow `reference`.
pub fn canonical_frame_matched(
    spec: &PotentialSpec,
    t: &[Complex64],
    reference: &CanonicalFrame,
    opts: &FrameOptions,
) -> Result<CanonicalFrame, Error> {
    let f = canonical_frame_with(spec, t, opts)?;
    let perm = match_to(&reference.u, reference.gap, &f.u)?;
    Ok(permute_frame(f, &perm))
}

fn permute_frame(f: CanonicalFrame, perm: &[usize]) -> CanonicalFrame {
    let m = perm.len();
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return f;
    }
    let cols = |x: &CMatrix| CMatrix::from_fn(x.rows(), m, |i, j| x[(i, perm[j])]);
    let rows = |x: &CMatrix| CMatrix::from_fn(m, x.cols(), |i, j| x[(perm[i], j)]);
    CanonicalFrame {
        point: f.point.clone(),
        u: perm.iter().map(|&p| f.u[p]).collect(),
        a: cols(&f.a),
        a_inv: rows(&f.a_inv),
        eta: perm.iter().map(|&p| f.eta[p]).collect(),
        eta_d: CMatrix::from_fn(m, m, |i, j| f.eta_d[(perm[i], perm[j])]),
        da: f.da.iter().map(cols).collect(),
        deta_flat: cols(&f.deta_flat),
        gap: f.gap,
        eig_residual: f.eig_residual,
        flat: f.flat,
    }
}

/// `Γ(e_α)` for each `α`: column `β` holds the frame components of `∇_{e_α} e_β`.
pub fn levi_civita_canonical(frame: &CanonicalFrame) -> Vec<CMatrix> {
    let m = frame.dim();
    let (eta, ed) = (&frame.eta, &frame.eta_d);
    (0..m)
        .map(|alpha| {
            let mut gamma = CMatrix::zeros(m, m);
            for beta in 0..m {
                if beta != alpha {
                    gamma[(alpha, beta)] += 0.5 * ed[(beta, alpha)] / eta[alpha];
                    gamma[(beta, beta)] += 0.5 * ed[(alpha, beta)] / eta[beta];
                } else {
                    gamma[(alpha, alpha)] += 0.5 * ed[(alpha, alpha)] / eta[alpha];
                    for g in 0..m {
                        if g != alpha {
                            gamma[(g, alpha)] -= 0.5 * ed[(g, alpha)] / eta[g];
                        }
                    }
                }
            }
            gamma
        })
        .collect()
}

/// `max_α |ℰη_α + d η_α|` with `ℰη_α = Σ_β u^β η_βα`.
pub fn check_euler_eta(spec: &PotentialSpec, frame: &CanonicalFrame, tol: f64) -> VerificationReport {
    let m = frame.dim();
    let d = spec.euler().d;
    let mut worst = 0.0_f64;
    for alpha in 0..m {
        let e_eta: Complex64 = (0..m).map(|beta| frame.u[beta] * frame.eta_d[(beta, alpha)]).sum();
        worst = worst.max((e_eta + frame.eta[alpha] * d).norm());
    }
    let mut report = VerificationReport::new();
    report.push(CheckEntry::new("euler_eta", worst, tol));
    report
}

/// Frame with prescribed `η`, zero `η_αβ` and `u = (0, 1, …)`, for unit tests of consumers.
#[cfg(test)]
pub(crate) fn synthetic_frame(eta: &[Complex64]) -> CanonicalFrame {
    let m = eta.len();
    let id = CMatrix::identity(m);
    CanonicalFrame {
        point: vec![ZERO; m],
        u: (0..m).map(|i| Complex64::new(i as f64, 0.0)).collect(),
        a: id.clone(),
        a_inv: id.clone(),
        eta: eta.to_vec(),
        eta_d: CMatrix::zeros(m, m),
        da: vec![CMatrix::zeros(m, m); m],
        deta_flat: CMatrix::zeros(m, m),
        gap: 1.0,
        eig_residual: 0.0,
        flat: FlatPointEval {
            point: vec![ZERO; m],
            c3: vec![ZERO; m * m * m],
            cmix: vec![ZERO; m * m * m],
            g: id.clone(),
            g_inv: id.clone(),
            u: id,
            euler: vec![ZERO; m],
        },
    }
}
