//! Pointwise residuals of the CV/CDV axioms for a constructed structure.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{
    endo_commutator, endo_derivative, frame_fd_along, h_adjoint, kappa_conjugate, pack, unpack, CdvStructure,
    CheckConfig,
};
use crate::canonical::CanonicalFrame;
use crate::error::Error;
use crate::numerics::{invert, CMatrix};
use crate::potential::PotentialSpec;
use crate::report::{CheckEntry, VerificationReport};

/// `max |K̄K − I|`, the residual of `κ² = Id`.
pub fn involution_residual(k: &CMatrix) -> f64 {
    (&(&k.conj() * k) - &CMatrix::identity(k.rows())).max_abs()
}

/// Derivatives along `e_α` of `K`, `h`, the stored Chern forms and `u`, all in the moving frame.
struct DirectionalData {
    dk: CMatrix,
    dh: CMatrix,
    /// `∂̄_{e_α} ω(e_γ)` for each `γ`.
    dbar_omega: Vec<CMatrix>,
    du: Vec<Complex64>,
    dbar_u: Vec<Complex64>,
}

fn frame_data(f: &CanonicalFrame, d: f64) -> Vec<Complex64> {
    let s = super::construct_canonical_cdv(f, d);
    let mut out = Vec::new();
    pack(&mut out, &s.k);
    pack(&mut out, &s.h);
    for w in &s.omega {
        pack(&mut out, w);
    }
    out.extend_from_slice(&f.u);
    out
}

fn directional(
    spec: &PotentialSpec,
    cdv: &CdvStructure,
    alpha: usize,
    cfg: &CheckConfig,
) -> Result<DirectionalData, Error> {
    let m = cdv.dim();
    let frame = &cdv.frame;
    let der = frame_fd_along(spec, frame, &frame.e(alpha), cfg, |f| Ok(frame_data(f, cdv.d)))?;
    let hol: Vec<Complex64> = der.iter().map(|w| w.holomorphic).collect();
    let anti: Vec<Complex64> = der.iter().map(|w| w.antiholomorphic).collect();
    let mm = m * m;
    let mats = unpack(&hol[..(2 + m) * mm], m);
    Ok(DirectionalData {
        dk: mats[0].clone(),
        dh: mats[1].clone(),
        dbar_omega: unpack(&anti[2 * mm..(2 + m) * mm], m),
        du: hol[(2 + m) * mm..].to_vec(),
        dbar_u: anti[(2 + m) * mm..].to_vec(),
    })
}

/// One residual per axiom of the canonical structure at its point.
///
/// Algebraic entries use `cfg.algebraic_tol`; entries backed by a finite difference of
/// frame data recomputed at stencil points use `cfg.fd_tol`.
pub fn verify_cv_axioms(
    spec: &PotentialSpec,
    cdv: &CdvStructure,
    cfg: &CheckConfig,
) -> Result<VerificationReport, Error> {
    let m = cdv.dim();
    let (alg, fdt) = (cfg.algebraic_tol, cfg.fd_tol);
    let g = cdv.g();
    let g_inv = invert(&g)?;
    let h_inv = invert(&cdv.h)?;
    let mut r = VerificationReport::new();

    r.check("kappa_involution", involution_residual(&cdv.k), alg);
    let reality = (&cdv.h.conj() - &(&cdv.k * &g)).max_abs();
    let inverse_identity = (&h_inv - &(&(&g_inv.conj() * &cdv.h.conj()) * &g_inv)).max_abs();
    r.check("h_real_structure", reality, alg);
    r.check("h_inverse_identity", inverse_identity, alg);
    let hermitian = (&cdv.h - &cdv.h.adjoint()).max_abs();
    r.check("h_hermitian", hermitian, alg);
    let min_h = (0..m).map(|a| cdv.h[(a, a)].re).fold(f64::INFINITY, f64::min);
    r.push(CheckEntry::exceeds("h_positive", min_h, 0.0));

    let mut higgs = 0.0_f64;
    let mut ctilde = 0.0_f64;
    for b in 0..m {
        let adj = h_adjoint(&cdv.cmats[b], &cdv.h)?;
        higgs = higgs.max((&adj - &kappa_conjugate(&cdv.cmats[b], &cdv.k)).max_abs());
        ctilde = ctilde.max((&cdv.ctilde[b] - &cdv.cmats[b]).max_abs());
    }
    r.check("higgs_adjoint", higgs, alg);
    r.check("ctilde_equals_c", ctilde, alg);
    let u_adj = (&h_adjoint(&cdv.umat, &cdv.h)? - &kappa_conjugate(&cdv.umat, &cdv.k)).max_abs();
    r.check("u_adjoint", u_adj, alg);

    r.check("q_zero", cdv.q.max_abs(), alg);
    r.check("q_self_adjoint", (&cdv.q - &h_adjoint(&cdv.q, &cdv.h)?).max_abs(), alg);
    r.check("q_kappa_antisymmetric", (&cdv.q + &kappa_conjugate(&cdv.q, &cdv.k)).max_abs(), alg);
    // Q = D_ℰ − ℒ_ℰ − (2−d)/2 with ℒ_ℰ e_α = −e_α.
    let mut q_def = CMatrix::identity(m).scale(Complex64::new(cdv.d / 2.0, 0.0));
    for b in 0..m {
        q_def = &q_def + &cdv.omega[b].scale(cdv.frame.u[b]);
    }
    r.check("q_definition", (&q_def - &cdv.q).max_abs(), alg);
    // D'(Q) + [Φ, κ𝒰κ] with D'(Q) = 0 for constant Q = 0.
    let kuk = kappa_conjugate(&cdv.umat, &cdv.k);
    let dq = (0..m).map(|a| endo_commutator(&cdv.phi(a), &kuk).max_abs()).fold(0.0, f64::max);
    r.check("q_derivative_identity", dq, alg);

    let dirs: Vec<DirectionalData> = (0..m).map(|a| directional(spec, cdv, a, cfg)).collect::<Result<_, _>>()?;
    // Chern forms recomputed as (∂h)h⁻¹.
    let omega_fd: Vec<CMatrix> = dirs.iter().map(|dd| &dd.dh * &h_inv).collect();

    let chern = (0..m).map(|a| (&omega_fd[a] - &cdv.omega[a]).max_abs()).fold(0.0, f64::max);
    r.check("chern_form", chern, fdt);

    let kappa_par = (0..m).map(|a| (&dirs[a].dk + &(&cdv.k * &cdv.omega[a])).max_abs()).fold(0.0, f64::max);
    r.check("kappa_parallel", kappa_par, fdt);

    // D'(Φ)(e_α, e_β) for constant Φ matrices, plus the off-diagonal relation set.
    let zero = CMatrix::zeros(m, m);
    let mut dphi = 0.0_f64;
    for a in 0..m {
        for b in 0..m {
            let lhs = endo_derivative(&zero, &cdv.phi(b), &omega_fd[a]);
            let rhs = endo_derivative(&zero, &cdv.phi(a), &omega_fd[b]);
            dphi = dphi.max((&lhs - &rhs).max_abs());
            if a != b {
                dphi = dphi.max((omega_fd[a][(a, b)] + omega_fd[b][(a, b)]).norm());
                for c in 0..m {
                    if c != a && c != b {
                        dphi = dphi.max(omega_fd[c][(a, b)].norm());
                    }
                }
            }
        }
    }
    r.check("d_prime_phi", dphi, fdt);

    // ∂̄_{e_β} ω(e_α) = [C̃^(β), C^(α)] with the endomorphism commutator.
    let mut tt = 0.0_f64;
    let mut holo = 0.0_f64;
    for (b, dd) in dirs.iter().enumerate() {
        for a in 0..m {
            let comm = endo_commutator(&cdv.ctilde[b], &cdv.cmats[a]);
            tt = tt.max((&dd.dbar_omega[a] - &comm).max_abs());
            holo = holo.max(dd.dbar_omega[a].max_abs());
        }
    }
    r.check("tt_star", tt, fdt);
    r.check("omega_holomorphic", holo, fdt);

    // D'_e e = Σ_{α,β} D'_{e_α} e_β.
    let mut de_e = vec![Complex64::new(0.0, 0.0); m];
    for w in &omega_fd {
        for b in 0..m {
            for (c, x) in de_e.iter_mut().enumerate() {
                *x += w[(b, c)];
            }
        }
    }
    r.check("unit_parallel", de_e.iter().fold(0.0, |a, z| a.max(z.norm())), fdt);

    let mut coords = 0.0_f64;
    for (b, dd) in dirs.iter().enumerate() {
        for a in 0..m {
            let want = if a == b { 1.0 } else { 0.0 };
            coords = coords.max((dd.du[a] - want).norm()).max(dd.dbar_u[a].norm());
        }
    }
    r.check("canonical_coordinates", coords, fdt);
    Ok(r)
}
