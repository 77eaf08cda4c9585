//! Harmonic potential `P` of the canonical structure and the residuals of its defining system.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{endo_commutator, endo_derivative, frame_fd_along, h_adjoint, pack, unpack, CdvStructure, CheckConfig};
use crate::canonical::{levi_civita_canonical, CanonicalFrame};
use crate::error::Error;
use crate::numerics::{invert, CMatrix};
use crate::potential::PotentialSpec;
use crate::report::VerificationReport;

/// Row-source matrices in the canonical frame: `p[β][α] = P_β^α`, so `P e_β = Σ_α P_β^α e_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicData {
    pub p: CMatrix,
    pub pdag: CMatrix,
    /// `𝒱 = ∇ℰ − ((2−d)/2) Id`.
    pub v: CMatrix,
}

/// `P_β^β = −u^β`, `P_β^α = conj(η_αβ) η_β / 2|η_α η_β|`; `P†` from its closed form and
/// `𝒱` from `∇_{e_α}ℰ = e_α + Σ_β u^β ∇_{e_α} e_β`.
pub fn harmonic_potential(frame: &CanonicalFrame, d: f64) -> HarmonicData {
    let m = frame.dim();
    let (u, eta, ed) = (&frame.u, &frame.eta, &frame.eta_d);
    let p = CMatrix::from_fn(m, m, |b, a| {
        if a == b {
            -u[b]
        } else {
            ed[(a, b)].conj() * eta[b] / (2.0 * (eta[a] * eta[b]).norm())
        }
    });
    let pdag = CMatrix::from_fn(m, m, |a, b| if a == b { -u[b].conj() } else { ed[(a, b)] / (2.0 * eta[b]) });
    let gamma = levi_civita_canonical(frame);
    let shift = 1.0 - (2.0 - d) / 2.0;
    let v = CMatrix::from_fn(m, m, |a, c| {
        let diag = if a == c { Complex64::new(shift, 0.0) } else { Complex64::new(0.0, 0.0) };
        diag + (0..m).map(|b| u[b] * gamma[a][(c, b)]).sum::<Complex64>()
    });
    HarmonicData { p, pdag, v }
}

/// Defining system of the harmonic potential at the structure's point.
pub fn verify_harmonic(
    spec: &PotentialSpec,
    cdv: &CdvStructure,
    hd: &HarmonicData,
    cfg: &CheckConfig,
) -> Result<VerificationReport, Error> {
    let d = cdv.d;
    verify_harmonic_with(spec, cdv, hd, cfg, |f| Ok(harmonic_potential(f, d)))
}

/// As [`verify_harmonic`], with `make` supplying the harmonic data at finite-difference
/// stencil points; `hd` is used at the centre.
pub fn verify_harmonic_with<F>(
    spec: &PotentialSpec,
    cdv: &CdvStructure,
    hd: &HarmonicData,
    cfg: &CheckConfig,
    mut make: F,
) -> Result<VerificationReport, Error>
where
    F: FnMut(&CanonicalFrame) -> Result<HarmonicData, Error>,
{
    let m = cdv.dim();
    let frame = &cdv.frame;
    let (alg, fdt) = (cfg.algebraic_tol, cfg.fd_tol);
    let mut r = VerificationReport::new();

    let diag_law = (0..m).map(|b| (hd.p[(b, b)] + frame.u[b]).norm()).fold(0.0, f64::max);
    r.check("harmonic_diagonal_law", diag_law, alg);
    r.check("harmonic_pdag_adjoint", (&hd.pdag - &h_adjoint(&hd.p, &cdv.h)?).max_abs(), alg);

    let mut dp_phi = 0.0_f64;
    for a in 0..m {
        let der = frame_fd_along(spec, frame, &frame.e(a), cfg, |f| {
            let mut out = Vec::with_capacity(m * m);
            pack(&mut out, &make(f)?.p);
            Ok(out)
        })?;
        let hol: Vec<Complex64> = der.iter().map(|w| w.holomorphic).collect();
        let dp = unpack(&hol, m).remove(0);
        let dprime_p = endo_derivative(&dp, &hd.p, &cdv.omega[a]);
        dp_phi = dp_phi.max((&dprime_p - &cdv.phi(a)).max_abs());
    }
    r.check("harmonic_dp_phi", dp_phi, fdt);

    let gamma = levi_civita_canonical(frame);
    let conn = (0..m)
        .map(|a| {
            let lc_row = gamma[a].transpose();
            (&(&cdv.omega[a] - &lc_row) + &endo_commutator(&hd.pdag, &cdv.phi(a))).max_abs()
        })
        .fold(0.0, f64::max);
    r.check("harmonic_connection", conn, fdt);

    let g = cdv.g();
    let g_adj = (&(&invert(&g)? * &hd.p) * &g).transpose();
    r.check("harmonic_p_self_adjoint", (&g_adj - &hd.p).max_abs(), fdt);

    let v_comm = (&hd.v + &endo_commutator(&hd.pdag, &cdv.umat)).max_abs();
    r.check("harmonic_v_commutator", v_comm, fdt);
    Ok(r)
}
