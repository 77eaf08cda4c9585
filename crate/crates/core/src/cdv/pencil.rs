//! Curvature of the meromorphic pencil `D + C/z + zκCκ + (𝒰/z − 𝒬 − zκ𝒰κ) dz/z`.
//!
//! Connection matrices act on column vectors of frame components, so every row-source
//! matrix enters transposed. `z` is treated as one more complex coordinate.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{construct_canonical_cdv, kappa_conjugate, pack, unpack, CdvStructure, CheckConfig};
use crate::canonical::canonical_frame_matched;
use crate::error::Error;
use crate::numerics::{wirtinger_fd_along, CMatrix};
use crate::potential::PotentialSpec;
use crate::report::VerificationReport;

/// `[A_α…, A_ᾱ…, A_z]` at one frame and `z`, with `q` standing in for `𝒬`.
fn pencil_pieces(cdv: &CdvStructure, z: Complex64, q: &CMatrix) -> Vec<CMatrix> {
    let m = cdv.dim();
    let mut out = Vec::with_capacity(2 * m + 1);
    for a in 0..m {
        out.push(&cdv.omega[a].transpose() + &cdv.phi(a).transpose().scale(1.0 / z));
    }
    for a in 0..m {
        out.push(kappa_conjugate(&cdv.phi(a), &cdv.k).transpose().scale(z));
    }
    let kuk = kappa_conjugate(&cdv.umat, &cdv.k);
    let az = &(&cdv.umat.transpose().scale(1.0 / z) - &q.transpose()) - &kuk.transpose().scale(z);
    out.push(az.scale(1.0 / z));
    out
}

/// Max curvature component over `z_samples` and all pairs among `e_α, ē_α, ∂_z, ∂_z̄`.
pub fn pencil_curvature(
    spec: &PotentialSpec,
    cdv: &CdvStructure,
    z_samples: &[Complex64],
    cfg: &CheckConfig,
) -> Result<VerificationReport, Error> {
    let q = cdv.q.clone();
    pencil_curvature_with(spec, cdv, z_samples, cfg, &q)
}

/// As [`pencil_curvature`] with `𝒬` replaced by the constant matrix `q` everywhere.
pub fn pencil_curvature_with(
    spec: &PotentialSpec,
    cdv: &CdvStructure,
    z_samples: &[Complex64],
    cfg: &CheckConfig,
    q: &CMatrix,
) -> Result<VerificationReport, Error> {
    let m = cdv.dim();
    let centre = &cdv.frame;
    let opts = cfg.frame_options();
    let d = cdv.d;
    let pieces = 2 * m + 1;
    let mut worst = 0.0_f64;
    for &z in z_samples {
        if z.norm() == 0.0 {
            return Err(Error::Validation("pencil parameter must be nonzero".into()));
        }
        let mut point = centre.point.clone();
        point.push(z);
        let eval = |p: &[Complex64]| -> Result<Vec<Complex64>, Error> {
            let f = canonical_frame_matched(spec, &p[..m], centre, &opts)?;
            let mut out = Vec::with_capacity(pieces * m * m);
            for a in pencil_pieces(&construct_canonical_cdv(&f, d), p[m], q) {
                pack(&mut out, &a);
            }
            Ok(out)
        };
        // Labels 0..m: e_α, m..2m: ē_α, 2m: ∂_z, 2m+1: ∂_z̄.
        let mut deriv: Vec<Vec<CMatrix>> = alloc::vec![Vec::new(); 2 * m + 2];
        for dir in 0..=m {
            let mut v = alloc::vec![Complex64::new(0.0, 0.0); m + 1];
            if dir < m {
                v[..m].copy_from_slice(&centre.e(dir));
            } else {
                v[m] = Complex64::new(1.0, 0.0);
            }
            let der = wirtinger_fd_along(&eval, &point, &v, &cfg.fd)?;
            let hol: Vec<Complex64> = der.iter().map(|w| w.holomorphic).collect();
            let anti: Vec<Complex64> = der.iter().map(|w| w.antiholomorphic).collect();
            let (ih, ia) = if dir < m { (dir, m + dir) } else { (2 * m, 2 * m + 1) };
            deriv[ih] = unpack(&hol, m);
            deriv[ia] = unpack(&anti, m);
            deriv[ih].push(CMatrix::zeros(m, m));
            deriv[ia].push(CMatrix::zeros(m, m));
        }
        let mut conn = pencil_pieces(cdv, z, q);
        conn.push(CMatrix::zeros(m, m));
        for a in 0..conn.len() {
            for b in a + 1..conn.len() {
                let f = &(&(&deriv[a][b] - &deriv[b][a]) + &(&conn[a] * &conn[b])) - &(&conn[b] * &conn[a]);
                worst = worst.max(f.max_abs());
            }
        }
    }
    let mut r = VerificationReport::new();
    r.check("pencil_curvature", worst, cfg.fd_tol);
    Ok(r)
}
