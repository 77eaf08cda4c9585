//! Comparison of the Levi-Civita connection `∇` of `g`, the Chern connection `D'` of `h`
//! and the Levi-Civita connection `∇̂` of the real metric `ĝ = Re h`.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{construct_canonical_cdv, frame_fd_along, pack, unpack, CdvStructure, CheckConfig};
use crate::canonical::{canonical_frame_with, levi_civita_canonical, CanonicalFrame};
use crate::error::Error;
use crate::numerics::{invert, CMatrix};
use crate::potential::PotentialSpec;
use crate::report::{CheckEntry, VerificationReport};

/// `h_ij = h(∂_i, ∂_j) = Σ_α B[α][i] conj(B[α][j]) h_αα` with `B = A⁻¹`.
pub fn flat_frame_h(cdv: &CdvStructure) -> CMatrix {
    let b = &cdv.frame.a_inv;
    &(&b.transpose() * &cdv.h) * &b.conj()
}

/// Chern forms in flat coordinates, `ω(∂_k) = (∂_k h) h⁻¹`, from the exact frame Jacobian:
/// `∂_k B = −B (∂_k A) B` and `∂_k |η_α| = |η_α| ∂_k η_α / 2η_α`.
pub fn flat_omega(cdv: &CdvStructure) -> Result<Vec<CMatrix>, Error> {
    let f = &cdv.frame;
    let m = f.dim();
    let b = &f.a_inv;
    let h_flat = flat_frame_h(cdv);
    let h_inv = invert(&h_flat)?;
    (0..m)
        .map(|k| {
            let db = -&(&(b * &f.da[k]) * b);
            let dh_frame = CMatrix::from_diag(
                &(0..m).map(|a| cdv.h[(a, a)] * f.deta_flat[(k, a)] / (2.0 * f.eta[a])).collect::<Vec<_>>(),
            );
            let dh = &(&(&db.transpose() * &cdv.h) * &b.conj()) + &(&(&b.transpose() * &dh_frame) * &b.conj());
            Ok(&dh * &h_inv)
        })
        .collect()
}

/// Levi-Civita connection of `ĝ = Re h` in real coordinates `t = x + iy`, mapped back to
/// complex matrices: `result[k][j][l] = Γ̂^{x_l}_{x_k x_j} + i Γ̂^{y_l}_{x_k x_j}`.
///
/// `dh[k]` and `dbar_h[k]` are the Wirtinger derivatives of `h` along `t^k`.
pub fn real_levi_civita(h: &CMatrix, dh: &[CMatrix], dbar_h: &[CMatrix]) -> Result<Vec<CMatrix>, Error> {
    let m = h.rows();
    let n = 2 * m;
    let real = |x: &CMatrix| {
        CMatrix::from_fn(n, n, |a, b| {
            let (i, j) = (a % m, b % m);
            let z = x[(i, j)];
            let v = match (a < m, b < m) {
                (true, true) | (false, false) => z.re,
                (true, false) => z.im,
                (false, true) => -z.im,
            };
            Complex64::new(v, 0.0)
        })
    };
    let g = real(h);
    let g_inv = invert(&g)?;
    // ∂_x = ∂ + ∂̄ and ∂_y = i(∂ − ∂̄) on each real coordinate.
    let mut dg = Vec::with_capacity(n);
    for k in 0..m {
        dg.push(real(&(&dh[k] + &dbar_h[k])));
    }
    for k in 0..m {
        dg.push(real(&(&dh[k] - &dbar_h[k]).scale(Complex64::new(0.0, 1.0))));
    }
    let christoffel = |a: usize, b: usize, c: usize| -> f64 {
        (0..n).map(|d| g_inv[(a, d)].re * (dg[b][(d, c)].re + dg[c][(d, b)].re - dg[d][(b, c)].re)).sum::<f64>() * 0.5
    };
    Ok((0..m)
        .map(|k| CMatrix::from_fn(m, m, |j, l| Complex64::new(christoffel(l, k, j), christoffel(m + l, k, j))))
        .collect())
}

/// Magnitudes of the obstructions separating the three connections at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionGap {
    /// `max_α |ω(e_α) − Γ(e_α)ᵀ|`.
    pub levi_civita_vs_chern: f64,
    /// `max_{α≠β} |ω(e_α)[β][β]|`, the torsion of `D'` on the canonical frame.
    pub torsion: f64,
    /// `max |∂_k h_ij − ∂_i h_kj|` in flat coordinates.
    pub d_omega_hat: f64,
    pub real_vs_chern: f64,
    pub real_vs_levi_civita: f64,
    /// `max |η_αβ|`: zero exactly when canonical coordinates are flat.
    pub eta_derivative: f64,
    /// Largest off-diagonal `|h_ij|` relative to `max |h_ij|` in flat coordinates.
    pub flat_h_offdiagonal: f64,
    /// Finite-difference `∂_k h` against the exact frame Jacobian.
    pub flat_omega_consistency: f64,
}

impl ConnectionGap {
    /// Entries tagged by the triviality indicator `eta_derivative <= tol`: on a trivial point
    /// every gap must be at most `tol`, otherwise every gap must exceed it.
    pub fn report(&self, tol: f64, fd_tol: f64) -> VerificationReport {
        let trivial = self.eta_derivative <= tol;
        let mut r = VerificationReport::new();
        let gaps = [
            ("levi_civita_vs_chern", self.levi_civita_vs_chern),
            ("chern_torsion", self.torsion),
            ("d_omega_hat", self.d_omega_hat),
            ("real_vs_chern", self.real_vs_chern),
            ("real_vs_levi_civita", self.real_vs_levi_civita),
        ];
        for (name, v) in gaps {
            r.push(if trivial { CheckEntry::new(name, v, tol) } else { CheckEntry::exceeds(name, v, tol) });
        }
        let agree = (self.torsion <= tol) == (self.d_omega_hat <= tol);
        r.check("torsion_symplectic_equivalence", if agree { 0.0 } else { 1.0 }, 0.0);
        r.check("flat_omega_consistency", self.flat_omega_consistency, fd_tol);
        r
    }
}

/// Connection gaps at `t`, with finite differences of flat-coordinate `h` along each `∂_{t^k}`.
pub fn connection_gap(spec: &PotentialSpec, t: &[Complex64], cfg: &CheckConfig) -> Result<ConnectionGap, Error> {
    let frame = canonical_frame_with(spec, t, &cfg.frame_options())?;
    let cdv = construct_canonical_cdv(&frame, spec.euler().d);
    connection_gap_for(spec, &cdv, cfg)
}

/// Connection gaps for an already constructed structure.
pub fn connection_gap_for(spec: &PotentialSpec, cdv: &CdvStructure, cfg: &CheckConfig) -> Result<ConnectionGap, Error> {
    let f = &cdv.frame;
    let m = f.dim();
    let gamma = levi_civita_canonical(f);
    let lc_vs_chern = (0..m).map(|a| (&cdv.omega[a] - &gamma[a].transpose()).max_abs()).fold(0.0, f64::max);
    let mut torsion = 0.0_f64;
    for a in 0..m {
        for b in 0..m {
            if a != b {
                torsion = torsion.max(cdv.omega[a][(b, b)].norm());
            }
        }
    }

    let h_flat = flat_frame_h(cdv);
    let d = cdv.d;
    let flat_h_at = |fr: &CanonicalFrame| -> Result<Vec<Complex64>, Error> {
        let mut out = Vec::with_capacity(m * m);
        pack(&mut out, &flat_frame_h(&construct_canonical_cdv(fr, d)));
        Ok(out)
    };
    let mut dh = Vec::with_capacity(m);
    let mut dbar_h = Vec::with_capacity(m);
    for k in 0..m {
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); m];
        v[k] = Complex64::new(1.0, 0.0);
        let der = frame_fd_along(spec, f, &v, cfg, flat_h_at)?;
        let hol: Vec<Complex64> = der.iter().map(|w| w.holomorphic).collect();
        let anti: Vec<Complex64> = der.iter().map(|w| w.antiholomorphic).collect();
        dh.push(unpack(&hol, m).remove(0));
        dbar_h.push(unpack(&anti, m).remove(0));
    }
    let mut d_omega_hat = 0.0_f64;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                d_omega_hat = d_omega_hat.max((dh[k][(i, j)] - dh[i][(k, j)]).norm());
            }
        }
    }

    let omega_flat = flat_omega(cdv)?;
    let consistency = (0..m).map(|k| (&dh[k] - &(&omega_flat[k] * &h_flat)).max_abs()).fold(0.0, f64::max);
    let hat = real_levi_civita(&h_flat, &dh, &dbar_h)?;
    let real_vs_chern = (0..m).map(|k| (&hat[k] - &omega_flat[k]).max_abs()).fold(0.0, f64::max);
    let real_vs_lc = hat.iter().map(CMatrix::max_abs).fold(0.0, f64::max);
    let scale = h_flat.max_abs();
    Ok(ConnectionGap {
        levi_civita_vs_chern: lc_vs_chern,
        torsion,
        d_omega_hat,
        real_vs_chern,
        real_vs_levi_civita: real_vs_lc,
        eta_derivative: f.eta_d.max_abs(),
        flat_h_offdiagonal: if scale > 0.0 { h_flat.max_off_diagonal() / scale } else { 0.0 },
        flat_omega_consistency: consistency,
    })
}
