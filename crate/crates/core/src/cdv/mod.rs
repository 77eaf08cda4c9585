//! The canonical positive CDV-structure built from a canonical frame, its axiom
//! checks, the harmonic potential, connection comparisons and the pencil curvature.
//!
//! Matrices of endomorphisms are row-source: row `i` holds the frame components of
//! the image of `e_i`. Composition therefore reverses (`A∘B` has matrix `M_B·M_A`),
//! and `D'_X e_i = Σ_k ω(X)[i][k] e_k`.

mod connections;
mod harmonic;
mod pencil;
mod verify;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::canonical::{canonical_frame_matched, CanonicalFrame, FrameOptions, DEFAULT_EPS_SS};
use crate::error::Error;
use crate::numerics::{invert, wirtinger_fd_along, CMatrix, FdConfig, WirtingerDerivative};
use crate::potential::PotentialSpec;

pub use connections::{connection_gap, connection_gap_for, flat_frame_h, flat_omega, real_levi_civita, ConnectionGap};
pub use harmonic::{harmonic_potential, verify_harmonic, verify_harmonic_with, HarmonicData};
pub use pencil::{pencil_curvature, pencil_curvature_with};
pub use verify::{involution_residual, verify_cv_axioms};

/// Residual tolerances and finite-difference settings shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckConfig {
    /// Identities that hold up to round-off.
    pub algebraic_tol: f64,
    /// Identities involving a finite-difference derivative.
    pub fd_tol: f64,
    pub fd: FdConfig,
    /// Semi-simplicity threshold used for frames recomputed at stencil points.
    pub eps_ss: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { algebraic_tol: 1e-10, fd_tol: 1e-5, fd: FdConfig::default(), eps_ss: DEFAULT_EPS_SS }
    }
}

impl CheckConfig {
    fn frame_options(&self) -> FrameOptions {
        FrameOptions { eps_ss: self.eps_ss, ..FrameOptions::default() }
    }
}

/// The canonical CDV-structure at one semi-simple point, in the canonical frame.
#[derive(Clone, Debug)]
pub struct CdvStructure {
    pub frame: CanonicalFrame,
    /// `κ(e_α) = Σ_β K[α][β] e_β`, with `κ` antilinear.
    pub k: CMatrix,
    /// `h[α][β] = h(e_α, e_β)`.
    pub h: CMatrix,
    /// `omega[β] = ω(e_β)`, the Chern connection form on the frame direction `e_β`.
    pub omega: Vec<CMatrix>,
    pub q: CMatrix,
    /// `diag(u)`, the matrix of `ℰ∘`.
    pub umat: CMatrix,
    /// `cmats[α]` is `C^(α)`, the matrix of `e_α∘`.
    pub cmats: Vec<CMatrix>,
    /// `ctilde[β] = K̄·C̄^(β)·K`.
    pub ctilde: Vec<CMatrix>,
    pub d: f64,
}

impl CdvStructure {
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// The metric `g` in the canonical frame, `diag(η)`.
    pub fn g(&self) -> CMatrix {
        CMatrix::from_diag(&self.frame.eta)
    }

    /// `Φ_{e_α} = C_{e_α} = −e_α∘`.
    pub fn phi(&self, alpha: usize) -> CMatrix {
        -&self.cmats[alpha]
    }
}

/// Builds `K = diag(|η|/η)`, `h = diag(|η|)`, the diagonal Chern forms and `Q = 0`.
pub fn construct_canonical_cdv(frame: &CanonicalFrame, d: f64) -> CdvStructure {
    let m = frame.dim();
    let k = CMatrix::from_diag(&frame.eta.iter().map(|e| e.norm() / e).collect::<Vec<_>>());
    let h = CMatrix::from_diag(&frame.eta.iter().map(|e| Complex64::new(e.norm(), 0.0)).collect::<Vec<_>>());
    let omega = (0..m).map(|beta| canonical_omega(frame, beta)).collect();
    let cmats: Vec<CMatrix> = (0..m).map(|a| unit_matrix(m, a)).collect();
    let ctilde = cmats.iter().map(|c| kappa_conjugate(c, &k)).collect();
    CdvStructure {
        frame: frame.clone(),
        k,
        h,
        omega,
        q: CMatrix::zeros(m, m),
        umat: CMatrix::from_diag(&frame.u),
        cmats,
        ctilde,
        d,
    }
}

/// `ω(e_β) = diag_α(η_βα / 2η_α)`.
fn canonical_omega(frame: &CanonicalFrame, beta: usize) -> CMatrix {
    let m = frame.dim();
    CMatrix::from_diag(&(0..m).map(|a| frame.eta_d[(beta, a)] / (2.0 * frame.eta[a])).collect::<Vec<_>>())
}

/// `E_αα`.
pub(crate) fn unit_matrix(m: usize, alpha: usize) -> CMatrix {
    CMatrix::from_fn(
        m,
        m,
        |i, j| if i == alpha && j == alpha { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) },
    )
}

/// Matrix of the endomorphism commutator `A∘B − B∘A` for row-source matrices.
pub fn endo_commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(b * a) - &(a * b)
}

/// Matrix of the `h`-adjoint `N` defined by `h(Mx, y) = h(x, Ny)`.
pub fn h_adjoint(mat: &CMatrix, h: &CMatrix) -> Result<CMatrix, Error> {
    let hi = invert(h)?;
    Ok((&(&hi * mat) * h).adjoint())
}

/// Matrix of `κ∘M∘κ`: `K̄·M̄·K`.
pub fn kappa_conjugate(mat: &CMatrix, k: &CMatrix) -> CMatrix {
    &(&k.conj() * &mat.conj()) * k
}

/// Covariant derivative of an endomorphism field: `X(M) + M·ω(X) − ω(X)·M`.
pub(crate) fn endo_derivative(dm: &CMatrix, mat: &CMatrix, omega_x: &CMatrix) -> CMatrix {
    &(dm + &(mat * omega_x)) - &(omega_x * mat)
}

/// Wirtinger derivatives along the flat vector `v` of frame data recomputed at stencil
/// points, with frame labels matched to `centre`.
pub(crate) fn frame_fd_along<F>(
    spec: &PotentialSpec,
    centre: &CanonicalFrame,
    v: &[Complex64],
    cfg: &CheckConfig,
    mut data: F,
) -> Result<Vec<WirtingerDerivative>, Error>
where
    F: FnMut(&CanonicalFrame) -> Result<Vec<Complex64>, Error>,
{
    let opts = cfg.frame_options();
    wirtinger_fd_along(
        |q: &[Complex64]| {
            let f = canonical_frame_matched(spec, q, centre, &opts)?;
            data(&f)
        },
        &centre.point,
        v,
        &cfg.fd,
    )
}

/// Splits a flat list of derivatives into consecutive `m×m` matrices of the chosen part.
pub(crate) fn unpack(parts: &[Complex64], m: usize) -> Vec<CMatrix> {
    parts.chunks(m * m).map(|c| CMatrix::from_fn(m, m, |i, j| c[i * m + j])).collect()
}

pub(crate) fn pack(out: &mut Vec<Complex64>, mat: &CMatrix) {
    out.extend_from_slice(mat.as_slice());
}
