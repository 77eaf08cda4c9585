//! Relation systems that a positive structure imposes in two and three dimensions, written
//! in normal-form flat coordinates where `g_ij = δ_{i+j,m+1}` and `e = ∂_{t¹}`.
//!
//! Indices in comments are one-based as in the formulas; code is zero-based.
//! `omega[k][i][j]` is `ω_i^j(∂_{t^k})`: `D'_{∂_k} ∂_i = Σ_j ω_i^j(∂_k) ∂_j`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::canonical::canonical_frame_with;
use crate::cdv::{construct_canonical_cdv, flat_frame_h, flat_omega, CdvStructure, CheckConfig};
use crate::error::Error;
use crate::numerics::{wirtinger_fd_along, CMatrix, FdConfig};
use crate::potential::{idx3, PotentialSpec};
use crate::report::VerificationReport;

#[derive(Clone, Debug)]
pub struct LowDimRelationsInput {
    pub m: usize,
    /// `h_ij = h(∂_i, ∂_j)`.
    pub h: CMatrix,
    pub omega: Vec<CMatrix>,
    /// `C_ijk`, indexed by [`idx3`].
    pub c3: Vec<Complex64>,
    pub degrees: Vec<f64>,
    pub d: f64,
    pub normal_form: bool,
}

impl LowDimRelationsInput {
    /// Flat-coordinate `h` and Chern forms of the canonical structure.
    pub fn from_structure(spec: &PotentialSpec, cdv: &CdvStructure) -> Result<Self, Error> {
        Ok(Self {
            m: spec.dim(),
            h: flat_frame_h(cdv),
            omega: flat_omega(cdv)?,
            c3: cdv.frame.flat.c3.clone(),
            degrees: spec.euler().degrees.clone(),
            d: spec.euler().d,
            normal_form: spec.normal_form(),
        })
    }

    #[inline]
    fn c(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c3[idx3(self.m, i, j, k)]
    }

    fn require(&self, m: usize) -> Result<(), Error> {
        if !self.normal_form {
            return Err(Error::NotNormalForm("relation systems need normal-form flat coordinates"));
        }
        if self.m != m {
            return Err(Error::Validation(alloc::format!("relation system for m = {m} given m = {}", self.m)));
        }
        Ok(())
    }

    /// `max |ω_i^j + ω^{m+1−i}_{m+1−j}|` over all directions.
    fn antisymmetry(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0_f64;
        for w in &self.omega {
            for i in 0..m {
                for j in 0..m {
                    worst = worst.max((w[(i, j)] + w[(m - 1 - j, m - 1 - i)]).norm());
                }
            }
        }
        worst
    }

    /// Largest `|ω_i^j|` over the listed `(i, j)` and all directions.
    fn vanishing(&self, slots: &[(usize, usize)]) -> f64 {
        self.omega.iter().flat_map(|w| slots.iter().map(move |&(i, j)| w[(i, j)].norm())).fold(0.0, f64::max)
    }
}

/// `|h₁₂|² + h₁₁h₂₂ = 1`, `h₁₁h₁₂ = 0`, `h₂₂h₁₂ = 0`, the antisymmetry of `ω` and, when `h`
/// is positive definite, the reconstruction `h = diag(h₁₁, h₁₁⁻¹)`.
pub fn check_m2_relations(input: &LowDimRelationsInput, tol: f64) -> Result<VerificationReport, Error> {
    input.require(2)?;
    let h = &input.h;
    let (h11, h12, h22) = (h[(0, 0)], h[(0, 1)], h[(1, 1)]);
    let mut r = VerificationReport::new();
    r.check("m2_kappa_1", (h12.norm_sqr() + h11 * h22 - 1.0).norm(), tol);
    r.check("m2_kappa_2", (h11 * h12).norm(), tol);
    r.check("m2_kappa_3", (h22 * h12).norm(), tol);
    r.check("omega_antisymmetry", input.antisymmetry(), tol);
    r.check("omega_vanishing", input.vanishing(&[(0, 1), (1, 0)]), tol);
    if is_positive_definite(h) {
        r.check("m2_positive_diagonal", h12.norm().max((h22 * h11 - 1.0).norm()), tol);
    }
    Ok(r)
}

fn is_positive_definite(h: &CMatrix) -> bool {
    let (h11, h22) = (h[(0, 0)], h[(1, 1)]);
    h11.re > 0.0 && (h11 * h22 - h[(0, 1)] * h[(1, 0)]).re > 0.0
}

/// The six relations from `κ² = Id`, the three relations from `D'(Φ) = 0`, the WDVV
/// scalar, the antisymmetry of `ω`, and the two relations the proof derives from the
/// others via WDVV (checked directly and through their exact decomposition).
pub fn check_m3_relations(input: &LowDimRelationsInput, tol: f64) -> Result<VerificationReport, Error> {
    input.require(3)?;
    let hm = &input.h;
    let h = |i: usize, j: usize| hm[(i - 1, j - 1)];
    let one = Complex64::new(1.0, 0.0);
    let mut r = VerificationReport::new();
    let kappa = [
        h(1, 1) * h(3, 3) + h(1, 2) * h(3, 2) + h(1, 3).norm_sqr() - one,
        2.0 * h(2, 1) * h(2, 3) + h(2, 2) * h(2, 2) - one,
        h(1, 1) * h(2, 3) + h(1, 2) * h(2, 2) + h(1, 3) * h(2, 1),
        2.0 * h(1, 1) * h(1, 3) + h(1, 2) * h(1, 2),
        h(1, 2) * h(3, 3) + h(2, 2) * h(2, 3) + h(1, 3) * h(3, 2),
        2.0 * h(1, 3) * h(3, 3) + h(2, 3) * h(2, 3),
    ];
    for (n, v) in kappa.iter().enumerate() {
        r.check(alloc::format!("m3_kappa_{}", n + 1), v.norm(), tol);
    }

    let (w2, w3) = (&input.omega[1], &input.omega[2]);
    let (c222, c223, c233, c333) = (input.c(1, 1, 1), input.c(1, 1, 2), input.c(1, 2, 2), input.c(2, 2, 2));
    let (a, b, c) = (w2[(0, 0)], w2[(0, 1)], w2[(1, 0)]);
    let r1 = w3[(0, 1)] - a;
    let r2 = w3[(0, 0)] - (c223 * b + c - c222 * a);
    let r3 = w3[(1, 0)] - (c223 * a - c233 * b);
    r.check("m3_dphi_1", r1.norm(), tol);
    r.check("m3_dphi_2", r2.norm(), tol);
    r.check("m3_dphi_3", r3.norm(), tol);
    let s = c223 * c223 - c222 * c233 - c333;
    r.check("m3_wdvv", s.norm(), tol);
    r.check("omega_antisymmetry", input.antisymmetry(), tol);
    r.check("omega_vanishing", input.vanishing(&[(2, 0), (0, 2), (1, 1)]), tol);

    let e23 = c223 * w3[(0, 0)] - c333 * b - c223 * c + c222 * w3[(1, 0)];
    let e13 = c333 * a - c233 * w3[(0, 0)] + c233 * c - c223 * w3[(1, 0)];
    r.check("m3_implied_relations", e23.norm().max(e13.norm()), tol);
    let id23 = e23 - (b * s + c223 * r2 + c222 * r3);
    let id13 = e13 - (-a * s - c233 * r2 - c223 * r3);
    let scale = 1.0 + [a, b, c, w3[(0, 0)], w3[(1, 0)]].iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    r.check("m3_implied_decomposition", id23.norm().max(id13.norm()) / scale, tol);
    Ok(r)
}

/// `max_ij |(ℰ − ℰ̄)h_ij − (d_j − d_i) h_ij|` at `t`, with `ℰh` and `ℰ̄h` the Wirtinger
/// derivatives of `h_at` along the Euler vector `euler`.
pub fn check_euler_weights<F>(
    t: &[Complex64],
    euler: &[Complex64],
    degrees: &[f64],
    mut h_at: F,
    fd: &FdConfig,
    tol: f64,
) -> Result<VerificationReport, Error>
where
    F: FnMut(&[Complex64]) -> Result<CMatrix, Error>,
{
    let h0 = h_at(t)?;
    let m = h0.rows();
    let der = wirtinger_fd_along(|q: &[Complex64]| Ok::<_, Error>(h_at(q)?.as_slice().to_vec()), t, euler, fd)?;
    let mut worst = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            let w = &der[i * m + j];
            let want = h0[(i, j)] * (degrees[j] - degrees[i]);
            worst = worst.max((w.holomorphic - w.antiholomorphic - want).norm());
        }
    }
    let mut r = VerificationReport::new();
    r.check("euler_weights", worst, tol);
    Ok(r)
}

/// [`check_euler_weights`] on the flat-coordinate `h` of the canonical structure.
pub fn check_euler_weights_canonical(
    spec: &PotentialSpec,
    t: &[Complex64],
    cfg: &CheckConfig,
) -> Result<VerificationReport, Error> {
    if !spec.normal_form() {
        return Err(Error::NotNormalForm("Euler relation needs normal-form flat coordinates"));
    }
    let opts = crate::canonical::FrameOptions { eps_ss: cfg.eps_ss, ..Default::default() };
    let d = spec.euler().d;
    check_euler_weights(
        t,
        &spec.euler_vector(t),
        &spec.euler().degrees,
        |q| Ok(flat_frame_h(&construct_canonical_cdv(&canonical_frame_with(spec, q, &opts)?, d))),
        &cfg.fd,
        cfg.fd_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn input(h: CMatrix) -> LowDimRelationsInput {
        let m = h.rows();
        LowDimRelationsInput {
            m,
            h,
            omega: vec![CMatrix::zeros(m, m); m],
            c3: vec![c(0.0, 0.0); m * m * m],
            degrees: vec![1.0; m],
            d: 0.0,
            normal_form: true,
        }
    }

    #[test]
    fn positive_diagonal_branch() {
        let r = check_m2_relations(&input(CMatrix::from_diag(&[c(2.0, 0.0), c(0.5, 0.0)])), 1e-12).unwrap();
        assert!(r.pass());
        assert_eq!(r.residual("m2_positive_diagonal"), Some(0.0));
    }

    #[test]
    fn antidiagonal_branch() {
        let th = 0.7_f64;
        let e = Complex64::from_polar(1.0, th);
        let h = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => e,
            (1, 0) => e.conj(),
            _ => c(0.0, 0.0),
        });
        let r = check_m2_relations(&input(h), 1e-12).unwrap();
        assert!(r.pass());
        assert!(r.get("m2_positive_diagonal").is_none());
    }

    #[test]
    fn doubled_identity_fails_first_relation() {
        let r = check_m2_relations(&input(CMatrix::from_diag(&[c(2.0, 0.0), c(2.0, 0.0)])), 1e-12).unwrap();
        assert_eq!(r.residual("m2_kappa_1"), Some(3.0));
    }

    #[test]
    fn antidiagonal_identity_in_three_dimensions() {
        // h = antidiag(1,1,1): relations 1 and 2 read |h₁₃|² − 1 = 0 and h₂₂² − 1 = 0; the rest vanish termwise.
        let h = CMatrix::from_fn(3, 3, |i, j| if i + j == 2 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let r = check_m3_relations(&input(h), 1e-12).unwrap();
        for n in 1..=6 {
            assert_eq!(r.residual(&alloc::format!("m3_kappa_{n}")), Some(0.0));
        }
    }

    #[test]
    fn zero_connection_and_cubic_terms_satisfy_dphi() {
        let r = check_m3_relations(&input(CMatrix::identity(3)), 1e-12).unwrap();
        for name in ["m3_dphi_1", "m3_dphi_2", "m3_dphi_3", "m3_wdvv", "m3_implied_relations"] {
            assert_eq!(r.residual(name), Some(0.0));
        }
    }

    #[test]
    fn not_normal_form_is_rejected() {
        let mut i = input(CMatrix::identity(2));
        i.normal_form = false;
        assert!(matches!(check_m2_relations(&i, 1e-12), Err(Error::NotNormalForm(_))));
    }

    #[test]
    fn constant_h_with_equal_degrees() {
        let h = CMatrix::from_fn(2, 2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let r = check_euler_weights(
            &[c(0.1, 0.2), c(0.3, -0.1)],
            &[c(0.1, 0.2), c(0.2, -0.1)],
            &[1.0, 1.0],
            |_| Ok(h.clone()),
            &FdConfig::default(),
            1e-12,
        )
        .unwrap();
        assert_eq!(r.residual("euler_weights"), Some(0.0));
    }
}
