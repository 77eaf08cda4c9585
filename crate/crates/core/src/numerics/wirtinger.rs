//! Central-difference Wirtinger derivatives `∂ = ½(D_x − i D_y)`, `∂̄ = ½(D_x + i D_y)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::NumericsError;

/// Default relative step; the absolute step is `step * (1 + |coordinate|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub order: FdOrder,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { step: DEFAULT_FD_STEP, order: FdOrder::Second }
    }
}

impl FdConfig {
    pub fn with_step(step: f64) -> Self {
        Self { step, ..Self::default() }
    }

    pub fn fourth_order(mut self) -> Self {
        self.order = FdOrder::Fourth;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WirtingerDerivative {
    pub holomorphic: Complex64,
    pub antiholomorphic: Complex64,
    /// Absolute step actually used along the direction.
    pub step: f64,
    pub order: FdOrder,
}

/// Wirtinger derivatives of every output component of `f` along coordinate `direction`.
///
/// `f` returning `None` or a non-finite value at a stencil point yields `EvaluationFailure`.
pub fn wirtinger_fd<F>(
    mut f: F,
    point: &[Complex64],
    direction: usize,
    cfg: &FdConfig,
) -> Result<Vec<WirtingerDerivative>, NumericsError>
where
    F: FnMut(&[Complex64]) -> Option<Vec<Complex64>>,
{
    assert!(direction < point.len(), "direction index out of range");
    let mut v = alloc::vec![Complex64::new(0.0, 0.0); point.len()];
    v[direction] = Complex64::new(1.0, 0.0);
    wirtinger_fd_along(|p| f(p).ok_or(NumericsError::EvaluationFailure), point, &v, cfg)
}

/// Wirtinger derivatives along the complex direction `v`: `∂_v = Σ v_i ∂_i`, `∂̄_v = Σ v̄_i ∂̄_i`.
///
/// Errors from `f` are propagated unchanged, so callers can surface their own failure kinds.
pub fn wirtinger_fd_along<F, E>(
    mut f: F,
    point: &[Complex64],
    v: &[Complex64],
    cfg: &FdConfig,
) -> Result<Vec<WirtingerDerivative>, E>
where
    F: FnMut(&[Complex64]) -> Result<Vec<Complex64>, E>,
    E: From<NumericsError>,
{
    assert_eq!(point.len(), v.len(), "direction length mismatch");
    assert!(cfg.step > 0.0, "finite-difference step must be positive");
    let vmax = v.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if vmax == 0.0 {
        return Err(NumericsError::EvaluationFailure.into());
    }
    let pmax = point.iter().zip(v).filter(|(_, d)| d.norm() > 0.0).fold(0.0_f64, |a, (p, _)| a.max(p.norm()));
    let h = cfg.step * (1.0 + pmax) / vmax;

    let mut eval = |s: Complex64| -> Result<Vec<Complex64>, E> {
        let q: Vec<Complex64> = point.iter().zip(v).map(|(p, d)| p + s * d).collect();
        let out = f(&q)?;
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::EvaluationFailure.into());
        }
        Ok(out)
    };
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let dx = central(&mut eval, one, h, cfg.order)?;
    let dy = central(&mut eval, i, h, cfg.order)?;
    Ok(dx
        .iter()
        .zip(&dy)
        .map(|(a, b)| WirtingerDerivative {
            holomorphic: 0.5 * (a - i * b),
            antiholomorphic: 0.5 * (a + i * b),
            step: h,
            order: cfg.order,
        })
        .collect())
}

fn central<E>(
    eval: &mut impl FnMut(Complex64) -> Result<Vec<Complex64>, E>,
    unit: Complex64,
    h: f64,
    order: FdOrder,
) -> Result<Vec<Complex64>, E> {
    let fp = eval(unit * h)?;
    let fm = eval(-unit * h)?;
    match order {
        FdOrder::Second => Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()),
        FdOrder::Fourth => {
            let fp2 = eval(unit * (2.0 * h))?;
            let fm2 = eval(-unit * (2.0 * h))?;
            Ok((0..fp.len()).map(|k| (8.0 * (fp[k] - fm[k]) - (fp2[k] - fm2[k])) / (12.0 * h)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_is_holomorphic() {
        let d = wirtinger_fd(|p| Some(vec![p[0] * p[0]]), &[c(1.0, 0.0)], 0, &FdConfig::default()).unwrap();
        assert!((d[0].holomorphic - c(2.0, 0.0)).norm() <= 1e-9);
        assert!(d[0].antiholomorphic.norm() <= 1e-9);
    }

    #[test]
    fn conjugate_is_antiholomorphic() {
        let d = wirtinger_fd(|p| Some(vec![p[0].conj()]), &[c(0.3, -0.2)], 0, &FdConfig::default()).unwrap();
        assert!(d[0].holomorphic.norm() <= 1e-9);
        assert!((d[0].antiholomorphic - c(1.0, 0.0)).norm() <= 1e-9);
    }

    #[test]
    fn modulus_squared() {
        let z0 = c(2.0, 1.0);
        let d = wirtinger_fd(|p| Some(vec![p[0] * p[0].conj()]), &[z0], 0, &FdConfig::default()).unwrap();
        // ∂(z z̄) = z̄, ∂̄(z z̄) = z.
        assert!((d[0].holomorphic - c(2.0, -1.0)).norm() <= 1e-8);
        assert!((d[0].antiholomorphic - c(2.0, 1.0)).norm() <= 1e-8);
    }

    #[test]
    fn fourth_order_is_sharper() {
        // The O(h^2) terms cancel in ∂ of a holomorphic map, so use f = e^z z̄ with ∂f = e^z z̄.
        let f = |q: &[Complex64]| Some(vec![q[0].exp() * q[0].conj()]);
        let p = [c(0.4, 0.3)];
        let exact = p[0].exp() * p[0].conj();
        let cfg = FdConfig::with_step(1e-2);
        let d2 = wirtinger_fd(f, &p, 0, &cfg).unwrap();
        let d4 = wirtinger_fd(f, &p, 0, &cfg.fourth_order()).unwrap();
        let e2 = (d2[0].holomorphic - exact).norm();
        let e4 = (d4[0].holomorphic - exact).norm();
        assert!(e4 < e2 * 1e-3, "e2 {e2} e4 {e4}");
    }

    #[test]
    fn truncation_error_shrinks_with_step() {
        let f = |q: &[Complex64]| Some(vec![q[0].exp() * q[0].conj()]);
        let p = [c(0.7, -0.4)];
        let err = |s: f64| {
            let d = wirtinger_fd(f, &p, 0, &FdConfig::with_step(s)).unwrap();
            (d[0].antiholomorphic - p[0].exp()).norm()
        };
        let (a, b) = (err(1e-2), err(5e-3));
        assert!(b < a / 3.0, "{a} {b}");
    }

    #[test]
    fn directional_derivative_combines_coordinates() {
        // f = z0 * z1, direction v = (1, i): ∂_v f = z1 + i z0.
        let p = [c(0.5, 0.1), c(-0.2, 0.8)];
        let v = [c(1.0, 0.0), c(0.0, 1.0)];
        let d =
            wirtinger_fd_along::<_, NumericsError>(|q| Ok(vec![q[0] * q[1]]), &p, &v, &FdConfig::default()).unwrap();
        assert!((d[0].holomorphic - (p[1] + c(0.0, 1.0) * p[0])).norm() < 1e-9);
        assert!(d[0].antiholomorphic.norm() < 1e-9);
    }

    #[test]
    fn undefined_stencil_point_is_reported() {
        let r = wirtinger_fd(
            |q| if q[0].re > 1.0 { None } else { Some(vec![q[0]]) },
            &[c(1.0, 0.0)],
            0,
            &FdConfig::default(),
        );
        assert_eq!(r.unwrap_err(), NumericsError::EvaluationFailure);
    }
}
