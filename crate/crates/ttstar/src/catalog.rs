//! Built-in potentials.

use num_complex::Complex64;
use ttstar_core::potential::{EulerData, ExpTerm, Monomial, PotentialSpec};

use crate::CliError;

pub const NAMES: [&str; 7] = ["trivial2", "cubic2", "quartic2", "p1", "a3_3d", "m3_nilpotent", "broken_wdvv"];

/// Fixed point of `a3_3d` at which the connection obstructions are reported.
pub const A3_REFERENCE_POINT: [[f64; 2]; 3] = [[0.2, 0.1], [0.5, -0.3], [0.7, 0.4]];

/// Fixed point of `quartic2` at which the connection obstructions are reported.
pub const QUARTIC_REFERENCE_POINT: [[f64; 2]; 2] = [[0.0, 0.0], [1.0, 0.0]];

fn mono(coeff: f64, powers: &[u32]) -> Monomial {
    Monomial { coeff: Complex64::new(coeff, 0.0), powers: powers.to_vec() }
}

fn homogeneous(degrees: &[f64], d: f64, d_f: f64) -> EulerData {
    EulerData { degrees: degrees.to_vec(), shifts: vec![0.0; degrees.len()], d, d_f }
}

fn a3(c333: f64) -> Result<PotentialSpec, CliError> {
    Ok(PotentialSpec::new(
        3,
        vec![mono(0.5, &[2, 0, 1]), mono(0.5, &[1, 2, 0]), mono(0.25, &[0, 2, 2]), mono(c333, &[0, 0, 5])],
        vec![],
        homogeneous(&[1.0, 0.75, 0.5], 0.5, 2.5),
        true,
    )?)
}

/// The built-in spec called `name`.
///
/// `trivial2` and `m3_nilpotent` are nowhere semi-simple and serve the WDVV and homogeneity
/// checks only. `broken_wdvv` is `a3_3d` with the `t₃⁵` coefficient `1/59` instead of `1/60`.
pub fn catalog(name: &str) -> Result<PotentialSpec, CliError> {
    let spec = match name {
        "trivial2" => {
            PotentialSpec::new(2, vec![mono(0.5, &[2, 1])], vec![], homogeneous(&[1.0, 1.0], 0.0, 3.0), true)?
        }
        "cubic2" => PotentialSpec::new(
            2,
            vec![mono(0.5, &[2, 1]), mono(1.0 / 6.0, &[0, 3])],
            vec![],
            homogeneous(&[1.0, 1.0], 0.0, 3.0),
            true,
        )?,
        "quartic2" => PotentialSpec::new(
            2,
            vec![mono(0.5, &[2, 1]), mono(1.0, &[0, 4])],
            vec![],
            homogeneous(&[1.0, 2.0 / 3.0], 1.0 / 3.0, 8.0 / 3.0),
            true,
        )?,
        "p1" => PotentialSpec::new(
            2,
            vec![mono(0.5, &[2, 1])],
            vec![ExpTerm {
                coeff: Complex64::new(1.0, 0.0),
                powers: vec![0, 0],
                linear_form: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            }],
            EulerData { degrees: vec![1.0, 0.0], shifts: vec![0.0, 2.0], d: 1.0, d_f: 2.0 },
            true,
        )?,
        "a3_3d" => a3(1.0 / 60.0)?,
        "broken_wdvv" => a3(1.0 / 59.0)?,
        "m3_nilpotent" => PotentialSpec::new(
            3,
            vec![mono(0.5, &[2, 0, 1]), mono(0.5, &[1, 2, 0]), mono(1.0 / 24.0, &[0, 4, 0])],
            vec![],
            homogeneous(&[1.0, 0.5, 0.0], 1.0, 2.0),
            true,
        )?,
        _ => return Err(CliError::UnknownName(name.to_string())),
    };
    Ok(spec)
}

pub fn point(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|z| Complex64::new(z[0], z[1])).collect()
}
