#![allow(dead_code)]

use num_complex::Complex64;
use ttstar_core::potential::{EulerData, ExpTerm, Monomial, PotentialSpec};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mono(coeff: f64, powers: &[u32]) -> Monomial {
    Monomial { coeff: c(coeff, 0.0), powers: powers.to_vec() }
}

fn euler(degrees: &[f64], d: f64, d_f: f64) -> EulerData {
    EulerData { degrees: degrees.to_vec(), shifts: vec![0.0; degrees.len()], d, d_f }
}

pub fn trivial2() -> PotentialSpec {
    PotentialSpec::new(2, vec![mono(0.5, &[2, 1])], vec![], euler(&[1.0, 1.0], 0.0, 3.0), true).unwrap()
}

pub fn cubic2() -> PotentialSpec {
    PotentialSpec::new(
        2,
        vec![mono(0.5, &[2, 1]), mono(1.0 / 6.0, &[0, 3])],
        vec![],
        euler(&[1.0, 1.0], 0.0, 3.0),
        true,
    )
    .unwrap()
}

pub fn quartic2() -> PotentialSpec {
    PotentialSpec::new(
        2,
        vec![mono(0.5, &[2, 1]), mono(1.0, &[0, 4])],
        vec![],
        euler(&[1.0, 2.0 / 3.0], 1.0 / 3.0, 8.0 / 3.0),
        true,
    )
    .unwrap()
}

pub fn p1() -> PotentialSpec {
    PotentialSpec::new(
        2,
        vec![mono(0.5, &[2, 1])],
        vec![ExpTerm { coeff: c(1.0, 0.0), powers: vec![0, 0], linear_form: vec![c(0.0, 0.0), c(1.0, 0.0)] }],
        EulerData { degrees: vec![1.0, 0.0], shifts: vec![0.0, 2.0], d: 1.0, d_f: 2.0 },
        true,
    )
    .unwrap()
}

pub fn a3_3d_with(c333: f64) -> PotentialSpec {
    PotentialSpec::new(
        3,
        vec![mono(0.5, &[2, 0, 1]), mono(0.5, &[1, 2, 0]), mono(0.25, &[0, 2, 2]), mono(c333, &[0, 0, 5])],
        vec![],
        euler(&[1.0, 0.75, 0.5], 0.5, 2.5),
        true,
    )
    .unwrap()
}

pub fn a3_3d() -> PotentialSpec {
    a3_3d_with(1.0 / 60.0)
}

pub fn m3_nilpotent() -> PotentialSpec {
    PotentialSpec::new(
        3,
        vec![mono(0.5, &[2, 0, 1]), mono(0.5, &[1, 2, 0]), mono(1.0 / 24.0, &[0, 4, 0])],
        vec![],
        euler(&[1.0, 0.5, 0.0], 1.0, 2.0),
        true,
    )
    .unwrap()
}

/// Deterministic pseudo-random points in the polydisk of radius `r` around `centre`.
pub fn points(centre: &[Complex64], r: f64, n: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64) / ((1u64 << 53) as f64)
    };
    (0..n)
        .map(|_| {
            centre
                .iter()
                .map(|z| {
                    let (rad, th) = (r * next().sqrt(), 2.0 * std::f64::consts::PI * next());
                    z + Complex64::from_polar(rad, th)
                })
                .collect()
        })
        .collect()
}
