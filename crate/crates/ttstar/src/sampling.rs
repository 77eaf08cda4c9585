//! Seeded sampling of generic points in a polydisk.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws per point before the point is reported as skipped.
pub const MAX_DRAWS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Polydisk {
    pub centre: Vec<Complex64>,
    pub radius: f64,
}

impl Polydisk {
    pub fn unit(m: usize) -> Self {
        Self { centre: vec![Complex64::new(0.0, 0.0); m], radius: 1.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Samples {
    pub accepted: Vec<Vec<Complex64>>,
    /// Last draw of each point whose draws were all rejected.
    pub skipped: Vec<Vec<Complex64>>,
}

/// `n` points uniform in `disk`, each redrawn up to [`MAX_DRAWS`] times until `accept` holds.
pub fn sample_points(n: usize, seed: u64, disk: &Polydisk, mut accept: impl FnMut(&[Complex64]) -> bool) -> Samples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Samples::default();
    for _ in 0..n {
        let mut last = Vec::new();
        let mut ok = false;
        for _ in 0..MAX_DRAWS {
            last = disk
                .centre
                .iter()
                .map(|c| {
                    let r = disk.radius * rng.random::<f64>().sqrt();
                    let th = std::f64::consts::TAU * rng.random::<f64>();
                    c + Complex64::from_polar(r, th)
                })
                .collect();
            if accept(&last) {
                ok = true;
                break;
            }
        }
        if ok {
            out.accepted.push(last);
        } else {
            out.skipped.push(last);
        }
    }
    out
}
