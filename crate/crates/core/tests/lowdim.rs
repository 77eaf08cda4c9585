mod common;

use std::time::Instant;

use common::*;
use num_complex::Complex64;
use ttstar_core::canonical::canonical_frame;
use ttstar_core::cdv::{construct_canonical_cdv, CdvStructure, CheckConfig};
use ttstar_core::lowdim::*;
use ttstar_core::numerics::{CMatrix, FdConfig};
use ttstar_core::potential::{EulerData, Monomial, PotentialSpec};

fn structure(spec: &PotentialSpec, t: &[Complex64]) -> CdvStructure {
    construct_canonical_cdv(&canonical_frame(spec, t, 1e-4).unwrap(), spec.euler().d)
}

fn input(spec: &PotentialSpec, t: &[Complex64]) -> LowDimRelationsInput {
    LowDimRelationsInput::from_structure(spec, &structure(spec, t)).unwrap()
}

/// `F = ½t₁²t₂ + t₂³/3`, so `∂₂³F ≡ 2`.
fn cubic2_doubled() -> PotentialSpec {
    PotentialSpec::new(
        2,
        vec![
            Monomial { coeff: c(0.5, 0.0), powers: vec![2, 1] },
            Monomial { coeff: c(1.0 / 3.0, 0.0), powers: vec![0, 3] },
        ],
        vec![],
        EulerData { degrees: vec![1.0, 1.0], shifts: vec![0.0, 0.0], d: 0.0, d_f: 3.0 },
        true,
    )
    .unwrap()
}

fn square(n: usize) -> Grid {
    Grid::new(-1.0, -1.0, 1.0, 1.0, n).unwrap()
}

/// `h₁₁ = e^{−Re t²/2}` solves the p1 equation exactly: `v` is linear and `e^{2x}e^{2v} = e^{−2v}`.
fn p1_exact_boundary(grid: &Grid) -> Boundary {
    Boundary::from_fn(grid, |x, _| (-0.5 * x).exp())
}

#[test]
fn m2_positive_structures_are_diagonal_with_inverse_entries() {
    for spec in [quartic2(), cubic2(), p1()] {
        for t in points(&[c(0.0, 0.0), c(0.8, 0.1)], 0.3, 5, 3) {
            let inp = input(&spec, &t);
            let r = check_m2_relations(&inp, 1e-10).unwrap();
            assert!(r.get("m2_positive_diagonal").is_some(), "positive branch not taken");
            assert!(r.pass(), "{r:?}");
            let h = &inp.h;
            assert!(h[(0, 1)].norm() <= 1e-10 && (h[(0, 0)] * h[(1, 1)] - 1.0).norm() <= 1e-10);
        }
    }
}

#[test]
fn m2_relation_examples() {
    let diag = |a: f64, b: f64| CMatrix::from_diag(&[c(a, 0.0), c(b, 0.0)]);
    let make = |h: CMatrix| LowDimRelationsInput {
        m: 2,
        h,
        omega: vec![CMatrix::zeros(2, 2); 2],
        c3: vec![c(0.0, 0.0); 8],
        degrees: vec![1.0, 1.0],
        d: 0.0,
        normal_form: true,
    };
    assert_eq!(check_m2_relations(&make(diag(2.0, 0.5)), 1e-12).unwrap().residual("m2_kappa_1"), Some(0.0));
    assert_eq!(check_m2_relations(&make(diag(2.0, 2.0)), 1e-12).unwrap().residual("m2_kappa_1"), Some(3.0));
    let th = 0.7_f64;
    let anti = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => Complex64::from_polar(1.0, th),
        (1, 0) => Complex64::from_polar(1.0, -th),
        _ => c(0.0, 0.0),
    });
    let r = check_m2_relations(&make(anti), 1e-12).unwrap();
    assert!(r.pass(), "{r:?}");
    assert!(r.get("m2_positive_diagonal").is_none());
}

#[test]
fn m3_relations_hold_on_a3() {
    for t in points(&[c(0.2, 0.1), c(0.5, -0.3), c(0.7, 0.4)], 0.3, 5, 5) {
        let r = check_m3_relations(&input(&a3_3d(), &t), 1e-10).unwrap();
        assert!(r.pass(), "{r:?}");
    }
}

#[test]
fn implied_relations_follow_whenever_wdvv_holds() {
    // Redundancy is asserted exactly at the points where the WDVV scalar is small.
    let mut checked = 0;
    for spec in [a3_3d(), a3_3d_with(1.0 / 59.0)] {
        for t in points(&[c(0.2, 0.1), c(0.5, -0.3), c(0.7, 0.4)], 0.3, 5, 9) {
            let r = check_m3_relations(&input(&spec, &t), 1e-10).unwrap();
            assert!(r.residual("m3_implied_decomposition").unwrap() <= 1e-10);
            if r.residual("m3_wdvv").unwrap() <= 1e-10 {
                assert!(r.residual("m3_implied_relations").unwrap() <= 1e-10, "{r:?}");
                checked += 1;
            } else {
                assert!(r.residual("m3_wdvv").unwrap() > 1e-3);
            }
        }
    }
    assert_eq!(checked, 5);
}

#[test]
fn relations_reject_non_normal_form() {
    let mut inp = input(&quartic2(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    inp.normal_form = false;
    assert!(matches!(check_m2_relations(&inp, 1e-10), Err(ttstar_core::Error::NotNormalForm(_))));
    let three = input(&a3_3d(), &[c(0.2, 0.1), c(0.5, -0.3), c(0.7, 0.4)]);
    assert!(check_m2_relations(&three, 1e-10).is_err());
}

#[test]
fn euler_weights_of_canonical_metric() {
    let cfg = CheckConfig::default();
    for (spec, centre) in [
        (quartic2(), vec![c(0.0, 0.0), c(1.0, 0.0)]),
        (p1(), vec![c(0.3, 0.0), c(0.2, 0.4)]),
        (a3_3d(), vec![c(0.2, 0.1), c(0.5, -0.3), c(0.7, 0.4)]),
    ] {
        for t in points(&centre, 0.2, 3, 13) {
            let r = check_euler_weights_canonical(&spec, &t, &cfg).unwrap();
            assert!(r.pass(), "{r:?}");
        }
    }
}

#[test]
fn radial_h11_is_euler_invariant() {
    let f = |t: &[Complex64]| {
        let r = t[1].norm();
        let h11 = (1.0 + r * r).ln() + 2.0;
        Ok(CMatrix::from_diag(&[c(h11, 0.0), c(1.0 / h11, 0.0)]))
    };
    let degrees = [1.0, 2.0 / 3.0];
    for t in points(&[c(0.0, 0.0), c(0.5, 0.5)], 0.4, 5, 17) {
        let euler = [t[0], t[1] * (2.0 / 3.0)];
        let r = check_euler_weights(&t, &euler, &degrees, f, &FdConfig::default(), 1e-5).unwrap();
        assert!(r.pass(), "{r:?}");
    }
    // An angular dependence is seen.
    let g = |t: &[Complex64]| Ok(CMatrix::from_diag(&[c(2.0 + t[1].arg().sin(), 0.0), c(1.0, 0.0)]));
    let t = [c(0.0, 0.0), c(0.5, 0.5)];
    let euler = [t[0], t[1] * (2.0 / 3.0)];
    let r = check_euler_weights(&t, &euler, &degrees, g, &FdConfig::default(), 1e-5).unwrap();
    assert!(r.residual("euler_weights").unwrap() > 1e-3);
}

#[test]
fn constant_weighted_metric_has_zero_euler_residual() {
    let h = CMatrix::from_fn(2, 2, |i, j| if i == j { c(1.5, 0.0) } else { c(0.0, 0.0) });
    let t = [c(0.3, 0.0), c(0.1, 0.2)];
    let r = check_euler_weights(&t, &t, &[1.0, 0.5], |_| Ok(h.clone()), &FdConfig::default(), 1e-12).unwrap();
    assert_eq!(r.residual("euler_weights"), Some(0.0));
}

#[test]
fn cubic2_constant_boundary_gives_constant_solution() {
    let grid = square(64);
    let sol = solve_tt2d(&cubic2(), &grid, &Tt2dOptions::default()).unwrap();
    assert!(sol.converged && sol.residual <= 1e-10 && sol.iterations <= 5, "{:?}", sol.history);
    assert!(sol.h11.iter().all(|h| (h - 1.0).abs() <= 1e-12));
    let (pde, inv) = tt2d_residual(&cubic2(), &sol).unwrap();
    assert!(pde <= 1e-12 && inv <= 1e-12);
}

#[test]
fn doubled_cubic_relaxes_to_inverse_root() {
    let c0 = std::f64::consts::FRAC_1_SQRT_2;
    let grid = square(32);
    let opts =
        Tt2dOptions { boundary: Boundary::Constant(c0), initial: InitialGuess::Constant(1.0), ..Default::default() };
    let sol = solve_tt2d(&cubic2_doubled(), &grid, &opts).unwrap();
    assert!(sol.converged, "{:?}", sol.history);
    assert!(sol.h11.iter().all(|h| (h - c0).abs() <= 1e-9));
}

#[test]
fn p1_exact_boundary_converges_fast() {
    let spec = p1();
    let grid = square(64);
    let opts = Tt2dOptions { boundary: p1_exact_boundary(&grid), tol: 1e-8, max_iter: 30, ..Default::default() };
    let start = Instant::now();
    let sol = solve_tt2d(&spec, &grid, &opts).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(sol.converged && sol.residual <= 1e-8 && sol.iterations <= 30, "{:?}", sol.history);
    assert!(elapsed <= 5.0, "{elapsed} s");
    let (pde, inv) = tt2d_residual(&spec, &sol).unwrap();
    assert!(pde <= 10.0 * sol.residual.max(opts.tol), "{pde} vs {}", sol.residual);
    assert!(sol.im_derivative <= 1e-4 && inv <= 1e-4, "{} {inv}", sol.im_derivative);
    // Oracle: the exact solution on every node.
    let worst =
        (0..grid.n * grid.n).map(|p| (sol.h11[p] - (-0.5 * grid.x(p % grid.n)).exp()).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn p1_constant_boundary_converges_but_depends_on_im_t2() {
    let spec = p1();
    let grid = square(48);
    let opts = Tt2dOptions { tol: 1e-8, max_iter: 30, ..Default::default() };
    let sol = solve_tt2d(&spec, &grid, &opts).unwrap();
    assert!(sol.converged && sol.residual <= 1e-8, "{:?}", sol.history);
    assert!(sol.h11.iter().all(|h| *h > 0.0));
    // Constant Dirichlet data is not Euler invariant, so neither is the solution.
    assert!(sol.im_derivative > 1e-2);
}

#[test]
fn solution_is_independent_of_initial_guess() {
    let grid = square(40);
    let cases: Vec<(PotentialSpec, Boundary)> = vec![
        (cubic2(), Boundary::Constant(1.0)),
        (p1(), p1_exact_boundary(&grid)),
        (p1(), Boundary::Constant(1.0)),
        (quartic2(), Boundary::Constant(1.0)),
    ];
    for (spec, boundary) in cases {
        let solve = |initial| {
            let opts = Tt2dOptions { boundary: boundary.clone(), initial, tol: 1e-11, max_iter: 50 };
            solve_tt2d(&spec, &grid, &opts).unwrap()
        };
        let (a, b) = (solve(InitialGuess::Constant(1.0)), solve(InitialGuess::HarmonicExtension));
        assert!(a.converged && b.converged);
        let diff = a.h11.iter().zip(&b.h11).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-6, "{diff}");
    }
}

#[test]
fn residual_history_is_monotone() {
    let grid = square(40);
    for (spec, initial) in [
        (p1(), InitialGuess::Constant(3.0)),
        (quartic2(), InitialGuess::Constant(0.2)),
        (cubic2(), InitialGuess::Constant(5.0)),
    ] {
        let opts = Tt2dOptions { initial, ..Default::default() };
        let sol = solve_tt2d(&spec, &grid, &opts).unwrap();
        assert!(sol.history.windows(2).all(|w| w[1] < w[0]), "{:?}", sol.history);
    }
}

#[test]
fn scaled_field_is_rejected_by_independent_residual() {
    let spec = p1();
    let grid = square(64);
    let opts = Tt2dOptions { boundary: p1_exact_boundary(&grid), tol: 1e-8, max_iter: 30, ..Default::default() };
    let mut sol = solve_tt2d(&spec, &grid, &opts).unwrap();
    sol.h11.iter_mut().for_each(|h| *h *= 1.1);
    let (pde, _) = tt2d_residual(&spec, &sol).unwrap();
    assert!(pde > 0.01, "{pde}");
}

#[test]
fn iteration_cap_returns_last_iterate() {
    let grid = square(24);
    let opts = Tt2dOptions { initial: InitialGuess::Constant(4.0), max_iter: 1, tol: 1e-14, ..Default::default() };
    let sol = solve_tt2d(&p1(), &grid, &opts).unwrap();
    assert!(!sol.converged);
    assert_eq!(sol.iterations, 1);
    assert_eq!(sol.history.len(), 2);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(Grid::new(0.0, 0.0, 1.0, 1.0, 2).is_err());
    assert!(Grid::new(1.0, 0.0, 0.0, 1.0, 8).is_err());
    let grid = square(8);
    let bad = Tt2dOptions { boundary: Boundary::Constant(-1.0), ..Default::default() };
    assert!(solve_tt2d(&cubic2(), &grid, &bad).is_err());
    assert!(solve_tt2d(&a3_3d(), &grid, &Tt2dOptions::default()).is_err());
}

#[test]
fn node_residuals_vanish_on_boundary() {
    let grid = square(16);
    let sol = solve_tt2d(&quartic2(), &grid, &Tt2dOptions::default()).unwrap();
    let r = node_residuals(&quartic2(), &sol).unwrap();
    assert_eq!(r.len(), 256);
    assert_eq!(r[0], 0.0);
    assert!(r.iter().fold(0.0_f64, |m, v| m.max(*v)) <= 1e-10);
}
