//! Acceptance run: one PASS/FAIL line per criterion, each at its stated tolerance.
//!
//! A criterion listed in `KNOWN_UNATTAINABLE` is expected to print FAIL; the run fails if it
//! unexpectedly passes, or if any other criterion fails.

use std::process::{exit, Command};
use std::time::Instant;

use num_complex::Complex64;
use ttstar::catalog::{catalog, point, A3_REFERENCE_POINT, NAMES, QUARTIC_REFERENCE_POINT};
use ttstar::sampling::{sample_points, Polydisk};
use ttstar::specfile::{parse_spec, write_spec};
use ttstar_core::canonical::canonical_frame;
use ttstar_core::cdv::{
    connection_gap_for, construct_canonical_cdv, flat_frame_h, harmonic_potential, pencil_curvature,
    pencil_curvature_with, verify_cv_axioms, verify_harmonic, CdvStructure, CheckConfig,
};
use ttstar_core::lowdim::{
    check_m2_relations, check_m3_relations, solve_tt2d, tt2d_residual, Boundary, Grid, InitialGuess,
    LowDimRelationsInput, Tt2dOptions,
};
use ttstar_core::numerics::CMatrix;
use ttstar_core::potential::{associativity_residual, flat_eval, wdvv_m3_scalar, PotentialSpec};

/// The `Q := I` clause of the pencil criterion: a central constant cannot change curvature.
const KNOWN_UNATTAINABLE: [u32; 1] = [6];

const ALGEBRAIC: [&str; 7] = [
    "kappa_involution",
    "h_real_structure",
    "h_inverse_identity",
    "ctilde_equals_c",
    "higgs_adjoint",
    "q_zero",
    "q_self_adjoint",
];
const FD: [&str; 5] = ["kappa_parallel", "tt_star", "d_prime_phi", "omega_holomorphic", "unit_parallel"];

struct Line {
    id: u32,
    pass: bool,
    text: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn structure(spec: &PotentialSpec, t: &[Complex64]) -> CdvStructure {
    construct_canonical_cdv(&canonical_frame(spec, t, 1e-4).unwrap(), spec.euler().d)
}

/// `n` generic points of `spec` near `centre`, seeded.
fn generic_points(spec: &PotentialSpec, centre: &[Complex64], radius: f64, n: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let disk = Polydisk { centre: centre.to_vec(), radius };
    let s = sample_points(n, seed, &disk, |p| canonical_frame(spec, p, 1e-4).map(|f| f.gap >= 0.05).unwrap_or(false));
    assert!(s.skipped.is_empty(), "sampling skipped points");
    s.accepted
}

fn quartic_centre() -> Vec<Complex64> {
    point(&QUARTIC_REFERENCE_POINT)
}

fn a3_centre() -> Vec<Complex64> {
    point(&A3_REFERENCE_POINT)
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let cfg = CheckConfig::default();
    let (mut alg, mut fd, mut n) = (0.0_f64, 0.0_f64, 0);
    for (name, centre, r) in [("quartic2", quartic_centre(), 0.5), ("a3_3d", a3_centre(), 0.3)] {
        let spec = catalog(name).unwrap();
        for t in generic_points(&spec, &centre, r, 5, 101) {
            let rep = verify_cv_axioms(&spec, &structure(&spec, &t), &cfg).unwrap();
            alg = ALGEBRAIC.iter().map(|k| rep.residual(k).unwrap()).fold(alg, f64::max);
            fd = FD.iter().map(|k| rep.residual(k).unwrap()).fold(fd, f64::max);
            n += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Line {
        id: 1,
        pass: n == 10 && alg <= 1e-10 && fd <= 1e-5 && secs <= 10.0,
        text: format!("construction soundness on {n} points: algebraic {alg:.2e} (<= 1e-10), fd {fd:.2e} (<= 1e-5), {secs:.2} s (<= 10 s)"),
    }
}

fn criterion_2() -> Line {
    let good = catalog("a3_3d").unwrap();
    let broken = catalog("broken_wdvv").unwrap();
    let pts = generic_points(&good, &a3_centre(), 0.5, 10, 202);
    let (mut agree, mut good_max, mut broken_min) = (0.0_f64, 0.0_f64, f64::INFINITY);
    for t in &pts {
        let fe = flat_eval(&good, t).unwrap();
        let (full, scalar) = (associativity_residual(&fe), wdvv_m3_scalar(&fe).norm());
        agree = agree.max((full - scalar).abs());
        good_max = good_max.max(full).max(scalar);
        let fb = flat_eval(&broken, t).unwrap();
        broken_min = broken_min.min(associativity_residual(&fb)).min(wdvv_m3_scalar(&fb).norm());
    }
    Line {
        id: 2,
        pass: agree <= 1e-10 && good_max <= 1e-10 && broken_min > 1e-3,
        text: format!("WDVV oracles agree to {agree:.2e} (<= 1e-10), a3_3d max {good_max:.2e}, perturbed min {broken_min:.2e} (> 1e-3)"),
    }
}

fn criterion_3() -> Line {
    let cfg = CheckConfig::default();
    let names = ["harmonic_dp_phi", "harmonic_connection", "harmonic_p_self_adjoint", "harmonic_v_commutator"];
    let (mut fd, mut diag) = (0.0_f64, 0.0_f64);
    for (name, centre, r) in [("quartic2", quartic_centre(), 0.5), ("a3_3d", a3_centre(), 0.3)] {
        let spec = catalog(name).unwrap();
        for t in generic_points(&spec, &centre, r, 5, 303) {
            let cdv = structure(&spec, &t);
            let hd = harmonic_potential(&cdv.frame, cdv.d);
            let rep = verify_harmonic(&spec, &cdv, &hd, &cfg).unwrap();
            fd = names.iter().map(|k| rep.residual(k).unwrap()).fold(fd, f64::max);
            let scale = cdv.frame.u.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
            diag = diag.max(rep.residual("harmonic_diagonal_law").unwrap() / scale);
        }
    }
    Line {
        id: 3,
        pass: fd <= 1e-5 && diag <= 4.0 * f64::EPSILON,
        text: format!("harmonic potential: fd {fd:.2e} (<= 1e-5), diagonal law {diag:.2e} relative (<= 4 eps)"),
    }
}

fn criterion_4() -> Line {
    let cfg = CheckConfig::default();
    let gap = |name: &str, t: &[Complex64]| {
        let spec = catalog(name).unwrap();
        connection_gap_for(&spec, &structure(&spec, t), &cfg).unwrap()
    };
    let four =
        |g: &ttstar_core::cdv::ConnectionGap| [g.torsion, g.d_omega_hat, g.levi_civita_vs_chern, g.real_vs_chern];
    let q = four(&gap("quartic2", &quartic_centre()));
    let a3 = gap("a3_3d", &a3_centre());
    let a = four(&a3);
    let trivial = four(&gap("cubic2", &[c(0.3, 0.2), c(0.7, -0.4)]));
    let h = flat_frame_h(&structure(&catalog("a3_3d").unwrap(), &a3_centre()));
    let offdiag = h.max_off_diagonal() / h.max_abs();
    let fmt = |v: [f64; 4]| v.map(|x| format!("{x:.2e}")).join("/");
    Line {
        id: 4,
        pass: q.iter().chain(&a).all(|&x| x > 1e-3) && trivial.iter().all(|&x| x <= 1e-8) && offdiag > 1e-6,
        text: format!(
            "obstructions torsion/domega/LC-Chern/real-Chern quartic2 {} a3_3d {} (> 1e-3), cubic2 {} (<= 1e-8), a3_3d flat h off-diagonal {offdiag:.2e} (> 1e-6)",
            fmt(q),
            fmt(a),
            fmt(trivial)
        ),
    }
}

fn criterion_5() -> Line {
    let cfg = CheckConfig::default();
    let mut disagreements = 0;
    let mut total = 0;
    for (name, centre, r) in [
        ("cubic2", vec![c(0.0, 0.0), c(0.5, 0.0)], 1.0),
        ("quartic2", quartic_centre(), 0.5),
        ("a3_3d", a3_centre(), 0.3),
    ] {
        let spec = catalog(name).unwrap();
        for t in generic_points(&spec, &centre, r, 20, 505) {
            let g = connection_gap_for(&spec, &structure(&spec, &t), &cfg).unwrap();
            if (g.torsion <= 1e-6) != (g.d_omega_hat <= 1e-6) {
                disagreements += 1;
            }
            total += 1;
        }
    }
    Line {
        id: 5,
        pass: disagreements == 0 && total == 60,
        text: format!("torsion/domega indicators at 1e-6: {disagreements} disagreements over {total} points"),
    }
}

fn criterion_6() -> Line {
    let cfg = CheckConfig::default();
    let spec = catalog("quartic2").unwrap();
    let cdv = structure(&spec, &quartic_centre());
    let z = [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)];
    let flat = pencil_curvature(&spec, &cdv, &z, &cfg).unwrap().residual("pencil_curvature").unwrap();
    let with_identity = pencil_curvature_with(&spec, &cdv, &z, &cfg, &CMatrix::identity(2))
        .unwrap()
        .residual("pencil_curvature")
        .unwrap();
    let nilpotent = CMatrix::from_fn(2, 2, |i, j| c(if (i, j) == (0, 1) { 1.0 } else { 0.0 }, 0.0));
    let with_nilpotent =
        pencil_curvature_with(&spec, &cdv, &z, &cfg, &nilpotent).unwrap().residual("pencil_curvature").unwrap();
    Line {
        id: 6,
        pass: flat <= 1e-5 && with_identity > 1e-1,
        text: format!(
            "pencil curvature {flat:.2e} (<= 1e-5); Q := I gives {with_identity:.2e} (> 1e-1 required); Q := E12 gives {with_nilpotent:.2e}"
        ),
    }
}

fn criterion_7() -> Line {
    let grid = Grid::new(-1.0, -1.0, 1.0, 1.0, 64).unwrap();
    let cubic = solve_tt2d(&catalog("cubic2").unwrap(), &grid, &Tt2dOptions::default()).unwrap();
    let cubic_ok = cubic.converged && cubic.residual <= 1e-10 && cubic.iterations <= 5;

    let p1 = catalog("p1").unwrap();
    // Euler-invariant Dirichlet data: h₁₁ = e^{−Re t²/2} depends on Re t² only.
    let opts = Tt2dOptions {
        boundary: Boundary::from_fn(&grid, |x, _| (-0.5 * x).exp()),
        initial: InitialGuess::Constant(1.0),
        tol: 1e-8,
        max_iter: 30,
    };
    let start = Instant::now();
    let sol = solve_tt2d(&p1, &grid, &opts).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (pde4, _) = tt2d_residual(&p1, &sol).unwrap();
    let within = pde4 <= 10.0 * sol.residual.max(opts.tol);
    let p1_ok = sol.converged && sol.residual <= 1e-8 && sol.iterations <= 30 && secs <= 5.0;
    Line {
        id: 7,
        pass: cubic_ok && p1_ok && within && sol.im_derivative <= 1e-4,
        text: format!(
            "tt2d cubic2 residual {:.2e} in {} steps; p1 residual {:.2e} in {} steps, {secs:.2} s, order-4 {pde4:.2e} (<= 10x), Im-derivative {:.2e} (<= 1e-4)",
            cubic.residual, cubic.iterations, sol.residual, sol.iterations, sol.im_derivative
        ),
    }
}

fn criterion_8() -> Line {
    let mut m2 = 0.0_f64;
    let mut branch = true;
    for name in ["quartic2", "cubic2", "p1"] {
        let spec = catalog(name).unwrap();
        for t in generic_points(&spec, &[c(0.0, 0.0), c(0.8, 0.1)], 0.3, 5, 808) {
            let input = LowDimRelationsInput::from_structure(&spec, &structure(&spec, &t)).unwrap();
            let r = check_m2_relations(&input, 1e-10).unwrap();
            branch &= r.get("m2_positive_diagonal").is_some();
            m2 = r.entries.iter().map(|e| e.residual).fold(m2, f64::max);
        }
    }
    let (mut implied, mut checked) = (0.0_f64, 0);
    for name in ["a3_3d", "broken_wdvv"] {
        let spec = catalog(name).unwrap();
        for t in generic_points(&spec, &a3_centre(), 0.3, 5, 818) {
            let input = LowDimRelationsInput::from_structure(&spec, &structure(&spec, &t)).unwrap();
            let r = check_m3_relations(&input, 1e-10).unwrap();
            if r.residual("m3_wdvv").unwrap() <= 1e-10 {
                implied = implied.max(r.residual("m3_implied_relations").unwrap());
                checked += 1;
            }
        }
    }
    Line {
        id: 8,
        pass: branch && m2 <= 1e-10 && checked == 5 && implied <= 1e-10,
        text: format!("m=2 relations and h = diag(h11, 1/h11): {m2:.2e}; m=3 implied relations at {checked} WDVV points: {implied:.2e} (<= 1e-10)"),
    }
}

fn criterion_9() -> Line {
    let mut exact = true;
    for name in NAMES {
        let spec = catalog(name).unwrap();
        let text = write_spec(&spec);
        let back = parse_spec(&text).unwrap();
        exact &= back == spec && write_spec(&back) == text;
    }
    let dir = std::env::temp_dir().join(format!("ttstar-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("quartic2.json");
    std::fs::write(&path, write_spec(&catalog("quartic2").unwrap())).unwrap();
    let report = || {
        Command::new(env!("CARGO_BIN_EXE_ttstar"))
            .args(["verify", "--spec", path.to_str().unwrap(), "--points", "5", "--seed", "7"])
            .output()
            .unwrap()
    };
    let (a, b) = (report(), report());
    let identical = a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    let _ = std::fs::remove_dir_all(&dir);
    Line {
        id: 9,
        pass: exact && identical,
        text: format!("catalog round-trip exact: {exact}; reports byte-identical under seed 7: {identical}"),
    }
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; this target takes none.
    let lines = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    let mut ok = true;
    for l in &lines {
        let known = KNOWN_UNATTAINABLE.contains(&l.id);
        let tag = match (l.pass, known) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known unattainable)",
            (true, true) => "PASS (listed as unattainable)",
        };
        println!("criterion {} {tag}: {}", l.id, l.text);
        ok &= l.pass != known;
    }
    if !ok {
        eprintln!("acceptance: unexpected outcome");
        exit(1);
    }
    println!("acceptance: all criteria as expected");
}
