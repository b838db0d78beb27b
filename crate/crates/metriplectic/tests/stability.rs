//! Linearization and spectrum checks that pit independent routes against
//! each other: finite differences vs the hand-assembled Jacobian, and the
//! complexified closed-form roots vs the QR eigensolver.

use metriplectic::linalg::Mat;
use metriplectic::models::{Generator, TopParams};
use metriplectic::stability::{
    classify, closed_form_ab, eigen_residual, linearize, spectrum, stability_boundary_l3,
    Equilibrium, StabilityClass, ZERO_TOL,
};
use metriplectic::models::heavy_top_rhs;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Central-difference Jacobian of the heavy-top flow.
fn fd_jacobian(params: &TopParams, gen: &Generator, z: &[f64]) -> Mat {
    let n = z.len();
    let mut cols = vec![vec![0.0; n]; n];
    for j in 0..n {
        let h = 1e-5 * z[j].abs().max(1.0);
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[j] += h;
        zm[j] -= h;
        let fp = heavy_top_rhs(params, gen, &zp).unwrap();
        let fm = heavy_top_rhs(params, gen, &zm).unwrap();
        for i in 0..n {
            cols[j][i] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    Mat::from_rows(&rows)
}

/// Multiset comparison: every expected value must claim a distinct
/// computed eigenvalue within tol. Doubled eigenvalues make any
/// sort-then-zip pairing brittle, so match greedily by distance.
fn assert_spectra_match(got: &[Complex64], want: &[Complex64], tol: f64) {
    assert_eq!(got.len(), want.len());
    let mut taken = vec![false; got.len()];
    for w in want {
        let mut best: Option<(usize, f64)> = None;
        for (i, g) in got.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d = (g - w).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.unwrap();
        assert!(d < tol, "no eigenvalue near {w}: got {:?}, want {:?}", got, want);
        taken[i] = true;
    }
}

#[test]
fn finite_differences_confirm_the_linearization() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for kind in 0..3 {
        for lambda in [0.1, 1.0] {
            let gen = match kind {
                0 => Generator::linear(lambda).unwrap(),
                1 => Generator::log(lambda).unwrap(),
                _ => Generator::quadratic(lambda).unwrap(),
            };
            for _ in 0..20 {
                let params = TopParams::symmetric(
                    rng.random_range(0.5..2.0),
                    rng.random_range(0.5..3.0),
                    rng.random_range(0.3..2.0),
                )
                .unwrap();
                let eq = Equilibrium::new(
                    rng.random_range(0.5..5.0),
                    rng.random_range(0.5..5.0),
                )
                .unwrap();
                let z = eq.state();
                let rhs = heavy_top_rhs(&params, &gen, &z).unwrap();
                let stationary = rhs.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
                assert!(stationary < 1e-12, "aligned state not stationary: {stationary}");

                let exact = linearize(&params, &gen, &eq).unwrap();
                let fd = fd_jacobian(&params, &gen, &z);
                let scale = exact.max_abs().max(1.0);
                for i in 0..6 {
                    for j in 0..6 {
                        let diff = (exact[(i, j)] - fd[(i, j)]).abs();
                        assert!(
                            diff < 1e-6 * scale,
                            "entry ({i},{j}): exact {} vs fd {}",
                            exact[(i, j)],
                            fd[(i, j)]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn closed_form_roots_match_qr_spectrum() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let mut checked = 0;
    while checked < 50 {
        let i1 = rng.random_range(0.5..2.0);
        let params = TopParams::symmetric(i1, 2.0 * i1, rng.random_range(0.3..2.0)).unwrap();
        let lambda = rng.random_range(0.05..1.0);
        let gen = if checked % 2 == 0 {
            Generator::linear(lambda).unwrap()
        } else {
            Generator::log(lambda).unwrap()
        };
        let eq = Equilibrium::new(rng.random_range(0.5..4.0), rng.random_range(0.5..4.0)).unwrap();
        let (a, b) = closed_form_ab(&params, &gen, &eq).unwrap();
        if (a - b).norm() < 1e-3 {
            continue; // near-defective: eigenvalues of the real matrix are ill-conditioned
        }
        let m = linearize(&params, &gen, &eq).unwrap();
        let eig = spectrum(&m).unwrap();
        let expected = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            a,
            a.conj(),
            b,
            b.conj(),
        ];
        let scale = expected.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        assert_spectra_match(&eig, &expected, 1e-8 * scale);
        checked += 1;
    }
}

#[test]
fn spectrum_keeps_structural_kernel_and_conjugation() {
    for (l3, g3) in [(5.0, 3.0), (4.35, 3.0), (5.2, 3.0)] {
        let eq = Equilibrium::new(l3, g3).unwrap();
        for lambda in [0.1, 1.0] {
            for gen in [
                Generator::linear(lambda).unwrap(),
                Generator::log(lambda).unwrap(),
                Generator::quadratic(lambda).unwrap(),
            ] {
                let params = TopParams::symmetric(1.0, 2.0, 1.0).unwrap();
                let m = linearize(&params, &gen, &eq).unwrap();
                let eig = spectrum(&m).unwrap();
                let zeros = eig.iter().filter(|z| z.norm() <= 1e-9).count();
                assert_eq!(zeros, 2, "kernel of {:?} at ({l3},{g3}): {:?}", gen.kind(), eig);
                for z in &eig {
                    let has_mate = eig.iter().any(|w| (w - z.conj()).norm() < 1e-8);
                    assert!(has_mate, "unpaired eigenvalue {z} in {:?}", eig);
                }
                for z in &eig {
                    let r = eigen_residual(&m, *z).unwrap();
                    assert!(r < 1e-8, "residual {r} for eigenvalue {z}");
                }
            }
        }
    }
}

#[test]
fn classification_flips_exactly_at_the_boundary() {
    let params = TopParams::symmetric(1.0, 2.0, 1.0).unwrap();
    let gen = Generator::linear(1e-3).unwrap();
    for k in 0..20 {
        let g3 = 0.5 + 4.5 * (k as f64) / 19.0;
        let l3_star = stability_boundary_l3(g3, params.i1, params.xi);
        assert!((l3_star * l3_star - 4.0 * g3 * params.i1 * params.xi).abs() < 1e-12);

        let above = classify(
            &params,
            &gen,
            &Equilibrium::new(l3_star * (1.0 + 1e-3), g3).unwrap(),
        )
        .unwrap();
        assert_eq!(
            above.classification,
            StabilityClass::Stable,
            "g3 = {g3}, just above the boundary: {:?}",
            above.spectrum
        );

        let below = classify(
            &params,
            &gen,
            &Equilibrium::new(l3_star * (1.0 - 1e-3), g3).unwrap(),
        )
        .unwrap();
        assert_eq!(
            below.classification,
            StabilityClass::Unstable,
            "g3 = {g3}, just below the boundary: {:?}",
            below.spectrum
        );
    }
}

#[test]
fn reports_carry_closed_forms_only_where_they_exist() {
    let params = TopParams::symmetric(1.0, 2.0, 1.0).unwrap();
    let eq = Equilibrium::new(5.0, 3.0).unwrap();
    let with_form = classify(&params, &Generator::linear(0.1).unwrap(), &eq).unwrap();
    assert!(with_form.closed_form.is_some());
    let (a, b) = with_form.closed_form.unwrap();
    assert!(with_form
        .spectrum
        .iter()
        .any(|z| (z - a).norm() < 1e-8 * (1.0 + a.norm())));
    assert!(with_form
        .spectrum
        .iter()
        .any(|z| (z - b).norm() < 1e-8 * (1.0 + b.norm())));

    let without = classify(&params, &Generator::quadratic(0.1).unwrap(), &eq).unwrap();
    assert!(without.closed_form.is_none());
    assert_eq!(without.classification, StabilityClass::Stable);

    let skewed = TopParams::new(1.0, 1.0, 1.9, 1.0).unwrap();
    let eq_skewed = Equilibrium::new(5.0, 3.0).unwrap();
    let report = classify(&skewed, &Generator::linear(0.1).unwrap(), &eq_skewed).unwrap();
    assert!(report.closed_form.is_none());
}

#[test]
fn conservative_top_is_marginal_above_the_boundary() {
    let params = TopParams::symmetric(1.0, 2.0, 1.0).unwrap();
    let gen = Generator::linear(0.0).unwrap();
    let report = classify(&params, &gen, &Equilibrium::new(5.0, 3.0).unwrap()).unwrap();
    assert_eq!(report.classification, StabilityClass::Marginal);
    assert_eq!(ZERO_TOL, 1e-10);
}
