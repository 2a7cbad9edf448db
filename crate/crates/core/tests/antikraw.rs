use heunband::antikraw::{
    alternative_m, analyze_antikraw, band_coeff_deviation, build_operator, condition_residuals, degree_four_dependence,
    make_antispin, penta_band_coeffs, scan_penta, solve_penta_coeffs, verify_penta, Ansatz, PentaCoefficients,
};
use heunband::linalg::{sym_eigen, SymmetricMatrix};
use proptest::prelude::*;

#[test]
fn l1_spectrum_at_n2() {
    let r = make_antispin(2).unwrap();
    let l1 = SymmetricMatrix::from_dense(&r.l1(), 0.0).unwrap();
    let v = sym_eigen(&l1).unwrap();
    for (got, want) in v.values().iter().zip([-1.5, 0.5, 2.5]) {
        assert!((got - want).abs() < 1e-13, "{got}");
    }
    assert!((r.casimir_value() - 35.0 / 4.0).abs() < 1e-15);
}

#[test]
fn casimir_and_anticommutators_up_to_forty() {
    for n in (0..=40).step_by(2) {
        let r = make_antispin(n).unwrap();
        assert!(r.casimir_residual() < 1e-10, "N={n}: {}", r.casimir_residual());
        for res in r.anticommutator_residuals() {
            assert!(res < 1e-10, "N={n}: {res}");
        }
    }
    assert_eq!(make_antispin(8).unwrap().casimir_value(), 80.75);
}

#[test]
fn solved_coefficients_at_n8() {
    let r = make_antispin(8).unwrap();
    let c = solve_penta_coeffs(&r, 3, 5).unwrap();
    assert_eq!(c.kappa1, 32.5);
    assert_eq!(c.kappa2, 72.5);
    let [a1, a2, a3, a4, a5, a6] = c.alpha;
    assert!((a3 + 33.5).abs() < 1e-12 && (a4 + 73.5).abs() < 1e-12);
    assert!((a1.abs() - 1.0).abs() < 1e-12 && (a2.abs() - 1.0).abs() < 1e-12);
    assert!((a5.abs() - 32.5).abs() < 1e-12 && (a6.abs() - 72.5).abs() < 1e-12);
    // The solve fixes the signs as α₁ = (−1)^{N1+1}, α₂ = (−1)^{N2+1}.
    assert_eq!(a1.signum(), 1.0);
    assert_eq!(a2.signum(), 1.0);
    for res in condition_residuals(&r, 3, 5, &c).unwrap() {
        assert!(res < 1e-12, "{res}");
    }
}

#[test]
fn band_coefficients_vanish_at_cutoff() {
    let r = make_antispin(8).unwrap();
    let c = solve_penta_coeffs(&r, 3, 5).unwrap();
    let b = penta_band_coeffs(&r, &c);
    // g[k] = G_{k+2}, f[k] = F_{k+2}
    let scale = b.g.iter().chain(&b.f).fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(b.g[2].abs() < 1e-12 * scale, "G_4 = {}", b.g[2]);
    assert!(b.g[3].abs() < 1e-12 * scale, "G_5 = {}", b.g[3]);
    assert!(b.f[2].abs() < 1e-12 * scale, "F_4 = {}", b.f[2]);
    assert!(band_coeff_deviation(&r, &c).unwrap() < 1e-13);
}

#[test]
fn pentadiagonal_commutes_with_simple_spectrum() {
    let (op, rep) = analyze_antikraw(8, 3, 5, Ansatz::Pentadiagonal).unwrap();
    assert!(rep.comm_e < 1e-12, "{}", rep.comm_e);
    assert!(rep.comm_d < 1e-10, "{}", rep.comm_d);
    assert!(rep.comm_d_conjugated < 1e-10, "{}", rep.comm_d_conjugated);
    assert_eq!(rep.outside_band, 0.0);
    assert!(rep.asymmetry < 1e-12);
    assert!(rep.gap_ratio_e.unwrap() > 1e-6 && rep.gap_ratio_d.unwrap() > 1e-6);
    assert!(rep.simple && rep.refusal.is_none());
    assert!(op.coefficients.is_some());
}

#[test]
fn alternative_operator_passes_same_checks() {
    let (_, rep) = analyze_antikraw(8, 3, 5, Ansatz::Alternative).unwrap();
    assert!(rep.comm_e < 1e-10, "{}", rep.comm_e);
    assert!(rep.comm_d < 1e-10, "{}", rep.comm_d);
    assert!(rep.comm_d_conjugated < 1e-10, "{}", rep.comm_d_conjugated);
    assert_eq!(rep.outside_band, 0.0);
    assert!(rep.simple);
}

#[test]
fn alternative_with_plus_sign_fails_in_dual_basis() {
    // Flipping the L2² coefficient back to + breaks the d-basis commutation.
    let r = make_antispin(8).unwrap();
    let m = alternative_m(&r, 3, 5).unwrap();
    let l2 = r.l2();
    let flipped = &m + &(&l2 * &l2).scale(143.0);
    let s = r.eigenbasis().unwrap();
    let conj = &(&s.transpose() * &flipped) * &s;
    let p = heunband::linalg::Matrix::from_fn(9, 9, |i, j| if i == j && i <= 5 { 1.0 } else { 0.0 });
    assert!(heunband::linalg::commutator_residual(&conj, &p).unwrap() > 1e-3);
}

#[test]
fn bilinear_ansatz_degenerate() {
    let (_, rep) = analyze_antikraw(8, 3, 5, Ansatz::Bilinear).unwrap();
    assert!(rep.comm_e < 1e-12 && rep.comm_d < 1e-12);
    assert!(rep.gap_ratio_e.unwrap() < 1e-10);
    assert!(!rep.simple);
    assert!(rep.refusal.unwrap().contains("degenerate restricted spectrum"));
}

#[test]
fn full_cutoff_commutes_trivially() {
    let r = make_antispin(6).unwrap();
    let op = build_operator(&r, Ansatz::Pentadiagonal, 2, 3).unwrap();
    let rep = verify_penta(&r, &op, 6, 6).unwrap();
    assert_eq!(rep.comm_e, 0.0);
}

#[test]
fn scan_small_degrees() {
    let mut degenerate = Vec::new();
    for n in [4, 6, 8, 10] {
        for e in scan_penta(n).unwrap() {
            assert!(e.comm_e < 1e-12, "{e:?}");
            assert!(e.comm_d < 1e-10, "{e:?}");
            if !e.simple {
                degenerate.push((e.n, e.n1, e.n2));
            }
        }
    }
    assert!(degenerate.is_empty(), "degenerate configurations: {degenerate:?}");
}

#[test]
fn quartic_words_reduce() {
    for n in [4, 8, 12] {
        let r = make_antispin(n).unwrap();
        for res in degree_four_dependence(&r).unwrap() {
            assert!(res < 1e-10, "N={n}: {res}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_form_bands_match_assembly(
        half in 2usize..8,
        alpha in prop::array::uniform6(-5.0f64..5.0),
    ) {
        let r = make_antispin(2 * half).unwrap();
        let c = PentaCoefficients { alpha, kappa1: 0.0, kappa2: 0.0 };
        prop_assert!(band_coeff_deviation(&r, &c).unwrap() < 1e-12);
    }

    #[test]
    fn solved_conditions_hold(half in 2usize..10, f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
        let n = 2 * half;
        let n1 = 1 + ((n - 2) as f64 * f1) as usize % (n - 2);
        let n2 = 1 + ((n - 2) as f64 * f2) as usize % (n - 2);
        let r = make_antispin(n).unwrap();
        let c = solve_penta_coeffs(&r, n1, n2).unwrap();
        for res in condition_residuals(&r, n1, n2, &c).unwrap() {
            prop_assert!(res < 1e-12);
        }
        let want1 = if n1.is_multiple_of(2) { -1.0 } else { 1.0 };
        prop_assert!((c.alpha[0] - want1).abs() < 1e-12);
        prop_assert!((c.alpha[2] + 1.0 + c.kappa1).abs() < 1e-10);
        prop_assert!((c.alpha[3] + 1.0 + c.kappa2).abs() < 1e-10);
    }
}
