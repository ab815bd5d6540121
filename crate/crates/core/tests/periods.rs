//! Period layer: raw cycle quadrature on the energy plane, the reduced
//! quotient-plane quadrature, closed-form reduced periods, the period
//! relations induced by the energy involution, theta-parameter assembly, and
//! the field-scale calibration.

use num_complex::Complex64;
use sg2_core::periods::{
    b_matrix_in_basis, build_theta_params, calibrate_c, compute_w, raw_periods, reduced_check,
    reduced_cycle_integral, relation_residuals, LoopBasis, PeriodsError, ReducedCycle,
    ReducedSign, FIELD_SCALE,
};
use sg2_core::spectral::{
    make_case_a_breather, make_case_a_kink, make_case_b_breather, make_case_b_kink,
};

fn relc(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn refc(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn closed_form_periods_standard_kink() {
    let curve = make_case_a_kink(1.0 / 32.0, 0.5).unwrap();
    let w = compute_w(&curve).unwrap();
    assert!(relc(w.w_plus, refc(184.096997827, 0.0)) < 1e-9);
    assert!(relc(w.w_minus, refc(663.205803766, 0.0)) < 1e-9);
    assert!(relc(w.tau_plus, refc(0.0, 1.23824614099)) < 1e-9);
    assert!(relc(w.tau_minus, refc(0.0, 0.482081097315)) < 1e-9);
    assert!(w.m_plus > 0.0 && w.m_plus < 1.0 && w.m_minus > 0.0 && w.m_minus < 1.0);
}

#[test]
fn closed_form_periods_off_circle_breather() {
    let curve = make_case_a_breather(1.0 / 32.0, 2.0 * std::f64::consts::PI / 5.0).unwrap();
    let w = compute_w(&curve).unwrap();
    assert!(relc(w.w_plus, refc(307.288892339, 0.0)) < 1e-9);
    assert!(relc(w.w_minus, refc(414.489068068, 0.0)) < 1e-9);
    assert!(relc(w.tau_plus, refc(0.0, 0.704757216337)) < 1e-9);
    assert!(relc(w.tau_minus, refc(0.0, 0.278639421821)) < 1e-9);
    assert!((w.m_plus - 0.1738895637).abs() < 1e-9);
    assert!((w.m_minus - 0.944597861335).abs() < 1e-9);
}

#[test]
fn closed_form_periods_on_circle_breather() {
    let curve = make_case_b_breather(0.6, 1.9).unwrap();
    let w = compute_w(&curve).unwrap();
    assert!(relc(w.w_plus, refc(385.261963505537, 0.0)) < 1e-10);
    // w- is negative imaginary; tau+ carries real part 1.
    assert!(relc(w.w_minus, refc(0.0, -265.6251927942339)) < 1e-10);
    assert!(relc(w.tau_plus, refc(1.0, 0.6644991801625219)) < 1e-10);
    assert!(relc(w.tau_minus, refc(0.0, 0.8866279600119973)) < 1e-10);
}

#[test]
fn nested_kink_shares_the_standard_periods() {
    // The two labellings of one branch-point set carry identical reduced
    // period data.
    let a = make_case_a_kink((-0.7_f64).exp() / 16.0, 0.3).unwrap();
    let b = make_case_b_kink(1.0, 0.4).unwrap();
    let wa = compute_w(&a).unwrap();
    let wb = compute_w(&b).unwrap();
    assert!(relc(wa.w_plus, wb.w_plus) < 1e-13);
    assert!(relc(wa.w_minus, wb.w_minus) < 1e-13);
    assert!(relc(wa.tau_plus, wb.tau_plus) < 1e-13);
    assert!(relc(wa.tau_minus, wb.tau_minus) < 1e-13);
}

#[test]
fn involution_period_relations_by_quadrature() {
    // Standard labelling: the involution swaps the two differentials across
    // the cycle pairs with weight 16.
    let a = make_case_a_kink(1.0 / 32.0, 0.5).unwrap();
    let rep = relation_residuals(&a).unwrap();
    for (i, &resid) in rep.standard.iter().enumerate() {
        assert!(resid < 1e-8, "standard relation {i}: {resid:.3e}");
    }
    for (i, &resid) in rep.rebased.iter().enumerate() {
        assert!(resid < 1e-8, "rebased relation {i}: {resid:.3e}");
    }
    // Nested labelling: the relations mix the cycles and flip signs.
    let b = make_case_b_kink(1.0, 0.4).unwrap();
    let rep = relation_residuals(&b).unwrap();
    for (i, &resid) in rep.nested.iter().enumerate() {
        assert!(resid < 1e-8, "nested relation {i}: {resid:.3e}");
    }
}

#[test]
fn quadrature_periods_are_not_defined_for_breathers() {
    let curve = make_case_a_breather(1.0 / 32.0, 1.0).unwrap();
    assert!(matches!(
        raw_periods(&curve, LoopBasis::Standard),
        Err(PeriodsError::UnsupportedFamily(_))
    ));
}

#[test]
fn phase_map_routes_agree() {
    // Three independent routes to the linear phase map: matrix inversion of
    // the raw x/t periods, the reduced combination of raw cycles, and the
    // closed-form reduced periods.
    let curve = make_case_a_kink(1.0 / 32.0, 0.5).unwrap();
    let raw = raw_periods(&curve, LoopBasis::Standard).unwrap();
    let by_inv = raw.l_matrix_by_inversion(FIELD_SCALE);
    let by_red = raw.l_matrix_reduced(FIELD_SCALE);
    let closed = build_theta_params(&curve, FIELD_SCALE).unwrap().l_matrix;
    for r in 0..2 {
        for c in 0..2 {
            assert!(relc(by_inv[r][c], by_red[r][c]) < 1e-8, "inv vs red {r}{c}");
            assert!(relc(by_red[r][c], closed[r][c]) < 1e-8, "red vs closed {r}{c}");
        }
    }
}

#[test]
fn period_matrix_from_quadrature_matches_closed_form() {
    // Standard basis on the standard labelling gives the rhombic matrix.
    let a = make_case_a_kink(1.0 / 32.0, 0.5).unwrap();
    let quad = b_matrix_in_basis(&a, LoopBasis::Standard).unwrap();
    let closed = build_theta_params(&a, FIELD_SCALE).unwrap().b;
    for r in 0..2 {
        for c in 0..2 {
            assert!(relc(quad[r][c], closed[r][c]) < 1e-8, "{r}{c}");
        }
    }
    // Nested basis on the nested labelling gives the lower-triangular-shifted
    // form [[tau+, tau+], [tau+, tau+ + tau-]].
    let b = make_case_b_kink(1.0, 0.4).unwrap();
    let w = compute_w(&b).unwrap();
    let quad = b_matrix_in_basis(&b, LoopBasis::Nested).unwrap();
    let expect = [
        [w.tau_plus, w.tau_plus],
        [w.tau_plus, w.tau_plus + w.tau_minus],
    ];
    for r in 0..2 {
        for c in 0..2 {
            assert!(relc(quad[r][c], expect[r][c]) < 1e-8, "{r}{c}");
        }
    }
}

#[test]
fn reduced_quadrature_matches_closed_forms_all_families() {
    let curves = [
        make_case_a_kink(1.0 / 32.0, 0.5).unwrap(),
        make_case_a_breather(1.0 / 32.0, 2.0 * std::f64::consts::PI / 5.0).unwrap(),
        make_case_b_kink(1.0, 0.4).unwrap(),
        make_case_b_breather(0.6, 1.9).unwrap(),
    ];
    for curve in &curves {
        let defects = reduced_check(curve).unwrap();
        for (i, &d) in defects.iter().enumerate() {
            assert!(d < 1e-8, "{:?}/{:?} leg {i}: {d:.3e}", curve.kind, curve.case);
        }
    }
}

#[test]
fn reduced_cycle_reference_values() {
    // Frozen loop-integral values for the two breather families; these pin
    // the lattice vectors the quadrature produces (not just their ratios).
    let ba = make_case_a_breather(1.0 / 32.0, 2.0 * std::f64::consts::PI / 5.0).unwrap();
    let a_m = reduced_cycle_integral(&ba, ReducedCycle::A, ReducedSign::Minus).unwrap();
    let b_m = reduced_cycle_integral(&ba, ReducedCycle::B, ReducedSign::Minus).unwrap();
    let b_p = reduced_cycle_integral(&ba, ReducedCycle::B, ReducedSign::Plus).unwrap();
    assert!(relc(a_m, refc(0.0, -230.985989)) < 5e-8);
    assert!(relc(b_m, refc(-207.244534, -115.492994)) < 5e-8);
    assert!(relc(b_p, refc(-153.644446, -216.564064)) < 5e-8);
    let bb = make_case_b_breather(0.6, 1.9).unwrap();
    let b_p = reduced_cycle_integral(&bb, ReducedCycle::B, ReducedSign::Plus).unwrap();
    let b_m = reduced_cycle_integral(&bb, ReducedCycle::B, ReducedSign::Minus).unwrap();
    assert!(relc(b_p, refc(0.0, 256.0062589)) < 5e-8);
    assert!(relc(b_m, refc(-235.5107228, 0.0)) < 5e-8);
}

#[test]
fn theta_parameters_have_valid_period_matrices() {
    let curves = [
        make_case_a_kink(1.0 / 32.0, 0.5).unwrap(),
        make_case_a_breather(1.0 / 32.0, 2.0 * std::f64::consts::PI / 5.0).unwrap(),
        make_case_b_kink(1.0, 0.4).unwrap(),
        make_case_b_breather(0.6, 1.9).unwrap(),
    ];
    for curve in &curves {
        let p = build_theta_params(curve, FIELD_SCALE).unwrap();
        // Symmetric with positive-definite imaginary part.
        assert!((p.b[0][1] - p.b[1][0]).norm() < 1e-14);
        let det = p.b[0][0].im * p.b[1][1].im - p.b[0][1].im * p.b[0][1].im;
        assert!(p.b[0][0].im > 0.0 && det > 0.0, "{:?}/{:?}", curve.kind, curve.case);
        // The one-dimensional ratios live in the upper half plane.
        assert!(p.tau_x.im > 0.0 && p.tau_t.im > 0.0);
    }
}

#[test]
fn field_scale_calibration_recovers_the_constant() {
    let curve = make_case_a_kink(1.0 / 32.0, 0.5).unwrap();
    let cal = calibrate_c(&curve, 96.0).unwrap();
    assert!(
        (cal.c_star - FIELD_SCALE).abs() < 0.01,
        "calibrated {}",
        cal.c_star
    );
    assert!(cal.residual < 1e-6);
}
