//! Spectral-curve layer: constructors for the four families, the energy
//! involution closure, the kink relabelling bijection, and serialization.

use num_complex::Complex64;
use sg2_core::spectral::{
    involution, make_case_a_breather, make_case_a_kink, make_case_b_breather, make_case_b_kink,
    CaseLabel, CurveParams, SolutionKind, SpectralError, SPECTRAL_SCALE,
};

#[test]
fn involution_is_an_involution() {
    let e = Complex64::new(0.3, -0.4);
    assert!((involution(involution(e)) - e).norm() < 1e-15);
    // Fixed points are on the circle |E| = 1/16.
    let fixed = Complex64::new(SPECTRAL_SCALE.sqrt(), 0.0);
    assert!((involution(fixed) - fixed).norm() < 1e-15);
}

#[test]
fn standard_kink_points_and_closure() {
    let r = 1.0 / 32.0;
    let eta = 0.5;
    let curve = make_case_a_kink(r, eta).unwrap();
    assert_eq!(curve.case, CaseLabel::A);
    assert_eq!(curve.kind, SolutionKind::Kink);
    let inv = 1.0 / (256.0 * r);
    let expect = [
        -r * (-eta).exp(),
        -r * eta.exp(),
        -inv * (-eta).exp(),
        -inv * eta.exp(),
    ];
    for (p, e) in curve.points.iter().zip(expect.iter()) {
        assert!((p.re - e).abs() < 1e-15 && p.im == 0.0);
    }
    // Closure under the involution: E1 <-> E4, E2 <-> E3.
    assert!((involution(curve.points[0]) - curve.points[3]).norm() < 1e-15);
    assert!((involution(curve.points[1]) - curve.points[2]).norm() < 1e-15);
    assert!(curve.involution_defect() < 1e-14);
    // Quotient coordinates sit left of the fixed point -1/16.
    let (z1, z2) = curve.z_pair();
    assert!(z1.re < z2.re && z2.re < -1.0 / 16.0);
    assert!(z1.im == 0.0 && z2.im == 0.0);
}

#[test]
fn off_circle_breather_points_and_closure() {
    let r = 1.0 / 32.0;
    let phi = 2.0 * std::f64::consts::PI / 5.0;
    let curve = make_case_a_breather(r, phi).unwrap();
    assert_eq!(curve.kind, SolutionKind::Breather);
    // Conjugate pairs (E2 = conj E1, E4 = conj E3) and involution closure.
    assert!((curve.points[1] - curve.points[0].conj()).norm() < 1e-15);
    assert!((curve.points[3] - curve.points[2].conj()).norm() < 1e-15);
    assert!(curve.involution_defect() < 1e-14);
    assert!((curve.points[0].norm() - r).abs() < 1e-15);
    assert!((curve.points[2].norm() - 1.0 / (256.0 * r)).abs() < 1e-12);
    // The first quotient coordinate carries the negative imaginary part.
    let (z1, _z2) = curve.z_pair();
    assert!(z1.im < 0.0);
    // Reference quotient values for the canonical curve.
    assert!((z1.re - 0.02414195269).abs() < 1e-10);
    assert!((z1.im - (-0.0445807742)).abs() < 1e-10);
}

#[test]
fn nested_kink_ordering_and_quotient() {
    let curve = make_case_b_kink(1.0, 0.4).unwrap();
    assert_eq!(curve.case, CaseLabel::B);
    let pts: Vec<f64> = curve.points.iter().map(|p| p.re).collect();
    // Ordered E4 < E3 < E2 < E1 < 0 with the nested pairing (E1,E4), (E2,E3).
    assert!(pts[3] < pts[2] && pts[2] < pts[1] && pts[1] < pts[0] && pts[0] < 0.0);
    assert!((involution(curve.points[0]) - curve.points[3]).norm() < 1e-15);
    assert!((involution(curve.points[1]) - curve.points[2]).norm() < 1e-15);
    let (z1, z2) = curve.z_pair();
    assert!(z1.re < z2.re && z2.re < -1.0 / 16.0);
}

#[test]
fn on_circle_breather_ordering_and_quotient() {
    let curve = make_case_b_breather(0.6, 1.9).unwrap();
    for p in &curve.points {
        assert!((p.norm() - 1.0 / 16.0).abs() < 1e-15);
    }
    assert!(curve.involution_defect() < 1e-14);
    let (z1, z2) = curve.z_pair();
    // z_j = cos(phi_j) / 16 with z1 > z2, both strictly inside (-1/16, 1/16).
    assert!((z1.re - 0.6_f64.cos() / 16.0).abs() < 1e-15);
    assert!((z2.re - 1.9_f64.cos() / 16.0).abs() < 1e-15);
    assert!(z2.re < z1.re && z1.re < 1.0 / 16.0 && z2.re > -1.0 / 16.0);
}

#[test]
fn kink_relabelling_is_pointwise() {
    let a = make_case_a_kink((-0.7_f64).exp() / 16.0, 0.3).unwrap();
    let b = make_case_b_kink(1.0, 0.4).unwrap();
    // Same four branch points under both labellings.
    for (pa, pb) in a.points.iter().zip(b.points.iter()) {
        assert!((pa - pb).norm() < 1e-14 * pb.norm());
    }
    // And the bijection recovers each parameter set from the other.
    let b_from_a = a.paired_case_b().unwrap();
    match b_from_a.params {
        CurveParams::KinkB { eta1, eta2 } => {
            assert!((eta1 - 1.0).abs() < 1e-12 && (eta2 - 0.4).abs() < 1e-12);
        }
        _ => panic!("expected nested kink parameters"),
    }
    let a_from_b = b.paired_case_a().unwrap();
    match a_from_b.params {
        CurveParams::KinkA { r, eta } => {
            assert!((r - (-0.7_f64).exp() / 16.0).abs() < 1e-14);
            assert!((eta - 0.3).abs() < 1e-12);
        }
        _ => panic!("expected standard kink parameters"),
    }
    // Breathers do not relabel into kinks.
    let bb = make_case_a_breather(1.0 / 32.0, 1.0).unwrap();
    assert!(matches!(
        bb.paired_case_b(),
        Err(SpectralError::CaseMismatch(_))
    ));
}

#[test]
fn constructor_guards() {
    assert!(matches!(
        make_case_a_kink(-0.1, 0.5),
        Err(SpectralError::ParamOutOfRange(_))
    ));
    assert!(matches!(
        make_case_a_kink(1.0 / 32.0, 0.0),
        Err(SpectralError::DegenerateSpectrum(_))
    ));
    // Cuts overlap when r e^eta reaches 1/16.
    assert!(matches!(
        make_case_a_kink(1.0 / 20.0, 0.5),
        Err(SpectralError::CutsOverlap { .. })
    ));
    // Off-circle breather must stay off the involution circle.
    assert!(make_case_a_breather(1.0 / 16.0, 1.0).is_err());
    // Nested kink needs eta1 > eta2 > 0.
    assert!(make_case_b_kink(0.4, 1.0).is_err());
    assert!(make_case_b_kink(1.0, 1.0).is_err());
    // On-circle breather needs 0 < phi1 < phi2 < pi.
    assert!(make_case_b_breather(1.9, 0.6).is_err());
    assert!(make_case_b_breather(0.0, 1.0).is_err());
    assert!(make_case_b_breather(0.5, std::f64::consts::PI).is_err());
}

#[test]
fn json_round_trip_all_families() {
    let curves = [
        make_case_a_kink(1.0 / 32.0, 0.5).unwrap(),
        make_case_a_breather(1.0 / 32.0, 2.0 * std::f64::consts::PI / 5.0).unwrap(),
        make_case_b_kink(1.0, 0.4).unwrap(),
        make_case_b_breather(0.6, 1.9).unwrap(),
    ];
    for curve in &curves {
        let text = curve.to_json();
        let back = sg2_core::spectral::SpectralCurve::from_json(&text).unwrap();
        assert_eq!(curve.case, back.case);
        assert_eq!(curve.kind, back.kind);
        for (p, q) in curve.points.iter().zip(back.points.iter()) {
            assert!((p - q).norm() < 1e-15);
        }
    }
    assert!(sg2_core::spectral::SpectralCurve::from_json("{\"family\":").is_err());
}
