//! Scalar elliptic layer: complete integrals, Jacobi functions in every
//! parameter regime, theta series, and the cross-checks between the AGM and
//! theta-series evaluation routes.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sg2_core::elliptic::{
    comodulus_from_tau, complete_k, complete_k_complex, complete_k_from_tau, complete_k_prime,
    jacobi_complex, jacobi_ratio, jacobi_sn_cn_dn, landen_descend, modulus_from_tau,
    reciprocal_modulus_map, theta, theta_genus2, theta_genus2_char, EllipticError, JacobiRatio,
};

fn relf(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn relc(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

#[test]
fn complete_integral_reference_values() {
    assert!((complete_k(0.5).unwrap() - 1.854074677301372).abs() < 1e-14);
    assert!((complete_k(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    // Complement is evaluated at the complementary parameter.
    assert!(relf(complete_k_prime(0.36).unwrap(), complete_k(0.64).unwrap()) < 1e-15);
    assert!(matches!(
        complete_k(1.0),
        Err(EllipticError::SingularModulus(_))
    ));
}

#[test]
fn landen_step_halves_the_integral() {
    for &k in &[0.2_f64, 0.5, 0.8, 0.95] {
        let k1 = landen_descend(k).unwrap();
        let lhs = complete_k(k * k).unwrap();
        let rhs = (1.0 + k1) * complete_k(k1 * k1).unwrap();
        assert!(relf(lhs, rhs) < 1e-14, "k = {k}: {lhs} vs {rhs}");
    }
}

#[test]
fn tau_constants_are_consistent() {
    for &ti in &[0.4_f64, 0.9, 1.6] {
        let tau = Complex64::new(0.0, ti);
        let k = modulus_from_tau(tau).unwrap();
        let kp = comodulus_from_tau(tau).unwrap();
        // Moduli are real on the imaginary axis and satisfy k^2 + k'^2 = 1.
        assert!(k.im.abs() < 1e-14 && kp.im.abs() < 1e-14);
        assert!((k * k + kp * kp - 1.0).norm() < 1e-13);
        let m = (k * k).re;
        // The complete integral from theta constants matches the AGM route,
        // and the period ratio closes the loop.
        let big_k = complete_k_from_tau(tau).unwrap();
        assert!(relc(big_k, Complex64::new(complete_k(m).unwrap(), 0.0)) < 1e-13);
        assert!(relf(complete_k(1.0 - m).unwrap() / complete_k(m).unwrap(), ti) < 1e-12);
        // Doubling tau is one descending Landen step on the modulus.
        let k2 = modulus_from_tau(2.0 * tau).unwrap();
        assert!(relf(k2.re, landen_descend(k.re).unwrap()) < 1e-13);
    }
}

#[test]
fn jacobi_reference_and_degenerate_values() {
    // nd at an interior point, a frozen reference value.
    let nd = jacobi_ratio(JacobiRatio::Nd, 0.3, 0.25).unwrap();
    assert!((nd - 1.01101820760321).abs() < 1e-13);
    // Degenerate parameters reduce to trigonometric / hyperbolic functions.
    let (s0, c0, d0) = jacobi_sn_cn_dn(0.7, 0.0).unwrap();
    assert!((s0 - 0.7_f64.sin()).abs() < 1e-15);
    assert!((c0 - 0.7_f64.cos()).abs() < 1e-15);
    assert!((d0 - 1.0).abs() < 1e-15);
    let (s1, c1, d1) = jacobi_sn_cn_dn(0.7, 1.0).unwrap();
    assert!((s1 - 0.7_f64.tanh()).abs() < 1e-15);
    assert!((c1 - 1.0 / 0.7_f64.cosh()).abs() < 1e-15);
    assert!((d1 - c1).abs() < 1e-15);
}

#[test]
fn jacobi_identities_all_parameter_regimes() {
    // sn^2 + cn^2 = 1 and m sn^2 + dn^2 = 1 hold for parameters in (0,1),
    // above 1, and below 0.
    for &m in &[0.37_f64, 0.81, 2.5, 6.25, -1.5, -0.04] {
        for &u in &[-1.9_f64, -0.3, 0.45, 1.2] {
            let (s, c, d) = jacobi_sn_cn_dn(u, m).unwrap();
            assert!((s * s + c * c - 1.0).abs() < 1e-12, "m={m} u={u}");
            assert!((m * s * s + d * d - 1.0).abs() < 1e-12, "m={m} u={u}");
        }
    }
}

#[test]
fn jacobi_matches_theta_quotients() {
    // Independent evaluation route: Jacobi functions as quotients of theta
    // series. K = (pi/2) theta3^2, z = u / (2K), and
    // sn = (t3/t2) theta1(z)/theta4(z), cn = (t4/t2) theta2(z)/theta4(z),
    // dn = (t4/t3) theta3(z)/theta4(z).
    let zero = Complex64::new(0.0, 0.0);
    for &m in &[0.2_f64, 0.5, 0.93] {
        let tau = Complex64::new(0.0, complete_k(1.0 - m).unwrap() / complete_k(m).unwrap());
        let t2 = theta(2, zero, tau).unwrap();
        let t3 = theta(3, zero, tau).unwrap();
        let t4 = theta(4, zero, tau).unwrap();
        for &u in &[
            Complex64::new(0.35, 0.0),
            Complex64::new(-1.1, 0.0),
            Complex64::new(0.3, 0.2),
            Complex64::new(-0.4, -0.35),
        ] {
            let z = u / (2.0 * complete_k(m).unwrap());
            let q1 = theta(1, z, tau).unwrap();
            let q2 = theta(2, z, tau).unwrap();
            let q3 = theta(3, z, tau).unwrap();
            let q4 = theta(4, z, tau).unwrap();
            let (s, c, d) = jacobi_complex(u, m).unwrap();
            assert!(relc(s, (t3 / t2) * (q1 / q4)) < 1e-12, "sn m={m} u={u}");
            assert!(relc(c, (t4 / t2) * (q2 / q4)) < 1e-12, "cn m={m} u={u}");
            assert!(relc(d, (t4 / t3) * (q3 / q4)) < 1e-12, "dn m={m} u={u}");
        }
    }
}

#[test]
fn complex_argument_reduces_to_real_on_the_axis() {
    let (s, c, d) = jacobi_sn_cn_dn(0.8, 0.6).unwrap();
    let (sc_, cc, dc) = jacobi_complex(Complex64::new(0.8, 0.0), 0.6).unwrap();
    assert!((sc_ - s).norm() < 1e-15);
    assert!((cc - c).norm() < 1e-15);
    assert!((dc - d).norm() < 1e-15);
}

#[test]
fn quarter_and_mixed_period_shifts() {
    // Real quarter-period shift: cn(u + K) = -k' sd(u).
    // Mixed shift: dn(u + K + i K') = i k' sc(u),
    //             cn(u + K + i K') = -i (k'/k) nc(u).
    let k: f64 = 0.6;
    let m = k * k;
    let kp = (1.0 - m).sqrt();
    let big_k = complete_k(m).unwrap();
    let big_kp = complete_k(1.0 - m).unwrap();
    let i = Complex64::i();
    for &u in &[0.37_f64, -0.9, 1.4] {
        let (s, c, d) = jacobi_sn_cn_dn(u, m).unwrap();
        let (_, c_shift, _) = jacobi_complex(Complex64::new(u + big_k, 0.0), m).unwrap();
        assert!(relc(c_shift, Complex64::from(-kp * s / d)) < 1e-12);
        let arg = Complex64::new(u + big_k, big_kp);
        let (_, cn_m, dn_m) = jacobi_complex(arg, m).unwrap();
        assert!(relc(dn_m, i * kp * (s / c)) < 1e-11, "u={u}");
        assert!(relc(cn_m, -i * (kp / k) / c) < 1e-11, "u={u}");
    }
}

#[test]
fn reciprocal_parameter_conventions() {
    // The reciprocal-parameter reduction pins these conventions:
    // dn(k u | 1/k^2) = cn(u | k^2), cn(k u | 1/k^2) = dn(u | k^2),
    // k sc(u | k^2) = sd(k u | 1/k^2).
    let k: f64 = 0.6;
    let m = k * k;
    for &u in &[0.37_f64, -1.2, 2.0] {
        let (s, c, d) = jacobi_sn_cn_dn(u, m).unwrap();
        let (sr, cr, dr) = jacobi_sn_cn_dn(k * u, 1.0 / m).unwrap();
        assert!((dr - c).abs() < 1e-12);
        assert!((cr - d).abs() < 1e-12);
        assert!((k * s / c - sr / dr).abs() < 1e-11 * (s / c).abs().max(1.0));
    }
}

#[test]
fn reciprocal_complete_integral_continuations() {
    // K at the reciprocal parameter 1/k^2 continues to k (K -+ i K'); the
    // principal-branch complex AGM lands on the lower side.
    let k: f64 = 0.6;
    let rec = reciprocal_modulus_map(k).unwrap();
    let expect = Complex64::new(1.05045228175, -1.1971816666);
    assert!((rec.k_lower - expect).norm() < 5e-9);
    assert!((rec.k_upper - expect.conj()).norm() < 5e-9);
    let agm = complete_k_complex(Complex64::new(1.0 / (k * k), 0.0)).unwrap();
    assert!(relc(agm, rec.k_lower) < 1e-12);
    // Off the cut the complex AGM agrees with the real evaluation.
    let on_axis = complete_k_complex(Complex64::new(0.5, 0.0)).unwrap();
    assert!(relc(on_axis, Complex64::new(1.854074677301372, 0.0)) < 1e-14);
}

#[test]
fn theta_series_structure() {
    let zero = Complex64::new(0.0, 0.0);
    let tau = Complex64::new(0.13, 0.78);
    // Jacobi theta-constant identity t2^4 + t4^4 = t3^4.
    let t2 = theta(2, zero, tau).unwrap();
    let t3 = theta(3, zero, tau).unwrap();
    let t4 = theta(4, zero, tau).unwrap();
    assert!(relc(t2.powi(4) + t4.powi(4), t3.powi(4)) < 1e-12);
    // Lemniscatic value.
    let v = theta(3, zero, Complex64::new(0.0, 1.0)).unwrap();
    assert!((v - Complex64::new(1.086434811213308, 0.0)).norm() < 1e-14);
    // Quasi-periodicity under a full lattice shift:
    // theta3(z + tau) = exp(-i pi tau - 2 pi i z) theta3(z).
    let z = Complex64::new(0.21, -0.07);
    let lhs = theta(3, z + tau, tau).unwrap();
    let factor = (-Complex64::i() * std::f64::consts::PI * (tau + 2.0 * z)).exp();
    let rhs = factor * theta(3, z, tau).unwrap();
    assert!(relc(lhs, rhs) < 1e-12);
    // z-period 1: theta3(z + 1) = theta3(z), theta1(z + 1) = -theta1(z).
    let one = Complex64::new(1.0, 0.0);
    assert!(relc(theta(3, z + one, tau).unwrap(), theta(3, z, tau).unwrap()) < 1e-13);
    assert!(relc(theta(1, z + one, tau).unwrap(), -theta(1, z, tau).unwrap()) < 1e-13);
    // Lower half plane is rejected.
    assert!(matches!(
        theta(3, zero, Complex64::new(0.0, -1.0)),
        Err(EllipticError::ParamOutOfRange(_))
    ));
}

#[test]
fn genus2_series_factorizes_on_diagonal_matrices() {
    let tau1 = Complex64::new(0.0, 0.9);
    let tau2 = Complex64::new(0.1, 1.3);
    let b = [
        [tau1, Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), tau2],
    ];
    let z1 = Complex64::new(0.17, 0.03);
    let z2 = Complex64::new(-0.4, -0.02);
    let lhs = theta_genus2([z1, z2], &b).unwrap();
    let rhs = theta(3, z1, tau1).unwrap() * theta(3, z2, tau2).unwrap();
    assert!(relc(lhs, rhs) < 1e-12);
}

#[test]
fn genus2_characteristics_match_shifted_series() {
    // Theta with characteristics equals a shifted plain series times an
    // exponential prefactor:
    // Theta[a;b](l) = exp(i pi <B a, a> + 2 pi i <l + b, a>) Theta(l + B a + b).
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let b11 = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.6..1.4));
        let b22 = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.6..1.4));
        let b12 = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        let b = [[b11, b12], [b12, b22]];
        if b11.im * b22.im - b12.im * b12.im <= 0.05 {
            continue;
        }
        let l = [
            Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2)),
            Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2)),
        ];
        let alpha = [0.5, 0.0];
        let beta = [0.5, 0.5];
        let lhs = theta_genus2_char(alpha, beta, l, &b).unwrap();
        let ba = [
            b[0][0] * alpha[0] + b[0][1] * alpha[1],
            b[1][0] * alpha[0] + b[1][1] * alpha[1],
        ];
        let shifted = [l[0] + ba[0] + beta[0], l[1] + ba[1] + beta[1]];
        let quad = b[0][0] * alpha[0] * alpha[0]
            + 2.0 * b[0][1] * alpha[0] * alpha[1]
            + b[1][1] * alpha[1] * alpha[1];
        let lin = (l[0] + beta[0]) * 2.0 * alpha[0] + (l[1] + beta[1]) * 2.0 * alpha[1];
        let pref = (Complex64::i() * std::f64::consts::PI * (quad + lin)).exp();
        let rhs = pref * theta_genus2(shifted, &b).unwrap();
        assert!(relc(lhs, rhs) < 1e-11);
    }
}

#[test]
fn genus2_rejects_bad_period_matrices() {
    let z = [Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)];
    let asym = [
        [Complex64::new(0.0, 1.0), Complex64::new(0.3, 0.1)],
        [Complex64::new(0.1, 0.1), Complex64::new(0.0, 1.0)],
    ];
    assert!(matches!(
        theta_genus2(z, &asym),
        Err(EllipticError::ParamOutOfRange(_))
    ));
    let indefinite = [
        [Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)],
        [Complex64::new(0.0, 2.0), Complex64::new(0.0, 1.0)],
    ];
    assert!(matches!(
        theta_genus2(z, &indefinite),
        Err(EllipticError::ParamOutOfRange(_))
    ));
}

#[test]
fn random_pythagorean_sweep_complex_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let m = rng.gen_range(0.05..0.95);
        let u = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.9..0.9));
        let Ok((s, c, d)) = jacobi_complex(u, m) else {
            continue; // landed too close to a lattice pole
        };
        assert!((s * s + c * c - 1.0).norm() < 1e-10 * (s.norm() + c.norm()).max(1.0).powi(2));
        assert!((m * s * s + d * d - 1.0).norm() < 1e-10 * (s.norm() + d.norm()).max(1.0).powi(2));
    }
}
