//! Shared fixtures for the benchmark suite. The interesting code lives in
//! `benches/main.rs`; this library only builds the inputs so the benches and
//! a smoke test agree on them.

use num_complex::Complex64;
use sg2_core::periods::{build_theta_params, ThetaParams, FIELD_SCALE};
use sg2_core::solutions::{derive_model, SolutionModel};
use sg2_core::spectral::{make_case_a_kink, SpectralCurve};

/// The standard-kink reference spectrum used across the benchmarks.
pub fn bench_curve() -> SpectralCurve {
    make_case_a_kink(1.0 / 32.0, 0.5).expect("reference curve")
}

/// Theta-function parameters of the reference spectrum.
pub fn bench_theta_params() -> ThetaParams {
    build_theta_params(&bench_curve(), FIELD_SCALE).expect("theta parameters")
}

/// Fully derived model of the reference spectrum.
pub fn bench_model() -> SolutionModel {
    derive_model(&bench_curve(), FIELD_SCALE).expect("model")
}

/// A well-conditioned argument for genus-2 theta evaluation.
pub fn bench_theta_argument() -> [Complex64; 2] {
    [
        Complex64::new(0.21, 0.05),
        Complex64::new(-0.13, 0.02),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use sg2_core::elliptic::theta_genus2;

    #[test]
    fn fixtures_build() {
        let params = bench_theta_params();
        let l = bench_theta_argument();
        let value = theta_genus2(l, &params.b).unwrap();
        assert!(value.norm() > 0.0 && value.norm().is_finite());
        let m = bench_model();
        assert!(m.alpha > 0.0 && m.beta > 0.0);
    }
}
