//! Numerical toolkit for the two families of separable two-phase solutions
//! of the sine-Gordon field equation.
//!
//! The crate builds the four-point spectra of both solution families from
//! their parametrizations, computes the period and modular data of the
//! underlying genus-2 curves, assembles the theta-function and elliptic
//! closed forms of the fields, links the two families by integer symplectic
//! transformations of the period matrix, and verifies the spectral symmetry
//! of the associated linear problem.
//!
//! Module layout:
//! * [`elliptic`] — complete integrals, Jacobi functions (real and complex
//!   argument, all parameter ranges), one- and two-dimensional theta series;
//! * [`quad`] — adaptive Gauss–Kronrod quadrature on segments;
//! * [`spectral`] — spectra, validation, the energy involution, and the
//!   relabelling bijection between the two kink parametrizations;
//! * [`periods`] — cycle integrals, reduced periods, period matrices, phase
//!   matrices, and the field-scale calibration;
//! * [`symplectic`] — integer symplectic transforms acting on period
//!   matrices and the characteristic-shift identity;
//! * [`solutions`] — field evaluation (closed elliptic and theta-ratio
//!   forms), static profiles and chains, equation residuals;
//! * [`floquet`] — transfer matrices and the discriminant symmetry of the
//!   associated spectral problem.

pub mod elliptic;
pub mod floquet;
pub mod periods;
pub mod quad;
pub mod solutions;
pub mod spectral;
pub mod symplectic;

pub use elliptic::{EllipticError, PeriodMatrix};
pub use periods::{Calibration, PeriodsError, ThetaParams, WData, FIELD_SCALE};
pub use spectral::{
    CaseLabel, CurveParams, SolutionKind, SpectralCurve, SpectralError, SPECTRAL_SCALE,
};
