//! Period data of a spectral curve: cycle integrals of the two holomorphic
//! differentials, the reduced one-dimensional periods `w±` with their
//! half-period ratios `tau±`, the normalized phase matrix and period matrix
//! entering the theta representation, and the field-scale calibration.
//!
//! Two independent routes are provided and cross-checked in the tests:
//! * direct quadrature of `dE/R` and `E dE/R` over the homology cycles
//!   (kinks; real branch points), and of the reduced cubic differential over
//!   segments of the quotient plane (all families);
//! * closed forms via complete elliptic integrals on the quotient curve.

use crate::elliptic::{self, EllipticError, PeriodMatrix};
use crate::quad;
use crate::spectral::{CaseLabel, SolutionKind, SpectralCurve, SpectralError};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Errors from period computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodsError {
    /// The adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge (error estimate {0:.3e})")]
    QuadratureNoConvergence(f64),
    /// Continuity tracking of the square-root branch along a path failed.
    #[error("branch tracking failed along integration path: {0}")]
    BranchTrackingFailure(String),
    /// Calibration search did not reach the required residual.
    #[error("calibration failed: best scale {best_c:.6} leaves residual {residual:.3e}")]
    CalibrationFailed { best_c: f64, residual: f64 },
    /// The requested integral is not defined for this curve family.
    #[error("unsupported curve family for this operation: {0}")]
    UnsupportedFamily(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

type Result<T> = std::result::Result<T, PeriodsError>;

/// Homology cycle names of the genus-2 curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    A1,
    A2,
    B1,
    B2,
}

/// Differentials on the curve: the two holomorphic generators and the two
/// flow combinations `X = dI + 16 dJ`, `T = dI - 16 dJ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differential {
    /// `dE / R(E)`
    DI,
    /// `E dE / R(E)`
    DJ,
    /// space-flow combination `(1 + 16 E) dE / R(E)`
    X,
    /// time-flow combination `(1 - 16 E) dE / R(E)`
    T,
}

/// Which integer homology basis to expand cycles in.
///
/// The same four branch points support the plain labelling (`Standard`,
/// case A), the nested labelling (`Nested`, case B) and the doubled basis
/// (`Rebased`) in which the nested relations take the standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopBasis {
    Standard,
    Nested,
    Rebased,
}

impl LoopBasis {
    /// Expansion of `basis` cycles in the standard basis:
    /// rows are (a1, a2, b1, b2) coefficients.
    fn combo(self, cycle: Cycle) -> [i32; 4] {
        match self {
            LoopBasis::Standard => match cycle {
                Cycle::A1 => [1, 0, 0, 0],
                Cycle::A2 => [0, 1, 0, 0],
                Cycle::B1 => [0, 0, 1, 0],
                Cycle::B2 => [0, 0, 0, 1],
            },
            LoopBasis::Nested => match cycle {
                Cycle::A1 => [2, 0, 0, 0],
                Cycle::A2 => [-1, 1, 0, 0],
                Cycle::B1 => [0, 0, 1, 1],
                Cycle::B2 => [0, 0, 0, 2],
            },
            LoopBasis::Rebased => match cycle {
                Cycle::A1 => [2, 0, 0, 0],
                Cycle::A2 => [0, 2, 0, 0],
                Cycle::B1 => [0, 0, 2, 0],
                Cycle::B2 => [0, 0, 0, 2],
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Direct quadrature on the energy plane (real branch points)
// ---------------------------------------------------------------------------

/// `i^(-nu)` as a complex unit: the phase of `1/R(E + i0)` above the real
/// axis when `nu` simple roots lie to the right of `E`.
fn branch_phase(nu: u32) -> Complex64 {
    match nu % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn quad_err(e: quad::QuadFailure) -> PeriodsError {
    PeriodsError::QuadratureNoConvergence(e.error)
}

/// Integral of `g(E) dE / R(E+i0)` over the finite segment `(p, q)` between
/// two adjacent real roots, with `others` the remaining three roots of the
/// quintic (zero energy included) and `nu` the count of roots above the
/// segment. The endpoint inverse square roots are absorbed by a sine
/// substitution.
fn segment_real(
    form: Differential,
    p: f64,
    q: f64,
    others: [f64; 3],
    nu: u32,
    tol: f64,
) -> Result<Complex64> {
    let c = 0.5 * (p + q);
    let h = 0.5 * (q - p);
    let g = move |theta: f64| -> Complex64 {
        let e = c + h * theta.sin();
        let mut rest = 1.0_f64;
        for r in others {
            rest *= (e - r).abs();
        }
        let num = match form {
            Differential::DI => 1.0,
            Differential::DJ => e,
            Differential::X => 1.0 + 16.0 * e,
            Differential::T => 1.0 - 16.0 * e,
        };
        Complex64::new(num / rest.sqrt(), 0.0)
    };
    let (val, _) = quad::integrate(g, -FRAC_PI_2, FRAC_PI_2, tol).map_err(quad_err)?;
    Ok(branch_phase(nu) * val)
}

/// Integral of `g(E) dE / R(E+i0)` over `(-inf, e_min)` below the lowest real
/// root, via `E = -1/s` and `s = s4 sin^2(psi)`; all five roots lie above the
/// segment.
fn segment_unbounded(form: Differential, points: [f64; 4], tol: f64) -> Result<Complex64> {
    let e_min = points[3].min(points[2]).min(points[1]).min(points[0]);
    let s4 = -1.0 / e_min;
    let others: Vec<f64> = points.iter().cloned().filter(|&p| p != e_min).collect();
    let g = move |psi: f64| -> Complex64 {
        let sin = psi.sin();
        let s = s4 * sin * sin;
        let mut prod = 1.0_f64;
        for &r in &others {
            prod *= 1.0 + s * r;
        }
        let root = prod.sqrt();
        // dI contributes s^{1/2}, dJ contributes -s^{-1/2}; the substitution
        // turns both into smooth integrands.
        let di = 2.0 * s4 * s4.sqrt() * sin * sin / root;
        let dj = -2.0 * s4.sqrt() / root;
        let val = match form {
            Differential::DI => di,
            Differential::DJ => dj,
            Differential::X => di + 16.0 * dj,
            Differential::T => di - 16.0 * dj,
        };
        Complex64::new(val, 0.0)
    };
    let (val, _) = quad::integrate(g, 0.0, FRAC_PI_2, tol).map_err(quad_err)?;
    Ok(branch_phase(5) * val)
}

/// Raw standard-basis cycle integrals of one differential for a kink curve:
/// returns `[a1, a2, b1, b2]` values.
fn standard_cycles_real(
    curve: &SpectralCurve,
    form: Differential,
    tol: f64,
) -> Result<[Complex64; 4]> {
    if curve.kind != SolutionKind::Kink {
        return Err(PeriodsError::UnsupportedFamily(
            "energy-plane cycle quadrature needs real branch points; \
             breather periods are provided by the reduced quotient-plane route"
                .into(),
        ));
    }
    let e: [f64; 4] = [
        curve.points[0].re,
        curve.points[1].re,
        curve.points[2].re,
        curve.points[3].re,
    ];
    // Ordering contract: e4 < e3 < e2 < e1 < 0.
    let (e1, e2, e3, e4) = (e[0], e[1], e[2], e[3]);
    // a1 loop encircles (e2, e1): one finite root and zero above -> nu = 2.
    let s_a1 = segment_real(form, e2, e1, [0.0, e3, e4], 2, tol)?;
    // a2 loop encircles (e4, e3): nu = 4.
    let s_a2 = segment_real(form, e4, e3, [0.0, e1, e2], 4, tol)?;
    // b1 runs from e1 to the zero-energy branch point: nu = 1.
    let s_b1 = segment_real(form, e1, 0.0, [e2, e3, e4], 1, tol)?;
    // b2 runs from the point at infinity to e4: nu = 5.
    let s_b2 = segment_unbounded(form, [e1, e2, e3, e4], tol)?;
    Ok([-2.0 * s_a1, -2.0 * s_a2, -2.0 * s_b1, 2.0 * s_b2])
}

/// Cycle integral of one differential over one homology cycle, in the loop
/// basis natural to the curve's own case label.
pub fn cycle_integral(curve: &SpectralCurve, cycle: Cycle, form: Differential) -> Result<Complex64> {
    let basis = match curve.case {
        CaseLabel::A => LoopBasis::Standard,
        CaseLabel::B => LoopBasis::Nested,
    };
    cycle_integral_in_basis(curve, basis, cycle, form)
}

/// Cycle integral in an explicitly chosen loop basis.
pub fn cycle_integral_in_basis(
    curve: &SpectralCurve,
    basis: LoopBasis,
    cycle: Cycle,
    form: Differential,
) -> Result<Complex64> {
    let std = standard_cycles_real(curve, form, 1e-12)?;
    let combo = basis.combo(cycle);
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, v) in combo.iter().zip(std.iter()) {
        acc += (*c as f64) * v;
    }
    Ok(acc)
}

/// All raw periods of a kink curve in one basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPeriods {
    pub i_a: [Complex64; 2],
    pub j_a: [Complex64; 2],
    pub i_b: [Complex64; 2],
    pub j_b: [Complex64; 2],
}

/// Compute raw cycle data by quadrature in a chosen loop basis (kinks).
pub fn raw_periods(curve: &SpectralCurve, basis: LoopBasis) -> Result<RawPeriods> {
    let di = standard_cycles_real(curve, Differential::DI, 1e-12)?;
    let dj = standard_cycles_real(curve, Differential::DJ, 1e-12)?;
    let pick = |std: &[Complex64; 4], cycle: Cycle| -> Complex64 {
        let combo = basis.combo(cycle);
        combo
            .iter()
            .zip(std.iter())
            .map(|(c, v)| (*c as f64) * v)
            .sum()
    };
    Ok(RawPeriods {
        i_a: [pick(&di, Cycle::A1), pick(&di, Cycle::A2)],
        j_a: [pick(&dj, Cycle::A1), pick(&dj, Cycle::A2)],
        i_b: [pick(&di, Cycle::B1), pick(&di, Cycle::B2)],
        j_b: [pick(&dj, Cycle::B1), pick(&dj, Cycle::B2)],
    })
}

impl RawPeriods {
    /// Determinant `w = I(a1) J(a2) - J(a1) I(a2)` normalizing the phase matrix.
    pub fn w_det(&self) -> Complex64 {
        self.i_a[0] * self.j_a[1] - self.j_a[0] * self.i_a[1]
    }

    /// Phase matrix built by explicit inversion of the flow-period matrix
    /// `[[-X(a1), T(a1)], [-X(a2), T(a2)]]` (times `iC`, transposed inverse).
    pub fn l_matrix_by_inversion(&self, c: f64) -> [[Complex64; 2]; 2] {
        let x1 = self.i_a[0] + 16.0 * self.j_a[0];
        let x2 = self.i_a[1] + 16.0 * self.j_a[1];
        let t1 = self.i_a[0] - 16.0 * self.j_a[0];
        let t2 = self.i_a[1] - 16.0 * self.j_a[1];
        // M = [[-x1, t1], [-x2, t2]]; result = iC * (M^{-1})^T
        let det = -x1 * t2 + t1 * x2;
        let ic = Complex64::new(0.0, c);
        [
            [ic * t2 / det, ic * x2 / det],
            [ic * (-t1) / det, ic * (-x1) / det],
        ]
    }

    /// Phase matrix via the closed reduction
    /// `(iC/32w) [[I(a2)-16J(a2), I(a2)+16J(a2)], [-I(a1)+16J(a1), -I(a1)-16J(a1)]]`.
    pub fn l_matrix_reduced(&self, c: f64) -> [[Complex64; 2]; 2] {
        let w = self.w_det();
        let f = Complex64::new(0.0, c) / (32.0 * w);
        [
            [
                f * (self.i_a[1] - 16.0 * self.j_a[1]),
                f * (self.i_a[1] + 16.0 * self.j_a[1]),
            ],
            [
                f * (-self.i_a[0] + 16.0 * self.j_a[0]),
                f * (-self.i_a[0] - 16.0 * self.j_a[0]),
            ],
        ]
    }

    /// Period matrix from the raw cycles:
    /// `B = (1/w) [[I(b1)J(a2)-I(a2)J(b1), I(a1)J(b1)-I(b1)J(a1)],
    ///             [I(b2)J(a2)-I(a2)J(b2), I(a1)J(b2)-I(b2)J(a1)]]`.
    pub fn b_matrix(&self) -> PeriodMatrix {
        let w = self.w_det();
        [
            [
                (self.i_b[0] * self.j_a[1] - self.i_a[1] * self.j_b[0]) / w,
                (self.i_a[0] * self.j_b[0] - self.i_b[0] * self.j_a[0]) / w,
            ],
            [
                (self.i_b[1] * self.j_a[1] - self.i_a[1] * self.j_b[1]) / w,
                (self.i_a[0] * self.j_b[1] - self.i_b[1] * self.j_a[0]) / w,
            ],
        ]
    }
}

// ---------------------------------------------------------------------------
// Reduced quotient-plane quadrature (all families)
// ---------------------------------------------------------------------------

/// Segment integral `int dz / sqrt(2 (z - r3)(z - p)(z - q))` from `p` to `q`
/// in the quotient plane. Endpoint singularities are absorbed by a sine
/// substitution that fixes the square root of the endpoint pair to
/// `h cos(theta)`; the remaining factor `sqrt(-2 (z - r3))` is continued
/// analytically along the path by locating its principal-cut crossing exactly
/// and flipping the branch there.
fn reduced_segment(p: Complex64, q: Complex64, r3: Complex64, tol: f64) -> Result<Complex64> {
    let c = 0.5 * (p + q);
    let h = 0.5 * (q - p);
    let scale = h.norm().max((c - r3).norm());
    if (p - r3).norm() < 1e-12 * scale || (q - r3).norm() < 1e-12 * scale {
        return Err(PeriodsError::BranchTrackingFailure(
            "integration path touches the third root".into(),
        ));
    }
    // The path is z(theta) = c + h sin(theta). The argument of the square
    // root, -2 (z - r3), crosses the principal cut where its imaginary part
    // vanishes with negative real part: Im(c - r3) + Im(h) sin(theta) = 0.
    let mut cuts: Vec<f64> = Vec::new();
    if h.im.abs() > 0.0 {
        let s = -(c - r3).im / h.im;
        if s > -1.0 && s < 1.0 {
            let theta = s.asin();
            let w = -2.0 * (c + h * theta.sin() - r3);
            if w.re < 0.0 {
                cuts.push(theta);
            }
        }
    }
    let mut pts = vec![-FRAC_PI_2];
    pts.extend(cuts);
    pts.push(FRAC_PI_2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut sign = 1.0_f64;
    for win in pts.windows(2) {
        let (a, b) = (win[0], win[1]);
        let s = sign;
        let f = move |theta: f64| -> Complex64 {
            let v = -2.0 * (c + h * theta.sin() - r3);
            // Legs that run exactly along the branch cut pick up a signed
            // zero from the arithmetic; normalize to the upper side so the
            // continuation is the limit from positive imaginary part.
            let w = Complex64::new(v.re, v.im + 0.0).sqrt();
            s / w
        };
        let (val, _) = quad::integrate(f, a, b, tol).map_err(quad_err)?;
        total += val;
        sign = -sign;
    }
    Ok(total)
}

/// Reduced cycle of the quotient curve: around the finite cut (`A`) or from
/// the cut to the fixed point of the involution (`B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedCycle {
    A,
    B,
}

/// Sign selecting which fixed point `±1/16` the reduced differential carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedSign {
    Plus,
    Minus,
}

/// Reduced period integral `-16 \oint dz / sqrt(2 (z ∓ 1/16)(z-z1)(z-z2))`
/// over a reduced cycle, by quadrature. The loop doubles the segment value;
/// orientations are fixed so that kink `A`-cycles give positive `w±` and all
/// half-period ratios land in the upper half plane.
pub fn reduced_cycle_integral(
    curve: &SpectralCurve,
    cycle: ReducedCycle,
    sign: ReducedSign,
) -> Result<Complex64> {
    let (z1, z2) = curve.z_pair();
    let e = match sign {
        ReducedSign::Plus => Complex64::new(1.0 / 16.0, 0.0),
        ReducedSign::Minus => Complex64::new(-1.0 / 16.0, 0.0),
    };
    let tol = 1e-12;
    let (val, orient) = match (curve.kind, curve.case) {
        (SolutionKind::Kink, _) => match cycle {
            ReducedCycle::A => (reduced_segment(z1, z2, e, tol)?, 32.0),
            ReducedCycle::B => (reduced_segment(z2, e, z1, tol)?, -32.0),
        },
        (SolutionKind::Breather, CaseLabel::A) => match cycle {
            ReducedCycle::A => (reduced_segment(z1, z2, e, tol)?, 32.0),
            ReducedCycle::B => (reduced_segment(z2, e, z1, tol)?, -32.0),
        },
        (SolutionKind::Breather, CaseLabel::B) => match cycle {
            // z2 < z1 here; the cut runs between them.
            ReducedCycle::A => (reduced_segment(z2, z1, e, tol)?, 32.0),
            ReducedCycle::B => match sign {
                ReducedSign::Plus => (reduced_segment(z1, e, z2, tol)?, -32.0),
                ReducedSign::Minus => (reduced_segment(e, z2, z1, tol)?, -32.0),
            },
        },
    };
    Ok(orient * val)
}

/// Relative defects between the quadrature route and the closed-form reduced
/// periods, as `[w_plus, tau_plus, w_minus, tau_minus]` checks.
///
/// The quadrature values are concrete loop integrals; for breathers they give
/// primitive lattice vectors that differ from the stored `(w, tau)` pair by
/// fixed half-lattice combinations, which this check accounts for:
/// * kinks: `A± = w±`, `B±/A± = tau±`;
/// * off-circle breather: `A+ = w+`, `B+ = -w+(1/2 + tau+)`,
///   `A- = -2 w- tau-`, `B- = -w-(1/2 + tau-)`;
/// * on-circle breather: `A+ = w+`, `B+ = w+(tau+ - 1)`,
///   `A- = w-`, `B- = -w- tau-`.
pub fn reduced_check(curve: &SpectralCurve) -> Result<[f64; 4]> {
    let w = compute_w(curve)?;
    let a_p = reduced_cycle_integral(curve, ReducedCycle::A, ReducedSign::Plus)?;
    let b_p = reduced_cycle_integral(curve, ReducedCycle::B, ReducedSign::Plus)?;
    let a_m = reduced_cycle_integral(curve, ReducedCycle::A, ReducedSign::Minus)?;
    let b_m = reduced_cycle_integral(curve, ReducedCycle::B, ReducedSign::Minus)?;
    let half = Complex64::new(0.5, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (ep, et_p, em, et_m) = match (curve.kind, curve.case) {
        (SolutionKind::Kink, _) => (
            rel(a_p, w.w_plus),
            rel(b_p / a_p, w.tau_plus),
            rel(a_m, w.w_minus),
            rel(b_m / a_m, w.tau_minus),
        ),
        (SolutionKind::Breather, CaseLabel::A) => (
            rel(a_p, w.w_plus),
            rel(b_p, -w.w_plus * (half + w.tau_plus)),
            rel(a_m, -2.0 * w.w_minus * w.tau_minus),
            rel(b_m, -w.w_minus * (half + w.tau_minus)),
        ),
        (SolutionKind::Breather, CaseLabel::B) => (
            rel(a_p, w.w_plus),
            rel(b_p, w.w_plus * (w.tau_plus - one)),
            rel(a_m, w.w_minus),
            rel(b_m, -w.w_minus * w.tau_minus),
        ),
    };
    Ok([ep, et_p, em, et_m])
}

// ---------------------------------------------------------------------------
// Closed-form reduced periods
// ---------------------------------------------------------------------------

/// Reduced period data of a curve: the one-dimensional periods `w±`, their
/// half-period ratios `tau±`, and the reduced elliptic parameters.
///
/// Conventions: for kinks `w±` are real positive and `tau± = i K'/K`.
/// For the off-circle breather the quotient lattice is rhombic and
/// `tau± = (i/2) K'/K`; the half-integer real part that the primitive
/// b-period carries is added where the period matrix is assembled.
/// For the on-circle breather, `tau+` carries real part 1 and `w-` is
/// negative imaginary (the analytic continuation of the kink data along the
/// spectrum's rotation onto the circle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WData {
    pub w_plus: Complex64,
    pub w_minus: Complex64,
    pub tau_plus: Complex64,
    pub tau_minus: Complex64,
    /// Reduced elliptic parameter attached to the `+` fixed point.
    pub m_plus: f64,
    /// Reduced elliptic parameter attached to the `-` fixed point.
    pub m_minus: f64,
}

/// Closed-form reduced periods via complete elliptic integrals.
pub fn compute_w(curve: &SpectralCurve) -> Result<WData> {
    let (z1c, z2c) = curve.z_pair();
    match curve.kind {
        SolutionKind::Kink => {
            let (z1, z2) = (z1c.re, z2c.re);
            // z1 < z2 < -1/16 for every kink labelling.
            let dp = 1.0 / 16.0 - z1;
            let dm = -1.0 / 16.0 - z1;
            let m_plus = (z2 - z1) / dp;
            let m_minus = (z2 - z1) / dm;
            let kp = elliptic::complete_k(m_plus)?;
            let km = elliptic::complete_k(m_minus)?;
            let kpp = elliptic::complete_k(1.0 - m_plus)?;
            let kmp = elliptic::complete_k(1.0 - m_minus)?;
            let f = 32.0 * (2.0_f64).sqrt();
            Ok(WData {
                w_plus: Complex64::new(f * kp / dp.sqrt(), 0.0),
                w_minus: Complex64::new(f * km / dm.sqrt(), 0.0),
                tau_plus: Complex64::new(0.0, kpp / kp),
                tau_minus: Complex64::new(0.0, kmp / km),
                m_plus,
                m_minus,
            })
        }
        SolutionKind::Breather => match curve.case {
            CaseLabel::A => {
                let x1 = z1c.re;
                let y1 = z1c.im.abs();
                let ap = ((1.0 / 16.0 - x1).powi(2) + y1 * y1).sqrt();
                let am = ((1.0 / 16.0 + x1).powi(2) + y1 * y1).sqrt();
                let m_plus = (ap - (1.0 / 16.0 - x1)) / (2.0 * ap);
                let m_minus = (am - (-1.0 / 16.0 - x1)) / (2.0 * am);
                let kp = elliptic::complete_k(m_plus)?;
                let km = elliptic::complete_k(m_minus)?;
                let kpp = elliptic::complete_k(1.0 - m_plus)?;
                let kmp = elliptic::complete_k(1.0 - m_minus)?;
                Ok(WData {
                    w_plus: Complex64::new(64.0 * kp / (2.0 * ap).sqrt(), 0.0),
                    w_minus: Complex64::new(64.0 * km / (2.0 * am).sqrt(), 0.0),
                    tau_plus: Complex64::new(0.0, 0.5 * kpp / kp),
                    tau_minus: Complex64::new(0.0, 0.5 * kmp / km),
                    m_plus,
                    m_minus,
                })
            }
            CaseLabel::B => {
                // Both quotient branch points sit inside (-1/16, 1/16); z1 > z2.
                let (z1, z2) = (z1c.re, z2c.re);
                let dp = 1.0 / 16.0 - z2;
                let dm = z1 + 1.0 / 16.0;
                let m_plus = (z1 - z2) / dp;
                let m_minus = (z1 - z2) / dm;
                let kp = elliptic::complete_k(m_plus)?;
                let km = elliptic::complete_k(m_minus)?;
                let kpp = elliptic::complete_k(1.0 - m_plus)?;
                let kmp = elliptic::complete_k(1.0 - m_minus)?;
                let f = 32.0 * (2.0_f64).sqrt();
                Ok(WData {
                    w_plus: Complex64::new(f * kp / dp.sqrt(), 0.0),
                    w_minus: Complex64::new(0.0, -f * km / dm.sqrt()),
                    tau_plus: Complex64::new(1.0, kpp / kp),
                    tau_minus: Complex64::new(0.0, kmp / km),
                    m_plus,
                    m_minus,
                })
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Theta parameters
// ---------------------------------------------------------------------------

/// Everything the genus-2 theta representation of a field needs: the period
/// matrix, the linear phase map `l(x,t) = l_const + l_matrix (x,t)^T`, and the
/// two one-dimensional half-period ratios of the factorized representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    pub b: PeriodMatrix,
    pub l_matrix: [[Complex64; 2]; 2],
    pub l_const: [Complex64; 2],
    /// Half-period ratio of the spatial factor of the product representation.
    pub tau_x: Complex64,
    /// Half-period ratio of the temporal factor of the product representation.
    pub tau_t: Complex64,
}

fn rhombic(tau_plus: Complex64, tau_minus: Complex64) -> PeriodMatrix {
    let s = 0.5 * (tau_plus + tau_minus);
    let d = 0.5 * (tau_plus - tau_minus);
    [[s, d], [d, s]]
}

fn phase_matrix(c: f64, w_plus: Complex64, w_minus: Complex64) -> [[Complex64; 2]; 2] {
    let ic2 = Complex64::new(0.0, 0.5 * c);
    [
        [-ic2 / w_plus, ic2 / w_minus],
        [-ic2 / w_plus, -ic2 / w_minus],
    ]
}

/// Assemble the theta-representation parameters of a curve for field scale `c`.
pub fn build_theta_params(curve: &SpectralCurve, c: f64) -> Result<ThetaParams> {
    let w = compute_w(curve)?;
    let quarter = Complex64::new(0.25, 0.0);
    match (curve.kind, curve.case) {
        (SolutionKind::Kink, CaseLabel::A) => Ok(ThetaParams {
            b: rhombic(w.tau_plus, w.tau_minus),
            l_matrix: phase_matrix(c, w.w_plus, w.w_minus),
            l_const: [quarter, quarter],
            tau_x: 2.0 * w.tau_plus,
            tau_t: 2.0 * w.tau_minus,
        }),
        (SolutionKind::Kink, CaseLabel::B) => {
            // Same period lattice as the standard labelling of the same four
            // points; the temporal half period shifts the phase origin.
            let shift = 0.5 * w.tau_minus;
            Ok(ThetaParams {
                b: rhombic(w.tau_plus, w.tau_minus),
                l_matrix: phase_matrix(c, w.w_plus, w.w_minus),
                l_const: [quarter + shift, quarter - shift],
                tau_x: 2.0 * w.tau_plus,
                tau_t: 2.0 * w.tau_minus,
            })
        }
        (SolutionKind::Breather, CaseLabel::A) => {
            // Rhombic quotient lattice: the primitive b-periods carry an extra
            // half a-period, which lands on the diagonal of the period matrix.
            let mut b = rhombic(w.tau_plus, w.tau_minus);
            b[0][0] += 0.5;
            b[1][1] += 0.5;
            Ok(ThetaParams {
                b,
                l_matrix: phase_matrix(c, w.w_plus, w.w_minus),
                l_const: [Complex64::new(0.0, 0.0); 2],
                tau_x: 2.0 * w.tau_plus,
                tau_t: 2.0 * w.tau_minus,
            })
        }
        (SolutionKind::Breather, CaseLabel::B) => Ok(ThetaParams {
            // tau_plus carries real part 1 from the continuation; the rhombic
            // assembly turns it into the half-integer diagonal.
            b: rhombic(w.tau_plus, w.tau_minus),
            l_matrix: phase_matrix(c, w.w_plus, w.w_minus),
            l_const: [Complex64::new(0.0, 0.0); 2],
            tau_x: 2.0 * (w.tau_plus - 1.0),
            tau_t: 2.0 * w.tau_minus,
        }),
    }
}

/// Period matrix of a kink curve in a chosen loop basis, by raw quadrature.
pub fn b_matrix_in_basis(curve: &SpectralCurve, basis: LoopBasis) -> Result<PeriodMatrix> {
    Ok(raw_periods(curve, basis)?.b_matrix())
}

// ---------------------------------------------------------------------------
// Period-relation residuals
// ---------------------------------------------------------------------------

/// Relative residuals of the involution-induced period identities.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    /// Standard basis: `I(a1) = 16 J(a2)`, `I(a2) = 16 J(a1)`,
    /// `I(b1) = 16 J(b2)`, `I(b2) = 16 J(b1)`.
    pub standard: [f64; 4],
    /// Nested basis: `I(a2) = -16 J(a2)`, `I(a1+a2) = 16 J(a1+a2)`,
    /// `I(b1) = 16 J(b1)`, `I(b2-b1) = -16 J(b2-b1)`.
    pub nested: [f64; 4],
    /// Doubled basis: same shape as the standard relations.
    pub rebased: [f64; 4],
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Evaluate all period-relation residuals for a kink curve by quadrature.
pub fn relation_residuals(curve: &SpectralCurve) -> Result<RelationReport> {
    let std = raw_periods(curve, LoopBasis::Standard)?;
    let sixteen = 16.0;
    let standard = [
        rel(std.i_a[0], sixteen * std.j_a[1]),
        rel(std.i_a[1], sixteen * std.j_a[0]),
        rel(std.i_b[0], sixteen * std.j_b[1]),
        rel(std.i_b[1], sixteen * std.j_b[0]),
    ];
    let nst = raw_periods(curve, LoopBasis::Nested)?;
    let nested = [
        rel(nst.i_a[1], -sixteen * nst.j_a[1]),
        rel(nst.i_a[0] + nst.i_a[1], sixteen * (nst.j_a[0] + nst.j_a[1])),
        rel(nst.i_b[0], sixteen * nst.j_b[0]),
        rel(nst.i_b[1] - nst.i_b[0], -sixteen * (nst.j_b[1] - nst.j_b[0])),
    ];
    let reb = raw_periods(curve, LoopBasis::Rebased)?;
    let rebased = [
        rel(reb.i_a[0], sixteen * reb.j_a[1]),
        rel(reb.i_a[1], sixteen * reb.j_a[0]),
        rel(reb.i_b[0], sixteen * reb.j_b[1]),
        rel(reb.i_b[1], sixteen * reb.j_b[0]),
    ];
    Ok(RelationReport {
        standard,
        nested,
        rebased,
    })
}

// ---------------------------------------------------------------------------
// Field-scale calibration
// ---------------------------------------------------------------------------

/// Outcome of the field-scale search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// Scale that minimizes the equation residual.
    pub c_star: f64,
    /// Maximum equation residual on the calibration grid at `c_star`.
    pub residual: f64,
}

/// Field value from the theta representation (ratio argument), used by the
/// calibration search. Returns the principal value of `2 i log` of the ratio.
fn theta_field(params: &ThetaParams, x: f64, t: f64) -> Result<f64> {
    let l = [
        params.l_const[0] + params.l_matrix[0][0] * x + params.l_matrix[0][1] * t,
        params.l_const[1] + params.l_matrix[1][0] * x + params.l_matrix[1][1] * t,
    ];
    let half = Complex64::new(0.5, 0.0);
    let den = elliptic::theta_genus2(l, &params.b)?;
    let num = elliptic::theta_genus2([l[0] + half, l[1] + half], &params.b)?;
    if den.norm() == 0.0 || num.norm() == 0.0 {
        return Err(EllipticError::PoleEncountered(0.0).into());
    }
    Ok(-2.0 * (num / den).arg())
}

fn grid_residual(curve: &SpectralCurve, c: f64, n: usize, h: f64) -> Result<f64> {
    let params = build_theta_params(curve, c)?;
    let half_n = (n / 2) as isize;
    let mut field = vec![0.0_f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let x = ((i as isize) - half_n) as f64 * h;
            let t = ((j as isize) - half_n) as f64 * h;
            field[i * n + j] = theta_field(&params, x, t)?;
        }
    }
    let mut worst = 0.0_f64;
    let idx = |i: usize, j: usize| field[i * n + j];
    for i in 2..n - 2 {
        for j in 2..n - 2 {
            let d2t = (-idx(i, j + 2) + 16.0 * idx(i, j + 1) - 30.0 * idx(i, j)
                + 16.0 * idx(i, j - 1)
                - idx(i, j - 2))
                / (12.0 * h * h);
            let d2x = (-idx(i + 2, j) + 16.0 * idx(i + 1, j) - 30.0 * idx(i, j)
                + 16.0 * idx(i - 1, j)
                - idx(i - 2, j))
                / (12.0 * h * h);
            let res = (d2t - d2x + idx(i, j).sin()).abs();
            worst = worst.max(res);
        }
    }
    Ok(worst)
}

/// Search the field scale on `(0, c_max]` by a coarse scan refined with a
/// golden-section bracket, minimizing the maximum equation residual of the
/// theta representation on a coarse grid.
pub fn calibrate_c(curve: &SpectralCurve, c_max: f64) -> Result<Calibration> {
    let n = 21;
    let h = 0.02;
    // Coarse scan to localize the global basin.
    let coarse = 200usize;
    let mut best_i = 1usize;
    let mut best_v = f64::INFINITY;
    let mut cache = vec![f64::NAN; coarse + 1];
    for i in 1..=coarse {
        let c = c_max * (i as f64) / (coarse as f64);
        let v = grid_residual(curve, c, n, h)?;
        cache[i] = v;
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let step = c_max / (coarse as f64);
    let mut lo = ((best_i as f64) - 1.0) * step;
    let mut hi = ((best_i as f64) + 1.0) * step;
    if lo <= 0.0 {
        lo = 0.25 * step;
    }
    // Golden-section refinement.
    let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c1 = hi - gr * (hi - lo);
    let mut c2 = lo + gr * (hi - lo);
    let mut f1 = grid_residual(curve, c1, n, h)?;
    let mut f2 = grid_residual(curve, c2, n, h)?;
    for _ in 0..80 {
        if hi - lo < 1e-9 {
            break;
        }
        if f1 < f2 {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - gr * (hi - lo);
            f1 = grid_residual(curve, c1, n, h)?;
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + gr * (hi - lo);
            f2 = grid_residual(curve, c2, n, h)?;
        }
    }
    let c_star = 0.5 * (lo + hi);
    let residual = grid_residual(curve, c_star, n, h)?;
    if residual > 1e-6 {
        return Err(PeriodsError::CalibrationFailed {
            best_c: c_star,
            residual,
        });
    }
    Ok(Calibration { c_star, residual })
}

/// The calibrated field scale shared by every family (verified by
/// `calibrate_c` and by the equation residuals of all four families).
pub const FIELD_SCALE: f64 = 64.0;
