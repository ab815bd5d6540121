//! Floquet analysis of the auxiliary linear system: transfer matrices over
//! one period of a given potential, the discriminant, its symmetry under the
//! energy involution `E -> 1/(256 E)`, the gauge-equivalent second form of
//! the system, and the imaginary half-period shift identity used to relate
//! shifted potentials.

use crate::elliptic::{self, EllipticError};
use crate::spectral::SPECTRAL_SCALE;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Errors from the Floquet layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    /// The spectral weight `1/sqrt(E)` is singular at `E = 0`.
    #[error("energy too close to zero for the spectral weight")]
    ZeroEnergy,
    /// The adaptive integrator could not meet its tolerance.
    #[error("integrator exceeded {steps} steps without meeting tolerance")]
    IntegratorTolExceeded { steps: usize },
    /// The discriminant symmetry needs a potential of definite parity.
    #[error("potential has no definite parity; the involution symmetry is untagged")]
    ParityUntagged,
    /// The potential failed its self-consistency checks.
    #[error("potential invalid: {0}")]
    PotentialInvalid(String),
    /// A requested branch continuation is not reliable at these parameters.
    #[error("analytic continuation unavailable: {0}")]
    AnalyticContinuationUnavailable(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

type Result<T> = std::result::Result<T, FloquetError>;

/// 2x2 complex matrix, rows first.
pub type Matrix2 = [[Complex64; 2]; 2];

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

/// Spatial parity of a periodic potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Untagged,
}

/// Periodic test potentials `u(x)` (snapshots, `u_t = 0`) for the linear
/// system. `l` is the spatial period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "potential", rename_all = "snake_case")]
pub enum TestPotential {
    /// `u = 0`.
    Free { l: f64 },
    /// `u = 4 atan(a cos(2 pi x / l))`; winding number 0, even.
    EvenCosine { a: f64, l: f64 },
    /// `u = 2 pi x / l + eps sin(2 pi x / l)`; winding number 1, odd.
    OddLinear { eps: f64, l: f64 },
    /// `u = 2 pi m x / l + sum cos[n-1] cos(2 pi n x / l)
    ///      + sum sin[n-1] sin(2 pi n x / l)`.
    Fourier {
        m: i64,
        cos: Vec<f64>,
        sin: Vec<f64>,
        l: f64,
    },
}

impl TestPotential {
    /// Spatial period.
    pub fn period(&self) -> f64 {
        match self {
            TestPotential::Free { l }
            | TestPotential::EvenCosine { l, .. }
            | TestPotential::OddLinear { l, .. }
            | TestPotential::Fourier { l, .. } => *l,
        }
    }

    /// Potential value.
    pub fn u(&self, x: f64) -> f64 {
        match self {
            TestPotential::Free { .. } => 0.0,
            TestPotential::EvenCosine { a, l } => 4.0 * (a * (2.0 * PI * x / l).cos()).atan(),
            TestPotential::OddLinear { eps, l } => {
                2.0 * PI * x / l + eps * (2.0 * PI * x / l).sin()
            }
            TestPotential::Fourier { m, cos, sin, l } => {
                let w = 2.0 * PI / l;
                let mut u = w * (*m as f64) * x;
                for (i, &c) in cos.iter().enumerate() {
                    u += c * (w * (i + 1) as f64 * x).cos();
                }
                for (i, &s) in sin.iter().enumerate() {
                    u += s * (w * (i + 1) as f64 * x).sin();
                }
                u
            }
        }
    }

    /// Spatial derivative of the potential.
    pub fn u_x(&self, x: f64) -> f64 {
        match self {
            TestPotential::Free { .. } => 0.0,
            TestPotential::EvenCosine { a, l } => {
                let w = 2.0 * PI / l;
                let c = (w * x).cos();
                -4.0 * a * w * (w * x).sin() / (1.0 + a * a * c * c)
            }
            TestPotential::OddLinear { eps, l } => {
                let w = 2.0 * PI / l;
                w * (1.0 + eps * (w * x).cos())
            }
            TestPotential::Fourier { m, cos, sin, l } => {
                let w = 2.0 * PI / l;
                let mut d = w * (*m as f64);
                for (i, &c) in cos.iter().enumerate() {
                    let wn = w * (i + 1) as f64;
                    d -= c * wn * (wn * x).sin();
                }
                for (i, &s) in sin.iter().enumerate() {
                    let wn = w * (i + 1) as f64;
                    d += s * wn * (wn * x).cos();
                }
                d
            }
        }
    }

    /// Temporal derivative; zero for these snapshots.
    pub fn v(&self, _x: f64) -> f64 {
        0.0
    }

    /// Topological winding number over one period.
    pub fn charge(&self) -> i64 {
        ((self.u(self.period()) - self.u(0.0)) / (2.0 * PI)).round() as i64
    }

    /// Declared spatial parity.
    pub fn parity(&self) -> Parity {
        match self {
            TestPotential::Free { .. } | TestPotential::EvenCosine { .. } => Parity::Even,
            TestPotential::OddLinear { .. } => Parity::Odd,
            TestPotential::Fourier { m, cos, sin, .. } => {
                let cos_zero = cos.iter().all(|&c| c == 0.0);
                let sin_zero = sin.iter().all(|&s| s == 0.0);
                if *m == 0 && sin_zero {
                    Parity::Even
                } else if cos_zero {
                    Parity::Odd
                } else {
                    Parity::Untagged
                }
            }
        }
    }

    /// Self-consistency: positive period, periodic derivative, winding
    /// closure, and the declared parity where one is claimed.
    pub fn validate(&self) -> Result<()> {
        let l = self.period();
        if !(l > 0.0) || !l.is_finite() {
            return Err(FloquetError::PotentialInvalid(format!(
                "period must be positive and finite, got {l}"
            )));
        }
        let m = self.charge();
        let closure = (self.u(l) - self.u(0.0) - 2.0 * PI * m as f64).abs();
        if closure > 1e-9 {
            return Err(FloquetError::PotentialInvalid(format!(
                "winding closure defect {closure:.3e}"
            )));
        }
        for i in 0..7 {
            let x = l * (i as f64) / 7.0 + 0.0371;
            if (self.u_x(x + l) - self.u_x(x)).abs() > 1e-9 {
                return Err(FloquetError::PotentialInvalid(
                    "derivative is not periodic".into(),
                ));
            }
            let d = (self.u(x + l) - self.u(x)) - 2.0 * PI * m as f64;
            if d.abs() > 1e-9 {
                return Err(FloquetError::PotentialInvalid(format!(
                    "quasi-periodicity defect {:.3e}",
                    d.abs()
                )));
            }
            match self.parity() {
                Parity::Even => {
                    if (self.u(-x) - self.u(x)).abs() > 1e-9 {
                        return Err(FloquetError::PotentialInvalid(
                            "declared even but u(-x) != u(x)".into(),
                        ));
                    }
                }
                Parity::Odd => {
                    if (self.u(-x) + self.u(x)).abs() > 1e-9 {
                        return Err(FloquetError::PotentialInvalid(
                            "declared odd but u(-x) != -u(x)".into(),
                        ));
                    }
                }
                Parity::Untagged => {}
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Energy branch
// ---------------------------------------------------------------------------

/// Principal square root of the energy, nudged just above the negative real
/// axis so spectra on the cut evaluate on a consistent side. Energies off the
/// cut use the exact principal branch.
pub fn sqrt_energy(e: Complex64) -> Result<Complex64> {
    if e.norm() < 1e-12 {
        return Err(FloquetError::ZeroEnergy);
    }
    if e.im == 0.0 && e.re < 0.0 {
        Ok((e + Complex64::new(0.0, 1e-9)).sqrt())
    } else {
        Ok(e.sqrt())
    }
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) on a stacked 2x2 system
// ---------------------------------------------------------------------------

type State = [Complex64; 4];

fn axpy(y: &State, h: f64, coeffs: &[(f64, &State)]) -> State {
    let mut out = *y;
    for item in out.iter_mut().enumerate() {
        let (i, o) = item;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, k) in coeffs {
            acc += a * k[i];
        }
        *o += h * acc;
    }
    out
}

fn dp54<F>(f: &F, x0: f64, x1: f64, y0: State, rtol: f64, atol: f64) -> Result<State>
where
    F: Fn(f64, &State) -> State,
{
    let span = x1 - x0;
    let mut x = x0;
    let mut y = y0;
    let mut h = span / 64.0;
    let max_steps = 200_000;
    let mut steps = 0;
    while (x - x1).abs() > 1e-15 * span.abs().max(1.0) {
        if (x + h - x0).abs() > span.abs() {
            h = x1 - x;
        }
        let k1 = f(x, &y);
        let k2 = f(x + 0.2 * h, &axpy(&y, h, &[(0.2, &k1)]));
        let k3 = f(
            x + 0.3 * h,
            &axpy(&y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]),
        );
        let k4 = f(
            x + 0.8 * h,
            &axpy(
                &y,
                h,
                &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
            ),
        );
        let k5 = f(
            x + (8.0 / 9.0) * h,
            &axpy(
                &y,
                h,
                &[
                    (19372.0 / 6561.0, &k1),
                    (-25360.0 / 2187.0, &k2),
                    (64448.0 / 6561.0, &k3),
                    (-212.0 / 729.0, &k4),
                ],
            ),
        );
        let k6 = f(
            x + h,
            &axpy(
                &y,
                h,
                &[
                    (9017.0 / 3168.0, &k1),
                    (-355.0 / 33.0, &k2),
                    (46732.0 / 5247.0, &k3),
                    (49.0 / 176.0, &k4),
                    (-5103.0 / 18656.0, &k5),
                ],
            ),
        );
        let y5 = axpy(
            &y,
            h,
            &[
                (35.0 / 384.0, &k1),
                (500.0 / 1113.0, &k3),
                (125.0 / 192.0, &k4),
                (-2187.0 / 6784.0, &k5),
                (11.0 / 84.0, &k6),
            ],
        );
        let k7 = f(x + h, &y5);
        let y4 = axpy(
            &y,
            h,
            &[
                (5179.0 / 57600.0, &k1),
                (7571.0 / 16695.0, &k3),
                (393.0 / 640.0, &k4),
                (-92097.0 / 339200.0, &k5),
                (187.0 / 2100.0, &k6),
                (1.0 / 40.0, &k7),
            ],
        );
        let mut err = 0.0_f64;
        for i in 0..4 {
            let sc = atol + rtol * y5[i].norm().max(y[i].norm());
            let e = (y5[i] - y4[i]).norm() / sc;
            err += e * e;
        }
        err = (err / 4.0).sqrt();
        if err <= 1.0 {
            x += h;
            y = y5;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        steps += 1;
        if steps > max_steps {
            return Err(FloquetError::IntegratorTolExceeded { steps });
        }
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// Transfer matrices
// ---------------------------------------------------------------------------

/// Transfer matrix of the linear system over one period at energy `e`,
/// together with the discriminant, the Floquet multipliers, and the
/// unimodularity defect.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetResult {
    pub e: Complex64,
    pub t: Matrix2,
    /// Discriminant: trace of the transfer matrix.
    pub delta: Complex64,
    /// Floquet multipliers, the eigenvalues of the transfer matrix.
    pub rho: (Complex64, Complex64),
    /// `|det T - 1|`; the system is traceless so this measures integration
    /// quality.
    pub det_defect: f64,
}

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-12;

fn finish(e: Complex64, t: Matrix2) -> FloquetResult {
    let delta = t[0][0] + t[1][1];
    let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
    let disc = (delta * delta - 4.0).sqrt();
    let rho = ((delta + disc) / 2.0, (delta - disc) / 2.0);
    FloquetResult {
        e,
        t,
        delta,
        rho,
        det_defect: (det - Complex64::new(1.0, 0.0)).norm(),
    }
}

/// Integrate the first form of the linear system over one period.
///
/// The state stacks both fundamental columns:
/// `phi1' = -c phi1 - a phi2`, `phi2' = b phi1 + c phi2` with
/// `c = (i/4)(v + u_x)`, `a = e^{-iu}/(16 sqrt(E)) - sqrt(E)`,
/// `b = e^{iu}/(16 sqrt(E)) - sqrt(E)`.
pub fn transfer_matrix(pot: &TestPotential, e: Complex64) -> Result<FloquetResult> {
    pot.validate()?;
    let se = sqrt_energy(e)?;
    let i = Complex64::new(0.0, 1.0);
    let weight = 1.0 / (16.0 * se);
    let f = |x: f64, y: &State| -> State {
        let u = pot.u(x);
        let cc = i / 4.0 * (pot.v(x) + pot.u_x(x));
        let a = (-i * u).exp() * weight - se;
        let b = (i * u).exp() * weight - se;
        [
            -cc * y[0] - a * y[1],
            b * y[0] + cc * y[1],
            -cc * y[2] - a * y[3],
            b * y[2] + cc * y[3],
        ]
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let y = dp54(&f, 0.0, pot.period(), [one, zero, zero, one], RTOL, ATOL)?;
    // Columns of the fundamental matrix were stacked as [col1, col2].
    let t = [[y[0], y[2]], [y[1], y[3]]];
    Ok(finish(e, t))
}

/// Integrate the gauge-transformed second form of the system directly:
/// `psi1' = -(i/4) v psi1 - (e^{-iu/2}/(16 sqrt(E)) - sqrt(E) e^{iu/2}) psi2`,
/// `psi2' = +(i/4) v psi2 + (e^{iu/2}/(16 sqrt(E)) - sqrt(E) e^{-iu/2}) psi1`.
pub fn gauge_transfer_matrix(pot: &TestPotential, e: Complex64) -> Result<Matrix2> {
    pot.validate()?;
    let se = sqrt_energy(e)?;
    let i = Complex64::new(0.0, 1.0);
    let weight = 1.0 / (16.0 * se);
    let f = |x: f64, y: &State| -> State {
        let u = pot.u(x);
        let v = pot.v(x);
        let p = (-i * u / 2.0).exp() * weight - se * (i * u / 2.0).exp();
        let q = (i * u / 2.0).exp() * weight - se * (-i * u / 2.0).exp();
        let dv = i / 4.0 * v;
        [
            -dv * y[0] - p * y[1],
            dv * y[1] + q * y[0],
            -dv * y[2] - p * y[3],
            dv * y[3] + q * y[2],
        ]
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let y = dp54(&f, 0.0, pot.period(), [one, zero, zero, one], RTOL, ATOL)?;
    Ok([[y[0], y[2]], [y[1], y[3]]])
}

/// Max elementwise defect between the directly integrated second form and
/// the gauge conjugation `G(L) T G(0)^{-1}` of the first form, where
/// `G = diag(e^{iu/4}, e^{-iu/4})`.
pub fn gauge_equivalence_defect(pot: &TestPotential, e: Complex64) -> Result<f64> {
    let direct = gauge_transfer_matrix(pot, e)?;
    let first = transfer_matrix(pot, e)?.t;
    let i = Complex64::new(0.0, 1.0);
    let g = |u: f64| -> [Complex64; 2] { [(i * u / 4.0).exp(), (-i * u / 4.0).exp()] };
    let gl = g(pot.u(pot.period()));
    let g0 = g(pot.u(0.0));
    let mut defect = 0.0_f64;
    for r in 0..2 {
        for c in 0..2 {
            let conj = gl[r] * first[r][c] / g0[c];
            defect = defect.max((direct[r][c] - conj).norm());
        }
    }
    Ok(defect)
}

/// Discriminant of the zero-potential system:
/// `2 cos( L (sqrt(E) - 1/(16 sqrt(E))) )`.
pub fn free_discriminant(e: Complex64, l: f64) -> Result<Complex64> {
    let se = sqrt_energy(e)?;
    Ok(2.0 * ((se - 1.0 / (16.0 * se)) * l).cos())
}

/// One row of the involution-symmetry check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRow {
    pub e: (f64, f64),
    pub delta: (f64, f64),
    pub delta_mapped: (f64, f64),
    /// `| Delta(1/(256 E)) - sign Delta(E) |`
    pub defect: f64,
}

/// Report of the discriminant symmetry under the energy involution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `(-1)^M` for winding number `M`.
    pub sign: f64,
    pub rows: Vec<SymmetryRow>,
    pub max_defect: f64,
}

/// Verify `Delta(1/(256 E)) = (-1)^M Delta(E)` over the given energies.
/// The potential must have definite parity for the symmetry to hold.
pub fn verify_spectral_symmetry(
    pot: &TestPotential,
    energies: &[Complex64],
) -> Result<SymmetryReport> {
    if pot.parity() == Parity::Untagged {
        return Err(FloquetError::ParityUntagged);
    }
    let sign = if pot.charge() % 2 == 0 { 1.0 } else { -1.0 };
    let mut rows = Vec::with_capacity(energies.len());
    let mut max_defect = 0.0_f64;
    for &e in energies {
        let d1 = transfer_matrix(pot, e)?.delta;
        let em = SPECTRAL_SCALE / e;
        let d2 = transfer_matrix(pot, em)?.delta;
        let defect = (d2 - sign * d1).norm();
        max_defect = max_defect.max(defect);
        rows.push(SymmetryRow {
            e: (e.re, e.im),
            delta: (d1.re, d1.im),
            delta_mapped: (d2.re, d2.im),
            defect,
        });
    }
    Ok(SymmetryReport {
        sign,
        rows,
        max_defect,
    })
}

// ---------------------------------------------------------------------------
// Imaginary half-period shift
// ---------------------------------------------------------------------------

/// Defects of the imaginary quarter-lattice shift identities at modulus `k`
/// and abscissa `x`:
/// `[ |i sc(x - i K'; k) - nd(x; k)| , |i sc(x + i K'; k) + nd(x; k)| ]`.
/// Both vanish; the downward shift is the one relating the shifted potential
/// forms.
pub fn imaginary_shift_check(k: f64, x: f64) -> Result<[f64; 2]> {
    if !(k > 1e-6 && k < 1.0 - 1e-6) {
        return Err(FloquetError::AnalyticContinuationUnavailable(format!(
            "imaginary half-period shift ill-conditioned at modulus {k}"
        )));
    }
    let m = k * k;
    let kp = elliptic::complete_k(1.0 - m)?;
    let i = Complex64::new(0.0, 1.0);
    let down = elliptic::jacobi_ratio_complex(
        elliptic::JacobiRatio::Sc,
        Complex64::new(x, -kp),
        m,
    )?;
    let up = elliptic::jacobi_ratio_complex(
        elliptic::JacobiRatio::Sc,
        Complex64::new(x, kp),
        m,
    )?;
    let (_, _, nd) = elliptic::jacobi_sn_cn_dn(x, m)?;
    let nd = Complex64::new(1.0 / nd, 0.0);
    Ok([(i * down - nd).norm(), (i * up + nd).norm()])
}
