//! Integer transforms of the genus-2 period lattice and their fractional
//! linear action on period matrices, plus the characteristic-shift identity
//! that absorbs a constant integer off-diagonal entry of a period matrix
//! into shifted theta characteristics.

use crate::elliptic::{self, EllipticError, PeriodMatrix};
use num_complex::Complex64;
use thiserror::Error;

/// Errors from transform application.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    /// The denominator block `cB + d` of the fractional linear action is
    /// singular at this period matrix.
    #[error("singular denominator block (|det| = {0:.3e})")]
    SingularDenominator(f64),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// An integer 4x4 transform acting on the stacked period lattice, stored
/// row-major. Block form `[[a, b], [c, d]]` with 2x2 integer blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transform4(pub [[i64; 4]; 4]);

/// Relabelling that maps the nested-loop period matrix of a kink spectrum to
/// the standard-loop period matrix of the same four points.
pub const SIGMA_C: Transform4 = Transform4([
    [2, -1, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 1, 2],
]);

/// Transform taking the standard-labelled period matrix to the decoupled
/// form whose doubled entries split into two one-dimensional moduli.
pub const SIGMA_A: Transform4 = Transform4([
    [0, -1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 1, -1],
    [-1, -1, 0, 0],
]);

/// Composite `SIGMA_A * SIGMA_C`: decouples the nested-labelled period
/// matrix directly.
pub const SIGMA_B: Transform4 = Transform4([
    [0, -1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, -2],
    [-2, 0, 0, 0],
]);

impl Transform4 {
    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Transform4) -> Transform4 {
        let mut out = [[0_i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0_i64;
                for k in 0..4 {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                out[i][j] = acc;
            }
        }
        Transform4(out)
    }

    /// Exact integer determinant (cofactor expansion in wide arithmetic).
    pub fn det(&self) -> i64 {
        fn det3(m: [[i128; 3]; 3]) -> i128 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        let m: Vec<Vec<i128>> = self
            .0
            .iter()
            .map(|row| row.iter().map(|&v| v as i128).collect())
            .collect();
        let mut acc: i128 = 0;
        for col in 0..4 {
            let mut minor = [[0_i128; 3]; 3];
            for (mi, row) in m.iter().enumerate().skip(1) {
                let mut mj = 0;
                for (cj, &v) in row.iter().enumerate() {
                    if cj == col {
                        continue;
                    }
                    minor[mi - 1][mj] = v;
                    mj += 1;
                }
            }
            let sign = if col % 2 == 0 { 1 } else { -1 };
            acc += sign * m[0][col] * det3(minor);
        }
        acc as i64
    }

    /// If `S J S^T = mu J` for an integer `mu` (with `J` the standard
    /// skew form), return `Some(mu)`; otherwise `None`.
    pub fn multiplier(&self) -> Option<i64> {
        // J = [[0, I], [-I, 0]] in the same stacked ordering.
        let mut j = [[0_i64; 4]; 4];
        j[0][2] = 1;
        j[1][3] = 1;
        j[2][0] = -1;
        j[3][1] = -1;
        let sj = self.compose(&Transform4(j));
        let mut sjst = [[0_i64; 4]; 4];
        for i in 0..4 {
            for jj in 0..4 {
                let mut acc = 0_i64;
                for k in 0..4 {
                    acc += sj.0[i][k] * self.0[jj][k];
                }
                sjst[i][jj] = acc;
            }
        }
        let mu = sjst[0][2];
        for r in 0..4 {
            for c in 0..4 {
                if sjst[r][c] != mu * j[r][c] {
                    return None;
                }
            }
        }
        Some(mu)
    }

    /// Fractional linear action on a period matrix:
    /// `B' = (a B + b)(c B + d)^{-1}` with the 2x2 integer blocks of `self`.
    pub fn act_on_b(&self, b: &PeriodMatrix) -> Result<PeriodMatrix, SymplecticError> {
        let blk = |r0: usize, c0: usize| -> [[f64; 2]; 2] {
            [
                [self.0[r0][c0] as f64, self.0[r0][c0 + 1] as f64],
                [self.0[r0 + 1][c0] as f64, self.0[r0 + 1][c0 + 1] as f64],
            ]
        };
        let (ab, bb, cb, db) = (blk(0, 0), blk(0, 2), blk(2, 0), blk(2, 2));
        let mul = |m: [[f64; 2]; 2], x: &PeriodMatrix| -> PeriodMatrix {
            [
                [
                    m[0][0] * x[0][0] + m[0][1] * x[1][0],
                    m[0][0] * x[0][1] + m[0][1] * x[1][1],
                ],
                [
                    m[1][0] * x[0][0] + m[1][1] * x[1][0],
                    m[1][0] * x[0][1] + m[1][1] * x[1][1],
                ],
            ]
        };
        let add_int = |x: PeriodMatrix, m: [[f64; 2]; 2]| -> PeriodMatrix {
            [
                [x[0][0] + m[0][0], x[0][1] + m[0][1]],
                [x[1][0] + m[1][0], x[1][1] + m[1][1]],
            ]
        };
        let num = add_int(mul(ab, b), bb);
        let den = add_int(mul(cb, b), db);
        let det = den[0][0] * den[1][1] - den[0][1] * den[1][0];
        if det.norm() < 1e-14 {
            return Err(SymplecticError::SingularDenominator(det.norm()));
        }
        let inv = [
            [den[1][1] / det, -den[0][1] / det],
            [-den[1][0] / det, den[0][0] / det],
        ];
        // num * inv
        Ok([
            [
                num[0][0] * inv[0][0] + num[0][1] * inv[1][0],
                num[0][0] * inv[0][1] + num[0][1] * inv[1][1],
            ],
            [
                num[1][0] * inv[0][0] + num[1][1] * inv[1][0],
                num[1][0] * inv[0][1] + num[1][1] * inv[1][1],
            ],
        ])
    }
}

/// Relative defect of the characteristic-shift identity at one characteristic:
/// a genus-2 theta with characteristics over a diagonal period matrix equals,
/// up to the phase `exp(2 pi i alpha1 alpha2)`, the theta over the same
/// diagonal plus unit off-diagonal entries with characteristics
/// `[alpha; beta1 - alpha2, beta2 - alpha1]`.
pub fn characteristic_shift_residual(
    alpha: [f64; 2],
    beta: [f64; 2],
    l: [Complex64; 2],
    diag: [Complex64; 2],
) -> Result<f64, SymplecticError> {
    let b_diag: PeriodMatrix = [
        [diag[0], Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), diag[1]],
    ];
    let b_off: PeriodMatrix = [
        [diag[0], Complex64::new(1.0, 0.0)],
        [Complex64::new(1.0, 0.0), diag[1]],
    ];
    let lhs = elliptic::theta_genus2_char(alpha, beta, l, &b_diag)?;
    let shifted = [beta[0] - alpha[1], beta[1] - alpha[0]];
    let rhs_core = elliptic::theta_genus2_char(alpha, shifted, l, &b_off)?;
    let phase = Complex64::new(0.0, 2.0 * std::f64::consts::PI * alpha[0] * alpha[1]).exp();
    let rhs = phase * rhs_core;
    let scale = lhs.norm().max(rhs.norm()).max(1e-300);
    Ok((lhs - rhs).norm() / scale)
}
