//! Field evaluation for the four two-phase solution families: elliptic
//! closed forms, the genus-2 theta-ratio representation with its one
//! dimensional product factorizations, static profiles with their reciprocal
//! chain identities, the kink time-shift equivalence, and the field-equation
//! residual checker.

use crate::elliptic::{self, EllipticError};
use crate::periods::{self, PeriodsError, ThetaParams, WData};
use crate::spectral::{CaseLabel, SolutionKind, SpectralCurve, SpectralError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Errors from field evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionsError {
    /// The theta denominator vanished — the solution is singular there.
    #[error("theta ratio singular at (x, t) = ({x}, {t})")]
    ThetaZero { x: f64, t: f64 },
    /// Grid too small or non-uniform for the finite-difference stencil.
    #[error("grid unusable for the residual stencil: {0}")]
    GridTooCoarse(String),
    /// The two models do not share a branch-point set.
    #[error("spectra differ: {0}")]
    SpectraMismatch(String),
    /// Parameter outside its defined range.
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Periods(#[from] PeriodsError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

type Result<T> = std::result::Result<T, SolutionsError>;

// ---------------------------------------------------------------------------
// Solution model
// ---------------------------------------------------------------------------

/// Everything needed to evaluate one family: the curve, its period data and
/// theta parameters, the two one-dimensional moduli with complements, the
/// amplitude prefactor, and the argument scalings of the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionModel {
    pub curve: SpectralCurve,
    /// Field scale entering the phase arguments.
    pub c: f64,
    pub w: WData,
    pub theta: ThetaParams,
    /// Modulus of the spatial leg.
    pub k1: f64,
    /// Complementary modulus of the spatial leg.
    pub k1p: f64,
    /// Modulus of the temporal leg.
    pub k2: f64,
    /// Complementary modulus of the temporal leg.
    pub k2p: f64,
    /// Amplitude prefactor of the closed form.
    pub amp: f64,
    /// Spatial argument scaling.
    pub alpha: f64,
    /// Temporal argument scaling.
    pub beta: f64,
}

fn real_part_checked(v: Complex64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-9 * v.norm().max(1.0) {
        return Err(SolutionsError::ParamOutOfRange(format!(
            "{what} expected real, got {v}"
        )));
    }
    Ok(v.re)
}

/// Derive the evaluation model of a curve for field scale `c`.
pub fn derive_model(curve: &SpectralCurve, c: f64) -> Result<SolutionModel> {
    let w = periods::compute_w(curve)?;
    let theta = periods::build_theta_params(curve, c)?;
    let k1 = real_part_checked(elliptic::modulus_from_tau(theta.tau_x)?, "k1")?;
    let k2 = real_part_checked(elliptic::modulus_from_tau(theta.tau_t)?, "k2")?;
    let k1p = real_part_checked(elliptic::comodulus_from_tau(theta.tau_x)?, "k1'")?;
    let k2p = real_part_checked(elliptic::comodulus_from_tau(theta.tau_t)?, "k2'")?;
    let big_k1 = real_part_checked(elliptic::complete_k_from_tau(theta.tau_x)?, "K1")?;
    let big_k2 = real_part_checked(elliptic::complete_k_from_tau(theta.tau_t)?, "K2")?;
    let alpha = 2.0 * c * big_k1 / w.w_plus.norm();
    let beta = 2.0 * c * big_k2 / w.w_minus.norm();
    let amp = match (curve.kind, curve.case) {
        (SolutionKind::Kink, CaseLabel::A) => (k1 * k2).sqrt(),
        (SolutionKind::Kink, CaseLabel::B) => (k1 / k2).sqrt(),
        (SolutionKind::Breather, CaseLabel::A) => (k1 * k2 / (k1p * k2p)).sqrt(),
        (SolutionKind::Breather, CaseLabel::B) => (k1 * k2).sqrt(),
    };
    Ok(SolutionModel {
        curve: curve.clone(),
        c,
        w,
        theta,
        k1,
        k1p,
        k2,
        k2p,
        amp,
        alpha,
        beta,
    })
}

// ---------------------------------------------------------------------------
// Closed-form evaluation
// ---------------------------------------------------------------------------

fn expect_family(m: &SolutionModel, kind: SolutionKind, case: CaseLabel) -> Result<()> {
    if m.curve.kind != kind || m.curve.case != case {
        return Err(SolutionsError::ParamOutOfRange(format!(
            "model is {:?}/{:?}, evaluator needs {:?}/{:?}",
            m.curve.kind, m.curve.case, kind, case
        )));
    }
    Ok(())
}

/// Winding count of the spatial argument through the poles of `sc`,
/// used to unwrap kink fields into continuous profiles.
fn kink_winding(u: f64, quarter: f64) -> f64 {
    ((u + quarter) / (2.0 * quarter)).floor()
}

/// Standard-labelled kink: `4 atan[ amp sc(alpha x) nd(beta t) ]`, unwrapped
/// so the profile increases continuously through the `sc` poles.
pub fn eval_kink_a(m: &SolutionModel, x: f64, t: f64) -> Result<f64> {
    expect_family(m, SolutionKind::Kink, CaseLabel::A)?;
    let m1 = 1.0 - m.k1 * m.k1;
    let m2 = 1.0 - m.k2 * m.k2;
    let (s1, c1, _) = elliptic::jacobi_sn_cn_dn(m.alpha * x, m1)?;
    let (_, _, d2) = elliptic::jacobi_sn_cn_dn(m.beta * t, m2)?;
    let quarter = elliptic::complete_k(m1)?;
    let arg = m.amp * (s1 / c1) / d2;
    Ok(4.0 * arg.atan() + 4.0 * PI * kink_winding(m.alpha * x, quarter))
}

/// Nested-labelled kink: `4 atan[ amp sc(alpha x) dn(beta t) ]`, unwrapped.
pub fn eval_kink_b(m: &SolutionModel, x: f64, t: f64) -> Result<f64> {
    expect_family(m, SolutionKind::Kink, CaseLabel::B)?;
    let m1 = 1.0 - m.k1 * m.k1;
    let m2 = 1.0 - m.k2 * m.k2;
    let (s1, c1, _) = elliptic::jacobi_sn_cn_dn(m.alpha * x, m1)?;
    let (_, _, d2) = elliptic::jacobi_sn_cn_dn(m.beta * t, m2)?;
    let quarter = elliptic::complete_k(m1)?;
    let arg = m.amp * (s1 / c1) * d2;
    Ok(4.0 * arg.atan() + 4.0 * PI * kink_winding(m.alpha * x, quarter))
}

/// Off-circle breather: `4 atan[ amp nc(alpha x) nc(beta t) ]` (principal).
pub fn eval_breather_a(m: &SolutionModel, x: f64, t: f64) -> Result<f64> {
    expect_family(m, SolutionKind::Breather, CaseLabel::A)?;
    let m1 = 1.0 - m.k1 * m.k1;
    let m2 = 1.0 - m.k2 * m.k2;
    let (_, c1, _) = elliptic::jacobi_sn_cn_dn(m.alpha * x, m1)?;
    let (_, c2, _) = elliptic::jacobi_sn_cn_dn(m.beta * t, m2)?;
    Ok(4.0 * (m.amp / (c1 * c2)).atan())
}

/// On-circle breather: `4 atan[ amp nd(alpha x) cd(beta t) ]` (principal).
pub fn eval_breather_b(m: &SolutionModel, x: f64, t: f64) -> Result<f64> {
    expect_family(m, SolutionKind::Breather, CaseLabel::B)?;
    let m1 = 1.0 - m.k1 * m.k1;
    let m2 = m.k2 * m.k2;
    let (_, _, d1) = elliptic::jacobi_sn_cn_dn(m.alpha * x, m1)?;
    let (_, c2, d2) = elliptic::jacobi_sn_cn_dn(m.beta * t, m2)?;
    Ok(4.0 * (m.amp * c2 / (d1 * d2)).atan())
}

/// Evaluate the model's own family.
pub fn eval(m: &SolutionModel, x: f64, t: f64) -> Result<f64> {
    match (m.curve.kind, m.curve.case) {
        (SolutionKind::Kink, CaseLabel::A) => eval_kink_a(m, x, t),
        (SolutionKind::Kink, CaseLabel::B) => eval_kink_b(m, x, t),
        (SolutionKind::Breather, CaseLabel::A) => eval_breather_a(m, x, t),
        (SolutionKind::Breather, CaseLabel::B) => eval_breather_b(m, x, t),
    }
}

// ---------------------------------------------------------------------------
// Theta representation
// ---------------------------------------------------------------------------

/// Numerator and denominator of the theta-ratio representation at `(x, t)`:
/// the genus-2 theta at the shifted phase and at the phase itself.
pub fn theta_ratio_parts(
    params: &ThetaParams,
    x: f64,
    t: f64,
) -> Result<(Complex64, Complex64)> {
    let l = [
        params.l_const[0] + params.l_matrix[0][0] * x + params.l_matrix[0][1] * t,
        params.l_const[1] + params.l_matrix[1][0] * x + params.l_matrix[1][1] * t,
    ];
    let half = Complex64::new(0.5, 0.0);
    let den = elliptic::theta_genus2(l, &params.b)?;
    let num = elliptic::theta_genus2([l[0] + half, l[1] + half], &params.b)?;
    Ok((num, den))
}

/// Principal value of the theta representation `2i log` of the ratio,
/// in `(-2 pi, 2 pi]`.
pub fn eval_theta_representation(params: &ThetaParams, x: f64, t: f64) -> Result<f64> {
    let (num, den) = theta_ratio_parts(params, x, t)?;
    if den.norm() < 1e-14 || num.norm() < 1e-14 {
        return Err(SolutionsError::ThetaZero { x, t });
    }
    Ok(-2.0 * (num / den).arg())
}

/// One-dimensional theta products factorizing the genus-2 representation:
/// returns `(numerator, denominator)` of the same ratio.
pub fn theta_products(m: &SolutionModel, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
    let zx = Complex64::new(0.0, m.c * x) / m.w.w_plus;
    let tx = m.theta.tau_x;
    let tt = m.theta.tau_t;
    match (m.curve.kind, m.curve.case) {
        (SolutionKind::Kink, CaseLabel::A) => {
            let zt = Complex64::new(0.0, m.c * t) / m.w.w_minus;
            let a = elliptic::theta(4, zx, tx)? * elliptic::theta(3, zt, tt)?;
            let b = elliptic::theta(1, zx, tx)? * elliptic::theta(2, zt, tt)?;
            Ok((a - b, a + b))
        }
        (SolutionKind::Kink, CaseLabel::B) => {
            let zt = Complex64::new(0.0, m.c * t) / m.w.w_minus;
            let a = elliptic::theta(4, zx, tx)? * elliptic::theta(2, zt, tt)?;
            let b = elliptic::theta(1, zx, tx)? * elliptic::theta(3, zt, tt)?;
            Ok((a - b, a + b))
        }
        (SolutionKind::Breather, CaseLabel::A) => {
            let zt = Complex64::new(0.0, m.c * t) / m.w.w_minus;
            let a = elliptic::theta(4, zx, tx)? * elliptic::theta(4, zt, tt)?;
            let b = elliptic::theta(2, zx, tx)? * elliptic::theta(2, zt, tt)?;
            let i = Complex64::new(0.0, 1.0);
            Ok((a - i * b, a + i * b))
        }
        (SolutionKind::Breather, CaseLabel::B) => {
            // Temporal phase is real here: i C t / w- with w- negative
            // imaginary; theta 2 and 3 are even so the sign is immaterial.
            let zt = Complex64::new(m.c * t / m.w.w_minus.norm(), 0.0);
            let a = elliptic::theta(3, zx, tx)? * elliptic::theta(3, zt, tt)?;
            let b = elliptic::theta(2, zx, tx)? * elliptic::theta(2, zt, tt)?;
            let i = Complex64::new(0.0, 1.0);
            Ok((a - i * b, a + i * b))
        }
    }
}

/// Comparison of the genus-2 theta representation with its one-dimensional
/// product factorization over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// Max defect of ratio-vs-ratio equality (all families).
    pub ratio: f64,
    /// Max defect of the numerator equality after constant normalization;
    /// absent for the nested kink, whose factorization holds only as a ratio.
    pub num: Option<f64>,
    /// Max defect of the denominator equality after constant normalization.
    pub den: Option<f64>,
    /// Proportionality constant between genus-2 numerator and product.
    pub num_constant: Option<(f64, f64)>,
    /// Proportionality constant between genus-2 denominator and product.
    pub den_constant: Option<(f64, f64)>,
    /// Max defect of the conjugation symmetry (breathers only):
    /// the shifted theta equals the conjugate of the unshifted one.
    pub conjugation: Option<f64>,
}

fn rel_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Verify the theta factorization at the given sample points.
pub fn factorization_report(m: &SolutionModel, pts: &[(f64, f64)]) -> Result<FactorizationReport> {
    if pts.is_empty() {
        return Err(SolutionsError::ParamOutOfRange(
            "factorization check needs at least one sample point".into(),
        ));
    }
    let ratio_only = m.curve.kind == SolutionKind::Kink && m.curve.case == CaseLabel::B;
    let is_breather = m.curve.kind == SolutionKind::Breather;
    let (g_num0, g_den0) = theta_ratio_parts(&m.theta, pts[0].0, pts[0].1)?;
    let (p_num0, p_den0) = theta_products(m, pts[0].0, pts[0].1)?;
    let c_num = g_num0 / p_num0;
    let c_den = g_den0 / p_den0;
    let mut ratio = 0.0_f64;
    let mut num = 0.0_f64;
    let mut den = 0.0_f64;
    let mut conj = 0.0_f64;
    for &(x, t) in pts {
        let (gn, gd) = theta_ratio_parts(&m.theta, x, t)?;
        let (pn, pd) = theta_products(m, x, t)?;
        if gd.norm() < 1e-14 || pd.norm() < 1e-14 {
            return Err(SolutionsError::ThetaZero { x, t });
        }
        ratio = ratio.max(rel_c(gn / gd, pn / pd));
        if !ratio_only {
            num = num.max(rel_c(gn, c_num * pn));
            den = den.max(rel_c(gd, c_den * pd));
        }
        if is_breather {
            conj = conj.max(rel_c(gn, gd.conj()));
        }
    }
    Ok(FactorizationReport {
        ratio,
        num: (!ratio_only).then_some(num),
        den: (!ratio_only).then_some(den),
        num_constant: (!ratio_only).then_some((c_num.re, c_num.im)),
        den_constant: (!ratio_only).then_some((c_den.re, c_den.im)),
        conjugation: is_breather.then_some(conj),
    })
}

// ---------------------------------------------------------------------------
// Static profiles and chain identities
// ---------------------------------------------------------------------------

/// Static profile kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticKind {
    Kink,
    BreatherA,
    BreatherB,
}

/// Sign choice in the reciprocal static-breather argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticSign {
    Plus,
    Minus,
}

/// Static solutions of the field equation.
///
/// * `Kink`: `4 atan[ sqrt(k') sc(x / (1 - k'); k) ]`, unwrapped through the
///   `sc` poles.
/// * `BreatherB`: `4 atan[ sqrt(k') nd(x / (1 + k'); k) ]`.
/// * `BreatherA`: the reciprocal form evaluated in the regime where it is
///   real: with `k1 = 1/k > 1`,
///   `4 atan[ sqrt(k') nc((k1 ± sqrt(k1^2 - 1)) x; modulus k1) ]`;
///   the `Minus` branch coincides with the static `BreatherB` profile, the
///   `Plus` branch is the complementary chain profile.
pub fn eval_static(kind: StaticKind, sign: StaticSign, k: f64, x: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) || !k.is_finite() {
        return Err(SolutionsError::ParamOutOfRange(format!(
            "static modulus must lie in (0, 1), got {k}"
        )));
    }
    let kp = (1.0 - k * k).sqrt();
    match kind {
        StaticKind::Kink => {
            let u = x / (1.0 - kp);
            let (s, c, _) = elliptic::jacobi_sn_cn_dn(u, k * k)?;
            let quarter = elliptic::complete_k(k * k)?;
            Ok(4.0 * (kp.sqrt() * s / c).atan() + 4.0 * PI * kink_winding(u, quarter))
        }
        StaticKind::BreatherB => {
            let u = x / (1.0 + kp);
            let (_, _, d) = elliptic::jacobi_sn_cn_dn(u, k * k)?;
            Ok(4.0 * (kp.sqrt() / d).atan())
        }
        StaticKind::BreatherA => {
            let k1 = 1.0 / k;
            let s = (k1 * k1 - 1.0).sqrt();
            let a = match sign {
                StaticSign::Plus => k1 + s,
                StaticSign::Minus => k1 - s,
            };
            let (_, c, _) = elliptic::jacobi_sn_cn_dn(a * x, k1 * k1)?;
            Ok(4.0 * (kp.sqrt() / c).atan())
        }
    }
}

/// Defects of the two reciprocal chain identities at modulus `k` over the
/// sample abscissas: the static kink equals its `sd` reciprocal form, and the
/// reciprocal static breather (`Minus` branch) equals the static `BreatherB`.
pub fn chain_defects(k: f64, xs: &[f64]) -> Result<[f64; 2]> {
    if !(k > 0.0 && k < 1.0) {
        return Err(SolutionsError::ParamOutOfRange(format!(
            "chain modulus must lie in (0, 1), got {k}"
        )));
    }
    let kp = (1.0 - k * k).sqrt();
    let mut d_kink = 0.0_f64;
    let mut d_breather = 0.0_f64;
    for &x in xs {
        // sc form vs sd reciprocal form (equal arguments of the arctangent).
        let u = x / (1.0 - kp);
        let lhs = {
            let (s, c, _) = elliptic::jacobi_sn_cn_dn(u, k * k)?;
            4.0 * (kp.sqrt() * s / c).atan()
        };
        let rhs = {
            let (s, _, d) = elliptic::jacobi_sn_cn_dn(k * u, 1.0 / (k * k))?;
            4.0 * ((kp.sqrt() / k) * s / d).atan()
        };
        d_kink = d_kink.max((lhs - rhs).abs());
        let lhs_b = eval_static(StaticKind::BreatherB, StaticSign::Minus, k, x)?;
        let rhs_b = eval_static(StaticKind::BreatherA, StaticSign::Minus, k, x)?;
        d_breather = d_breather.max((lhs_b - rhs_b).abs());
    }
    Ok([d_kink, d_breather])
}

// ---------------------------------------------------------------------------
// Kink time-shift equivalence
// ---------------------------------------------------------------------------

/// Result of the kink-relabelling equivalence check: the two labellings of
/// one branch-point set produce the same field up to a quarter-period shift
/// of the temporal argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeShiftReport {
    /// Temporal shift applied to the standard-labelled field.
    pub shift: f64,
    /// Max pointwise difference over the sample grid.
    pub max_defect: f64,
}

/// Verify `q_nested(x, t) = q_standard(x, t + shift)` with
/// `shift = K(complementary temporal parameter) / beta`.
pub fn time_shift_equivalence(
    model_a: &SolutionModel,
    model_b: &SolutionModel,
) -> Result<TimeShiftReport> {
    expect_family(model_a, SolutionKind::Kink, CaseLabel::A)?;
    expect_family(model_b, SolutionKind::Kink, CaseLabel::B)?;
    let mut worst = 0.0_f64;
    for (pa, pb) in model_a
        .curve
        .points
        .iter()
        .zip(model_b.curve.points.iter())
    {
        worst = worst.max((pa - pb).norm() / pb.norm().max(1e-300));
    }
    if worst > 1e-10 {
        return Err(SolutionsError::SpectraMismatch(format!(
            "branch points differ by relative {worst:.3e}"
        )));
    }
    let shift = elliptic::complete_k(1.0 - model_b.k2 * model_b.k2)? / model_b.beta;
    let mut max_defect = 0.0_f64;
    let n = 5;
    for i in 0..n {
        for j in 0..n {
            let x = -1.0 + 2.0 * (i as f64) / ((n - 1) as f64);
            let t = -1.0 + 2.0 * (j as f64) / ((n - 1) as f64);
            let qb = eval_kink_b(model_b, x, t)?;
            let qa = eval_kink_a(model_a, x, t + shift)?;
            max_defect = max_defect.max((qb - qa).abs());
        }
    }
    Ok(TimeShiftReport { shift, max_defect })
}

// ---------------------------------------------------------------------------
// Field grids and the equation residual
// ---------------------------------------------------------------------------

/// Which evaluation route fills a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalRoute {
    Closed,
    Theta,
}

/// Rectangular sampling specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nx: usize,
    pub nt: usize,
}

impl GridSpec {
    /// Centered square grid with `n` points per side and spacing `h`.
    pub fn centered(n: usize, h: f64) -> Self {
        let half = 0.5 * ((n - 1) as f64) * h;
        GridSpec {
            x_min: -half,
            x_max: half,
            t_min: -half,
            t_max: half,
            nx: n,
            nt: n,
        }
    }
}

/// A sampled field, row-major over `x` then `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// `values[ix * ts.len() + it]`
    pub values: Vec<f64>,
}

impl FieldGrid {
    /// CSV export with header `x,t,u`, 17 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 64 + 8);
        out.push_str("x,t,u\n");
        for (ix, &x) in self.xs.iter().enumerate() {
            for (it, &t) in self.ts.iter().enumerate() {
                let u = self.values[ix * self.ts.len() + it];
                out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", x, t, u));
            }
        }
        out
    }
}

/// Sample a model over a grid. Kink fields are unwrapped along each spatial
/// line so the finite-difference stencil sees a continuous profile.
pub fn sample_grid(m: &SolutionModel, route: EvalRoute, grid: &GridSpec) -> Result<FieldGrid> {
    if grid.nx < 2 || grid.nt < 2 {
        return Err(SolutionsError::GridTooCoarse(
            "need at least 2 points per axis".into(),
        ));
    }
    let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * (i as f64) / ((n - 1) as f64))
            .collect()
    };
    let xs = lin(grid.x_min, grid.x_max, grid.nx);
    let ts = lin(grid.t_min, grid.t_max, grid.nt);
    let mut values = vec![0.0_f64; grid.nx * grid.nt];
    for (ix, &x) in xs.iter().enumerate() {
        for (it, &t) in ts.iter().enumerate() {
            values[ix * grid.nt + it] = match route {
                EvalRoute::Closed => eval(m, x, t)?,
                EvalRoute::Theta => eval_theta_representation(&m.theta, x, t)?,
            };
        }
    }
    if m.curve.kind == SolutionKind::Kink {
        // Unwrap in 4 pi steps along x for each fixed t.
        for it in 0..grid.nt {
            for ix in 1..grid.nx {
                let prev = values[(ix - 1) * grid.nt + it];
                let cur = values[ix * grid.nt + it];
                let n = ((cur - prev) / (4.0 * PI)).round();
                values[ix * grid.nt + it] = cur - 4.0 * PI * n;
            }
        }
    }
    Ok(FieldGrid { xs, ts, values })
}

/// Residual report of the field equation on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Max absolute residual over interior points.
    pub max: f64,
    /// Root-mean-square residual over interior points.
    pub l2: f64,
    /// Location of the max residual.
    pub at: (f64, f64),
}

/// Residual of `u_tt - u_xx + sin u` on interior points of a uniform grid,
/// using 4th-order central differences.
pub fn pde_residual(grid: &FieldGrid) -> Result<ResidualReport> {
    let nx = grid.xs.len();
    let nt = grid.ts.len();
    if nx < 5 || nt < 5 {
        return Err(SolutionsError::GridTooCoarse(format!(
            "4th-order stencil needs at least 5x5 points, got {nx}x{nt}"
        )));
    }
    let hx = grid.xs[1] - grid.xs[0];
    let ht = grid.ts[1] - grid.ts[0];
    for w in grid.xs.windows(2) {
        if ((w[1] - w[0]) - hx).abs() > 1e-9 * hx.abs() {
            return Err(SolutionsError::GridTooCoarse("non-uniform x spacing".into()));
        }
    }
    for w in grid.ts.windows(2) {
        if ((w[1] - w[0]) - ht).abs() > 1e-9 * ht.abs() {
            return Err(SolutionsError::GridTooCoarse("non-uniform t spacing".into()));
        }
    }
    let v = |ix: usize, it: usize| grid.values[ix * nt + it];
    let mut max = 0.0_f64;
    let mut at = (grid.xs[2], grid.ts[2]);
    let mut sum_sq = 0.0_f64;
    let mut count = 0_usize;
    for ix in 2..nx - 2 {
        for it in 2..nt - 2 {
            let d2x = (-v(ix + 2, it) + 16.0 * v(ix + 1, it) - 30.0 * v(ix, it)
                + 16.0 * v(ix - 1, it)
                - v(ix - 2, it))
                / (12.0 * hx * hx);
            let d2t = (-v(ix, it + 2) + 16.0 * v(ix, it + 1) - 30.0 * v(ix, it)
                + 16.0 * v(ix, it - 1)
                - v(ix, it - 2))
                / (12.0 * ht * ht);
            let res = (d2t - d2x + v(ix, it).sin()).abs();
            if res > max {
                max = res;
                at = (grid.xs[ix], grid.ts[it]);
            }
            sum_sq += res * res;
            count += 1;
        }
    }
    Ok(ResidualReport {
        max,
        l2: (sum_sq / count as f64).sqrt(),
        at,
    })
}

/// Difference of two field values wrapped to the nearest multiple of `4 pi`,
/// for comparing representations that may differ by full winding periods.
pub fn wrap_defect(a: f64, b: f64) -> f64 {
    let d = a - b;
    (d - 4.0 * PI * (d / (4.0 * PI)).round()).abs()
}
