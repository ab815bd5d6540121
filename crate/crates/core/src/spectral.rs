//! Spectral curves for the two-phase separable field families.
//!
//! A curve is determined by four discrete branch points `E_1..E_4` that are
//! closed under the energy involution `E -> 1/(256 E)`; together with the
//! continuum branch points `{0, infinity}` they define the genus-2 surface
//! `R^2(E) = E (E - E_1)(E - E_2)(E - E_3)(E - E_4)`.
//!
//! Two labellings ("case A" and "case B") encode which homology basis the
//! period construction uses. For kinks the two labellings describe the same
//! four real points through a parameter bijection; for breathers they are
//! genuinely different spectra (conjugate pairs off the circle vs. on the
//! circle `|E| = 1/16`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scale constant of the energy involution: `involution(E) = SPECTRAL_SCALE / E`.
pub const SPECTRAL_SCALE: f64 = 1.0 / 256.0;

/// The energy involution `E -> 1/(256 E)` that the discrete spectrum respects.
pub fn involution(e: Complex64) -> Complex64 {
    Complex64::new(SPECTRAL_SCALE, 0.0) / e
}

/// Errors from spectrum construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// A constructor parameter violates its open-interval constraint.
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    /// Two branch points coincide (the curve degenerates to lower genus).
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    /// The two branch cuts of a kink spectrum touch or overlap.
    #[error("branch cuts overlap: inner pair reaches {reach:.6} >= limit {limit:.6}")]
    CutsOverlap { reach: f64, limit: f64 },
    /// The involution and the half-sum map are singular at zero energy.
    #[error("zero energy is a branch point of the continuum; the map is singular there")]
    ZeroEnergy,
    /// An operation that needs a specific family was given another.
    #[error("curve family mismatch: {0}")]
    CaseMismatch(String),
}

type Result<T> = std::result::Result<T, SpectralError>;

/// Which homology labelling the curve carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseLabel {
    A,
    B,
}

/// Whether the spectrum belongs to a kink (real negative branch points) or a
/// breather (complex-conjugate pairs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Kink,
    Breather,
}

/// Constructor parameters, preserved for serialization and for the
/// kink relabelling bijection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveParams {
    KinkA { r: f64, eta: f64 },
    BreatherA { r: f64, phi: f64 },
    KinkB { eta1: f64, eta2: f64 },
    BreatherB { phi1: f64, phi2: f64 },
}

/// A genus-2 spectral curve closed under the energy involution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub case: CaseLabel,
    pub kind: SolutionKind,
    pub params: CurveParams,
    /// Discrete branch points ordered `E_1, E_2, E_3, E_4`.
    pub points: [Complex64; 4],
}

#[derive(Serialize, Deserialize)]
struct CurveRecord {
    case: CaseLabel,
    kind: SolutionKind,
    params: CurveParams,
    points: [[f64; 2]; 4],
}

impl Serialize for SpectralCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveRecord {
            case: self.case,
            kind: self.kind,
            params: self.params,
            points: self.points.map(|p| [p.re, p.im]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = CurveRecord::deserialize(d)?;
        Ok(SpectralCurve {
            case: rec.case,
            kind: rec.kind,
            params: rec.params,
            points: rec.points.map(|p| Complex64::new(p[0], p[1])),
        })
    }
}

/// Case-A kink spectrum: four real negative points
/// `{-r e^{-eta}, -r e^{eta}, -(1/(256 r)) e^{-eta}, -(1/(256 r)) e^{eta}}`
/// with the two involution-paired cuts disjoint.
pub fn make_case_a_kink(r: f64, eta: f64) -> Result<SpectralCurve> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(SpectralError::ParamOutOfRange(format!("r = {r} must be > 0")));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        if eta == 0.0 {
            return Err(SpectralError::DegenerateSpectrum(
                "eta = 0 collapses each cut to a point".into(),
            ));
        }
        return Err(SpectralError::ParamOutOfRange(format!("eta = {eta} must be > 0")));
    }
    let reach = r * eta.exp(); // rightmost extent of the inner pair (in |E|)
    let limit = 1.0 / 16.0; // cuts meet when the pair reaches the involution circle
    if reach >= limit {
        return Err(SpectralError::CutsOverlap { reach, limit });
    }
    let inv = 1.0 / (256.0 * r);
    let points = [
        Complex64::new(-r * (-eta).exp(), 0.0),
        Complex64::new(-r * eta.exp(), 0.0),
        Complex64::new(-inv * (-eta).exp(), 0.0),
        Complex64::new(-inv * eta.exp(), 0.0),
    ];
    Ok(SpectralCurve {
        case: CaseLabel::A,
        kind: SolutionKind::Kink,
        params: CurveParams::KinkA { r, eta },
        points,
    })
}

/// Case-A breather spectrum: conjugate pair at radius `r < 1/16` plus its
/// involution image at radius `1/(256 r) > 1/16`.
pub fn make_case_a_breather(r: f64, phi: f64) -> Result<SpectralCurve> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(SpectralError::ParamOutOfRange(format!("r = {r} must be > 0")));
    }
    if r == 1.0 / 16.0 {
        return Err(SpectralError::DegenerateSpectrum(
            "r = 1/16 merges the pair with its involution image".into(),
        ));
    }
    if r > 1.0 / 16.0 {
        return Err(SpectralError::ParamOutOfRange(format!(
            "r = {r} must be < 1/16"
        )));
    }
    if !(phi > 0.0 && phi < std::f64::consts::PI) {
        return Err(SpectralError::ParamOutOfRange(format!(
            "phi = {phi} must lie in (0, pi)"
        )));
    }
    let inv = 1.0 / (256.0 * r);
    let e1 = Complex64::from_polar(r, phi);
    let e3 = Complex64::from_polar(inv, phi);
    Ok(SpectralCurve {
        case: CaseLabel::A,
        kind: SolutionKind::Breather,
        params: CurveParams::BreatherA { r, phi },
        points: [e1, e1.conj(), e3, e3.conj()],
    })
}

/// Case-B kink spectrum: nested real negative pairs
/// `-(1/16) e^{-eta_1} , -(1/16) e^{-eta_2}, -(1/16) e^{eta_2}, -(1/16) e^{eta_1}`
/// with `eta_1 > eta_2 > 0`.
pub fn make_case_b_kink(eta1: f64, eta2: f64) -> Result<SpectralCurve> {
    if !(eta2 > 0.0) || !(eta1.is_finite() && eta2.is_finite()) {
        return Err(SpectralError::ParamOutOfRange(format!(
            "eta1 = {eta1}, eta2 = {eta2}: need eta1 > eta2 > 0"
        )));
    }
    if eta1 == eta2 {
        return Err(SpectralError::DegenerateSpectrum(
            "eta1 = eta2 merges the nested pairs".into(),
        ));
    }
    if eta1 < eta2 {
        return Err(SpectralError::ParamOutOfRange(format!(
            "eta1 = {eta1} must exceed eta2 = {eta2}"
        )));
    }
    let s = 1.0 / 16.0;
    let points = [
        Complex64::new(-s * (-eta1).exp(), 0.0),
        Complex64::new(-s * (-eta2).exp(), 0.0),
        Complex64::new(-s * eta2.exp(), 0.0),
        Complex64::new(-s * eta1.exp(), 0.0),
    ];
    Ok(SpectralCurve {
        case: CaseLabel::B,
        kind: SolutionKind::Kink,
        params: CurveParams::KinkB { eta1, eta2 },
        points,
    })
}

/// Case-B breather spectrum: two conjugate pairs on the involution circle
/// `|E| = 1/16` at angles `0 < phi_1 < phi_2 < pi`.
pub fn make_case_b_breather(phi1: f64, phi2: f64) -> Result<SpectralCurve> {
    let pi = std::f64::consts::PI;
    if !(phi1 > 0.0 && phi2 < pi) {
        return Err(SpectralError::ParamOutOfRange(format!(
            "phi1 = {phi1}, phi2 = {phi2}: need 0 < phi1 < phi2 < pi"
        )));
    }
    if phi1 == phi2 {
        return Err(SpectralError::DegenerateSpectrum(
            "phi1 = phi2 merges the two circle pairs".into(),
        ));
    }
    if phi1 > phi2 {
        return Err(SpectralError::ParamOutOfRange(format!(
            "phi1 = {phi1} must be below phi2 = {phi2}"
        )));
    }
    let s = 1.0 / 16.0;
    let e1 = Complex64::from_polar(s, phi1);
    let e2 = Complex64::from_polar(s, phi2);
    Ok(SpectralCurve {
        case: CaseLabel::B,
        kind: SolutionKind::Breather,
        params: CurveParams::BreatherB { phi1, phi2 },
        points: [e1, e2, e2.conj(), e1.conj()],
    })
}

/// Half-sum of an energy with its involution image:
/// `z(E) = (E + 1/(256 E)) / 2`. Collapses each involution pair of branch
/// points to a single point of the quotient curve.
pub fn z_map(e: Complex64) -> Result<Complex64> {
    if e.norm() == 0.0 {
        return Err(SpectralError::ZeroEnergy);
    }
    Ok(0.5 * (e + involution(e)))
}

impl SpectralCurve {
    /// Largest deviation of the branch-point set from its involution image;
    /// zero (to rounding) for every well-formed curve.
    pub fn involution_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for p in self.points {
            let image = involution(p);
            let nearest = self
                .points
                .iter()
                .map(|q| (q - image).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
        worst
    }

    /// The two quotient-curve branch points `z_1 = z(E_1)`, `z_2 = z(E_2)`
    /// obtained by collapsing the involution pairs `(E_1, E_4)` and `(E_2, E_3)`.
    pub fn z_pair(&self) -> (Complex64, Complex64) {
        let z1 = 0.5 * (self.points[0] + self.points[3]);
        let z2 = 0.5 * (self.points[1] + self.points[2]);
        (z1, z2)
    }

    /// For a case-B kink, the case-A parameters describing the same four
    /// points: `r = (1/16) e^{-(eta1+eta2)/2}`, `eta = (eta1-eta2)/2`.
    pub fn paired_case_a(&self) -> Result<SpectralCurve> {
        match self.params {
            CurveParams::KinkB { eta1, eta2 } => {
                let r = (1.0 / 16.0) * (-(eta1 + eta2) / 2.0).exp();
                let eta = (eta1 - eta2) / 2.0;
                make_case_a_kink(r, eta)
            }
            _ => Err(SpectralError::CaseMismatch(
                "case-A pairing is defined for case-B kinks".into(),
            )),
        }
    }

    /// For a case-A kink, the case-B parameters describing the same four
    /// points: `eta_{1,2} = ln(1/(16 r)) ± eta`.
    pub fn paired_case_b(&self) -> Result<SpectralCurve> {
        match self.params {
            CurveParams::KinkA { r, eta } => {
                let mid = (1.0 / (16.0 * r)).ln();
                make_case_b_kink(mid + eta, mid - eta)
            }
            _ => Err(SpectralError::CaseMismatch(
                "case-B pairing is defined for case-A kinks".into(),
            )),
        }
    }

    /// Serialize to the canonical JSON record
    /// (`case`, `kind`, `params`, `points` as `[re, im]` pairs).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serialization cannot fail")
    }

    /// Parse a curve from the canonical JSON record.
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kink_relabelling_roundtrip() {
        let b = make_case_b_kink(1.0, 0.4).unwrap();
        let a = b.paired_case_a().unwrap();
        for (p, q) in a.points.iter().zip(b.points.iter()) {
            assert!((p - q).norm() < 1e-15);
        }
        let b2 = a.paired_case_b().unwrap();
        match (b.params, b2.params) {
            (CurveParams::KinkB { eta1, eta2 }, CurveParams::KinkB { eta1: f1, eta2: f2 }) => {
                assert!((eta1 - f1).abs() < 1e-14 && (eta2 - f2).abs() < 1e-14);
            }
            _ => panic!("wrong params"),
        }
    }

    #[test]
    fn overlap_detection() {
        // reach = r e^eta hits 1/16 exactly at eta = ln(1/(16 r)).
        let r: f64 = 1.0 / 32.0;
        let eta_crit = (1.0 / (16.0 * r)).ln();
        assert!(make_case_a_kink(r, eta_crit - 1e-6).is_ok());
        assert!(matches!(
            make_case_a_kink(r, eta_crit + 1e-6),
            Err(SpectralError::CutsOverlap { .. })
        ));
    }
}
