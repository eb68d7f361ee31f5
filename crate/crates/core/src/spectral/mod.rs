//! Spectral data of `H₀` and the classification of modular inverse-problem
//! solutions with pure point spectrum.
//!
//! A datum is a sequence of eigenvalue/multiplicity pairs `(μ_k, m_k)`: a
//! finite head, optionally followed by a geometric tail
//! `μ = start · ratio^j`, `j ≥ 0`, each with multiplicity `mult`. Data are
//! always stored normalized to `Σ m_k μ_k = 1`.

mod classes;
mod crosscheck;
mod ratios;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use classes::{
    enumerate_classes, equivalent, permute_multiplicities, second_class_exists, shift_multiplicity, EnumerationBounds,
};
pub use crosscheck::{cross_check_finite, CrossCheckEntry, CrossCheckReport, MAX_CROSS_CHECK_DIM};
pub use ratios::{delta_spectrum, is_admissible, AdmissibilityReport, Clause};

/// Relative tolerance for comparing eigenvalues and ratios.
pub const RATIO_TOL: f64 = 1e-9;

/// Tolerance on `Σ m_k μ_k = 1` and on integrality of type I multiplicities.
pub const NORMALIZATION_TOL: f64 = 1e-9;

pub(crate) fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RATIO_TOL * a.abs().max(b.abs())
}

pub(crate) fn is_integral(x: f64) -> bool {
    (x - x.round()).abs() <= NORMALIZATION_TOL * x.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FactorType {
    #[serde(rename = "TypeI_finite")]
    TypeIFinite,
    #[serde(rename = "TypeI_inf")]
    TypeIInf,
    #[serde(rename = "TypeII_1")]
    TypeII1,
    #[serde(rename = "TypeII_inf")]
    TypeIIInf,
}

impl FactorType {
    pub fn is_type_i(self) -> bool {
        matches!(self, Self::TypeIFinite | Self::TypeIInf)
    }

    /// `tr(Id) = ∞`.
    pub fn is_infinite(self) -> bool {
        matches!(self, Self::TypeIInf | Self::TypeIIInf)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TypeIFinite => "TypeI_finite",
            Self::TypeIInf => "TypeI_inf",
            Self::TypeII1 => "TypeII_1",
            Self::TypeIIInf => "TypeII_inf",
        }
    }
}

impl std::str::FromStr for FactorType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "TypeI_finite" => Ok(Self::TypeIFinite),
            "TypeI_inf" => Ok(Self::TypeIInf),
            "TypeII_1" => Ok(Self::TypeII1),
            "TypeII_inf" => Ok(Self::TypeIIInf),
            other => Err(Error::InvalidSpectralData(format!("unknown factor type {other:?}"))),
        }
    }
}

/// Eigenvalues `start · ratio^j` (`j = 0, 1, …`), each with multiplicity `mult`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    pub ratio: f64,
    pub mult: f64,
    pub start: f64,
}

impl GeometricTail {
    pub fn term(&self, j: usize) -> f64 {
        self.start * self.ratio.powi(j as i32)
    }

    /// `Σ_j mult · start · ratio^j`.
    pub fn weight(&self) -> f64 {
        self.mult * self.start / (1.0 - self.ratio)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    factor_type: FactorType,
    head: Vec<(f64, f64)>,
    tail: Option<GeometricTail>,
}

impl SpectralData {
    /// Validates and stores an already normalized datum.
    ///
    /// Head entries are sorted by decreasing `μ`; entries with equal `μ` are
    /// merged by adding their multiplicities.
    pub fn new(factor_type: FactorType, head: Vec<(f64, f64)>, tail: Option<GeometricTail>) -> Result<Self> {
        let s = Self::build(factor_type, head, tail)?;
        let w = s.total_weight();
        if (w - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidSpectralData(format!("Σ m_k μ_k = {w}, expected 1")));
        }
        Ok(s)
    }

    /// Like [`Self::new`] but rescales all `μ` so that `Σ m_k μ_k = 1`.
    pub fn normalized(factor_type: FactorType, head: Vec<(f64, f64)>, tail: Option<GeometricTail>) -> Result<Self> {
        let mut s = Self::build(factor_type, head, tail)?;
        let c = 1.0 / s.total_weight();
        s.scale_in_place(c);
        Ok(s)
    }

    fn build(factor_type: FactorType, mut head: Vec<(f64, f64)>, tail: Option<GeometricTail>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidSpectralData(msg));
        if head.is_empty() && tail.is_none() {
            return invalid("empty spectrum".into());
        }
        for &(mu, m) in &head {
            if !(mu.is_finite() && mu > 0.0) {
                return invalid(format!("eigenvalue {mu} must be positive"));
            }
            if !(m.is_finite() && m > 0.0) {
                return invalid(format!("multiplicity {m} must be positive"));
            }
        }
        head.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(head.len());
        for (mu, m) in head {
            match merged.last_mut() {
                Some(last) if close(last.0, mu) => last.1 += m,
                _ => merged.push((mu, m)),
            }
        }
        if let Some(t) = &tail {
            if !(t.ratio > 0.0 && t.ratio < 1.0) {
                return invalid(format!("tail ratio {} must lie in (0, 1)", t.ratio));
            }
            if !(t.mult.is_finite() && t.mult > 0.0) {
                return invalid(format!("tail multiplicity {} must be positive", t.mult));
            }
            if !(t.start.is_finite() && t.start > 0.0) {
                return invalid(format!("tail start {} must be positive", t.start));
            }
            if let Some(&(last, _)) = merged.last() {
                if !(t.start < last) || close(t.start, last) {
                    return invalid(format!("tail start {} must lie below the head minimum {last}", t.start));
                }
            }
            if !factor_type.is_infinite() {
                return invalid(format!("{} data cannot carry an infinite tail", factor_type.name()));
            }
        }
        if factor_type.is_type_i() {
            let mults = merged.iter().map(|e| e.1).chain(tail.iter().map(|t| t.mult));
            if let Some(bad) = mults.into_iter().find(|&m| !is_integral(m)) {
                return invalid(format!("type I multiplicity {bad} is not an integer"));
            }
        }
        Ok(Self { factor_type, head: merged, tail })
    }

    fn scale_in_place(&mut self, c: f64) {
        self.head.iter_mut().for_each(|e| e.0 *= c);
        if let Some(t) = &mut self.tail {
            t.start *= c;
        }
    }

    pub fn factor_type(&self) -> FactorType {
        self.factor_type
    }

    pub fn head(&self) -> &[(f64, f64)] {
        &self.head
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    /// `Σ m_k μ_k`, with the tail summed in closed form.
    pub fn total_weight(&self) -> f64 {
        self.head.iter().map(|&(mu, m)| mu * m).sum::<f64>() + self.tail.map_or(0.0, |t| t.weight())
    }

    /// `Σ m_k`, or `None` when it diverges.
    pub fn multiplicity_sum(&self) -> Option<f64> {
        match self.tail {
            Some(_) => None,
            None => Some(self.head.iter().map(|e| e.1).sum()),
        }
    }

    /// `Σ m_k / μ_k`, i.e. `tr(H₀⁻¹)`, or `None` when it diverges. A geometric
    /// tail always diverges here: its terms grow like `ratio^{-j}`.
    pub fn inverse_weight(&self) -> Option<f64> {
        match self.tail {
            Some(_) => None,
            None => Some(self.head.iter().map(|&(mu, m)| m / mu).sum()),
        }
    }

    /// Whether `0` lies in the spectrum of `H` (eigenvalues accumulate at 0).
    pub fn zero_in_spectrum(&self) -> bool {
        self.tail.is_some()
    }

    /// Largest eigenvalue.
    pub fn top(&self) -> f64 {
        self.head.first().map(|e| e.0).or(self.tail.map(|t| t.start)).expect("non-empty")
    }

    /// The head followed by the first `cutoff` tail terms.
    pub fn expanded(&self, cutoff: usize) -> Vec<(f64, f64)> {
        let mut out = self.head.clone();
        if let Some(t) = &self.tail {
            out.extend((0..cutoff).map(|j| (t.term(j), t.mult)));
        }
        out
    }

    /// Multiply every `μ` by `c > 0` and renormalize.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSpectralData(format!("scale {c} must be positive")));
        }
        let mut raw = self.clone();
        raw.scale_in_place(c);
        Self::normalized(raw.factor_type, raw.head, raw.tail)
    }

    /// Representation with as many trailing head entries as possible moved
    /// into the tail; two data describe the same sequence iff their canonical
    /// forms agree.
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        if let Some(t) = &mut out.tail {
            while let Some(&(mu, m)) = out.head.last() {
                if close(m, t.mult) && close(mu * t.ratio, t.start) {
                    t.start = mu;
                    out.head.pop();
                } else {
                    break;
                }
            }
        }
        out
    }
}

/// Multiplicity `n_j` of an eigenvalue of `Δ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplicity {
    Finite(f64),
    Infinite,
}

impl Multiplicity {
    pub fn matches(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Infinite, Self::Infinite) => true,
            (Self::Finite(a), Self::Finite(b)) => (a - b).abs() <= NORMALIZATION_TOL * a.abs().max(b.abs()).max(1.0),
            _ => false,
        }
    }
}

impl std::fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => serializer.serialize_f64(*x),
            Self::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(x) if x.is_finite() && x > 0.0 => Ok(Self::Finite(x)),
            Raw::Num(x) => Err(serde::de::Error::custom(format!("multiplicity {x} must be positive"))),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => Ok(Self::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unknown multiplicity {t:?}"))),
        }
    }
}

/// Exponent lattice `{base^z : z ∈ ℤ}` with a common multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub base: f64,
    pub mult: Multiplicity,
}

impl Lattice {
    /// Integer exponent of `lambda`, if it lies on the lattice.
    pub fn exponent(&self, lambda: f64) -> Option<i64> {
        let z = lambda.ln() / self.base.ln();
        let r = z.round();
        ((z - r).abs() <= RATIO_TOL * r.abs().max(1.0)).then_some(r as i64)
    }
}

/// Spectrum of `Δ₀`: eigenvalues with multiplicities.
///
/// Either an explicit finite list or an exponent lattice. `window`, when set,
/// bounds `|ln λ|` of the region in which the list is exact (data expanded
/// only up to a cutoff).
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSpectrum {
    entries: Vec<(f64, Multiplicity)>,
    lattice: Option<Lattice>,
    window: Option<f64>,
}

impl DeltaSpectrum {
    /// Finite spectrum; must contain `1` and be closed under `λ ↦ 1/λ` with
    /// equal multiplicities.
    pub fn from_entries(mut entries: Vec<(f64, Multiplicity)>) -> Result<Self> {
        if entries.iter().any(|e| !(e.0.is_finite() && e.0 > 0.0)) {
            return Err(Error::InvalidSpectralData("eigenvalues of Δ must be positive".into()));
        }
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        if entries.windows(2).any(|w| close(w[0].0, w[1].0)) {
            return Err(Error::InvalidSpectralData("duplicate eigenvalue".into()));
        }
        let s = Self { entries, lattice: None, window: None };
        s.check_symmetry()?;
        Ok(s)
    }

    pub(crate) fn truncated(entries: Vec<(f64, Multiplicity)>, window: Option<f64>) -> Self {
        Self { entries, lattice: None, window }
    }

    pub fn lattice(base: f64, mult: Multiplicity) -> Result<Self> {
        if !(base.is_finite() && base > 1.0) {
            return Err(Error::InvalidSpectralData(format!("lattice base {base} must exceed 1")));
        }
        Ok(Self { entries: Vec::new(), lattice: Some(Lattice { base, mult }), window: None })
    }

    fn check_symmetry(&self) -> Result<()> {
        if !self.entries.iter().any(|e| close(e.0, 1.0)) {
            return Err(Error::InvalidSpectralData("spectrum of Δ must contain 1".into()));
        }
        for &(lambda, n) in &self.entries {
            match self.lookup(1.0 / lambda) {
                Some(m) if m.matches(&n) => {}
                _ => {
                    return Err(Error::InvalidSpectralData(format!(
                        "eigenvalue {lambda} has no inverse partner with multiplicity {n}"
                    )))
                }
            }
        }
        Ok(())
    }

    fn lookup(&self, lambda: f64) -> Option<Multiplicity> {
        self.entries.iter().find(|e| close(e.0, lambda)).map(|e| e.1)
    }

    /// Multiplicity of `lambda`, `None` if it is not an eigenvalue.
    pub fn multiplicity(&self, lambda: f64) -> Option<Multiplicity> {
        match &self.lattice {
            Some(l) => l.exponent(lambda).map(|_| l.mult),
            None => self.lookup(lambda),
        }
    }

    pub fn entries(&self) -> &[(f64, Multiplicity)] {
        &self.entries
    }

    pub fn lattice_spec(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    /// Bound on `|ln λ|` within which the listing is exact; `None` = complete.
    pub fn window(&self) -> Option<f64> {
        self.window
    }

    /// Eigenvalues `λ ≤ 1` in decreasing order: the candidate `μ_k / μ_max`.
    pub fn ratio_grid(&self) -> Vec<f64> {
        let mut g: Vec<f64> = self.entries.iter().map(|e| e.0).filter(|&l| l <= 1.0 + RATIO_TOL).collect();
        g.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_constants_normalize() {
        let c1 = 9.0 / 10.0;
        let tail = GeometricTail { ratio: 0.1, mult: 1.0, start: c1 };
        assert!(SpectralData::new(FactorType::TypeIIInf, vec![], Some(tail)).is_ok());
        let c2 = 99.0 / 109.0;
        let tail = GeometricTail { ratio: 0.01, mult: 1.0, start: 0.1 * c2 };
        assert!(SpectralData::new(FactorType::TypeIIInf, vec![(c2, 1.0)], Some(tail)).is_ok());
    }

    #[test]
    fn validation_errors() {
        let bad = |h: Vec<(f64, f64)>, t: Option<GeometricTail>, ft| SpectralData::normalized(ft, h, t).is_err();
        assert!(bad(vec![], None, FactorType::TypeIFinite));
        assert!(bad(vec![(0.0, 1.0)], None, FactorType::TypeIFinite));
        assert!(bad(vec![(1.0, -1.0)], None, FactorType::TypeII1));
        assert!(bad(vec![(1.0, 1.5)], None, FactorType::TypeIFinite));
        let tail = GeometricTail { ratio: 0.5, mult: 1.0, start: 0.1 };
        assert!(bad(vec![(1.0, 1.0)], Some(tail), FactorType::TypeIFinite));
        assert!(bad(vec![(0.05, 1.0)], Some(tail), FactorType::TypeIIInf));
        let tail = GeometricTail { ratio: 1.5, mult: 1.0, start: 0.1 };
        assert!(bad(vec![(1.0, 1.0)], Some(tail), FactorType::TypeIIInf));
        assert!(SpectralData::new(FactorType::TypeIFinite, vec![(0.5, 1.0)], None).is_err());
    }

    #[test]
    fn equal_eigenvalues_merge() {
        let s = SpectralData::new(FactorType::TypeII1, vec![(0.5, 1.0), (0.5, 1.0)], None).unwrap();
        assert_eq!(s.head(), &[(0.5, 2.0)]);
        assert_eq!(s.inverse_weight(), Some(4.0));
    }

    #[test]
    fn canonical_absorbs_matching_head() {
        let tail = GeometricTail { ratio: 0.1, mult: 1.0, start: 0.01 };
        let s = SpectralData::normalized(FactorType::TypeIIInf, vec![(1.0, 1.0), (0.1, 1.0)], Some(tail)).unwrap();
        let c = s.canonical();
        assert!(c.head().is_empty());
        assert!(close(c.tail().unwrap().start, s.top()));
        assert!(s.zero_in_spectrum());
    }

    #[test]
    fn delta_spectrum_entries_validate_symmetry() {
        use Multiplicity::Finite;
        assert!(DeltaSpectrum::from_entries(vec![(0.5, Finite(1.0)), (1.0, Finite(2.0)), (2.0, Finite(1.0))]).is_ok());
        assert!(DeltaSpectrum::from_entries(vec![(0.5, Finite(1.0)), (1.0, Finite(2.0))]).is_err());
        assert!(DeltaSpectrum::from_entries(vec![(2.0, Finite(1.0)), (0.5, Finite(3.0)), (1.0, Finite(1.0))]).is_err());
        assert!(DeltaSpectrum::from_entries(vec![(2.0, Finite(1.0)), (0.5, Finite(1.0))]).is_err());
    }

    #[test]
    fn multiplicity_serde() {
        let m: Multiplicity = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(m, Multiplicity::Infinite);
        let m: Multiplicity = serde_json::from_str("3").unwrap();
        assert_eq!(m, Multiplicity::Finite(3.0));
        assert_eq!(serde_json::to_string(&Multiplicity::Infinite).unwrap(), "\"inf\"");
        assert!(serde_json::from_str::<Multiplicity>("-1").is_err());
    }

    #[test]
    fn lattice_exponents() {
        let l = Lattice { base: 10.0, mult: Multiplicity::Infinite };
        assert_eq!(l.exponent(1000.0), Some(3));
        assert_eq!(l.exponent(1e-7), Some(-7));
        assert_eq!(l.exponent(2.0), None);
    }
}
