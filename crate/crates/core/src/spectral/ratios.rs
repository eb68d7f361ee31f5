use serde::Serialize;

use super::{close, is_integral, DeltaSpectrum, Multiplicity, SpectralData, NORMALIZATION_TOL, RATIO_TOL};
use crate::error::{Error, Result};

/// Spectrum of `Δ₀ = H₀ ⊗ H₀⁻¹` from the data.
///
/// Tails are expanded to `cutoff` terms and the result is restricted to
/// `|ln λ| ≤ (cutoff − 1)·|ln ratio|`, the range in which every ratio is
/// already realized by a pair of expanded terms at least once. Without a
/// tail the spectrum is exact and `cutoff` is ignored.
///
/// For type I, ratios that are integer powers of the tail ratio carry
/// infinite multiplicity (infinitely many tail pairs realize them); all
/// others are finite counts `Σ m_k m_l`. For type II every eigenvalue has
/// infinite multiplicity.
pub fn delta_spectrum(s: &SpectralData, cutoff: usize) -> Result<DeltaSpectrum> {
    let window = match s.tail() {
        Some(t) => {
            if cutoff == 0 {
                return Err(Error::InvalidSpectralData("cutoff must be positive".into()));
            }
            Some((cutoff - 1) as f64 * t.ratio.ln().abs())
        }
        None => None,
    };
    let terms = s.expanded(cutoff);
    let mut ratios: Vec<(f64, f64)> = Vec::with_capacity(terms.len() * terms.len());
    for &(mk, nk) in &terms {
        for &(ml, nl) in &terms {
            let lambda = mk / ml;
            if let Some(w) = window {
                if lambda.ln().abs() > w * (1.0 + RATIO_TOL) + RATIO_TOL {
                    continue;
                }
            }
            ratios.push((lambda, nk * nl));
        }
    }
    ratios.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut grouped: Vec<(f64, f64)> = Vec::new();
    for (lambda, count) in ratios {
        match grouped.last_mut() {
            Some(last) if close(last.0, lambda) => last.1 += count,
            _ => grouped.push((lambda, count)),
        }
    }
    let tail_ratio = s.tail().map(|t| t.ratio);
    let type_i = s.factor_type().is_type_i();
    let entries = grouped
        .into_iter()
        .map(|(lambda, count)| {
            let on_tail_lattice = tail_ratio.is_some_and(|r| is_integral(lambda.ln() / r.ln()));
            let mult = if !type_i || on_tail_lattice { Multiplicity::Infinite } else { Multiplicity::Finite(count) };
            (lambda, mult)
        })
        .collect();
    Ok(DeltaSpectrum::truncated(entries, window))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Set when the verdict only covers the truncated ratio window.
    pub within_cutoff: bool,
    pub window: Option<f64>,
    pub clauses: Vec<Clause>,
}

impl AdmissibilityReport {
    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

fn clause(name: &'static str, failures: Vec<String>) -> Clause {
    let pass = failures.is_empty();
    let detail = if pass { "ok".to_string() } else { failures.join("; ") };
    Clause { name, pass, detail }
}

fn min_window(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn in_window(lambda: f64, window: Option<f64>) -> bool {
    window.is_none_or(|w| lambda.ln().abs() <= w * (1.0 + RATIO_TOL) + RATIO_TOL)
}

/// Checks whether `candidate` solves the inverse problem for `target`.
///
/// Clauses: the ratio set `{μ_k/μ_l}` equals the target eigenvalues, the
/// multiplicity counts match, type I multiplicities are integers, infinite
/// factor types have `Σ m_k = ∞`, and `Σ m_k μ_k = 1`.
pub fn is_admissible(candidate: &SpectralData, target: &DeltaSpectrum, cutoff: usize) -> Result<AdmissibilityReport> {
    let cand = delta_spectrum(candidate, cutoff)?;
    let window = min_window(cand.window(), target.window());
    let visible: Vec<(f64, Multiplicity)> =
        cand.entries().iter().copied().filter(|e| in_window(e.0, window)).collect();

    let mut ratio_failures = Vec::new();
    let mut mult_failures = Vec::new();
    match target.lattice_spec() {
        Some(lattice) => {
            let mut seen = std::collections::BTreeSet::new();
            for &(lambda, n) in &visible {
                match lattice.exponent(lambda) {
                    Some(z) => {
                        seen.insert(z);
                        if !n.matches(&lattice.mult) {
                            mult_failures.push(format!("n({lambda}) = {n}, target {}", lattice.mult));
                        }
                    }
                    None => ratio_failures.push(format!("{lambda} is not a power of {}", lattice.base)),
                }
            }
            match window {
                None => ratio_failures.push("finite ratio set cannot cover an infinite lattice".into()),
                Some(w) => {
                    let zmax = (w / lattice.base.ln() + RATIO_TOL).floor() as i64;
                    let missing: Vec<i64> = (-zmax..=zmax).filter(|z| !seen.contains(z)).collect();
                    if !missing.is_empty() {
                        ratio_failures.push(format!("missing exponents {missing:?} of base {}", lattice.base));
                    }
                }
            }
        }
        None => {
            let wanted: Vec<(f64, Multiplicity)> =
                target.entries().iter().copied().filter(|e| in_window(e.0, window)).collect();
            for &(lambda, n) in &visible {
                match wanted.iter().find(|e| close(e.0, lambda)) {
                    Some(&(_, m)) if !n.matches(&m) => mult_failures.push(format!("n({lambda}) = {n}, target {m}")),
                    Some(_) => {}
                    None => ratio_failures.push(format!("{lambda} is not a target eigenvalue")),
                }
            }
            for &(lambda, _) in &wanted {
                if !visible.iter().any(|e| close(e.0, lambda)) {
                    ratio_failures.push(format!("target eigenvalue {lambda} is not realized"));
                }
            }
        }
    }

    let mut integrality = Vec::new();
    if candidate.factor_type().is_type_i() {
        let mults = candidate.head().iter().map(|e| e.1).chain(candidate.tail().map(|t| t.mult));
        integrality.extend(mults.filter(|&m| !is_integral(m)).map(|m| format!("multiplicity {m} is not an integer")));
    }

    let mut infinite_sum = Vec::new();
    if candidate.factor_type().is_infinite() {
        if let Some(total) = candidate.multiplicity_sum() {
            infinite_sum.push(format!("Σ m_k = {total} is finite"));
        }
    }

    let mut normalization = Vec::new();
    let w = candidate.total_weight();
    if (w - 1.0).abs() > NORMALIZATION_TOL {
        normalization.push(format!("Σ m_k μ_k = {w}"));
    }

    let clauses = vec![
        clause("ratio_set", ratio_failures),
        clause("multiplicities", mult_failures),
        clause("integrality", integrality),
        clause("infinite_sum", infinite_sum),
        clause("normalization", normalization),
    ];
    Ok(AdmissibilityReport {
        admissible: clauses.iter().all(|c| c.pass),
        within_cutoff: window.is_some(),
        window,
        clauses,
    })
}
