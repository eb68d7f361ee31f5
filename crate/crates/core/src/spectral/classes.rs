use serde::{Deserialize, Serialize};

use super::{close, is_admissible, DeltaSpectrum, FactorType, GeometricTail, SpectralData};
use crate::error::{Error, Result};

/// Whether `s1` and `s2` describe the same solution class: same factor type
/// and the same sequence up to one global scale `μ ↦ c μ`.
pub fn equivalent(s1: &SpectralData, s2: &SpectralData) -> bool {
    if s1.factor_type() != s2.factor_type() {
        return false;
    }
    let (a, b) = (s1.canonical(), s2.canonical());
    if a.head().len() != b.head().len() || a.tail().is_some() != b.tail().is_some() {
        return false;
    }
    let c = b.top() / a.top();
    let heads = a.head().iter().zip(b.head()).all(|(x, y)| close(c * x.0, y.0) && close(x.1, y.1));
    let tails = match (a.tail(), b.tail()) {
        (Some(x), Some(y)) => close(x.ratio, y.ratio) && close(x.mult, y.mult) && close(c * x.start, y.start),
        _ => true,
    };
    heads && tails
}

/// Whether the class admits a second, inequivalent solution with
/// `u ∈ 𝔐'u_tr` (equivalently `H₀⁻¹` trace class). This holds iff
/// `Σ m_k / μ_k < ∞`.
pub fn second_class_exists(s: &SpectralData) -> Result<bool> {
    Ok(s.inverse_weight().is_some_and(f64::is_finite))
}

fn head_index(s: &SpectralData, k: usize) -> Result<()> {
    if k >= s.head().len() {
        return Err(Error::IndexOutOfHead { index: k, len: s.head().len() });
    }
    Ok(())
}

/// Swap the multiplicities of head entries `k` and `l` (0-based) and
/// renormalize. For type II data (all `Δ₀` multiplicities infinite) the
/// result solves the same inverse problem but belongs to a different class;
/// for type I the counts `Σ m_k m_l` may change when ratios coincide.
pub fn permute_multiplicities(s: &SpectralData, k: usize, l: usize) -> Result<SpectralData> {
    head_index(s, k)?;
    head_index(s, l)?;
    let mut head = s.head().to_vec();
    if close(head[k].1, head[l].1) {
        return Err(Error::EqualMultiplicities { k, l });
    }
    let (mk, ml) = (head[k].1, head[l].1);
    head[k].1 = ml;
    head[l].1 = mk;
    SpectralData::normalized(s.factor_type(), head, s.tail().copied())
}

/// Move `eps` of multiplicity from head entry `l` to head entry `k` and
/// renormalize. Only type II data carry real multiplicities.
pub fn shift_multiplicity(s: &SpectralData, k: usize, l: usize, eps: f64) -> Result<SpectralData> {
    if s.factor_type().is_type_i() {
        return Err(Error::TypeIForbidden);
    }
    head_index(s, k)?;
    head_index(s, l)?;
    if k == l {
        return Err(Error::InvalidSpectralData("shift needs two distinct head entries".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidSpectralData(format!("shift {eps} must be positive")));
    }
    let mut head = s.head().to_vec();
    if eps >= head[l].1 {
        return Err(Error::EpsTooLarge { eps, available: head[l].1 });
    }
    head[k].1 += eps;
    head[l].1 -= eps;
    SpectralData::normalized(s.factor_type(), head, s.tail().copied())
}

/// Search bounds for [`enumerate_classes`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumerationBounds {
    /// Maximum number of head entries.
    pub max_head: usize,
    /// Lattice targets: head exponents are drawn from `0, -1, …, -exponent_depth`.
    pub exponent_depth: u32,
    /// Lattice targets: largest tail step (tail ratio `base^{-step}`).
    pub max_step: u32,
    /// Largest (integer) multiplicity tried.
    pub max_mult: u32,
    /// Truncation used for the admissibility test.
    pub cutoff: usize,
    /// Finite targets: candidate eigenvalues; defaults to the target's ratio grid.
    pub grid: Option<Vec<f64>>,
}

impl Default for EnumerationBounds {
    fn default() -> Self {
        Self { max_head: 3, exponent_depth: 3, max_step: 2, max_mult: 1, cutoff: 40, grid: None }
    }
}

/// Inequivalent admissible data for `target` inside `bounds`, in a fixed
/// lexicographic order.
///
/// Lattice targets `base^ℤ` are searched over heads `base^{-e}` with `e` in a
/// subset of `{0, …, exponent_depth}` containing `0`, followed by a tail
/// continuing `step` exponents below the smallest head entry; all
/// multiplicities equal `m ≤ max_mult`. Finite targets are searched over
/// subsets of the grid with multiplicities `1..=max_mult`.
pub fn enumerate_classes(
    target: &DeltaSpectrum,
    factor_type: FactorType,
    bounds: &EnumerationBounds,
) -> Result<Vec<SpectralData>> {
    let candidates = match target.lattice_spec() {
        Some(lattice) => lattice_candidates(lattice.base, factor_type, bounds)?,
        None => {
            let grid = match &bounds.grid {
                Some(g) => g.clone(),
                None if !target.entries().is_empty() => target.ratio_grid(),
                None => return Err(Error::UnsupportedTarget),
            };
            grid_candidates(&grid, factor_type, bounds)?
        }
    };
    let mut classes: Vec<SpectralData> = Vec::new();
    for s in candidates {
        if classes.iter().any(|c| equivalent(c, &s)) {
            continue;
        }
        if is_admissible(&s, target, bounds.cutoff)?.admissible {
            classes.push(s);
        }
    }
    Ok(classes)
}

/// All subsets of `0..len` of size `1..=max`, each as increasing indices,
/// in lexicographic order.
fn subsets(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..len).rev().map(|i| vec![i]).collect();
    while let Some(set) = stack.pop() {
        if set.len() < max {
            let last = *set.last().expect("non-empty");
            stack.extend((last + 1..len).rev().map(|j| {
                let mut next = set.clone();
                next.push(j);
                next
            }));
        }
        out.push(set);
    }
    out
}

fn lattice_candidates(base: f64, factor_type: FactorType, bounds: &EnumerationBounds) -> Result<Vec<SpectralData>> {
    if !factor_type.is_infinite() {
        // A finite ratio set never covers a lattice.
        return Ok(Vec::new());
    }
    let depth = bounds.exponent_depth as usize;
    let mut out = Vec::new();
    // Subsets of {1..=depth} extend the fixed exponent 0.
    let mut heads: Vec<Vec<usize>> = vec![vec![]];
    heads.extend(subsets(depth, bounds.max_head.saturating_sub(1)).into_iter().map(|s| s.iter().map(|i| i + 1).collect()));
    for rest in heads {
        if rest.len() + 1 > bounds.max_head.max(1) {
            continue;
        }
        let exps: Vec<i32> = std::iter::once(0).chain(rest.iter().map(|&e| e as i32)).collect();
        let lowest = *exps.last().expect("non-empty");
        for step in 1..=bounds.max_step.max(1) as i32 {
            for m in 1..=bounds.max_mult.max(1) {
                let m = f64::from(m);
                let head = exps.iter().map(|&e| (base.powi(-e), m)).collect();
                let tail = GeometricTail { ratio: base.powi(-step), mult: m, start: base.powi(-(lowest + step)) };
                out.push(SpectralData::normalized(factor_type, head, Some(tail))?);
            }
        }
    }
    Ok(out)
}

fn grid_candidates(grid: &[f64], factor_type: FactorType, bounds: &EnumerationBounds) -> Result<Vec<SpectralData>> {
    if grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidSpectralData("grid values must be positive".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    grid.dedup_by(|a, b| close(*a, *b));
    let max_mult = bounds.max_mult.max(1);
    let mut out = Vec::new();
    for set in subsets(grid.len(), bounds.max_head.max(1)) {
        if set[0] != 0 {
            continue;
        }
        let k = set.len();
        let combos = (max_mult as usize).pow(k as u32);
        for code in 0..combos {
            let mut c = code;
            let head = set
                .iter()
                .map(|&i| {
                    let m = 1 + c % max_mult as usize;
                    c /= max_mult as usize;
                    (grid[i], m as f64)
                })
                .collect();
            out.push(SpectralData::normalized(factor_type, head, None)?);
        }
    }
    Ok(out)
}
