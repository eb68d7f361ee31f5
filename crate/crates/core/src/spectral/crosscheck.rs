use serde::Serialize;

use super::{delta_spectrum, FactorType, Multiplicity, SpectralData};
use crate::error::{Error, Result};
use crate::finite_factor::{FactorContext, MatrixElement};
use crate::linalg;
use crate::modular_engine::modular_objects;
use crate::scalar::Real;

/// Largest matrix size `Σ m_k` accepted by [`cross_check_finite`].
pub const MAX_CROSS_CHECK_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckEntry {
    pub lambda: f64,
    pub lambda_matrix: f64,
    pub mult: f64,
    pub mult_matrix: usize,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub pass: bool,
    pub dimension: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub entries: Vec<CrossCheckEntry>,
    /// Set when the matrix route produced a different number of distinct eigenvalues.
    pub cluster_mismatch: Option<(usize, usize)>,
}

/// Compares the counting formula for `Δ₀` against an eigendecomposition of
/// the modular operator of `T = H₀^{1/2}`, `H₀ = diag(μ_k repeated m_k)`.
///
/// `ctx` supplies the tolerance and conditioning policy; its dimension is
/// replaced by `Σ m_k`. Eigenvalues must agree to `ctx.tol()` relative and
/// multiplicities exactly.
pub fn cross_check_finite<T: Real>(s: &SpectralData, ctx: &FactorContext<T>) -> Result<CrossCheckReport> {
    if s.factor_type() != FactorType::TypeIFinite || s.tail().is_some() {
        return Err(Error::InvalidSpectralData("cross check needs finite type I data without a tail".into()));
    }
    let dim = s.head().iter().map(|e| e.1.round() as usize).sum::<usize>();
    if dim > MAX_CROSS_CHECK_DIM {
        return Err(Error::DimensionTooLarge { dim, limit: MAX_CROSS_CHECK_DIM });
    }
    let diag: Vec<T> = s
        .head()
        .iter()
        .flat_map(|&(mu, m)| std::iter::repeat_n(T::lit(mu.sqrt()), m.round() as usize))
        .collect();
    let ctx = ctx.resized(dim)?;
    let objects = modular_objects(&MatrixElement::from_diagonal(&diag), &ctx)?;
    let (values, _) = linalg::hermitian_eigen(objects.delta0.matrix());

    let tol = ctx.tol().as_f64();
    let cluster_tol = (10.0 * tol).max(1e-9);
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in values.iter().map(|v| v.as_f64()) {
        match clusters.last_mut() {
            Some(c) if (v - c.0).abs() <= cluster_tol * v.abs().max(c.0.abs()) => c.1 += 1,
            _ => clusters.push((v, 1)),
        }
    }

    let expected = delta_spectrum(s, 1)?;
    let mut entries = Vec::with_capacity(expected.entries().len());
    let mut pass = clusters.len() == expected.entries().len();
    let cluster_mismatch = (!pass).then_some((expected.entries().len(), clusters.len()));
    for &(lambda, n) in expected.entries() {
        let mult = match n {
            Multiplicity::Finite(m) => m,
            Multiplicity::Infinite => unreachable!("finite type I data have finite multiplicities"),
        };
        let nearest = clusters
            .iter()
            .min_by(|a, b| (a.0 - lambda).abs().partial_cmp(&(b.0 - lambda).abs()).expect("finite"))
            .copied()
            .unwrap_or((f64::NAN, 0));
        let rel_error = (nearest.0 - lambda).abs() / lambda;
        pass &= rel_error <= tol && mult.round() as usize == nearest.1;
        entries.push(CrossCheckEntry { lambda, lambda_matrix: nearest.0, mult, mult_matrix: nearest.1, rel_error });
    }
    let max_rel_error = entries.iter().map(|e| e.rel_error).fold(0.0, f64::max);
    Ok(CrossCheckReport { pass, dimension: dim, max_rel_error, tolerance: tol, entries, cluster_mismatch })
}
