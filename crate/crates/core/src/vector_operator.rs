//! Vector ↔ operator correspondence in the finite model.
//!
//! With `u_tr = Id` the algebra element `T_u` satisfying `T_u u_tr = u` is the
//! matrix `u` itself. Cyclicity and separation reduce to injectivity and
//! surjectivity of `T_u`; the span oracles below check the definitions
//! directly instead.

use crate::error::Result;
use crate::finite_factor::{left_act, normalized_trace, right_act, trace_vector, FactorContext, MatrixElement};
use crate::linalg::{self, CMatrix};
use crate::scalar::Real;

/// Rank decisions whose margin lies within this factor of `tol` are ambiguous.
pub const AMBIGUITY_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorOperatorPair<T: Real> {
    pub u: MatrixElement<T>,
    pub operator: MatrixElement<T>,
    pub rank: usize,
    pub sigma_min: T,
    /// Operator norm (largest singular value) of `operator`.
    pub norm: T,
}

impl<T: Real> VectorOperatorPair<T> {
    /// `σ_min / ‖T‖`, zero for the zero operator.
    pub fn margin(&self) -> T {
        if self.norm > T::zero() {
            self.sigma_min / self.norm
        } else {
            T::zero()
        }
    }

    /// True when the injectivity decision sits too close to the cutoff to trust.
    pub fn is_ambiguous(&self, ctx: &FactorContext<T>) -> bool {
        let band = T::lit(AMBIGUITY_FACTOR);
        let m = self.margin();
        m > ctx.tol() / band && m < ctx.tol() * band
    }

    pub fn condition_number(&self) -> T {
        self.operator.condition_number()
    }
}

pub fn operator_from_vector<T: Real>(u: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<VectorOperatorPair<T>> {
    ctx.check(u)?;
    let operator = u.clone();
    let sv = operator.singular_values();
    let norm = sv.first().copied().unwrap_or_else(T::zero);
    let sigma_min = sv.last().copied().unwrap_or_else(T::zero);
    let rank = if norm > T::zero() { sv.iter().filter(|&&s| s > ctx.tol() * norm).count() } else { 0 };
    Ok(VectorOperatorPair { u: u.clone(), operator, rank, sigma_min, norm })
}

pub fn vector_from_operator<T: Real>(t: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<MatrixElement<T>> {
    ctx.check(t)?;
    left_act(t, &trace_vector(ctx))
}

/// Injectivity of `T_u`.
pub fn is_cyclic<T: Real>(pair: &VectorOperatorPair<T>, ctx: &FactorContext<T>) -> bool {
    pair.norm > T::zero() && pair.sigma_min > ctx.tol() * pair.norm
}

/// Surjectivity of `T_u`; for square matrices this is the same singular-value test.
pub fn is_separating<T: Real>(pair: &VectorOperatorPair<T>, ctx: &FactorContext<T>) -> bool {
    pair.norm > T::zero() && pair.rank == ctx.n() && pair.sigma_min > ctx.tol() * pair.norm
}

/// `(tr(T T*), tr(T* T))` with the normalized trace.
pub fn trace_condition<T: Real>(pair: &VectorOperatorPair<T>, ctx: &FactorContext<T>) -> Result<(T, T)> {
    let t = &pair.operator;
    let tts = normalized_trace(&(t * &t.adjoint()), ctx)?;
    let tst = normalized_trace(&(&t.adjoint() * t), ctx)?;
    Ok((tts.re, tst.re))
}

fn span_dimension<T: Real>(
    u: &MatrixElement<T>,
    tol: T,
    act: impl Fn(&MatrixElement<T>, &MatrixElement<T>) -> Result<MatrixElement<T>>,
) -> Result<usize> {
    let n = u.dim();
    let nn = n * n;
    let mut gen = CMatrix::zeros(nn, nn);
    for j in 0..n {
        for i in 0..n {
            let image = act(&MatrixElement::matrix_unit(n, i, j), u)?;
            gen.set_column(i + j * n, &image.vectorize());
        }
    }
    Ok(linalg::rank(&gen, tol))
}

/// Dimension of `span{E_ij u}`: the orbit of `u` under a basis of the algebra.
pub fn left_span_dimension<T: Real>(u: &MatrixElement<T>, tol: T) -> Result<usize> {
    span_dimension(u, tol, left_act)
}

/// Dimension of `span{u E_ij}`: the orbit of `u` under a basis of the commutant.
pub fn right_span_dimension<T: Real>(u: &MatrixElement<T>, tol: T) -> Result<usize> {
    span_dimension(u, tol, right_act)
}
