//! Modular objects `(Δ₀, J₀)` of a cyclic and separating vector.
//!
//! Two independent routes are provided. The formula route polar-decomposes
//! `T = H V` (left polar form, `H = (T T*)^{1/2}`) and builds
//!
//! * `J₀ = V J V*`, acting as `X ↦ V X* V`,
//! * `Δ₀ = J₀ H₀⁻¹ J₀ H₀` with `H₀ = T T*`,
//! * `S = H⁻¹ V J V* H`.
//!
//! The oracle route solves `S (E_ij u₀) = E_ij* u₀` for the linear part of
//! `S` and polar-decomposes the antilinear operator directly:
//! `Δ = S† S`, `J = S Δ^{-1/2}`.

use crate::error::{Error, Result};
use crate::finite_factor::{base_conjugation, AntilinearMap, FactorContext, LinearMap, MatrixElement};
use crate::linalg::{self, CMatrix};
use crate::scalar::{cplx, Real};
use crate::vector_operator::{is_cyclic, operator_from_vector};

#[derive(Debug, Clone)]
pub struct ModularObjects<T: Real> {
    /// `H₀ = T T*`.
    pub h0: MatrixElement<T>,
    /// Unitary polar factor with `T = H₀^{1/2} V`.
    pub v: MatrixElement<T>,
    pub j0: AntilinearMap<T>,
    pub delta0: LinearMap<T>,
    /// Tomita operator.
    pub s: AntilinearMap<T>,
}

/// Output of [`tomita_oracle`]; built without the polar factors of `T`.
#[derive(Debug, Clone)]
pub struct OracleObjects<T: Real> {
    pub s: AntilinearMap<T>,
    pub delta: LinearMap<T>,
    pub j: AntilinearMap<T>,
}

fn checked_invertible<T: Real>(t: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<()> {
    ctx.check(t)?;
    let sv = t.singular_values();
    let top = sv[0];
    let bottom = *sv.last().expect("non-empty");
    if top <= T::zero() || bottom <= ctx.tol() * top {
        let margin = if top > T::zero() { (bottom / top).as_f64() } else { 0.0 };
        return Err(Error::SingularInput { margin, tol: ctx.tol().as_f64() });
    }
    let cond = top / bottom;
    if cond > ctx.cond_limit() {
        return Err(Error::IllConditioned { cond: cond.as_f64(), limit: ctx.cond_limit().as_f64() });
    }
    Ok(())
}

/// Left polar decomposition `T = H V` with `H = (T T*)^{1/2}` and `V` unitary.
pub fn polar_decompose<T: Real>(
    t: &MatrixElement<T>,
    ctx: &FactorContext<T>,
) -> Result<(MatrixElement<T>, MatrixElement<T>)> {
    checked_invertible(t, ctx)?;
    let tts = (t * &t.adjoint()).into_matrix();
    let h = linalg::hermitian_fn(&tts, |x| x.max(T::zero()).sqrt());
    let h_inv = linalg::hermitian_fn(&tts, |x| T::one() / x.sqrt());
    let v = &h_inv * t.as_matrix();
    Ok((MatrixElement::from_matrix_unchecked(h), MatrixElement::from_matrix_unchecked(v)))
}

/// `‖V* V − Id‖_op`.
pub fn unitarity_residual<T: Real>(v: &MatrixElement<T>) -> T {
    let n = v.dim();
    linalg::op_norm(&(v.adjoint().as_matrix() * v.as_matrix() - CMatrix::identity(n, n)))
}

/// `J₀ = V J V*` as a composite of left multiplications and the base conjugation.
pub fn modular_conjugation<T: Real>(v: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<AntilinearMap<T>> {
    ctx.check(v)?;
    let residual = unitarity_residual(v);
    if residual > ctx.tol() * ctx.cond_limit() {
        return Err(Error::NotUnitary { residual: residual.as_f64() });
    }
    let j = base_conjugation(ctx);
    let lv = LinearMap::left_multiplication(v);
    let lv_star = LinearMap::left_multiplication(&v.adjoint());
    Ok(&lv * &(&j * &lv_star))
}

/// The other composite for the same conjugation: `J V* J V J`.
pub fn modular_conjugation_long_form<T: Real>(v: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<AntilinearMap<T>> {
    ctx.check(v)?;
    let j = base_conjugation(ctx);
    let lv = LinearMap::left_multiplication(v);
    let lv_star = LinearMap::left_multiplication(&v.adjoint());
    let inner = &(&j * &lv) * &j; // J V J, linear
    let middle = &lv_star * &inner; // V* J V J, linear
    Ok(&j * &middle)
}

fn check_positive_definite<T: Real>(h: &MatrixElement<T>, tol: T) -> Result<Vec<T>> {
    let (values, _) = linalg::hermitian_eigen(h.as_matrix());
    let lo = values[0];
    let hi = *values.last().expect("non-empty");
    if !(hi > T::zero()) || lo <= tol * hi {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo.as_f64() });
    }
    Ok(values)
}

/// `Δ₀ = J₀ H₀⁻¹ J₀ H₀` with `H₀` and `H₀⁻¹` acting by left multiplication.
pub fn modular_operator<T: Real>(
    h0: &MatrixElement<T>,
    j0: &AntilinearMap<T>,
    ctx: &FactorContext<T>,
) -> Result<LinearMap<T>> {
    ctx.check(h0)?;
    check_positive_definite(h0, ctx.tol())?;
    let h0_inv = MatrixElement::from_matrix_unchecked(linalg::hermitian_fn(h0.as_matrix(), |x| T::one() / x));
    let lh = LinearMap::left_multiplication(h0);
    let lh_inv = LinearMap::left_multiplication(&h0_inv);
    let head = &(j0 * &lh_inv) * j0;
    Ok(&head * &lh)
}

/// `S = H⁻¹ V J V* H` for invertible `T = H V`.
pub fn tomita_operator<T: Real>(t: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<AntilinearMap<T>> {
    let (h, v) = polar_decompose(t, ctx)?;
    let j0 = modular_conjugation(&v, ctx)?;
    let h_inv = h.try_inverse().ok_or(Error::SingularInput { margin: 0.0, tol: ctx.tol().as_f64() })?;
    let lh = LinearMap::left_multiplication(&h);
    let lh_inv = LinearMap::left_multiplication(&h_inv);
    Ok(&lh_inv * &(&j0 * &lh))
}

/// All modular objects of `u₀ = T` by the polar-decomposition formulas.
pub fn modular_objects<T: Real>(t: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<ModularObjects<T>> {
    let (h, v) = polar_decompose(t, ctx)?;
    let h0 = &h * &h;
    let j0 = modular_conjugation(&v, ctx)?;
    let delta0 = modular_operator(&h0, &j0, ctx)?;
    let s = tomita_operator(t, ctx)?;
    Ok(ModularObjects { h0, v, j0, delta0, s })
}

/// `X ↦ (T T*) X (T* T)⁻¹`.
pub fn closed_form_delta<T: Real>(t: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<LinearMap<T>> {
    checked_invertible(t, ctx)?;
    let tts = t * &t.adjoint();
    let tst = &t.adjoint() * t;
    let tst_inv = MatrixElement::from_matrix_unchecked(linalg::hermitian_fn(tst.as_matrix(), |x| T::one() / x));
    Ok(&LinearMap::left_multiplication(&tts) * &LinearMap::right_multiplication(&tst_inv))
}

/// Definition-level construction of `S`, `Δ`, `J` from `S A u₀ = A* u₀`.
pub fn tomita_oracle<T: Real>(u0: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<OracleObjects<T>> {
    let pair = operator_from_vector(u0, ctx)?;
    if !is_cyclic(&pair, ctx) {
        return Err(Error::NotCyclicSeparating { margin: pair.margin().as_f64() });
    }
    let n = ctx.n();
    // Columns: vec(E_ij u₀) and vec(E_ij* u₀).
    let orbit = LinearMap::from_fn(n, |e| e * u0);
    let starred = LinearMap::from_fn(n, |e| &e.adjoint() * u0);
    let orbit_conj_inv = linalg::inverse(&orbit.matrix().map(|z| z.conj()))
        .ok_or(Error::NotCyclicSeparating { margin: pair.margin().as_f64() })?;
    let s = AntilinearMap::from_linear_part(n, starred.matrix() * orbit_conj_inv)?;
    let delta = &s.adjoint() * &s;
    let delta = LinearMap::from_matrix(n, linalg::hermitian_part(delta.matrix()))?;
    let inv_sqrt = LinearMap::from_matrix(n, linalg::hermitian_fn(delta.matrix(), |x| T::one() / x.sqrt()))?;
    let j = &s * &inv_sqrt;
    Ok(OracleObjects { s, delta, j })
}

/// `Δ^{it}` via the Hermitian eigendecomposition.
pub fn delta_power_it<T: Real>(delta0: &LinearMap<T>, t: T, ctx: &FactorContext<T>) -> Result<LinearMap<T>> {
    if delta0.n() != ctx.n() {
        return Err(Error::ShapeMismatch { expected: ctx.n(), rows: delta0.n(), cols: delta0.n() });
    }
    let (values, _) = linalg::hermitian_eigen(delta0.matrix());
    let lo = values[0];
    let hi = *values.last().expect("non-empty");
    // The spread of Δ is κ(T)⁴, so only rounding-level eigenvalues are rejected.
    let floor = hi * T::default_epsilon() * T::lit(values.len() as f64);
    if !(hi > T::zero()) || lo <= floor {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo.as_f64() });
    }
    let m = linalg::normal_fn(delta0.matrix(), |x| {
        let phase = t * x.ln();
        cplx(phase.cos(), phase.sin())
    });
    LinearMap::from_matrix(delta0.n(), m)
}

/// `σ_t(L_A) = Δ^{it} L_A Δ^{-it}` as an operator on the Hilbert space.
pub fn flow_operator<T: Real>(
    delta0: &LinearMap<T>,
    t: T,
    a: &MatrixElement<T>,
    ctx: &FactorContext<T>,
) -> Result<LinearMap<T>> {
    ctx.check(a)?;
    let forward = delta_power_it(delta0, t, ctx)?;
    let backward = forward.adjoint();
    Ok(&(&forward * &LinearMap::left_multiplication(a)) * &backward)
}

/// Modular automorphism `σ_t(A)`, read off as the image of the trace vector.
pub fn modular_flow<T: Real>(
    delta0: &LinearMap<T>,
    t: T,
    a: &MatrixElement<T>,
    ctx: &FactorContext<T>,
) -> Result<MatrixElement<T>> {
    let op = flow_operator(delta0, t, a, ctx)?;
    op.apply(&MatrixElement::identity(ctx.n()))
}

/// Largest commutator of `op` with right multiplication by the generators
/// (clock and shift) of the commutant. Zero iff `op` lies in the algebra.
pub fn algebra_membership_residual<T: Real>(op: &LinearMap<T>) -> T {
    let n = op.n();
    [MatrixElement::clock(n), MatrixElement::shift(n)]
        .iter()
        .map(|g| op.commutator_norm(&LinearMap::right_multiplication(g)) / g.op_norm())
        .fold(T::zero(), |acc, r| acc.max(r))
}

/// Largest commutator of `op` with left multiplication by the algebra's
/// generators. Zero iff `op` lies in the commutant.
pub fn commutant_membership_residual<T: Real>(op: &LinearMap<T>) -> T {
    let n = op.n();
    [MatrixElement::clock(n), MatrixElement::shift(n)]
        .iter()
        .map(|g| op.commutator_norm(&LinearMap::left_multiplication(g)) / g.op_norm())
        .fold(T::zero(), |acc, r| acc.max(r))
}
