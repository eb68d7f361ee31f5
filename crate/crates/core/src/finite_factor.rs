//! The finite factor `M_n(ℂ)` in standard form.
//!
//! The Hilbert space is `M_n(ℂ)` itself with `⟨X, Y⟩ = Tr(Y* X) / n`. The
//! algebra acts by left multiplication, the commutant by right
//! multiplication, and the identity matrix is the (unit) trace vector.
//!
//! Operators on the `n²`-dimensional Hilbert space are stored as `n² × n²`
//! matrices acting on column-major vectorizations. Antilinear maps store only
//! their linear part `L` and act as `x ↦ L · conj(x)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{real, Real, C};

/// Fixes the standard-form model: matrix dimension and numerical policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorContext<T> {
    n: usize,
    tol: T,
    cond_limit: T,
}

impl<T: Real> FactorContext<T> {
    pub const DEFAULT_COND_LIMIT: f64 = 1e3;

    pub fn new(n: usize) -> Result<Self> {
        Self::with_params(n, T::lit(T::DEFAULT_TOL), T::lit(Self::DEFAULT_COND_LIMIT))
    }

    pub fn with_params(n: usize, tol: T, cond_limit: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidContext("dimension must be at least 1".into()));
        }
        if !(tol > T::zero()) || !tol.is_finite() {
            return Err(Error::InvalidContext(format!("tolerance must be positive, got {tol}")));
        }
        if !(cond_limit >= T::one()) {
            return Err(Error::InvalidContext(format!(
                "condition limit must be at least 1, got {cond_limit}"
            )));
        }
        Ok(Self { n, tol, cond_limit })
    }

    pub fn with_tol(self, tol: T) -> Result<Self> {
        Self::with_params(self.n, tol, self.cond_limit)
    }

    pub fn with_cond_limit(self, cond_limit: T) -> Result<Self> {
        Self::with_params(self.n, self.tol, cond_limit)
    }

    /// Same policy, different dimension.
    pub fn resized(&self, n: usize) -> Result<Self> {
        Self::with_params(n, self.tol, self.cond_limit)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    pub fn cond_limit(&self) -> T {
        self.cond_limit
    }

    pub(crate) fn check(&self, m: &MatrixElement<T>) -> Result<()> {
        m.check_dim(self.n)
    }
}

/// An `n × n` complex matrix: algebra element, commutant element, or vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElement<T: Real>(CMatrix<T>);

impl<T: Real> MatrixElement<T> {
    /// Wraps a square matrix with finite entries.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::ShapeMismatch { expected: m.nrows().max(1), rows: m.nrows(), cols: m.ncols() });
        }
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix<T>) -> Self {
        Self(m)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C<T>) -> Self {
        Self(CMatrix::from_fn(n, n, f))
    }

    /// Row-major `(re, im)` pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::ShapeMismatch { expected: n, rows: n, cols: bad.len() });
        }
        Self::new(CMatrix::from_fn(n, n, |r, c| {
            let (re, im) = rows[r][c];
            C::new(T::lit(re), T::lit(im))
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, |r, c| if r == c { real(d[r]) } else { C::new(T::zero(), T::zero()) })
    }

    /// `E_ij`: one at `(i, j)`, zero elsewhere.
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        m[(i, j)] = real(T::one());
        Self(m)
    }

    /// Cyclic shift `e_k ↦ e_{k+1}`; together with [`Self::clock`] it generates `M_n`.
    pub fn shift(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == (c + 1) % n { real(T::one()) } else { real(T::zero()) })
    }

    /// Diagonal `diag(1, 2, …, n)`; its eigenspaces are one-dimensional.
    pub fn clock(n: usize) -> Self {
        let d: Vec<T> = (1..=n).map(|k| T::lit(k as f64)).collect();
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.0[(r, c)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self(&self.0 * s)
    }

    /// Column-major vectorization.
    pub fn vectorize(&self) -> DVector<C<T>> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn from_vector(n: usize, v: &DVector<C<T>>) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, rows: v.len(), cols: 1 });
        }
        Ok(Self(CMatrix::from_column_slice(n, n, v.as_slice())))
    }

    /// Frobenius norm (unnormalized).
    pub fn frobenius(&self) -> T {
        self.0.norm()
    }

    pub fn op_norm(&self) -> T {
        linalg::op_norm(&self.0)
    }

    pub fn singular_values(&self) -> Vec<T> {
        linalg::singular_values(&self.0)
    }

    pub fn condition_number(&self) -> T {
        linalg::condition_number(&self.0)
    }

    pub fn try_inverse(&self) -> Option<Self> {
        linalg::inverse(&self.0).map(Self)
    }

    /// `‖A − B‖_op`.
    pub fn distance(&self, other: &Self) -> T {
        linalg::op_norm(&(&self.0 - &other.0))
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.0.nrows() != n || self.0.ncols() != n {
            return Err(Error::ShapeMismatch { expected: n, rows: self.0.nrows(), cols: self.0.ncols() });
        }
        Ok(())
    }
}

impl<'a, T: Real> Mul<&'a MatrixElement<T>> for &'a MatrixElement<T> {
    type Output = MatrixElement<T>;
    fn mul(self, rhs: &'a MatrixElement<T>) -> MatrixElement<T> {
        MatrixElement(&self.0 * &rhs.0)
    }
}

impl<'a, T: Real> Add<&'a MatrixElement<T>> for &'a MatrixElement<T> {
    type Output = MatrixElement<T>;
    fn add(self, rhs: &'a MatrixElement<T>) -> MatrixElement<T> {
        MatrixElement(&self.0 + &rhs.0)
    }
}

impl<'a, T: Real> Sub<&'a MatrixElement<T>> for &'a MatrixElement<T> {
    type Output = MatrixElement<T>;
    fn sub(self, rhs: &'a MatrixElement<T>) -> MatrixElement<T> {
        MatrixElement(&self.0 - &rhs.0)
    }
}

fn same_shape<T: Real>(a: &MatrixElement<T>, b: &MatrixElement<T>) -> Result<()> {
    b.check_dim(a.dim())
}

/// `Tr(y* x) / n`.
pub fn inner_product<T: Real>(
    x: &MatrixElement<T>,
    y: &MatrixElement<T>,
    ctx: &FactorContext<T>,
) -> Result<C<T>> {
    ctx.check(x)?;
    ctx.check(y)?;
    let mut acc = C::new(T::zero(), T::zero());
    for (a, b) in x.0.iter().zip(y.0.iter()) {
        acc += b.conj() * a;
    }
    Ok(acc / real(T::lit(ctx.n as f64)))
}

/// Norm induced by [`inner_product`].
pub fn vector_norm<T: Real>(x: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<T> {
    Ok(inner_product(x, x, ctx)?.re.max(T::zero()).sqrt())
}

/// The cyclic trace vector `u_tr` (the identity matrix).
pub fn trace_vector<T: Real>(ctx: &FactorContext<T>) -> MatrixElement<T> {
    MatrixElement::identity(ctx.n)
}

/// Algebra action `x ↦ M x`.
pub fn left_act<T: Real>(m: &MatrixElement<T>, x: &MatrixElement<T>) -> Result<MatrixElement<T>> {
    same_shape(m, x)?;
    Ok(m * x)
}

/// Commutant action `x ↦ x M`.
pub fn right_act<T: Real>(m: &MatrixElement<T>, x: &MatrixElement<T>) -> Result<MatrixElement<T>> {
    same_shape(m, x)?;
    Ok(x * m)
}

/// `Tr(M) / n`, so that `tr(Id) = 1`.
pub fn normalized_trace<T: Real>(m: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<C<T>> {
    ctx.check(m)?;
    Ok(m.0.trace() / real(T::lit(ctx.n as f64)))
}

/// The conjugation `X ↦ X*` belonging to the trace vector.
pub fn base_conjugation<T: Real>(ctx: &FactorContext<T>) -> AntilinearMap<T> {
    AntilinearMap::adjoint_map(ctx.n)
}

/// Linear operator on the `n²`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap<T: Real> {
    n: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> LinearMap<T> {
    pub fn from_matrix(n: usize, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != n * n || matrix.ncols() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, rows: matrix.nrows(), cols: matrix.ncols() });
        }
        Ok(Self { n, matrix })
    }

    /// Builds the matrix of `f` column by column from its values on matrix units.
    pub fn from_fn(n: usize, mut f: impl FnMut(&MatrixElement<T>) -> MatrixElement<T>) -> Self {
        let nn = n * n;
        let mut matrix = CMatrix::zeros(nn, nn);
        for j in 0..n {
            for i in 0..n {
                let image = f(&MatrixElement::matrix_unit(n, i, j)).vectorize();
                matrix.set_column(i + j * n, &image);
            }
        }
        Self { n, matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, matrix: CMatrix::identity(n * n, n * n) }
    }

    /// `X ↦ A X`, i.e. `I ⊗ A` on column-major vectors.
    pub fn left_multiplication(a: &MatrixElement<T>) -> Self {
        let n = a.dim();
        Self { n, matrix: CMatrix::<T>::identity(n, n).kronecker(&a.0) }
    }

    /// `X ↦ X B`, i.e. `Bᵀ ⊗ I` on column-major vectors.
    pub fn right_multiplication(b: &MatrixElement<T>) -> Self {
        let n = b.dim();
        Self { n, matrix: b.0.transpose().kronecker(&CMatrix::<T>::identity(n, n)) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, x: &MatrixElement<T>) -> Result<MatrixElement<T>> {
        x.check_dim(self.n)?;
        MatrixElement::from_vector(self.n, &(&self.matrix * x.vectorize()))
    }

    pub fn adjoint(&self) -> Self {
        Self { n: self.n, matrix: self.matrix.adjoint() }
    }

    pub fn try_inverse(&self) -> Option<Self> {
        linalg::inverse(&self.matrix).map(|matrix| Self { n: self.n, matrix })
    }

    pub fn op_norm(&self) -> T {
        linalg::op_norm(&self.matrix)
    }

    pub fn distance(&self, other: &Self) -> T {
        linalg::op_norm(&(&self.matrix - &other.matrix))
    }

    /// `‖AB − BA‖_op`.
    pub fn commutator_norm(&self, other: &Self) -> T {
        linalg::op_norm(&(&self.matrix * &other.matrix - &other.matrix * &self.matrix))
    }
}

impl<'a, T: Real> Mul<&'a LinearMap<T>> for &'a LinearMap<T> {
    type Output = LinearMap<T>;
    fn mul(self, rhs: &'a LinearMap<T>) -> LinearMap<T> {
        LinearMap { n: self.n, matrix: &self.matrix * &rhs.matrix }
    }
}

impl<'a, T: Real> Mul<&'a AntilinearMap<T>> for &'a LinearMap<T> {
    type Output = AntilinearMap<T>;
    fn mul(self, rhs: &'a AntilinearMap<T>) -> AntilinearMap<T> {
        AntilinearMap { n: self.n, linear: &self.matrix * &rhs.linear }
    }
}

impl<'a, T: Real> Sub<&'a LinearMap<T>> for &'a LinearMap<T> {
    type Output = LinearMap<T>;
    fn sub(self, rhs: &'a LinearMap<T>) -> LinearMap<T> {
        LinearMap { n: self.n, matrix: &self.matrix - &rhs.matrix }
    }
}

/// Conjugate-linear operator `x ↦ L · conj(x)` on the `n²`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap<T: Real> {
    n: usize,
    linear: CMatrix<T>,
}

impl<T: Real> AntilinearMap<T> {
    pub fn from_linear_part(n: usize, linear: CMatrix<T>) -> Result<Self> {
        if linear.nrows() != n * n || linear.ncols() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, rows: linear.nrows(), cols: linear.ncols() });
        }
        Ok(Self { n, linear })
    }

    /// `X ↦ X*`. Its linear part is the transposition permutation of indices.
    pub fn adjoint_map(n: usize) -> Self {
        let nn = n * n;
        let mut linear = CMatrix::zeros(nn, nn);
        for i in 0..n {
            for j in 0..n {
                linear[(i + j * n, j + i * n)] = real(T::one());
            }
        }
        Self { n, linear }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear_part(&self) -> &CMatrix<T> {
        &self.linear
    }

    pub fn apply(&self, x: &MatrixElement<T>) -> Result<MatrixElement<T>> {
        x.check_dim(self.n)?;
        let v = x.vectorize().map(|z| z.conj());
        MatrixElement::from_vector(self.n, &(&self.linear * v))
    }

    /// Antilinear adjoint: `⟨S† x, y⟩ = conj⟨x, S y⟩`, linear part `Lᵀ`.
    pub fn adjoint(&self) -> Self {
        Self { n: self.n, linear: self.linear.transpose() }
    }

    /// Norm of the difference of linear parts; conjugation is isometric.
    pub fn distance(&self, other: &Self) -> T {
        linalg::op_norm(&(&self.linear - &other.linear))
    }
}

impl<'a, T: Real> Mul<&'a LinearMap<T>> for &'a AntilinearMap<T> {
    type Output = AntilinearMap<T>;
    fn mul(self, rhs: &'a LinearMap<T>) -> AntilinearMap<T> {
        AntilinearMap { n: self.n, linear: &self.linear * rhs.matrix.map(|z| z.conj()) }
    }
}

impl<'a, T: Real> Mul<&'a AntilinearMap<T>> for &'a AntilinearMap<T> {
    type Output = LinearMap<T>;
    fn mul(self, rhs: &'a AntilinearMap<T>) -> LinearMap<T> {
        LinearMap { n: self.n, matrix: &self.linear * rhs.linear.map(|z| z.conj()) }
    }
}

/// `‖M − Id‖_op`.
pub fn identity_residual<T: Real>(m: &LinearMap<T>) -> T {
    m.distance(&LinearMap::identity(m.n))
}
