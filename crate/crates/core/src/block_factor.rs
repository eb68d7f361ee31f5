//! Finite truncation of the semifinite model `R = 𝒯 ⊗ L(H_∞) ⊗ ℂ`.
//!
//! A block vector is an `N × N` array `(u_i^k)` of vectors of the finite
//! factor; a block operator is an `N × N` array `(T_li)` of algebra elements
//! acting by `(T u)_l^k = Σ_i T_li u_i^k`. Flattening the blocks gives the
//! finite factor `M_{nN}` in standard form (up to the normalization of the
//! inner product), which is how the modular engine is reused here.

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::finite_factor::{inner_product, normalized_trace, trace_vector, FactorContext, MatrixElement};
use crate::scalar::{real, Real, C};
use crate::vector_operator::{is_cyclic, is_separating, left_span_dimension, operator_from_vector, right_span_dimension};

fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// `N × N` array of `n × n` blocks, stored row-major.
#[derive(Debug, Clone, PartialEq)]
struct Blocks<T: Real> {
    n: usize,
    size: usize,
    data: Vec<MatrixElement<T>>,
}

impl<T: Real> Blocks<T> {
    fn new(n: usize, rows: Vec<Vec<MatrixElement<T>>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidContext("truncation size must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::ShapeMismatch { expected: size, rows: size, cols: row.len() });
            }
            for block in row {
                block.check_dim(n)?;
                data.push(block);
            }
        }
        Ok(Self { n, size, data })
    }

    fn zeros(n: usize, size: usize) -> Self {
        Self { n, size, data: vec![MatrixElement::zeros(n); size * size] }
    }

    fn get(&self, i: usize, j: usize) -> &MatrixElement<T> {
        &self.data[i * self.size + j]
    }

    fn set(&mut self, i: usize, j: usize, m: MatrixElement<T>) {
        self.data[i * self.size + j] = m;
    }

    fn to_flat(&self) -> MatrixElement<T> {
        let (n, size) = (self.n, self.size);
        MatrixElement::from_fn(n * size, |r, c| self.get(r / n, c / n).get(r % n, c % n))
    }

    fn from_flat(n: usize, size: usize, flat: &MatrixElement<T>) -> Result<Self> {
        flat.check_dim(n * size)?;
        let mut out = Self::zeros(n, size);
        for i in 0..size {
            for j in 0..size {
                out.set(i, j, MatrixElement::from_fn(n, |r, c| flat.get(i * n + r, j * n + c)));
            }
        }
        Ok(out)
    }

    fn rows(&self) -> Vec<Vec<MatrixElement<T>>> {
        (0..self.size).map(|i| (0..self.size).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.size != other.size {
            return Err(Error::ShapeMismatch { expected: self.size * self.n, rows: other.size * other.n, cols: other.size * other.n });
        }
        Ok(())
    }
}

/// Truncated vector `u = (u_i^k)` of the semifinite model.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector<T: Real>(Blocks<T>);

/// Truncated operator `T = (T_li)` of the semifinite model.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator<T: Real>(Blocks<T>);

macro_rules! block_common {
    ($ty:ident) => {
        impl<T: Real> $ty<T> {
            /// `rows[i][j]` is the block at `(i, j)`; all blocks must be `n × n`.
            pub fn new(n: usize, rows: Vec<Vec<MatrixElement<T>>>) -> Result<Self> {
                Blocks::new(n, rows).map(Self)
            }

            pub fn zeros(n: usize, size: usize) -> Self {
                Self(Blocks::zeros(n, size))
            }

            /// Block dimension `n`.
            pub fn n(&self) -> usize {
                self.0.n
            }

            /// Truncation size `N`.
            pub fn size(&self) -> usize {
                self.0.size
            }

            pub fn block(&self, i: usize, j: usize) -> &MatrixElement<T> {
                self.0.get(i, j)
            }

            pub fn set_block(&mut self, i: usize, j: usize, m: MatrixElement<T>) -> Result<()> {
                m.check_dim(self.0.n)?;
                self.0.set(i, j, m);
                Ok(())
            }

            pub fn rows(&self) -> Vec<Vec<MatrixElement<T>>> {
                self.0.rows()
            }

            /// The `nN × nN` matrix with the blocks in place.
            pub fn to_flat(&self) -> MatrixElement<T> {
                self.0.to_flat()
            }

            pub fn from_flat(n: usize, size: usize, flat: &MatrixElement<T>) -> Result<Self> {
                Blocks::from_flat(n, size, flat).map(Self)
            }
        }
    };
}

block_common!(BlockVector);
block_common!(BlockOperator);

impl<T: Real> BlockVector<T> {
    /// `Σ_{i,k} ‖u_i^k‖²`.
    pub fn total_norm_sq(&self, ctx: &FactorContext<T>) -> Result<T> {
        self.inner(self, ctx).map(|z| z.re)
    }

    /// `Σ_{i,k} ⟨u_i^k, w_i^k⟩`.
    pub fn inner(&self, other: &Self, ctx: &FactorContext<T>) -> Result<C<T>> {
        self.0.check_compatible(&other.0)?;
        let mut acc = zero();
        for (a, b) in self.0.data.iter().zip(&other.0.data) {
            acc += inner_product(a, b, ctx)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.0.check_compatible(&other.0)?;
        let mut out = self.clone();
        for (a, b) in out.0.data.iter_mut().zip(&other.0.data) {
            *a = &*a + b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        out.0.data.iter_mut().for_each(|a| *a = a.scale(real(s)));
        out
    }
}

impl<T: Real> BlockOperator<T> {
    pub fn identity(n: usize, size: usize) -> Self {
        let mut out = Self::zeros(n, size);
        for k in 0..size {
            out.0.set(k, k, MatrixElement::identity(n));
        }
        out
    }

    /// `(T u)_l^k = Σ_i T_li u_i^k`.
    pub fn apply(&self, u: &BlockVector<T>) -> Result<BlockVector<T>> {
        self.0.check_compatible(&u.0)?;
        let (n, size) = (self.0.n, self.0.size);
        let mut out = Blocks::zeros(n, size);
        for l in 0..size {
            for k in 0..size {
                let mut acc = MatrixElement::zeros(n);
                for i in 0..size {
                    acc = &acc + &(self.0.get(l, i) * u.0.get(i, k));
                }
                out.set(l, k, acc);
            }
        }
        Ok(BlockVector(out))
    }

    /// Commutant action `(M' u)_i^l = Σ_k M'^{lk} u_i^k`, where each block of
    /// `self` acts on the finite factor by right multiplication.
    pub fn apply_as_commutant(&self, u: &BlockVector<T>) -> Result<BlockVector<T>> {
        self.0.check_compatible(&u.0)?;
        let (n, size) = (self.0.n, self.0.size);
        let mut out = Blocks::zeros(n, size);
        for i in 0..size {
            for l in 0..size {
                let mut acc = MatrixElement::zeros(n);
                for k in 0..size {
                    acc = &acc + &(u.0.get(i, k) * self.0.get(l, k));
                }
                out.set(i, l, acc);
            }
        }
        Ok(BlockVector(out))
    }

    /// `(T*)_li = (T_il)*`.
    pub fn adjoint(&self) -> Self {
        let size = self.0.size;
        let mut out = Blocks::zeros(self.0.n, size);
        for l in 0..size {
            for i in 0..size {
                out.set(l, i, self.0.get(i, l).adjoint());
            }
        }
        Self(out)
    }

    /// Block matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.0.check_compatible(&other.0)?;
        let (n, size) = (self.0.n, self.0.size);
        let mut out = Blocks::zeros(n, size);
        for l in 0..size {
            for k in 0..size {
                let mut acc = MatrixElement::zeros(n);
                for i in 0..size {
                    acc = &acc + &(self.0.get(l, i) * other.0.get(i, k));
                }
                out.set(l, k, acc);
            }
        }
        Ok(Self(out))
    }
}

/// `v_k`: the trace vector at block `(k, k)`, zero elsewhere (`k` is 0-based).
pub fn basis_vectors<T: Real>(ctx: &FactorContext<T>, size: usize) -> Result<Vec<BlockVector<T>>> {
    if size == 0 {
        return Err(Error::InvalidContext("truncation size must be at least 1".into()));
    }
    Ok((0..size)
        .map(|k| {
            let mut v = BlockVector::zeros(ctx.n(), size);
            v.0.set(k, k, trace_vector(ctx));
            v
        })
        .collect())
}

/// Both trace formulas: `Σ_k tr_𝒯(M_kk)` and `Σ_k ⟨M v_k, v_k⟩`.
pub fn block_trace_formulas<T: Real>(m: &BlockOperator<T>, ctx: &FactorContext<T>) -> Result<(C<T>, C<T>)> {
    let mut diagonal = zero();
    for k in 0..m.size() {
        diagonal += normalized_trace(m.block(k, k), ctx)?;
    }
    let mut via_vectors = zero();
    for v in basis_vectors(ctx, m.size())? {
        via_vectors += m.apply(&v)?.inner(&v, ctx)?;
    }
    Ok((diagonal, via_vectors))
}

/// Unnormalized block trace, so `tr(Id) = N`.
pub fn block_trace<T: Real>(m: &BlockOperator<T>, ctx: &FactorContext<T>) -> Result<C<T>> {
    let (a, b) = block_trace_formulas(m, ctx)?;
    let scale = (0..m.size()).map(|k| m.block(k, k).frobenius()).fold(T::one(), |acc, x| acc + x);
    if (a - b).modulus() > ctx.tol() * scale {
        return Err(Error::FormulaMismatch { what: "block trace", left: a.modulus().as_f64(), right: b.modulus().as_f64() });
    }
    Ok(a)
}

/// `T_u` with blocks `T_ij = operator_from_vector(u_i^j)`.
pub fn assemble_t_u<T: Real>(u: &BlockVector<T>, ctx: &FactorContext<T>) -> Result<BlockOperator<T>> {
    let size = u.size();
    let mut t = BlockOperator::zeros(ctx.n(), size);
    for i in 0..size {
        for j in 0..size {
            t.0.set(i, j, operator_from_vector(u.block(i, j), ctx)?.operator);
        }
    }
    Ok(t)
}

/// `Σ_k T v_k`.
pub fn reconstruct<T: Real>(t: &BlockOperator<T>, ctx: &FactorContext<T>) -> Result<BlockVector<T>> {
    let mut acc = BlockVector::zeros(ctx.n(), t.size());
    for v in basis_vectors(ctx, t.size())? {
        acc = acc.add(&t.apply(&v)?)?;
    }
    Ok(acc)
}

/// `(tr(T_u* T_u), tr(T_u T_u*), ‖u‖²)`.
pub fn block_trace_condition<T: Real>(u: &BlockVector<T>, ctx: &FactorContext<T>) -> Result<(T, T, T)> {
    let t = assemble_t_u(u, ctx)?;
    let tst = block_trace(&t.adjoint().compose(&t)?, ctx)?;
    let tts = block_trace(&t.compose(&t.adjoint())?, ctx)?;
    Ok((tst.re, tts.re, u.total_norm_sq(ctx)?))
}

/// The flattened model `M_{nN}` with the policy of `ctx`.
pub fn flattened_context<T: Real>(ctx: &FactorContext<T>, size: usize) -> Result<FactorContext<T>> {
    ctx.resized(ctx.n() * size)
}

/// `(injective, surjective)` for the flattened `T_u`.
pub fn block_cyclic_separating<T: Real>(u: &BlockVector<T>, ctx: &FactorContext<T>) -> Result<(bool, bool)> {
    let flat_ctx = flattened_context(ctx, u.size())?;
    let t = assemble_t_u(u, ctx)?.to_flat();
    let pair = operator_from_vector(&t, &flat_ctx)?;
    Ok((is_cyclic(&pair, &flat_ctx), is_separating(&pair, &flat_ctx)))
}

/// Definitional check over `R_N = M_{nN}` and its commutant: whether the
/// orbits of `u` under each span the whole truncated space.
pub fn block_span_oracle<T: Real>(u: &BlockVector<T>, ctx: &FactorContext<T>) -> Result<(bool, bool)> {
    let flat = u.to_flat();
    let full = flat.dim() * flat.dim();
    Ok((
        left_span_dimension(&flat, ctx.tol())? == full,
        right_span_dimension(&flat, ctx.tol())? == full,
    ))
}

/// `Σ_{j ≤ N} j⁻² v_j`.
pub fn decaying_vector<T: Real>(ctx: &FactorContext<T>, size: usize) -> Result<BlockVector<T>> {
    let mut u = BlockVector::zeros(ctx.n(), size);
    for (k, v) in basis_vectors(ctx, size)?.iter().enumerate() {
        let w = T::one() / T::lit(((k + 1) * (k + 1)) as f64);
        u = u.add(&v.scale(w))?;
    }
    Ok(u)
}

/// One row of the truncation study for the decaying vector.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StudyRow {
    #[serde(rename = "N")]
    pub size: usize,
    pub trace_t_star_t: f64,
    pub trace_t_t_star: f64,
    pub norm_sq: f64,
    /// `Σ_{j ≤ N} j⁻⁴` evaluated directly.
    pub partial_sum: f64,
    pub sigma_min: f64,
    pub cyclic: bool,
    pub separating: bool,
    /// Change of `tr(T* T)` since the previous row.
    pub trace_increment: Option<f64>,
    /// Change of `‖u‖²` since the previous row.
    pub norm_increment: Option<f64>,
}

pub fn convergence_study<T: Real>(ctx: &FactorContext<T>, sizes: &[usize]) -> Result<Vec<StudyRow>> {
    let mut rows: Vec<StudyRow> = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let u = decaying_vector(ctx, size)?;
        let (tst, tts, norm_sq) = block_trace_condition(&u, ctx)?;
        let (cyclic, separating) = block_cyclic_separating(&u, ctx)?;
        let flat = assemble_t_u(&u, ctx)?.to_flat();
        let sigma_min = flat.singular_values().last().copied().unwrap_or_else(T::zero).as_f64();
        let partial_sum = (1..=size).map(|j| (j as f64).powi(-4)).sum();
        let prev = rows.last();
        rows.push(StudyRow {
            size,
            trace_t_star_t: tst.as_f64(),
            trace_t_t_star: tts.as_f64(),
            norm_sq: norm_sq.as_f64(),
            partial_sum,
            sigma_min,
            cyclic,
            separating,
            trace_increment: prev.map(|p| (tst.as_f64() - p.trace_t_star_t).abs()),
            norm_increment: prev.map(|p| (norm_sq.as_f64() - p.norm_sq).abs()),
        });
    }
    Ok(rows)
}
