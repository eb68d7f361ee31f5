//! Seeded generators for property sweeps and the CLI's randomized checks.

use nalgebra::ComplexField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::finite_factor::MatrixElement;
use crate::linalg::CMatrix;
use crate::scalar::{real, Real, C};
use crate::spectral::{FactorType, GeometricTail, SpectralData};

/// Deterministic random source; identical seeds give identical streams.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Log-uniform in `[lo, hi]`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        (self.uniform(lo.ln(), hi.ln())).exp()
    }

    /// Matrix with i.i.d. standard complex Gaussian entries.
    pub fn matrix<T: Real>(&mut self, n: usize) -> MatrixElement<T> {
        let mut m = CMatrix::zeros(n, n);
        for z in m.iter_mut() {
            *z = C::new(T::lit(self.normal()), T::lit(self.normal()));
        }
        MatrixElement::from_matrix_unchecked(m)
    }

    /// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
    pub fn unitary<T: Real>(&mut self, n: usize) -> MatrixElement<T> {
        let qr = self.matrix::<T>(n).into_matrix().qr();
        let (mut q, r) = (qr.q(), qr.r());
        for k in 0..n {
            let d = r[(k, k)];
            let norm = d.modulus();
            let phase = if norm > T::zero() { d / real(norm) } else { real(T::one()) };
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        MatrixElement::from_matrix_unchecked(q)
    }

    /// `U diag(s) W*` with the given singular values.
    pub fn with_singular_values<T: Real>(&mut self, s: &[f64]) -> MatrixElement<T> {
        let n = s.len();
        let u = self.unitary::<T>(n);
        let w = self.unitary::<T>(n);
        let d: Vec<T> = s.iter().map(|&x| T::lit(x)).collect();
        &(&u * &MatrixElement::from_diagonal(&d)) * &w.adjoint()
    }

    /// Invertible matrix with condition number drawn log-uniformly from
    /// `[1, max_cond]`. Returns the matrix and its designed condition number.
    pub fn invertible<T: Real>(&mut self, n: usize, max_cond: f64) -> (MatrixElement<T>, f64) {
        let cond = self.log_uniform(1.0, max_cond);
        let scale = self.log_uniform(0.5, 2.0);
        let mut s: Vec<f64> = (0..n)
            .map(|k| match k {
                0 => 1.0,
                k if k == n - 1 => 1.0 / cond,
                _ => self.log_uniform(1.0 / cond, 1.0),
            })
            .collect();
        if n == 1 {
            s[0] = 1.0;
        }
        let s: Vec<f64> = s.into_iter().map(|x| x * scale).collect();
        let cond = if n == 1 { 1.0 } else { cond };
        (self.with_singular_values(&s), cond)
    }

    /// Matrix of exact rank `rank < n` (trailing singular values are zero).
    pub fn rank_deficient<T: Real>(&mut self, n: usize, rank: usize) -> MatrixElement<T> {
        let s: Vec<f64> = (0..n).map(|k| if k < rank { self.log_uniform(0.1, 1.0) } else { 0.0 }).collect();
        self.with_singular_values(&s)
    }

    /// Finite type I datum with total dimension `Σ m_k ≤ max_dim`.
    pub fn finite_type_i(&mut self, max_dim: usize) -> SpectralData {
        let dim = 1 + self.index(max_dim);
        let mut mults = Vec::new();
        let mut left = dim;
        while left > 0 {
            let m = 1 + self.index(left);
            mults.push(m as f64);
            left -= m;
        }
        let mut mus: Vec<f64> = Vec::new();
        // Optionally put the eigenvalues on a lattice so ratios coincide.
        let lattice = self.coin(0.5);
        let base = self.uniform(1.5, 3.0);
        let mut exponents: Vec<i32> = (0..8).collect();
        for _ in 0..mults.len() {
            let mu = if lattice {
                let k = self.index(exponents.len());
                base.powi(-exponents.remove(k))
            } else {
                loop {
                    let mu = self.uniform(0.05, 1.0);
                    if mus.iter().all(|&x| (x - mu).abs() > 1e-3) {
                        break mu;
                    }
                }
            };
            mus.push(mu);
        }
        let head = mus.into_iter().zip(mults).collect();
        SpectralData::normalized(FactorType::TypeIFinite, head, None).expect("generated datum is valid")
    }

    /// Finite datum of type `II_1` (real multiplicities, no tail).
    pub fn finite_type_ii(&mut self, max_head: usize) -> SpectralData {
        let len = 1 + self.index(max_head);
        let head = (0..len).map(|_| (self.uniform(0.01, 1.0), self.uniform(0.05, 3.0))).collect();
        SpectralData::normalized(FactorType::TypeII1, head, None).expect("generated datum is valid")
    }

    /// Infinite-type datum: random head followed by a geometric tail.
    pub fn infinite(&mut self, max_head: usize) -> SpectralData {
        let factor_type = if self.coin(0.5) { FactorType::TypeIInf } else { FactorType::TypeIIInf };
        let integral = factor_type.is_type_i();
        let mult = |s: &mut Self| if integral { (1 + s.index(4)) as f64 } else { s.uniform(0.1, 4.0) };
        let len = self.index(max_head + 1);
        let mut head = Vec::with_capacity(len);
        let mut mu = 1.0;
        for _ in 0..len {
            head.push((mu, mult(self)));
            mu *= self.uniform(0.1, 0.9);
        }
        let ratio = self.uniform(0.05, 0.95);
        let tail = GeometricTail { ratio, mult: mult(self), start: mu };
        SpectralData::normalized(factor_type, head, Some(tail)).expect("generated datum is valid")
    }
}
