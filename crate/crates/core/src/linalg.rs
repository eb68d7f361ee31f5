//! Dense complex helpers: Hermitian spectral calculus, singular values, norms.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::{Real, C};

pub type CMatrix<T> = DMatrix<C<T>>;

/// `(A + A*) / 2`.
pub fn hermitian_part<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let half = C::new(T::lit(0.5), T::zero());
    (a + a.adjoint()) * half
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `a`.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `f(A) = U f(Λ) U*` for Hermitian `A` and real-valued `f`.
pub fn hermitian_fn<T, F>(a: &CMatrix<T>, f: F) -> CMatrix<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let (values, vectors) = hermitian_eigen(a);
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let w = C::new(f(lambda), T::zero());
        scaled.column_mut(c).iter_mut().for_each(|z| *z *= w);
    }
    hermitian_part(&(scaled * vectors.adjoint()))
}

/// Like [`hermitian_fn`] but without the final symmetrization, for non-real `f`.
pub fn normal_fn<T, F>(a: &CMatrix<T>, f: F) -> CMatrix<T>
where
    T: Real,
    F: Fn(T) -> C<T>,
{
    let (values, vectors) = hermitian_eigen(a);
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        scaled.column_mut(c).iter_mut().for_each(|z| *z *= w);
    }
    scaled * vectors.adjoint()
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<T> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Spectral (operator) norm.
pub fn op_norm<T: Real>(a: &CMatrix<T>) -> T {
    singular_values(a).first().copied().unwrap_or_else(T::zero)
}

/// `σ_max / σ_min`; infinite for singular input.
pub fn condition_number<T: Real>(a: &CMatrix<T>) -> T {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => hi / lo,
        _ => T::max_value().unwrap_or_else(|| T::lit(f64::MAX)),
    }
}

/// Numerical rank with threshold `tol * σ_max`.
pub fn rank<T: Real>(a: &CMatrix<T>, tol: T) -> usize {
    let s = singular_values(a);
    let Some(&top) = s.first() else { return 0 };
    if top <= T::zero() {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * top).count()
}

/// Inverse by full-pivot LU. nalgebra's `try_inverse` switches to cofactor
/// formulas up to 4 × 4, which lose several digits on ill-conditioned input.
pub fn inverse<T: Real>(a: &CMatrix<T>) -> Option<CMatrix<T>> {
    a.clone().full_piv_lu().try_inverse()
}
