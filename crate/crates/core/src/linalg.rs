//! Dense complex linear-algebra helpers shared by the frame and Hamiltonian
//! code: sorted Hermitian eigendecompositions, functions of positive
//! semidefinite matrices, numerical rank, and random orthonormal completion.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{FrameError, Result};
use crate::scalar::{cabs, cplx, creal, lit, to_f64, Real, C};

pub type CMat<T> = DMatrix<C<T>>;
pub type CVec<T> = DVector<C<T>>;

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

/// `(m + m*) / 2`.
pub fn symmetrize<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()).scale(lit(0.5))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending and
/// eigenvectors as the matching columns.
pub fn hermitian_eigen<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Spectral norm of a Hermitian matrix (largest absolute eigenvalue).
pub fn hermitian_norm<T: Real>(m: &CMat<T>) -> T {
    hermitian_eigen(m)
        .0
        .into_iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<T> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank<T: Real>(m: &CMat<T>, rel_tol: T) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Largest entry modulus.
pub fn max_abs_entry<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function<T: Real>(m: &CMat<T>, f: impl Fn(T) -> T) -> CMat<T> {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let diag = CVec::from_iterator(n, values.into_iter().map(|v| creal(f(v))));
    let scaled = CMat::from_fn(n, n, |r, c| vectors[(r, c)] * diag[c]);
    symmetrize(&(scaled * vectors.adjoint()))
}

fn min_eigenvalue<T: Real>(m: &CMat<T>) -> T {
    hermitian_eigen(m).0.first().copied().unwrap_or_else(T::zero)
}

/// Square root of a positive semidefinite matrix. Eigenvalues in
/// `[-floor, floor]` are treated as zero; anything more negative is an error.
pub fn psd_sqrt<T: Real>(m: &CMat<T>, floor: T) -> Result<CMat<T>> {
    let lo = min_eigenvalue(m);
    if lo < -floor {
        return Err(FrameError::NotPositive {
            min_eigenvalue: to_f64(lo),
        });
    }
    Ok(hermitian_function(m, |v| if v <= floor { T::zero() } else { v.sqrt() }))
}

/// Inverse square root of a positive definite matrix; every eigenvalue must
/// exceed `floor`.
pub fn pd_inv_sqrt<T: Real>(m: &CMat<T>, floor: T) -> Result<CMat<T>> {
    let lo = min_eigenvalue(m);
    if lo <= floor {
        return Err(FrameError::NotPositive {
            min_eigenvalue: to_f64(lo),
        });
    }
    Ok(hermitian_function(m, |v| T::one() / v.sqrt()))
}

/// Moore–Penrose inverse of the square root of a positive semidefinite
/// matrix: eigenvalues at or below `floor` map to zero.
pub fn psd_pinv_sqrt<T: Real>(m: &CMat<T>, floor: T) -> CMat<T> {
    hermitian_function(m, |v| if v <= floor { T::zero() } else { T::one() / v.sqrt() })
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_gaussian<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(lit(re * half), lit(im * half))
    })
}

fn project_out<T: Real>(v: &mut CVec<T>, basis: &[CVec<T>]) {
    for q in basis {
        let coeff = q.dotc(v);
        v.axpy(-coeff, q, C::new(T::one(), T::zero()));
    }
}

/// Extends the orthonormal columns of `basis` (rows = ambient dimension) by
/// `extra` further orthonormal columns, returned on their own.
///
/// Gaussian columns are orthogonalized twice against everything accepted so
/// far and redrawn if the residual collapses.
pub fn orthonormal_completion<T: Real, R: Rng + ?Sized>(basis: &CMat<T>, extra: usize, rng: &mut R) -> CMat<T> {
    let rows = basis.nrows();
    if extra == 0 {
        return CMat::zeros(rows, 0);
    }
    let mut accepted: Vec<CVec<T>> = basis.column_iter().map(|c| c.into_owned()).collect();
    let start = accepted.len();
    let keep = lit::<T>(1e-3);
    while accepted.len() < start + extra {
        let mut v: CVec<T> = random_gaussian::<T, R>(rows, 1, rng).column(0).into_owned();
        let before = v.norm();
        project_out(&mut v, &accepted);
        project_out(&mut v, &accepted);
        let after = v.norm();
        if after > keep * before {
            accepted.push(v.unscale(after));
        }
    }
    CMat::from_columns(&accepted[start..])
}

/// Random rank-`rank` orthogonal projector on `C^dim`.
pub fn random_projector<T: Real, R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMat<T> {
    let q = orthonormal_completion(&CMat::<T>::zeros(dim, 0), rank, rng);
    symmetrize(&(&q * q.adjoint()))
}

/// Random unit vector in `C^dim`.
pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVec<T> {
    let v: CVec<T> = random_gaussian::<T, R>(dim, 1, rng).column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}
