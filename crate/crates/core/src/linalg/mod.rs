//! Dense complex matrix helpers shared by the super-operator algebra and the
//! fixed-point solvers.

mod schur;

pub use schur::{solve_sylvester_upper, ComplexSchur, SchurError};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Double-precision complex scalar.
pub type C64 = Complex64;

/// Dense, heap-allocated complex matrix. Operators on `H`, density matrices
/// and matrix representations of super-operators all use this type.
pub type ComplexMatrix = DMatrix<C64>;

/// Dense complex column vector.
pub type ComplexVector = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Kronecker product `a ⊗ b` with the row-major block convention: entry
/// `(i·p + k, j·q + l)` equals `a[(i, j)] · b[(k, l)]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `(a + a†) / 2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * c64(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|x, y| x.total_cmp(y));
    values
}

/// Smallest eigenvalue of the Hermitian part of `a`. Empty matrices report
/// `+∞` so that they pass every positivity threshold.
pub fn min_hermitian_eigenvalue(a: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(a)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// Largest absolute entry, `0` for empty matrices.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_hermitian(a: &ComplexMatrix, eps: f64) -> bool {
    a.is_square() && max_abs_diff(a, &a.adjoint()) <= eps
}

/// Row-major vectorization `vec(A) = (A ⊗ I)|Ψ⟩` with `|Ψ⟩ = Σ_k |kk⟩`.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = a.shape();
    ComplexVector::from_fn(rows * cols, |idx, _| a[(idx / cols, idx % cols)])
}

/// Inverse of [`vectorize`] for a `d × d` operator.
pub fn unvectorize(v: &ComplexVector, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// Maximally mixed state `I/d`.
pub fn maximally_mixed(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d) * c64(1.0 / d as f64, 0.0)
}

/// Trace of a square matrix.
pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}
