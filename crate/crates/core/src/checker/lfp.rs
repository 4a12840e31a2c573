//! Least fixed point of `f(X) = X T + G` over vectors of super-operators.
//!
//! In matrix representation the system reads `M_X = M_X 𝕄_T + M_G`, where
//! `M_X` is the block row `[M_{X_1} … M_{X_n}]` and `𝕄_T` the block matrix of
//! [`QMatrix::block_matrix`]. The closed form drops the part of the spectrum
//! of `𝕄_T` on or outside the unit circle and inverts `I − M̃_T` on the rest.

use super::{check_column_hypothesis, CheckError, QMatrix, QVector};
use crate::linalg::{ComplexMatrix, ComplexSchur, C64};
use crate::model::DEFAULT_STOCHASTIC_TOL;
use crate::superop::SuperOp;

/// Eigenvalues with `|λ| ≥ 1 − DEFAULT_SPECTRAL_CUT` are truncated.
pub const DEFAULT_SPECTRAL_CUT: f64 = 1e-8;

/// Eigenvalues with `1 − |λ|` within a factor of this many orders of
/// magnitude of the cut are reported as ambiguous.
pub const AMBIGUITY_BAND: f64 = 100.0;

pub fn lfp_closed_form(t: &QMatrix, g: &QVector) -> Result<QVector, CheckError> {
    lfp_closed_form_with_cut(t, g, DEFAULT_SPECTRAL_CUT)
}

/// Closed form with a custom spectral cut `δ`.
///
/// With `𝕄_T = Z S Z†` (complex Schur, reordered so the `k` eigenvalues with
/// `|λ| < 1 − δ` lead) and `Y` solving `S₁₁ Y − Y S₂₂ = −S₁₂`, the truncated
/// matrix is `Z [S₁₁, −S₁₁ Y; 0, 0] Z†`. `I` minus that is block upper
/// triangular, so the row system `X (I − S̃) = M_G Z` is solved by
/// substitution and `M_X = X Z†`.
pub fn lfp_closed_form_with_cut(t: &QMatrix, g: &QVector, delta: f64) -> Result<QVector, CheckError> {
    check_column_hypothesis(None, t, g, DEFAULT_STOCHASTIC_TOL)?;
    let n = t.len();
    if n == 0 {
        return Ok(QVector::new(Vec::new(), Vec::new()));
    }
    let d = t.dim();
    let b = d * d;
    let big = n * b;
    let mut schur = ComplexSchur::new(&t.block_matrix())?;
    for lambda in schur.eigenvalues() {
        let gap = 1.0 - lambda.norm();
        if gap > delta / AMBIGUITY_BAND && gap < delta * AMBIGUITY_BAND {
            return Err(CheckError::AmbiguousSpectrum {
                modulus: lambda.norm(),
            });
        }
    }
    let k = schur.reorder(|lambda| lambda.norm() < 1.0 - delta);
    let z = &schur.q;
    let s = &schur.t;
    let s11 = s.view((0, 0), (k, k)).clone_owned();
    let s12 = s.view((0, k), (k, big - k)).clone_owned();
    let s22 = s.view((k, k), (big - k, big - k)).clone_owned();
    let y = crate::linalg::solve_sylvester_upper(&s11, &s22, &(-s12));
    let r = g_row(g, d) * z;
    // X₁ (I − S₁₁) = R₁ by forward substitution over columns.
    let mut x1 = ComplexMatrix::zeros(b, k);
    for row in 0..b {
        for j in 0..k {
            let mut acc = r[(row, j)];
            for i in 0..j {
                acc += x1[(row, i)] * s11[(i, j)];
            }
            let pivot = C64::new(1.0, 0.0) - s11[(j, j)];
            if pivot.norm() < f64::EPSILON {
                return Err(CheckError::Singular);
            }
            x1[(row, j)] = acc / pivot;
        }
    }
    let r2 = r.view((0, k), (b, big - k)).clone_owned();
    let x2 = r2 - &x1 * &s11 * &y;
    let mut x = ComplexMatrix::zeros(b, big);
    x.view_mut((0, 0), (b, k)).copy_from(&x1);
    x.view_mut((0, k), (b, big - k)).copy_from(&x2);
    let m = x * z.adjoint();
    Ok(split_row(&m, g.index().to_vec(), d))
}

/// Iterates `X⁽⁰⁾ = 0`, `X⁽ᵏ⁺¹⁾ = X⁽ᵏ⁾ T + G` until successive trace
/// operators differ by less than `tol` in every entry.
pub fn lfp_kleene(t: &QMatrix, g: &QVector, max_iter: usize, tol: f64) -> Result<QVector, CheckError> {
    check_column_hypothesis(None, t, g, DEFAULT_STOCHASTIC_TOL)?;
    let n = t.len();
    if n == 0 {
        return Ok(QVector::new(Vec::new(), Vec::new()));
    }
    let d = t.dim();
    let a = t.block_matrix();
    let gm = g_row(g, d);
    let mut x = ComplexMatrix::zeros(d * d, n * d * d);
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let next = &x * &a + &gm;
        change = max_trace_change(&next, &x, n, d);
        x = next;
        if change < tol {
            return Ok(split_row(&x, g.index().to_vec(), d));
        }
    }
    Err(CheckError::NoConvergence {
        iterations: max_iter,
        change,
    })
}

fn g_row(g: &QVector, d: usize) -> ComplexMatrix {
    let b = d * d;
    let mut m = ComplexMatrix::zeros(b, g.len() * b);
    for (j, op) in g.ops().iter().enumerate() {
        m.view_mut((0, j * b), (b, b)).copy_from(op.matrix_rep());
    }
    m
}

fn split_row(m: &ComplexMatrix, index: Vec<usize>, d: usize) -> QVector {
    let b = d * d;
    let ops = (0..index.len())
        .map(|j| {
            SuperOp::from_matrix_rep(d, m.view((0, j * b), (b, b)).clone_owned())
                .expect("d² × d² block")
        })
        .collect();
    QVector::new(index, ops)
}

/// `max_j max |T(next_j) − T(prev_j)|`, using linearity of the trace operator.
fn max_trace_change(next: &ComplexMatrix, prev: &ComplexMatrix, n: usize, d: usize) -> f64 {
    let b = d * d;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..d {
            for l in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d {
                    let (row, col) = (i * d + i, j * b + l * d + k);
                    acc += next[(row, col)] - prev[(row, col)];
                }
                worst = worst.max(acc.norm());
            }
        }
    }
    worst
}
