//! Complex Schur decomposition with eigenvalue reordering.
//!
//! `A = Q T Q†` with `Q` unitary and `T` upper triangular. The QR sweep is the
//! textbook single-shift Hessenberg iteration (Wilkinson shifts, with periodic
//! exceptional shifts so that unitary and nilpotent inputs cannot stall).
//! Diagonal entries of `T` can be moved with unitary Givens swaps so that a
//! selected part of the spectrum occupies the leading block; the leading
//! columns of `Q` then span the matching invariant subspace.

use super::{c64, ComplexMatrix, C64};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchurError {
    #[error("Schur decomposition needs a square matrix, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("QR iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct ComplexSchur {
    /// Unitary Schur vectors.
    pub q: ComplexMatrix,
    /// Upper triangular Schur form.
    pub t: ComplexMatrix,
}

/// Unitary `U = [[u1, -ū2], [u2, ū1]]` whose first column is `(a, b)/‖(a, b)‖`.
/// `U† (a, b)ᵀ = (‖(a, b)‖, 0)ᵀ`.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    u1: C64,
    u2: C64,
}

impl Rotation {
    fn new(a: C64, b: C64) -> Option<Self> {
        let r = a.norm().hypot(b.norm());
        if r == 0.0 {
            None
        } else {
            Some(Self { u1: a / r, u2: b / r })
        }
    }

    /// Rows `k, k+1` ← `U†` rows, over columns `cols`.
    fn apply_left(&self, m: &mut ComplexMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = self.u1.conj() * x + self.u2.conj() * y;
            m[(k + 1, j)] = -self.u2 * x + self.u1 * y;
        }
    }

    /// Columns `k, k+1` ← columns times `U`, over rows `rows`.
    fn apply_right(&self, m: &mut ComplexMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, k)];
            let y = m[(i, k + 1)];
            m[(i, k)] = x * self.u1 + y * self.u2;
            m[(i, k + 1)] = -x * self.u2.conj() + y * self.u1.conj();
        }
    }
}

impl ComplexSchur {
    pub fn new(a: &ComplexMatrix) -> Result<Self, SchurError> {
        let (rows, cols) = a.shape();
        if rows != cols {
            return Err(SchurError::NotSquare { rows, cols });
        }
        if !super::is_finite(a) {
            return Err(SchurError::NonFinite);
        }
        let (mut h, mut q) = hessenberg(a);
        qr_iterate(&mut h, &mut q)?;
        // Clean the strictly lower part; it holds only rounding noise now.
        let n = h.nrows();
        for j in 0..n {
            for i in j + 1..n {
                h[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        Ok(Self { q, t: h })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diagonal().iter().copied().collect()
    }

    /// Swaps the diagonal entries at `k` and `k + 1` by a unitary similarity.
    fn swap(&mut self, k: usize) {
        let n = self.dim();
        let t11 = self.t[(k, k)];
        let t22 = self.t[(k + 1, k + 1)];
        if t11 == t22 {
            return;
        }
        let Some(rot) = Rotation::new(self.t[(k, k + 1)], t22 - t11) else {
            return;
        };
        rot.apply_left(&mut self.t, k, k..n);
        rot.apply_right(&mut self.t, k, 0..k + 2);
        rot.apply_right(&mut self.q, k, 0..n);
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
        self.t[(k + 1, k)] = C64::new(0.0, 0.0);
    }

    /// Moves every eigenvalue accepted by `select` into the leading block,
    /// preserving relative order inside each group. Returns the size of the
    /// leading block.
    pub fn reorder<F: Fn(C64) -> bool>(&mut self, select: F) -> usize {
        let n = self.dim();
        let mut leading = 0;
        for j in 0..n {
            if select(self.t[(j, j)]) {
                let mut pos = j;
                while pos > leading {
                    self.swap(pos - 1);
                    pos -= 1;
                }
                leading += 1;
            }
        }
        leading
    }
}

/// Householder reduction to upper Hessenberg form: returns `(H, Q)` with
/// `A = Q H Q†`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut v: Vec<C64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            c64(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv†) H over rows k+1..n.
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in 0..len {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        // H ← H (I − 2vv†), Q ← Q (I − 2vv†) over columns k+1..n.
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = C64::new(0.0, 0.0);
                for j in 0..len {
                    dot += m[(i, k + 1 + j)] * v[j];
                }
                for j in 0..len {
                    m[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn qr_iterate(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<(), SchurError> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let ulp = f64::EPSILON;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_sweeps = 60 * n;
    let mut sweeps = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[(lo, lo - 1)].norm() <= ulp * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(SchurError::NoConvergence { iterations: sweeps });
        }
        let shift = match since_deflation % 30 {
            10 => h[(lo, lo)] + h[(lo + 1, lo)].re.abs() * 0.75,
            20 => h[(hi, hi)] + h[(hi, hi - 1)].re.abs() * 0.75,
            0 => h[(hi, hi)] + c64(0.0, 0.75 * h[(hi, hi - 1)].norm()),
            _ => wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            ),
        };
        qr_step(h, q, lo, hi, shift);
    }
    Ok(())
}

/// One explicit shifted QR step on the active window `lo..=hi`, applied as a
/// similarity to the whole matrix.
fn qr_step(h: &mut ComplexMatrix, q: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    let n = h.nrows();
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let rot = Rotation::new(h[(k, k)], h[(k + 1, k)]);
        if let Some(rot) = rot {
            rot.apply_left(h, k, k..n);
            h[(k + 1, k)] = C64::new(0.0, 0.0);
        }
        rotations.push(rot);
    }
    for (offset, rot) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        if let Some(rot) = rot {
            rot.apply_right(h, k, 0..(k + 2).min(hi + 1));
            rot.apply_right(q, k, 0..n);
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// Solves `A Y − Y B = C` for upper triangular `A` (k×k) and `B` (m×m) by
/// column-wise back substitution. Requires disjoint diagonals.
pub fn solve_sylvester_upper(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    let k = a.nrows();
    let m = b.nrows();
    let mut y = ComplexMatrix::zeros(k, m);
    for j in 0..m {
        let mut rhs: Vec<C64> = (0..k).map(|r| c[(r, j)]).collect();
        for i in 0..j {
            let bij = b[(i, j)];
            if bij != C64::new(0.0, 0.0) {
                for r in 0..k {
                    rhs[r] += y[(r, i)] * bij;
                }
            }
        }
        let bjj = b[(j, j)];
        for r in (0..k).rev() {
            let mut acc = rhs[r];
            for col in r + 1..k {
                acc -= a[(r, col)] * y[(col, j)];
            }
            y[(r, j)] = acc / (a[(r, r)] - bjj);
        }
    }
    y
}
