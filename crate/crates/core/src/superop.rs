//! Super-operators on a `d`-dimensional Hilbert space.
//!
//! A [`SuperOp`] always carries its `d² × d²` matrix representation
//! `M_E = Σ_i E_i ⊗ conj(E_i)`, which is what every algorithm in this crate
//! computes with. A Kraus set is kept alongside when one was supplied.
//!
//! Operators are vectorized row-major, `vec(A) = (A ⊗ I)|Ψ⟩` with
//! `|Ψ⟩ = Σ_k |kk⟩`, so that `vec(E(A)) = M_E · vec(A)` and composition of
//! maps is the product of their representations.
//!
//! The trace pre-order `E ≲ F` (`tr E(ρ) ≤ tr F(ρ)` for every density `ρ`)
//! and trace equivalence `E ≂ F` depend only on the [`TraceOperator`]
//! `Σ_i E_i† E_i`, which is read directly off the matrix representation.

use crate::linalg::{
    self, c64, kron, max_abs, max_abs_diff, min_hermitian_eigenvalue, ComplexMatrix, C64,
};
use thiserror::Error;

/// Default tolerance for positivity and equivalence decisions.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperOpError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Kraus operator {index} is {rows}×{cols}, expected square")]
    NotSquare { index: usize, rows: usize, cols: usize },
    #[error("cannot infer the dimension of an empty Kraus set")]
    EmptyKraus,
    #[error("scale factor {0} is negative")]
    NegativeScale(f64),
    #[error("matrix representation must be {expected}×{expected}, got {rows}×{cols}")]
    BadRepresentation { expected: usize, rows: usize, cols: usize },
    #[error("non-finite entries")]
    NonFinite,
}

/// Builds `Σ_i E_i ⊗ conj(E_i)`.
pub fn kraus_to_matrix_rep(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix, SuperOpError> {
    let d = kraus_dim(kraus)?;
    let mut rep = ComplexMatrix::zeros(d * d, d * d);
    for k in kraus {
        rep += kron(k, &k.map(|z| z.conj()));
    }
    Ok(rep)
}

fn kraus_dim(kraus: &[ComplexMatrix]) -> Result<usize, SuperOpError> {
    let first = kraus.first().ok_or(SuperOpError::EmptyKraus)?;
    let d = first.nrows();
    for (index, k) in kraus.iter().enumerate() {
        if !k.is_square() {
            return Err(SuperOpError::NotSquare {
                index,
                rows: k.nrows(),
                cols: k.ncols(),
            });
        }
        if k.nrows() != d {
            return Err(SuperOpError::DimensionMismatch {
                expected: d,
                found: k.nrows(),
            });
        }
        if !linalg::is_finite(k) {
            return Err(SuperOpError::NonFinite);
        }
    }
    Ok(d)
}

/// The Hermitian operator `Σ_i E_i† E_i` of a super-operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOperator(ComplexMatrix);

impl TraceOperator {
    pub fn new(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.0)
    }

    pub fn is_psd(&self, eps: f64) -> bool {
        self.min_eigenvalue() >= -eps
    }

    /// Largest absolute entry of `self − other`.
    pub fn distance(&self, other: &TraceOperator) -> f64 {
        max_abs_diff(&self.0, &other.0)
    }

    /// `tr(T ρ)`, the success probability of the map on input `ρ`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        linalg::trace(&(&self.0 * rho)).re
    }
}

/// A completely positive map on `L(H)`, `dim H = d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    dim: usize,
    kraus: Option<Vec<ComplexMatrix>>,
    rep: ComplexMatrix,
}

impl SuperOp {
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self, SuperOpError> {
        let rep = kraus_to_matrix_rep(&kraus)?;
        Ok(Self {
            dim: kraus[0].nrows(),
            kraus: Some(kraus),
            rep,
        })
    }

    /// Like [`SuperOp::from_kraus`] but accepts the empty set (the zero map).
    pub fn from_kraus_with_dim(dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self, SuperOpError> {
        if kraus.is_empty() {
            return Ok(Self::zero(dim));
        }
        let op = Self::from_kraus(kraus)?;
        if op.dim != dim {
            return Err(SuperOpError::DimensionMismatch {
                expected: dim,
                found: op.dim,
            });
        }
        Ok(op)
    }

    /// Wraps a `d² × d²` matrix representation. Complete positivity is not
    /// checked here; see [`SuperOp::is_completely_positive`].
    pub fn from_matrix_rep(dim: usize, rep: ComplexMatrix) -> Result<Self, SuperOpError> {
        let expected = dim * dim;
        if rep.nrows() != expected || rep.ncols() != expected {
            return Err(SuperOpError::BadRepresentation {
                expected,
                rows: rep.nrows(),
                cols: rep.ncols(),
            });
        }
        if !linalg::is_finite(&rep) {
            return Err(SuperOpError::NonFinite);
        }
        Ok(Self {
            dim,
            kraus: None,
            rep,
        })
    }

    /// `I_H`, Kraus set `{I}`.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: Some(vec![ComplexMatrix::identity(dim, dim)]),
            rep: ComplexMatrix::identity(dim * dim, dim * dim),
        }
    }

    /// `0_H`, empty Kraus set.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            kraus: Some(Vec::new()),
            rep: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> Option<&[ComplexMatrix]> {
        self.kraus.as_deref()
    }

    pub fn matrix_rep(&self) -> &ComplexMatrix {
        &self.rep
    }

    /// Drops the Kraus set, keeping only the matrix representation. Long
    /// chains of compositions stay `d⁴`-sized this way.
    pub fn without_kraus(&self) -> Self {
        Self {
            dim: self.dim,
            kraus: None,
            rep: self.rep.clone(),
        }
    }

    /// `T[k][l] = ⟨Ψ| M_E |l⟩|k⟩ = Σ_j M_E[(j·d + j, l·d + k)]`.
    pub fn trace_operator(&self) -> TraceOperator {
        let d = self.dim;
        let m = ComplexMatrix::from_fn(d, d, |k, l| {
            (0..d).map(|j| self.rep[(j * d + j, l * d + k)]).sum()
        });
        TraceOperator(m)
    }

    fn check_dim(&self, other: &SuperOp) -> Result<(), SuperOpError> {
        if self.dim != other.dim {
            return Err(SuperOpError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &SuperOp) -> Result<SuperOp, SuperOpError> {
        self.check_dim(other)?;
        let kraus = match (&self.kraus, &other.kraus) {
            (Some(e), Some(f)) => Some(
                e.iter()
                    .flat_map(|ei| f.iter().map(move |fj| ei * fj))
                    .collect(),
            ),
            _ => None,
        };
        Ok(SuperOp {
            dim: self.dim,
            kraus,
            rep: &self.rep * &other.rep,
        })
    }

    pub fn add(&self, other: &SuperOp) -> Result<SuperOp, SuperOpError> {
        self.check_dim(other)?;
        let kraus = match (&self.kraus, &other.kraus) {
            (Some(e), Some(f)) => Some(e.iter().chain(f.iter()).cloned().collect()),
            _ => None,
        };
        Ok(SuperOp {
            dim: self.dim,
            kraus,
            rep: &self.rep + &other.rep,
        })
    }

    /// `p · E`, Kraus operators scaled by `√p`.
    pub fn scale(&self, p: f64) -> Result<SuperOp, SuperOpError> {
        if p < 0.0 || !p.is_finite() {
            return Err(SuperOpError::NegativeScale(p));
        }
        let root = c64(p.sqrt(), 0.0);
        Ok(SuperOp {
            dim: self.dim,
            kraus: self
                .kraus
                .as_ref()
                .map(|ks| ks.iter().map(|k| k * root).collect()),
            rep: &self.rep * c64(p, 0.0),
        })
    }

    /// Sums a non-empty iterator of super-operators, or returns `0_H` of
    /// dimension `dim` when it is empty.
    pub fn sum<'a, I>(dim: usize, ops: I) -> Result<SuperOp, SuperOpError>
    where
        I: IntoIterator<Item = &'a SuperOp>,
    {
        ops.into_iter()
            .try_fold(SuperOp::zero(dim), |acc, op| acc.add(op))
    }

    /// `E(ρ)` computed through the matrix representation.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, SuperOpError> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(SuperOpError::DimensionMismatch {
                expected: self.dim,
                found: rho.nrows(),
            });
        }
        let v = &self.rep * linalg::vectorize(rho);
        Ok(linalg::unvectorize(&v, self.dim))
    }

    /// `Σ_i E_i ρ E_i†`, available only when a Kraus set is present.
    pub fn apply_kraus(&self, rho: &ComplexMatrix) -> Option<ComplexMatrix> {
        let kraus = self.kraus.as_ref()?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in kraus {
            out += k * rho * k.adjoint();
        }
        Some(out)
    }

    /// `self ≲ other`: `T_other − T_self` is PSD up to `eps`.
    pub fn leq_trace(&self, other: &SuperOp, eps: f64) -> bool {
        self.dim == other.dim && trace_gap(self, other) >= -eps
    }

    /// `self ≂ other`: trace operators agree entrywise within `eps`.
    pub fn eqsim(&self, other: &SuperOp, eps: f64) -> bool {
        self.dim == other.dim
            && self.trace_operator().distance(&other.trace_operator()) <= eps
    }

    /// Membership in `S¹(H)`, i.e. `self ≲ I_H`.
    pub fn is_trace_nonincreasing(&self, eps: f64) -> bool {
        min_hermitian_eigenvalue(&identity_minus(&self.trace_operator())) >= -eps
    }

    /// Choi matrix `Σ_i vec(E_i) vec(E_i)†`, obtained by reshuffling `M_E`:
    /// `J[(i·d + k, j·d + l)] = M_E[(i·d + j, k·d + l)]`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (i, k) = (row / d, row % d);
            let (j, l) = (col / d, col % d);
            self.rep[(i * d + j, k * d + l)]
        })
    }

    /// Complete positivity via the Choi matrix: Hermitian and PSD within `eps`.
    pub fn is_completely_positive(&self, eps: f64) -> bool {
        let choi = self.choi();
        linalg::is_hermitian(&choi, eps.max(1e-12) * (1.0 + max_abs(&choi)))
            && min_hermitian_eigenvalue(&choi) >= -eps
    }
}

/// Minimum eigenvalue of `T_f − T_e`; `e ≲ f` iff this is `≥ −eps`.
pub fn trace_gap(e: &SuperOp, f: &SuperOp) -> f64 {
    let diff = f.trace_operator().into_matrix() - e.trace_operator().into_matrix();
    min_hermitian_eigenvalue(&diff)
}

fn identity_minus(t: &TraceOperator) -> ComplexMatrix {
    let d = t.dim();
    ComplexMatrix::identity(d, d) - t.matrix()
}

/// Convenience constructor for tests and builtins: a real-valued `d × d`
/// matrix given row-major.
pub fn real_matrix(d: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| C64::new(entries[i * d + j], 0.0))
}
