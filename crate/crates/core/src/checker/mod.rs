//! Model checking: satisfaction sets and the accumulated super-operators
//! `Q^M(s, φ)` of path formulas.
//!
//! Every recurrence composes "accumulated future ∘ current edge", so the
//! earliest transition is applied first. Order decisions look only at trace
//! operators.

mod lfp;
mod sat;

pub use lfp::{
    lfp_closed_form, lfp_closed_form_with_cut, lfp_kleene, AMBIGUITY_BAND, DEFAULT_SPECTRAL_CUT,
};
pub use sat::{sat, Checker, SatResult, StateVerdict, ThresholdEvidence};

use crate::linalg::{min_hermitian_eigenvalue, ComplexMatrix, SchurError};
use crate::logic::{BoundError, Direction};
use crate::model::{QmcModel, DEFAULT_STOCHASTIC_TOL};
use crate::superop::{trace_gap, SuperOp};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A set of state indices.
pub type StateSet = BTreeSet<usize>;

pub const DEFAULT_KLEENE_TOL: f64 = 1e-12;
pub const DEFAULT_KLEENE_MAX_ITER: usize = 100_000;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("fixed-point hypothesis fails at `{state}`: outgoing weight exceeds I_H by {excess:.3e}")]
    Hypothesis { state: String, excess: f64 },
    #[error("eigenvalue of modulus {modulus:.12} lies too close to the spectral cut to classify")]
    AmbiguousSpectrum { modulus: f64 },
    #[error("fixed-point iteration did not converge after {iterations} steps (last change {change:.3e})")]
    NoConvergence { iterations: usize, change: f64 },
    #[error("matrix (I - T) is singular on the retained spectrum")]
    Singular,
    #[error(transparent)]
    Schur(#[from] SchurError),
    #[error("unbounded path formula `{0}` needs a step bound here")]
    Unbounded(String),
}

/// Solver for unbounded until.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UntilMethod {
    /// Spectrally truncated closed form `M_G (I − M̃_T)^{-1}`.
    #[default]
    Closed,
    /// Fixed-point iteration from the all-zero vector.
    Kleene,
}

impl fmt::Display for UntilMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UntilMethod::Closed => "closed",
            UntilMethod::Kleene => "kleene",
        })
    }
}

impl FromStr for UntilMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(UntilMethod::Closed),
            "kleene" => Ok(UntilMethod::Kleene),
            other => Err(format!("unknown method `{other}` (expected closed or kleene)")),
        }
    }
}

/// One super-operator per state of an ordered index set.
#[derive(Debug, Clone)]
pub struct QVector {
    index: Vec<usize>,
    ops: Vec<SuperOp>,
}

impl QVector {
    pub fn new(index: Vec<usize>, ops: Vec<SuperOp>) -> Self {
        assert_eq!(index.len(), ops.len(), "one operator per indexed state");
        Self { index, ops }
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn ops(&self) -> &[SuperOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// The entry for state `s`, if `s` is indexed.
    pub fn get(&self, s: usize) -> Option<&SuperOp> {
        self.index.iter().position(|&i| i == s).map(|p| &self.ops[p])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &SuperOp)> + '_ {
        self.index.iter().copied().zip(self.ops.iter())
    }
}

/// A square matrix of super-operators over an ordered index set, stored row
/// major: `entry(i, j)` is `T_{index[i], index[j]}`.
#[derive(Debug, Clone)]
pub struct QMatrix {
    dim: usize,
    index: Vec<usize>,
    entries: Vec<SuperOp>,
}

impl QMatrix {
    pub fn new(dim: usize, index: Vec<usize>, entries: Vec<SuperOp>) -> Self {
        assert_eq!(entries.len(), index.len() * index.len(), "square block layout");
        Self { dim, index, entries }
    }

    /// `T = (Q(t, s))_{s,t}`: row `t`, column `s` holds the edge `s → t`.
    pub fn transposed_transitions(model: &QmcModel, index: &[usize]) -> Self {
        let n = index.len();
        let mut entries = Vec::with_capacity(n * n);
        for &t in index {
            for &s in index {
                entries.push(model.weight(s, t).without_kraus());
            }
        }
        Self::new(model.dim(), index.to_vec(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> &SuperOp {
        &self.entries[i * self.len() + j]
    }

    /// The `n d² × n d²` block matrix whose `(i, j)` block is `M_{T_{i,j}}`.
    pub fn block_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let b = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(n * b, n * b);
        for i in 0..n {
            for j in 0..n {
                m.view_mut((i * b, j * b), (b, b))
                    .copy_from(self.entry(i, j).matrix_rep());
            }
        }
        m
    }
}

/// Verifies `Σ_i T_{i,j} + G_j ≲ I_H` for every column `j`.
pub fn check_column_hypothesis(
    model_states: Option<&QmcModel>,
    t: &QMatrix,
    g: &QVector,
    eps: f64,
) -> Result<(), CheckError> {
    let d = t.dim();
    let identity = ComplexMatrix::identity(d, d);
    for j in 0..t.len() {
        let mut total = g.ops()[j].trace_operator().into_matrix();
        for i in 0..t.len() {
            total += t.entry(i, j).trace_operator().matrix();
        }
        let excess = -min_hermitian_eigenvalue(&(&identity - total));
        if excess > eps {
            let s = t.index()[j];
            let state = model_states
                .map(|m| m.state_name(s).to_string())
                .unwrap_or_else(|| format!("#{s}"));
            return Err(CheckError::Hypothesis { state, excess });
        }
    }
    Ok(())
}

/// Min eigenvalue of the trace-operator difference in the direction of the
/// comparison: `T_E − T_q` for `≲`, `T_q − T_E` for `≳`. The threshold holds
/// when this is `≥ −eps`.
pub fn threshold_gap(q: &SuperOp, bound: &SuperOp, direction: Direction) -> f64 {
    match direction {
        Direction::AtMost => trace_gap(q, bound),
        Direction::AtLeast => trace_gap(bound, q),
    }
}

/// `q ≲ bound` or `q ≳ bound`, relaxed by `eps`.
pub fn check_threshold(q: &SuperOp, bound: &SuperOp, direction: Direction, eps: f64) -> bool {
    threshold_gap(q, bound, direction) >= -eps
}

fn all_states(model: &QmcModel) -> Vec<usize> {
    (0..model.num_states()).collect()
}

/// `Σ_{t ∈ target} Q(s, t)` for every state `s`.
pub fn q_next(model: &QmcModel, target: &StateSet) -> QVector {
    let ops = (0..model.num_states())
        .map(|s| model.row_sum(s, target.iter().copied()))
        .collect();
    QVector::new(all_states(model), ops)
}

/// `Q^M(s, Φ U^{≤k} Ψ)` for every state, by dynamic programming over `k`
/// layers.
pub fn q_bounded_until(model: &QmcModel, sat_phi: &StateSet, sat_psi: &StateSet, k: usize) -> QVector {
    let n = model.num_states();
    let d = model.dim();
    let b = d * d;
    let identity = ComplexMatrix::identity(b, b);
    let zero = ComplexMatrix::zeros(b, b);
    let base = |s: usize| {
        if sat_psi.contains(&s) {
            identity.clone()
        } else {
            zero.clone()
        }
    };
    let mut layer: Vec<ComplexMatrix> = (0..n).map(base).collect();
    for _ in 0..k {
        let next = (0..n)
            .map(|s| {
                if sat_psi.contains(&s) || !sat_phi.contains(&s) {
                    return base(s);
                }
                let mut acc = zero.clone();
                for &t in model.successors(s) {
                    let edge = model.transition(s, t).expect("successor edge");
                    acc += &layer[t] * edge.matrix_rep();
                }
                acc
            })
            .collect();
        layer = next;
    }
    let ops = layer
        .into_iter()
        .map(|m| SuperOp::from_matrix_rep(d, m).expect("d² × d² block"))
        .collect();
    QVector::new(all_states(model), ops)
}

/// States that cannot reach `targets` along nonzero edges.
fn cannot_reach(model: &QmcModel, targets: &StateSet) -> StateSet {
    let mut seen: StateSet = targets.clone();
    let mut queue: VecDeque<usize> = targets.iter().copied().collect();
    while let Some(t) = queue.pop_front() {
        for &s in model.predecessors(t) {
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    (0..model.num_states()).filter(|s| !seen.contains(s)).collect()
}

/// A set `S⁰` with `S ∖ (Sat(Φ) ∪ Sat(Ψ)) ⊆ S⁰` on which the until weight is
/// certainly `≂ 0_H`.
///
/// Starts from the states with no path to `Sat(Ψ)` plus those outside both
/// sets, then repeatedly adds any `s ∉ Sat(Ψ)` whose mass into the current set
/// plus its own self-loop is `≂ I_H`.
pub fn compute_s0(model: &QmcModel, sat_phi: &StateSet, sat_psi: &StateSet) -> StateSet {
    let tol = DEFAULT_STOCHASTIC_TOL;
    let mut r = cannot_reach(model, sat_psi);
    r.extend((0..model.num_states()).filter(|s| !sat_phi.contains(s) && !sat_psi.contains(s)));
    let identity = SuperOp::identity(model.dim());
    loop {
        let added: Vec<usize> = (0..model.num_states())
            .filter(|s| !r.contains(s) && !sat_psi.contains(s))
            .filter(|&s| {
                let escape = model.row_sum(s, r.iter().copied());
                let stay = model.weight(s, s);
                escape.add(&stay).expect("same dimension").eqsim(&identity, tol)
            })
            .collect();
        if added.is_empty() {
            return r;
        }
        r.extend(added);
    }
}

/// A set `Sᴵ ⊇ Sat(Ψ)` on which the until weight is certainly `≂ I_H`: grows
/// `Sat(Ψ)` by `Sat(Φ)` states whose mass into the current set is `≂ I_H`.
pub fn compute_si(model: &QmcModel, sat_phi: &StateSet, sat_psi: &StateSet) -> StateSet {
    let tol = DEFAULT_STOCHASTIC_TOL;
    let identity = SuperOp::identity(model.dim());
    let mut r = sat_psi.clone();
    loop {
        let added: Vec<usize> = sat_phi
            .iter()
            .copied()
            .filter(|s| !r.contains(s))
            .filter(|&s| model.row_sum(s, r.iter().copied()).eqsim(&identity, tol))
            .collect();
        if added.is_empty() {
            return r;
        }
        r.extend(added);
    }
}

/// Result of an unbounded-until computation.
#[derive(Debug, Clone)]
pub struct UntilSolution {
    /// `Q^M(s, Φ U Ψ)` for every state.
    pub values: QVector,
    pub s0: StateSet,
    pub si: StateSet,
    /// Solver that produced the `S^?` entries. Differs from the requested
    /// one when the closed form fell back to iteration.
    pub method: UntilMethod,
}

/// The system `(T, G̃)` over `S^? = S ∖ (S⁰ ∪ Sᴵ)`.
pub fn until_system(model: &QmcModel, s0: &StateSet, si: &StateSet) -> (QMatrix, QVector) {
    let unknown: Vec<usize> = (0..model.num_states())
        .filter(|s| !s0.contains(s) && !si.contains(s))
        .collect();
    let t = QMatrix::transposed_transitions(model, &unknown);
    let g_ops = unknown
        .iter()
        .map(|&s| model.row_sum(s, si.iter().copied()))
        .collect();
    (t, QVector::new(unknown, g_ops))
}

/// Solves the until system for given `S⁰` and `Sᴵ` and extends the result
/// with `0_H` on `S⁰` and `I_H` on `Sᴵ`.
pub fn solve_until(
    model: &QmcModel,
    s0: StateSet,
    si: StateSet,
    method: UntilMethod,
) -> Result<UntilSolution, CheckError> {
    let (t, g) = until_system(model, &s0, &si);
    check_column_hypothesis(Some(model), &t, &g, DEFAULT_STOCHASTIC_TOL)?;
    let (solved, used) = match method {
        UntilMethod::Kleene => (
            lfp_kleene(&t, &g, DEFAULT_KLEENE_MAX_ITER, DEFAULT_KLEENE_TOL)?,
            UntilMethod::Kleene,
        ),
        UntilMethod::Closed => match lfp_closed_form(&t, &g) {
            Ok(v) => (v, UntilMethod::Closed),
            Err(CheckError::AmbiguousSpectrum { .. } | CheckError::Schur(_) | CheckError::Singular) => (
                lfp_kleene(&t, &g, DEFAULT_KLEENE_MAX_ITER, DEFAULT_KLEENE_TOL)?,
                UntilMethod::Kleene,
            ),
            Err(e) => return Err(e),
        },
    };
    let d = model.dim();
    let ops = (0..model.num_states())
        .map(|s| {
            if si.contains(&s) {
                SuperOp::identity(d)
            } else if s0.contains(&s) {
                SuperOp::zero(d)
            } else {
                solved.get(s).expect("unknown state solved").clone()
            }
        })
        .collect();
    Ok(UntilSolution {
        values: QVector::new(all_states(model), ops),
        s0,
        si,
        method: used,
    })
}

/// `Q^M(s, Φ U Ψ)` for every state, with `S⁰`/`Sᴵ` from the graph
/// pre-computation.
pub fn q_until(
    model: &QmcModel,
    sat_phi: &StateSet,
    sat_psi: &StateSet,
    method: UntilMethod,
) -> Result<QVector, CheckError> {
    until_with_precomputation(model, sat_phi, sat_psi, method).map(|s| s.values)
}

/// Like [`q_until`], also reporting the pre-computed sets and the solver used.
pub fn until_with_precomputation(
    model: &QmcModel,
    sat_phi: &StateSet,
    sat_psi: &StateSet,
    method: UntilMethod,
) -> Result<UntilSolution, CheckError> {
    let s0 = compute_s0(model, sat_phi, sat_psi);
    let si = compute_si(model, sat_phi, sat_psi);
    solve_until(model, s0, si, method)
}
