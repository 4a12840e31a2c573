//! Quantum Markov chains: a classical state graph whose edges carry
//! super-operators.
//!
//! A [`QmcModel`] is valid when every edge weight is trace non-increasing and
//! every row sums to a trace-preserving map, `Σ_t Q(s, t) ≂ I_H`. Missing
//! edges denote `0_H`; absorbing states need an explicit self-loop.

mod builtin;
mod document;
mod path;

pub use builtin::{builtin_superop, BuiltinError, BUILTIN_NAMES};
pub use document::{load_model, load_model_unchecked, ModelDocument, OpDef, OpRef, Scalar};
pub use path::{path_weight, FinitePath};

use crate::linalg::{max_abs, max_abs_diff, min_hermitian_eigenvalue, ComplexMatrix};
use crate::superop::{SuperOp, SuperOpError, DEFAULT_EPS};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// Largest Hilbert dimension accepted at load time. Matrix representations
/// hold `d⁴` entries.
pub const MAX_DIMENSION: usize = 64;

/// Default tolerance for the row-sum condition `Σ_t Q(s,t) ≂ I`.
pub const DEFAULT_STOCHASTIC_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension {0} is outside the supported range 1..={MAX_DIMENSION}")]
    UnsupportedDimension(usize),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown super-operator `{0}`")]
    UnknownSuperOp(String),
    #[error("super-operator definition `{0}` refers to itself")]
    CyclicDefinition(String),
    #[error("invalid super-operator definition{}: {message}", .name.as_ref().map(|n| format!(" `{n}`")).unwrap_or_default())]
    InvalidDefinition {
        name: Option<String>,
        message: String,
    },
    #[error("duplicate transition {from} -> {to}")]
    DuplicateTransition { from: String, to: String },
    #[error("transition {from} -> {to}: {source}")]
    Transition {
        from: String,
        to: String,
        #[source]
        source: SuperOpError,
    },
    #[error("builtin: {0}")]
    Builtin(#[from] BuiltinError),
    #[error(transparent)]
    SuperOp(#[from] SuperOpError),
    #[error("model is not a valid quantum Markov chain:\n{0}")]
    Invalid(ValidationReport),
    #[error("edge {from} -> {to} has weight 0_H")]
    ZeroEdge { from: String, to: String },
    #[error("path must contain at least one state")]
    EmptyPath,
}

/// A finite quantum Markov chain `(S, Q, AP, L)` over a fixed Hilbert space.
#[derive(Debug, Clone)]
pub struct QmcModel {
    dim: usize,
    states: Vec<String>,
    index: HashMap<String, usize>,
    atoms: Vec<String>,
    labels: Vec<BTreeSet<String>>,
    transitions: BTreeMap<(usize, usize), SuperOp>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    superops: BTreeMap<String, SuperOp>,
}

impl QmcModel {
    /// Assembles a model and checks its structure (names, dimensions). The
    /// row-sum and trace conditions are left to [`QmcModel::validate`].
    pub fn from_parts(
        dim: usize,
        states: Vec<String>,
        atoms: Vec<String>,
        labels: &BTreeMap<String, Vec<String>>,
        transitions: Vec<(String, String, SuperOp)>,
        superops: BTreeMap<String, SuperOp>,
    ) -> Result<Self, ModelError> {
        if dim == 0 || dim > MAX_DIMENSION {
            return Err(ModelError::UnsupportedDimension(dim));
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let mut atom_set = BTreeSet::new();
        for a in &atoms {
            if !atom_set.insert(a.clone()) {
                return Err(ModelError::DuplicateAtom(a.clone()));
            }
        }
        let mut state_labels = vec![BTreeSet::new(); states.len()];
        for (state, props) in labels {
            let &i = index
                .get(state)
                .ok_or_else(|| ModelError::UnknownState(state.clone()))?;
            for p in props {
                if !atom_set.contains(p) {
                    return Err(ModelError::UnknownAtom(p.clone()));
                }
                state_labels[i].insert(p.clone());
            }
        }
        for (name, op) in &superops {
            if op.dim() != dim {
                return Err(ModelError::InvalidDefinition {
                    name: Some(name.clone()),
                    message: format!("dimension {} differs from model dimension {dim}", op.dim()),
                });
            }
        }
        let mut edges = BTreeMap::new();
        for (from, to, op) in transitions {
            let &s = index.get(&from).ok_or_else(|| ModelError::UnknownState(from.clone()))?;
            let &t = index.get(&to).ok_or_else(|| ModelError::UnknownState(to.clone()))?;
            if op.dim() != dim {
                return Err(ModelError::Transition {
                    from,
                    to,
                    source: SuperOpError::DimensionMismatch {
                        expected: dim,
                        found: op.dim(),
                    },
                });
            }
            if edges.insert((s, t), op).is_some() {
                return Err(ModelError::DuplicateTransition { from, to });
            }
        }
        let n = states.len();
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        for (&(s, t), op) in &edges {
            if max_abs(op.matrix_rep()) > 0.0 {
                successors[s].push(t);
                predecessors[t].push(s);
            }
        }
        Ok(Self {
            dim,
            states,
            index,
            atoms,
            labels: state_labels,
            transitions: edges,
            successors,
            predecessors,
            superops,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn has_atom(&self, atom: &str) -> bool {
        self.atoms.iter().any(|a| a == atom)
    }

    pub fn labels(&self, s: usize) -> &BTreeSet<String> {
        &self.labels[s]
    }

    /// `Q(s, t)` if the edge is present.
    pub fn transition(&self, s: usize, t: usize) -> Option<&SuperOp> {
        self.transitions.get(&(s, t))
    }

    /// `Q(s, t)`, with `0_H` for absent edges.
    pub fn weight(&self, s: usize, t: usize) -> SuperOp {
        self.transition(s, t)
            .cloned()
            .unwrap_or_else(|| SuperOp::zero(self.dim))
    }

    /// Every stored edge `((s, t), Q(s, t))` in row-major order.
    pub fn transitions(&self) -> impl Iterator<Item = ((usize, usize), &SuperOp)> + '_ {
        self.transitions.iter().map(|(&k, v)| (k, v))
    }

    /// `post(s) = {t : Q(s,t) ≠ 0_H}`.
    pub fn successors(&self, s: usize) -> &[usize] {
        &self.successors[s]
    }

    pub fn predecessors(&self, t: usize) -> &[usize] {
        &self.predecessors[t]
    }

    /// Named super-operator table from the model document.
    pub fn superop(&self, name: &str) -> Option<&SuperOp> {
        self.superops.get(name)
    }

    pub fn superops(&self) -> &BTreeMap<String, SuperOp> {
        &self.superops
    }

    /// `Σ_{t ∈ targets} Q(s, t)`.
    pub fn row_sum<I>(&self, s: usize, targets: I) -> SuperOp
    where
        I: IntoIterator<Item = usize>,
    {
        let mut rep = ComplexMatrix::zeros(self.dim * self.dim, self.dim * self.dim);
        for t in targets {
            if let Some(op) = self.transition(s, t) {
                rep += op.matrix_rep();
            }
        }
        SuperOp::from_matrix_rep(self.dim, rep).expect("square representation")
    }

    /// Checks the row-sum condition and the per-edge `S¹(H)` and complete
    /// positivity conditions.
    pub fn validate(&self, eps: f64) -> ValidationReport {
        let identity = ComplexMatrix::identity(self.dim, self.dim);
        let mut rows = Vec::with_capacity(self.num_states());
        let mut violations = Vec::new();
        for s in 0..self.num_states() {
            let total = self.row_sum(s, 0..self.num_states()).trace_operator();
            let deviation = max_abs_diff(total.matrix(), &identity);
            rows.push(RowResidual {
                state: self.states[s].clone(),
                deviation,
            });
            if deviation > eps {
                violations.push(Violation::Stochasticity {
                    state: self.states[s].clone(),
                    deviation,
                });
            }
        }
        for (&(s, t), op) in &self.transitions {
            let excess = -min_hermitian_eigenvalue(&(&identity - op.trace_operator().matrix()));
            if excess > eps {
                violations.push(Violation::NotTraceNonincreasing {
                    from: self.states[s].clone(),
                    to: self.states[t].clone(),
                    excess,
                });
            }
            if op.kraus().is_none() && !op.is_completely_positive(DEFAULT_EPS.max(eps)) {
                violations.push(Violation::NotCompletelyPositive {
                    from: self.states[s].clone(),
                    to: self.states[t].clone(),
                    min_choi_eigenvalue: min_hermitian_eigenvalue(&op.choi()),
                });
            }
        }
        ValidationReport {
            tolerance: eps,
            rows,
            violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResidual {
    pub state: String,
    /// `max |Σ_t T(s,t) − I|` over trace-operator entries.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Stochasticity { state: String, deviation: f64 },
    NotTraceNonincreasing { from: String, to: String, excess: f64 },
    NotCompletelyPositive { from: String, to: String, min_choi_eigenvalue: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Stochasticity { state, deviation } => write!(
                f,
                "state `{state}`: outgoing weights are not trace-preserving (deviation {deviation:.3e})"
            ),
            Violation::NotTraceNonincreasing { from, to, excess } => write!(
                f,
                "edge {from} -> {to}: weight exceeds I_H (by {excess:.3e})"
            ),
            Violation::NotCompletelyPositive {
                from,
                to,
                min_choi_eigenvalue,
            } => write!(
                f,
                "edge {from} -> {to}: not completely positive (Choi eigenvalue {min_choi_eigenvalue:.3e})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub rows: Vec<RowResidual>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {v}")?;
        }
        Ok(())
    }
}
