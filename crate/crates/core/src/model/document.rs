//! JSON model documents.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "states": ["l0", "l1"],
//!   "atoms": ["done"],
//!   "labels": {"l1": ["done"]},
//!   "superops": {
//!     "F": {"builtin": "set_state", "args": [[[0.70710678, 0.0], [0.70710678, 0.0]]]},
//!     "H": {"scale": [0.5, "F"]}
//!   },
//!   "transitions": [
//!     {"from": "l0", "to": "l1", "op": "F"},
//!     {"from": "l1", "to": "l1", "op": {"builtin": "identity"}}
//!   ]
//! }
//! ```
//!
//! A super-operator definition is exactly one of `builtin` (+ `args`),
//! `kraus` (list of matrices), `matrix` (a `d² × d²` representation), `sum`,
//! `scale` (`[p, op]`) or `compose` (`[A, B, …]` meaning `A ∘ B ∘ …`, the
//! last one applied first). Operands are either names from the `superops`
//! table or inline definitions. Complex scalars are `[re, im]` pairs; a bare
//! number is read as a real scalar.

use super::{builtin_superop, ModelError, QmcModel, DEFAULT_STOCHASTIC_TOL};
use crate::linalg::{ComplexMatrix, C64};
use crate::superop::SuperOp;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Complex([f64; 2]),
    Real(f64),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Complex([re, im]) => C64::new(re, im),
            Scalar::Real(re) => C64::new(re, 0.0),
        }
    }
}

impl From<C64> for Scalar {
    fn from(z: C64) -> Self {
        Scalar::Complex([z.re, z.im])
    }
}

type MatrixDoc = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpRef {
    Name(String),
    Inline(Box<OpDef>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<Vec<OpRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<(f64, OpRef)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compose: Option<Vec<OpRef>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub to: String,
    pub op: OpRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub dimension: usize,
    pub states: Vec<String>,
    #[serde(default)]
    pub atoms: Vec<String>,
    #[serde(default)]
    pub labels: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub superops: BTreeMap<String, OpDef>,
    pub transitions: Vec<TransitionDoc>,
}

impl ModelDocument {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents serialize")
    }

    /// Resolves names and builds the model without checking row sums.
    pub fn into_model(self) -> Result<QmcModel, ModelError> {
        if self.dimension == 0 || self.dimension > super::MAX_DIMENSION {
            return Err(ModelError::UnsupportedDimension(self.dimension));
        }
        let mut resolver = Resolver {
            dim: self.dimension,
            defs: &self.superops,
            done: BTreeMap::new(),
            active: HashSet::new(),
        };
        for name in self.superops.keys() {
            resolver.named(name)?;
        }
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for tr in &self.transitions {
            let op = resolver.resolve(&tr.op, None)?;
            transitions.push((tr.from.clone(), tr.to.clone(), op));
        }
        let table = resolver.done;
        QmcModel::from_parts(
            self.dimension,
            self.states,
            self.atoms,
            &self.labels,
            transitions,
            table,
        )
    }

    /// Writes a model back out. Every super-operator becomes a literal
    /// (`kraus` when a Kraus set is known, `matrix` otherwise).
    pub fn from_model(model: &QmcModel) -> Self {
        let mut labels = BTreeMap::new();
        for s in 0..model.num_states() {
            let l = model.labels(s);
            if !l.is_empty() {
                labels.insert(model.state_name(s).to_string(), l.iter().cloned().collect());
            }
        }
        let superops = model
            .superops()
            .iter()
            .map(|(name, op)| (name.clone(), literal(op)))
            .collect();
        let transitions = model
            .transitions()
            .map(|((s, t), op)| TransitionDoc {
                from: model.state_name(s).to_string(),
                to: model.state_name(t).to_string(),
                op: OpRef::Inline(Box::new(literal(op))),
            })
            .collect();
        Self {
            dimension: model.dim(),
            states: model.states().to_vec(),
            atoms: model.atoms().to_vec(),
            labels,
            superops,
            transitions,
        }
    }
}

fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Scalar::from(m[(i, j)])).collect())
        .collect()
}

fn literal(op: &SuperOp) -> OpDef {
    match op.kraus() {
        Some(kraus) => OpDef {
            kraus: Some(kraus.iter().map(matrix_doc).collect()),
            ..OpDef::default()
        },
        None => OpDef {
            matrix: Some(matrix_doc(op.matrix_rep())),
            ..OpDef::default()
        },
    }
}

/// Parses, resolves and validates a model document with the default
/// row-sum tolerance.
pub fn load_model(text: &str) -> Result<QmcModel, ModelError> {
    let model = load_model_unchecked(text)?;
    let report = model.validate(DEFAULT_STOCHASTIC_TOL);
    if report.is_valid() {
        Ok(model)
    } else {
        Err(ModelError::Invalid(report))
    }
}

/// Parses and resolves a model document but skips [`QmcModel::validate`].
pub fn load_model_unchecked(text: &str) -> Result<QmcModel, ModelError> {
    ModelDocument::parse(text)?.into_model()
}

struct Resolver<'a> {
    dim: usize,
    defs: &'a BTreeMap<String, OpDef>,
    done: BTreeMap<String, SuperOp>,
    active: HashSet<String>,
}

impl Resolver<'_> {
    fn named(&mut self, name: &str) -> Result<SuperOp, ModelError> {
        if let Some(op) = self.done.get(name) {
            return Ok(op.clone());
        }
        let def = self
            .defs
            .get(name)
            .ok_or_else(|| ModelError::UnknownSuperOp(name.to_string()))?;
        if !self.active.insert(name.to_string()) {
            return Err(ModelError::CyclicDefinition(name.to_string()));
        }
        let op = self.define(def, Some(name))?;
        self.active.remove(name);
        self.done.insert(name.to_string(), op.clone());
        Ok(op)
    }

    fn resolve(&mut self, r: &OpRef, context: Option<&str>) -> Result<SuperOp, ModelError> {
        match r {
            OpRef::Name(name) => self.named(name),
            OpRef::Inline(def) => self.define(def, context),
        }
    }

    fn matrix(&self, doc: &MatrixDoc, size: usize, name: Option<&str>) -> Result<ComplexMatrix, ModelError> {
        if doc.len() != size || doc.iter().any(|row| row.len() != size) {
            return Err(invalid(name, format!("expected a {size}×{size} matrix")));
        }
        Ok(ComplexMatrix::from_fn(size, size, |i, j| doc[i][j].value()))
    }

    fn define(&mut self, def: &OpDef, name: Option<&str>) -> Result<SuperOp, ModelError> {
        let kinds = [
            def.builtin.is_some(),
            def.kraus.is_some(),
            def.matrix.is_some(),
            def.sum.is_some(),
            def.scale.is_some(),
            def.compose.is_some(),
        ];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err(invalid(
                name,
                "exactly one of builtin, kraus, matrix, sum, scale, compose is required".into(),
            ));
        }
        if def.args.is_some() && def.builtin.is_none() {
            return Err(invalid(name, "`args` is only valid with `builtin`".into()));
        }
        let d = self.dim;
        if let Some(builtin) = &def.builtin {
            let args: Vec<Vec<C64>> = def
                .args
                .iter()
                .flatten()
                .map(|v| v.iter().map(|s| s.value()).collect())
                .collect();
            return Ok(builtin_superop(builtin, &args, d)?);
        }
        if let Some(kraus) = &def.kraus {
            let mats = kraus
                .iter()
                .map(|m| self.matrix(m, d, name))
                .collect::<Result<Vec<_>, _>>()?;
            return SuperOp::from_kraus_with_dim(d, mats).map_err(|e| invalid(name, e.to_string()));
        }
        if let Some(matrix) = &def.matrix {
            let rep = self.matrix(matrix, d * d, name)?;
            let op = SuperOp::from_matrix_rep(d, rep).map_err(|e| invalid(name, e.to_string()))?;
            if !op.is_completely_positive(1e-9) {
                return Err(invalid(name, "matrix representation is not completely positive".into()));
            }
            return Ok(op);
        }
        if let Some(terms) = &def.sum {
            let mut acc = SuperOp::zero(d);
            for term in terms {
                acc = acc.add(&self.resolve(term, name)?)?;
            }
            return Ok(acc);
        }
        if let Some((p, operand)) = &def.scale {
            let op = self.resolve(operand, name)?;
            return op.scale(*p).map_err(|e| invalid(name, e.to_string()));
        }
        if let Some(factors) = &def.compose {
            let mut acc = SuperOp::identity(d);
            for f in factors {
                acc = acc.compose(&self.resolve(f, name)?)?;
            }
            return Ok(acc);
        }
        unreachable!("definition kind checked above")
    }
}

fn invalid(name: Option<&str>, message: String) -> ModelError {
    ModelError::InvalidDefinition {
        name: name.map(str::to_string),
        message,
    }
}
