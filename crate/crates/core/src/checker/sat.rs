use super::{
    q_bounded_until, q_next, threshold_gap, until_with_precomputation, CheckError, QVector, StateSet,
    UntilMethod,
};
use crate::logic::{resolve_bound, Direction, PathFormula, StateFormula};
use crate::model::QmcModel;
use crate::superop::{SuperOp, DEFAULT_EPS};
use std::collections::HashMap;

/// Verdict of a threshold subformula at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVerdict {
    pub state: usize,
    pub holds: bool,
    /// The comparison was decided within `eps` of the boundary.
    pub marginal: bool,
    /// Min eigenvalue of the trace-operator difference in the comparison's
    /// direction. Negative values below `−eps` mean the threshold fails.
    pub gap: f64,
}

/// Everything computed for one `Q∼E[φ]` subformula.
#[derive(Debug, Clone)]
pub struct ThresholdEvidence {
    pub formula: String,
    pub path: String,
    pub direction: Direction,
    pub bound: SuperOp,
    /// `Q^M(s, φ)` for every state.
    pub values: QVector,
    pub verdicts: Vec<StateVerdict>,
    /// Solver used, for unbounded until only.
    pub method: Option<UntilMethod>,
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub satisfying: StateSet,
    /// Satisfaction set of every subformula, keyed by its printed form, in
    /// evaluation order.
    pub subformulas: Vec<(String, StateSet)>,
    pub evidence: Vec<ThresholdEvidence>,
}

impl SatResult {
    pub fn holds_at(&self, s: usize) -> bool {
        self.satisfying.contains(&s)
    }

    pub fn subformula(&self, text: &str) -> Option<&StateSet> {
        self.subformulas.iter().find(|(f, _)| f == text).map(|(_, s)| s)
    }
}

/// Bottom-up evaluation of state formulas with per-subformula memoization.
pub struct Checker<'m> {
    model: &'m QmcModel,
    eps: f64,
    method: UntilMethod,
    memo: HashMap<String, StateSet>,
    order: Vec<String>,
    evidence: Vec<ThresholdEvidence>,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m QmcModel) -> Self {
        Self {
            model,
            eps: DEFAULT_EPS,
            method: UntilMethod::Closed,
            memo: HashMap::new(),
            order: Vec::new(),
            evidence: Vec::new(),
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_method(mut self, method: UntilMethod) -> Self {
        self.method = method;
        self
    }

    pub fn model(&self) -> &'m QmcModel {
        self.model
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `Sat(Φ)`.
    pub fn sat(&mut self, phi: &StateFormula) -> Result<StateSet, CheckError> {
        let key = phi.to_string();
        if let Some(set) = self.memo.get(&key) {
            return Ok(set.clone());
        }
        let all = || (0..self.model.num_states()).collect::<StateSet>();
        let set = match phi {
            StateFormula::True => all(),
            StateFormula::Atom(a) => {
                if !self.model.has_atom(a) {
                    return Err(CheckError::UnknownAtom(a.clone()));
                }
                (0..self.model.num_states())
                    .filter(|&s| self.model.labels(s).contains(a))
                    .collect()
            }
            StateFormula::Not(f) => {
                let inner = self.sat(f)?;
                all().difference(&inner).copied().collect()
            }
            StateFormula::And(a, b) => {
                let x = self.sat(a)?;
                let y = self.sat(b)?;
                x.intersection(&y).copied().collect()
            }
            StateFormula::Or(a, b) => {
                let x = self.sat(a)?;
                let y = self.sat(b)?;
                x.union(&y).copied().collect()
            }
            StateFormula::Threshold {
                direction,
                bound,
                path,
            } => {
                let bound = resolve_bound(bound, self.model, self.eps)?;
                let (values, method) = self.path_values(path)?;
                let verdicts: Vec<StateVerdict> = values
                    .iter()
                    .map(|(s, q)| {
                        let gap = threshold_gap(q, &bound, *direction);
                        StateVerdict {
                            state: s,
                            holds: gap >= -self.eps,
                            marginal: gap.abs() <= self.eps,
                            gap,
                        }
                    })
                    .collect();
                let set = verdicts.iter().filter(|v| v.holds).map(|v| v.state).collect();
                self.evidence.push(ThresholdEvidence {
                    formula: key.clone(),
                    path: path.to_string(),
                    direction: *direction,
                    bound,
                    values,
                    verdicts,
                    method,
                });
                set
            }
        };
        self.memo.insert(key.clone(), set.clone());
        self.order.push(key);
        Ok(set)
    }

    /// `Q^M(s, φ)` for every state, plus the until solver when one was used.
    pub fn path_values(&mut self, path: &PathFormula) -> Result<(QVector, Option<UntilMethod>), CheckError> {
        let (phi, psi) = path.operands();
        let sat_psi = self.sat(psi)?;
        let sat_phi = match phi {
            Some(phi) => self.sat(phi)?,
            None => (0..self.model.num_states()).collect(),
        };
        Ok(match path {
            PathFormula::Next(_) => (q_next(self.model, &sat_psi), None),
            PathFormula::BoundedUntil(_, _, k) | PathFormula::BoundedEventually(_, k) => {
                (q_bounded_until(self.model, &sat_phi, &sat_psi, *k), None)
            }
            PathFormula::Until(..) | PathFormula::Eventually(_) => {
                let sol = until_with_precomputation(self.model, &sat_phi, &sat_psi, self.method)?;
                (sol.values, Some(sol.method))
            }
        })
    }

    /// Finishes a run rooted at `phi`.
    pub fn finish(mut self, phi: &StateFormula) -> Result<SatResult, CheckError> {
        let satisfying = self.sat(phi)?;
        let subformulas = self
            .order
            .iter()
            .map(|k| (k.clone(), self.memo[k].clone()))
            .collect();
        Ok(SatResult {
            satisfying,
            subformulas,
            evidence: self.evidence,
        })
    }
}

/// `Sat(Φ)` with evidence, using the closed-form until solver.
pub fn sat(model: &QmcModel, phi: &StateFormula, eps: f64) -> Result<SatResult, CheckError> {
    Checker::new(model).with_eps(eps).finish(phi)
}
