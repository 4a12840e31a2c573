use super::{ModelError, QmcModel};
use crate::superop::SuperOp;

/// A finite path prefix `s₀ s₁ … sₙ` whose consecutive edges are all nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePath {
    states: Vec<usize>,
}

impl FinitePath {
    pub fn new(model: &QmcModel, states: Vec<usize>) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::EmptyPath);
        }
        for &s in &states {
            if s >= model.num_states() {
                return Err(ModelError::UnknownState(format!("#{s}")));
            }
        }
        for w in states.windows(2) {
            if !model.successors(w[0]).contains(&w[1]) {
                return Err(ModelError::ZeroEdge {
                    from: model.state_name(w[0]).to_string(),
                    to: model.state_name(w[1]).to_string(),
                });
            }
        }
        Ok(Self { states })
    }

    pub fn from_names<S: AsRef<str>>(model: &QmcModel, names: &[S]) -> Result<Self, ModelError> {
        let states = names
            .iter()
            .map(|n| {
                model
                    .state_index(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownState(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(model, states)
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// Number of transitions, `|π̂|`.
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> usize {
        self.states[0]
    }

    pub fn last(&self) -> usize {
        *self.states.last().expect("paths are nonempty")
    }
}

/// Cylinder weight `Q(π̂) = Q(sₙ₋₁, sₙ) ∘ … ∘ Q(s₀, s₁)`, or `I_H` for a
/// single-state path. The earliest transition is applied first.
pub fn path_weight(model: &QmcModel, path: &FinitePath) -> Result<SuperOp, ModelError> {
    let mut acc = SuperOp::identity(model.dim());
    for w in path.states().windows(2) {
        let edge = model.transition(w[0], w[1]).ok_or_else(|| ModelError::ZeroEdge {
            from: model.state_name(w[0]).to_string(),
            to: model.state_name(w[1]).to_string(),
        })?;
        acc = edge.compose(&acc)?;
    }
    Ok(acc)
}
