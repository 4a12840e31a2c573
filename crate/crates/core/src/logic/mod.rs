//! Formulas of the quantum branching-time logic.
//!
//! State formulas are built from atoms, `!`, `&`, `|` and the threshold
//! operator `Q<=b[φ]` / `Q>=b[φ]`; path formulas are `X Φ`, `Φ U Ψ`,
//! `Φ U<=k Ψ`, `F Ψ` and `F<=k Ψ`. A bound `b` is a number `p ∈ [0, 1]`
//! (the super-operator `p·I_H`) or `@name`, a super-operator from the model's
//! named table.

mod parser;

pub use parser::{parse_formula, parse_path_formula, FormulaError};

use crate::model::QmcModel;
use crate::superop::SuperOp;
use std::fmt;
use thiserror::Error;

/// Comparison used by a threshold formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `Q^M(s, φ) ≲ E`, written `<=`.
    AtMost,
    /// `Q^M(s, φ) ≳ E`, written `>=`.
    AtLeast,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuperOpBound {
    /// `p · I_H`.
    Scalar(f64),
    /// Entry of the model's `superops` table.
    Named(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateFormula {
    True,
    Atom(String),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
    Threshold {
        direction: Direction,
        bound: SuperOpBound,
        path: Box<PathFormula>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathFormula {
    Next(Box<StateFormula>),
    Until(Box<StateFormula>, Box<StateFormula>),
    BoundedUntil(Box<StateFormula>, Box<StateFormula>, usize),
    Eventually(Box<StateFormula>),
    BoundedEventually(Box<StateFormula>, usize),
}

impl StateFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        StateFormula::Atom(name.into())
    }

    pub fn not(f: StateFormula) -> Self {
        StateFormula::Not(Box::new(f))
    }

    pub fn and(a: StateFormula, b: StateFormula) -> Self {
        StateFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StateFormula, b: StateFormula) -> Self {
        StateFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn threshold(direction: Direction, bound: SuperOpBound, path: PathFormula) -> Self {
        StateFormula::Threshold {
            direction,
            bound,
            path: Box::new(path),
        }
    }

    /// Atoms mentioned anywhere in the formula, in first-occurrence order.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            StateFormula::True => {}
            StateFormula::Atom(a) => {
                if !out.contains(&a.as_str()) {
                    out.push(a)
                }
            }
            StateFormula::Not(f) => f.collect_atoms(out),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            StateFormula::Threshold { path, .. } => {
                let (phi, psi) = path.operands();
                if let Some(phi) = phi {
                    phi.collect_atoms(out);
                }
                psi.collect_atoms(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            StateFormula::Or(..) => 1,
            StateFormula::And(..) => 2,
            _ => 3,
        }
    }
}

impl PathFormula {
    /// `(Φ, Ψ)` for until-shaped formulas, `(None, Ψ)` for `X Ψ`, `F Ψ`
    /// and `F<=k Ψ`.
    pub fn operands(&self) -> (Option<&StateFormula>, &StateFormula) {
        match self {
            PathFormula::Next(f) | PathFormula::Eventually(f) | PathFormula::BoundedEventually(f, _) => (None, f),
            PathFormula::Until(a, b) | PathFormula::BoundedUntil(a, b, _) => (Some(a), b),
        }
    }

    /// Step bound of `U<=k` / `F<=k`.
    pub fn step_bound(&self) -> Option<usize> {
        match self {
            PathFormula::BoundedUntil(_, _, k) | PathFormula::BoundedEventually(_, k) => Some(*k),
            _ => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, PathFormula::Next(_)) || self.step_bound().is_some()
    }

    /// Replaces (or adds) the step bound: `F Ψ` becomes `F<=k Ψ`, `Φ U Ψ`
    /// becomes `Φ U<=k Ψ`. `X Φ` is returned unchanged.
    pub fn with_step_bound(self, k: usize) -> PathFormula {
        match self {
            PathFormula::Until(a, b) | PathFormula::BoundedUntil(a, b, _) => PathFormula::BoundedUntil(a, b, k),
            PathFormula::Eventually(f) | PathFormula::BoundedEventually(f, _) => PathFormula::BoundedEventually(f, k),
            next @ PathFormula::Next(_) => next,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &StateFormula, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for SuperOpBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuperOpBound::Scalar(p) => write!(f, "{p}"),
            SuperOpBound::Named(name) => write!(f, "@{name}"),
        }
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFormula::True => write!(f, "true"),
            StateFormula::Atom(a) => write!(f, "{a}"),
            StateFormula::Not(inner) => {
                write!(f, "!")?;
                write_operand(f, inner, 3)
            }
            StateFormula::And(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, " & ")?;
                write_operand(f, b, 3)
            }
            StateFormula::Or(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " | ")?;
                write_operand(f, b, 2)
            }
            StateFormula::Threshold {
                direction,
                bound,
                path,
            } => write!(f, "Q{}{}[{}]", direction.symbol(), bound, path),
        }
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFormula::Next(a) => write!(f, "X {a}"),
            PathFormula::Until(a, b) => write!(f, "{a} U {b}"),
            PathFormula::BoundedUntil(a, b, k) => write!(f, "{a} U<={k} {b}"),
            PathFormula::Eventually(a) => write!(f, "F {a}"),
            PathFormula::BoundedEventually(a, k) => write!(f, "F<={k} {a}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("unknown super-operator bound `@{0}`")]
    Unknown(String),
    #[error("bound `{0}` is not trace non-increasing")]
    NotSubUnital(String),
    #[error("scalar bound {0} is outside [0, 1]")]
    OutOfRange(f64),
}

/// Resolves a bound against a model: `p` becomes `p · I_H`, `@name` is looked
/// up in the model's super-operator table. Either way the result must satisfy
/// `0_H ≲ E ≲ I_H`.
pub fn resolve_bound(bound: &SuperOpBound, model: &QmcModel, eps: f64) -> Result<SuperOp, BoundError> {
    match bound {
        SuperOpBound::Scalar(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(BoundError::OutOfRange(*p));
            }
            Ok(SuperOp::identity(model.dim()).scale(*p).expect("nonnegative scale"))
        }
        SuperOpBound::Named(name) => {
            let op = model
                .superop(name)
                .ok_or_else(|| BoundError::Unknown(name.clone()))?;
            if !op.is_trace_nonincreasing(eps) {
                return Err(BoundError::NotSubUnital(name.clone()));
            }
            Ok(op.clone())
        }
    }
}
