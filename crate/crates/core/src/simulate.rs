//! Monte-Carlo sampling of qMC trajectories.
//!
//! At state `s` with normalized density `ρ`, successor `t` is drawn with
//! probability `tr(Q(s,t)(ρ))` and the density moves to the normalized
//! post-transition state. The probability of emitting a finite path `π̂` is
//! then `tr(Q(π̂)(ρ₀))`.
//!
//! Sample `i` of a run seeded with `seed` draws from ChaCha8 stream `i` of
//! that seed, so results do not depend on how the work is split across
//! threads.

use crate::checker::{CheckError, Checker, StateSet};
use crate::linalg::{self, ComplexMatrix};
use crate::logic::PathFormula;
use crate::model::{FinitePath, QmcModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Tolerance on the validity of the initial density operator.
pub const DENSITY_TOL: f64 = 1e-9;
/// Branch probabilities whose sum misses 1 by less than this are renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-8;
/// A state whose branch probabilities are all below this is numerically dead.
pub const DEAD_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("initial density is invalid: {0}")]
    InvalidDensity(String),
    #[error("no successor of `{state}` has positive probability")]
    DeadState { state: String },
    #[error("branch probabilities at `{state}` sum to {total:.12}")]
    BranchSum { state: String, total: f64 },
    #[error("path formula `{0}` is unbounded; sample a step-bounded version such as `F<=k` or `U<=k`")]
    Unbounded(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// One sampled trajectory.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub path: FinitePath,
    /// Normalized density at the last state of `path`.
    pub final_density: ComplexMatrix,
    /// For each step, the probability of every successor of the current state.
    pub branch_probabilities: Vec<Vec<(usize, f64)>>,
}

/// A Monte-Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub successes: u64,
    pub samples: u64,
    pub seed: u64,
}

/// Checks that `rho` is a `d×d` density operator (Hermitian, PSD, trace 1).
pub fn check_density(rho: &ComplexMatrix, d: usize) -> Result<(), SimulateError> {
    let bad = |m: String| Err(SimulateError::InvalidDensity(m));
    if rho.nrows() != d || rho.ncols() != d {
        return bad(format!("expected {d}x{d}, found {}x{}", rho.nrows(), rho.ncols()));
    }
    if !linalg::is_finite(rho) {
        return bad("non-finite entry".into());
    }
    if !linalg::is_hermitian(rho, DENSITY_TOL) {
        return bad("not Hermitian".into());
    }
    let tr = linalg::trace(rho).re;
    if (tr - 1.0).abs() > DENSITY_TOL {
        return bad(format!("trace is {tr}"));
    }
    let min = linalg::min_hermitian_eigenvalue(rho);
    if min < -DENSITY_TOL {
        return bad(format!("negative eigenvalue {min:.3e}"));
    }
    Ok(())
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one step from `s`. Returns the successor, the updated density and
/// the branch distribution.
fn step<R: Rng>(
    model: &QmcModel,
    s: usize,
    rho: &ComplexMatrix,
    rng: &mut R,
) -> Result<(usize, ComplexMatrix, Vec<(usize, f64)>), SimulateError> {
    let mut outcomes = Vec::with_capacity(model.successors(s).len());
    for &t in model.successors(s) {
        let op = model.transition(s, t).expect("successor has an edge");
        let next = op.apply(rho).expect("density has model dimension");
        let p = linalg::trace(&next).re.max(0.0);
        outcomes.push((t, p, next));
    }
    let total: f64 = outcomes.iter().map(|(_, p, _)| p).sum();
    if outcomes.iter().all(|(_, p, _)| *p < DEAD_TOL) {
        return Err(SimulateError::DeadState {
            state: model.state_name(s).to_string(),
        });
    }
    if (total - 1.0).abs() >= RENORMALIZE_TOL {
        return Err(SimulateError::BranchSum {
            state: model.state_name(s).to_string(),
            total,
        });
    }
    let probs: Vec<(usize, f64)> = outcomes.iter().map(|(t, p, _)| (*t, p / total)).collect();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = outcomes.len() - 1;
    for (i, (_, p)) in probs.iter().enumerate() {
        acc += p;
        if u < acc && *p > 0.0 {
            chosen = i;
            break;
        }
    }
    // Guard against landing on a zero-probability tail through rounding.
    while probs[chosen].1 == 0.0 {
        chosen -= 1;
    }
    let (t, p, next) = outcomes.swap_remove(chosen);
    let rho = next / linalg::c64(p, 0.0);
    Ok((t, rho, probs))
}

fn trajectory(
    model: &QmcModel,
    s0: usize,
    rho0: &ComplexMatrix,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TrajectorySample, SimulateError> {
    let mut states = vec![s0];
    let mut rho = rho0.clone();
    let mut branches = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let (t, next, probs) = step(model, *states.last().unwrap(), &rho, rng)?;
        states.push(t);
        rho = next;
        branches.push(probs);
    }
    let path = FinitePath::new(model, states).expect("sampled edges are nonzero");
    Ok(TrajectorySample {
        path,
        final_density: rho,
        branch_probabilities: branches,
    })
}

/// Samples a trajectory of `horizon` steps from `s0`.
pub fn sample_path(
    model: &QmcModel,
    s0: usize,
    rho0: &ComplexMatrix,
    horizon: usize,
    seed: u64,
) -> Result<TrajectorySample, SimulateError> {
    check_density(rho0, model.dim())?;
    trajectory(model, s0, rho0, horizon, &mut sample_rng(seed, 0))
}

/// Samples `n` independent trajectories; sample `i` equals the one drawn
/// from stream `i` of `seed`, and `sample_path` is sample 0.
pub fn sample_paths(
    model: &QmcModel,
    s0: usize,
    rho0: &ComplexMatrix,
    horizon: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<TrajectorySample>, SimulateError> {
    check_density(rho0, model.dim())?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| trajectory(model, s0, rho0, horizon, &mut sample_rng(seed, i)))
        .collect()
}

/// A step-bounded path formula with its state subformulas resolved to sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedQuery {
    Next { target: StateSet },
    Until { phi: StateSet, psi: StateSet, k: usize },
}

impl BoundedQuery {
    /// Resolves the operands of `pf` with the checker's satisfaction sets.
    pub fn resolve(checker: &mut Checker<'_>, pf: &PathFormula) -> Result<Self, SimulateError> {
        let all = || (0..checker.model().num_states()).collect::<StateSet>();
        match pf {
            PathFormula::Next(f) => Ok(BoundedQuery::Next {
                target: checker.sat(f)?,
            }),
            PathFormula::BoundedUntil(a, b, k) => Ok(BoundedQuery::Until {
                phi: checker.sat(a)?,
                psi: checker.sat(b)?,
                k: *k,
            }),
            PathFormula::BoundedEventually(f, k) => Ok(BoundedQuery::Until {
                phi: all(),
                psi: checker.sat(f)?,
                k: *k,
            }),
            PathFormula::Until(..) | PathFormula::Eventually(..) => Err(SimulateError::Unbounded(pf.to_string())),
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            BoundedQuery::Next { .. } => 1,
            BoundedQuery::Until { k, .. } => *k,
        }
    }

    /// Path-satisfaction indicator for one sampled run, stopping as soon as
    /// the outcome is decided.
    fn sample(
        &self,
        model: &QmcModel,
        s0: usize,
        rho0: &ComplexMatrix,
        rng: &mut ChaCha8Rng,
    ) -> Result<bool, SimulateError> {
        match self {
            BoundedQuery::Next { target } => {
                let (t, _, _) = step(model, s0, rho0, rng)?;
                Ok(target.contains(&t))
            }
            BoundedQuery::Until { phi, psi, k } => {
                let mut s = s0;
                let mut rho = rho0.clone();
                for i in 0..=*k {
                    if psi.contains(&s) {
                        return Ok(true);
                    }
                    if !phi.contains(&s) || i == *k {
                        return Ok(false);
                    }
                    (s, rho, _) = step(model, s, &rho, rng)?;
                }
                unreachable!()
            }
        }
    }
}

/// Estimates `tr(Q^M(s₀, pf)(ρ₀))` from `n` sampled runs.
pub fn estimate_query(
    model: &QmcModel,
    s0: usize,
    rho0: &ComplexMatrix,
    query: &BoundedQuery,
    n: u64,
    seed: u64,
) -> Result<Estimate, SimulateError> {
    check_density(rho0, model.dim())?;
    let successes = (0..n)
        .into_par_iter()
        .map(|i| query.sample(model, s0, rho0, &mut sample_rng(seed, i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (estimate, stderr) = if n == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let p = successes as f64 / n as f64;
        (p, (p * (1.0 - p) / n as f64).sqrt())
    };
    Ok(Estimate {
        estimate,
        stderr,
        successes,
        samples: n,
        seed,
    })
}

/// Resolves `pf` through `checker` and estimates its probability at `s0`.
pub fn estimate_prob(
    checker: &mut Checker<'_>,
    s0: usize,
    rho0: &ComplexMatrix,
    pf: &PathFormula,
    n: u64,
    seed: u64,
) -> Result<Estimate, SimulateError> {
    let query = BoundedQuery::resolve(checker, pf)?;
    estimate_query(checker.model(), s0, rho0, &query, n, seed)
}
