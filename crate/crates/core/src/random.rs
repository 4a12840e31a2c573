//! Random channels and random quantum Markov chains for testing.
//!
//! Trace-preserving Kraus sets come from Haar-like random isometries (QR of a
//! complex Gaussian matrix): stacking `V = [K₁; …; K_m]` with `V†V = I` gives
//! `Σ Kᵢ†Kᵢ = I`. All functions draw from a caller-supplied generator, so a
//! seeded generator reproduces the same instance.

use crate::linalg::{c64, ComplexMatrix};
use crate::model::QmcModel;
use crate::superop::SuperOp;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A `rows × cols` matrix with orthonormal columns (`rows ≥ cols`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    gaussian_matrix(rng, rows, cols).qr().q()
}

/// `count` Kraus operators forming a trace-preserving set on `C^d`.
pub fn random_channel_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize, count: usize) -> Vec<ComplexMatrix> {
    let v = random_isometry(rng, count * d, d);
    (0..count)
        .map(|i| v.view((i * d, 0), (d, d)).clone_owned())
        .collect()
}

/// An unnormalized completely positive map with `count` Gaussian Kraus
/// operators, scaled so that typical entries are O(1).
pub fn random_cp_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize, count: usize) -> Vec<ComplexMatrix> {
    let scale = c64(1.0 / ((count * d) as f64).sqrt(), 0.0);
    (0..count).map(|_| gaussian_matrix(rng, d, d) * scale).collect()
}

/// A full-rank random density operator `AA†/tr(AA†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let a = gaussian_matrix(rng, d, d);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// A trace non-increasing map: a random channel scaled by `p ∈ [0, 1]`.
pub fn random_subchannel<R: Rng + ?Sized>(rng: &mut R, d: usize, count: usize, p: f64) -> SuperOp {
    SuperOp::from_kraus(random_channel_kraus(rng, d, count))
        .and_then(|op| op.scale(p))
        .expect("valid random channel")
}

/// Shape of a random quantum Markov chain.
#[derive(Debug, Clone)]
pub struct RandomQmcConfig {
    pub states: usize,
    pub dim: usize,
    /// Successors per state are drawn from `1..=max_successors`.
    pub max_successors: usize,
    /// Kraus operators per edge.
    pub kraus_per_edge: usize,
    /// Probability that a state carries `phi`.
    pub phi_probability: f64,
    /// Probability that a state carries `psi`.
    pub psi_probability: f64,
}

impl Default for RandomQmcConfig {
    fn default() -> Self {
        Self {
            states: 4,
            dim: 2,
            max_successors: 3,
            kraus_per_edge: 2,
            phi_probability: 0.7,
            psi_probability: 0.3,
        }
    }
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

fn random_labels<R: Rng + ?Sized>(rng: &mut R, names: &[String], cfg: &RandomQmcConfig) -> BTreeMap<String, Vec<String>> {
    let mut labels = BTreeMap::new();
    for name in names {
        let mut props = Vec::new();
        if rng.random_bool(cfg.phi_probability) {
            props.push("phi".to_string());
        }
        if rng.random_bool(cfg.psi_probability) {
            props.push("psi".to_string());
        }
        labels.insert(name.clone(), props);
    }
    labels
}

/// A valid qMC: every row is one random isometry split across the chosen
/// successors, so each row sums to a trace-preserving map exactly (up to
/// rounding). States are `s0, s1, …`; atoms are `phi` and `psi`.
pub fn random_qmc<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomQmcConfig) -> QmcModel {
    let n = cfg.states;
    let d = cfg.dim;
    let r = cfg.kraus_per_edge.max(1);
    let names = state_names(n);
    let mut transitions = Vec::new();
    for s in 0..n {
        let m = rng.random_range(1..=cfg.max_successors.clamp(1, n));
        let targets = sample(rng, n, m).into_vec();
        let v = random_isometry(rng, m * r * d, d);
        for (j, &t) in targets.iter().enumerate() {
            let kraus = (0..r)
                .map(|i| v.view(((j * r + i) * d, 0), (d, d)).clone_owned())
                .collect();
            let op = SuperOp::from_kraus(kraus).expect("square blocks");
            transitions.push((names[s].clone(), names[t].clone(), op));
        }
    }
    let labels = random_labels(rng, &names, cfg);
    QmcModel::from_parts(
        d,
        names,
        vec!["phi".into(), "psi".into()],
        &labels,
        transitions,
        BTreeMap::new(),
    )
    .expect("well-formed random model")
}

/// A classical Markov chain embedded with transitions `p · I_H`. Returns the
/// model and its row-stochastic probability matrix.
pub fn random_classical_qmc<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomQmcConfig) -> (QmcModel, Vec<Vec<f64>>) {
    let n = cfg.states;
    let names = state_names(n);
    let mut probs = vec![vec![0.0; n]; n];
    let mut transitions = Vec::new();
    for s in 0..n {
        let m = rng.random_range(1..=cfg.max_successors.clamp(1, n));
        let targets = sample(rng, n, m).into_vec();
        let weights: Vec<f64> = targets.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for (&t, w) in targets.iter().zip(weights) {
            let p = w / total;
            probs[s][t] = p;
            let op = SuperOp::identity(cfg.dim).scale(p).expect("positive weight");
            transitions.push((names[s].clone(), names[t].clone(), op));
        }
    }
    let labels = random_labels(rng, &names, cfg);
    let model = QmcModel::from_parts(
        cfg.dim,
        names,
        vec!["phi".into(), "psi".into()],
        &labels,
        transitions,
        BTreeMap::new(),
    )
    .expect("well-formed random model");
    (model, probs)
}
