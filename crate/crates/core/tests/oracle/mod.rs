//! Reference computations that share no code with the checker.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<Complex64>;

/// Scalar `P(s, Φ U^{≤k} Ψ)` for a row-stochastic matrix.
pub fn classical_bounded_until(p: &[Vec<f64>], phi: &[bool], psi: &[bool], k: usize) -> Vec<f64> {
    let n = p.len();
    let mut x: Vec<f64> = (0..n).map(|s| if psi[s] { 1.0 } else { 0.0 }).collect();
    for _ in 0..k {
        x = (0..n)
            .map(|s| {
                if psi[s] {
                    1.0
                } else if !phi[s] {
                    0.0
                } else {
                    (0..n).map(|t| p[s][t] * x[t]).sum()
                }
            })
            .collect();
    }
    x
}

/// Scalar `P(s, Φ U Ψ)`: graph pre-computation of the probability-zero
/// states, then a dense linear solve on the remaining `Φ ∖ Ψ` states.
pub fn classical_until(p: &[Vec<f64>], phi: &[bool], psi: &[bool]) -> Vec<f64> {
    let n = p.len();
    let mut reach: Vec<bool> = psi.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !reach[s] && phi[s] && (0..n).any(|t| p[s][t] > 0.0 && reach[t]) {
                reach[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|&s| reach[s] && !psi[s]).collect();
    let m = unknown.len();
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (i, &s) in unknown.iter().enumerate() {
        for t in 0..n {
            if psi[t] {
                b[i] += p[s][t];
            } else if let Some(j) = unknown.iter().position(|&u| u == t) {
                a[(i, j)] -= p[s][t];
            }
        }
    }
    let sol = if m == 0 {
        DVector::zeros(0)
    } else {
        a.lu().solve(&b).expect("nonsingular after pre-computation")
    };
    (0..n)
        .map(|s| {
            if psi[s] {
                1.0
            } else if let Some(i) = unknown.iter().position(|&u| u == s) {
                sol[i]
            } else {
                0.0
            }
        })
        .collect()
}

pub fn cmat(d: usize, re: &[f64]) -> Mat {
    Mat::from_fn(d, d, |i, j| Complex64::new(re[i * d + j], 0.0))
}

/// `Σ E†E` over every product `E_{n} ⋯ E_{1}` with one factor drawn from each
/// Kraus set, `sets[0]` applied first. Expands every product explicitly, so keep chains
/// short.
pub fn chain_trace_operator(sets: &[Vec<Mat>]) -> Mat {
    let d = sets[0][0].nrows();
    let mut products = vec![Mat::identity(d, d)];
    for set in sets {
        products = products
            .iter()
            .flat_map(|p| set.iter().map(move |k| k * p))
            .collect();
    }
    let mut t = Mat::zeros(d, d);
    for p in &products {
        t += p.adjoint() * p;
    }
    t
}

/// Same quantity via the adjoint maps, `E₁†(E₂†(⋯ E_n†(I)))`, which stays
/// polynomial for long chains.
pub fn chain_trace_operator_dual(sets: &[Vec<Mat>]) -> Mat {
    let d = sets[0][0].nrows();
    let mut a = Mat::identity(d, d);
    for set in sets.iter().rev() {
        a = set.iter().map(|k| k.adjoint() * &a * k).fold(Mat::zeros(d, d), |acc, x| acc + x);
    }
    a
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
