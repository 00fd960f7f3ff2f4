//! Shared helpers for the integration suites: independent oracles and
//! deterministic instance generators.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use nash_align::game::{Coefficients, GameSpec};

/// Dense solve of the complete equilibrium linear system, assembled
/// directly from the game data: for every agent the D gradient rows
/// (own quadratic term, cross-agent coupling, one multiplier) plus one
/// normalization row. Unknowns are the M*D weights followed by the M
/// multipliers. Independent of the closed-form path: no inverse of the
/// regularized matrix, no shared multiplier formula.
pub fn full_kkt_solve(
    c: &DMatrix<f64>,
    a: &DVector<f64>,
    m: usize,
    (beta_a, beta_i, beta_d): (f64, f64, f64),
) -> Option<(DMatrix<f64>, Vec<f64>)> {
    let d = a.len();
    let n = m * d + m;
    let mut sys = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for agent in 0..m {
        for i in 0..d {
            let r = agent * d + i;
            for j in 0..d {
                sys[(r, agent * d + j)] += 2.0 * beta_i * c[(i, j)];
            }
            for other in 0..m {
                if other != agent {
                    sys[(r, other * d + i)] += beta_d;
                }
            }
            sys[(r, m * d + agent)] = 1.0;
            rhs[r] = beta_a * a[i];
        }
        let norm_row = m * d + agent;
        for i in 0..d {
            sys[(norm_row, agent * d + i)] = 1.0;
        }
        rhs[norm_row] = 1.0;
    }
    let lu = sys.clone().lu();
    let mut sol = lu.solve(&rhs)?;
    // One step of iterative refinement for tighter componentwise agreement.
    let residual = &rhs - &sys * &sol;
    if let Some(correction) = lu.solve(&residual) {
        sol += correction;
    }
    let weights = DMatrix::from_fn(m, d, |agent, i| sol[agent * d + i]);
    let multipliers = (0..m).map(|agent| sol[m * d + agent]).collect();
    Some((weights, multipliers))
}

/// Random matrix in the shape the construction pipeline produces: start
/// from G'G/D with standard-normal G, mirror absolute off-diagonals, and
/// set each diagonal entry to its row's off-diagonal sum.
pub fn random_claim1_from_gram(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let gram = g.transpose() * &g / d as f64;
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let v = gram[(i, j)].abs();
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    for i in 0..d {
        let mut s = 0.0;
        for j in 0..d {
            if j != i {
                s += c[(i, j)];
            }
        }
        c[(i, i)] = s;
    }
    c
}

/// A random point of the simplex interior.
pub fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    let mut a = DVector::from_fn(d, |_, _| 0.02 + rng.random::<f64>());
    let total = a.sum();
    a /= total;
    a
}

/// Log-uniform draw from [lo, hi].
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

pub fn spec_from(c: DMatrix<f64>, a: DVector<f64>, m: usize, betas: (f64, f64, f64)) -> GameSpec {
    GameSpec::new(
        c,
        a,
        m,
        Coefficients::new(betas.0, betas.1, betas.2).expect("positive coefficients"),
    )
    .expect("valid game")
}

/// The synthetic five-subpopulation instance used by the directional
/// checks: subpopulation 0 carries a dominant inconsistency diagonal
/// (largest pairwise discrepancies), subpopulation 1 the largest
/// attractiveness.
pub fn dominant_diagonal_instance() -> (DMatrix<f64>, DVector<f64>) {
    let d = 5;
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let v = if i == 0 { 0.09 } else { 0.05 };
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    for i in 0..d {
        let mut s = 0.0;
        for j in 0..d {
            if j != i {
                s += c[(i, j)];
            }
        }
        c[(i, i)] = s;
    }
    let a = DVector::from_row_slice(&[0.195, 0.225, 0.20, 0.195, 0.185]);
    (c, a)
}

/// Agent count used with [`dominant_diagonal_instance`].
pub const DOMINANT_M: usize = 16;
