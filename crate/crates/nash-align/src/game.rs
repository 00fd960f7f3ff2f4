//! Core game types and utility evaluation.
//!
//! A game instance couples an inconsistency matrix `C`, an attractiveness
//! vector `a`, an agent count `M`, and three positive incentive
//! coefficients. Each of `M` agents plays a mixture weight vector on the
//! `D`-simplex; agent `m`'s payoff is
//!
//! ```text
//! u_m = beta_a * a'w_m  -  beta_i * w_m' C w_m  -  beta_d * sum_{j != m} <w_m, w_j>
//! ```
//!
//! which is concave in `w_m` whenever `C` is positive semidefinite. This
//! module evaluates utilities, their exact gradients, the tangent-space
//! projector of the simplex, and the entropy-regularized quantal-response
//! loss whose zeros are logit-QRE profiles.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interior_solver::SpectralView;

/// Tolerance on each profile row's deviation from unit sum.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// A matrix is accepted as PSD when its smallest eigenvalue is above this.
pub const PSD_TOL: f64 = 1e-9;

/// The three positive scaling factors weighting attractiveness,
/// inconsistency, and diversity in the utility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    beta_a: f64,
    beta_i: f64,
    beta_d: f64,
}

impl Coefficients {
    /// All three weights must be strictly positive and finite.
    pub fn new(beta_a: f64, beta_i: f64, beta_d: f64) -> Result<Self> {
        for (name, v) in [("beta_a", beta_a), ("beta_i", beta_i), ("beta_d", beta_d)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            beta_a,
            beta_i,
            beta_d,
        })
    }

    /// Unit coefficients (1, 1, 1).
    pub fn unit() -> Self {
        Self {
            beta_a: 1.0,
            beta_i: 1.0,
            beta_d: 1.0,
        }
    }

    pub fn beta_a(&self) -> f64 {
        self.beta_a
    }

    pub fn beta_i(&self) -> f64 {
        self.beta_i
    }

    pub fn beta_d(&self) -> f64 {
        self.beta_d
    }

    /// The ratio beta_d / beta_i that governs the singular set of the
    /// interior solve.
    pub fn ratio(&self) -> f64 {
        self.beta_d / self.beta_i
    }

    /// Same coefficients with the diversity weight shifted by `eps`
    /// (ridge retry of the interior solver).
    pub(crate) fn with_ridge(&self, eps: f64) -> Self {
        Self {
            beta_d: self.beta_d + eps,
            ..*self
        }
    }
}

/// A complete game: dimensions, inconsistency matrix, attractiveness
/// vector, and coefficients.
///
/// Construction validates the structural requirements once (`c` exactly
/// symmetric with finite entries and smallest eigenvalue above `-`[`PSD_TOL`],
/// `a` non-negative and finite, `d >= 2`, `m >= 2`) and caches the
/// eigendecomposition of `c` so later solves and sweeps never repeat it.
#[derive(Debug, Clone)]
pub struct GameSpec {
    d: usize,
    m: usize,
    c: DMatrix<f64>,
    a: DVector<f64>,
    coeffs: Coefficients,
    spectral: SpectralView,
}

impl GameSpec {
    pub fn new(c: DMatrix<f64>, a: DVector<f64>, m: usize, coeffs: Coefficients) -> Result<Self> {
        let d = c.nrows();
        if c.ncols() != d {
            return Err(Error::Shape(format!(
                "inconsistency matrix must be square, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        if d < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 subpopulations, got {d}"
            )));
        }
        if m < 2 {
            return Err(Error::Invalid(format!("need at least 2 agents, got {m}")));
        }
        if a.len() != d {
            return Err(Error::Shape(format!(
                "attractiveness vector has length {}, expected {d}",
                a.len()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                let v = c[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Invalid(format!("c[{i}][{j}] = {v} is not finite")));
                }
                // Built matrices mirror entries, so equality is exact.
                if c[(i, j)] != c[(j, i)] {
                    return Err(Error::Invalid(format!(
                        "inconsistency matrix is not symmetric at ({i},{j}): {} vs {}",
                        c[(i, j)],
                        c[(j, i)]
                    )));
                }
            }
        }
        for i in 0..d {
            let v = a[i];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Invalid(format!(
                    "attractiveness a[{i}] = {v} must be non-negative and finite"
                )));
            }
        }
        let spectral = SpectralView::from_symmetric(&c)?;
        if spectral.min_eigenvalue() < -PSD_TOL {
            return Err(Error::Invalid(format!(
                "inconsistency matrix is not PSD: min eigenvalue {}",
                spectral.min_eigenvalue()
            )));
        }
        Ok(Self {
            d,
            m,
            c,
            a,
            coeffs,
            spectral,
        })
    }

    /// A copy of this game with different coefficients. The cached
    /// eigendecomposition is reused, so this is cheap enough to call once
    /// per sweep cell.
    pub fn with_coefficients(&self, coeffs: Coefficients) -> Self {
        Self {
            coeffs,
            ..self.clone()
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    /// Eigenvalues of `c` and the loading of the all-ones vector on its
    /// eigenbasis, computed once at construction.
    pub fn spectral(&self) -> &SpectralView {
        &self.spectral
    }

    fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.d() != self.d || profile.m() != self.m {
            return Err(Error::Shape(format!(
                "profile is {}x{}, game expects {}x{}",
                profile.m(),
                profile.d(),
                self.m,
                self.d
            )));
        }
        Ok(())
    }

    fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.m {
            return Err(Error::Invalid(format!(
                "agent index {agent} out of range for {} agents",
                self.m
            )));
        }
        Ok(())
    }
}

/// One strategy vector per agent; every row lies on the `D`-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    w: DMatrix<f64>, // M x D, row m = agent m
}

impl StrategyProfile {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        for m in 0..w.nrows() {
            let mut sum = 0.0;
            for i in 0..w.ncols() {
                let v = w[(m, i)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Invalid(format!(
                        "weight w[{m}][{i}] = {v} must be non-negative and finite"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Invalid(format!(
                    "row {m} sums to {sum}, not 1 within {ROW_SUM_TOL:e}"
                )));
            }
        }
        Ok(Self { w })
    }

    /// The uniform profile: every agent plays `1/D` on every subpopulation.
    pub fn uniform(m: usize, d: usize) -> Self {
        Self {
            w: DMatrix::from_element(m, d, 1.0 / d as f64),
        }
    }

    /// All `m` agents play the same vector.
    pub fn homogeneous(m: usize, w: &DVector<f64>) -> Result<Self> {
        let mat = DMatrix::from_fn(m, w.len(), |_, i| w[i]);
        Self::new(mat)
    }

    pub fn m(&self) -> usize {
        self.w.nrows()
    }

    pub fn d(&self) -> usize {
        self.w.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// Agent `m`'s strategy as a column vector.
    pub fn agent(&self, m: usize) -> DVector<f64> {
        self.w.row(m).transpose()
    }

    /// Column sums: the aggregate weight each subpopulation receives
    /// across all agents.
    pub fn total_weight(&self) -> DVector<f64> {
        self.w.row_sum().transpose()
    }
}

/// Temperature and per-agent weights of the entropy-regularized loss.
#[derive(Debug, Clone, PartialEq)]
pub struct QreParams {
    tau: f64,
    eta: DVector<f64>,
}

impl QreParams {
    pub fn new(tau: f64, eta: DVector<f64>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Invalid(format!(
                "temperature tau must be strictly positive, got {tau}"
            )));
        }
        for (m, &e) in eta.iter().enumerate() {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Invalid(format!(
                    "loss weight eta[{m}] = {e} must be strictly positive"
                )));
            }
        }
        Ok(Self { tau, eta })
    }

    /// Unit weights for all agents (the default).
    pub fn with_unit_eta(tau: f64, m: usize) -> Result<Self> {
        Self::new(tau, DVector::from_element(m, 1.0))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eta(&self) -> &DVector<f64> {
        &self.eta
    }
}

/// Agent `agent`'s utility at `profile`.
pub fn eval_utility(spec: &GameSpec, profile: &StrategyProfile, agent: usize) -> Result<f64> {
    spec.check_profile(profile)?;
    spec.check_agent(agent)?;
    let w_m = profile.agent(agent);
    let b = spec.coeffs();
    let attract = spec.a().dot(&w_m);
    let inconsist = w_m.dot(&(spec.c() * &w_m));
    let mut overlap = 0.0;
    for j in 0..spec.m() {
        if j != agent {
            overlap += profile.agent(j).dot(&w_m);
        }
    }
    Ok(b.beta_a() * attract - b.beta_i() * inconsist - b.beta_d() * overlap)
}

/// Exact gradient of [`eval_utility`] in agent `agent`'s own strategy:
/// `beta_a * a - 2 beta_i * C w_m - beta_d * sum_{j != m} w_j`.
pub fn grad_utility(
    spec: &GameSpec,
    profile: &StrategyProfile,
    agent: usize,
) -> Result<DVector<f64>> {
    spec.check_profile(profile)?;
    spec.check_agent(agent)?;
    let w_m = profile.agent(agent);
    let b = spec.coeffs();
    let others = profile.total_weight() - &w_m;
    Ok(spec.a() * b.beta_a() - (spec.c() * &w_m) * (2.0 * b.beta_i()) - others * b.beta_d())
}

/// Orthogonal projection onto the tangent space of the simplex:
/// `v - (1'v / D) 1`. Output components sum to zero.
pub fn project_tangent(v: &DVector<f64>) -> DVector<f64> {
    let mean = v.sum() / v.len() as f64;
    v.map(|x| x - mean)
}

/// Gradient of the entropy-augmented utility `u_m + tau * S(w_m)`:
/// [`grad_utility`] minus `tau * (log w_m + 1)` element-wise.
///
/// Errors on any non-positive weight; the boundary solver clamps before
/// calling into log space, this function does not.
pub fn entropy_grad_utility(
    spec: &GameSpec,
    profile: &StrategyProfile,
    agent: usize,
    qre: &QreParams,
) -> Result<DVector<f64>> {
    spec.check_profile(profile)?;
    spec.check_agent(agent)?;
    let w_m = profile.agent(agent);
    for (i, &wi) in w_m.iter().enumerate() {
        if wi <= 0.0 {
            return Err(Error::Domain(format!(
                "entropy gradient undefined at w[{agent}][{i}] = {wi}; weights must be strictly positive"
            )));
        }
    }
    let mut g = grad_utility(spec, profile, agent)?;
    for i in 0..g.len() {
        g[i] -= qre.tau() * (w_m[i].ln() + 1.0);
    }
    Ok(g)
}

/// Quantal-response residual loss: the eta-weighted sum over agents of the
/// squared norm of the tangent-projected entropy-augmented gradient.
/// Non-negative, and zero exactly at logit-QRE profiles.
pub fn qre_loss(spec: &GameSpec, profile: &StrategyProfile, qre: &QreParams) -> Result<f64> {
    spec.check_profile(profile)?;
    if qre.eta().len() != spec.m() {
        return Err(Error::Shape(format!(
            "eta has length {}, expected {}",
            qre.eta().len(),
            spec.m()
        )));
    }
    let mut loss = 0.0;
    for m in 0..spec.m() {
        let g = entropy_grad_utility(spec, profile, m, qre)?;
        let p = project_tangent(&g);
        loss += qre.eta()[m] * p.norm_squared();
    }
    Ok(loss)
}
