//! Boundary equilibrium search via annealed quantal-response descent.
//!
//! When the relaxed closed-form solution has a non-positive component, no
//! interior equilibrium exists and Nash profiles sit on the simplex
//! boundary. This solver minimizes the entropy-regularized projected-
//! gradient loss of [`crate::game::qre_loss`] by projected gradient
//! descent at a fixed temperature, then anneals the temperature toward
//! zero, warm-starting each stage from the last. As the temperature
//! vanishes the quantal-response profile approaches a Nash equilibrium,
//! which the exact oracle then certifies.
//!
//! Weights are kept feasible by exact Euclidean projection onto the
//! simplex; logarithms clamp their argument at `interior_clamp`, so
//! iterates may carry exact zeros. The reported loss is a quantal-response
//! residual, not an equilibrium certificate; certification is the
//! oracle's exploitability.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameSpec, StrategyProfile};
use crate::interior_solver::solve_interior;
use crate::oracle::exploitability;

/// Temperature schedule and descent controls.
#[derive(Debug, Clone, Copy)]
pub struct AnnealSchedule {
    /// Initial temperature.
    pub tau0: f64,
    /// Multiplicative decay per stage, in (0, 1).
    pub decay: f64,
    /// Final temperature.
    pub tau_min: f64,
    /// Maximum number of annealing stages.
    pub max_outer: usize,
    /// Gradient steps per stage.
    pub inner_steps: usize,
    /// Initial step size for backtracking descent.
    pub step_size: f64,
    /// Stationarity tolerance terminating a stage.
    pub grad_tol: f64,
    /// Floor applied to weights inside logarithms.
    pub interior_clamp: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            tau0: 1.0,
            decay: 0.5,
            tau_min: 1e-5,
            max_outer: 64,
            inner_steps: 5000,
            step_size: 1e-2,
            grad_tol: 1e-8,
            interior_clamp: 1e-12,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > 0.0 && self.tau_min > 0.0 && self.tau_min < self.tau0) {
            return Err(Error::Invalid(format!(
                "need 0 < tau_min < tau0, got tau0 = {}, tau_min = {}",
                self.tau0, self.tau_min
            )));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::Invalid(format!(
                "decay must lie in (0, 1), got {}",
                self.decay
            )));
        }
        if self.max_outer < 1 || self.inner_steps < 1 {
            return Err(Error::Invalid(
                "stage and step counts must be at least 1".into(),
            ));
        }
        if !(self.step_size > 0.0 && self.grad_tol > 0.0 && self.interior_clamp > 0.0) {
            return Err(Error::Invalid(
                "step size, gradient tolerance, and clamp must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Maximum step-halvings per backtracking line search.
const MAX_HALVINGS: usize = 30;

/// Exact Euclidean projection onto the probability simplex, by the
/// sort-and-threshold algorithm. Non-negative output summing to 1;
/// points already on the simplex map to themselves.
pub fn project_simplex(v: &DVector<f64>) -> DVector<f64> {
    let d = v.len();
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    DVector::from_fn(d, |i, _| (v[i] - theta).max(0.0))
}

/// One annealing stage as recorded for diagnostics and JSON-lines logs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageLog {
    pub tau: f64,
    pub loss: f64,
    pub exploitability: f64,
    pub iters: usize,
}

/// Outcome of one fixed-temperature descent.
#[derive(Debug, Clone)]
pub struct QreInfo {
    pub final_loss: f64,
    pub iters: usize,
    /// Accepted loss values, starting with the loss at the initial point.
    pub loss_trace: Vec<f64>,
}

/// Result of the full anneal: the profile reached, its oracle-certified
/// exploitability, and the per-stage log.
#[derive(Debug, Clone)]
pub struct AnnealResult {
    pub profile: StrategyProfile,
    pub exploitability: f64,
    pub stages: Vec<StageLog>,
}

/// Loss and per-agent projected entropy-augmented gradients at `w`,
/// with logs clamped at `clamp`.
struct LossEval {
    loss: f64,
    projected: Vec<DVector<f64>>,
}

fn eval_loss(spec: &GameSpec, w: &DMatrix<f64>, tau: f64, clamp: f64) -> LossEval {
    let m = spec.m();
    let d = spec.d();
    let coeffs = spec.coeffs();
    let colsum = w.row_sum().transpose();
    let mut projected = Vec::with_capacity(m);
    let mut loss = 0.0;
    for agent in 0..m {
        let w_m = w.row(agent).transpose();
        let mut g = spec.a() * coeffs.beta_a()
            - (spec.c() * &w_m) * (2.0 * coeffs.beta_i())
            - (&colsum - &w_m) * coeffs.beta_d();
        for i in 0..d {
            g[i] -= tau * (w_m[i].max(clamp).ln() + 1.0);
        }
        let mean = g.sum() / d as f64;
        g.apply(|x| *x -= mean);
        loss += g.norm_squared(); // eta_m = 1
        projected.push(g);
    }
    LossEval { loss, projected }
}

/// Analytic gradient of the clamped loss at `w`, reusing the projected
/// gradients from [`eval_loss`].
fn loss_gradient(
    spec: &GameSpec,
    w: &DMatrix<f64>,
    eval: &LossEval,
    tau: f64,
    clamp: f64,
) -> DMatrix<f64> {
    let m = spec.m();
    let d = spec.d();
    let coeffs = spec.coeffs();
    // Sum of all projected gradients, for the cross-agent coupling term.
    let mut p_total = DVector::zeros(d);
    for p in &eval.projected {
        p_total += p;
    }
    let mut grad = DMatrix::zeros(m, d);
    for agent in 0..m {
        let p = &eval.projected[agent];
        let own = (spec.c() * p) * (-4.0 * coeffs.beta_i());
        let cross = (&p_total - p) * (-2.0 * coeffs.beta_d());
        for i in 0..d {
            let wi = w[(agent, i)];
            let entropy = if wi > clamp {
                -2.0 * tau * p[i] / wi
            } else {
                0.0
            };
            grad[(agent, i)] = own[i] + entropy + cross[i];
        }
    }
    grad
}

fn project_rows(w: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = w.clone();
    for r in 0..w.nrows() {
        let proj = project_simplex(&w.row(r).transpose());
        for i in 0..w.ncols() {
            out[(r, i)] = proj[i];
        }
    }
    out
}

/// Minimize the quantal-response loss at fixed temperature `tau` by
/// projected gradient descent with backtracking, starting from `init`.
///
/// The returned profile never has larger loss than the initial point. A
/// stage ends when the projected-gradient stationarity measure drops to
/// `grad_tol`, the loss reaches `grad_tol^2`, no descent step exists, or
/// `inner_steps` is exhausted.
pub fn solve_qre(
    spec: &GameSpec,
    tau: f64,
    init: &StrategyProfile,
    sched: &AnnealSchedule,
) -> Result<(StrategyProfile, QreInfo)> {
    sched.validate()?;
    if !(tau > 0.0) {
        return Err(Error::Invalid(format!(
            "temperature must be positive, got {tau}"
        )));
    }
    if init.d() != spec.d() || init.m() != spec.m() {
        return Err(Error::Shape(format!(
            "init profile is {}x{}, game expects {}x{}",
            init.m(),
            init.d(),
            spec.m(),
            spec.d()
        )));
    }
    let clamp = sched.interior_clamp;
    let mut w = init.matrix().clone();
    let mut eval = eval_loss(spec, &w, tau, clamp);
    if !eval.loss.is_finite() {
        return Err(Error::Divergence(format!(
            "loss is {} at the initial profile",
            eval.loss
        )));
    }
    let mut trace = vec![eval.loss];
    let mut iters = 0;
    let loss_target = sched.grad_tol * sched.grad_tol;

    for _ in 0..sched.inner_steps {
        if eval.loss <= loss_target {
            break;
        }
        let grad = loss_gradient(spec, &w, &eval, tau, clamp);
        let reference = project_rows(&(&w - &grad * sched.step_size));
        let stationarity = (&w - &reference).norm() / sched.step_size;
        if stationarity <= sched.grad_tol {
            break;
        }

        let mut step = sched.step_size;
        let mut accepted = false;
        let mut last_nonfinite = false;
        for halving in 0..=MAX_HALVINGS {
            let candidate = if halving == 0 {
                reference.clone()
            } else {
                project_rows(&(&w - &grad * step))
            };
            let cand_eval = eval_loss(spec, &candidate, tau, clamp);
            if !cand_eval.loss.is_finite() {
                last_nonfinite = true;
                step *= 0.5;
                continue;
            }
            last_nonfinite = false;
            if cand_eval.loss < eval.loss {
                w = candidate;
                eval = cand_eval;
                trace.push(eval.loss);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iters += 1;
        if last_nonfinite {
            return Err(Error::Divergence(
                "loss overflowed at every trial step".into(),
            ));
        }
        if !accepted {
            break; // no descent direction at line-search resolution
        }
    }

    let profile = StrategyProfile::new(w)?;
    Ok((
        profile,
        QreInfo {
            final_loss: eval.loss,
            iters,
            loss_trace: trace,
        },
    ))
}

/// Anneal the temperature from `tau0` down to `tau_min`, warm-starting each
/// stage, and certify the final profile with the exact oracle.
///
/// The initial profile is the positive part of the relaxed closed-form
/// solution renormalized (uniform when the solve was singular or the
/// positive part vanished), played homogeneously.
pub fn anneal_to_nash(spec: &GameSpec, schedule: &AnnealSchedule) -> Result<AnnealResult> {
    schedule.validate()?;
    let mut profile = initial_profile(spec);

    let mut taus = Vec::new();
    let mut tau = schedule.tau0;
    while taus.len() < schedule.max_outer {
        taus.push(tau);
        if tau <= schedule.tau_min {
            break;
        }
        tau = (tau * schedule.decay).max(schedule.tau_min);
    }

    let mut stages = Vec::with_capacity(taus.len());
    let mut final_expl = f64::NAN;
    for tau in taus {
        let (next, info) = solve_qre(spec, tau, &profile, schedule)?;
        profile = next;
        let expl = exploitability(spec, &profile)?;
        final_expl = expl;
        stages.push(StageLog {
            tau,
            loss: info.final_loss,
            exploitability: expl,
            iters: info.iters,
        });
    }

    Ok(AnnealResult {
        profile,
        exploitability: final_expl,
        stages,
    })
}

fn initial_profile(spec: &GameSpec) -> StrategyProfile {
    let relaxed = solve_interior(spec);
    if let Some(w) = relaxed.w_star {
        let positive = w.map(|x| x.max(0.0));
        let total = positive.sum();
        if total > 0.0 {
            let start = positive / total;
            if let Ok(p) = StrategyProfile::homogeneous(spec.m(), &start) {
                return p;
            }
        }
    }
    StrategyProfile::uniform(spec.m(), spec.d())
}
