//! Independent verification: exact best responses by support enumeration,
//! exploitability certificates, and damped best-response dynamics.
//!
//! Fixing the opponents, an agent maximizes a concave quadratic over the
//! simplex. For every candidate support the equality-constrained KKT
//! system is linear; enumerating all `2^D - 1` supports and keeping the
//! feasible candidates therefore finds the exact global maximizer. This is
//! deliberately brute force: it exists to judge the closed-form and
//! annealed solvers, not to scale.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{eval_utility, GameSpec, StrategyProfile};

/// Support enumeration is capped here; the cost is `2^D`.
pub const MAX_ORACLE_DIM: usize = 20;
/// A solved support is feasible when its weights clear this.
const WEIGHT_TOL: f64 = 1e-10;
/// Off-support multiplier slack.
const MULTIPLIER_TOL: f64 = 1e-9;

/// An exact best response: the maximizing strategy, its utility, and the
/// indices that carry positive weight.
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub w: DVector<f64>,
    pub value: f64,
    pub support: Vec<usize>,
}

/// All non-empty supports of `{0..d}`, ordered by descending size with
/// lexicographic tie-breaking on the index lists.
fn enumerate_supports(d: usize) -> Vec<Vec<usize>> {
    let mut supports: Vec<Vec<usize>> = (1u32..(1 << d))
        .map(|mask| (0..d).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    supports.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    supports
}

/// Exact best response of `agent` against the rest of `profile`.
///
/// The objective is `b'w - w'Qw` with `b = beta_a a - beta_d sum_{j!=m} w_j`
/// and `Q = beta_i C`. For each support the bordered system
///
/// ```text
/// [2Q_SS  1] [w_S    ]   [b_S]
/// [1'     0] [-lambda] = [ 1 ]
/// ```
///
/// pins the on-support gradient to a shared value; feasibility requires
/// non-negative weights on `S` and gradient <= lambda off `S`. Concavity
/// makes any feasible KKT point the global maximum.
pub fn best_response_exact(
    spec: &GameSpec,
    profile: &StrategyProfile,
    agent: usize,
) -> Result<BestResponse> {
    let d = spec.d();
    if d > MAX_ORACLE_DIM {
        return Err(Error::Invalid(format!(
            "support enumeration is limited to D <= {MAX_ORACLE_DIM}, got {d}"
        )));
    }
    if profile.d() != d || profile.m() != spec.m() {
        return Err(Error::Shape(format!(
            "profile is {}x{}, game expects {}x{}",
            profile.m(),
            profile.d(),
            spec.m(),
            spec.d()
        )));
    }
    if agent >= spec.m() {
        return Err(Error::Invalid(format!(
            "agent index {agent} out of range for {} agents",
            spec.m()
        )));
    }

    let coeffs = spec.coeffs();
    let others = profile.total_weight() - profile.agent(agent);
    let b = spec.a() * coeffs.beta_a() - &others * coeffs.beta_d();
    let q = spec.c() * coeffs.beta_i();

    let mut best: Option<BestResponse> = None;
    let mut solved_any = false;

    for support in enumerate_supports(d) {
        let s = support.len();
        let mut sys = DMatrix::zeros(s + 1, s + 1);
        let mut rhs = DVector::zeros(s + 1);
        for (ri, &i) in support.iter().enumerate() {
            for (ci, &j) in support.iter().enumerate() {
                sys[(ri, ci)] = 2.0 * q[(i, j)];
            }
            sys[(ri, s)] = 1.0;
            sys[(s, ri)] = 1.0;
            rhs[ri] = b[i];
        }
        rhs[s] = 1.0;

        let sol = match sys.lu().solve(&rhs) {
            Some(sol) => sol,
            None => continue, // singular restricted system; skip this support
        };
        solved_any = true;

        if support
            .iter()
            .enumerate()
            .any(|(ri, _)| sol[ri] < -WEIGHT_TOL)
        {
            continue;
        }
        let lambda = sol[s];

        let mut w = DVector::zeros(d);
        for (ri, &i) in support.iter().enumerate() {
            w[i] = sol[ri].max(0.0);
        }
        let scale = w.sum();
        w /= scale;

        // Off-support optimality: the gradient there must not exceed the
        // on-support level lambda.
        let grad = &b - (&q * &w) * 2.0;
        let feasible_off = (0..d)
            .filter(|i| !support.contains(i))
            .all(|i| grad[i] <= lambda + MULTIPLIER_TOL);
        if !feasible_off {
            continue;
        }

        let value = b.dot(&w) - w.dot(&(&q * &w));
        let better = match &best {
            None => true,
            Some(cur) => value > cur.value,
        };
        if better {
            let support_pos: Vec<usize> = (0..d).filter(|&i| w[i] > 1e-12).collect();
            best = Some(BestResponse {
                w,
                value,
                support: support_pos,
            });
        }
    }

    assert!(
        solved_any,
        "all restricted systems singular; impossible for bordered PSD blocks"
    );
    // Singleton supports always solve, so a candidate always exists.
    Ok(best.expect("at least one feasible support (a vertex) must exist"))
}

/// Maximum unilateral improvement over all agents. Zero exactly at Nash
/// equilibria; tiny negative rounding is clamped to zero.
pub fn exploitability(spec: &GameSpec, profile: &StrategyProfile) -> Result<f64> {
    let mut worst = 0.0f64;
    for agent in 0..spec.m() {
        let br = best_response_exact(spec, profile, agent)?;
        let current = eval_utility(spec, profile, agent)?;
        worst = worst.max(br.value - current);
    }
    Ok(worst)
}

/// Damped round-robin best-response dynamics.
///
/// Each round updates agents in index order with
/// `w_m <- (1 - damping) w_m + damping BR(m)` against the latest profile,
/// stopping when the largest per-round coordinate change drops to 1e-9 or
/// `max_rounds` is exhausted. Non-convergence is a valid outcome.
pub fn br_dynamics(
    spec: &GameSpec,
    init: &StrategyProfile,
    max_rounds: usize,
    damping: f64,
) -> Result<(StrategyProfile, bool)> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::Invalid(format!(
            "damping must lie in (0, 1], got {damping}"
        )));
    }
    let mut current = init.clone();
    let mut converged = false;
    for _ in 0..max_rounds {
        let mut next = current.matrix().clone();
        let mut round_change = 0.0f64;
        for agent in 0..spec.m() {
            let working = StrategyProfile::new(next.clone())?;
            let br = best_response_exact(spec, &working, agent)?;
            let current_value = eval_utility(spec, &working, agent)?;
            // The incumbent is already optimal: stay put. Moving along an
            // indifferent face (degenerate games have non-unique best
            // responses) would break stationarity at equilibria.
            if br.value - current_value <= 1e-13 * (1.0 + current_value.abs()) {
                continue;
            }
            for i in 0..spec.d() {
                let updated = (1.0 - damping) * next[(agent, i)] + damping * br.w[i];
                round_change = round_change.max((updated - next[(agent, i)]).abs());
                next[(agent, i)] = updated;
            }
        }
        current = StrategyProfile::new(next)?;
        if round_change <= 1e-9 {
            converged = true;
            break;
        }
    }
    Ok((current, converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Coefficients;
    use crate::interior_solver::solve_interior;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn spec(c: DMatrix<f64>, a: &[f64], m: usize, betas: (f64, f64, f64)) -> GameSpec {
        GameSpec::new(
            c,
            DVector::from_row_slice(a),
            m,
            Coefficients::new(betas.0, betas.1, betas.2).unwrap(),
        )
        .unwrap()
    }

    fn claim1_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
        let mut c = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in (i + 1)..d {
                let v: f64 = scale * rng.random::<f64>();
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

    fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let mut a: Vec<f64> = (0..d).map(|_| 0.05 + rng.random::<f64>()).collect();
        let s: f64 = a.iter().sum();
        a.iter_mut().for_each(|x| *x /= s);
        a
    }

    #[test]
    fn support_order_is_size_then_lex() {
        let supports = enumerate_supports(3);
        assert_eq!(
            supports,
            vec![
                vec![0, 1, 2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0],
                vec![1],
                vec![2],
            ]
        );
    }

    #[test]
    fn linear_hand_case() {
        // C = 0, a uniform, opponent on vertex 0: objective is
        // -0.5 w_0 + 0.5 w_1, maximized at the opposite vertex.
        let s = spec(DMatrix::zeros(2, 2), &[0.5, 0.5], 2, (1.0, 1.0, 1.0));
        let p = StrategyProfile::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 1.0, 0.0])).unwrap();
        let br = best_response_exact(&s, &p, 0).unwrap();
        assert!((br.w[0] - 0.0).abs() < 1e-12 && (br.w[1] - 1.0).abs() < 1e-12);
        assert!((br.value - 0.5).abs() < 1e-12);
        assert_eq!(br.support, vec![1]);
    }

    #[test]
    fn best_response_fixes_interior_equilibrium() {
        // D >= 3: two-subpopulation averaged-discrepancy matrices are
        // singular along the tangent direction, making the best-response
        // face non-unique, so the pointwise comparison needs D >= 3.
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let mut seen = 0;
        for _ in 0..40 {
            let d = rng.random_range(3..=5);
            let m = rng.random_range(2..=5);
            let c = claim1_matrix(&mut rng, d, 1.0);
            let a = random_simplex(&mut rng, d);
            let s = spec(c, &a, m, (1.0, 1.0, 1.0));
            let r = solve_interior(&s);
            let Some(w) = r.interior_w() else { continue };
            seen += 1;
            let profile = StrategyProfile::homogeneous(m, w).unwrap();
            for agent in 0..m {
                let br = best_response_exact(&s, &profile, agent).unwrap();
                for i in 0..d {
                    assert!((br.w[i] - w[i]).abs() < 1e-9);
                }
                let current = eval_utility(&s, &profile, agent).unwrap();
                assert!(br.value - current <= 1e-12);
            }
        }
        assert!(seen >= 10, "only {seen} interior instances");
    }

    /// Every point of the simplex grid with the given number of
    /// subdivisions, via stars and bars.
    fn simplex_grid(d: usize, n: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut counts = vec![0usize; d];
        fn rec(
            d: usize,
            n: usize,
            idx: usize,
            left: usize,
            counts: &mut [usize],
            out: &mut Vec<Vec<f64>>,
        ) {
            if idx == d - 1 {
                counts[idx] = left;
                out.push(counts.iter().map(|&c| c as f64 / n as f64).collect());
                return;
            }
            for c in 0..=left {
                counts[idx] = c;
                rec(d, n, idx + 1, left - c, counts, out);
            }
        }
        rec(d, n, 0, n, &mut counts, &mut out);
        out
    }

    #[test]
    fn matches_exhaustive_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..3 {
            let d = 3;
            let m = 2;
            let c = claim1_matrix(&mut rng, d, 0.8);
            let a = random_simplex(&mut rng, d);
            let s = spec(c, &a, m, (1.0, 1.0, 1.0));
            let mut w_op = DVector::from_fn(d, |_, _| 0.1 + rng.random::<f64>());
            w_op /= w_op.sum();
            let p = StrategyProfile::new(DMatrix::from_fn(m, d, |r, i| {
                if r == 0 {
                    1.0 / d as f64
                } else {
                    w_op[i]
                }
            }))
            .unwrap();
            let br = best_response_exact(&s, &p, 0).unwrap();

            let others = p.total_weight() - p.agent(0);
            let b = s.a() * 1.0 - &others * 1.0;
            let q = s.c().clone();
            let mut grid_best = f64::NEG_INFINITY;
            for pt in simplex_grid(d, 2000) {
                let w = DVector::from_vec(pt);
                let v = b.dot(&w) - w.dot(&(&q * &w));
                grid_best = grid_best.max(v);
            }
            assert!(
                (br.value - grid_best).abs() < 1e-5,
                "oracle {} vs grid {}",
                br.value,
                grid_best
            );
            assert!(br.value >= grid_best - 1e-12);
        }
    }

    #[test]
    fn local_perturbations_never_improve() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..10 {
            let d = rng.random_range(2..=5);
            let m = rng.random_range(2..=4);
            let c = claim1_matrix(&mut rng, d, 1.0);
            let a = random_simplex(&mut rng, d);
            let s = spec(c, &a, m, (1.0, 1.0, 1.0));
            let p = StrategyProfile::uniform(m, d);
            let br = best_response_exact(&s, &p, 0).unwrap();
            let others = p.total_weight() - p.agent(0);
            let b = s.a() * 1.0 - &others * 1.0;
            let value_at = |w: &DVector<f64>| b.dot(w) - w.dot(&(s.c() * w));
            for _ in 0..50 {
                let mut dir = DVector::from_fn(d, |_, _| rng.random::<f64>() - 0.5);
                dir -= DVector::from_element(d, dir.sum() / d as f64);
                if dir.norm() < 1e-12 {
                    continue;
                }
                dir /= dir.norm();
                for sign in [1.0, -1.0] {
                    let probe =
                        crate::boundary_solver::project_simplex(&(&br.w + &dir * (sign * 1e-4)));
                    assert!(value_at(&probe) <= br.value + 1e-8);
                }
            }
        }
    }

    #[test]
    fn exploitability_zero_at_interior_and_positive_off() {
        let s = spec(DMatrix::zeros(2, 2), &[0.9, 0.1], 2, (1.0, 1.0, 1.0));
        let r = solve_interior(&s);
        let w = r.interior_w().unwrap();
        let eq = StrategyProfile::homogeneous(2, w).unwrap();
        assert!(exploitability(&s, &eq).unwrap() <= 1e-8);
        let uniform = StrategyProfile::uniform(2, 2);
        assert!(exploitability(&s, &uniform).unwrap() > 1e-3);
    }

    #[test]
    fn exploitability_invariant_under_agent_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let c = claim1_matrix(&mut rng, 3, 1.0);
        let a = random_simplex(&mut rng, 3);
        let s = spec(c, &a, 3, (1.0, 1.0, 1.0));
        let mut w = DMatrix::zeros(3, 3);
        for r in 0..3 {
            let mut row: Vec<f64> = (0..3).map(|_| 0.1 + rng.random::<f64>()).collect();
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= sum);
            for i in 0..3 {
                w[(r, i)] = row[i];
            }
        }
        let p = StrategyProfile::new(w.clone()).unwrap();
        let e1 = exploitability(&s, &p).unwrap();
        // Swap agents 0 and 2. Utilities are anonymous in opponents, so the
        // max over agents is unchanged.
        let mut swapped = w.clone();
        swapped.swap_rows(0, 2);
        let e2 = exploitability(&s, &StrategyProfile::new(swapped).unwrap()).unwrap();
        assert!((e1 - e2).abs() < 1e-12);
    }

    #[test]
    fn dynamics_converge_to_closed_form() {
        // Contraction regime: beta_d (M-1) well below 2 beta_i mu_min, so
        // the interior equilibrium attracts the damped dynamics. Outside
        // that regime the dynamics may legitimately settle on a coexisting
        // asymmetric boundary equilibrium instead.
        let c = DMatrix::from_row_slice(
            3,
            3,
            &[
                1.5, 0.8, 0.7, //
                0.8, 1.4, 0.6, //
                0.7, 0.6, 1.3,
            ],
        );
        let s = spec(c, &[0.54, 0.34, 0.12], 3, (1.0, 1.0, 0.25));
        let r = solve_interior(&s);
        let w = r.interior_w().expect("instance should be interior");
        let (limit, converged) =
            br_dynamics(&s, &StrategyProfile::uniform(3, 3), 10_000, 0.5).unwrap();
        assert!(converged);
        for agent in 0..3 {
            for i in 0..3 {
                assert!(
                    (limit.matrix()[(agent, i)] - w[i]).abs() < 1e-6,
                    "agent {agent} comp {i}"
                );
            }
        }
        // Homogeneity of the limit across agents.
        for agent in 1..3 {
            for i in 0..3 {
                assert!((limit.matrix()[(agent, i)] - limit.matrix()[(0, i)]).abs() < 1e-6);
            }
        }
        assert!(exploitability(&s, &limit).unwrap() <= 1e-6);
    }

    #[test]
    fn dynamics_fixed_point_at_equilibrium() {
        let s = spec(DMatrix::zeros(2, 2), &[0.7, 0.3], 2, (1.0, 1.0, 1.0));
        let r = solve_interior(&s);
        let eq = StrategyProfile::homogeneous(2, r.interior_w().unwrap()).unwrap();
        let (limit, converged) = br_dynamics(&s, &eq, 50, 0.5).unwrap();
        assert!(converged);
        for agent in 0..2 {
            for i in 0..2 {
                assert!((limit.matrix()[(agent, i)] - eq.matrix()[(agent, i)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn oracle_dimension_cap() {
        let d = MAX_ORACLE_DIM + 1;
        let s = spec(
            DMatrix::zeros(d, d),
            &vec![1.0 / d as f64; d],
            2,
            (1.0, 1.0, 1.0),
        );
        let p = StrategyProfile::uniform(2, d);
        assert!(best_response_exact(&s, &p, 0).is_err());
    }
}
