//! Closed-form interior equilibrium solver.
//!
//! For the concave game of [`crate::game`], every interior Nash equilibrium
//! is homogeneous and given in closed form by
//!
//! ```text
//! w* = B (beta_a * a - lambda* 1),      B = (2 beta_i C + (M-1) beta_d I)^-1
//! lambda* = (beta_a * 1'B a - 1) / (1'B 1)
//! ```
//!
//! The relaxed solution always satisfies `1'w* = 1`; it is a valid interior
//! equilibrium exactly when every component is strictly positive. The
//! derivation requires `A = 2 beta_i C - beta_d I` to be invertible and the
//! scalar `alpha = 1'A^-1 1` to be nonzero; both degeneracies live on a
//! measure-zero set of coefficient ratios and are handled by one automatic
//! ridge retry on `beta_d`.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::GameSpec;

/// Components at or below this are treated as numerically zero when
/// classifying interiority.
pub const INTERIOR_FLOOR: f64 = 1e-12;
/// Threshold for both the `A`-invertibility check and `|alpha|`.
pub const SINGULARITY_TOL: f64 = 1e-10;
/// Ridge added to `beta_d` on the single automatic retry.
pub const RIDGE_EPS: f64 = 1e-8;
/// `|q_j|` below this is treated as a structural zero: the all-ones vector
/// carries no mass on that eigendirection, so `2 mu_j` is not a pole of `f`.
const Q_ZERO_TOL: f64 = 1e-12;
/// Absolute pole-proximity tolerance for [`f_alpha`].
const POLE_TOL: f64 = 1e-12;

/// Eigenvalues `mu` of `C` (ascending) and `q = Q'1`, the loadings of the
/// all-ones vector on the eigenbasis `C = Q diag(mu) Q'`.
#[derive(Debug, Clone)]
pub struct SpectralView {
    mu: DVector<f64>,
    q: DVector<f64>,
}

impl SpectralView {
    /// Decompose a symmetric matrix. Pairs are sorted by ascending
    /// eigenvalue so downstream iteration order is deterministic.
    pub fn from_symmetric(c: &DMatrix<f64>) -> Result<Self> {
        let d = c.nrows();
        if c.ncols() != d {
            return Err(Error::Shape(format!(
                "expected square matrix, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        let eig = c.clone().symmetric_eigen();
        let ones = DVector::from_element(d, 1.0);
        let q_full = eig.eigenvectors.transpose() * &ones;
        let mut pairs: Vec<(f64, f64)> = (0..d).map(|j| (eig.eigenvalues[j], q_full[j])).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mu = DVector::from_iterator(d, pairs.iter().map(|p| p.0));
        let q = DVector::from_iterator(d, pairs.iter().map(|p| p.1));
        let q_norm_sq = q.norm_squared();
        if (q_norm_sq - d as f64).abs() > 1e-8 {
            return Err(Error::Invalid(format!(
                "eigendecomposition lost orthonormality: |q|^2 = {q_norm_sq}, expected {d}"
            )));
        }
        Ok(Self { mu, q })
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.mu[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.mu[self.mu.len() - 1]
    }

    /// `f(beta) = sum_j q_j^2 / (2 mu_j - beta)`, skipping structural
    /// zeros of `q`. No pole guard; may return huge or non-finite values.
    fn f_value(&self, beta: f64) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.mu.len() {
            let qj = self.q[j];
            if qj.abs() <= Q_ZERO_TOL {
                continue;
            }
            sum += qj * qj / (2.0 * self.mu[j] - beta);
        }
        sum
    }

    /// Distinct poles `2 mu_j` with nonzero `q_j`, ascending.
    fn poles(&self) -> Vec<f64> {
        let mut poles: Vec<f64> = Vec::new();
        for j in 0..self.mu.len() {
            if self.q[j].abs() <= Q_ZERO_TOL {
                continue;
            }
            let p = 2.0 * self.mu[j];
            match poles.last() {
                Some(&last) if (p - last).abs() <= 1e-9 * (1.0 + p.abs()) => {}
                _ => poles.push(p),
            }
        }
        poles
    }
}

/// How a singular instance was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SingularKind {
    /// `beta_d / beta_i` sits on a pole `2 mu_j`, so `A` is not invertible.
    NearPole { eigenvalue: f64 },
    /// `alpha = 1'A^-1 1` vanishes; the multipliers are not pinned equal.
    AlphaZero { alpha: f64 },
    /// The SPD factorization of `2 beta_i C + (M-1) beta_d I` failed.
    FactorizationFailed,
}

/// Validity classification of the relaxed closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity {
    /// Every component strictly above [`INTERIOR_FLOOR`]: the unique
    /// interior equilibrium.
    InteriorValid,
    /// Some component of the relaxed solution is non-positive; no interior
    /// equilibrium exists.
    NoInterior { min_weight: f64, argmin: usize },
    /// Degenerate coefficient ratio; no relaxed solution is reported.
    Singular(SingularKind),
}

impl Validity {
    pub fn is_interior(&self) -> bool {
        matches!(self, Validity::InteriorValid)
    }
}

/// Numerical context of a solve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Diagnostics {
    /// Condition estimate of `2 beta_i C + (M-1) beta_d I` from the
    /// eigenvalues of `C`.
    pub condition: f64,
    /// Ridge actually added to `beta_d` (0 when the first attempt stood).
    pub ridge: f64,
    /// `alpha = 1'A^-1 1` at the effective coefficients.
    pub alpha: f64,
    /// `s0 = beta_a * 1'B a`.
    pub s0: f64,
    /// `s1 = 1'B 1`.
    pub s1: f64,
    /// `s2 = 1'B A^-1 1`.
    pub s2: f64,
}

/// Outcome of [`solve_interior`]: the relaxed homogeneous solution, its
/// shared multiplier, the validity class, and solve diagnostics.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub validity: Validity,
    /// Relaxed solution of the equilibrium linear system; present unless
    /// the instance was singular. Sums to 1 but may have non-positive
    /// components (then `validity` is `NoInterior`).
    pub w_star: Option<DVector<f64>>,
    pub lambda_star: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl EquilibriumResult {
    /// The equilibrium weights when (and only when) the interior
    /// equilibrium exists.
    pub fn interior_w(&self) -> Option<&DVector<f64>> {
        match self.validity {
            Validity::InteriorValid => self.w_star.as_ref(),
            _ => None,
        }
    }

    pub fn validity_label(&self) -> &'static str {
        match self.validity {
            Validity::InteriorValid => "interior_valid",
            Validity::NoInterior { .. } => "no_interior",
            Validity::Singular(_) => "singular",
        }
    }
}

// JSON shape: { "validity": ..., "w": ..., "lambda": ..., "alpha": ...,
// "ridge": ... } plus classification details when present.
impl Serialize for EquilibriumResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("EquilibriumResult", 8)?;
        st.serialize_field("validity", self.validity_label())?;
        match &self.w_star {
            Some(w) => st.serialize_field("w", &w.as_slice())?,
            None => st.serialize_field("w", &Option::<Vec<f64>>::None)?,
        }
        st.serialize_field("lambda", &self.lambda_star)?;
        st.serialize_field("alpha", &self.diagnostics.alpha)?;
        st.serialize_field("ridge", &self.diagnostics.ridge)?;
        match self.validity {
            Validity::NoInterior { min_weight, argmin } => {
                st.serialize_field("min_weight", &min_weight)?;
                st.serialize_field("argmin", &argmin)?;
            }
            Validity::Singular(kind) => {
                st.serialize_field("singular", &kind)?;
            }
            Validity::InteriorValid => {}
        }
        st.end()
    }
}

/// Detect the measure-zero degeneracies at the given diversity weight.
fn detect_singular(spec: &GameSpec, beta_d: f64) -> Option<SingularKind> {
    let view = spec.spectral();
    let beta_i = spec.coeffs().beta_i();
    for j in 0..view.mu().len() {
        if (2.0 * beta_i * view.mu()[j] - beta_d).abs() < SINGULARITY_TOL {
            return Some(SingularKind::NearPole {
                eigenvalue: view.mu()[j],
            });
        }
    }
    let alpha = view.f_value(beta_d / beta_i) / beta_i;
    if alpha.abs() < SINGULARITY_TOL {
        return Some(SingularKind::AlphaZero { alpha });
    }
    None
}

/// Solve `(2 beta_i C + (M-1) beta_d I) x = rhs` by Cholesky with one step
/// of iterative refinement.
fn spd_solve(
    chol: &Cholesky<f64, nalgebra::Dyn>,
    mat: &DMatrix<f64>,
    rhs: &DVector<f64>,
) -> DVector<f64> {
    let mut x = chol.solve(rhs);
    let residual = rhs - mat * &x;
    x += chol.solve(&residual);
    x
}

/// Compute the closed-form interior Nash equilibrium and classify it.
///
/// Always returns a result; degenerate coefficient ratios surface as
/// `Validity::Singular` after one ridge retry, never as a panic.
pub fn solve_interior(spec: &GameSpec) -> EquilibriumResult {
    let view = spec.spectral();
    let coeffs = spec.coeffs();

    let mut ridge = 0.0;
    if detect_singular(spec, coeffs.beta_d()).is_some() {
        ridge = RIDGE_EPS;
        if let Some(kind) = detect_singular(spec, coeffs.beta_d() + ridge) {
            return EquilibriumResult {
                validity: Validity::Singular(kind),
                w_star: None,
                lambda_star: None,
                diagnostics: Diagnostics {
                    condition: f64::NAN,
                    ridge,
                    alpha: view.f_value((coeffs.beta_d() + ridge) / coeffs.beta_i())
                        / coeffs.beta_i(),
                    s0: f64::NAN,
                    s1: f64::NAN,
                    s2: f64::NAN,
                },
            };
        }
    }

    let eff = coeffs.with_ridge(ridge);
    let d = spec.d();
    let m_minus_1 = (spec.m() - 1) as f64;
    let beta_a = eff.beta_a();
    let beta_i = eff.beta_i();
    let beta_d = eff.beta_d();

    let mut mat = spec.c() * (2.0 * beta_i);
    for i in 0..d {
        mat[(i, i)] += m_minus_1 * beta_d;
    }

    let alpha = view.f_value(beta_d / beta_i) / beta_i;
    let chol = match Cholesky::new(mat.clone()) {
        Some(c) => c,
        None => {
            return EquilibriumResult {
                validity: Validity::Singular(SingularKind::FactorizationFailed),
                w_star: None,
                lambda_star: None,
                diagnostics: Diagnostics {
                    condition: f64::NAN,
                    ridge,
                    alpha,
                    s0: f64::NAN,
                    s1: f64::NAN,
                    s2: f64::NAN,
                },
            };
        }
    };

    let ones = DVector::from_element(d, 1.0);
    let b_ones = spd_solve(&chol, &mat, &ones);
    let b_a = spd_solve(&chol, &mat, spec.a());

    let s1 = ones.dot(&b_ones);
    let s0 = beta_a * ones.dot(&b_a);
    let lambda = (s0 - 1.0) / s1;
    let w = &b_a * beta_a - &b_ones * lambda;

    let mut s2 = 0.0;
    let mut denom_min = f64::INFINITY;
    let mut denom_max = f64::NEG_INFINITY;
    for j in 0..d {
        let b_eig = 2.0 * beta_i * view.mu()[j] + m_minus_1 * beta_d;
        denom_min = denom_min.min(b_eig);
        denom_max = denom_max.max(b_eig);
        let qj = view.q()[j];
        if qj.abs() > Q_ZERO_TOL {
            s2 += qj * qj / (b_eig * (2.0 * beta_i * view.mu()[j] - beta_d));
        }
    }

    let mut min_weight = f64::INFINITY;
    let mut argmin = 0;
    for i in 0..d {
        if w[i] < min_weight {
            min_weight = w[i];
            argmin = i;
        }
    }
    let validity = if min_weight > INTERIOR_FLOOR {
        Validity::InteriorValid
    } else {
        Validity::NoInterior { min_weight, argmin }
    };

    EquilibriumResult {
        validity,
        w_star: Some(w),
        lambda_star: Some(lambda),
        diagnostics: Diagnostics {
            condition: denom_max / denom_min,
            ridge,
            alpha,
            s0,
            s1,
            s2,
        },
    }
}

/// `f(beta) = sum_j q_j^2 / (2 mu_j - beta)`, the spectral form of
/// `beta_i * 1'A^-1 1` as a function of the ratio `beta = beta_d / beta_i`.
///
/// Errors when `beta` is within [`POLE_TOL`] of a pole.
pub fn f_alpha(spec: &GameSpec, beta_ratio: f64) -> Result<f64> {
    let view = spec.spectral();
    for j in 0..view.mu().len() {
        if view.q()[j].abs() <= Q_ZERO_TOL {
            continue;
        }
        let pole = 2.0 * view.mu()[j];
        if (pole - beta_ratio).abs() < POLE_TOL {
            return Err(Error::Pole {
                beta: beta_ratio,
                pole,
                mu: view.mu()[j],
            });
        }
    }
    Ok(view.f_value(beta_ratio))
}

/// All roots of `f` in `[lo, hi]`, `lo > 0`.
///
/// `f` is strictly increasing between consecutive poles, so each
/// pole-to-pole subinterval holds at most one root; the root count is
/// bounded by one more than the number of distinct poles. Roots are found
/// by bisection on every subinterval with a sign change.
pub fn find_alpha_roots(spec: &GameSpec, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0) {
        return Err(Error::Invalid(format!(
            "root search interval must start above 0, got lo = {lo}"
        )));
    }
    if !(hi > lo) {
        return Err(Error::Invalid(format!(
            "empty root search interval [{lo}, {hi}]"
        )));
    }
    let view = spec.spectral();
    let poles = view.poles();

    let mut cuts: Vec<(f64, bool)> = vec![(lo, false)];
    for &p in &poles {
        if p > lo && p < hi {
            cuts.push((p, true));
        }
    }
    cuts.push((hi, false));

    let mut roots = Vec::new();
    for win in cuts.windows(2) {
        let (l, l_is_pole) = win[0];
        let (r, r_is_pole) = win[1];
        let margin = ((r - l) * 1e-9).max(1e-13 * (1.0 + l.abs()));
        let a = if l_is_pole { l + margin } else { l };
        let b = if r_is_pole { r - margin } else { r };
        if !(b > a) {
            continue;
        }
        let fa = view.f_value(a);
        let fb = view.f_value(b);
        if !fa.is_finite() || !fb.is_finite() {
            continue;
        }
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fb == 0.0 {
            roots.push(b);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        roots.push(bisect(view, a, fa, b));
    }
    Ok(roots)
}

fn bisect(view: &SpectralView, mut a: f64, mut fa: f64, mut b: f64) -> f64 {
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = view.f_value(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    mid
}
