//! Construction of the inconsistency matrix and attractiveness vector
//! from ingested subpopulation probability tables.
//!
//! The pipeline operates on probabilities, not logits: whatever produced
//! the per-subpopulation response probabilities (and optional option-level
//! distributions) normalized them upstream. Entry `probs[k][i]` is
//! subpopulation model `i`'s probability for the recorded response of
//! sample `k`.
//!
//! The inconsistency matrix averages a monotone transform of pairwise
//! probability discrepancies across samples and sets each diagonal entry
//! to its row's off-diagonal sum, making the result symmetric and
//! diagonally dominant with equality, hence PSD by Gershgorin.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance on each ground-truth row's deviation from unit sum.
const GT_ROW_TOL: f64 = 1e-9;

/// Monotone transform applied to pairwise probability discrepancies.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PsiKind {
    /// psi(r) = r (the default).
    #[default]
    Identity,
    /// psi(r) = r^p, p >= 1.
    Power(f64),
    /// psi(r) = ln(1 + r).
    Log1p,
}

impl PsiKind {
    pub fn validate(&self) -> Result<()> {
        if let PsiKind::Power(p) = self {
            if !(p.is_finite() && *p >= 1.0) {
                return Err(Error::Invalid(format!(
                    "power exponent must be >= 1, got {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn apply(&self, r: f64) -> f64 {
        match self {
            PsiKind::Identity => r,
            PsiKind::Power(p) => r.powf(*p),
            PsiKind::Log1p => r.ln_1p(),
        }
    }
}

/// Human preference distributions over the option set, one row per sample,
/// with the index of the recorded option for each sample.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    dist: DMatrix<f64>, // K x Kc
    option_index: Vec<usize>,
}

impl GroundTruth {
    pub fn new(dist: DMatrix<f64>, option_index: Vec<usize>) -> Result<Self> {
        let (k, kc) = (dist.nrows(), dist.ncols());
        if option_index.len() != k {
            return Err(Error::Shape(format!(
                "option index has {} entries for {k} samples",
                option_index.len()
            )));
        }
        for (row, &opt) in option_index.iter().enumerate() {
            if opt >= kc {
                return Err(Error::Invalid(format!(
                    "option index {opt} out of range for {kc} options (sample {row})"
                )));
            }
        }
        for r in 0..k {
            let mut sum = 0.0;
            for c in 0..kc {
                let v = dist[(r, c)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Invalid(format!(
                        "ground truth [{r}][{c}] = {v} must be non-negative"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > GT_ROW_TOL {
                return Err(Error::Invalid(format!(
                    "ground-truth row {r} sums to {sum}, not 1 within {GT_ROW_TOL:e}"
                )));
            }
        }
        Ok(Self { dist, option_index })
    }

    pub fn dist(&self) -> &DMatrix<f64> {
        &self.dist
    }

    pub fn option_index(&self) -> &[usize] {
        &self.option_index
    }
}

/// K response-probability samples for D subpopulation models, with
/// optional ground-truth preference data and option-level model
/// distributions.
#[derive(Debug, Clone)]
pub struct ProbabilityTable {
    probs: DMatrix<f64>, // K x D
    ground_truth: Option<GroundTruth>,
    /// Per-subpopulation option-level model distributions: `model_options[i]`
    /// is K x Kc, row k being model i's distribution over options at sample k.
    model_options: Option<Vec<DMatrix<f64>>>,
}

impl ProbabilityTable {
    pub fn new(probs: DMatrix<f64>) -> Result<Self> {
        let (k, d) = (probs.nrows(), probs.ncols());
        if k == 0 {
            return Err(Error::EmptyTable);
        }
        if d < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 subpopulations, got {d}"
            )));
        }
        for r in 0..k {
            for c in 0..d {
                let v = probs[(r, c)];
                if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                    return Err(Error::Invalid(format!(
                        "probability [{r}][{c}] = {v} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self {
            probs,
            ground_truth: None,
            model_options: None,
        })
    }

    pub fn with_ground_truth(mut self, gt: GroundTruth) -> Result<Self> {
        if gt.dist.nrows() != self.k() {
            return Err(Error::Shape(format!(
                "ground truth has {} rows for {} samples",
                gt.dist.nrows(),
                self.k()
            )));
        }
        self.ground_truth = Some(gt);
        Ok(self)
    }

    pub fn with_model_options(mut self, options: Vec<DMatrix<f64>>) -> Result<Self> {
        if options.len() != self.d() {
            return Err(Error::Shape(format!(
                "model options cover {} subpopulations, expected {}",
                options.len(),
                self.d()
            )));
        }
        for (i, m) in options.iter().enumerate() {
            if m.nrows() != self.k() {
                return Err(Error::Shape(format!(
                    "model options for subpopulation {i} have {} rows for {} samples",
                    m.nrows(),
                    self.k()
                )));
            }
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let v = m[(r, c)];
                    if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                        return Err(Error::Invalid(format!(
                            "model option probability [{r}][{c}] = {v} for subpopulation {i} outside [0, 1]"
                        )));
                    }
                }
            }
        }
        self.model_options = Some(options);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.probs.nrows()
    }

    pub fn d(&self) -> usize {
        self.probs.ncols()
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn ground_truth(&self) -> Option<&GroundTruth> {
        self.ground_truth.as_ref()
    }

    pub fn model_options(&self) -> Option<&[DMatrix<f64>]> {
        self.model_options.as_deref()
    }
}

/// Subpopulation sizes N_i, all strictly positive.
#[derive(Debug, Clone)]
pub struct PopulationShares {
    sizes: DVector<f64>,
}

impl PopulationShares {
    pub fn new(sizes: DVector<f64>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 subpopulation sizes, got {}",
                sizes.len()
            )));
        }
        for (i, &n) in sizes.iter().enumerate() {
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::Invalid(format!(
                    "subpopulation size N[{i}] = {n} must be strictly positive"
                )));
            }
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &DVector<f64> {
        &self.sizes
    }
}

/// Build the inconsistency matrix from a probability table.
///
/// Off-diagonal `C_ij` is the sample average of `psi(|probs[k][i] -
/// probs[k][j]|)`; each diagonal entry is its row's off-diagonal sum,
/// accumulated in ascending column order so diagonal dominance holds
/// bitwise, not just within rounding.
pub fn build_inconsistency(table: &ProbabilityTable, psi: PsiKind) -> Result<DMatrix<f64>> {
    psi.validate()?;
    let k = table.k();
    let d = table.d();
    let p = table.probs();
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let mut sum = 0.0;
            for s in 0..k {
                sum += psi.apply((p[(s, i)] - p[(s, j)]).abs());
            }
            let avg = sum / k as f64;
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            if j != i {
                row += c[(i, j)];
            }
        }
        c[(i, i)] = row;
    }
    Ok(c)
}

/// Normalize subpopulation sizes to fractional shares: `a_i = N_i / sum N`.
pub fn build_attractiveness_from_shares(shares: &PopulationShares) -> DVector<f64> {
    let total = shares.sizes().sum();
    shares.sizes() / total
}

/// Attractiveness from alignment with human preferences: the sample
/// average of the inner product between each subpopulation model's
/// option-level distribution and the ground-truth preference distribution,
/// normalized onto the simplex.
pub fn build_attractiveness_from_alignment(table: &ProbabilityTable) -> Result<DVector<f64>> {
    let gt = table.ground_truth().ok_or(Error::MissingGroundTruth)?;
    let options = table.model_options().ok_or(Error::MissingGroundTruth)?;
    let k = table.k();
    let d = table.d();
    let mut raw = DVector::zeros(d);
    for i in 0..d {
        let m = &options[i];
        if m.ncols() != gt.dist().ncols() {
            return Err(Error::Shape(format!(
                "model options for subpopulation {i} have {} columns, ground truth has {}",
                m.ncols(),
                gt.dist().ncols()
            )));
        }
        let mut acc = 0.0;
        for s in 0..k {
            acc += m.row(s).dot(&gt.dist().row(s));
        }
        raw[i] = acc / k as f64;
    }
    let total = raw.sum();
    if !(total > 0.0) {
        return Err(Error::Domain(format!(
            "alignment scores sum to {total}; cannot normalize onto the simplex"
        )));
    }
    Ok(raw / total)
}

/// Probability the mixture assigns to a response whose per-subpopulation
/// probabilities are `nu_values`: the convex combination `weights . nu`.
pub fn mixture_prob(weights: &DVector<f64>, nu_values: &DVector<f64>) -> Result<f64> {
    if weights.len() != nu_values.len() {
        return Err(Error::Shape(format!(
            "weights have length {}, nu values {}",
            weights.len(),
            nu_values.len()
        )));
    }
    let mut sum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Invalid(format!("weight [{i}] = {w} is negative")));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!(
            "weights sum to {sum}, not 1 within 1e-12"
        )));
    }
    for (i, &v) in nu_values.iter().enumerate() {
        if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
            return Err(Error::Invalid(format!(
                "nu value [{i}] = {v} outside [0, 1]"
            )));
        }
    }
    Ok(weights.dot(nu_values))
}

/// Report of the PSD / symmetry / dominance checks on a built matrix.
#[derive(Debug, Clone, Copy)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub symmetry_error: f64,
    pub dominance_error: f64,
    pub tol: f64,
}

impl PsdReport {
    pub fn passes(&self) -> bool {
        self.min_eigenvalue >= -self.tol
    }
}

/// Validate a candidate inconsistency matrix: smallest eigenvalue (via the
/// symmetric eigendecomposition), worst symmetry violation, and worst
/// deviation of each diagonal entry from its row's off-diagonal sum (summed
/// in ascending column order, matching [`build_inconsistency`]).
pub fn validate_psd(c: &DMatrix<f64>, tol: f64) -> Result<PsdReport> {
    let d = c.nrows();
    if c.ncols() != d {
        return Err(Error::Shape(format!(
            "expected square matrix, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    let mut symmetry_error: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            symmetry_error = symmetry_error.max((c[(i, j)] - c[(j, i)]).abs());
        }
    }
    let mut dominance_error: f64 = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            if j != i {
                row += c[(i, j)];
            }
        }
        dominance_error = dominance_error.max((c[(i, i)] - row).abs());
    }
    let sym = (c + c.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.min();
    Ok(PsdReport {
        min_eigenvalue,
        symmetry_error,
        dominance_error,
        tol,
    })
}
