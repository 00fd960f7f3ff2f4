//! Log-scaled coefficient sweeps and exclusion metrics.
//!
//! A sweep fixes one of the three incentive coefficients, varies the other
//! two over log-spaced grids, solves the closed form in every cell, and
//! classifies the result: `valid` (interior equilibrium, nothing below the
//! exclusion threshold), `excluded` (interior equilibrium with some subpopulation
//! weight, or the focal one, strictly below the threshold), or
//! `invalid` (no interior equilibrium, or a singular ratio).
//!
//! Cell coordinates come from closed-form interpolation in log space, so
//! grids are bit-reproducible and independent of evaluation order; cells
//! are embarrassingly parallel.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{Coefficients, GameSpec};
use crate::interior_solver::{solve_interior, EquilibriumResult, Validity};

/// Which coefficient stays fixed during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedCoeff {
    BetaA,
    BetaI,
    BetaD,
}

impl FixedCoeff {
    /// Axis labels for the two free coefficients, in (x, y) order:
    /// the free coefficients keep their (beta_a, beta_i, beta_d) order.
    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self {
            FixedCoeff::BetaA => ("beta_i", "beta_d"),
            FixedCoeff::BetaI => ("beta_a", "beta_d"),
            FixedCoeff::BetaD => ("beta_a", "beta_i"),
        }
    }

    fn coefficients(&self, fixed: f64, x: f64, y: f64) -> Result<Coefficients> {
        match self {
            FixedCoeff::BetaA => Coefficients::new(fixed, x, y),
            FixedCoeff::BetaI => Coefficients::new(x, fixed, y),
            FixedCoeff::BetaD => Coefficients::new(x, y, fixed),
        }
    }
}

/// Sweep geometry and classification parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub fixed: FixedCoeff,
    /// Value of the fixed coefficient (1 by default). Must be strictly
    /// positive; to study a switched-off coefficient, substitute a tiny
    /// value such as 1e-6.
    pub fixed_value: f64,
    /// Log-scaled range of the x-axis coefficient.
    pub range_x: (f64, f64),
    /// Log-scaled range of the y-axis coefficient.
    pub range_y: (f64, f64),
    /// Grid points per axis.
    pub resolution: usize,
    /// A weight strictly below this marks exclusion.
    pub exclusion_threshold: f64,
    /// When set, exclusion is judged on this subpopulation only.
    pub focal: Option<usize>,
}

impl SweepConfig {
    pub fn new(fixed: FixedCoeff) -> Self {
        Self {
            fixed,
            fixed_value: 1.0,
            range_x: (1e-2, 1e2),
            range_y: (1e-2, 1e2),
            resolution: 200,
            exclusion_threshold: 0.05,
            focal: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("x", self.range_x), ("y", self.range_y)] {
            if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Invalid(format!(
                    "{name} range [{lo}, {hi}] must satisfy 0 < lo < hi"
                )));
            }
        }
        if self.resolution < 2 {
            return Err(Error::Invalid(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        if !(self.exclusion_threshold > 0.0 && self.exclusion_threshold < 1.0) {
            return Err(Error::Invalid(format!(
                "exclusion threshold must lie in (0, 1), got {}",
                self.exclusion_threshold
            )));
        }
        if !(self.fixed_value > 0.0 && self.fixed_value.is_finite()) {
            return Err(Error::Invalid(format!(
                "fixed coefficient value must be positive, got {}",
                self.fixed_value
            )));
        }
        Ok(())
    }

    /// The i-th grid coordinate on a log-spaced axis, in closed form.
    pub fn axis_value(range: (f64, f64), resolution: usize, i: usize) -> f64 {
        let (lo, hi) = range;
        let t = i as f64 / (resolution - 1) as f64;
        (lo.ln() + t * (hi.ln() - lo.ln())).exp()
    }
}

/// Fixed game data shared by every cell of a sweep: the matrix, the
/// attractiveness vector, the agent count, and the cached spectrum.
#[derive(Debug, Clone)]
pub struct GameTemplate {
    base: GameSpec,
}

impl GameTemplate {
    pub fn new(c: DMatrix<f64>, a: DVector<f64>, m: usize) -> Result<Self> {
        Ok(Self {
            base: GameSpec::new(c, a, m, Coefficients::unit())?,
        })
    }

    pub fn from_spec(spec: &GameSpec) -> Self {
        Self { base: spec.clone() }
    }

    pub fn d(&self) -> usize {
        self.base.d()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    /// The game at specific coefficients; the cached eigendecomposition is
    /// shared, not recomputed.
    pub fn instantiate(&self, coeffs: Coefficients) -> GameSpec {
        self.base.with_coefficients(coeffs)
    }
}

/// Classification of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellClass {
    /// Interior equilibrium with no weight below the threshold.
    Valid { w: DVector<f64> },
    /// Interior equilibrium driving the listed subpopulations strictly
    /// below the threshold.
    Excluded {
        w: DVector<f64>,
        excluded: Vec<usize>,
    },
    /// No interior equilibrium (`singular` marks the degenerate-ratio case).
    Invalid { singular: bool },
}

impl CellClass {
    pub fn label(&self) -> &'static str {
        match self {
            CellClass::Valid { .. } => "valid",
            CellClass::Excluded { .. } => "excluded",
            CellClass::Invalid { .. } => "invalid",
        }
    }

    pub fn weights(&self) -> Option<&DVector<f64>> {
        match self {
            CellClass::Valid { w } | CellClass::Excluded { w, .. } => Some(w),
            CellClass::Invalid { .. } => None,
        }
    }
}

/// One grid cell: the coefficients used and the classification.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub coeffs: Coefficients,
    pub class: CellClass,
}

/// Exclusion area shares of a grid (or a pool of grids).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionMetrics {
    /// Fraction of cells classified `excluded`.
    pub exclusion_frac: f64,
    /// Fraction of cells classified `invalid`.
    pub invalid_frac: f64,
    /// `exclusion / (1 - invalid)`; 0 with `degenerate` set when every
    /// cell is invalid.
    pub conditional_exclusion: f64,
    pub degenerate: bool,
}

/// A completed sweep: configuration, row-major cells
/// (`cells[iy * resolution + ix]`), and pooled metrics.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub config: SweepConfig,
    pub d: usize,
    pub cells: Vec<CellResult>,
    pub metrics: ExclusionMetrics,
}

impl SweepGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &CellResult {
        &self.cells[iy * self.config.resolution + ix]
    }
}

/// Classify a solved cell against the exclusion threshold (strict `<`).
pub fn classify_cell(
    result: &EquilibriumResult,
    threshold: f64,
    focal: Option<usize>,
) -> CellClass {
    match result.validity {
        Validity::Singular(_) => CellClass::Invalid { singular: true },
        Validity::NoInterior { .. } => CellClass::Invalid { singular: false },
        Validity::InteriorValid => {
            let w = result
                .w_star
                .clone()
                .expect("interior result always carries weights");
            let excluded: Vec<usize> = match focal {
                Some(f) => {
                    if w[f] < threshold {
                        vec![f]
                    } else {
                        vec![]
                    }
                }
                None => (0..w.len()).filter(|&i| w[i] < threshold).collect(),
            };
            if excluded.is_empty() {
                CellClass::Valid { w }
            } else {
                CellClass::Excluded { w, excluded }
            }
        }
    }
}

/// Run the sweep: solve the closed form in every cell and classify it.
/// Deterministic for fixed inputs regardless of thread count.
pub fn run_sweep(template: &GameTemplate, config: &SweepConfig) -> Result<SweepGrid> {
    config.validate()?;
    if let Some(f) = config.focal {
        if f >= template.d() {
            return Err(Error::Invalid(format!(
                "focal subpopulation {f} out of range for D = {}",
                template.d()
            )));
        }
    }
    let res = config.resolution;
    let cells: Vec<CellResult> = (0..res * res)
        .into_par_iter()
        .map(|idx| {
            let ix = idx % res;
            let iy = idx / res;
            let x = SweepConfig::axis_value(config.range_x, res, ix);
            let y = SweepConfig::axis_value(config.range_y, res, iy);
            let coeffs = config
                .fixed
                .coefficients(config.fixed_value, x, y)
                .expect("grid coordinates are positive");
            let spec = template.instantiate(coeffs);
            let solved = solve_interior(&spec);
            CellResult {
                coeffs,
                class: classify_cell(&solved, config.exclusion_threshold, config.focal),
            }
        })
        .collect();
    let metrics = metrics_from_counts(count_classes(&cells), cells.len());
    Ok(SweepGrid {
        config: config.clone(),
        d: template.d(),
        cells,
        metrics,
    })
}

fn count_classes(cells: &[CellResult]) -> (usize, usize) {
    let mut excluded = 0;
    let mut invalid = 0;
    for c in cells {
        match c.class {
            CellClass::Excluded { .. } => excluded += 1,
            CellClass::Invalid { .. } => invalid += 1,
            CellClass::Valid { .. } => {}
        }
    }
    (excluded, invalid)
}

fn metrics_from_counts((excluded, invalid): (usize, usize), total: usize) -> ExclusionMetrics {
    let exclusion_frac = excluded as f64 / total as f64;
    let invalid_frac = invalid as f64 / total as f64;
    let (conditional_exclusion, degenerate) = if invalid < total {
        (excluded as f64 / (total - invalid) as f64, false)
    } else {
        (0.0, true)
    };
    ExclusionMetrics {
        exclusion_frac,
        invalid_frac,
        conditional_exclusion,
        degenerate,
    }
}

/// Metrics of a single grid.
pub fn exclusion_metrics(grid: &SweepGrid) -> ExclusionMetrics {
    metrics_from_counts(count_classes(&grid.cells), grid.cells.len())
}

/// Pool cell counts across grids before computing fractions
/// (count-weighted, not a mean of per-grid fractions).
pub fn aggregate_metrics(grids: &[SweepGrid]) -> Result<ExclusionMetrics> {
    let Some(first) = grids.first() else {
        return Err(Error::Invalid("no grids to aggregate".into()));
    };
    let mut excluded = 0;
    let mut invalid = 0;
    let mut total = 0;
    for g in grids {
        if g.config.resolution != first.config.resolution {
            return Err(Error::Shape(format!(
                "resolution mismatch: {} vs {}",
                g.config.resolution, first.config.resolution
            )));
        }
        let (e, i) = count_classes(&g.cells);
        excluded += e;
        invalid += i;
        total += g.cells.len();
    }
    Ok(metrics_from_counts((excluded, invalid), total))
}

/// Write the grid as CSV: `beta_x,beta_y,class,w_0..w_{D-1}`, row-major in
/// (y, x) index order, with empty weight fields for invalid cells.
pub fn write_grid_csv<W: std::io::Write>(grid: &SweepGrid, out: &mut W) -> Result<()> {
    let (x_name, y_name) = grid.config.fixed.axis_names();
    write!(out, "{x_name},{y_name},class")?;
    for i in 0..grid.d {
        write!(out, ",w_{i}")?;
    }
    writeln!(out)?;
    let res = grid.config.resolution;
    for iy in 0..res {
        for ix in 0..res {
            let x = SweepConfig::axis_value(grid.config.range_x, res, ix);
            let y = SweepConfig::axis_value(grid.config.range_y, res, iy);
            let cell = grid.cell(ix, iy);
            write!(out, "{x},{y},{}", cell.class.label())?;
            match cell.class.weights() {
                Some(w) => {
                    for i in 0..grid.d {
                        write!(out, ",{}", w[i])?;
                    }
                }
                None => {
                    for _ in 0..grid.d {
                        write!(out, ",")?;
                    }
                }
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Format with 12 significant digits, scientific notation.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write metrics as JSON with 12 significant digits:
/// `{ "exclusion": x, "invalid": x, "conditional_exclusion": x }`.
pub fn write_metrics_json<W: std::io::Write>(
    metrics: &ExclusionMetrics,
    out: &mut W,
) -> Result<()> {
    writeln!(
        out,
        "{{ \"exclusion\": {}, \"invalid\": {}, \"conditional_exclusion\": {} }}",
        sig12(metrics.exclusion_frac),
        sig12(metrics.invalid_frac),
        sig12(metrics.conditional_exclusion)
    )?;
    Ok(())
}
