//! Command implementations, file formats, and heatmap rendering behind the
//! `nash-align` binary.
//!
//! Everything here is deterministic: identical inputs and flags produce
//! byte-identical outputs. Data files never embed timestamps.
//!
//! File formats:
//! - probability table CSV: header `sample_id,subpop_0..subpop_{D-1}`,
//!   one row per sample, probabilities in [0, 1], UTF-8, `.` decimal;
//! - ground-truth CSV: `sample_id,option_index,gt_0..gt_{Kc-1}`, rows
//!   aligned with the probability table;
//! - model-option CSV: `sample_id,subpop,opt_0..opt_{Kc-1}`, one row per
//!   (sample, subpopulation) pair;
//! - game exchange JSON: `{ "d": int, "c": [[..]], "a": [..] }`;
//! - rendered heatmaps: binary portable pixmap (P6), one pixel per cell.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::boundary_solver::{anneal_to_nash, AnnealSchedule};
use crate::dataprep::{
    build_attractiveness_from_alignment, build_attractiveness_from_shares, build_inconsistency,
    validate_psd, GroundTruth, PopulationShares, ProbabilityTable, PsiKind,
};
use crate::error::{Error, Result};
use crate::game::{Coefficients, GameSpec, StrategyProfile};
use crate::interior_solver::{find_alpha_roots, solve_interior, SingularKind, Validity};
use crate::oracle::exploitability;
use crate::sweep::{
    run_sweep, write_grid_csv, write_metrics_json, CellClass, GameTemplate, SweepConfig, SweepGrid,
};

/// Process exit codes, stable across releases:
/// 0 success (solve: interior equilibrium), 1 runtime failure,
/// 2 usage or input error, 3 no interior equilibrium, 4 singular ratio.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NO_INTERIOR: i32 = 3;
    pub const SINGULAR: i32 = 4;
}

/// Map an error to its exit code: input and parse problems are usage
/// errors, everything else is a runtime failure.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Invalid(_) | Error::Shape(_) => exit_codes::USAGE,
        _ => exit_codes::RUNTIME,
    }
}

/// The C/a exchange file.
#[derive(Debug, Serialize, Deserialize)]
pub struct GameFile {
    pub d: usize,
    pub c: Vec<Vec<f64>>,
    pub a: Vec<f64>,
}

impl GameFile {
    pub fn from_parts(c: &DMatrix<f64>, a: &DVector<f64>) -> Self {
        Self {
            d: c.nrows(),
            c: (0..c.nrows())
                .map(|i| (0..c.ncols()).map(|j| c[(i, j)]).collect())
                .collect(),
            a: a.iter().copied().collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn into_matrices(self) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let d = self.d;
        if self.c.len() != d || self.c.iter().any(|row| row.len() != d) {
            return Err(Error::Shape(format!(
                "exchange file declares d = {d} but c is not {d}x{d}"
            )));
        }
        if self.a.len() != d {
            return Err(Error::Shape(format!(
                "exchange file declares d = {d} but a has {} entries",
                self.a.len()
            )));
        }
        let c = DMatrix::from_fn(d, d, |i, j| self.c[i][j]);
        let a = DVector::from_vec(self.a);
        Ok((c, a))
    }
}

/// Split one CSV line into trimmed fields.
fn fields(line: &str) -> Vec<&str> {
    line.split(',').map(|f| f.trim()).collect()
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from {field:?}"),
    })
}

/// Read a probability-table CSV: `sample_id,subpop_0..subpop_{D-1}`.
/// Returns the sample ids alongside the matrix.
pub fn read_probs_csv(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let head = fields(header);
    if head.len() < 3 || head[0] != "sample_id" {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header sample_id,subpop_0..subpop_{{D-1}} with D >= 2, got {header:?}"
            ),
        });
    }
    let d = head.len() - 1;
    let mut ids = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let f = fields(line);
        if f.len() != d + 1 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} fields, found {}", d + 1, f.len()),
            });
        }
        ids.push(f[0].to_string());
        for field in &f[1..] {
            rows.push(parse_f64(field, line_no, "probability")?);
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok((ids.clone(), DMatrix::from_row_slice(ids.len(), d, &rows)))
}

/// Read the ground-truth companion CSV:
/// `sample_id,option_index,gt_0..gt_{Kc-1}`, rows aligned with `ids`.
pub fn read_ground_truth_csv(path: &Path, ids: &[String]) -> Result<GroundTruth> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let head = fields(header);
    if head.len() < 3 || head[0] != "sample_id" || head[1] != "option_index" {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header sample_id,option_index,gt_0..gt_{{Kc-1}}, got {header:?}"
            ),
        });
    }
    let kc = head.len() - 2;
    let mut option_index = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    let mut row_count = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let f = fields(line);
        if f.len() != kc + 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} fields, found {}", kc + 2, f.len()),
            });
        }
        if row_count >= ids.len() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("more ground-truth rows than the {} samples", ids.len()),
            });
        }
        if f[0] != ids[row_count] {
            return Err(Error::Parse {
                line: line_no,
                msg: format!(
                    "sample_id {:?} does not match probability-table row {:?}",
                    f[0], ids[row_count]
                ),
            });
        }
        let opt: usize = f[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("cannot parse option index from {:?}", f[1]),
        })?;
        option_index.push(opt);
        for field in &f[2..] {
            rows.push(parse_f64(field, line_no, "ground-truth probability")?);
        }
        row_count += 1;
    }
    if row_count != ids.len() {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("{} ground-truth rows for {} samples", row_count, ids.len()),
        });
    }
    GroundTruth::new(DMatrix::from_row_slice(row_count, kc, &rows), option_index)
}

/// Read the extended model-option CSV:
/// `sample_id,subpop,opt_0..opt_{Kc-1}`, one row per (sample, subpop).
pub fn read_model_options_csv(path: &Path, ids: &[String], d: usize) -> Result<Vec<DMatrix<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let head = fields(header);
    if head.len() < 3 || head[0] != "sample_id" || head[1] != "subpop" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header sample_id,subpop,opt_0..opt_{{Kc-1}}, got {header:?}"),
        });
    }
    let kc = head.len() - 2;
    let id_pos: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let k = ids.len();
    let mut seen = vec![false; k * d];
    let mut tables = vec![DMatrix::zeros(k, kc); d];
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let f = fields(line);
        if f.len() != kc + 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} fields, found {}", kc + 2, f.len()),
            });
        }
        let &row = id_pos.get(f[0]).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("unknown sample_id {:?}", f[0]),
        })?;
        let subpop: usize = f[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("cannot parse subpop index from {:?}", f[1]),
        })?;
        if subpop >= d {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("subpop index {subpop} out of range for D = {d}"),
            });
        }
        if seen[row * d + subpop] {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate row for sample {:?}, subpop {subpop}", f[0]),
            });
        }
        seen[row * d + subpop] = true;
        for (c, field) in f[2..].iter().enumerate() {
            tables[subpop][(row, c)] = parse_f64(field, line_no, "option probability")?;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!(
                "missing model-option row for sample {:?}, subpop {}",
                ids[missing / d],
                missing % d
            ),
        });
    }
    Ok(tables)
}

/// Parse a psi flag: `identity`, `power:<p>`, or `log1p`.
pub fn parse_psi(s: &str) -> Result<PsiKind> {
    let kind = if s == "identity" {
        PsiKind::Identity
    } else if s == "log1p" {
        PsiKind::Log1p
    } else if let Some(p) = s.strip_prefix("power:") {
        PsiKind::Power(
            p.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("cannot parse power exponent from {p:?}")))?,
        )
    } else {
        return Err(Error::Invalid(format!(
            "unknown psi {s:?}; expected identity, power:<p>, or log1p"
        )));
    };
    kind.validate()?;
    Ok(kind)
}

/// Parse a `lo,hi` range flag.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Invalid(format!(
            "expected a range of the form lo,hi, got {s:?}"
        )));
    }
    let lo = parts[0].trim().parse::<f64>();
    let hi = parts[1].trim().parse::<f64>();
    match (lo, hi) {
        (Ok(lo), Ok(hi)) => Ok((lo, hi)),
        _ => Err(Error::Invalid(format!("cannot parse range from {s:?}"))),
    }
}

/// Arguments of `nash-align build`.
#[derive(Debug)]
pub struct BuildArgs {
    pub probs: std::path::PathBuf,
    pub ground_truth: Option<std::path::PathBuf>,
    pub model_options: Option<std::path::PathBuf>,
    pub shares: Option<Vec<f64>>,
    pub psi: PsiKind,
    pub output: std::path::PathBuf,
}

/// Build the exchange file from probability tables, printing the PSD
/// validation report. Returns the process exit code.
pub fn cmd_build(args: &BuildArgs, out: &mut impl Write) -> Result<i32> {
    let (ids, probs) = read_probs_csv(&args.probs)?;
    let mut table = ProbabilityTable::new(probs)?;
    let d = table.d();

    let a = match (&args.shares, &args.ground_truth) {
        (Some(sizes), None) => {
            if sizes.len() != d {
                return Err(Error::Shape(format!(
                    "{} shares given for {d} subpopulations",
                    sizes.len()
                )));
            }
            build_attractiveness_from_shares(&PopulationShares::new(DVector::from_vec(
                sizes.clone(),
            ))?)
        }
        (None, Some(gt_path)) => {
            let opts_path = args
                .model_options
                .as_ref()
                .ok_or_else(|| Error::Invalid("--ground-truth requires --model-options".into()))?;
            let gt = read_ground_truth_csv(gt_path, &ids)?;
            let opts = read_model_options_csv(opts_path, &ids, d)?;
            table = table.with_ground_truth(gt)?.with_model_options(opts)?;
            build_attractiveness_from_alignment(&table)?
        }
        (Some(_), Some(_)) => {
            return Err(Error::Invalid(
                "give either --shares or --ground-truth, not both".into(),
            ))
        }
        (None, None) => return Err(Error::Invalid(
            "an attractiveness source is required: --shares or --ground-truth with --model-options"
                .into(),
        )),
    };

    let c = build_inconsistency(&table, args.psi)?;
    let report = validate_psd(&c, crate::game::PSD_TOL)?;
    writeln!(
        out,
        "psd check: min_eigenvalue = {:e}, symmetry_error = {:e}, dominance_error = {:e} -> {}",
        report.min_eigenvalue,
        report.symmetry_error,
        report.dominance_error,
        if report.passes() { "pass" } else { "FAIL" }
    )?;
    GameFile::from_parts(&c, &a).write(&args.output)?;
    writeln!(out, "wrote {}", args.output.display())?;
    Ok(if report.passes() {
        exit_codes::OK
    } else {
        exit_codes::RUNTIME
    })
}

/// Arguments of `nash-align solve`.
#[derive(Debug)]
pub struct SolveArgs {
    pub input: std::path::PathBuf,
    pub agents: usize,
    pub coeffs: Coefficients,
    pub verify: bool,
    pub boundary: bool,
    pub schedule: AnnealSchedule,
}

#[derive(Debug, Serialize)]
struct BoundaryOutput {
    profile: Vec<Vec<f64>>,
    exploitability: f64,
    stages: usize,
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    validity: &'static str,
    w: Option<Vec<f64>>,
    lambda: Option<f64>,
    alpha: f64,
    ridge: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    argmin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exploitability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary: Option<BoundaryOutput>,
}

/// Solve the closed form, optionally verifying with the oracle and falling
/// through to the boundary solver. Prints one JSON document to `out`;
/// stage logs go to `log` as JSON-lines.
pub fn cmd_solve(args: &SolveArgs, out: &mut impl Write, log: &mut impl Write) -> Result<i32> {
    let (c, a) = GameFile::read(&args.input)?.into_matrices()?;
    let spec = GameSpec::new(c, a, args.agents, args.coeffs)?;
    let result = solve_interior(&spec);

    let mut output = SolveOutput {
        validity: result.validity_label(),
        w: result.w_star.as_ref().map(|w| w.iter().copied().collect()),
        lambda: result.lambda_star,
        alpha: result.diagnostics.alpha,
        ridge: result.diagnostics.ridge,
        min_weight: None,
        argmin: None,
        singular: None,
        exploitability: None,
        boundary: None,
    };
    let code = match result.validity {
        Validity::InteriorValid => exit_codes::OK,
        Validity::NoInterior { min_weight, argmin } => {
            output.min_weight = Some(min_weight);
            output.argmin = Some(argmin);
            exit_codes::NO_INTERIOR
        }
        Validity::Singular(kind) => {
            output.singular = Some(match kind {
                SingularKind::NearPole { eigenvalue } => {
                    format!("near pole at eigenvalue {eigenvalue}")
                }
                SingularKind::AlphaZero { alpha } => format!("alpha = {alpha}"),
                SingularKind::FactorizationFailed => "factorization failed".into(),
            });
            exit_codes::SINGULAR
        }
    };

    if args.verify {
        if let Some(w) = result.interior_w() {
            let profile = StrategyProfile::homogeneous(spec.m(), w)?;
            output.exploitability = Some(exploitability(&spec, &profile)?);
        }
    }

    if args.boundary && matches!(result.validity, Validity::NoInterior { .. }) {
        let anneal = anneal_to_nash(&spec, &args.schedule)?;
        for stage in &anneal.stages {
            writeln!(log, "{}", serde_json::to_string(stage)?)?;
        }
        output.boundary = Some(BoundaryOutput {
            profile: (0..anneal.profile.m())
                .map(|m| anneal.profile.agent(m).iter().copied().collect())
                .collect(),
            exploitability: anneal.exploitability,
            stages: anneal.stages.len(),
        });
    }

    writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;
    Ok(code)
}

/// Arguments of `nash-align sweep`.
#[derive(Debug)]
pub struct SweepArgs {
    pub input: std::path::PathBuf,
    pub agents: usize,
    pub config: SweepConfig,
    pub jobs: Option<usize>,
    pub grid_out: std::path::PathBuf,
    pub metrics_out: std::path::PathBuf,
    pub render: Option<std::path::PathBuf>,
}

/// Run a sweep and write the grid CSV, the metrics JSON, and optionally a
/// P6 heatmap; the metrics line is echoed to `out`.
pub fn cmd_sweep(args: &SweepArgs, out: &mut impl Write) -> Result<i32> {
    let (c, a) = GameFile::read(&args.input)?.into_matrices()?;
    let template = GameTemplate::new(c, a, args.agents)?;

    let grid = match args.jobs {
        Some(jobs) if jobs > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Invalid(format!("cannot build worker pool: {e}")))?;
            pool.install(|| run_sweep(&template, &args.config))?
        }
        _ => run_sweep(&template, &args.config)?,
    };

    let mut csv = Vec::new();
    write_grid_csv(&grid, &mut csv)?;
    fs::write(&args.grid_out, &csv)?;

    let mut metrics = Vec::new();
    write_metrics_json(&grid.metrics, &mut metrics)?;
    fs::write(&args.metrics_out, &metrics)?;
    out.write_all(&metrics)?;

    if let Some(render_path) = &args.render {
        let focal = args.config.focal.unwrap_or(0);
        let image = render_heatmap(&grid, focal, &Palette::default());
        fs::write(render_path, image)?;
    }
    Ok(exit_codes::OK)
}

/// Two-point monotone colormap for valid cells. Both endpoints stay away
/// from pure black and pure white, which are reserved for excluded and
/// invalid cells.
#[derive(Debug, Clone, Copy)]
pub struct Palette {
    pub low: [u8; 3],
    pub high: [u8; 3],
}

impl Default for Palette {
    fn default() -> Self {
        // Dark blue at weight 0 up to warm yellow at weight 1.
        Self {
            low: [16, 16, 160],
            high: [240, 224, 32],
        }
    }
}

impl Palette {
    fn color(&self, t: f64) -> [u8; 3] {
        let t = t.clamp(0.0, 1.0);
        let mut rgb = [0u8; 3];
        for ch in 0..3 {
            let lo = self.low[ch] as f64;
            let hi = self.high[ch] as f64;
            rgb[ch] = (lo + t * (hi - lo)).round() as u8;
        }
        rgb
    }
}

/// Render a grid as a binary portable pixmap (P6), one pixel per cell.
///
/// Invalid cells are pure white, excluded cells pure black, and valid
/// cells map the focal subpopulation's weight through the palette. Image
/// row 0 is the highest y-coordinate (axes read like a plot). Identical
/// grids produce identical bytes.
pub fn render_heatmap(grid: &SweepGrid, focal: usize, palette: &Palette) -> Vec<u8> {
    let res = grid.config.resolution;
    let mut out = Vec::with_capacity(32 + 3 * res * res);
    out.extend_from_slice(format!("P6\n{res} {res}\n255\n").as_bytes());
    for row in 0..res {
        let iy = res - 1 - row;
        for ix in 0..res {
            let rgb = match &grid.cell(ix, iy).class {
                CellClass::Invalid { .. } => [255, 255, 255],
                CellClass::Excluded { .. } => [0, 0, 0],
                CellClass::Valid { w } => palette.color(w[focal]),
            };
            out.extend_from_slice(&rgb);
        }
    }
    out
}

/// Arguments of `nash-align verify`.
#[derive(Debug)]
pub struct VerifyArgs {
    pub input: std::path::PathBuf,
    pub profile: std::path::PathBuf,
    pub agents: Option<usize>,
    pub coeffs: Coefficients,
}

#[derive(Debug, Deserialize)]
struct ProfileFile {
    w: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    exploitability: f64,
    per_agent_gain: Vec<f64>,
}

/// Standalone oracle check of a profile file against a game.
///
/// The profile file holds `{ "w": [[..], ..] }` (one row per agent) or
/// `{ "w": [..] }` (a single strategy played homogeneously, requiring
/// `--agents`).
pub fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<i32> {
    let (c, a) = GameFile::read(&args.input)?.into_matrices()?;
    let text = fs::read_to_string(&args.profile)?;
    let file: ProfileFile = serde_json::from_str(&text)?;

    let profile = if let Ok(rows) = serde_json::from_value::<Vec<Vec<f64>>>(file.w.clone()) {
        if rows.is_empty() {
            return Err(Error::Invalid("profile has no rows".into()));
        }
        let d = rows[0].len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("profile rows have unequal lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        StrategyProfile::new(DMatrix::from_row_slice(rows.len(), d, &flat))?
    } else if let Ok(row) = serde_json::from_value::<Vec<f64>>(file.w.clone()) {
        let m = args
            .agents
            .ok_or_else(|| Error::Invalid("a flat profile vector requires --agents".into()))?;
        StrategyProfile::homogeneous(m, &DVector::from_vec(row))?
    } else {
        return Err(Error::Invalid(
            "profile \"w\" must be an array of numbers or an array of rows".into(),
        ));
    };

    let spec = GameSpec::new(c, a, profile.m(), args.coeffs)?;
    let mut per_agent = Vec::with_capacity(spec.m());
    for agent in 0..spec.m() {
        let br = crate::oracle::best_response_exact(&spec, &profile, agent)?;
        let current = crate::game::eval_utility(&spec, &profile, agent)?;
        per_agent.push((br.value - current).max(0.0));
    }
    let expl = per_agent.iter().cloned().fold(0.0f64, f64::max);
    let output = VerifyOutput {
        exploitability: expl,
        per_agent_gain: per_agent,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;
    Ok(exit_codes::OK)
}

/// Arguments of `nash-align roots`.
#[derive(Debug)]
pub struct RootsArgs {
    pub input: std::path::PathBuf,
    pub range: (f64, f64),
}

#[derive(Debug, Serialize)]
struct RootsOutput {
    poles: Vec<f64>,
    roots: Vec<f64>,
}

/// Scan for zeros of the normalization factor over a ratio interval.
/// Only the spectrum of `C` matters here, so agent count and coefficient
/// values are irrelevant.
pub fn cmd_roots(args: &RootsArgs, out: &mut impl Write) -> Result<i32> {
    let (c, a) = GameFile::read(&args.input)?.into_matrices()?;
    let spec = GameSpec::new(c, a, 2, Coefficients::unit())?;
    let roots = find_alpha_roots(&spec, args.range.0, args.range.1)?;
    let poles: Vec<f64> = spec.spectral().mu().iter().map(|&mu| 2.0 * mu).collect();
    let output = RootsOutput { poles, roots };
    writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;
    Ok(exit_codes::OK)
}
