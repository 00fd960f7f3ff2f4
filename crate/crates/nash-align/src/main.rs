//! Thin command-line front end: argument parsing and dispatch only; all
//! behavior lives in the library's `cli` module.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nash_align::boundary_solver::AnnealSchedule;
use nash_align::cli::{
    cmd_build, cmd_roots, cmd_solve, cmd_sweep, cmd_verify, exit_code_for, parse_psi, parse_range,
    BuildArgs, RootsArgs, SolveArgs, SweepArgs, VerifyArgs,
};
use nash_align::game::Coefficients;
use nash_align::sweep::{FixedCoeff, SweepConfig};

const AFTER_HELP: &str = "\
Exit codes (stable contract):
  0  success; for solve: an interior equilibrium exists
  1  runtime failure (I/O, PSD validation failure, divergence)
  2  usage or input error (bad flags, malformed files)
  3  solve: no interior equilibrium (relaxed solution has a non-positive
     component); boundary results still print when --boundary is given
  4  solve: singular coefficient ratio even after the ridge retry

The environment variable NASH_ALIGN_SEED is reserved but currently unused:
every algorithm in this tool is deterministic.";

#[derive(Parser)]
#[command(
    name = "nash-align",
    version,
    about = "Equilibrium analysis for subpopulation-alignment games",
    after_help = AFTER_HELP
)]
struct TopLevel {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixedChoice {
    BetaA,
    BetaI,
    BetaD,
}

impl From<FixedChoice> for FixedCoeff {
    fn from(f: FixedChoice) -> Self {
        match f {
            FixedChoice::BetaA => FixedCoeff::BetaA,
            FixedChoice::BetaI => FixedCoeff::BetaI,
            FixedChoice::BetaD => FixedCoeff::BetaD,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the C/a exchange file from probability-table CSVs.
    Build {
        /// Probability table: sample_id,subpop_0..subpop_{D-1}.
        #[arg(long)]
        probs: PathBuf,
        /// Ground-truth CSV: sample_id,option_index,gt_0..gt_{Kc-1}.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        /// Model-option CSV: sample_id,subpop,opt_0..opt_{Kc-1}.
        #[arg(long)]
        model_options: Option<PathBuf>,
        /// Comma-separated subpopulation sizes (alternative to alignment
        /// attractiveness).
        #[arg(long)]
        shares: Option<String>,
        /// Discrepancy transform: identity, power:<p>, or log1p.
        #[arg(long, default_value = "identity")]
        psi: String,
        /// Output exchange file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compute the closed-form interior equilibrium of a game file.
    Solve {
        /// C/a exchange file.
        #[arg(short, long)]
        input: PathBuf,
        /// Number of agents M (no default; must be given explicitly).
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        beta_a: f64,
        #[arg(long)]
        beta_i: f64,
        #[arg(long)]
        beta_d: f64,
        /// Append the oracle's exploitability certificate.
        #[arg(long)]
        verify: bool,
        /// On a no-interior outcome, run the annealed boundary solver
        /// (stage logs go to stderr as JSON-lines).
        #[arg(long)]
        boundary: bool,
        #[arg(long, default_value_t = AnnealSchedule::default().tau0)]
        tau0: f64,
        #[arg(long, default_value_t = AnnealSchedule::default().decay)]
        decay: f64,
        #[arg(long, default_value_t = AnnealSchedule::default().tau_min)]
        tau_min: f64,
        #[arg(long, default_value_t = AnnealSchedule::default().max_outer)]
        max_outer: usize,
        #[arg(long, default_value_t = AnnealSchedule::default().inner_steps)]
        inner_steps: usize,
        #[arg(long, default_value_t = AnnealSchedule::default().step_size)]
        step_size: f64,
        #[arg(long, default_value_t = AnnealSchedule::default().grad_tol)]
        grad_tol: f64,
    },
    /// Sweep two coefficients over log-scaled grids and classify each cell.
    Sweep {
        /// C/a exchange file.
        #[arg(short, long)]
        input: PathBuf,
        /// Number of agents M (no default; must be given explicitly).
        #[arg(long)]
        agents: usize,
        /// Which coefficient stays fixed.
        #[arg(long, value_enum)]
        fixed: FixedChoice,
        /// Value of the fixed coefficient.
        #[arg(long, default_value_t = 1.0)]
        fixed_value: f64,
        /// Log-scaled x-axis range, lo,hi.
        #[arg(long, default_value = "1e-2,1e2")]
        range_x: String,
        /// Log-scaled y-axis range, lo,hi.
        #[arg(long, default_value = "1e-2,1e2")]
        range_y: String,
        /// Grid points per axis.
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Exclusion threshold; a weight strictly below it marks the cell.
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        /// Judge exclusion on this subpopulation only.
        #[arg(long)]
        focal: Option<usize>,
        /// Worker threads for the cell pool (default: all cores). Output
        /// is byte-identical regardless.
        #[arg(long)]
        jobs: Option<usize>,
        /// Grid CSV output path.
        #[arg(long, default_value = "grid.csv")]
        grid_out: PathBuf,
        /// Metrics JSON output path.
        #[arg(long, default_value = "metrics.json")]
        metrics_out: PathBuf,
        /// Also render a P6 heatmap to this path.
        #[arg(long)]
        render: Option<PathBuf>,
    },
    /// Oracle-check a profile file: exact best responses and exploitability.
    Verify {
        /// C/a exchange file.
        #[arg(short, long)]
        input: PathBuf,
        /// Profile JSON: { "w": [[..], ..] } or { "w": [..] }.
        #[arg(long)]
        profile: PathBuf,
        /// Agent count, required when the profile is a single vector.
        #[arg(long)]
        agents: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        beta_a: f64,
        #[arg(long, default_value_t = 1.0)]
        beta_i: f64,
        #[arg(long, default_value_t = 1.0)]
        beta_d: f64,
    },
    /// Find zeros of the normalization factor f over a ratio interval.
    /// Only the spectrum of C matters; coefficients are not needed.
    Roots {
        /// C/a exchange file.
        #[arg(short, long)]
        input: PathBuf,
        /// Ratio interval, lo,hi with lo > 0.
        #[arg(long, default_value = "1e-2,1e2")]
        range_x: String,
    },
}

fn run(cli: TopLevel) -> nash_align::Result<i32> {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match cli.command {
        Command::Build {
            probs,
            ground_truth,
            model_options,
            shares,
            psi,
            output,
        } => {
            let shares = shares
                .map(|s| {
                    s.split(',')
                        .map(|x| {
                            x.trim().parse::<f64>().map_err(|_| {
                                nash_align::Error::Invalid(format!("cannot parse share from {x:?}"))
                            })
                        })
                        .collect::<nash_align::Result<Vec<f64>>>()
                })
                .transpose()?;
            let args = BuildArgs {
                probs,
                ground_truth,
                model_options,
                shares,
                psi: parse_psi(&psi)?,
                output,
            };
            cmd_build(&args, &mut stdout.lock())
        }
        Command::Solve {
            input,
            agents,
            beta_a,
            beta_i,
            beta_d,
            verify,
            boundary,
            tau0,
            decay,
            tau_min,
            max_outer,
            inner_steps,
            step_size,
            grad_tol,
        } => {
            let args = SolveArgs {
                input,
                agents,
                coeffs: Coefficients::new(beta_a, beta_i, beta_d)?,
                verify,
                boundary,
                schedule: AnnealSchedule {
                    tau0,
                    decay,
                    tau_min,
                    max_outer,
                    inner_steps,
                    step_size,
                    grad_tol,
                    ..AnnealSchedule::default()
                },
            };
            cmd_solve(&args, &mut stdout.lock(), &mut stderr.lock())
        }
        Command::Sweep {
            input,
            agents,
            fixed,
            fixed_value,
            range_x,
            range_y,
            resolution,
            threshold,
            focal,
            jobs,
            grid_out,
            metrics_out,
            render,
        } => {
            let config = SweepConfig {
                fixed: fixed.into(),
                fixed_value,
                range_x: parse_range(&range_x)?,
                range_y: parse_range(&range_y)?,
                resolution,
                exclusion_threshold: threshold,
                focal,
            };
            config.validate()?;
            let args = SweepArgs {
                input,
                agents,
                config,
                jobs,
                grid_out,
                metrics_out,
                render,
            };
            cmd_sweep(&args, &mut stdout.lock())
        }
        Command::Verify {
            input,
            profile,
            agents,
            beta_a,
            beta_i,
            beta_d,
        } => {
            let args = VerifyArgs {
                input,
                profile,
                agents,
                coeffs: Coefficients::new(beta_a, beta_i, beta_d)?,
            };
            cmd_verify(&args, &mut stdout.lock())
        }
        Command::Roots { input, range_x } => {
            let args = RootsArgs {
                input,
                range: parse_range(&range_x)?,
            };
            cmd_roots(&args, &mut stdout.lock())
        }
    }
}

fn main() -> ExitCode {
    let cli = TopLevel::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
