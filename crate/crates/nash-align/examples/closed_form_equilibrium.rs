//! Solve a small alignment game in closed form and certify the result
//! with the exact best-response oracle.
//!
//! Run with: `cargo run --example closed_form_equilibrium`

use nalgebra::{DMatrix, DVector};
use nash_align::game::{Coefficients, GameSpec, StrategyProfile};
use nash_align::interior_solver::solve_interior;
use nash_align::oracle::{best_response_exact, exploitability};

fn main() -> nash_align::Result<()> {
    // Three subpopulations; 0 and 1 disagree strongly, 2 sits between.
    let c = DMatrix::from_row_slice(
        3,
        3,
        &[
            0.55, 0.40, 0.15, //
            0.40, 0.50, 0.10, //
            0.15, 0.10, 0.25,
        ],
    );
    let a = DVector::from_row_slice(&[0.5, 0.3, 0.2]);
    let spec = GameSpec::new(c, a, 4, Coefficients::new(1.0, 1.0, 0.8)?)?;

    let result = solve_interior(&spec);
    println!("validity: {}", result.validity_label());
    let w = result.interior_w().expect("this instance is interior");
    println!("w* = {:?}", w.as_slice());
    println!("lambda* = {}", result.lambda_star.unwrap());
    println!(
        "diagnostics: alpha = {:.6}, condition = {:.2}, ridge = {}",
        result.diagnostics.alpha, result.diagnostics.condition, result.diagnostics.ridge
    );

    // Certification: every agent's best response against the homogeneous
    // profile is the equilibrium strategy itself.
    let profile = StrategyProfile::homogeneous(spec.m(), w)?;
    let expl = exploitability(&spec, &profile)?;
    println!("oracle exploitability: {expl:.3e}");

    let br = best_response_exact(&spec, &profile, 0)?;
    println!(
        "agent 0 best response: {:?} (support {:?}, value {:.6})",
        br.w.as_slice(),
        br.support,
        br.value
    );
    Ok(())
}
