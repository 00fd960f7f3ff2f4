//! When the relaxed closed form leaves the simplex, no interior
//! equilibrium exists; anneal the quantal-response loss down to a boundary
//! equilibrium and cross-check it with damped best-response dynamics.
//!
//! Run with: `cargo run --example boundary_equilibrium`

use nalgebra::{DMatrix, DVector};
use nash_align::boundary_solver::{anneal_to_nash, AnnealSchedule};
use nash_align::game::{Coefficients, GameSpec, StrategyProfile};
use nash_align::interior_solver::solve_interior;
use nash_align::oracle::{br_dynamics, exploitability};

fn main() -> nash_align::Result<()> {
    // Strong attractiveness pull toward a 99% subpopulation: the relaxed
    // solution goes negative on the minority component.
    let spec = GameSpec::new(
        DMatrix::zeros(2, 2),
        DVector::from_row_slice(&[0.99, 0.01]),
        2,
        Coefficients::new(10.0, 1.0, 1.0)?,
    )?;

    let relaxed = solve_interior(&spec);
    println!("closed form: {}", relaxed.validity_label());
    println!(
        "relaxed w = {:?}",
        relaxed.w_star.as_ref().unwrap().as_slice()
    );

    let result = anneal_to_nash(&spec, &AnnealSchedule::default())?;
    println!("\n  tau        loss        exploitability  iters");
    for s in &result.stages {
        println!(
            "  {:9.3e}  {:10.4e}  {:14.4e}  {:5}",
            s.tau, s.loss, s.exploitability, s.iters
        );
    }
    println!("\nboundary profile:");
    for m in 0..result.profile.m() {
        println!("  agent {m}: {:?}", result.profile.agent(m).as_slice());
    }
    println!("certified exploitability: {:.3e}", result.exploitability);

    let (limit, converged) = br_dynamics(&spec, &StrategyProfile::uniform(2, 2), 5000, 0.5)?;
    println!("\nbest-response dynamics converged: {converged}");
    for m in 0..limit.m() {
        println!("  agent {m}: {:?}", limit.agent(m).as_slice());
    }
    println!(
        "dynamics exploitability: {:.3e}",
        exploitability(&spec, &limit)?
    );
    Ok(())
}
