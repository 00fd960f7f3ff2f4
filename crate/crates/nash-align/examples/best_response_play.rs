//! Damped best-response dynamics from several starting profiles.
//!
//! In the contraction regime (diversity coupling weak against the
//! inconsistency curvature) the dynamics settle on the homogeneous
//! interior equilibrium from anywhere; with strong diversity pressure they
//! can instead select an asymmetric boundary equilibrium.
//!
//! Run with: `cargo run --example best_response_play`

use nalgebra::{DMatrix, DVector};
use nash_align::game::{Coefficients, GameSpec, StrategyProfile};
use nash_align::interior_solver::solve_interior;
use nash_align::oracle::{br_dynamics, exploitability};

fn play(spec: &GameSpec, label: &str, init: StrategyProfile) -> nash_align::Result<()> {
    let (limit, converged) = br_dynamics(spec, &init, 10_000, 0.5)?;
    println!("\ninit = {label}: converged = {converged}");
    for m in 0..limit.m() {
        let row = limit.agent(m);
        println!(
            "  agent {m}: [{}]",
            row.iter()
                .map(|x| format!("{x:.5}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    println!("  exploitability: {:.3e}", exploitability(spec, &limit)?);
    Ok(())
}

fn main() -> nash_align::Result<()> {
    let c = DMatrix::from_row_slice(
        3,
        3,
        &[
            1.5, 0.8, 0.7, //
            0.8, 1.4, 0.6, //
            0.7, 0.6, 1.3,
        ],
    );
    let a = DVector::from_row_slice(&[0.54, 0.34, 0.12]);

    // Weak diversity: the interior equilibrium attracts.
    let spec = GameSpec::new(c.clone(), a.clone(), 3, Coefficients::new(1.0, 1.0, 0.25)?)?;
    let w = solve_interior(&spec);
    println!(
        "closed-form interior equilibrium: {:?}",
        w.interior_w().unwrap().as_slice()
    );
    play(&spec, "uniform", StrategyProfile::uniform(3, 3))?;
    play(
        &spec,
        "vertex-heavy",
        StrategyProfile::new(DMatrix::from_row_slice(
            3,
            3,
            &[
                0.98, 0.01, 0.01, //
                0.01, 0.98, 0.01, //
                0.01, 0.01, 0.98,
            ],
        ))?,
    )?;

    // Strong diversity: agents specialize; an asymmetric boundary
    // equilibrium coexists with the interior one and can win the race.
    let strong = GameSpec::new(c, a, 3, Coefficients::new(1.0, 1.0, 1.0)?)?;
    println!(
        "\nstrong coupling, closed-form interior equilibrium: {:?}",
        solve_interior(&strong).interior_w().unwrap().as_slice()
    );
    play(&strong, "uniform", StrategyProfile::uniform(3, 3))?;
    Ok(())
}
