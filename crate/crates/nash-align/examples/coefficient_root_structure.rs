//! Pole and root structure of the normalization factor f.
//!
//! The closed-form equilibrium degenerates exactly where the coefficient
//! ratio beta_d / beta_i hits a pole 2*mu_j of the spectrum, or a zero of
//! f(beta) = sum_j q_j^2 / (2 mu_j - beta). Between consecutive poles f is
//! strictly increasing, so each gap holds at most one zero.
//!
//! Run with: `cargo run --example coefficient_root_structure`

use nalgebra::{DMatrix, DVector};
use nash_align::game::{Coefficients, GameSpec};
use nash_align::interior_solver::{f_alpha, find_alpha_roots};

fn main() -> nash_align::Result<()> {
    let c = DMatrix::from_row_slice(
        3,
        3,
        &[
            0.9, 0.5, 0.4, //
            0.5, 0.8, 0.3, //
            0.4, 0.3, 0.7,
        ],
    );
    let spec = GameSpec::new(
        c,
        DVector::from_row_slice(&[0.4, 0.35, 0.25]),
        2,
        Coefficients::unit(),
    )?;

    println!("eigenvalues of C: {:?}", spec.spectral().mu().as_slice());
    println!(
        "poles of f at 2*mu: {:?}",
        spec.spectral()
            .mu()
            .iter()
            .map(|m| 2.0 * m)
            .collect::<Vec<_>>()
    );

    let (lo, hi) = (1e-2, 5.0);
    let roots = find_alpha_roots(&spec, lo, hi)?;
    println!("\nroots of f in [{lo}, {hi}]: {roots:?}");
    for r in &roots {
        println!("  |f({r:.9})| = {:.3e}", f_alpha(&spec, *r)?.abs());
    }

    println!("\n beta         f(beta)");
    let mut beta = 0.05;
    while beta <= 5.0 {
        match f_alpha(&spec, beta) {
            Ok(f) => println!("  {beta:7.3}  {f:12.5}"),
            Err(_) => println!("  {beta:7.3}       (pole)"),
        }
        beta += 0.35;
    }
    Ok(())
}
