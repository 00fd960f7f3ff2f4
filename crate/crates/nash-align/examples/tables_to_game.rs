//! Build the inconsistency matrix and attractiveness vector from
//! subpopulation response-probability tables, both attractiveness routes.
//!
//! Run with: `cargo run --example tables_to_game`

use nalgebra::{DMatrix, DVector};
use nash_align::dataprep::{
    build_attractiveness_from_alignment, build_attractiveness_from_shares, build_inconsistency,
    mixture_prob, validate_psd, GroundTruth, PopulationShares, ProbabilityTable, PsiKind,
};

fn main() -> nash_align::Result<()> {
    // Four samples, three subpopulation models. Each entry is the
    // probability the subpopulation model assigns to the recorded response.
    let probs = DMatrix::from_row_slice(
        4,
        3,
        &[
            0.9, 0.2, 0.6, //
            0.8, 0.3, 0.5, //
            0.7, 0.1, 0.7, //
            0.95, 0.25, 0.55,
        ],
    );
    let table = ProbabilityTable::new(probs)?;

    for psi in [PsiKind::Identity, PsiKind::Power(2.0), PsiKind::Log1p] {
        let c = build_inconsistency(&table, psi)?;
        let report = validate_psd(&c, 1e-9)?;
        println!(
            "psi = {psi:?}: C[0][1] = {:.4}, diag = [{:.4}, {:.4}, {:.4}], min eig = {:.2e}, pass = {}",
            c[(0, 1)],
            c[(0, 0)],
            c[(1, 1)],
            c[(2, 2)],
            report.min_eigenvalue,
            report.passes()
        );
    }

    // Attractiveness from population sizes.
    let shares = PopulationShares::new(DVector::from_row_slice(&[120.0, 50.0, 30.0]))?;
    let a = build_attractiveness_from_shares(&shares);
    println!("\na from shares = {:?}", a.as_slice());

    // Attractiveness from alignment with human preference distributions
    // over two options.
    let gt = GroundTruth::new(
        DMatrix::from_row_slice(4, 2, &[0.9, 0.1, 0.7, 0.3, 0.8, 0.2, 0.6, 0.4]),
        vec![0, 0, 0, 0],
    )?;
    let options = vec![
        DMatrix::from_row_slice(4, 2, &[0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.95, 0.05]),
        DMatrix::from_row_slice(4, 2, &[0.2, 0.8, 0.3, 0.7, 0.1, 0.9, 0.25, 0.75]),
        DMatrix::from_row_slice(4, 2, &[0.6, 0.4, 0.5, 0.5, 0.7, 0.3, 0.55, 0.45]),
    ];
    let table = table.with_ground_truth(gt)?.with_model_options(options)?;
    let a = build_attractiveness_from_alignment(&table)?;
    println!("a from alignment = {:?}", a.as_slice());

    // A mixture's probability for one response interpolates the models.
    let weights = DVector::from_row_slice(&[0.5, 0.2, 0.3]);
    let nu = DVector::from_row_slice(&[0.9, 0.2, 0.6]);
    println!(
        "\nmixture probability at weights {:?}: {:.4}",
        weights.as_slice(),
        mixture_prob(&weights, &nu)?
    );
    Ok(())
}
