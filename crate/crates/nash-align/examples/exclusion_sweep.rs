//! Map exclusion regions over a log-scaled coefficient grid, compute the
//! exclusion metrics, and render the heatmap as a P6 pixmap.
//!
//! Run with: `cargo run --example exclusion_sweep`

use nalgebra::{DMatrix, DVector};
use nash_align::cli::{render_heatmap, Palette};
use nash_align::sweep::{
    aggregate_metrics, run_sweep, write_grid_csv, write_metrics_json, FixedCoeff, GameTemplate,
    SweepConfig,
};

fn main() -> nash_align::Result<()> {
    // Subpopulation 0 disagrees with everyone; the rest are compatible.
    let d = 5;
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let v = if i == 0 { 0.09 } else { 0.05 };
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    for i in 0..d {
        let row: f64 = (0..d).filter(|&j| j != i).map(|j| c[(i, j)]).sum();
        c[(i, i)] = row;
    }
    let a = DVector::from_row_slice(&[0.195, 0.225, 0.20, 0.195, 0.185]);
    let template = GameTemplate::new(c, a, 16)?;

    let mut grids = Vec::new();
    for fixed_value in [0.01, 1.0] {
        let config = SweepConfig {
            fixed_value,
            resolution: 60,
            focal: Some(0),
            ..SweepConfig::new(FixedCoeff::BetaD)
        };
        let grid = run_sweep(&template, &config)?;
        println!(
            "beta_d = {fixed_value:5}: exclusion {:.4}, invalid {:.4}, conditional {:.4}",
            grid.metrics.exclusion_frac,
            grid.metrics.invalid_frac,
            grid.metrics.conditional_exclusion
        );
        grids.push(grid);
    }

    let pooled = aggregate_metrics(&grids)?;
    println!(
        "pooled over both slices: exclusion {:.4}, invalid {:.4}, conditional {:.4}",
        pooled.exclusion_frac, pooled.invalid_frac, pooled.conditional_exclusion
    );

    let out_dir = std::env::temp_dir().join("nash_align_exclusion_sweep");
    std::fs::create_dir_all(&out_dir)?;
    let csv_path = out_dir.join("grid.csv");
    let ppm_path = out_dir.join("heatmap.ppm");
    let json_path = out_dir.join("metrics.json");

    let mut csv = Vec::new();
    write_grid_csv(&grids[0], &mut csv)?;
    std::fs::write(&csv_path, csv)?;
    let mut metrics = Vec::new();
    write_metrics_json(&grids[0].metrics, &mut metrics)?;
    std::fs::write(&json_path, metrics)?;
    std::fs::write(&ppm_path, render_heatmap(&grids[0], 0, &Palette::default()))?;
    println!("\nwrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    println!(
        "wrote {} (white = no interior equilibrium, black = excluded)",
        ppm_path.display()
    );
    Ok(())
}
