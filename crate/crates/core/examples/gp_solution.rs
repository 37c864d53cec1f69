//! Elliptic box solution: printed constants, coefficient-matched constants,
//! and the stationary residual on the p = 0 line for both.

use moyal_gp::cli::matched_residual;
use moyal_gp::gp_model::build_solution;
use moyal_gp::phase_grid::PhaseSpaceGrid;
use moyal_gp::star_engine::{gp_residual, Nonlinearity, StarParams};

fn main() -> moyal_gp::Result<()> {
    let params = StarParams::default();
    for (n, m, g) in [(1, 0.5, 1.0), (2, 0.1, 0.5), (3, 0.8, 2.0)] {
        let sol = build_solution(n, 1.0, m, g, params)?;
        let summary = sol.summary()?;
        println!("{}", serde_json::to_string(&summary).expect("serialise"));

        let k = sol.k();
        let grid = PhaseSpaceGrid::clamped((0.0, 1.0), (-0.5 * k, 0.5 * k), 2049, 9)?;
        let psi = sol.sample_psi(&grid)?.field;
        let printed = gp_residual(&psi, sol.energy(), g, &params, Nonlinearity::Pointwise)?;
        let (matched, _) = matched_residual(n, 1.0, m, g, params, Nonlinearity::Pointwise)?;
        println!(
            "  nodes {}, p = 0 residual: printed {:.3e}, matched {:.3e}",
            sol.node_count()?,
            printed.l2_p0_slice.unwrap_or(f64::NAN),
            matched
        );
    }
    Ok(())
}
