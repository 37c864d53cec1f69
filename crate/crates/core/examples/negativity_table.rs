//! Negativity of the Wigner function for n = 100, 200, 300 at the limit
//! scale m = 1/(n^2 pi^2), on a 513x257 grid, for each series order.

use moyal_gp::gp_model::{build_solution, limit_scale_m};
use moyal_gp::phase_grid::PhaseSpaceGrid;
use moyal_gp::star_engine::StarParams;
use moyal_gp::wigner_analysis::{negativity, wigner_from_amplitude};

fn main() -> moyal_gp::Result<()> {
    println!("{:>5} {:>6} {:>16} {:>14}", "n", "order", "integral", "eta");
    for n in [100, 200, 300] {
        for order in 1..=4 {
            let params = StarParams::new(1.0, 1.0, order)?;
            let sol = build_solution(n, 1.0, limit_scale_m(n), 1.0, params)?;
            let pmax = 0.95 * sol.k();
            let grid = PhaseSpaceGrid::clamped((0.0, 1.0), (-pmax, pmax), 513, 257)?;
            let fw = wigner_from_amplitude(&sol.sample_psi(&grid)?.field, &params)?;
            let eta = match negativity(&fw) {
                Ok(v) => format!("{v:.4e}"),
                Err(_) => "undefined".into(),
            };
            println!("{n:>5} {order:>6} {:>16.6e} {eta:>14}", fw.integrate().re);
        }
    }
    Ok(())
}
