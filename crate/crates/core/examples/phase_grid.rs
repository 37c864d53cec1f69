//! Finite-difference and spectral derivatives and quadrature on a grid,
//! with errors against closed forms as the grid is refined.

use moyal_gp::phase_grid::{Axis, Field, PhaseSpaceGrid};

fn main() -> moyal_gp::Result<()> {
    let f = |q: f64, p: f64| (q * p).sin() + q * q;
    let f_qq = |q: f64, p: f64| -p * p * (q * p).sin() + 2.0;
    println!("clamped [0,1]x[-1,1], f = sin(qp) + q^2");
    println!("{:>6} {:>14} {:>14}", "n", "d2/dq2 err", "integral err");
    // ∫∫ q^2 dq dp over [0,1]x[-1,1] is 2/3; the sin term is odd in p.
    for n in [17, 33, 65, 129] {
        let grid = PhaseSpaceGrid::clamped((0.0, 1.0), (-1.0, 1.0), n, n)?;
        let field = Field::sample_real(&grid, f)?;
        let exact = Field::sample_real(&grid, f_qq)?;
        let err = field.diff(Axis::Q, 2)?.sub(&exact)?.interior_linf(0);
        let int_err = (field.integrate().re - 2.0 / 3.0).abs();
        println!("{n:>6} {err:>14.3e} {int_err:>14.3e}");
    }

    let grid = PhaseSpaceGrid::periodic((-8.0, 8.0), (-8.0, 8.0), 65, 65)?;
    let g = Field::sample_real(&grid, |q, p| (-q * q - p * p).exp())?;
    let exact = Field::sample_real(&grid, |q, p| -2.0 * p * (-q * q - p * p).exp())?;
    println!(
        "\nperiodic 65x65 Gaussian: d/dp err {:.3e}, integral - pi = {:.3e}",
        g.diff_p(1)?.sub(&exact)?.interior_linf(0),
        g.integrate().re - std::f64::consts::PI
    );
    Ok(())
}
