//! Galilei commutators through Bopp operators and the Moyal product on
//! polynomial symbols.

use num_complex::Complex64;

use moyal_gp::phase_grid::{Field, PhaseSpaceGrid, INTERIOR_MARGIN};
use moyal_gp::star_engine::{bopp_p, commutator_norm, moyal_star, StarOperator, StarParams};

fn main() -> moyal_gp::Result<()> {
    let params = StarParams::default();
    let i_hbar = Complex64::new(0.0, params.hbar);
    let grid = PhaseSpaceGrid::periodic((-8.0, 8.0), (-8.0, 8.0), 257, 257)?;
    let f = Field::sample_real(&grid, |q, p| (-q * q - p * p).exp())?;

    let q = StarOperator::position(params);
    let p = StarOperator::momentum(params);
    let h = StarOperator::hamiltonian(params);
    let k = StarOperator::boost(params, 0.0);
    println!("[Q,P]f - i hbar f     : {:.3e}", commutator_norm(&q, &p, &f, &f.scale(i_hbar))?);
    println!("[K,H]f - i hbar P f   : {:.3e}", commutator_norm(&k, &h, &f, &bopp_p(&f, &params)?.scale(i_hbar))?);
    println!("[K,P]f - i hbar M f   : {:.3e}", commutator_norm(&k, &p, &f, &f.scale(i_hbar * params.mass))?);
    println!("[P,H]f                : {:.3e}", commutator_norm(&p, &h, &f, &Field::zeros(&grid))?);

    let poly = PhaseSpaceGrid::clamped((-1.0, 1.0), (-1.0, 1.0), 9, 9)?;
    let q2 = Field::sample_real(&poly, |q, _| q * q)?;
    let p2 = Field::sample_real(&poly, |_, p| p * p)?;
    let star = moyal_star(&q2, &p2, &params)?;
    let exact = Field::sample(&poly, |q, p| Complex64::new(q * q * p * p - 0.5, 2.0 * q * p))?;
    println!("q^2 * p^2 vs q^2p^2 + 2i qp - 1/2: {:.3e}", star.sub(&exact)?.interior_linf(INTERIOR_MARGIN));
    Ok(())
}
