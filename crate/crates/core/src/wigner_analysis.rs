//! Wigner functions built from phase-space amplitudes, `f_W = ψ ⋆ ψ†`, and
//! the diagnostics computed on them: marginals, the negativity volume, the
//! two-sided ⋆-genvalue residual and the idempotency defect.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::phase_grid::{integrate_profile, Field, INTERIOR_MARGIN};
use crate::star_engine::{apply_free_hamiltonian, moyal_star, StarParams};

/// Relative size of `Im ∫∫f` tolerated by [`negativity`].
const IMAG_TOL: f64 = 1e-8;

/// `ψ ⋆ ψ†`
pub fn wigner_from_amplitude(psi: &Field, params: &StarParams) -> Result<Field> {
    moyal_star(psi, &psi.conj(), params)
}

/// Negativity volume `η = ∫∫|f| − 1` of `f` rescaled to unit integral.
///
/// Uses the real part of `f`; `∫∫f` must be real and positive.
pub fn negativity(f: &Field) -> Result<f64> {
    let total = f.integrate();
    let abs_total = f.map(|v| Complex64::new(v.re.abs(), 0.0)).integrate().re;
    if abs_total == 0.0 || total.re.abs() <= 1e-14 * abs_total {
        return Err(Error::ZeroNorm);
    }
    if total.im.abs() > IMAG_TOL * total.norm() {
        return Err(domain(format!("integral {total} is not real")));
    }
    if total.re < 0.0 {
        return Err(domain(format!("integral {} is negative", total.re)));
    }
    Ok((abs_total / total.re - 1.0).max(0.0))
}

/// Interior l2 norms of `H⋆f − Ef` and `f⋆H − Ef` for the free symbol
/// `H = p²/2M`.
pub fn stargenvalue_residual(f: &Field, energy: f64, params: &StarParams) -> Result<(f64, f64)> {
    if !energy.is_finite() {
        return Err(Error::NonFinite(format!("energy E = {energy}")));
    }
    let ef = f.scale(Complex64::new(energy, 0.0));
    let left = apply_free_hamiltonian(f, params)?.sub(&ef)?;
    let h = Field::sample_real(f.grid(), |_, p| p * p / (2.0 * params.mass))?;
    let right = moyal_star(f, &h, params)?.sub(&ef)?;
    Ok((left.interior_l2(INTERIOR_MARGIN), right.interior_l2(INTERIOR_MARGIN)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Idempotency {
    /// `‖f⋆f − λf‖ / ‖f‖`
    pub gap: f64,
    /// Least-squares `λ`.
    pub lambda: Complex64,
}

/// How far `f⋆f` is from a multiple of `f`.
pub fn idempotency_gap(f: &Field, params: &StarParams) -> Result<Idempotency> {
    let norm = f.interior_l2(INTERIOR_MARGIN);
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let ff = moyal_star(f, f, params)?;
    // λ = <f, f⋆f> / <f, f> over the same interior nodes the norm uses
    let g = f.grid();
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for iq in INTERIOR_MARGIN..g.nq() - INTERIOR_MARGIN {
        for ip in INTERIOR_MARGIN..g.np() - INTERIOR_MARGIN {
            let a = f.at(iq, ip);
            num += a.conj() * ff.at(iq, ip);
            den += a.norm_sqr();
        }
    }
    let lambda = num / den;
    let gap = ff.sub(&f.scale(lambda))?.interior_l2(INTERIOR_MARGIN) / norm;
    Ok(Idempotency { gap, lambda })
}

/// Diagnostics of one Wigner function.
#[derive(Debug, Clone, Serialize)]
pub struct WignerReport {
    /// `∫∫ f_W dq dp` before normalisation.
    pub norm: f64,
    /// `None` when `∫∫f_W` is not positive and η is undefined.
    pub eta: Option<f64>,
    /// Why `eta` is missing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_error: Option<String>,
    #[serde(skip)]
    pub marginal_q: Vec<f64>,
    #[serde(skip)]
    pub marginal_p: Vec<f64>,
    pub stargen_left_l2: f64,
    pub stargen_right_l2: f64,
    pub idempotency_gap: f64,
    /// Interior l2 norm of `ψ − f_W`.
    pub psi_equals_fw_gap: f64,
    /// Imaginary part of `f_W`, interior max.
    pub fw_imag_linf: f64,
}

impl WignerReport {
    /// `∫ marginal_q dq` and `∫ marginal_p dp` with the grid's own rule.
    pub fn marginal_totals(&self, f: &Field) -> (f64, f64) {
        let g = f.grid();
        let to_c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        (
            integrate_profile(&to_c(&self.marginal_q), g.dq(), g.boundary()).re,
            integrate_profile(&to_c(&self.marginal_p), g.dp(), g.boundary()).re,
        )
    }
}

/// Build `f_W` from `psi` and evaluate every diagnostic against `energy`.
pub fn analyze(psi: &Field, energy: f64, params: &StarParams) -> Result<(Field, WignerReport)> {
    let fw = wigner_from_amplitude(psi, params)?;
    let norm = fw.integrate().re;
    let (eta, eta_error) = match negativity(&fw) {
        Ok(v) => (Some(v), None),
        Err(e @ (Error::Domain(_) | Error::ZeroNorm)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let marginal_q = fw.reduce_p().iter().map(|v| v.re).collect();
    let marginal_p = fw.reduce_q().iter().map(|v| v.re).collect();
    let (stargen_left_l2, stargen_right_l2) = stargenvalue_residual(&fw, energy, params)?;
    let idempotency_gap = idempotency_gap(&fw, params)?.gap;
    let psi_equals_fw_gap = psi.sub(&fw)?.interior_l2(INTERIOR_MARGIN);
    let fw_imag_linf = fw.map(|v| Complex64::new(v.im, 0.0)).interior_linf(0);
    let report = WignerReport {
        norm,
        eta,
        eta_error,
        marginal_q,
        marginal_p,
        stargen_left_l2,
        stargen_right_l2,
        idempotency_gap,
        psi_equals_fw_gap,
        fw_imag_linf,
    };
    Ok((fw, report))
}

/// Two-column CSV `x,value` with 17 significant digits.
pub fn write_profile_csv<W: Write>(mut w: W, xs: &[f64], values: &[f64]) -> std::io::Result<()> {
    writeln!(w, "x,value")?;
    for (x, v) in xs.iter().zip(values) {
        writeln!(w, "{x:.16e},{v:.16e}")?;
    }
    Ok(())
}

/// Grid dump `q,p,f` of the real part of `f`.
pub fn write_wigner_csv<W: Write>(mut w: W, f: &Field) -> std::io::Result<()> {
    let g = f.grid();
    writeln!(w, "q,p,f")?;
    for iq in 0..g.nq() {
        let q = g.q(iq);
        for ip in 0..g.np() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", q, g.p(ip), f.at(iq, ip).re)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_grid::PhaseSpaceGrid;

    fn gauss_grid(n: usize) -> PhaseSpaceGrid {
        PhaseSpaceGrid::periodic((-7.0, 7.0), (-7.0, 7.0), n, n).unwrap()
    }

    #[test]
    fn p_independent_real_amplitude_squares() {
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (-2.0, 2.0), 51, 21).unwrap();
        let psi = Field::sample_real(&g, |q, _| (2.0 * q).sin() + 0.3 * q).unwrap();
        for order in 1..=4 {
            let params = StarParams::default().with_order(order).unwrap();
            let fw = wigner_from_amplitude(&psi, &params).unwrap();
            let sq = psi.mul(&psi).unwrap();
            assert!(fw.sub(&sq).unwrap().interior_linf(0) <= 1e-12);
            assert!(fw.values().iter().all(|v| v.im.abs() <= 1e-12));
        }
    }

    #[test]
    fn gaussian_wigner_nonnegative() {
        let g = gauss_grid(65);
        let psi = Field::sample_real(&g, |q, p| (-q * q - p * p).exp()).unwrap();
        let fw = wigner_from_amplitude(&psi, &StarParams::default()).unwrap();
        assert!(negativity(&fw).unwrap() <= 1e-9);
    }

    #[test]
    fn negativity_of_nonnegative_and_two_bump() {
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (0.0, 1.0), 41, 41).unwrap();
        let f = Field::sample_real(&g, |q, p| 1.0 + q * p).unwrap();
        assert!(negativity(&f).unwrap() <= 1e-12);

        // narrow bumps with ∫f⁺ = 1.25 and ∫f⁻ = −0.25
        let bump = |x: f64, c: f64| (-(x - c) * (x - c) / 0.002).exp();
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (0.0, 1.0), 401, 9).unwrap();
        let a = Field::sample_real(&g, |q, _| bump(q, 0.3)).unwrap().integrate().re;
        let f = Field::sample_real(&g, |q, _| (1.25 * bump(q, 0.3) - 0.25 * bump(q, 0.7)) / a).unwrap();
        assert!((negativity(&f).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn negativity_errors() {
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (0.0, 1.0), 9, 9).unwrap();
        assert!(matches!(negativity(&Field::zeros(&g)), Err(Error::ZeroNorm)));
        let neg = Field::constant(&g, Complex64::new(-1.0, 0.0));
        assert!(matches!(negativity(&neg), Err(Error::Domain(_))));
        let cplx = Field::constant(&g, Complex64::new(1.0, 1.0));
        assert!(matches!(negativity(&cplx), Err(Error::Domain(_))));
    }

    #[test]
    fn stargen_zero_field() {
        let g = gauss_grid(33);
        let (l, r) = stargenvalue_residual(&Field::zeros(&g), 2.0, &StarParams::default()).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
    }

    #[test]
    fn stargen_free_symbol_bookkeeping() {
        // For the symbol H itself, H⋆H = H² − (ħ²/8M)·∂²_q H·... which vanishes
        // since H depends only on p; so H⋆H = H² exactly and the residual
        // against a pointwise "eigenvalue" H is zero, while a constant E is not.
        let g = PhaseSpaceGrid::clamped((-1.0, 1.0), (-2.0, 2.0), 21, 41).unwrap();
        let params = StarParams::default();
        let h = Field::sample_real(&g, |_, p| p * p / 2.0).unwrap();
        let hh = moyal_star(&h, &h, &params).unwrap();
        assert!(hh.sub(&h.mul(&h).unwrap()).unwrap().interior_linf(0) < 1e-12);
        let (l, r) = stargenvalue_residual(&h, 1.0, &params).unwrap();
        assert!(l > 0.1 && r > 0.1);
        assert!((l - r).abs() < 1e-12);
    }

    #[test]
    fn idempotency_of_p_independent() {
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (-1.0, 1.0), 41, 11).unwrap();
        let f = Field::sample_real(&g, |q, _| 1.0 + q).unwrap();
        let id = idempotency_gap(&f, &StarParams::default()).unwrap();
        // f⋆f = f², and f² is not a multiple of f
        assert!(id.gap > 0.05);
        assert!(matches!(
            idempotency_gap(&Field::zeros(&g), &StarParams::default()),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn gaussian_idempotency_under_truncation() {
        // Exact e⋆e = e/2 for e = exp(−q²−p²), ħ = 1. The series is
        // infinite, so a finite order leaves an O(1) remainder.
        let g = gauss_grid(65);
        let e = Field::sample_real(&g, |q, p| (-q * q - p * p).exp()).unwrap();
        let gaps: Vec<Idempotency> = (1..=4)
            .map(|order| idempotency_gap(&e, &StarParams::default().with_order(order).unwrap()).unwrap())
            .collect();
        for id in &gaps {
            assert!(id.lambda.im.abs() < 1e-12);
            assert!(id.gap > 1e-6 && id.gap < 0.3, "{}", id.gap);
        }
        assert!(gaps[3].gap < gaps[0].gap);
        assert!((gaps[3].lambda.re - 0.5).abs() < (gaps[0].lambda.re - 0.5).abs());
    }

    #[test]
    fn noise_is_far_from_idempotent() {
        let g = gauss_grid(33);
        // deterministic pseudo-noise in [-1, 1]
        let mut state = 0x2545_f491_4f6c_dd1d_u64;
        let vals = (0..g.len())
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                Complex64::new((state >> 11) as f64 / (1u64 << 52) as f64 - 1.0, 0.0)
            })
            .collect();
        let f = Field::from_values(&g, vals).unwrap();
        assert!(idempotency_gap(&f, &StarParams::default()).unwrap().gap > 0.5);
    }

    #[test]
    fn report_marginals_agree() {
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (-3.0, 3.0), 61, 61).unwrap();
        let psi = Field::sample_real(&g, |q, p| (std::f64::consts::PI * q).sin() * (-p * p).exp()).unwrap();
        let (fw, rep) = analyze(&psi, 1.0, &StarParams::default()).unwrap();
        let (tq, tp) = rep.marginal_totals(&fw);
        assert!((tq - rep.norm).abs() <= 1e-10 * rep.norm.abs());
        assert!((tp - rep.norm).abs() <= 1e-10 * rep.norm.abs());
    }

    #[test]
    fn csv_writers() {
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &[0.0, 0.5], &[1.0, -2.0]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,value\n0.0000000000000000e0,1.0000000000000000e0\n5.0000000000000000e-1,-2.0000000000000000e0\n"
        );
    }
}
