//! Jacobi-elliptic box solutions of the stationary phase-space
//! Gross-Pitaevskii equation.
//!
//! On `q ∈ [0, L]` with `ψ(0,p) = ψ(L,p) = 0` the family is
//!
//! ```text
//! ψ(q,p) = A · sn(√(k² − p²) · q | m),   k = 2nK(m)/L,
//! A² = 2m(2nK(m))²/L²,                   E = (2nK(m))²(m+1)/(2L²),
//! ```
//!
//! valid only inside the momentum band `|p| < k`. The printed amplitude
//! and energy carry no explicit `g`, `ħ` or `M`, so [`coefficient_match`]
//! re-derives both constants from the `p = 0` line of the equation and
//! reports the ratio to the printed ones.

use std::f64::consts::PI;

use serde::Serialize;

use crate::elliptic::{self, Modulus};
use crate::error::{domain, Error, Result};
use crate::phase_grid::{Field, PhaseSpaceGrid};
use crate::star_engine::StarParams;

/// Widest `m` accepted by [`box_limit_scan`].
pub const LIMIT_SCAN_MAX_M: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpSolution {
    n: u32,
    length: f64,
    modulus: Modulus,
    g: f64,
    params: StarParams,
    k: f64,
    a2: f64,
    energy: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be > 0, got {v}")))
    }
}

fn check_interaction(g: f64) -> Result<()> {
    if g.is_finite() && g >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("g must be >= 0, got {g}")))
    }
}

/// Wavenumber `2nK(m)/L`.
fn wavenumber(n: u32, length: f64, modulus: &Modulus) -> f64 {
    2.0 * n as f64 * modulus.k_complete() / length
}

/// Printed energy `(2nK)²(m+1)/(2L²)`.
fn printed_energy(n: u32, length: f64, modulus: &Modulus) -> f64 {
    let two_nk = 2.0 * n as f64 * modulus.k_complete();
    two_nk * two_nk * (modulus.m() + 1.0) / (2.0 * length * length)
}

impl GpSolution {
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn m(&self) -> f64 {
        self.modulus.m()
    }
    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn params(&self) -> &StarParams {
        &self.params
    }
    /// Wavenumber `k = 2nK(m)/L`.
    pub fn k(&self) -> f64 {
        self.k
    }
    /// Squared amplitude from the printed relation `A² = 2m(2nK)²/L²`.
    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn amplitude(&self) -> f64 {
        self.a2.sqrt()
    }
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `A · sn(√(k² − p²) q | m)`.
    pub fn eval_psi(&self, q: f64, p: f64) -> Result<f64> {
        if !(q.is_finite() && p.is_finite()) {
            return Err(Error::NonFinite(format!("(q, p) = ({q}, {p})")));
        }
        if !(0.0..=self.length).contains(&q) {
            return Err(domain(format!("q = {q} outside the box [0, {}]", self.length)));
        }
        if p.abs() >= self.k {
            return Err(Error::MomentumOutOfBand { p: p.abs(), k: self.k });
        }
        let s = (self.k * self.k - p * p).sqrt();
        Ok(self.amplitude() * elliptic::sn(s * q, self.modulus.m())?)
    }

    /// Sample ψ on `grid`; nodes with `|p| ≥ k` are set to zero and masked.
    pub fn sample_psi(&self, grid: &PhaseSpaceGrid) -> Result<SampledPsi> {
        if grid.q_min() < 0.0 || grid.q_max() > self.length {
            return Err(domain(format!(
                "grid q-range [{}, {}] is not inside the box [0, {}]",
                grid.q_min(),
                grid.q_max(),
                self.length
            )));
        }
        let mask: Vec<bool> = (0..grid.np()).map(|ip| grid.p(ip).abs() >= self.k).collect();
        let field = Field::sample_real(grid, |q, p| {
            if p.abs() >= self.k {
                0.0
            } else {
                // in-band and inside the box, so this cannot fail
                self.eval_psi(q, p).unwrap_or(f64::NAN)
            }
        })?;
        let masked_columns = mask.iter().filter(|&&m| m).count();
        let masked_fraction = masked_columns as f64 / grid.np() as f64;
        Ok(SampledPsi { field, masked_columns: mask, masked_fraction })
    }

    /// `max_p |ψ(L, p)|` over `|p| ≤ span·k`. Zero only on the `p = 0` line
    /// in general, since the argument at `q = L` is `√(k² − p²)L`.
    pub fn boundary_defect(&self, span: f64, samples: usize) -> Result<f64> {
        let samples = samples.max(2);
        let p_max = span.clamp(0.0, 1.0 - 1e-12) * self.k;
        (0..samples)
            .map(|i| -p_max + 2.0 * p_max * i as f64 / (samples - 1) as f64)
            .map(|p| self.eval_psi(self.length, p).map(f64::abs))
            .try_fold(0.0_f64, |acc, v| v.map(|v| acc.max(v)))
    }

    /// `∫₀^L ψ(q, 0)² dq` by composite Simpson.
    pub fn norm_p0(&self) -> Result<f64> {
        let n = (400 * self.n as usize).max(2000) + 1;
        let h = self.length / (n - 1) as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let q = (i as f64 * h).min(self.length);
            sum += w * self.eval_psi(q, 0.0)?.powi(2);
        }
        Ok(sum * h / 3.0)
    }

    /// Values of `ψ(q, 0)` at `samples` interior points of `(0, L)`.
    pub fn p0_profile(&self, samples: usize) -> Result<Vec<f64>> {
        (1..samples)
            .map(|i| self.eval_psi(self.length * i as f64 / samples as f64, 0.0))
            .collect()
    }

    /// Number of sign changes of `ψ(q, 0)` inside `(0, L)`.
    pub fn node_count(&self) -> Result<usize> {
        let samples = 64 * self.n as usize + 64;
        Ok(count_sign_changes(&self.p0_profile(samples)?))
    }

    pub fn summary(&self) -> Result<SolutionSummary> {
        let e_matched = matched_energy(self.m(), self.k, &self.params);
        let a2_matched = match coefficient_match(self.m(), self.k, self.g, &self.params) {
            Ok(c) => Some(c.a2_matched),
            Err(Error::DegenerateMatch(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(SolutionSummary {
            n: self.n,
            length: self.length,
            m: self.m(),
            g: self.g,
            hbar: self.params.hbar,
            mass: self.params.mass,
            k: self.k,
            a2: self.a2,
            energy: self.energy,
            e_matched,
            a2_matched,
            norm_p0: self.norm_p0()?,
            e_ratio: self.energy / e_matched,
            a2_ratio: a2_matched.and_then(|a| (a > 0.0).then(|| self.a2 / a)),
            boundary_defect: self.boundary_defect(0.95, 401)?,
        })
    }
}

/// Count strict sign changes, skipping exact zeros.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0_f64;
    let mut changes = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Build the `n`-th box solution.
pub fn build_solution(n: u32, length: f64, m: f64, g: f64, params: StarParams) -> Result<GpSolution> {
    if n < 1 {
        return Err(domain("n must be ≥ 1"));
    }
    check_positive("L", length)?;
    check_interaction(g)?;
    params.validate()?;
    let modulus = Modulus::new(m)?;
    let k = wavenumber(n, length, &modulus);
    let a2 = 2.0 * m * k * k;
    let energy = printed_energy(n, length, &modulus);
    Ok(GpSolution { n, length, modulus, g, params, k, a2, energy })
}

/// A sampled solution plus the momentum columns that fell outside the band.
#[derive(Debug, Clone)]
pub struct SampledPsi {
    pub field: Field,
    /// One entry per `p` column, `true` where `|p| ≥ k`.
    pub masked_columns: Vec<bool>,
    pub masked_fraction: f64,
}

/// JSON summary of one solution.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionSummary {
    pub n: u32,
    #[serde(rename = "L")]
    pub length: f64,
    pub m: f64,
    pub g: f64,
    pub hbar: f64,
    pub mass: f64,
    pub k: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "E_matched")]
    pub e_matched: f64,
    #[serde(rename = "A2_matched")]
    pub a2_matched: Option<f64>,
    pub norm_p0: f64,
    /// `E / E_matched`
    #[serde(rename = "E_ratio")]
    pub e_ratio: f64,
    /// `A2 / A2_matched`
    #[serde(rename = "A2_ratio")]
    pub a2_ratio: Option<f64>,
    pub boundary_defect: f64,
}

/// `E` zeroing the `sn` coefficient on the `p = 0` line: `ħ²k²(1+m)/(8M)`.
pub fn matched_energy(m: f64, k: f64, params: &StarParams) -> f64 {
    params.hbar * params.hbar * k * k * (1.0 + m) / (8.0 * params.mass)
}

/// Outcome of substituting `ψ = A sn(kq|m)` into the `p = 0` line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientMatch {
    pub a2_matched: f64,
    pub e_matched: f64,
    /// `2mk²`
    pub a2_printed: f64,
    /// `k²(m+1)/2`
    pub e_printed: f64,
    /// `a2_printed / a2_matched`, `None` when `a2_matched = 0`.
    pub a2_ratio: Option<f64>,
    pub e_ratio: f64,
    /// Max over one period of the pointwise residual with the matched constants.
    pub identity_residual: f64,
}

/// On `p = 0` the equation reads `−(ħ²/8M)ψ'' + gψ³ − Eψ = 0`. With
/// `ψ = A sn(kq|m)` and `sn'' = −(1+m)sn + 2m sn³` the `sn` and `sn³`
/// coefficients vanish for
///
/// ```text
/// E = ħ²k²(1+m)/(8M),    A² = ħ²k²m/(4Mg).
/// ```
pub fn coefficient_match(m: f64, k: f64, g: f64, params: &StarParams) -> Result<CoefficientMatch> {
    let modulus = Modulus::new(m)?;
    check_positive("k", k)?;
    check_interaction(g)?;
    params.validate()?;
    let c = params.hbar * params.hbar / (8.0 * params.mass);
    let e_matched = matched_energy(m, k, params);
    let a2_matched = if m == 0.0 {
        0.0
    } else if g == 0.0 {
        return Err(Error::DegenerateMatch(format!(
            "sn³ coefficient 2m·ħ²k²/(8M) = {} cannot be cancelled with g = 0",
            2.0 * m * c * k * k
        )));
    } else {
        2.0 * m * c * k * k / g
    };

    let amp = a2_matched.sqrt();
    let steps = 512;
    let mut identity_residual = 0.0_f64;
    for i in 0..=steps {
        let u = modulus.period() * i as f64 / steps as f64;
        let s = elliptic::sn(u, m)?;
        let s2 = elliptic::sn_second_derivative(u, m)?;
        let r = -c * k * k * amp * s2 + g * amp.powi(3) * s.powi(3) - e_matched * amp * s;
        identity_residual = identity_residual.max(r.abs());
    }

    let a2_printed = 2.0 * m * k * k;
    let e_printed = k * k * (m + 1.0) / 2.0;
    Ok(CoefficientMatch {
        a2_matched,
        e_matched,
        a2_printed,
        e_printed,
        a2_ratio: (a2_matched > 0.0).then(|| a2_printed / a2_matched),
        e_ratio: e_printed / e_matched,
        identity_residual,
    })
}

/// One row of the small-`m` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub m: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "E_expansion")]
    pub expansion: f64,
    /// `E − E_expansion`
    pub gap: f64,
    pub relative_gap: f64,
    /// `m` equals `1/(n²π²)`.
    pub at_limit_scale: bool,
}

/// `1/(n²π²)`
pub fn limit_scale_m(n: u32) -> f64 {
    1.0 / ((n as f64 * PI).powi(2))
}

/// Compare the exact energy with `n²π²/(2L²)·(1 + 3m/2)` for each `m`.
pub fn box_limit_scan(n: u32, length: f64, m_values: &[f64]) -> Result<Vec<LimitRow>> {
    if n < 1 {
        return Err(domain("n must be ≥ 1"));
    }
    check_positive("L", length)?;
    let scale = limit_scale_m(n);
    m_values
        .iter()
        .map(|&m| {
            if !(0.0..=LIMIT_SCAN_MAX_M).contains(&m) {
                return Err(domain(format!(
                    "m = {m} is outside the small-m window [0, {LIMIT_SCAN_MAX_M}]"
                )));
            }
            let modulus = Modulus::new(m)?;
            let energy = printed_energy(n, length, &modulus);
            let nf = n as f64;
            let expansion = nf * nf * PI * PI / (2.0 * length * length) * (1.0 + 1.5 * m);
            let gap = energy - expansion;
            Ok(LimitRow {
                m,
                energy,
                expansion,
                gap,
                relative_gap: gap / expansion,
                at_limit_scale: (m - scale).abs() <= 1e-9 * scale,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> StarParams {
        StarParams::default()
    }

    #[test]
    fn m_zero_reductions() {
        let s = build_solution(1, 1.0, 0.0, 1.0, params()).unwrap();
        assert_eq!(s.k(), PI);
        assert_eq!(s.a2(), 0.0);
        assert!((s.energy() - PI * PI / 2.0).abs() < 1e-14);
        let s = build_solution(2, 1.0, 0.0, 1.0, params()).unwrap();
        assert_eq!(s.k(), 2.0 * PI);
        assert!((s.energy() - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn validation() {
        assert_eq!(
            build_solution(0, 1.0, 0.5, 1.0, params()).unwrap_err().to_string(),
            "domain error: n must be ≥ 1"
        );
        assert!(build_solution(1, 0.0, 0.5, 1.0, params()).is_err());
        assert!(build_solution(1, 1.0, 1.0, 1.0, params()).is_err());
        assert!(build_solution(1, 1.0, 0.5, -1.0, params()).is_err());
    }

    #[test]
    fn eval_errors_and_boundaries() {
        let s = build_solution(3, 2.0, 0.4, 1.0, params()).unwrap();
        assert!(matches!(s.eval_psi(0.5, s.k()), Err(Error::MomentumOutOfBand { .. })));
        assert!(matches!(s.eval_psi(-0.1, 0.0), Err(Error::Domain(_))));
        for &p in &[0.0, 0.3, -2.0, 0.9 * s.k()] {
            assert_eq!(s.eval_psi(0.0, p).unwrap(), 0.0);
        }
        assert!(s.eval_psi(2.0, 0.0).unwrap().abs() < 1e-12);
        assert_eq!(s.eval_psi(0.7, 1.3).unwrap(), s.eval_psi(0.7, -1.3).unwrap());
    }

    #[test]
    fn small_m_is_sine() {
        let s = build_solution(3, 1.0, 1e-10, 1.0, params()).unwrap();
        let a = s.amplitude();
        for i in 0..50 {
            let q = i as f64 / 49.0;
            let expect = a * (3.0 * PI * q).sin();
            assert!((s.eval_psi(q, 0.0).unwrap() - expect).abs() <= 1e-8 * a.max(1e-300));
        }
    }

    #[test]
    fn nodes_follow_quantum_number() {
        for n in 1..=6 {
            let s = build_solution(n, 1.0, 0.5, 1.0, params()).unwrap();
            assert_eq!(s.node_count().unwrap(), n as usize - 1);
        }
    }

    #[test]
    fn sign_changes() {
        assert_eq!(count_sign_changes(&[1.0, 0.0, -1.0, -2.0, 0.0, 3.0]), 2);
        assert_eq!(count_sign_changes(&[]), 0);
    }

    #[test]
    fn sample_masks_out_of_band() {
        let s = build_solution(1, 1.0, 0.5, 1.0, params()).unwrap();
        let k = s.k();
        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (1.1 * k, 2.0 * k), 9, 9).unwrap();
        let out = s.sample_psi(&g).unwrap();
        assert_eq!(out.masked_fraction, 1.0);
        assert!(out.field.values().iter().all(|v| v.norm() == 0.0));

        let g = PhaseSpaceGrid::clamped((0.0, 1.0), (-0.5 * k, 0.5 * k), 41, 21).unwrap();
        let out = s.sample_psi(&g).unwrap();
        assert_eq!(out.masked_fraction, 0.0);
        for iq in 1..g.nq() - 1 {
            for ip in 0..g.np() {
                assert!(out.field.at(iq, ip).re > 0.0);
                assert_eq!(out.field.at(iq, ip), out.field.at(iq, g.np() - 1 - ip));
            }
        }

        let bad = PhaseSpaceGrid::clamped((0.0, 1.5), (-1.0, 1.0), 9, 9).unwrap();
        assert!(s.sample_psi(&bad).is_err());
    }

    #[test]
    fn energy_and_amplitude_with_series_k() {
        // K(0.5) from the hypergeometric series; see elliptic tests
        let k_half = 1.854_074_677_301_372;
        let s = build_solution(1, 1.0, 0.5, 1.0, params()).unwrap();
        assert!((s.k() - 2.0 * k_half).abs() < 1e-13);
        assert!((s.a2() - (2.0 * k_half).powi(2)).abs() < 1e-12);
        assert!((s.energy() - (2.0 * k_half).powi(2) * 0.75).abs() < 1e-12);
    }

    #[test]
    fn energy_monotone() {
        for &m in &[0.0, 0.1, 0.5, 0.9] {
            let mut prev = 0.0;
            for n in 1..8 {
                let e = build_solution(n, 1.3, m, 1.0, params()).unwrap().energy();
                assert!(e > prev);
                prev = e;
            }
        }
        let mut prev = 0.0;
        for i in 0..50 {
            let e = build_solution(2, 1.0, i as f64 / 51.0, 1.0, params()).unwrap().energy();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn amplitude_vanishes_only_at_zero_m() {
        assert_eq!(build_solution(2, 1.0, 0.0, 1.0, params()).unwrap().a2(), 0.0);
        assert!(build_solution(2, 1.0, 1e-12, 1.0, params()).unwrap().a2() > 0.0);
    }

    #[test]
    fn coefficient_match_closes() {
        for &(m, k, g) in &[(0.1, 3.0, 0.5), (0.5, 7.4, 1.0), (0.9, 12.0, 2.0)] {
            let p = StarParams { hbar: 0.8, mass: 1.3, series_order: 2 };
            let c = coefficient_match(m, k, g, &p).unwrap();
            assert!(c.identity_residual <= 1e-8, "{c:?}");
            assert!((c.e_matched - 0.64 * k * k * (1.0 + m) / (8.0 * 1.3)).abs() < 1e-12);
        }
        assert!(matches!(
            coefficient_match(0.3, 2.0, 0.0, &params()),
            Err(Error::DegenerateMatch(_))
        ));
    }

    #[test]
    fn coefficient_match_linear_limit() {
        // m → 0 reproduces the linear box energy on the p = 0 line, ħ²(nπ/L)²/(8M).
        let n = 2.0;
        let c = coefficient_match(1e-12, n * PI, 1.0, &params()).unwrap();
        assert!((c.e_matched - (n * PI).powi(2) / 8.0).abs() < 1e-9);
        let c0 = coefficient_match(0.0, n * PI, 0.0, &params()).unwrap();
        assert_eq!(c0.a2_matched, 0.0);
        assert_eq!(c0.a2_ratio, None);
        // printed/matched ratios with ħ = M = 1
        let c = coefficient_match(0.5, 5.0, 1.0, &params()).unwrap();
        assert!((c.e_ratio - 4.0).abs() < 1e-12);
        assert!((c.a2_ratio.unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn limit_scan() {
        let rows = box_limit_scan(1, 1.0, &[0.0, 1e-4, 5e-5]).unwrap();
        assert!(rows[0].gap.abs() < 1e-14);
        let ratio = rows[1].gap / rows[2].gap;
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
        // leading coefficient of the gap is (27/32)·n²π²/2
        let c = rows[1].gap / 1e-8;
        assert!((c - 27.0 / 32.0 * PI * PI / 2.0).abs() < 0.01 * c);
        assert!(box_limit_scan(1, 1.0, &[0.2]).is_err());

        let scale = limit_scale_m(100);
        let rows = box_limit_scan(100, 1.0, &[scale, 2.0 * scale]).unwrap();
        assert!(rows[0].at_limit_scale && !rows[1].at_limit_scale);
        assert!(rows[0].relative_gap.abs() < 1e-7);
    }

    #[test]
    fn summary_keys() {
        let s = build_solution(1, 1.0, 0.5, 1.0, params()).unwrap();
        let v = serde_json::to_value(s.summary().unwrap()).unwrap();
        for key in ["n", "L", "m", "g", "hbar", "mass", "k", "A2", "E", "E_matched", "A2_matched", "norm_p0"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let s = build_solution(1, 1.0, 0.5, 0.0, params()).unwrap();
        assert!(s.summary().unwrap().a2_matched.is_none());
    }
}
