//! Moyal star product and star operators on phase-space fields.
//!
//! The star product is the bidifferential exponential
//!
//! ```text
//! a ⋆ b = a exp[(iħ/2)(←∂_q →∂_p − ←∂_p →∂_q)] b
//! ```
//!
//! truncated after the `ħ^series_order` term. Left multiplication by the
//! coordinate symbols gives the Bopp operators
//!
//! ```text
//! Q̂ = q⋆ = q + (iħ/2)∂_p        P̂ = p⋆ = p − (iħ/2)∂_q
//! ```
//!
//! and the free Hamiltonian `Ĥ = P̂²/2M` acts as
//! `(p²/2M − ħ²/8M ∂²_q − iħp/2M ∂_q)`.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::phase_grid::{Field, INTERIOR_MARGIN};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Physical constants and the truncation order of the Moyal series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarParams {
    pub hbar: f64,
    pub mass: f64,
    pub series_order: usize,
}

impl Default for StarParams {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, series_order: 2 }
    }
}

impl StarParams {
    pub fn new(hbar: f64, mass: f64, series_order: usize) -> Result<Self> {
        let p = Self { hbar, mass, series_order };
        p.validate()?;
        Ok(p)
    }

    pub fn with_order(self, series_order: usize) -> Result<Self> {
        Self::new(self.hbar, self.mass, series_order)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(domain(format!("hbar must be > 0, got {}", self.hbar)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(domain(format!("mass must be > 0, got {}", self.mass)));
        }
        if !(1..=4).contains(&self.series_order) {
            return Err(domain(format!(
                "series order must be in 1..=4, got {}",
                self.series_order
            )));
        }
        Ok(())
    }
}

/// How the cubic term of the Gross-Pitaevskii equation is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    /// `g |ψ|² ψ`
    #[default]
    Pointwise,
    /// `g (ψ ⋆ ψ†) ⋆ ψ`
    Star,
}

/// `Q̂ f = q f + (iħ/2) ∂_p f`
pub fn bopp_q(field: &Field, params: &StarParams) -> Result<Field> {
    let dp = field.diff_p(1)?;
    let half = I * (0.5 * params.hbar);
    field.map_nodes(|q, _, v| v * q).zip_with(&dp, |a, d| a + half * d)
}

/// `P̂ f = p f − (iħ/2) ∂_q f`
pub fn bopp_p(field: &Field, params: &StarParams) -> Result<Field> {
    let dq = field.diff_q(1)?;
    let half = I * (0.5 * params.hbar);
    field.map_nodes(|_, p, v| v * p).zip_with(&dq, |a, d| a - half * d)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// All mixed derivatives `∂_q^α ∂_p^β f` with `α + β ≤ order`, indexed
/// `[α][β]`.
fn derivative_table(f: &Field, order: usize) -> Result<Vec<Vec<Field>>> {
    (0..=order)
        .map(|a| {
            let dq = f.diff_q(a)?;
            (0..=order - a).map(|b| dq.diff_p(b)).collect()
        })
        .collect()
}

/// Truncated Moyal product
///
/// ```text
/// a⋆b = Σ_{s≤N} (1/s!)(iħ/2)^s Σ_j (−1)^j C(s,j) (∂_q^{s−j}∂_p^j a)(∂_q^j ∂_p^{s−j} b)
/// ```
///
/// Exact (up to the grid derivatives) whenever either factor is a
/// polynomial of total degree ≤ `series_order`.
pub fn moyal_star(a: &Field, b: &Field, params: &StarParams) -> Result<Field> {
    a.ensure_same_grid(b)?;
    params.validate()?;
    let order = params.series_order;
    let da = derivative_table(a, order)?;
    let db = derivative_table(b, order)?;
    let mut acc = a.mul(b)?;
    let mut prefactor = re(1.0);
    for s in 1..=order {
        prefactor *= I * (0.5 * params.hbar);
        let base = prefactor / factorial(s);
        for j in 0..=s {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = base * (sign * binomial(s, j));
            let left = &da[s - j][j];
            let right = &db[j][s - j];
            let term = left.mul(right)?;
            acc = acc.zip_with(&term, |x, t| x + coeff * t)?;
        }
    }
    Ok(acc)
}

/// Left action of the monomial symbol `q^i p^j` on `b` through the Bopp
/// operators: the average over every arrangement of `i` factors `Q̂` and
/// `j` factors `P̂`. Symmetric ordering is the operator counterpart of the
/// monomial under the star product, so this must agree with
/// `moyal_star(q^i p^j, b)` once `series_order ≥ i + j`.
pub fn bopp_monomial(i: usize, j: usize, b: &Field, params: &StarParams) -> Result<Field> {
    let n = i + j;
    let mut total = Field::zeros(b.grid());
    let mut count = 0usize;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != i {
            continue;
        }
        let mut f = b.clone();
        for bit in 0..n {
            f = if mask & (1 << bit) != 0 { bopp_q(&f, params)? } else { bopp_p(&f, params)? };
        }
        total = total.add(&f)?;
        count += 1;
    }
    Ok(total.scale(re(1.0 / count as f64)))
}

/// `Ĥ f = (p²/2M) f − (ħ²/8M) ∂²_q f − (iħp/2M) ∂_q f`
pub fn apply_free_hamiltonian(field: &Field, params: &StarParams) -> Result<Field> {
    let d1 = field.diff_q(1)?;
    let d2 = field.diff_q(2)?;
    let (hbar, mass) = (params.hbar, params.mass);
    let kinetic = field.map_nodes(|_, p, v| v * (p * p / (2.0 * mass)));
    let with_d2 = kinetic.zip_with(&d2, |k, d| k - d * (hbar * hbar / (8.0 * mass)))?;
    let d1p = d1.map_nodes(|_, p, d| d * I * (hbar * p / (2.0 * mass)));
    with_d2.sub(&d1p)
}

/// Residual of the stationary Gross-Pitaevskii equation and its norms.
#[derive(Debug, Clone)]
pub struct GpResidual {
    pub residual: Field,
    /// Interior l2 norm over the whole grid.
    pub l2: f64,
    pub linf: f64,
    /// l2 norm along the `p = 0` grid line, `None` if the grid has no such line.
    pub l2_p0_slice: Option<f64>,
    /// Interior max of `|∂_q ψ|`.
    pub dq1_linf: f64,
    /// Interior max of `|∂²_q ψ|`.
    pub dq2_linf: f64,
}

/// `Ĥψ + g·N[ψ] − Eψ`, where `N[ψ]` is `|ψ|²ψ` or `(ψ⋆ψ†)⋆ψ`.
pub fn gp_residual(
    psi: &Field,
    energy: f64,
    g: f64,
    params: &StarParams,
    nonlinearity: Nonlinearity,
) -> Result<GpResidual> {
    if !energy.is_finite() {
        return Err(Error::NonFinite(format!("energy E = {energy}")));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(domain(format!("interaction strength g must be >= 0, got {g}")));
    }
    let kinetic = apply_free_hamiltonian(psi, params)?;
    let cubic = match nonlinearity {
        Nonlinearity::Pointwise => psi.map(|v| v * v.norm_sqr()),
        Nonlinearity::Star => {
            let density = moyal_star(psi, &psi.conj(), params)?;
            moyal_star(&density, psi, params)?
        }
    };
    let residual = kinetic
        .zip_with(&cubic, |k, c| k + c * g)?
        .zip_with(psi, |r, v| r - v * energy)?;
    let l2 = residual.interior_l2(INTERIOR_MARGIN);
    let linf = residual.interior_linf(INTERIOR_MARGIN);
    let l2_p0_slice = psi
        .grid()
        .p_zero_index()
        .map(|ip| residual.line_l2(ip, INTERIOR_MARGIN));
    let dq1_linf = psi.diff_q(1)?.interior_linf(INTERIOR_MARGIN);
    let dq2_linf = psi.diff_q(2)?.interior_linf(INTERIOR_MARGIN);
    Ok(GpResidual { residual, l2, linf, l2_p0_slice, dq1_linf, dq2_linf })
}

type Action = dyn Fn(&Field) -> Result<Field> + Send + Sync;

/// A named map on fields, `Â = a(q,p)⋆` or any composition of such.
pub struct StarOperator {
    label: String,
    action: Box<Action>,
}

impl fmt::Debug for StarOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarOperator").field("label", &self.label).finish()
    }
}

impl StarOperator {
    pub fn new(
        label: impl Into<String>,
        action: impl Fn(&Field) -> Result<Field> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), action: Box::new(action) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, field: &Field) -> Result<Field> {
        (self.action)(field)
    }

    /// `Q̂`
    pub fn position(params: StarParams) -> Self {
        Self::new("Q", move |f| bopp_q(f, &params))
    }

    /// `P̂`
    pub fn momentum(params: StarParams) -> Self {
        Self::new("P", move |f| bopp_p(f, &params))
    }

    /// `Ĥ = P̂²/2M`
    pub fn hamiltonian(params: StarParams) -> Self {
        Self::new("H", move |f| apply_free_hamiltonian(f, &params))
    }

    /// Galilean boost `K̂ = MQ̂ − tP̂` at time `t`.
    pub fn boost(params: StarParams, t: f64) -> Self {
        Self::new(format!("K(t={t})"), move |f| {
            let q = bopp_q(f, &params)?.scale(re(params.mass));
            let p = bopp_p(f, &params)?.scale(re(t));
            q.sub(&p)
        })
    }

    /// Left star multiplication by an arbitrary symbol field.
    pub fn left_symbol(label: impl Into<String>, symbol: Field, params: StarParams) -> Self {
        Self::new(label, move |f| moyal_star(&symbol, f, &params))
    }
}

/// Interior l2 norm of `(AB − BA) test − expected`.
pub fn commutator_norm(
    op_a: &StarOperator,
    op_b: &StarOperator,
    test: &Field,
    expected: &Field,
) -> Result<f64> {
    test.ensure_same_grid(expected)?;
    let ab = op_a.apply(&op_b.apply(test)?)?;
    let ba = op_b.apply(&op_a.apply(test)?)?;
    Ok(ab.sub(&ba)?.sub(expected)?.interior_l2(INTERIOR_MARGIN))
}
