//! Complete elliptic integral K(m) and the Jacobi elliptic functions
//! sn, cn, dn.
//!
//! Everything here uses the *parameter* convention `sn(u|m)`, i.e. `m = k²`
//! where `k` is the modulus. Both routines are built on the
//! arithmetic-geometric mean:
//!
//! ```text
//! K(m) = π / (2 · AGM(1, √(1−m)))
//! ```
//!
//! and sn/cn/dn come from the descending Landen recursion on the same AGM
//! sequence (A&S 16.4). `m ≥ 1` is rejected instead of continued.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};

/// Relative agreement of successive means at which the AGM stops.
const AGM_TOL: f64 = 1e-15;

/// Hard cap on AGM / Landen steps. Convergence is quadratic, so for any
/// `m < 1` representable in f64 this is never reached.
const MAX_DEPTH: usize = 32;

/// Validated elliptic parameter `0 ≤ m < 1` together with its quarter
/// period `K(m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    m: f64,
    k_complete: f64,
}

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        let k_complete = complete_k(m)?;
        Ok(Self { m, k_complete })
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Cached `K(m)`.
    #[inline]
    pub fn k_complete(&self) -> f64 {
        self.k_complete
    }

    /// Period of `sn(·|m)`, `4K(m)`.
    pub fn period(&self) -> f64 {
        4.0 * self.k_complete
    }

    pub fn jacobi(&self, u: f64) -> Result<(f64, f64, f64)> {
        jacobi_elliptic(u, self.m)
    }
}

fn check_parameter(m: f64) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite(format!("elliptic parameter m = {m}")));
    }
    if !(0.0..1.0).contains(&m) {
        return Err(domain(format!(
            "elliptic parameter must satisfy 0 <= m < 1, got {m}"
        )));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, `K(m) = ∫₀^{π/2} dθ/√(1 − m sin²θ)`.
pub fn complete_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..MAX_DEPTH {
        if (a - b).abs() <= AGM_TOL * a {
            return Ok(FRAC_PI_2 / a);
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Err(Error::NoConvergence(format!(
        "AGM for K({m}) did not settle in {MAX_DEPTH} steps"
    )))
}

/// `K(m)` from its Maclaurin series
/// `(π/2) Σ_j [(2j)!/(4^j (j!)²)]² m^j`, summed until the partial sums stop
/// moving. Slow near `m = 1`; kept as a second route for verification.
pub fn complete_k_series(m: f64) -> Result<f64> {
    check_parameter(m)?;
    let mut sum = 0.0;
    let mut central = 1.0;
    let mut mj = 1.0;
    for j in 0..1_000_000 {
        let prev = sum;
        sum += central * central * mj;
        if sum == prev {
            return Ok(FRAC_PI_2 * sum);
        }
        let jf = j as f64;
        central *= (2.0 * jf + 1.0) / (2.0 * jf + 2.0);
        mj *= m;
    }
    Err(Error::NoConvergence(format!("K series at m = {m}")))
}

/// Jacobi elliptic functions `(sn, cn, dn)` of argument `u` and parameter `m`.
pub fn jacobi_elliptic(u: f64, m: f64) -> Result<(f64, f64, f64)> {
    check_parameter(m)?;
    if !u.is_finite() {
        return Err(Error::NonFinite(format!("elliptic argument u = {u}")));
    }
    if m == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }

    // Forward AGM sweep, keeping a_n and c_n for the backward pass.
    let mut a = [0.0_f64; MAX_DEPTH + 1];
    let mut c = [0.0_f64; MAX_DEPTH + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut depth = None;
    for n in 0..MAX_DEPTH {
        if c[n].abs() <= AGM_TOL * a[n] {
            depth = Some(n);
            break;
        }
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
    }
    let depth = depth.ok_or_else(|| {
        Error::NoConvergence(format!(
            "Landen descent for m = {m} exceeded depth {MAX_DEPTH}"
        ))
    })?;

    // Backward pass: phi_{n-1} = (phi_n + asin(c_n/a_n · sin phi_n)) / 2.
    let mut phi = (1u64 << depth) as f64 * a[depth] * u;
    for n in (1..=depth).rev() {
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    // dn > 0 for real u and m < 1.
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

/// `sn(u|m)` alone.
pub fn sn(u: f64, m: f64) -> Result<f64> {
    jacobi_elliptic(u, m).map(|(s, _, _)| s)
}

/// `d²sn/du² = −(1+m)·sn + 2m·sn³`.
pub fn sn_second_derivative(u: f64, m: f64) -> Result<f64> {
    let s = sn(u, m)?;
    Ok(-(1.0 + m) * s + 2.0 * m * s * s * s)
}
