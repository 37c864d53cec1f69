//! Rectangular `(q, p)` lattice and complex fields sampled on it.
//!
//! Values are stored row-major: index `i_q * np + i_p`, so a fixed-`q` row
//! is contiguous in memory. Two boundary modes exist:
//!
//! * [`Boundary::Clamped`]: endpoints included, `dq = (q_max − q_min)/(nq − 1)`.
//!   Derivatives use 4th-order central stencils in the interior and
//!   off-centred stencils of the same width near the edges; quadrature is
//!   composite Simpson.
//! * [`Boundary::Periodic`]: right endpoint excluded, `dq = (q_max − q_min)/nq`.
//!   Derivatives are spectral (FFT along the axis); quadrature is the
//!   rectangle rule. Only meant for smooth functions that decay well inside
//!   the box.
//!
//! Point counts are rounded up to the next odd number in both modes.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Nodes skipped on every side when forming interior norms.
pub const INTERIOR_MARGIN: usize = 2;

/// Smallest accepted point count along either axis.
pub const MIN_POINTS: usize = 8;

/// Highest derivative order `diff_q`/`diff_p` support.
pub const MAX_DIFF_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Clamped,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
    dq: f64,
    dp: f64,
    boundary: Boundary,
}

fn round_up_odd(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

impl PhaseSpaceGrid {
    pub fn new(
        (q_min, q_max): (f64, f64),
        (p_min, p_max): (f64, f64),
        nq: usize,
        np: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        for (name, v) in [("q_min", q_min), ("q_max", q_max), ("p_min", p_min), ("p_max", p_max)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("grid bound {name} = {v}")));
            }
        }
        if q_max <= q_min {
            return Err(domain(format!("q_max ({q_max}) must exceed q_min ({q_min})")));
        }
        if p_max <= p_min {
            return Err(domain(format!("p_max ({p_max}) must exceed p_min ({p_min})")));
        }
        if nq < MIN_POINTS || np < MIN_POINTS {
            return Err(Error::GridTooSmall(format!(
                "need nq, np >= {MIN_POINTS}, got nq = {nq}, np = {np}"
            )));
        }
        let nq = round_up_odd(nq);
        let np = round_up_odd(np);
        let (dq, dp) = match boundary {
            Boundary::Clamped => (
                (q_max - q_min) / (nq - 1) as f64,
                (p_max - p_min) / (np - 1) as f64,
            ),
            Boundary::Periodic => ((q_max - q_min) / nq as f64, (p_max - p_min) / np as f64),
        };
        Ok(Self { q_min, q_max, p_min, p_max, nq, np, dq, dp, boundary })
    }

    pub fn clamped(q_range: (f64, f64), p_range: (f64, f64), nq: usize, np: usize) -> Result<Self> {
        Self::new(q_range, p_range, nq, np, Boundary::Clamped)
    }

    pub fn periodic(q_range: (f64, f64), p_range: (f64, f64), nq: usize, np: usize) -> Result<Self> {
        Self::new(q_range, p_range, nq, np, Boundary::Periodic)
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }
    pub fn q_max(&self) -> f64 {
        self.q_max
    }
    pub fn p_min(&self) -> f64 {
        self.p_min
    }
    pub fn p_max(&self) -> f64 {
        self.p_max
    }
    pub fn nq(&self) -> usize {
        self.nq
    }
    pub fn np(&self) -> usize {
        self.np
    }
    pub fn dq(&self) -> f64 {
        self.dq
    }
    pub fn dp(&self) -> f64 {
        self.dp
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.np + ip
    }

    fn node(lo: f64, hi: f64, i: usize, n: usize, boundary: Boundary) -> f64 {
        match boundary {
            // Interpolating form keeps both endpoints (and the midpoint of a
            // symmetric range) exact.
            Boundary::Clamped => {
                let t = i as f64 / (n - 1) as f64;
                lo * (1.0 - t) + hi * t
            }
            Boundary::Periodic => lo + (hi - lo) * (i as f64 / n as f64),
        }
    }

    #[inline]
    pub fn q(&self, iq: usize) -> f64 {
        Self::node(self.q_min, self.q_max, iq, self.nq, self.boundary)
    }

    #[inline]
    pub fn p(&self, ip: usize) -> f64 {
        Self::node(self.p_min, self.p_max, ip, self.np, self.boundary)
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        (0..self.nq).map(|i| self.q(i)).collect()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        (0..self.np).map(|i| self.p(i)).collect()
    }

    /// Index of the `p = 0` grid line, if the lattice has one.
    pub fn p_zero_index(&self) -> Option<usize> {
        let scale = self.p_min.abs().max(self.p_max.abs());
        (0..self.np).find(|&j| self.p(j).abs() <= 1e-12 * scale)
    }

    /// Quadrature weights along one axis.
    pub fn weights(&self, axis: Axis) -> Vec<f64> {
        let (n, h) = match axis {
            Axis::Q => (self.nq, self.dq),
            Axis::P => (self.np, self.dp),
        };
        quadrature_weights(n, h, self.boundary)
    }
}

/// Composite Simpson weights (odd `n`) for clamped grids, rectangle rule for
/// periodic ones.
pub fn quadrature_weights(n: usize, h: f64, boundary: Boundary) -> Vec<f64> {
    match boundary {
        Boundary::Periodic => vec![h; n],
        Boundary::Clamped => {
            debug_assert!(n % 2 == 1);
            (0..n)
                .map(|i| {
                    let w = if i == 0 || i == n - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    w * h / 3.0
                })
                .collect()
        }
    }
}

/// Integrate a 1D profile sampled with the given axis spacing and boundary.
pub fn integrate_profile(values: &[Complex64], h: f64, boundary: Boundary) -> Complex64 {
    let w = quadrature_weights(values.len(), h, boundary);
    values.iter().zip(&w).map(|(v, w)| v * w).sum()
}

/// Finite-difference weights for derivative `order` at offset 0 from the
/// nodes `offsets` (unit spacing), by Fornberg's recursion.
pub(crate) fn fd_weights(offsets: &[f64], order: usize) -> Vec<f64> {
    let n = offsets.len();
    let mut c = vec![vec![0.0_f64; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Per-node stencils for one axis of a clamped grid.
struct Stencils {
    /// `(first node index, weights already divided by h^order)` for each node.
    rows: Vec<(usize, Vec<f64>)>,
}

impl Stencils {
    fn clamped(n: usize, order: usize, h: f64) -> Result<Self> {
        let half = if order <= 2 { 2 } else { 3 };
        let width = 2 * half + 1;
        if n < width {
            return Err(Error::GridTooSmall(format!(
                "derivative of order {order} needs {width} points, axis has {n}"
            )));
        }
        let scale = h.powi(order as i32);
        let interior: Vec<f64> = {
            let offs: Vec<f64> = (0..width).map(|k| k as f64 - half as f64).collect();
            fd_weights(&offs, order).into_iter().map(|w| w / scale).collect()
        };
        let rows = (0..n)
            .map(|i| {
                let start = i.saturating_sub(half).min(n - width);
                if start + half == i {
                    (start, interior.clone())
                } else {
                    let offs: Vec<f64> = (0..width).map(|k| (start + k) as f64 - i as f64).collect();
                    let w = fd_weights(&offs, order).into_iter().map(|w| w / scale).collect();
                    (start, w)
                }
            })
            .collect();
        Ok(Self { rows })
    }

    /// Apply to a line read through `get`. Differences against the centre
    /// value make constants map to exactly zero.
    #[inline]
    fn apply(&self, i: usize, get: impl Fn(usize) -> Complex64) -> Complex64 {
        let (start, w) = &self.rows[i];
        let centre = get(i);
        w.iter()
            .enumerate()
            .map(|(k, wk)| (get(start + k) - centre) * wk)
            .sum()
    }
}

/// Spectral multiplier `(i κ)^order` for an `n`-point periodic axis.
struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    multiplier: Vec<Complex64>,
}

impl Spectral {
    fn new(n: usize, order: usize, h: f64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = 2.0 * std::f64::consts::PI / (n as f64 * h);
        let norm = 1.0 / n as f64;
        let multiplier = (0..n)
            .map(|j| {
                // n is odd, so there is no unpaired Nyquist mode.
                let freq = if j <= (n - 1) / 2 { j as f64 } else { j as f64 - n as f64 };
                Complex64::new(0.0, freq * base).powu(order as u32) * norm
            })
            .collect();
        Self { forward, inverse, multiplier }
    }

    fn apply(&self, line: &mut [Complex64]) {
        self.forward.process(line);
        for (v, m) in line.iter_mut().zip(&self.multiplier) {
            *v *= m;
        }
        self.inverse.process(line);
    }
}

/// Complex samples on a [`PhaseSpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: PhaseSpaceGrid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn sample<F>(grid: &PhaseSpaceGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let np = grid.np;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        values.par_chunks_mut(np).enumerate().for_each(|(iq, row)| {
            let q = grid.q(iq);
            for (ip, v) in row.iter_mut().enumerate() {
                *v = f(q, grid.p(ip));
            }
        });
        Self::from_values(grid, values)
    }

    pub fn sample_real<F>(grid: &PhaseSpaceGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        Self::sample(grid, |q, p| Complex64::new(f(q, p), 0.0))
    }

    pub fn from_values(grid: &PhaseSpaceGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!(
                "expected {} values for a {}x{} grid, got {}",
                grid.len(),
                grid.nq,
                grid.np,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let (iq, ip) = (i / grid.np, i % grid.np);
            return Err(Error::NonFinite(format!(
                "sample at q = {}, p = {} is {}",
                grid.q(iq),
                grid.p(ip),
                values[i]
            )));
        }
        Ok(Self { grid: *grid, values })
    }

    pub fn constant(grid: &PhaseSpaceGrid, c: Complex64) -> Self {
        Self { grid: *grid, values: vec![c; grid.len()] }
    }

    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, iq: usize, ip: usize) -> Complex64 {
        self.values[self.grid.index(iq, ip)]
    }

    pub fn ensure_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Field {
        Field { grid: self.grid, values: self.values.par_iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise map that also sees the node coordinates.
    pub fn map_nodes(&self, f: impl Fn(f64, f64, Complex64) -> Complex64 + Sync) -> Field {
        let grid = self.grid;
        let np = grid.np;
        let mut values = self.values.clone();
        values.par_chunks_mut(np).enumerate().for_each(|(iq, row)| {
            let q = grid.q(iq);
            for (ip, v) in row.iter_mut().enumerate() {
                *v = f(q, grid.p(ip), *v);
            }
        });
        Field { grid, values }
    }

    pub fn zip_with(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
    ) -> Result<Field> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn diff_q(&self, order: usize) -> Result<Field> {
        self.diff(Axis::Q, order)
    }

    pub fn diff_p(&self, order: usize) -> Result<Field> {
        self.diff(Axis::P, order)
    }

    /// Mixed derivative `∂_q^a ∂_p^b`.
    pub fn diff_mixed(&self, q_order: usize, p_order: usize) -> Result<Field> {
        self.diff_q(q_order)?.diff_p(p_order)
    }

    pub fn diff(&self, axis: Axis, order: usize) -> Result<Field> {
        if order == 0 {
            return Ok(self.clone());
        }
        if order > MAX_DIFF_ORDER {
            return Err(domain(format!(
                "derivative order must be in 1..={MAX_DIFF_ORDER}, got {order}"
            )));
        }
        let g = self.grid;
        let (n, h, stride, lines) = match axis {
            Axis::Q => (g.nq, g.dq, g.np, g.np),
            Axis::P => (g.np, g.dp, 1, g.nq),
        };
        // line `l`, position `i` lives at offset(l) + i * stride
        let offset = |l: usize| match axis {
            Axis::Q => l,
            Axis::P => l * g.np,
        };
        let src = &self.values;
        let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
        match g.boundary {
            Boundary::Clamped => {
                let st = Stencils::clamped(n, order, h)?;
                match axis {
                    Axis::P => {
                        out.par_chunks_mut(g.np).enumerate().for_each(|(iq, row)| {
                            let base = iq * g.np;
                            for (ip, v) in row.iter_mut().enumerate() {
                                *v = st.apply(ip, |k| src[base + k]);
                            }
                        });
                    }
                    Axis::Q => {
                        out.par_chunks_mut(g.np).enumerate().for_each(|(iq, row)| {
                            for (ip, v) in row.iter_mut().enumerate() {
                                *v = st.apply(iq, |k| src[k * g.np + ip]);
                            }
                        });
                    }
                }
            }
            Boundary::Periodic => {
                let sp = Spectral::new(n, order, h);
                let done: Vec<Vec<Complex64>> = (0..lines)
                    .into_par_iter()
                    .map(|l| {
                        let mut line: Vec<Complex64> =
                            (0..n).map(|i| src[offset(l) + i * stride]).collect();
                        sp.apply(&mut line);
                        line
                    })
                    .collect();
                for (l, line) in done.into_iter().enumerate() {
                    for (i, v) in line.into_iter().enumerate() {
                        out[offset(l) + i * stride] = v;
                    }
                }
            }
        }
        Ok(Field { grid: g, values: out })
    }

    /// `∫ f dp` as a profile over `q` (length `nq`).
    pub fn reduce_p(&self) -> Vec<Complex64> {
        let w = self.grid.weights(Axis::P);
        self.values
            .chunks(self.grid.np)
            .map(|row| row.iter().zip(&w).map(|(v, w)| v * w).sum())
            .collect()
    }

    /// `∫ f dq` as a profile over `p` (length `np`).
    pub fn reduce_q(&self) -> Vec<Complex64> {
        let w = self.grid.weights(Axis::Q);
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.np];
        for (row, wq) in self.values.chunks(self.grid.np).zip(&w) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v * wq;
            }
        }
        out
    }

    /// `∫∫ f dq dp`, evaluated as the q-quadrature of [`Field::reduce_p`].
    pub fn integrate(&self) -> Complex64 {
        integrate_profile(&self.reduce_p(), self.grid.dq, self.grid.boundary)
    }

    /// `∫∫ |f| dq dp`.
    pub fn integrate_abs(&self) -> f64 {
        self.map(|v| Complex64::new(v.norm(), 0.0)).integrate().re
    }

    fn interior(&self, margin: usize) -> impl Iterator<Item = Complex64> + '_ {
        let g = self.grid;
        let (q_hi, p_hi) = (g.nq.saturating_sub(margin), g.np.saturating_sub(margin));
        (margin..q_hi).flat_map(move |iq| (margin..p_hi).map(move |ip| self.at(iq, ip)))
    }

    /// `sqrt(Σ |f|² dq dp)` over nodes at least `margin` away from every edge.
    pub fn interior_l2(&self, margin: usize) -> f64 {
        let s: f64 = self.interior(margin).map(|v| v.norm_sqr()).sum();
        (s * self.grid.dq * self.grid.dp).sqrt()
    }

    pub fn interior_linf(&self, margin: usize) -> f64 {
        self.interior(margin).map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `sqrt(Σ_q |f(q, p_j)|² dq)` along the fixed-`p` line `ip`, skipping
    /// `margin` nodes at each `q` end.
    pub fn line_l2(&self, ip: usize, margin: usize) -> f64 {
        let g = self.grid;
        let s: f64 = (margin..g.nq.saturating_sub(margin))
            .map(|iq| self.at(iq, ip).norm_sqr())
            .sum();
        (s * g.dq).sqrt()
    }

    /// CSV dump with header `q,p,re,im`, rows ordered by `q` then `p`,
    /// numbers printed with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "q,p,re,im")?;
        for iq in 0..self.grid.nq {
            let q = self.grid.q(iq);
            for ip in 0..self.grid.np {
                let v = self.at(iq, ip);
                writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", q, self.grid.p(ip), v.re, v.im)?;
            }
        }
        Ok(())
    }
}
