//! Command-line front end: `solve`, `wigner`, `verify` and `limit`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 I/O error. Every subcommand is deterministic, so a fixed configuration
//! produces byte-identical files.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::elliptic;
use crate::error::{Error, Result};
use crate::gp_model::{self, build_solution, coefficient_match, GpSolution};
use crate::phase_grid::{Field, PhaseSpaceGrid, INTERIOR_MARGIN};
use crate::star_engine::{
    bopp_monomial, bopp_p, commutator_norm, gp_residual, moyal_star, Nonlinearity, StarOperator,
    StarParams,
};
use crate::wigner_analysis::{self, write_profile_csv, write_wigner_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable capping the worker pool (0 = automatic).
pub const THREADS_ENV: &str = "MOYAL_GP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "moyal-gp", version, about = "Phase-space Gross-Pitaevskii toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a box solution and print its JSON summary.
    Solve(SolveArgs),
    /// Dump the Wigner function of a solution on a grid plus a JSON report.
    Wigner(WignerArgs),
    /// Run the built-in verification checks.
    Verify(VerifyArgs),
    /// Tabulate the small-m energy expansion as CSV.
    Limit(LimitArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NonlinearityArg {
    Pointwise,
    Star,
}

impl From<NonlinearityArg> for Nonlinearity {
    fn from(v: NonlinearityArg) -> Self {
        match v {
            NonlinearityArg::Pointwise => Nonlinearity::Pointwise,
            NonlinearityArg::Star => Nonlinearity::Star,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Physics {
    /// Quantum number (≥ 1).
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub n: i64,
    /// Box length.
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub length: f64,
    /// Interaction strength (≥ 0).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
    /// Highest power of ħ kept in the Moyal series (1-4).
    #[arg(long, default_value_t = 2)]
    pub series_order: usize,
    #[arg(long, value_enum, default_value_t = NonlinearityArg::Pointwise)]
    pub nonlinearity: NonlinearityArg,
}

impl Physics {
    fn params(&self) -> Result<StarParams> {
        StarParams::new(self.hbar, self.mass, self.series_order)
    }

    fn n(&self) -> Result<u32> {
        if self.n < 1 {
            return Err(Error::Domain("n must be ≥ 1".into()));
        }
        u32::try_from(self.n).map_err(|_| Error::Domain(format!("n = {} is too large", self.n)))
    }

    fn solution(&self, m: f64) -> Result<GpSolution> {
        build_solution(self.n()?, self.length, m, self.g, self.params()?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Elliptic parameter, 0 ≤ m < 1.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub m: f64,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, default_value_t = 513)]
    pub nq: usize,
    #[arg(long, default_value_t = 257)]
    pub np: usize,
    /// Momentum window as a fraction of k: p ∈ [−span·k, span·k].
    #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
    pub p_span: f64,
    /// Output directory.
    #[arg(long, default_value = "wigner_out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub m: f64,
    /// Only run the named check.
    #[arg(long, value_enum)]
    pub check: Option<CheckName>,
    /// Override every tolerance.
    #[arg(long, allow_negative_numbers = true)]
    pub tol_all: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_elliptic: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_k_series: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_commutator: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_boost: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_moyal_bopp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_box_limit: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_residual: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol_marginals: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LimitArgs {
    #[arg(long, default_value_t = 1)]
    pub n: i64,
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub length: f64,
    /// Comma-separated m values, each in [0, 0.1].
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 1e-3, 5e-4, 2.5e-4], allow_negative_numbers = true)]
    pub m: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Elliptic,
    KSeries,
    Commutator,
    Boost,
    MoyalBopp,
    BoxLimit,
    Residual,
    Marginals,
}

impl CheckName {
    const ALL: [CheckName; 8] = [
        CheckName::Elliptic,
        CheckName::KSeries,
        CheckName::Commutator,
        CheckName::Boost,
        CheckName::MoyalBopp,
        CheckName::BoxLimit,
        CheckName::Residual,
        CheckName::Marginals,
    ];

    fn name(self) -> &'static str {
        match self {
            CheckName::Elliptic => "elliptic",
            CheckName::KSeries => "k-series",
            CheckName::Commutator => "commutator",
            CheckName::Boost => "boost",
            CheckName::MoyalBopp => "moyal-bopp",
            CheckName::BoxLimit => "box-limit",
            CheckName::Residual => "residual",
            CheckName::Marginals => "marginals",
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            CheckName::Elliptic => 1e-11,
            CheckName::KSeries => 1e-12,
            CheckName::Commutator => 1e-8,
            CheckName::Boost => 1e-7,
            CheckName::MoyalBopp => 1e-9,
            CheckName::BoxLimit => 0.3,
            CheckName::Residual => 1e-6,
            CheckName::Marginals => 1e-10,
        }
    }
}

/// Result of one verification check: pass iff `value ≤ tol`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    /// Extra human-readable detail printed after the status line.
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, value: f64, tol: f64, detail: Option<String>) -> Self {
        Self { name: name.into(), value, tol, passed: value <= tol, detail }
    }

    pub fn line(&self) -> String {
        format!(
            "{}: {} ({:.3e}, {:.1e})",
            self.name,
            if self.passed { "pass" } else { "fail" },
            self.value,
            self.tol
        )
    }
}

/// Parse `args` (including the program name) and run, writing to the given
/// streams. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a, stdout).map(|_| EXIT_OK),
        Command::Wigner(a) => cmd_wigner(&a, stdout).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(&a, stdout).map(|results| {
            if results.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }),
        Command::Limit(a) => cmd_limit(&a, stdout, stderr).map(|_| EXIT_OK),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_USAGE,
            }
        }
    }
}

/// Entry point used by the binary: honours [`THREADS_ENV`] and the real
/// process arguments and streams.
pub fn main_entry() -> i32 {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<()> {
    let sol = args.physics.solution(args.m)?;
    let json = serde_json::to_string_pretty(&sol.summary()?).expect("summary serialises");
    match &args.out {
        Some(path) => write_file(path, |w| writeln!(w, "{json}"))?,
        None => writeln!(stdout, "{json}")?,
    }
    Ok(())
}

/// JSON written next to the Wigner grid.
#[derive(Debug, Serialize)]
pub struct WignerRun {
    pub n: u32,
    pub m: f64,
    pub k: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub nq: usize,
    pub np: usize,
    pub series_order: usize,
    pub masked_fraction: f64,
    #[serde(flatten)]
    pub report: wigner_analysis::WignerReport,
    pub gp_residual_l2: f64,
    pub gp_residual_p0_l2: Option<f64>,
    pub dpsi_dq_linf: f64,
    pub d2psi_dq2_linf: f64,
}

/// Compute everything `wigner` writes, without touching the filesystem.
pub fn wigner_run(args: &WignerArgs) -> Result<(Field, Field, WignerRun)> {
    let sol = args.physics.solution(args.m)?;
    if !(args.p_span.is_finite() && args.p_span > 0.0) {
        return Err(Error::Domain(format!("p-span must be > 0, got {}", args.p_span)));
    }
    let p_max = args.p_span * sol.k();
    let grid = PhaseSpaceGrid::clamped((0.0, sol.length()), (-p_max, p_max), args.nq, args.np)?;
    let sampled = sol.sample_psi(&grid)?;
    let params = *sol.params();
    let (fw, report) = wigner_analysis::analyze(&sampled.field, sol.energy(), &params)?;
    let res = gp_residual(
        &sampled.field,
        sol.energy(),
        sol.g(),
        &params,
        args.physics.nonlinearity.into(),
    )?;
    let run = WignerRun {
        n: sol.n(),
        m: sol.m(),
        k: sol.k(),
        energy: sol.energy(),
        nq: grid.nq(),
        np: grid.np(),
        series_order: params.series_order,
        masked_fraction: sampled.masked_fraction,
        report,
        gp_residual_l2: res.l2,
        gp_residual_p0_l2: res.l2_p0_slice,
        dpsi_dq_linf: res.dq1_linf,
        d2psi_dq2_linf: res.dq2_linf,
    };
    Ok((sampled.field, fw, run))
}

pub fn cmd_wigner(args: &WignerArgs, stdout: &mut dyn Write) -> Result<()> {
    let (psi, fw, run) = wigner_run(args)?;
    let grid = *fw.grid();
    fs::create_dir_all(&args.out)?;
    write_file(&args.out.join("wigner.csv"), |w| write_wigner_csv(w, &fw))?;
    write_file(&args.out.join("psi.csv"), |w| psi.write_csv(w))?;
    write_file(&args.out.join("marginal_q.csv"), |w| {
        write_profile_csv(w, &grid.q_nodes(), &run.report.marginal_q)
    })?;
    write_file(&args.out.join("marginal_p.csv"), |w| {
        write_profile_csv(w, &grid.p_nodes(), &run.report.marginal_p)
    })?;
    let json = serde_json::to_string_pretty(&run).expect("report serialises");
    write_file(&args.out.join("report.json"), |w| writeln!(w, "{json}"))?;
    writeln!(stdout, "{json}")?;
    Ok(())
}

pub fn cmd_limit(args: &LimitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let n = Physics { n: args.n, ..default_physics() }.n()?;
    let rows = gp_model::box_limit_scan(n, args.length, &args.m)?;
    let mut text = String::from("m,E,E_expansion,gap\n");
    for r in &rows {
        text.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", r.m, r.energy, r.expansion, r.gap));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.at_limit_scale {
            writeln!(stderr, "note: row {} (m = {:.6e}) is the limit scale m = 1/(n²π²)", i + 1, r.m)?;
        }
    }
    for pair in rows.windows(2) {
        if pair[1].m > 0.0 && (pair[0].m / pair[1].m - 2.0).abs() < 1e-12 && pair[1].gap != 0.0 {
            writeln!(stderr, "note: gap ratio {:.4} for m {:.3e} -> {:.3e}", pair[0].gap / pair[1].gap, pair[0].m, pair[1].m)?;
        }
    }
    match &args.out {
        Some(path) => write_file(path, |w| w.write_all(text.as_bytes()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn default_physics() -> Physics {
    Physics {
        n: 1,
        length: 1.0,
        g: 1.0,
        hbar: 1.0,
        mass: 1.0,
        series_order: 2,
        nonlinearity: NonlinearityArg::Pointwise,
    }
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    for check in CheckName::ALL {
        if args.check.is_some_and(|c| c != check) {
            continue;
        }
        let specific = match check {
            CheckName::Elliptic => args.tol_elliptic,
            CheckName::KSeries => args.tol_k_series,
            CheckName::Commutator => args.tol_commutator,
            CheckName::Boost => args.tol_boost,
            CheckName::MoyalBopp => args.tol_moyal_bopp,
            CheckName::BoxLimit => args.tol_box_limit,
            CheckName::Residual => args.tol_residual,
            CheckName::Marginals => args.tol_marginals,
        };
        let tol = args.tol_all.or(specific).unwrap_or(check.default_tol());
        let result = run_check(check, tol, args)?;
        writeln!(stdout, "{}", result.line())?;
        if let Some(d) = &result.detail {
            writeln!(stdout, "  {d}")?;
        }
        results.push(result);
    }
    Ok(results)
}

fn run_check(check: CheckName, tol: f64, args: &VerifyArgs) -> Result<CheckResult> {
    let name = check.name();
    let params = args.physics.params()?;
    let (value, detail) = match check {
        CheckName::Elliptic => (elliptic_identity_defect()?, None),
        CheckName::KSeries => {
            let mut worst = 0.0_f64;
            for m in [0.1, 0.3, 0.5, 0.7] {
                let a = elliptic::complete_k(m)?;
                let s = elliptic::complete_k_series(m)?;
                worst = worst.max(((a - s) / s).abs());
            }
            (worst, None)
        }
        CheckName::Commutator => {
            let (grid, f) = gaussian_probe(&params)?;
            let expected = f.scale(Complex64::new(0.0, params.hbar));
            let v = commutator_norm(
                &StarOperator::position(params),
                &StarOperator::momentum(params),
                &f,
                &expected,
            )?;
            (v, Some(format!("[Q,P]f - iħf on {}x{} periodic grid", grid.nq(), grid.np())))
        }
        CheckName::Boost => {
            let (_, f) = gaussian_probe(&params)?;
            let expected = bopp_p(&f, &params)?.scale(Complex64::new(0.0, params.hbar));
            let v = commutator_norm(
                &StarOperator::boost(params, 0.0),
                &StarOperator::hamiltonian(params),
                &f,
                &expected,
            )?;
            (v, Some("[K,H]f - iħPf with K = MQ - tP at t = 0".into()))
        }
        CheckName::MoyalBopp => (moyal_bopp_defect(params.hbar, params.mass)?, None),
        CheckName::BoxLimit => {
            let n = args.physics.n()?;
            let m0 = if args.m > 0.0 && args.m <= gp_model::LIMIT_SCAN_MAX_M { args.m } else { 1e-3 };
            let rows = gp_model::box_limit_scan(n, args.physics.length, &[m0, m0 / 2.0, m0 / 4.0])?;
            let r1 = rows[0].gap / rows[1].gap;
            let r2 = rows[1].gap / rows[2].gap;
            let slope = r2.log2();
            (
                (r1 - 4.0).abs().max((r2 - 4.0).abs()),
                Some(format!(
                    "m = {m0:.3e}: gap = {:.6e}, ratios {r1:.4} {r2:.4}, slope {slope:.4} (O(m^2) expects 2)",
                    rows[0].gap
                )),
            )
        }
        CheckName::Residual => {
            let n = args.physics.n()?;
            let m = if args.m > 0.0 { args.m } else { 0.5 };
            let (v, ratio) =
                matched_residual(n, args.physics.length, m, args.physics.g, params, args.physics.nonlinearity.into())?;
            (v, Some(format!("p = 0 line, matched constants; printed/matched E ratio {ratio:.6}")))
        }
        CheckName::Marginals => {
            let sol = args.physics.solution(args.m)?;
            let k = sol.k();
            let grid = PhaseSpaceGrid::clamped((0.0, sol.length()), (-0.5 * k, 0.5 * k), 129, 65)?;
            let psi = sol.sample_psi(&grid)?.field;
            let fw = wigner_analysis::wigner_from_amplitude(&psi, &params)?;
            let total = fw.integrate().re;
            let (rep_q, rep_p): (Vec<Complex64>, Vec<Complex64>) = (fw.reduce_p(), fw.reduce_q());
            let tq = crate::phase_grid::integrate_profile(&rep_q, grid.dq(), grid.boundary()).re;
            let tp = crate::phase_grid::integrate_profile(&rep_p, grid.dp(), grid.boundary()).re;
            let scale = total.abs().max(f64::MIN_POSITIVE);
            (((tq - total).abs().max((tp - total).abs())) / scale, None)
        }
    };
    Ok(CheckResult::new(name, value, tol, detail))
}

/// Max defect of `sn²+cn²=1`, `dn²+m·sn²=1` and `sn(u+4K)=sn(u)` on a 10×10
/// `(u, m)` lattice.
pub fn elliptic_identity_defect() -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let m = 0.095 * i as f64;
        let modulus = elliptic::Modulus::new(m)?;
        for j in 0..10 {
            let u = -4.0 + 0.9 * j as f64;
            let (s, c, d) = modulus.jacobi(u)?;
            let (s4, _, _) = modulus.jacobi(u + modulus.period())?;
            worst = worst
                .max((s * s + c * c - 1.0).abs())
                .max((d * d + m * s * s - 1.0).abs())
                .max((s4 - s).abs());
        }
    }
    Ok(worst)
}

/// Gaussian probe `exp(−q² − p²)` on a 257×257 periodic grid.
pub fn gaussian_probe(_params: &StarParams) -> Result<(PhaseSpaceGrid, Field)> {
    let grid = PhaseSpaceGrid::periodic((-8.0, 8.0), (-8.0, 8.0), 257, 257)?;
    let f = Field::sample_real(&grid, |q, p| (-q * q - p * p).exp())?;
    Ok((grid, f))
}

/// Max interior deviation between `moyal_star(q^i p^j, q^k p^l)` and the
/// symmetric Bopp composition, over all monomial pairs with total degree
/// `i + j + k + l ≤ 4`, at series order 4.
pub fn moyal_bopp_defect(hbar: f64, mass: f64) -> Result<f64> {
    let params = StarParams::new(hbar, mass, 4)?;
    let grid = PhaseSpaceGrid::clamped((-1.0, 1.0), (-1.0, 1.0), 33, 33)?;
    let mono = |i: i32, j: i32| Field::sample_real(&grid, move |q, p| q.powi(i) * p.powi(j));
    let mut worst = 0.0_f64;
    for da in 0..=4usize {
        for i in 0..=da {
            let a = mono(i as i32, (da - i) as i32)?;
            for db in 0..=(4 - da) {
                for k in 0..=db {
                    let b = mono(k as i32, (db - k) as i32)?;
                    let star = moyal_star(&a, &b, &params)?;
                    let bopp = bopp_monomial(i, da - i, &b, &params)?;
                    worst = worst.max(star.sub(&bopp)?.interior_linf(INTERIOR_MARGIN));
                }
            }
        }
    }
    Ok(worst)
}

/// p = 0 line l2 residual of the solution shape `A sn(kq|m)` with the
/// coefficient-matched `(A², E)`, and the printed/matched energy ratio.
pub fn matched_residual(
    n: u32,
    length: f64,
    m: f64,
    g: f64,
    params: StarParams,
    nonlinearity: Nonlinearity,
) -> Result<(f64, f64)> {
    let sol = build_solution(n, length, m, g, params)?;
    let cm = coefficient_match(m, sol.k(), g, &params)?;
    let amp = cm.a2_matched.sqrt();
    let k = sol.k();
    let grid = PhaseSpaceGrid::clamped((0.0, length), (-0.5 * k, 0.5 * k), 2049, 9)?;
    let psi = Field::sample_real(&grid, |q, p| {
        amp * elliptic::sn((k * k - p * p).sqrt() * q, m).unwrap_or(f64::NAN)
    })?;
    let res = gp_residual(&psi, cm.e_matched, g, &params, nonlinearity)?;
    let v = res.l2_p0_slice.ok_or_else(|| Error::Domain("grid has no p = 0 line".into()))?;
    Ok((v, cm.e_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("moyal-gp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn solve_rejects_zero_n() {
        let (code, _, err) = run_args(&["solve", "--n", "0", "--L", "1", "--m", "0.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("n must be ≥ 1"), "{err}");
    }

    #[test]
    fn solve_rejects_bad_m() {
        let (code, _, err) = run_args(&["solve", "--m", "1.2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("m"), "{err}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, _) = run_args(&["solve", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn limit_rejects_wide_m() {
        let (code, _, err) = run_args(&["limit", "--m", "0.2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("0.2"));
    }

    #[test]
    fn verify_single_check_with_zero_tolerance_fails() {
        let (code, out, _) = run_args(&["verify", "--check", "k-series", "--tol-all", "0"]);
        assert_eq!(code, EXIT_VERIFY_FAILED, "{out}");
        assert!(out.starts_with("k-series: fail ("));
    }
}
