//! Small-m scan of the energy against the particle-in-a-box expansion.

use moyal_gp::gp_model::{box_limit_scan, limit_scale_m};

fn main() -> moyal_gp::Result<()> {
    let ms: Vec<f64> = (0..8).map(|i| 1e-2 / 2f64.powi(i)).collect();
    let rows = box_limit_scan(1, 1.0, &ms)?;
    println!("{:>12} {:>18} {:>14} {:>8}", "m", "E", "gap", "ratio");
    for (i, r) in rows.iter().enumerate() {
        let ratio = if i > 0 { rows[i - 1].gap / r.gap } else { f64::NAN };
        println!("{:>12.4e} {:>18.12} {:>14.4e} {:>8.4}", r.m, r.energy, r.gap, ratio);
    }
    for n in [100, 200, 300] {
        let m = limit_scale_m(n);
        let row = box_limit_scan(n, 1.0, &[m])?[0];
        println!("n = {n}: m = {m:.4e}, relative gap {:.3e}, flagged {}", row.relative_gap, row.at_limit_scale);
    }
    Ok(())
}
