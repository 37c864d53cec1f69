//! K(m) and sn/cn/dn over a few parameters.

use moyal_gp::elliptic::{complete_k, complete_k_series, Modulus};

fn main() -> moyal_gp::Result<()> {
    println!("{:>6} {:>20} {:>12}", "m", "K(m)", "agm-series");
    for m in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let k = complete_k(m)?;
        println!("{m:>6} {k:>20.15} {:>12.2e}", k - complete_k_series(m)?);
    }

    let md = Modulus::new(0.5)?;
    println!("\nm = 0.5, 4K = {:.12}", md.period());
    println!("{:>8} {:>12} {:>12} {:>12}", "u", "sn", "cn", "dn");
    for i in 0..=8 {
        let u = i as f64 * md.k_complete() / 2.0;
        let (s, c, d) = md.jacobi(u)?;
        println!("{u:>8.4} {s:>12.8} {c:>12.8} {d:>12.8}");
    }
    Ok(())
}
