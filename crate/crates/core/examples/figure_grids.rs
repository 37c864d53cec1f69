//! Plot-ready Wigner grids for n = 100, 200, 300 via the `wigner`
//! subcommand. Output goes to `figure_grids/n<N>/` under the given
//! directory (default: the system temp dir).

use std::path::PathBuf;

use moyal_gp::cli;
use moyal_gp::gp_model::limit_scale_m;

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
        .join("figure_grids");
    for n in [100u32, 200, 300] {
        let out = root.join(format!("n{n}"));
        let args = [
            "moyal-gp".to_string(),
            "wigner".into(),
            "--n".into(),
            n.to_string(),
            "--m".into(),
            format!("{:e}", limit_scale_m(n)),
            "--nq".into(),
            "257".into(),
            "--np".into(),
            "129".into(),
            "--out".into(),
            out.display().to_string(),
        ];
        let mut report = Vec::new();
        let code = cli::run(args, &mut report, &mut std::io::stderr());
        println!("n = {n}: exit {code}, grid in {}", out.display());
    }
}
