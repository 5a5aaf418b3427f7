//! Parameter sweep through the library API: DN and NN on the line with
//! ν = h², a singularly perturbed regime, over several meshes and
//! relaxation parameters. Rows come back in cross-product order.

use ddcontrol::cli::{parse_args, sweep};

fn main() -> ddcontrol::Result<()> {
    let spec = parse_args(["ddcontrol", "sweep", "--nu", "h2", "--N", "40,80,160", "--alpha", "0.25", "--theta", "0.2,0.4,optimal"])?;
    println!("{:>10} {:>6} {:>8} {:>4} {:>10} {:>10} {:>10}", "nu", "alpha", "theta", "", "verdict", "measured", "predicted");
    for row in sweep(&spec)? {
        println!(
            "{:>10.3e} {:>6.3} {:>8.5} {:>4} {:>10} {:>10} {:>10.3e}",
            row.nu,
            row.alpha,
            row.theta,
            row.method.to_string(),
            row.verdict.to_string(),
            row.measured_rate.map_or("-".into(), |r| format!("{r:.3e}")),
            row.predicted_rate
        );
    }
    Ok(())
}
