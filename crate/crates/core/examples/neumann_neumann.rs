//! Neumann-Neumann error decay on the line at ν = 1, α = 1/3. Relaxation
//! beyond twice the optimum diverges; θ = 0.5 and 0.7 both lie there.

use ddcontrol::iteration::IterationConfig;
use ddcontrol::model::{Decomposition, Mesh, Problem};
use ddcontrol::nn::run_nn;
use ddcontrol::theory;

fn main() -> ddcontrol::Result<()> {
    let mesh = Mesh::line(300)?;
    let problem = Problem::new(mesh, 1.0)?;
    let d = Decomposition::new(&mesh, 100)?;
    let star = theory::theta_star_nn_1d(1.0, d.alpha());
    println!("theta* = {star:.6}, convergent for theta < {:.6}", 2.0 * star);

    for theta in [0.1, 0.2, star, 0.3, 0.5, 0.7] {
        let r = run_nn(&problem, &d, &IterationConfig::new(theta).with_max_iter(15))?;
        let errors: Vec<String> = r.trace_errors().iter().take(6).map(|e| format!("{e:.2e}")).collect();
        println!(
            "theta = {theta:.4}: {:<9} rate {:<8} predicted {:.5}  errors {}",
            r.verdict.to_string(),
            r.measured_rate.map_or("-".into(), |v| format!("{v:.5}")),
            theory::rho_nn_1d(1.0, d.alpha(), theta),
            errors.join(" ")
        );
    }
    Ok(())
}
