//! Dirichlet-Neumann error decay on the line at ν = 1, α = 1/3 for several
//! relaxation parameters, including the optimal one, which finishes in two
//! sweeps. Also shows the orientation effect at θ = 1.

use ddcontrol::dn::run_dn;
use ddcontrol::iteration::IterationConfig;
use ddcontrol::model::{Decomposition, Mesh, Problem};
use ddcontrol::theory;

fn main() -> ddcontrol::Result<()> {
    let mesh = Mesh::line(300)?;
    let problem = Problem::new(mesh, 1.0)?;
    let d = Decomposition::new(&mesh, 100)?;
    let star = theory::theta_star_dn_1d(1.0, d.alpha());

    let thetas = [0.3, 0.5, 0.7, star];
    let reports: Vec<_> = thetas
        .iter()
        .map(|&t| run_dn(&problem, &d, &IterationConfig::new(t).with_max_iter(15)))
        .collect::<Result<_, _>>()?;
    print!("iter");
    for t in thetas {
        print!("   theta={t:<8.5}");
    }
    println!();
    for n in 1..=15 {
        print!("{n:>4}");
        for r in &reports {
            match r.trace_err_at(n) {
                Some(e) => print!("   {e:<14.4e}"),
                None => print!("   {:<14}", ""),
            }
        }
        println!();
    }
    for (t, r) in thetas.iter().zip(&reports) {
        println!(
            "theta = {t:.5}: {} after {} iterations, predicted factor {:.5}",
            r.verdict,
            r.iterations(),
            theory::rho_dn_1d(1.0, d.alpha(), *t)
        );
    }

    for (label, d) in [("interface at 1/3", d), ("interface at 2/3", d.mirrored())] {
        let r = run_dn(&problem, &d, &IterationConfig::new(1.0))?;
        println!("theta = 1, {label}: {} with rate {:.5}", r.verdict, r.measured_rate.unwrap_or(f64::NAN));
    }
    Ok(())
}
