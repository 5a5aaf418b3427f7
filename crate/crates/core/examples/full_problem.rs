//! Domain decomposition on a problem with data: the product bump target on
//! the square with a jump in κ across the interface. Both iterations converge
//! to the monolithic discrete solution.

use ddcontrol::dn::run_dn_2d;
use ddcontrol::iteration::IterationConfig;
use ddcontrol::model::{recover_control_h1, solve_monolithic_h1, Decomposition, Mesh, Problem, Target};
use ddcontrol::nn::run_nn_2d;
use ddcontrol::theory::{self, Method};

fn main() -> ddcontrol::Result<()> {
    let mesh = Mesh::square(64)?;
    let d = Decomposition::new(&mesh, 24)?;
    let alpha = d.alpha();
    let problem = Problem::new(mesh, 1e-2)?
        .with_target_family(Target::Bump)?
        .with_kappa_fn(|x, _| if x < alpha { 1.0 } else { 4.0 })?;
    let y = solve_monolithic_h1(&problem)?;
    let u = recover_control_h1(&problem, &y)?;
    println!("monolithic: |y|_inf = {:.6}, |u|_inf = {:.6}", y.sup_norm(), u.sup_norm());

    for method in [Method::Dn, Method::Nn] {
        // the optimum is computed for κ = 1, so it is only a good guess here
        let theta = theory::theta_star_2d(method, problem.nu(), alpha).theta_star;
        let config = IterationConfig::new(theta).with_tol(1e-12).with_max_iter(200);
        let r = match method {
            Method::Dn => run_dn_2d(&problem, &d, &config)?,
            Method::Nn => run_nn_2d(&problem, &d, &config)?,
        };
        println!(
            "{method} at theta = {theta:.4}: {} in {} iterations, |y_dd - y|_inf = {:.2e}",
            r.verdict,
            r.iterations(),
            r.solution.sub(&y)?.sup_norm()
        );
    }
    Ok(())
}
