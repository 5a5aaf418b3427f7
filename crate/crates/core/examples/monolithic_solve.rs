//! Energy-regularized control on the line and the square: solve the reduced
//! state equation for a manufactured target and watch the error fall like h².

use std::f64::consts::PI;

use ddcontrol::model::{recover_control_h1, solve_monolithic_h1, GridFunction, Mesh, Problem, Target};

fn main() -> ddcontrol::Result<()> {
    println!("dim      N      max error   ratio");
    for (dim, sizes) in [(1, [32, 64, 128, 256]), (2, [16, 32, 64, 128])] {
        let mut previous: Option<f64> = None;
        for n in sizes {
            let mesh = if dim == 1 { Mesh::line(n)? } else { Mesh::square(n)? };
            let problem = Problem::new(mesh, 1.0)?.with_target_family(Target::Manufactured)?;
            let y = solve_monolithic_h1(&problem)?;
            let exact = GridFunction::from_fn(mesh, |x1, x2| {
                (PI * x1).sin() * if dim == 1 { 1.0 } else { (PI * x2).sin() }
            });
            let err = y.sub(&exact)?.sup_norm();
            let ratio = previous.map_or(String::new(), |p| format!("{:.3}", p / err));
            println!("{dim:>3} {n:>6}   {err:.4e}   {ratio}");
            previous = Some(err);
        }
    }

    let problem = Problem::new(Mesh::line(200)?, 1e-3)?.with_target_family(Target::Bump)?;
    let y = solve_monolithic_h1(&problem)?;
    let u = recover_control_h1(&problem, &y)?;
    println!("\nnu = 1e-3, bump target: |y|_inf = {:.6}, |u|_inf = {:.6}", y.sup_norm(), u.sup_norm());
    Ok(())
}
