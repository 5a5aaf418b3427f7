//! The building blocks of both iterations: a Dirichlet solve on the left
//! subdomain, its interface flux, and a Neumann solve on the right fed with
//! that flux. With ν = 1 and α = 1/3 the continuum answers are coth(1/3) for
//! the flux and −tanh(2/3)·coth(1/3) for the right interface value.

use ddcontrol::model::{Decomposition, GridFunction, Mesh, Problem};
use ddcontrol::subdomain::{solve_subdomain, variational_flux, InterfaceBc, Side, Trace};

fn main() -> ddcontrol::Result<()> {
    let alpha: f64 = 1.0 / 3.0;
    let flux_exact = 1.0 / alpha.tanh();
    let value_exact = -(1.0 - alpha).tanh() / alpha.tanh();
    println!("    N        flux error   interface value error");
    for n in [30, 60, 120, 240, 480] {
        let mesh = Mesh::line(n)?;
        let problem = Problem::new(mesh, 1.0)?;
        let d = Decomposition::from_alpha(&mesh, alpha)?;
        let rhs = GridFunction::zeros(mesh);
        let left = solve_subdomain(&problem, &d, Side::Left, &InterfaceBc::dirichlet(Trace::new(vec![1.0])), &rhs)?;
        let g = variational_flux(&problem, &d, Side::Left, &left, &rhs)?;
        // the right subdomain's outward normal points the other way
        let right = solve_subdomain(&problem, &d, Side::Right, &InterfaceBc::neumann(g.scaled(-1.0)), &rhs)?;
        println!(
            "{n:>5}      {:.4e}     {:.4e}",
            (g[0] - flux_exact).abs(),
            (right.interface_trace()[0] - value_exact).abs()
        );
    }
    Ok(())
}
