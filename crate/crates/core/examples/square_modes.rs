//! Each x₂ sine mode of the interface error contracts at its own rate on the
//! square. Measured rates agree with the discrete factor to round-off and
//! with the continuum factor to O(h²).

use ddcontrol::dn::{run_dn_2d, run_dn_mode};
use ddcontrol::iteration::{IterationConfig, TraceInit};
use ddcontrol::model::{Decomposition, Mesh, Problem};
use ddcontrol::nn::{run_nn_2d, run_nn_mode};
use ddcontrol::theory::{self, Frequency, Method, Symbol};

fn main() -> ddcontrol::Result<()> {
    let (n, m) = (96, 32);
    let mesh = Mesh::square(n)?;
    let problem = Problem::new(mesh, 1.0)?;
    let d = Decomposition::new(&mesh, m)?;
    for (method, theta) in [(Method::Dn, 0.414), (Method::Nn, 0.239)] {
        println!("{method}, theta = {theta}");
        for k in [0, 1, 2, 3, 5, 10] {
            let config = IterationConfig::new(theta).with_tol(1e-300).with_max_iter(6);
            // the k = 0 mode is invisible on the grid, so it is run on its reduced line
            let report = match (method, k) {
                (Method::Dn, 0) => run_dn_mode(1.0, n, m, 0, &config)?,
                (Method::Nn, 0) => run_nn_mode(1.0, n, m, 0, &config)?,
                (Method::Dn, _) => run_dn_2d(&problem, &d, &config.with_trace0(TraceInit::SineMode(k)))?,
                (Method::Nn, _) => run_nn_2d(&problem, &d, &config.with_trace0(TraceInit::SineMode(k)))?,
            };
            let measured = report.measured_rate.unwrap_or(f64::NAN);
            let discrete = theory::rho_2d(method, 1.0, d.alpha(), theta, Frequency::Mode(k), Symbol::Discrete { n_cells: n });
            let continuum = theory::rho_2d(method, 1.0, d.alpha(), theta, Frequency::Mode(k), Symbol::Continuum);
            println!("  k = {k:>2}: measured {measured:.8}  discrete {discrete:.8}  continuum {continuum:.8}");
        }
    }
    Ok(())
}
