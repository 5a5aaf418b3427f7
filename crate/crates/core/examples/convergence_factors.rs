//! Convergence factor against the x₂ frequency k on the unit square at
//! ν = 1, α = 1/3, and the equioscillating relaxation parameters.

use ddcontrol::theory::{self, Frequency, Method, Symbol};

fn main() {
    for method in [Method::Dn, Method::Nn] {
        let eq = theory::theta_star_2d(method, 1.0, 1.0 / 3.0);
        println!(
            "{method}: theta* = {:.6}, sup rho = {:.6} (k = 0: {:.6}, k -> inf: {:.6})",
            eq.theta_star, eq.sup_rho, eq.rho_at_zero, eq.rho_at_limit
        );
        let thetas = match method {
            Method::Dn => [0.3, 0.5, eq.theta_star],
            Method::Nn => [0.1, 0.2, eq.theta_star],
        };
        println!("   k   {}", thetas.map(|t| format!("theta={t:<10.4}")).join(""));
        for k in (0..=40).step_by(4) {
            let row: Vec<String> = thetas
                .iter()
                .map(|&t| format!("{:<16.6}", theory::rho_2d(method, 1.0, 1.0 / 3.0, t, Frequency::Mode(k), Symbol::Continuum)))
                .collect();
            println!("{k:>4}   {}", row.join(""));
        }
        println!();
    }
}
