//! L² versus energy-norm regularization for the same target x(1−x).
//!
//! The L² problem needs the coupled state/adjoint system; the energy-norm
//! problem collapses to one elliptic solve. The two optimal controls differ.

use ddcontrol::model::{
    cost, recover_control_h1, solve_monolithic_h1, solve_monolithic_l2_kkt, Mesh, Problem, Regularization, Target,
};

fn main() -> ddcontrol::Result<()> {
    let mesh = Mesh::line(256)?;
    for nu in [1.0, 1e-2, 1e-4] {
        let problem = Problem::new(mesh, nu)?.with_target_family(Target::Bump)?;
        let l2 = solve_monolithic_l2_kkt(&problem)?;
        let y = solve_monolithic_h1(&problem)?;
        let u = recover_control_h1(&problem, &y)?;
        println!(
            "nu = {nu:>6}: J_L2 = {:.6e}  J_H-1 = {:.6e}  |u_L2 - u_H-1| = {:.4e}  u(1/2): {:.5} vs {:.5}",
            cost(&problem, &l2.state, &l2.control, Regularization::L2)?,
            cost(&problem, &y, &u, Regularization::HMinus1)?,
            u.sub(&l2.control)?.l2_norm(),
            l2.control.at(128, 0),
            u.at(128, 0),
        );
    }
    Ok(())
}
