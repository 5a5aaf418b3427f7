use crate::assembly::{Contribution, Region, Scaling};
use crate::error::{Error, Result};
use crate::linalg::GeneralBand;
use crate::model::monolithic::relative_residual;
use crate::model::{Dim, GridFunction, Problem};

/// State, adjoint and control of the L²-regularized optimality system.
#[derive(Debug, Clone)]
pub struct L2Solution {
    pub state: GridFunction,
    pub adjoint: GridFunction,
    pub control: GridFunction,
}

/// Solves the coupled 1D system −div(κ∇y) = u, −div(κ∇p) = y − ŷ,
/// p + νu = 0 by banded elimination of the 2(N−1) unknowns (y, p/ν).
pub fn solve_monolithic_l2_kkt(problem: &Problem) -> Result<L2Solution> {
    let mesh = *problem.mesh();
    if mesh.dim() != Dim::One {
        return Err(Error::UnsupportedDimension {
            dim: 2,
            what: "L² optimality system",
        });
    }
    let nu = problem.nu();
    let n = mesh.n_cells();
    let interior = n - 1;
    let region = Region::whole(mesh);
    // unknowns interleaved as (y_1, q_1, y_2, q_2, ...), q = p/ν, so that
    //   K y + M q = 0
    //   M y − ν K q = M ŷ
    // is symmetric with half-bandwidth 2.
    let y_of = |node: usize| 2 * (node - 1);
    let q_of = |node: usize| 2 * (node - 1) + 1;
    let free = |node: usize| node >= 1 && node <= interior;
    let mut band = GeneralBand::zeros(2 * interior, 2, 2);
    region.for_each_contribution(problem, |c| match c {
        Contribution::Link(a, b, g) => {
            for (r, c, v) in [(a, a, g), (b, b, g), (a, b, -g), (b, a, -g)] {
                if free(r) && free(c) {
                    band.add(y_of(r), y_of(c), v);
                    band.add(q_of(r), q_of(c), -nu * v);
                }
            }
        }
        Contribution::Mass(a, w) => {
            if free(a) {
                band.add(y_of(a), q_of(a), w);
                band.add(q_of(a), y_of(a), w);
            }
        }
    });
    let mass = region.lumped_mass(problem);
    let mut rhs = vec![0.0; 2 * interior];
    for node in 1..=interior {
        rhs[q_of(node)] = mass[node] * problem.target().values()[node];
    }
    band.lu()?.solve_in_place(&mut rhs);

    let mut y = vec![0.0; n + 1];
    let mut p = vec![0.0; n + 1];
    let mut u = vec![0.0; n + 1];
    for node in 1..=interior {
        let q = rhs[q_of(node)];
        y[node] = rhs[y_of(node)];
        p[node] = nu * q;
        u[node] = -q;
    }
    Ok(L2Solution {
        state: GridFunction::from_values(mesh, y)?,
        adjoint: GridFunction::from_values(mesh, p)?,
        control: GridFunction::from_values(mesh, u)?,
    })
}

/// Largest componentwise relative residual over the state row, the adjoint
/// row and the algebraic coupling p + νu = 0.
pub fn kkt_residual(problem: &Problem, sol: &L2Solution) -> Result<f64> {
    sol.state.same_mesh(problem.target())?;
    let state = relative_residual(problem, Scaling::state(), sol.state.values(), sol.control.values());
    let misfit = sol.state.sub(problem.target())?;
    let adjoint = relative_residual(problem, Scaling::state(), sol.adjoint.values(), misfit.values());
    let nu = problem.nu();
    let coupling = sol
        .adjoint
        .values()
        .iter()
        .zip(sol.control.values())
        .map(|(p, u)| (p + nu * u).abs() / (p.abs() + (nu * u).abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(state.max(adjoint).max(coupling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mesh, Target};

    #[test]
    fn rejects_2d() {
        let p = Problem::new(Mesh::square(6).unwrap(), 1.0).unwrap();
        assert!(matches!(
            solve_monolithic_l2_kkt(&p),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn zero_target_zero_triple() {
        let p = Problem::new(Mesh::line(32).unwrap(), 1.0).unwrap();
        let s = solve_monolithic_l2_kkt(&p).unwrap();
        assert_eq!(s.state.sup_norm(), 0.0);
        assert_eq!(s.adjoint.sup_norm(), 0.0);
        assert_eq!(s.control.sup_norm(), 0.0);
    }

    #[test]
    fn control_is_scaled_adjoint() {
        let p = Problem::new(Mesh::line(40).unwrap(), 0.25)
            .unwrap()
            .with_target_family(Target::Bump)
            .unwrap();
        let s = solve_monolithic_l2_kkt(&p).unwrap();
        for (pv, uv) in s.adjoint.values().iter().zip(s.control.values()) {
            assert_eq!(*uv, -pv / 0.25);
        }
        assert!(kkt_residual(&p, &s).unwrap() <= 1e-10);
    }
}
