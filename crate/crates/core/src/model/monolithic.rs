use crate::assembly::{Contribution, Region, Scaling};
use crate::error::{Error, Result};
use crate::model::{GridFunction, Problem};

/// Solves −ν·div(κ∇y) + y = ŷ with y = 0 on the boundary by direct
/// elimination (tridiagonal in 1D, band Cholesky in 2D).
pub fn solve_monolithic_h1(problem: &Problem) -> Result<GridFunction> {
    solve_whole(problem, Scaling::h1(problem.nu()), problem.target())
}

/// Solves the state equation −div(κ∇y) = u with y = 0 on the boundary.
pub fn solve_state(problem: &Problem, control: &GridFunction) -> Result<GridFunction> {
    solve_whole(problem, Scaling::state(), control)
}

fn solve_whole(problem: &Problem, scale: Scaling, source: &GridFunction) -> Result<GridFunction> {
    source.same_mesh(problem.target())?;
    if !source.is_finite() {
        return Err(Error::NonFinite { what: "right-hand side" });
    }
    let region = Region::whole(*problem.mesh());
    let factored = region.factor(problem, scale)?;
    let zeros = vec![0.0; region.num_local()];
    let values = region.solve(problem, scale, &factored, &zeros, source.values(), &zeros);
    GridFunction::from_values(*problem.mesh(), values)
}

/// Discrete −div(κ∇y) at interior nodes (zero on the boundary), in the same
/// pointwise scaling as the finite-difference stencil.
pub fn neg_div_kappa_grad(problem: &Problem, y: &GridFunction) -> Result<GridFunction> {
    y.same_mesh(problem.target())?;
    let region = Region::whole(*problem.mesh());
    let ky = region.apply(problem, Scaling::state(), y.values());
    let mass = region.lumped_mass(problem);
    pointwise_interior(problem, ky, &mass)
}

/// Pointwise residual of −ν·div(κ∇y) + y − ŷ at interior nodes.
pub fn h1_residual(problem: &Problem, y: &GridFunction) -> Result<GridFunction> {
    y.same_mesh(problem.target())?;
    let region = Region::whole(*problem.mesh());
    let mut r = region.apply(problem, Scaling::h1(problem.nu()), y.values());
    let mass = region.lumped_mass(problem);
    for (k, v) in r.iter_mut().enumerate() {
        *v -= mass[k] * problem.target().values()[k];
    }
    pointwise_interior(problem, r, &mass)
}

fn pointwise_interior(problem: &Problem, mut scaled: Vec<f64>, mass: &[f64]) -> Result<GridFunction> {
    let mesh = *problem.mesh();
    let ny = mesh.column_len();
    for (k, v) in scaled.iter_mut().enumerate() {
        if mesh.is_boundary(k / ny, k % ny) {
            *v = 0.0;
        } else {
            *v /= mass[k];
        }
    }
    GridFunction::from_values(mesh, scaled)
}

/// Componentwise relative residual of `scale·(K, M) u = M·source` over the
/// interior rows: `max |r_i| / max (Σ_j |a_ij u_j| + |b_i|)`.
pub(crate) fn relative_residual(problem: &Problem, scale: Scaling, u: &[f64], source: &[f64]) -> f64 {
    let mesh = *problem.mesh();
    let region = Region::whole(mesh);
    let au = region.apply(problem, scale, u);
    let mut magnitude = vec![0.0; u.len()];
    region.for_each_contribution(problem, |c| match c {
        Contribution::Link(a, b, g) => {
            let t = scale.stiffness * g * (u[a].abs() + u[b].abs());
            magnitude[a] += t;
            magnitude[b] += t;
        }
        Contribution::Mass(a, w) => {
            magnitude[a] += (scale.reaction * w * u[a]).abs() + (w * source[a]).abs()
        }
    });
    let mass = region.lumped_mass(problem);
    let ny = mesh.column_len();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for k in 0..u.len() {
        if mesh.is_boundary(k / ny, k % ny) {
            continue;
        }
        num = num.max((au[k] - mass[k] * source[k]).abs());
        den = den.max(magnitude[k]);
    }
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mesh, Target};

    #[test]
    fn zero_target_gives_zero_state() {
        for mesh in [Mesh::line(16).unwrap(), Mesh::square(8).unwrap()] {
            let p = Problem::new(mesh, 0.3).unwrap();
            let y = solve_monolithic_h1(&p).unwrap();
            assert_eq!(y.sup_norm(), 0.0);
        }
    }

    #[test]
    fn residual_below_round_off() {
        for nu in [1e-6, 1.0, 1e6] {
            for mesh in [Mesh::line(64).unwrap(), Mesh::square(24).unwrap()] {
                let p = Problem::new(mesh, nu)
                    .unwrap()
                    .with_kappa_fn(|x, y| 1.0 + 0.5 * (x - y).abs())
                    .unwrap()
                    .with_target_family(Target::Bump)
                    .unwrap();
                let y = solve_monolithic_h1(&p).unwrap();
                let rel = relative_residual(&p, Scaling::h1(nu), y.values(), p.target().values());
                assert!(rel <= 1e-12, "nu={nu} rel={rel}");
            }
        }
    }

    #[test]
    fn state_solve_inverts_negative_divergence() {
        let mesh = Mesh::line(20).unwrap();
        let p = Problem::new(mesh, 1.0).unwrap().with_kappa_fn(|x, _| 2.0 + x).unwrap();
        let u = GridFunction::from_fn(mesh, |x, _| (3.0 * x).cos());
        let y = solve_state(&p, &u).unwrap();
        let back = neg_div_kappa_grad(&p, &y).unwrap();
        for i in 1..20 {
            assert!((back.at(i, 0) - u.at(i, 0)).abs() < 1e-10);
        }
    }
}
