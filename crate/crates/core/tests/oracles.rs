//! Independent oracles: closed-form continuum solutions, dense reference
//! solves built directly from the finite-difference stencil, and agreement
//! between the reduced single-frequency line iteration and the square.

use std::f64::consts::PI;

use ddcontrol::dn::{dn_step, dn_step_2d, run_dn_2d, run_dn_mode};
use ddcontrol::iteration::{IterationConfig, TraceInit};
use ddcontrol::model::{
    cost, hminus1_norm_sq, solve_monolithic_h1, solve_monolithic_l2_kkt, solve_state, Decomposition, GridFunction,
    Mesh, Problem, Regularization, Target,
};
use ddcontrol::nn::{nn_step, run_nn_2d, run_nn_mode};
use ddcontrol::subdomain::{solve_subdomain, variational_flux, InterfaceBc, Side, Trace};
use ddcontrol::theory::{FactorQuery, Frequency, Method, Symbol};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TANH_2_3_COTH_1_3: f64 = 1.812_627_859_854_444_6;
const COTH_1_3: f64 = 3.110_296_679_619_443_7;
const HALF_PI_SQ: f64 = 4.934_802_200_544_679_3;

fn assert_order_two(coarse: f64, fine: f64, tol: f64) {
    let factor = coarse / fine;
    assert!((factor - 4.0).abs() <= 4.0 * tol, "error ratio {factor} (coarse {coarse:e}, fine {fine:e})");
}

fn zero_rhs(mesh: Mesh) -> GridFunction {
    GridFunction::zeros(mesh)
}

#[test]
fn manufactured_solution_is_second_order() {
    for (mesh_of, exact) in [
        (Mesh::line as fn(usize) -> ddcontrol::Result<Mesh>, (|x: f64, _: f64| (PI * x).sin()) as fn(f64, f64) -> f64),
        (Mesh::square, |x: f64, y: f64| (PI * x).sin() * (PI * y).sin()),
    ] {
        let err = |n: usize| {
            let mesh = mesh_of(n).unwrap();
            let p = Problem::new(mesh, 1.0).unwrap().with_target_family(Target::Manufactured).unwrap();
            let y = solve_monolithic_h1(&p).unwrap();
            y.sub(&GridFunction::from_fn(mesh, exact)).unwrap().sup_norm()
        };
        assert_order_two(err(16), err(32), 0.1);
    }
}

fn left_dirichlet_unit(n: usize) -> (Problem, Decomposition, ddcontrol::subdomain::SubdomainSolution) {
    let mesh = Mesh::line(n).unwrap();
    let p = Problem::new(mesh, 1.0).unwrap();
    let d = Decomposition::from_alpha(&mesh, 1.0 / 3.0).unwrap();
    let sol = solve_subdomain(&p, &d, Side::Left, &InterfaceBc::dirichlet(Trace::new(vec![1.0])), &zero_rhs(mesh)).unwrap();
    (p, d, sol)
}

#[test]
fn dirichlet_solve_matches_sinh_profile() {
    let err = |n: usize| {
        let (p, d, sol) = left_dirichlet_unit(n);
        let h = p.mesh().h();
        let alpha: f64 = 1.0 / 3.0;
        (0..=d.interface_index())
            .map(|i| (sol.at(i, 0) - (i as f64 * h).sinh() / alpha.sinh()).abs())
            .fold(0.0, f64::max)
    };
    assert_order_two(err(60), err(120), 0.15);
}

#[test]
fn interface_flux_tends_to_coth() {
    let err = |n: usize| {
        let (p, d, sol) = left_dirichlet_unit(n);
        let g = variational_flux(&p, &d, Side::Left, &sol, &zero_rhs(*p.mesh())).unwrap();
        (g[0] - COTH_1_3).abs()
    };
    let (e1, e2) = (err(60), err(120));
    assert!(e2 < 1e-4);
    assert_order_two(e1, e2, 0.15);
}

#[test]
fn neumann_solve_with_passed_flux_tends_to_closed_form() {
    for n in [150, 300] {
        let (p, d, sol) = left_dirichlet_unit(n);
        let rhs = zero_rhs(*p.mesh());
        let g = variational_flux(&p, &d, Side::Left, &sol, &rhs).unwrap();
        let right = solve_subdomain(&p, &d, Side::Right, &InterfaceBc::neumann(g.scaled(-1.0)), &rhs).unwrap();
        let v = right.interface_trace()[0];
        assert!((v + TANH_2_3_COTH_1_3).abs() < 2.0 / (n * n) as f64 * 10.0, "N={n}: {v}");
    }
}

#[test]
fn monolithic_fluxes_cancel_on_the_square() {
    let mesh = Mesh::square(24).unwrap();
    let p = Problem::new(mesh, 0.3).unwrap().with_target_family(Target::Bump).unwrap();
    let d = Decomposition::new(&mesh, 10).unwrap();
    let y = solve_monolithic_h1(&p).unwrap();
    let t = Trace::from_grid(&y, &d);
    let mut sum = Trace::zeros(&mesh);
    for side in [Side::Left, Side::Right] {
        let sol = solve_subdomain(&p, &d, side, &InterfaceBc::dirichlet(t.clone()), p.target()).unwrap();
        sum = sum.axpy(1.0, &variational_flux(&p, &d, side, &sol, p.target()).unwrap());
    }
    assert!(sum.sup_norm() <= 1e-12, "{}", sum.sup_norm());
}

#[test]
fn energy_norm_of_sine_control() {
    let err = |n: usize| {
        let mesh = Mesh::line(n).unwrap();
        let p = Problem::new(mesh, 1.0).unwrap();
        let u = GridFunction::from_fn(mesh, |x, _| PI * PI * (PI * x).sin());
        (hminus1_norm_sq(&p, &u).unwrap() - HALF_PI_SQ).abs()
    };
    assert_order_two(err(32), err(64), 0.1);
}

#[test]
fn l2_kkt_solution_minimizes_the_discrete_cost() {
    let mesh = Mesh::line(64).unwrap();
    let p = Problem::new(mesh, 0.01).unwrap().with_target_family(Target::Bump).unwrap();
    let opt = solve_monolithic_l2_kkt(&p).unwrap();
    let j_star = cost(&p, &opt.state, &opt.control, Regularization::L2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut u = opt.control.clone();
        let scale = rng.gen_range(1e-4..1.0);
        for j in 1..64 {
            u.values_mut()[j] += scale * rng.gen_range(-1.0..1.0);
        }
        let y = solve_state(&p, &u).unwrap();
        let j = cost(&p, &y, &u, Regularization::L2).unwrap();
        assert!(j >= j_star - 1e-12, "{j} < {j_star}");
    }
}

/// DN sweep on the line built from the stencil with a dense LU solve.
fn dense_dn_sweep(nu: f64, n: usize, m: usize, theta: f64, t: f64) -> f64 {
    let h = 1.0 / n as f64;
    let (a, c) = (2.0 * nu / (h * h) + 1.0, -nu / (h * h));
    // Ω₁: unknowns at nodes 1..m-1, u_m = t
    let k = m - 1;
    let mut a1 = DMatrix::zeros(k, k);
    let mut b1 = DVector::zeros(k);
    for r in 0..k {
        a1[(r, r)] = a;
        if r > 0 {
            a1[(r, r - 1)] = c;
        }
        if r + 1 < k {
            a1[(r, r + 1)] = c;
        }
    }
    b1[k - 1] = -c * t;
    let u1 = a1.lu().solve(&b1).unwrap();
    // left half of row m, times h: outward flux of Ω₁
    let g = nu / h * (t - u1[k - 1]) + 0.5 * h * t;
    // Ω₂: unknowns at nodes m..N-1, first row is the right half row
    let k2 = n - m;
    let mut a2 = DMatrix::zeros(k2, k2);
    let mut b2 = DVector::zeros(k2);
    for r in 0..k2 {
        a2[(r, r)] = a;
        if r > 0 {
            a2[(r, r - 1)] = c;
        }
        if r + 1 < k2 {
            a2[(r, r + 1)] = c;
        }
    }
    a2[(0, 0)] = nu / h + 0.5 * h;
    a2[(0, 1)] = -nu / h;
    b2[0] = -g;
    let u2 = a2.lu().solve(&b2).unwrap();
    (1.0 - theta) * t + theta * u2[0]
}

#[test]
fn dn_sweep_matches_dense_stencil_and_discrete_symbol() {
    for (nu, n, m, theta) in [(1.0, 30, 10, 0.5), (0.01, 40, 25, 0.7), (25.0, 20, 4, 1.0)] {
        let mesh = Mesh::line(n).unwrap();
        let p = Problem::new(mesh, nu).unwrap();
        let d = Decomposition::new(&mesh, m).unwrap();
        let step = dn_step(&p, &d, &Trace::new(vec![1.0]), &IterationConfig::new(theta), &zero_rhs(mesh)).unwrap();
        let dense = dense_dn_sweep(nu, n, m, theta, 1.0);
        let symbol = FactorQuery::new(Method::Dn, nu, m as f64 / n as f64, theta)
            .unwrap()
            .with_symbol(Symbol::Discrete { n_cells: n })
            .multiplier();
        assert!((step.trace[0] - dense).abs() < 1e-12, "{} vs {dense}", step.trace[0]);
        assert!((dense - symbol).abs() < 1e-11 * dense.abs().max(1.0), "{dense} vs {symbol}");
    }
}

/// Columns of the interface iteration matrix, one sweep per unit trace.
fn interface_matrix(method: Method, n: usize, m: usize, theta: f64) -> DMatrix<f64> {
    let mesh = Mesh::square(n).unwrap();
    let p = Problem::new(mesh, 1.0).unwrap();
    let d = Decomposition::new(&mesh, m).unwrap();
    let c = IterationConfig::new(theta);
    let len = n - 1;
    let mut t = DMatrix::zeros(len, len);
    for j in 0..len {
        let mut e = vec![0.0; len];
        e[j] = 1.0;
        let col = match method {
            Method::Dn => dn_step_2d(&p, &d, &Trace::new(e), &c, &zero_rhs(mesh)).unwrap().trace,
            Method::Nn => nn_step(&p, &d, &Trace::new(e), &c, &zero_rhs(mesh)).unwrap().trace,
        };
        for i in 0..len {
            t[(i, j)] = col[i];
        }
    }
    t
}

#[test]
fn interface_spectrum_equals_discrete_symbol() {
    let (n, m) = (16, 5);
    for (method, theta) in [(Method::Dn, 0.4), (Method::Nn, 0.23)] {
        let t = interface_matrix(method, n, m, theta);
        assert!((&t - t.transpose()).amax() < 1e-12);
        let mut eig: Vec<f64> = t.symmetric_eigen().eigenvalues.iter().copied().collect();
        let mut sym: Vec<f64> = (1..n)
            .map(|k| {
                FactorQuery::new(method, 1.0, m as f64 / n as f64, theta)
                    .unwrap()
                    .at(Frequency::Mode(k))
                    .with_symbol(Symbol::Discrete { n_cells: n })
                    .multiplier()
            })
            .collect();
        eig.sort_by(f64::total_cmp);
        sym.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(&sym) {
            assert!((a - b).abs() < 1e-11, "{method}: {a} vs {b}");
        }
    }
}

#[test]
fn sine_modes_are_eigenvectors_of_the_sweep() {
    let (n, m) = (16, 5);
    let mesh = Mesh::square(n).unwrap();
    for method in [Method::Dn, Method::Nn] {
        let t = interface_matrix(method, n, m, 0.3);
        for k in 1..n {
            let s = DVector::from_vec(Trace::sine_mode(&mesh, k).values().to_vec());
            let ts = &t * &s;
            let mu = ts.dot(&s) / s.dot(&s);
            let off_mode = (&ts - &s * mu).amax();
            assert!(off_mode < 1e-12, "{method} k={k}: {off_mode}");
        }
    }
}

#[test]
fn reduced_line_iteration_reproduces_the_square() {
    let (n, m) = (24, 8);
    let mesh = Mesh::square(n).unwrap();
    let p = Problem::new(mesh, 1.0).unwrap();
    let d = Decomposition::new(&mesh, m).unwrap();
    for k in [1, 3] {
        let c = IterationConfig::new(0.3).with_tol(1e-300).with_max_iter(8);
        let square_dn = run_dn_2d(&p, &d, &c.clone().with_trace0(TraceInit::SineMode(k))).unwrap();
        let line_dn = run_dn_mode(1.0, n, m, k, &c).unwrap();
        let square_nn = run_nn_2d(&p, &d, &c.clone().with_trace0(TraceInit::SineMode(k))).unwrap();
        let line_nn = run_nn_mode(1.0, n, m, k, &c).unwrap();
        // sin(kπx₂) peaks at exactly 1 on this grid, so sup norms compare directly
        for (sq, ln) in [(&square_dn, &line_dn), (&square_nn, &line_nn)] {
            for (a, b) in sq.trace_errors().iter().zip(ln.trace_errors()) {
                assert!((a - b).abs() <= 1e-10 * b.max(1e-300), "k={k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn mode_initializer_stays_in_its_mode() {
    let (n, m, k) = (32, 11, 2);
    let mesh = Mesh::square(n).unwrap();
    let p = Problem::new(mesh, 0.5).unwrap();
    let d = Decomposition::new(&mesh, m).unwrap();
    let c = IterationConfig::new(0.414);
    let basis: Vec<Vec<f64>> = (1..n).map(|q| Trace::sine_mode(&mesh, q).values().to_vec()).collect();
    let mut t = Trace::sine_mode(&mesh, k);
    for _ in 0..6 {
        t = dn_step_2d(&p, &d, &t, &c, &zero_rhs(mesh)).unwrap().trace;
        let norm = t.sup_norm();
        for (q, s) in basis.iter().enumerate() {
            if q + 1 == k {
                continue;
            }
            // discrete sine transform coefficient (basis vectors have squared norm n/2)
            let coeff: f64 = t.values().iter().zip(s).map(|(a, b)| a * b).sum::<f64>() * 2.0 / n as f64;
            assert!(coeff.abs() <= 1e-10 * norm.max(1e-300) + 1e-300, "mode {} leaked {coeff:e}", q + 1);
        }
    }
}

#[test]
fn nn_step_reproduces_the_closed_form_profiles() {
    let alpha: f64 = 1.0 / 3.0;
    let beta = 1.0 - alpha;
    let c = 1.0 / alpha.tanh() + 1.0 / beta.tanh();
    let err = |n: usize| {
        let mesh = Mesh::line(n).unwrap();
        let p = Problem::new(mesh, 1.0).unwrap();
        let d = Decomposition::from_alpha(&mesh, alpha).unwrap();
        let step = nn_step(&p, &d, &Trace::new(vec![1.0]), &IterationConfig::new(0.5), &zero_rhs(mesh)).unwrap();
        let h = mesh.h();
        let mut e: f64 = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let (e_j, psi_j, side) = if i <= d.interface_index() {
                (x.sinh() / alpha.sinh(), c * x.sinh() / alpha.cosh(), 0)
            } else {
                ((1.0 - x).sinh() / beta.sinh(), c * (1.0 - x).sinh() / beta.cosh(), 1)
            };
            e = e.max((step.dirichlet[side].at(i, 0) - e_j).abs());
            e = e.max((step.corrections[side].at(i, 0) - psi_j).abs());
        }
        e
    };
    assert_order_two(err(60), err(120), 0.15);
}
