use ddcontrol::dn::run_dn;
use ddcontrol::iteration::IterationConfig;
use ddcontrol::model::{h1_residual, Decomposition, Dim, GridFunction, Mesh, Problem};
use ddcontrol::nn::run_nn;
use ddcontrol::theory::{self, Frequency, Method, Symbol};
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Dn), Just(Method::Nn)]
}

fn rho_1d(method: Method, nu: f64, alpha: f64, theta: f64) -> f64 {
    match method {
        Method::Dn => theory::rho_dn_1d(nu, alpha, theta),
        Method::Nn => theory::rho_nn_1d(nu, alpha, theta),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn h1_operator_is_positive_definite(
        nu in prop::sample::select(vec![1e-6, 1.0, 1e6]),
        two_d in any::<bool>(),
        n in 4usize..14,
        seed in prop::collection::vec(-1.0f64..1.0, 15 * 15),
    ) {
        let mesh = Mesh::new(if two_d { Dim::Two } else { Dim::One }, n).unwrap();
        let p = Problem::new(mesh, nu).unwrap();
        let mut v = GridFunction::zeros(mesh);
        let ny = mesh.column_len();
        for k in 0..mesh.num_nodes() {
            if !mesh.is_boundary(k / ny, k % ny) {
                v.values_mut()[k] = seed[k % seed.len()] + 1e-3;
            }
        }
        let energy = v.inner(&h1_residual(&p, &v).unwrap());
        prop_assert!(energy > 0.0);
    }

    #[test]
    fn trace_maps_have_modulus_rho(nu in log_uniform(1e-6, 1e6), alpha in 0.05f64..0.95, theta in 0.0f64..1.5) {
        prop_assert!((theory::dn_trace_map(nu, alpha, theta).abs() - theory::rho_dn_1d(nu, alpha, theta)).abs() < 1e-15);
        prop_assert!((theory::nn_trace_map(nu, alpha, theta).abs() - theory::rho_nn_1d(nu, alpha, theta)).abs() < 1e-15);
    }

    #[test]
    fn relaxation_window_is_zero_to_twice_optimum(
        m in method(),
        nu in log_uniform(1e-4, 1e4),
        alpha in 0.05f64..0.95,
        frac in 0.001f64..0.999,
    ) {
        let star = theory::theta_star(m, nu, alpha, Frequency::Mode(0), Symbol::Continuum);
        prop_assert!(rho_1d(m, nu, alpha, 2.0 * star * frac) < 1.0);
        prop_assert!((rho_1d(m, nu, alpha, 2.0 * star) - 1.0).abs() <= 1e-12);
        prop_assert!(rho_1d(m, nu, alpha, star) <= 1e-14);
    }

    #[test]
    fn symmetric_split_is_independent_of_nu(nu in log_uniform(1e-8, 1e8), theta in 0.0f64..1.0) {
        prop_assert!((theory::rho_dn_1d(nu, 0.5, theta) - (1.0 - 2.0 * theta).abs()).abs() <= 1e-12);
        prop_assert!((theory::rho_nn_1d(nu, 0.5, theta) - (1.0 - 4.0 * theta).abs()).abs() <= 1e-12);
    }

    #[test]
    fn bracket_is_monotone_in_frequency(m in method(), nu in log_uniform(1e-6, 1e6), alpha in 0.05f64..0.95) {
        let b: Vec<f64> = (0..200)
            .map(|k| theory::bracket(m, nu, alpha, Frequency::Mode(k), Symbol::Continuum))
            .chain(std::iter::once(m.limit_bracket()))
            .collect();
        let increasing = b.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let decreasing = b.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        prop_assert!(increasing || decreasing);
        let theta = 0.8 * theory::theta_star_2d(m, nu, alpha).theta_star;
        prop_assert!(theory::sup_rho_2d(m, nu, alpha, theta, 200, Symbol::Continuum).endpoint_dominated);
    }

    #[test]
    fn factors_stay_finite_at_extreme_nu(
        m in method(),
        nu in prop::sample::select(vec![1e-300, 1e300]),
        alpha in 0.01f64..0.99,
        theta in 0.0f64..2.0,
        k in 0usize..2000,
    ) {
        prop_assert!(rho_1d(m, nu, alpha, theta).is_finite());
        prop_assert!(theory::rho_2d(m, nu, alpha, theta, Frequency::Mode(k), Symbol::Continuum).is_finite());
        let discrete = Symbol::Discrete { n_cells: 1000 };
        prop_assert!(theory::rho_2d(m, nu, alpha, theta, Frequency::Mode(k), discrete).is_finite());
        prop_assert!(theory::theta_star(m, nu, alpha, Frequency::Mode(k), Symbol::Continuum).is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn error_iteration_has_constant_ratio(
        m in method(),
        nu in log_uniform(1e-3, 1e3),
        n in 12usize..80,
        frac in 0.2f64..0.8,
        theta in 0.05f64..0.6,
    ) {
        let mesh = Mesh::line(n).unwrap();
        let idx = ((frac * n as f64).round() as usize).clamp(2, n - 2);
        let p = Problem::new(mesh, nu).unwrap();
        let d = Decomposition::new(&mesh, idx).unwrap();
        let c = IterationConfig::new(theta).with_tol(1e-300).with_max_iter(5);
        let r = match m {
            Method::Dn => run_dn(&p, &d, &c).unwrap(),
            Method::Nn => run_nn(&p, &d, &c).unwrap(),
        };
        let ratios = r.ratios();
        for w in ratios.windows(2) {
            prop_assert!((w[1] - w[0]).abs() <= 1e-12 * w[0].max(1.0));
        }
        let discrete = Symbol::Discrete { n_cells: n };
        let symbol = theory::rho_2d(m, nu, d.alpha(), theta, Frequency::Mode(0), discrete);
        prop_assert!((ratios[0] - symbol).abs() <= 1e-11 * symbol.max(1.0));
    }
}

#[test]
fn dn_at_unit_relaxation_converges_iff_interface_right_of_centre() {
    for nu in [0.01, 1.0, 100.0] {
        for i in 1..=9 {
            let alpha = i as f64 / 10.0;
            let converges = theory::rho_dn_1d(nu, alpha, 1.0) < 1.0;
            assert_eq!(converges, alpha > 0.5, "nu={nu}, alpha={alpha}");
        }
    }
}

#[test]
fn symmetric_square_converges_in_two_steps() {
    for nu in [1e-4, 1.0, 1e4] {
        for m in [Method::Dn, Method::Nn] {
            let e = theory::theta_star_2d(m, nu, 0.5);
            assert!(e.sup_rho <= 1e-14, "{m}, nu={nu}: {}", e.sup_rho);
        }
    }
}
