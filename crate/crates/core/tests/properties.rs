use armijo_core::bounds::{
    admissible_step_tilde_eta, asymptotic_equiv, eia_complexity_bound_symbolic, h_eval, h_threshold,
    memory_armijo_iteration_bound, BoundInputs,
};
use armijo_core::problems::{
    make_cosh_sum, make_double_well, make_nesterov_worst, make_quadratic, make_rosenbrock,
};
use armijo_core::verify::audit_finite_diff;
use armijo_core::{run, LineSearchConfig, OptimizerConfig, OptimizerKind, Point, Problem, RunSummary};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, dim)
}

fn zoo() -> Vec<Problem> {
    vec![
        make_quadratic(&[1.0, 4.0, 0.5]).unwrap(),
        make_cosh_sum(3).unwrap(),
        make_nesterov_worst(5).unwrap(),
        make_double_well().unwrap(),
        make_rosenbrock(2).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradients_match_central_differences(x in coords(5)) {
        for p in zoo() {
            let point = Point::new(x[..p.dim()].to_vec()).unwrap();
            let report = audit_finite_diff(&p, &[point]);
            prop_assert!(report.passed, "{}: {:?}", p.name(), report);
        }
    }

    #[test]
    fn double_well_has_no_stray_critical_points(x in -2.0f64..2.0) {
        prop_assume!([-1.0f64, 0.0, 1.0].iter().all(|c| (x - c).abs() > 1e-3));
        let p = make_double_well::<f64>().unwrap();
        prop_assert!(p.gradient(&Point::new(vec![x]).unwrap())[0].abs() > 0.0);
    }

    #[test]
    fn admissible_step_passes_armijo_on_cosh(x in coords(3), lambda in 0.05f64..0.95) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let p = make_cosh_sum::<f64>(3).unwrap();
        let theta = Point::new(x).unwrap();
        let g = p.gradient(&theta);
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let b = BoundInputs { lambda, ..BoundInputs::new(1.0, 1.0, 1.0, 1e-3) };
        let eta = admissible_step_tilde_eta(gn, &b).unwrap();
        let next = theta.step(eta, &g).unwrap();
        let lhs = p.value(&next) - p.value(&theta);
        prop_assert!(lhs <= -lambda * eta * gn * gn + 1e-12 * (1.0 + p.value(&theta)));
    }

    #[test]
    fn iteration_bound_inverts(l0 in 0.1f64..10.0, l1 in 0.1f64..10.0, delta in 0.01f64..100.0,
                              eps in 1e-4f64..1.0, lambda in 0.05f64..0.95, f1 in 1.1f64..4.0) {
        let b = BoundInputs { lambda, f1, ..BoundInputs::new(l0, l1, delta, eps) };
        let n = memory_armijo_iteration_bound(&b).unwrap();
        let log = (l1 * (1.0 - lambda) * eps / (l0 + l1 * eps)).ln_1p();
        let recovered = n * eps * log;
        let expected = f1 * l1 * delta / lambda;
        prop_assert!((recovered - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn h_negative_at_threshold(a in 0.01f64..3.0, c in 0.01f64..3.0, t in 0.0f64..1.0) {
        let ac = a * c;
        prop_assume!(ac < 3.0);
        let b = ac + t * (3.0 - ac);
        prop_assume!(b > ac * (1.0 + 1e-9));
        let x = h_threshold(a, b, c).unwrap();
        prop_assert!(h_eval(a, b, c, x) < 0.0);
    }

    #[test]
    fn armijo_runs_strictly_decrease(x in coords(3), eia in any::<bool>()) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-2));
        let p = make_cosh_sum::<f64>(3).unwrap();
        let kind = if eia { OptimizerKind::Eia } else { OptimizerKind::MemoryArmijo };
        let cfg = OptimizerConfig::armijo(LineSearchConfig { eps: 1e-6, ..LineSearchConfig::default() }, 1000);
        let t = run(kind, &p, &Point::new(x).unwrap(), &cfg).unwrap();
        for w in t.records.windows(2) {
            prop_assert!(w[1].r_value < w[0].r_value);
            prop_assert!(w[1].counters.func_evals >= w[0].counters.func_evals);
            prop_assert!(w[1].counters.grad_evals >= w[0].counters.grad_evals);
        }
    }

    #[test]
    fn summary_json_round_trips(x in coords(2), eps in 1e-8f64..1e-1) {
        let p = make_rosenbrock::<f64>(2).unwrap();
        let cfg = OptimizerConfig::armijo(LineSearchConfig { eps, ..LineSearchConfig::default() }, 50);
        let t = run(OptimizerKind::Eia, &p, &Point::new(x).unwrap(), &cfg).unwrap();
        let s = t.summary();
        let back: RunSummary = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn cosh_hessian_is_bounded_by_gradient() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = coords(4);
    for _ in 0..1000 {
        let x = strategy.new_tree(&mut runner).unwrap().current();
        let p = make_cosh_sum::<f64>(4).unwrap();
        let gn = p.gradient(&Point::new(x.clone()).unwrap()).iter().map(|v| v * v).sum::<f64>().sqrt();
        let hessian = x.iter().map(|v| v.cosh()).fold(0.0, f64::max);
        assert!(hessian <= 1.0 + gn + 1e-12, "x = {x:?}");
    }
}

#[test]
fn asymptotic_ratio_tends_to_one() {
    for (eps, tol) in [(1e-4f64, 1e-2), (1e-5, 1e-3)] {
        let b = BoundInputs::new(1.0, 1.0, 1.0, eps);
        let ratio = asymptotic_equiv(&b).unwrap() / memory_armijo_iteration_bound(&b).unwrap();
        assert!((ratio - 1.0).abs() <= tol, "eps {eps}: {ratio}");
    }
}

#[test]
fn eia_symbolic_bound_scales_inversely_with_eps() {
    let at = |eps: f64| eia_complexity_bound_symbolic(0.25, 2.0, eps, 0.5, 3, 0.7).unwrap();
    let ratio = at(1e-3) / at(1e-6);
    assert!((ratio - 1e-3).abs() <= 1e-15);
}
