use geophase::numerics::{find_root, integrate, unwrap, QuadratureSpec, RootSpec};
use proptest::prelude::*;

proptest! {
    #[test]
    fn integration_is_linear(
        alpha in -3.0..3.0f64, beta in -3.0..3.0f64,
        w in 0.1..4.0f64, c in -1.0..1.0f64, b in 0.5..3.0f64,
    ) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (w * x).sin() + c;
        let g = |x: f64| (c * x).exp() / (1.0 + x * x);
        let lhs = integrate(|x| alpha * f(x) + beta * g(x), 0.0, b, &spec).unwrap();
        let rhs = alpha * integrate(f, 0.0, b, &spec).unwrap() + beta * integrate(g, 0.0, b, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn root_independent_of_bracket(root in -2.0..2.0f64, l1 in 0.01..3.0f64, h1 in 0.01..3.0f64, l2 in 0.01..3.0f64, h2 in 0.01..3.0f64) {
        let f = |x: f64| (x - root).powi(3) + 0.5 * (x - root);
        let a = find_root(f, &RootSpec::new(root - l1, root + h1)).unwrap();
        let b = find_root(f, &RootSpec::new(root - l2, root + h2)).unwrap();
        prop_assert!((a - b).abs() <= 2e-10);
    }

    #[test]
    fn unwrap_is_idempotent(steps in prop::collection::vec(-3.0..3.0f64, 1..200), start in -10.0..10.0f64) {
        let mut acc = start;
        let raw: Vec<f64> = steps.iter().map(|s| { acc += s; acc.sin().atan2(acc.cos()) }).collect();
        let once = unwrap(&raw).unwrap();
        let twice = unwrap(&once).unwrap();
        prop_assert!(once.iter().zip(&twice).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
