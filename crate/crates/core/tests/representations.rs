use proptest::prelude::*;
use sdre_core::benchmarks::{InvertedPendulum, Lorenz, LorenzParams, PendulumParams};
use sdre_core::model::{Coefficients, ControlProblem, RepresentationFamily, Vector};

fn lorenz_family() -> RepresentationFamily<Lorenz> {
    RepresentationFamily::generate_full(Lorenz::new(LorenzParams::default()).unwrap(), &[-1.0, 1.0]).unwrap()
}

fn pendulum_family() -> RepresentationFamily<InvertedPendulum> {
    RepresentationFamily::generate_full(InvertedPendulum::new(PendulumParams::default()).unwrap(), &[-1.0, 1.0])
        .unwrap()
}

fn consistency_error<P: ControlProblem>(fam: &RepresentationFamily<P>, x: &[f64], alpha: &[f64]) -> f64 {
    let x = Vector::from_column_slice(x);
    let alpha = Coefficients::new(alpha.to_vec()).unwrap();
    let lhs = fam.combine(&alpha, &x).unwrap() * &x;
    let rhs = fam.problem().drift(&x);
    (lhs - &rhs).norm() / rhs.norm().max(1.0)
}

#[test]
fn family_sizes() {
    assert_eq!(lorenz_family().len(), 18);
    assert_eq!(pendulum_family().len(), 48);
    // |c_set| scales the count linearly
    let three = RepresentationFamily::generate_full(Lorenz::new(LorenzParams::default()).unwrap(), &[-1.0, 0.5, 2.0]);
    assert_eq!(three.unwrap().len(), 27);
}

#[test]
fn every_member_reproduces_the_drift() {
    let fam = pendulum_family();
    let x = Vector::from_vec(vec![0.3, -0.7, 1.1, 0.4]);
    let f = fam.problem().drift(&x);
    for i in 0..fam.len() {
        let m = fam.member_rep(i, &x).unwrap();
        assert!((m * &x - &f).norm() <= 1e-12 * f.norm().max(1.0), "member {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lorenz_combinations_reproduce_drift(
        x in prop::collection::vec(-10.0..10.0f64, 3),
        alpha in prop::collection::vec(-5.0..5.0f64, 18),
    ) {
        let fam = lorenz_family();
        prop_assert!(consistency_error(&fam, &x, &alpha) <= 1e-12);
    }

    #[test]
    fn pendulum_combinations_reproduce_drift(
        x in prop::collection::vec(-3.0..3.0f64, 4),
        alpha in prop::collection::vec(-5.0..5.0f64, 48),
    ) {
        let fam = pendulum_family();
        prop_assert!(consistency_error(&fam, &x, &alpha) <= 1e-12);
    }
}
