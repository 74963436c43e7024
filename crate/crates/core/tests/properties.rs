use num_complex::Complex64;
use proptest::prelude::*;
use riccati2d::oracle::{exp_family, perturb, separable_family};
use riccati2d::quadrature::{
    line_integral_dz, op_abar, potential_along, AntiderivativeConfig, Compat, Contour,
};
use riccati2d::riccati::{RiccatiProblem, Tolerances};
use riccati2d::theorems::{
    cauchy_laplace_reductions, euler_second_baseline, picard_identity, LaplaceReduction, TestRegion,
};
use riccati2d::{ComplexField, DomainSpec, Point, ScalarField};

fn square() -> DomainSpec {
    DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 21, 21).unwrap()
}

fn wide() -> DomainSpec {
    DomainSpec::new(-1.5, 1.5, -1.5, 1.5, 31, 31).unwrap()
}

fn point() -> impl Strategy<Value = Point> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Point { x, y })
}

/// Constant Riccati solution `(√ν/2) e^{iφ}`.
fn on_circle(nu: f64, phi: f64, d: &DomainSpec) -> ComplexField {
    ComplexField::constant(Complex64::from_polar(nu.sqrt() / 2.0, phi), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exp_family_solves_both_equations(nu in 0.2f64..3.0, theta in -3.1f64..3.1, p in point()) {
        let d = square();
        let s = exp_family(nu, theta, &d).unwrap();
        let prob = s.problem().unwrap();
        let q = prob.log_derivative(&s.u).unwrap();
        prop_assert!((q.evaluate(p).unwrap() - s.q.evaluate(p).unwrap()).norm() < 1e-12);
        prop_assert!(prob.riccati_residual_max(&q).unwrap() < 1e-10);
        let back = prob.exp_reconstruct(&q).unwrap();
        let want = s.u.evaluate(p).unwrap() / s.u.evaluate(prob.cfg.base).unwrap();
        prop_assert!(((back.evaluate(p).unwrap() - want) / want).abs() < 1e-8);
    }

    #[test]
    fn separable_family_round_trips(nu1 in -1.2f64..3.0, nu2 in -1.2f64..3.0, p in point()) {
        let d = square();
        let s = separable_family(nu1, nu2, &d).unwrap();
        let prob = s.problem().unwrap();
        let q = prob.log_derivative(&s.u).unwrap();
        prop_assert!(prob.riccati_residual_max(&q).unwrap() < 1e-10);
        prop_assert!(prob.schrodinger_residual_max(&s.u).unwrap() < 1e-10);
        let back = prob.exp_reconstruct(&q).unwrap();
        let want = s.u.evaluate(p).unwrap() / s.u.evaluate(prob.cfg.base).unwrap();
        prop_assert!(((back.evaluate(p).unwrap() - want) / want).abs() < 1e-8);
    }

    #[test]
    fn factorization_gap_is_residual_times_phi(nu in 0.2f64..3.0, theta in -3.0f64..3.0, eps in 0.01f64..0.5, p in point()) {
        let d = square();
        let s = exp_family(nu, theta, &d).unwrap();
        let prob = s.problem().unwrap().with_tolerances(Tolerances { check_hypotheses: false, ..Tolerances::default() });
        let bad = perturb(&s, eps).unwrap().q;
        let phi = ScalarField::parse("sin(x)*cosh(y) + 2", &d).unwrap();
        let fac = prob.factorization_apply(&bad, &phi).unwrap();
        let gap = (fac.lhs.evaluate(p).unwrap() - fac.rhs1.evaluate(p).unwrap()).norm();
        let want = prob.riccati_residual(&bad).unwrap().evaluate(p).unwrap().norm() * phi.evaluate(p).unwrap().abs();
        prop_assert!((gap - want).abs() < 1e-10 * (1.0 + want), "{} vs {}", gap, want);
    }

    #[test]
    fn abar_inverts_dzbar_and_is_path_independent(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, p in point(), mid in point()) {
        let d = square();
        let g = ScalarField::parse(&format!("exp(({a})*x + ({b})*y)*sin(({c})*x*y + 1)"), &d).unwrap();
        let phi = ComplexField::from_real(g).d_zbar().unwrap();
        let cfg = AntiderivativeConfig::new(&d);
        let back = op_abar(&phi, &cfg).unwrap();
        let dz = back.wirtinger().d_zbar;
        prop_assert!((dz.evaluate(p).unwrap() - phi.evaluate(p).unwrap()).norm() < 1e-9);
        let via = potential_along(&phi, &[cfg.base, mid, p], Compat::Dzbar, &cfg).unwrap();
        prop_assert!((via - back.evaluate(p).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn analytic_integrands_vanish_on_circles(re in -2.0f64..2.0, im in -2.0f64..2.0, r in 0.2f64..1.0) {
        let d = square();
        let g = ComplexField::parse(&format!("exp(({re} + ({im})*i)*z) * z^2"), &d).unwrap();
        let c = Contour::circle(Point { x: 0.0, y: 0.0 }, r, 256).unwrap();
        prop_assert!(line_integral_dz(&g, &c).unwrap().norm() < 1e-10);
    }

    #[test]
    fn picard_holds_for_constant_quadruples(nu in 0.2f64..3.0, phis in prop::array::uniform4(0.0f64..6.2)) {
        let d = square();
        for i in 0..4 {
            for j in 0..i {
                prop_assume!((phis[i] - phis[j]).abs() > 0.05);
            }
        }
        let q: Vec<ComplexField> = phis.iter().map(|&f| on_circle(nu, f, &d)).collect();
        let prob = RiccatiProblem::constant(nu, &d).unwrap();
        let r = picard_identity([&q[0], &q[1], &q[2], &q[3]], &prob, None, None).unwrap();
        prop_assert!(r.residual < 1e-10, "{:?}", r);
    }

    #[test]
    fn first_euler_round_trip_and_darboux_halves(nu in 0.2f64..2.0, phi in 0.0f64..6.2, phi0 in 0.0f64..6.2, p in point()) {
        prop_assume!((phi - phi0).abs() > 0.05);
        let d = square();
        let prob = RiccatiProblem::constant(nu, &d).unwrap();
        let (q, q0) = (on_circle(nu, phi, &d), on_circle(nu, phi0, &d));
        let w = prob.euler_first_w_from_q(&q, &q0).unwrap();
        let back = prob.euler_first_q_from_w(&w).unwrap();
        prop_assert!((back.evaluate(p).unwrap() - q.evaluate(p).unwrap()).norm() < 1e-8);
        let f = riccati2d::quadrature::op_a(&q0, &prob.cfg.clone().with_constant(0.0)).unwrap().exp();
        let eta = RiccatiProblem::new(prob.darboux_potential_eta(&f).unwrap()).unwrap();
        prop_assert!(prob.schrodinger_residual(w.re()).unwrap().evaluate(p).unwrap().abs() < 1e-8);
        prop_assert!(eta.schrodinger_residual(w.im()).unwrap().evaluate(p).unwrap().abs() < 1e-8);
    }

    #[test]
    fn taylor_baseline_is_monotone(re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let d = square();
        let w = ComplexField::parse(&format!("2 + exp(({re} + ({im})*i)*z)"), &d).unwrap();
        let disk = TestRegion::Disk { center: Point { x: 0.0, y: 0.0 }, radius: 0.4 };
        let r = euler_second_baseline(&w, Point { x: 0.0, y: 0.0 }, 1.0, 6, &disk, None).unwrap();
        for pair in r.refinement.windows(2) {
            prop_assert!(pair[1].1 <= pair[0].1 || pair[1].1 < 1e-12, "{:?}", r.refinement);
        }
    }

    #[test]
    fn harmonic_polynomials_pass_the_gradient_reduction(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let d = wide();
        let u = ScalarField::parse(&format!("({a})*(x^3 - 3*x*y^2) + ({b})*(x^2 - y^2) + ({c})*x*y"), &d).unwrap();
        let circle = Contour::circle(Point { x: 0.0, y: 0.0 }, 1.0, 256).unwrap();
        let r = cauchy_laplace_reductions(&u, &circle, LaplaceReduction::Gradient, 1, None).unwrap();
        prop_assert!(r.residual < 1e-10, "{:?}", r);
    }
}
