use num_complex::Complex64;

use super::*;
use crate::field::Point;

fn square() -> DomainSpec {
    DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 21, 21).unwrap()
}

fn prob(nu: f64) -> RiccatiProblem {
    RiccatiProblem::constant(nu, &square()).unwrap()
}

fn cf(s: &str) -> ComplexField {
    ComplexField::parse(s, &square()).unwrap()
}

fn sf(s: &str) -> ScalarField {
    ScalarField::parse(s, &square()).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn riccati_residual_examples() {
    assert_eq!(prob(1.0).riccati_residual_max(&cf("1/2")).unwrap(), 0.0);
    assert!(prob(1.0).riccati_residual_max(&cf("0.3 - 0.4*i")).unwrap() < 1e-15);
    let r = prob(0.0).riccati_residual(&cf("1/2")).unwrap();
    assert_eq!(r.evaluate(Point { x: 0.2, y: -0.3 }).unwrap(), c(0.25, 0.0));
}

#[test]
fn schrodinger_residual_examples() {
    assert!(prob(1.0).schrodinger_residual_max(&sf("exp(x)")).unwrap() < 1e-15);
    assert_eq!(
        prob(0.0)
            .schrodinger_residual_max(&sf("x^2 - y^2"))
            .unwrap(),
        0.0
    );
    let r = prob(0.0).schrodinger_residual(&sf("exp(x)")).unwrap();
    let p = Point { x: 0.5, y: 0.1 };
    assert!((r.evaluate(p).unwrap() + 0.5f64.exp()).abs() < 1e-15);
}

#[test]
fn log_derivative_examples() {
    let p = prob(1.0);
    let q = p.log_derivative(&sf("exp(x)")).unwrap();
    assert!(q.add_const(c(-0.5, 0.0)).max_modulus(0).unwrap() < 1e-15);
    let q = p.log_derivative(&sf("1")).unwrap();
    assert_eq!(q.max_modulus(0).unwrap(), 0.0);

    let d = DomainSpec::new(1.5, 2.5, -0.4, 0.4, 11, 9).unwrap();
    let u = ScalarField::parse("x^2 - y^2", &d).unwrap();
    let q = RiccatiProblem::constant(0.0, &d)
        .unwrap()
        .log_derivative(&u)
        .unwrap();
    let want = ComplexField::parse("(x + i*y)/(x^2 - y^2)", &d).unwrap();
    assert!(q.sub(&want).unwrap().max_modulus(0).unwrap() < 1e-14);

    match p.log_derivative(&sf("x")) {
        Err(Error::Vanishing { at, .. }) => assert_eq!(at.x, 0.0),
        other => panic!("expected zero-set error, got {other:?}"),
    }
}

#[test]
fn exp_reconstruct_examples() {
    let p = prob(1.0);
    let u = p.exp_reconstruct(&cf("0")).unwrap();
    assert_eq!(u.max_abs(0).unwrap(), 1.0);
    let u = p.exp_reconstruct(&cf("1/2")).unwrap();
    assert!(u.sub(&sf("exp(x)")).unwrap().max_abs(0).unwrap() < 1e-14);
    let u = p.exp_reconstruct(&cf("0.3 - 0.4*i")).unwrap();
    assert!(
        u.sub(&sf("exp(0.6*x + 0.8*y)"))
            .unwrap()
            .max_abs(0)
            .unwrap()
            < 1e-14
    );
    assert!(p.schrodinger_residual_max(&u).unwrap() < 1e-14);
}

#[test]
fn exp_reconstruct_inverts_log_derivative_for_nonconstant_q() {
    let p = prob(2.0);
    let u = sf("exp(x)*cosh(y)");
    let q = p.log_derivative(&u).unwrap();
    assert!(p.riccati_residual_max(&q).unwrap() < 1e-13);
    let back = p.exp_reconstruct(&q).unwrap();
    for pt in square().nodes().step_by(7) {
        let want = u.evaluate(pt).unwrap();
        assert!(((back.evaluate(pt).unwrap() - want) / want).abs() < 1e-9);
    }
}

#[test]
fn factorization_examples() {
    let p = prob(1.0);
    let phi = sf("x^2");
    let f = p.factorization_apply(&cf("1/2"), &phi).unwrap();
    let want = ComplexField::from_real(sf("(2 - x^2)/4"));
    for side in [&f.lhs, &f.rhs1, &f.rhs2] {
        assert!(side.sub(&want).unwrap().max_modulus(0).unwrap() < 1e-14);
    }

    let p0 = prob(0.0);
    let phi = sf("sin(x)*cosh(y) + x*y^3");
    let f = p0.factorization_apply(&cf("0"), &phi).unwrap();
    let (g1, g2) = f.gaps().unwrap();
    assert!(g1 < 1e-13 && g2 < 1e-13);

    // perturbed Q: the gap is the Riccati residual times φ
    let q = cf("0.6");
    let f = p.factorization_apply(&q, &sf("x^2")).unwrap();
    let gap = f.lhs.sub(&f.rhs1).unwrap();
    let res = p
        .riccati_residual(&q)
        .unwrap()
        .mul_real(&sf("x^2"))
        .unwrap();
    assert!(gap.sub(&res).unwrap().max_modulus(0).unwrap() < 1e-14);
    assert!(f.gaps().unwrap().0 > 1e-3);
}

#[test]
fn vekua_residual_examples() {
    let p = prob(1.0);
    let r = p.vekua_residual(&cf("exp(x)"), &sf("exp(x)")).unwrap();
    assert!(r.max_modulus(0).unwrap() < 1e-15);
    let r = p.vekua_residual(&cf("conj(z)"), &sf("1")).unwrap();
    assert_eq!(r.evaluate(Point { x: 0.3, y: 0.4 }).unwrap(), c(1.0, 0.0));
    assert!(matches!(
        p.vekua_residual(&cf("1"), &sf("x")),
        Err(Error::Vanishing { .. })
    ));
}

#[test]
fn darboux_examples() {
    let p = prob(1.0);
    let f = sf("exp(x)");
    let v = p.darboux_v_from_u(&f, &f).unwrap();
    assert_eq!(v.max_abs(0).unwrap(), 0.0);

    let u = sf("exp(0.6*x + 0.8*y)");
    let v = p.darboux_v_from_u(&u, &f).unwrap();
    let want = sf("-0.5*exp(0.6*x + 0.8*y) + 0.5*exp(-x)");
    for pt in square().nodes().step_by(5) {
        assert!((v.evaluate(pt).unwrap() - want.evaluate(pt).unwrap()).abs() < 1e-10);
    }
    let spot = -0.5 * 0.6f64.exp() + 0.5 * (-1.0f64).exp();
    assert!((v.evaluate(Point { x: 1.0, y: 0.0 }).unwrap() - spot).abs() < 1e-12);

    let eta = p.darboux_potential_eta(&f).unwrap();
    assert!(eta.add_const(-1.0).max_abs(0).unwrap() < 1e-14);
    let on_eta = RiccatiProblem::new(eta).unwrap();
    assert!(on_eta.schrodinger_residual_max(&v).unwrap() < 1e-8);

    let p0 = prob(0.0);
    let one = sf("1");
    let v = p0.darboux_v_from_u(&sf("x"), &one).unwrap();
    assert!(v.sub(&sf("y")).unwrap().max_abs(0).unwrap() < 1e-14);
    let u = p0.darboux_u_from_v(&sf("y"), &one).unwrap();
    assert!(u.sub(&sf("x")).unwrap().max_abs(0).unwrap() < 1e-14);
    let u = p0.darboux_u_from_v(&sf("0"), &one).unwrap();
    assert_eq!(u.max_abs(0).unwrap(), 0.0);
}

#[test]
fn darboux_round_trip_up_to_multiple_of_f() {
    let p = prob(1.0);
    let f = sf("exp(x)");
    let u = sf("exp(0.6*x + 0.8*y)");
    let v = p.darboux_v_from_u(&u, &f).unwrap();
    let back = p.darboux_u_from_v(&v, &f).unwrap();
    let base = p.cfg.base;
    let alpha =
        (back.evaluate(base).unwrap() - u.evaluate(base).unwrap()) / f.evaluate(base).unwrap();
    assert!((alpha + 1.0).abs() < 1e-12);
    let fixed = back.sub(&f.scale(alpha)).unwrap();
    let d = DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 9, 9).unwrap();
    for pt in d.nodes() {
        assert!((fixed.evaluate(pt).unwrap() - u.evaluate(pt).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn eta_examples() {
    let p0 = prob(0.0);
    assert_eq!(
        p0.darboux_potential_eta(&sf("3"))
            .unwrap()
            .max_abs(0)
            .unwrap(),
        0.0
    );
    let eta = prob(1.0)
        .darboux_potential_eta(&sf("exp(0.6*x + 0.8*y)"))
        .unwrap();
    assert!(eta.add_const(-1.0).max_abs(0).unwrap() < 1e-14);
}

#[test]
fn euler_first_examples() {
    let p = prob(1.0);
    let q0 = cf("1/2");
    let w = p.euler_first_w_from_q(&q0, &q0).unwrap();
    assert_eq!(w.im().max_abs(0).unwrap(), 0.0);
    assert!(w.re().sub(&sf("exp(x)")).unwrap().max_abs(0).unwrap() < 1e-14);

    let q = cf("0.3 - 0.4*i");
    let w = p.euler_first_w_from_q(&q, &q0).unwrap();
    let want = cf("exp(0.6*x + 0.8*y) + i*(-0.5*exp(0.6*x + 0.8*y) + 0.5*exp(-x))");
    let coarse = DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 7, 7).unwrap();
    for pt in coarse.nodes() {
        assert!((w.evaluate(pt).unwrap() - want.evaluate(pt).unwrap()).norm() < 1e-10);
    }
    let f = sf("exp(x)");
    let r = p.vekua_residual(&w, &f).unwrap();
    assert!(
        r.max_modulus_at(&coarse.nodes().collect::<Vec<_>>())
            .unwrap()
            < 1e-8
    );
    let back = p.euler_first_q_from_w(&w).unwrap();
    assert!(back.sub(&q).unwrap().max_modulus(0).unwrap() < 1e-12);

    let w = p.euler_first_w_from_q(&q, &q0).unwrap();
    let eta = RiccatiProblem::new(p.darboux_potential_eta(&f).unwrap()).unwrap();
    let pts: Vec<Point> = coarse.nodes().collect();
    assert!(
        p.schrodinger_residual(w.re())
            .unwrap()
            .max_abs_at(&pts)
            .unwrap()
            < 1e-10
    );
    assert!(
        eta.schrodinger_residual(w.im())
            .unwrap()
            .max_abs_at(&pts)
            .unwrap()
            < 1e-8
    );
}

#[test]
fn euler_first_harmonic_reduction_is_analytic() {
    let d = DomainSpec::new(1.5, 2.5, -0.4, 0.4, 9, 9).unwrap();
    let p = RiccatiProblem::constant(0.0, &d).unwrap();
    let u = ScalarField::parse("x^2 - y^2", &d).unwrap();
    let q = p.log_derivative(&u).unwrap();
    let q0 = ComplexField::constant(Complex64::new(0.0, 0.0), &d);
    let w = p.euler_first_w_from_q(&q, &q0).unwrap();
    assert!(w.d_zbar().unwrap().max_modulus(0).unwrap() < 1e-8);
}

#[test]
fn euler_first_rejects_non_solutions() {
    let p = prob(1.0);
    let err = p.euler_first_w_from_q(&cf("0.7"), &cf("1/2")).unwrap_err();
    assert!(matches!(err, Error::NotASolution { ref what, .. } if what == "Q"));
    let err = p.euler_first_w_from_q(&cf("1/2"), &cf("0.2")).unwrap_err();
    assert!(matches!(err, Error::NotASolution { ref what, .. } if what == "Q0"));
}

#[test]
fn conjugate_pair_solves_vekua() {
    let p = prob(1.0);
    let pair = ConjugatePair::from_u(sf("exp(0.6*x + 0.8*y)"), sf("exp(x)"), &p).unwrap();
    let coarse = DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 5, 5).unwrap();
    let w = pair.w().unwrap().on_domain(&coarse).unwrap();
    let f = pair.f.on_domain(&coarse).unwrap();
    let pc = RiccatiProblem::constant(1.0, &coarse).unwrap();
    assert!(pc.vekua_residual(&w, &f).unwrap().max_modulus(0).unwrap() < 1e-9);
}

#[test]
fn grid_backed_riccati_residual_is_second_order() {
    let mut d = DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 21, 21).unwrap();
    let mut errs = Vec::new();
    for _ in 0..3 {
        let p = RiccatiProblem::constant(2.0, &d).unwrap();
        let u = ScalarField::parse("exp(x)*cosh(y)", &d)
            .unwrap()
            .to_grid()
            .unwrap();
        let q = p.log_derivative(&u).unwrap();
        errs.push(p.riccati_residual_max(&q).unwrap());
        assert!(p.require_riccati(&q, "Q").is_ok());
        d = d.refined();
    }
    for w in errs.windows(2) {
        let r = w[0] / w[1];
        assert!((3.0..=5.0).contains(&r), "{errs:?}");
    }
}
