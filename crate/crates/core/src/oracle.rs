//! Closed-form solution triples `(u, ν, Q)` used as ground truth, plus
//! constant perturbations of `Q` for negative controls.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{CExpr, Expr};
use crate::field::{ComplexField, DomainSpec, Point, ScalarField};
use crate::riccati::RiccatiProblem;

/// Residual bound every oracle must meet at construction.
pub const SELF_CHECK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicKind {
    /// `Re z^n`.
    Monomial,
    /// `Re (z − s)^n`.
    Translate,
}

/// Parameters identifying an oracle, as written in run configs.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OracleSpec {
    ExpFamily {
        nu: f64,
        theta: f64,
    },
    Separable {
        nu1: f64,
        nu2: f64,
    },
    Harmonic {
        kind: HarmonicKind,
        n: u32,
        shift: Point,
    },
}

#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub spec: OracleSpec,
    pub u: ScalarField,
    pub nu: ScalarField,
    pub q: ComplexField,
    /// Constant added to `Q` by [`perturb`]; zero for genuine solutions.
    pub epsilon: f64,
}

impl OracleSolution {
    pub fn problem(&self) -> Result<RiccatiProblem> {
        RiccatiProblem::new(self.nu.clone())
    }

    pub fn is_perturbed(&self) -> bool {
        self.epsilon != 0.0
    }

    pub fn domain(&self) -> &DomainSpec {
        self.u.domain()
    }

    /// Same solution on another description of the same rectangle.
    pub fn on_domain(&self, domain: &DomainSpec) -> Result<Self> {
        Ok(OracleSolution {
            spec: self.spec.clone(),
            u: self.u.on_domain(domain)?,
            nu: self.nu.on_domain(domain)?,
            q: self.q.on_domain(domain)?,
            epsilon: self.epsilon,
        })
    }

    fn self_check(self) -> Result<Self> {
        let prob = self.problem()?;
        let (at, value) = self.u.min_abs(0)?;
        if !(value > prob.tol.nonvanishing) {
            return Err(Error::Vanishing { at, value });
        }
        let scale = self.u.max_abs(0)?.max(1.0);
        let s = prob.schrodinger_residual_max(&self.u)? / scale;
        let r = prob.riccati_residual_max(&self.q)?;
        for (what, residual) in [("oracle u", s), ("oracle Q", r)] {
            if !(residual < SELF_CHECK_TOL) {
                return Err(Error::NotASolution {
                    what: format!("{what} ({})", self.spec),
                    residual,
                    tolerance: SELF_CHECK_TOL,
                });
            }
        }
        Ok(self)
    }
}

impl OracleSpec {
    pub fn build(&self, domain: &DomainSpec) -> Result<OracleSolution> {
        match *self {
            OracleSpec::ExpFamily { nu, theta } => exp_family(nu, theta, domain),
            OracleSpec::Separable { nu1, nu2 } => separable_family(nu1, nu2, domain),
            OracleSpec::Harmonic { kind, n, shift } => harmonic_family(kind, n, shift, domain),
        }
    }

    /// Parses `exp_family nu=1 theta=0.9`, `separable nu1=1 nu2=-1` or
    /// `harmonic kind=translate n=2 sx=-2 sy=0`. Returns the spec and an
    /// optional perturbation `eps=...`.
    pub fn parse(text: &str) -> Result<(OracleSpec, Option<f64>)> {
        let bad = |msg: String| Error::Parameter(format!("oracle `{text}`: {msg}"));
        let mut words = text.split_whitespace();
        let family = words
            .next()
            .ok_or_else(|| bad("empty oracle spec".into()))?;
        let mut params: Vec<(&str, &str)> = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{w}`")))?;
            params.push((k, v));
        }
        let mut used = vec![false; params.len()];
        let mut num = |key: &str, default: Option<f64>| -> Result<f64> {
            match params.iter().position(|(k, _)| *k == key) {
                Some(i) => {
                    used[i] = true;
                    params[i]
                        .1
                        .parse::<f64>()
                        .map_err(|_| bad(format!("`{key}` is not a number")))
                }
                None => default.ok_or_else(|| bad(format!("missing `{key}`"))),
            }
        };
        let spec = match family {
            "exp_family" | "exp" => OracleSpec::ExpFamily {
                nu: num("nu", None)?,
                theta: num("theta", Some(0.0))?,
            },
            "separable" | "separable_family" => OracleSpec::Separable {
                nu1: num("nu1", None)?,
                nu2: num("nu2", None)?,
            },
            "harmonic" | "harmonic_family" => {
                let n = num("n", None)?;
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(bad(format!("n must be a non-negative integer, got {n}")));
                }
                let shift = Point::new(num("sx", Some(0.0))?, num("sy", Some(0.0))?)?;
                let kind = if shift == (Point { x: 0.0, y: 0.0 }) {
                    HarmonicKind::Monomial
                } else {
                    HarmonicKind::Translate
                };
                OracleSpec::Harmonic {
                    kind,
                    n: n as u32,
                    shift,
                }
            }
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        let eps = match params.iter().position(|(k, _)| *k == "eps") {
            Some(_) => Some(num("eps", None)?),
            None => None,
        };
        if let Some(i) = used.iter().position(|u| !u) {
            if params[i].0 != "eps" {
                return Err(bad(format!("unknown parameter `{}`", params[i].0)));
            }
        }
        Ok((spec, eps))
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleSpec::ExpFamily { nu, theta } => write!(f, "exp_family nu={nu} theta={theta}"),
            OracleSpec::Separable { nu1, nu2 } => write!(f, "separable nu1={nu1} nu2={nu2}"),
            OracleSpec::Harmonic { n, shift, .. } => {
                write!(f, "harmonic n={n} sx={} sy={}", shift.x, shift.y)
            }
        }
    }
}

/// `u = exp(a x + b y)` with `(a, b) = √ν (cos θ, sin θ)`, `Q = (a − ib)/2`.
pub fn exp_family(nu: f64, theta: f64, domain: &DomainSpec) -> Result<OracleSolution> {
    if !(nu >= 0.0) || !theta.is_finite() {
        return Err(Error::Parameter(format!(
            "exp_family needs nu >= 0 and finite theta, got nu={nu}, theta={theta}"
        )));
    }
    let k = nu.sqrt();
    let (a, b) = (k * theta.cos(), k * theta.sin());
    let u = Expr::x().scale(a).add(&Expr::y().scale(b)).exp();
    OracleSolution {
        spec: OracleSpec::ExpFamily { nu, theta },
        u: ScalarField::from_expr(u, domain),
        nu: ScalarField::constant(nu, domain),
        q: ComplexField::constant(Complex64::new(a / 2.0, -b / 2.0), domain),
        epsilon: 0.0,
    }
    .self_check()
}

/// One factor `X(t)` with `X'' = λX` and its log-derivative `X'/X`.
fn separable_factor(lambda: f64, t: Expr, center: f64, half_width: f64) -> Result<(Expr, Expr)> {
    if lambda > 0.0 {
        let k = lambda.sqrt();
        Ok((t.scale(k).exp(), Expr::constant(k)))
    } else if lambda == 0.0 {
        Ok((Expr::one(), Expr::zero()))
    } else {
        let k = (-lambda).sqrt();
        if k * half_width >= FRAC_PI_2 {
            return Err(Error::Parameter(format!(
                "cos({k}·t) vanishes inside the domain (k·halfwidth = {} ≥ π/2)",
                k * half_width
            )));
        }
        let arg = t.sub(&Expr::constant(center)).scale(k);
        Ok((arg.cos(), arg.sin().div(&arg.cos()).scale(-k)))
    }
}

/// `u = X(x)Y(y)` with `X'' = ν1 X`, `Y'' = ν2 Y`, `ν = ν1 + ν2`. Negative
/// separation constants use cosines centred on the domain.
pub fn separable_family(nu1: f64, nu2: f64, domain: &DomainSpec) -> Result<OracleSolution> {
    if !nu1.is_finite() || !nu2.is_finite() {
        return Err(Error::Parameter(
            "separation constants must be finite".into(),
        ));
    }
    let c = domain.center();
    let hw_x = (domain.x_max() - domain.x_min()) / 2.0;
    let hw_y = (domain.y_max() - domain.y_min()) / 2.0;
    let (xf, lx) = separable_factor(nu1, Expr::x(), c.x, hw_x)?;
    let (yf, ly) = separable_factor(nu2, Expr::y(), c.y, hw_y)?;
    OracleSolution {
        spec: OracleSpec::Separable { nu1, nu2 },
        u: ScalarField::from_expr(xf.mul(&yf), domain),
        nu: ScalarField::constant(nu1 + nu2, domain),
        q: ComplexField::from_cexpr(CExpr::new(lx.scale(0.5), ly.scale(-0.5)), domain),
        epsilon: 0.0,
    }
    .self_check()
}

/// Whether `Re (z − s)^n` vanishes on the closed rectangle: with
/// `w = z − s = r e^{iθ}`, `Re w^n = r^n cos(nθ)`, so the rectangle is safe
/// iff it avoids `s` and `nθ` stays inside one interval `(−π/2, π/2) + kπ`.
fn harmonic_zero_free(n: u32, shift: Point, d: &DomainSpec) -> bool {
    if n == 0 {
        return true;
    }
    let (x0, x1) = (d.x_min() - shift.x, d.x_max() - shift.x);
    let (y0, y1) = (d.y_min() - shift.y, d.y_max() - shift.y);
    if x0 <= 0.0 && x1 >= 0.0 && y0 <= 0.0 && y1 >= 0.0 {
        return false;
    }
    // angular extent of a rectangle not containing the origin is attained
    // at its corners; measure relative to the centre's direction
    let mid = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let phi = mid.1.atan2(mid.0);
    let rel = |x: f64, y: f64| {
        let mut t = y.atan2(x) - phi;
        while t > PI {
            t -= 2.0 * PI;
        }
        while t < -PI {
            t += 2.0 * PI;
        }
        t
    };
    let angles = [rel(x0, y0), rel(x0, y1), rel(x1, y0), rel(x1, y1)];
    let lo = angles.iter().cloned().fold(f64::INFINITY, f64::min) + phi;
    let hi = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + phi;
    // zeros of cos(nθ) at θ = (π/2 + kπ)/n
    let nf = f64::from(n);
    let k_lo = ((nf * lo - FRAC_PI_2) / PI).ceil();
    let k_hi = ((nf * hi - FRAC_PI_2) / PI).floor();
    k_lo > k_hi
}

/// `u = Re (z − s)^n`, `ν ≡ 0`, `Q = n (z − s)^{n−1} / (2 Re (z − s)^n)`.
pub fn harmonic_family(
    kind: HarmonicKind,
    n: u32,
    shift: Point,
    domain: &DomainSpec,
) -> Result<OracleSolution> {
    let shift = match kind {
        HarmonicKind::Monomial => Point { x: 0.0, y: 0.0 },
        HarmonicKind::Translate => shift,
    };
    if n > 12 {
        return Err(Error::Parameter(format!(
            "harmonic degree {n} is too large"
        )));
    }
    if !harmonic_zero_free(n, shift, domain) {
        return Err(Error::Parameter(format!(
            "Re(z - ({}, {}))^{n} vanishes inside the domain",
            shift.x, shift.y
        )));
    }
    let w = CExpr::z().sub(&CExpr::constant(shift.as_complex()));
    let power = w.powi(n as i32);
    let u = power.re.clone();
    let q = if n == 0 {
        CExpr::constant(Complex64::new(0.0, 0.0))
    } else {
        let num = w.powi(n as i32 - 1).scale(f64::from(n) / 2.0);
        CExpr::new(num.re.div(&u), num.im.div(&u))
    };
    OracleSolution {
        spec: OracleSpec::Harmonic { kind, n, shift },
        u: ScalarField::from_expr(u, domain),
        nu: ScalarField::constant(0.0, domain),
        q: ComplexField::from_cexpr(q, domain),
        epsilon: 0.0,
    }
    .self_check()
}

/// `Q + ε`: no longer a Riccati solution (the residual changes by
/// `2ε Re Q + ε²`).
pub fn perturb(sol: &OracleSolution, epsilon: f64) -> Result<OracleSolution> {
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::Parameter(format!(
            "perturbation must be finite and nonzero, got {epsilon}"
        )));
    }
    Ok(OracleSolution {
        q: sol.q.add_const(Complex64::new(epsilon, 0.0)),
        epsilon: sol.epsilon + epsilon,
        ..sol.clone()
    })
}

/// The twelve-member test matrix: four exponential angles, four separable
/// pairs and four harmonic functions, all nonvanishing on `[-1, 1]²`.
pub fn standard_matrix() -> Vec<OracleSpec> {
    let theta = 0.8f64.atan2(0.6);
    let mut v = vec![
        OracleSpec::ExpFamily {
            nu: 1.0,
            theta: 0.0,
        },
        OracleSpec::ExpFamily { nu: 1.0, theta },
        OracleSpec::ExpFamily {
            nu: 2.0,
            theta: 2.0,
        },
        OracleSpec::ExpFamily {
            nu: 0.5,
            theta: -2.5,
        },
        OracleSpec::Separable { nu1: 1.0, nu2: 1.0 },
        OracleSpec::Separable { nu1: 1.0, nu2: 0.0 },
        OracleSpec::Separable {
            nu1: 0.0,
            nu2: -1.0,
        },
        OracleSpec::Separable {
            nu1: 2.0,
            nu2: -0.5,
        },
    ];
    for (n, sx) in [(1, -4.0), (2, -3.0), (3, -4.0), (2, 3.5)] {
        v.push(OracleSpec::Harmonic {
            kind: HarmonicKind::Translate,
            n,
            shift: Point { x: sx, y: 0.0 },
        });
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> DomainSpec {
        DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 21, 21).unwrap()
    }

    fn close(a: &ComplexField, b: &ComplexField, tol: f64) -> bool {
        a.sub(b).unwrap().max_modulus(0).unwrap() < tol
    }

    #[test]
    fn exp_family_examples() {
        let d = square();
        let s = exp_family(1.0, 0.0, &d).unwrap();
        assert!(close(
            &s.q,
            &ComplexField::constant(Complex64::new(0.5, 0.0), &d),
            1e-15
        ));
        let s = exp_family(1.0, 0.8f64.atan2(0.6), &d).unwrap();
        assert!(close(
            &s.q,
            &ComplexField::constant(Complex64::new(0.3, -0.4), &d),
            1e-15
        ));
        let want = ScalarField::parse("exp(0.6*x + 0.8*y)", &d).unwrap();
        assert!(s.u.sub(&want).unwrap().max_abs(0).unwrap() < 1e-14);
        let s = exp_family(0.0, 1.3, &d).unwrap();
        assert_eq!(s.u.max_abs(0).unwrap(), 1.0);
        assert_eq!(s.q.max_modulus(0).unwrap(), 0.0);
        assert!(exp_family(-1.0, 0.0, &d).is_err());
    }

    #[test]
    fn separable_examples() {
        let d = square();
        let s = separable_family(1.0, 1.0, &d).unwrap();
        assert!(close(
            &s.q,
            &ComplexField::constant(Complex64::new(0.5, -0.5), &d),
            1e-15
        ));
        assert_eq!(s.nu.max_abs(0).unwrap(), 2.0);
        let s = separable_family(1.0, 0.0, &d).unwrap();
        let e = ScalarField::parse("exp(x)", &d).unwrap();
        assert_eq!(s.u.sub(&e).unwrap().max_abs(0).unwrap(), 0.0);
        let s = separable_family(0.0, -1.0, &d).unwrap();
        assert_eq!(s.nu.evaluate(d.center()).unwrap(), -1.0);
        assert!(s.problem().unwrap().riccati_residual_max(&s.q).unwrap() < 1e-12);
        assert!(matches!(
            separable_family(0.0, -4.0, &d),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn harmonic_examples() {
        let d = square();
        let s = harmonic_family(HarmonicKind::Translate, 1, Point { x: -4.0, y: 0.0 }, &d).unwrap();
        let want = ComplexField::parse("(1/2)/(x + 4)", &d).unwrap();
        assert!(close(&s.q, &want, 1e-15));
        let s = harmonic_family(HarmonicKind::Monomial, 0, Point { x: 0.0, y: 0.0 }, &d).unwrap();
        assert_eq!(s.u.max_abs(0).unwrap(), 1.0);
        assert_eq!(s.q.max_modulus(0).unwrap(), 0.0);
        let small = DomainSpec::new(-0.4, 0.4, -0.4, 0.4, 9, 9).unwrap();
        let s = harmonic_family(
            HarmonicKind::Translate,
            2,
            Point { x: -2.0, y: 0.0 },
            &small,
        )
        .unwrap();
        let want = ScalarField::parse("(x + 2)^2 - y^2", &small).unwrap();
        assert!(s.u.sub(&want).unwrap().max_abs(0).unwrap() < 1e-13);
        assert!(s.u.min_abs(0).unwrap().1 > 0.0);
    }

    #[test]
    fn harmonic_zero_sets_are_detected() {
        let d = square();
        // x + 0.5 = 0 crosses the square
        assert!(
            harmonic_family(HarmonicKind::Translate, 1, Point { x: -0.5, y: 0.0 }, &d).is_err()
        );
        // origin inside
        assert!(harmonic_family(HarmonicKind::Monomial, 2, Point { x: 0.0, y: 0.0 }, &d).is_err());
        // x² − y² on [1.5, 2.5] × [−0.4, 0.4] is fine; on [1, 2] × [−1.5, 1.5] it is not
        let ok = DomainSpec::new(1.5, 2.5, -0.4, 0.4, 5, 5).unwrap();
        assert!(harmonic_family(HarmonicKind::Monomial, 2, Point { x: 0.0, y: 0.0 }, &ok).is_ok());
        let bad = DomainSpec::new(1.0, 2.0, -1.5, 1.5, 5, 5).unwrap();
        assert!(
            harmonic_family(HarmonicKind::Monomial, 2, Point { x: 0.0, y: 0.0 }, &bad).is_err()
        );
        // across the negative real axis
        let left = DomainSpec::new(-3.0, -2.0, -0.5, 0.5, 5, 5).unwrap();
        assert!(
            harmonic_family(HarmonicKind::Monomial, 2, Point { x: 0.0, y: 0.0 }, &left).is_ok()
        );
        assert!(
            harmonic_family(HarmonicKind::Monomial, 3, Point { x: 0.0, y: 0.0 }, &left).is_ok()
        );
        assert!(
            harmonic_family(HarmonicKind::Monomial, 1, Point { x: 0.0, y: 0.0 }, &left).is_ok()
        );
    }

    #[test]
    fn log_derivative_matches_every_oracle() {
        let d = square();
        for spec in standard_matrix() {
            let s = spec.build(&d).unwrap();
            let q = s.problem().unwrap().log_derivative(&s.u).unwrap();
            assert!(close(&q, &s.q, 1e-12), "{spec}");
        }
    }

    #[test]
    fn perturbation_breaks_riccati() {
        let d = square();
        let s = exp_family(1.0, 0.0, &d).unwrap();
        assert!(matches!(perturb(&s, 0.0), Err(Error::Parameter(_))));
        let p = perturb(&s, 0.1).unwrap();
        assert!(p.is_perturbed());
        let r = p.problem().unwrap().riccati_residual_max(&p.q).unwrap();
        assert!((r - (0.6f64.powi(2) - 0.25)).abs() < 1e-15 && r > 1e-3);
    }

    #[test]
    fn specs_parse_from_config_text() {
        let (s, eps) = OracleSpec::parse("exp_family nu=1 theta=0.927295218").unwrap();
        assert_eq!(
            s,
            OracleSpec::ExpFamily {
                nu: 1.0,
                theta: 0.927295218
            }
        );
        assert_eq!(eps, None);
        let (s, eps) = OracleSpec::parse("harmonic n=2 sx=-2 eps=0.1").unwrap();
        assert!(matches!(
            s,
            OracleSpec::Harmonic {
                kind: HarmonicKind::Translate,
                n: 2,
                ..
            }
        ));
        assert_eq!(eps, Some(0.1));
        assert!(OracleSpec::parse("separable nu1=1").is_err());
        assert!(OracleSpec::parse("exp_family nu=1 bogus=2").is_err());
        assert!(OracleSpec::parse("gaussian").is_err());
    }
}
