//! Executes a [`RunConfig`] and assembles the JSON report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{Backend, Case, FieldSource, RunConfig};
use crate::error::{Error, Result};
use crate::field::{ComplexField, DomainSpec, Point, ScalarField};
use crate::oracle::{OracleSolution, OracleSpec};
use crate::quadrature::{op_a, Contour};
use crate::riccati::{margin, RiccatiProblem, Tolerances};
use crate::theorems::{
    cauchy_laplace_reductions, cauchy_riccati, cauchy_schrodinger, euler_second_baseline,
    picard_identity, IdentityResult, LaplaceReduction, TestRegion, CAUCHY_TOL, EULER2_TOL,
    PICARD_TOL,
};

const RESIDUAL_TOL: f64 = 1e-10;
const TRANSFORM_TOL: f64 = 1e-8;
/// Lattice used to sample quantities whose evaluation involves nested
/// quadrature (expression backend only).
const CHECK_LATTICE: usize = 11;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config's `refine`.
    pub refine: Option<usize>,
    /// Residual fields are written here as grid CSV.
    pub dump_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    #[serde(flatten)]
    pub result: IdentityResult,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub case: String,
    pub entries: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub identities: Vec<IdentityReport>,
    pub pass: bool,
    pub elapsed_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// Exit status for errors that abort a run before a report exists.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// One resolution level of a case.
struct Level<'a> {
    cfg: &'a RunConfig,
    domain: DomainSpec,
    /// Fixed sample points shared by all levels of a grid refinement study.
    samples: Option<Vec<Point>>,
    contour_levels: usize,
    dumps: Option<Vec<(String, ComplexField)>>,
}

type Outcome = (String, f64, std::result::Result<IdentityResult, String>);

impl Level<'_> {
    fn grid(&self) -> bool {
        self.cfg.backend == Backend::Grid
    }

    fn scalar(&self, key: &str, default: Option<&str>) -> Result<Option<ScalarField>> {
        let f = match (self.cfg.field(key), default) {
            (Some(FieldSource::Csv(p)), _) => {
                return ScalarField::read_csv(p)?.on_domain(&self.domain).map(Some)
            }
            (Some(FieldSource::Expr(e)), _) => ScalarField::parse(e, &self.domain)?,
            (None, Some(e)) => ScalarField::parse(e, &self.domain)?,
            (None, None) => return Ok(None),
        };
        Ok(Some(if self.grid() { f.to_grid()? } else { f }))
    }

    fn scalar_or(&self, key: &str, default: &str) -> Result<ScalarField> {
        Ok(self.scalar(key, Some(default))?.expect("default given"))
    }

    fn complex(&self, key: &str, default: Option<&str>) -> Result<Option<ComplexField>> {
        let f = match (self.cfg.field(key), default) {
            (Some(FieldSource::Csv(p)), _) => {
                return ComplexField::read_csv(p)?.on_domain(&self.domain).map(Some)
            }
            (Some(FieldSource::Expr(e)), _) => ComplexField::parse(e, &self.domain)?,
            (None, Some(e)) => ComplexField::parse(e, &self.domain)?,
            (None, None) => return Ok(None),
        };
        Ok(Some(if self.grid() { f.to_grid()? } else { f }))
    }

    fn oracle(&self, spec: &OracleSpec) -> Result<OracleSolution> {
        let s = spec.build(&self.domain)?;
        if !self.grid() {
            return Ok(s);
        }
        Ok(OracleSolution {
            u: s.u.to_grid()?,
            q: s.q.to_grid()?,
            ..s
        })
    }

    fn problem(&self, nu: ScalarField) -> Result<RiccatiProblem> {
        let mut tol = Tolerances::default();
        if let Some(s) = self.cfg.solution_tol {
            tol.solution = s;
        }
        tol.check_hypotheses = self.cfg.perturb.is_none();
        let mut p = RiccatiProblem::new(nu)?.with_tolerances(tol);
        p.cfg = p
            .cfg
            .with_constant(self.cfg.c)
            .with_base(self.domain.base());
        if let Some(t) = self.cfg.compat_tol {
            p.cfg = p.cfg.with_compat_tol(t)?;
        }
        Ok(p)
    }

    /// `ν` from the config, or `Δf/f` for a given generating solution.
    fn nu_from(&self, f: Option<&ScalarField>, default: f64) -> Result<ScalarField> {
        if let Some(nu) = self.scalar("nu", None)? {
            return Ok(nu);
        }
        match f {
            Some(f) if !(self.cfg.field("f").is_none() && default.is_finite()) => {
                f.laplacian().div(f)
            }
            _ => Ok(ScalarField::constant(default, &self.domain)),
        }
    }

    fn tol(&self, base: f64, h2: Option<f64>, scale: f64) -> f64 {
        self.cfg.tolerance.unwrap_or(match h2 {
            None => base,
            Some(h2) => base + 50.0 * h2 * scale.max(1.0),
        })
    }

    /// Points where residual fields are reduced.
    fn points(&self, grid: bool, nested: bool) -> Vec<Point> {
        if let Some(s) = &self.samples {
            return s.clone();
        }
        if nested && !grid {
            let d = self
                .domain
                .clone()
                .with_resolution(CHECK_LATTICE, CHECK_LATTICE)
                .expect("valid lattice");
            return d.nodes().collect();
        }
        self.domain.interior_nodes(margin(grid))
    }

    fn reduce(&self, f: &ComplexField, nested: bool) -> Result<f64> {
        f.max_modulus_at(&self.points(f.is_grid(), nested))
    }

    fn dump(&mut self, name: &str, f: &ComplexField) {
        if let Some(d) = self.dumps.as_mut() {
            d.push((name.to_string(), f.clone()));
        }
    }

    fn contour(&self) -> Result<Contour> {
        if let Some(c) = &self.cfg.contour {
            return Ok(c.clone());
        }
        let d = &self.domain;
        let half = ((d.x_max() - d.x_min()) / 2.0).min((d.y_max() - d.y_min()) / 2.0);
        Contour::circle(d.center(), (0.9 * half).min(1.0), 256)
    }
}

fn finish(name: &str, residual: f64, tolerance: f64) -> IdentityResult {
    IdentityResult::new(name, residual, tolerance)
}

fn default_theta() -> f64 {
    0.8f64.atan2(0.6)
}

fn riccati_case(l: &mut Level) -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut sources: Vec<(String, Result<(ScalarField, ScalarField)>)> = Vec::new();
    if !l.cfg.oracles.is_empty() {
        for spec in &l.cfg.oracles {
            sources.push((format!("[{spec}]"), l.oracle(spec).map(|s| (s.u, s.nu))));
        }
    } else if l.cfg.field("u").is_some() {
        let u = l.scalar_or("u", "1");
        let nu = l.nu_from(None, 0.0);
        sources.push((String::new(), u.and_then(|u| Ok((u, nu?)))));
    } else {
        let spec = OracleSpec::ExpFamily {
            nu: 1.0,
            theta: default_theta(),
        };
        sources.push((format!("[{spec}]"), l.oracle(&spec).map(|s| (s.u, s.nu))));
    }
    let phi_src = l.scalar_or("phi", "x^2");
    for (k, (label, src)) in sources.into_iter().enumerate() {
        let names = [
            "riccati-residual",
            "schrodinger-residual",
            "exp-reconstruct",
            "factorization",
        ]
        .map(|n| format!("{n}{label}"));
        let prepared = src.and_then(|(u, nu)| {
            let prob = l.problem(nu)?;
            let mut q = prob.log_derivative(&u)?;
            if let Some(eps) = l.cfg.perturb {
                q = q.add_const(Complex64::new(eps, 0.0));
            }
            Ok((u, prob, q))
        });
        let (u, prob, q) = match prepared {
            Ok(v) => v,
            Err(e) => {
                let msg = e.to_string();
                for n in names {
                    out.push((n, RESIDUAL_TOL, Err(msg.clone())));
                }
                continue;
            }
        };
        let h2 = u.grid_h2();
        let r = (|| -> Result<IdentityResult> {
            let res = prob.riccati_residual(&q)?;
            l.dump(&format!("riccati-residual_{}", k + 1), &res);
            let scale = q.max_modulus(0)?.powi(2);
            Ok(finish(
                &names[0],
                l.reduce(&res, false)?,
                l.tol(RESIDUAL_TOL, h2, scale),
            ))
        })();
        out.push((names[0].clone(), RESIDUAL_TOL, r.map_err(|e| e.to_string())));
        let r = (|| -> Result<IdentityResult> {
            let res = ComplexField::from_real(prob.schrodinger_residual(&u)?);
            let scale = u.max_abs(0)?;
            Ok(finish(
                &names[1],
                l.reduce(&res, false)?,
                l.tol(RESIDUAL_TOL, h2, scale),
            ))
        })();
        out.push((names[1].clone(), RESIDUAL_TOL, r.map_err(|e| e.to_string())));
        let r = (|| -> Result<IdentityResult> {
            let back = prob.exp_reconstruct(&q)?;
            let u0 = u.evaluate(prob.cfg.base)?;
            let normalized = u.scale(1.0 / u0);
            let rel = back.sub(&normalized)?.div(&normalized)?;
            let rel = ComplexField::from_real(rel);
            Ok(finish(
                &names[2],
                l.reduce(&rel, true)?,
                l.tol(TRANSFORM_TOL, h2, 1.0),
            ))
        })();
        out.push((
            names[2].clone(),
            TRANSFORM_TOL,
            r.map_err(|e| e.to_string()),
        ));
        let r = (|| -> Result<IdentityResult> {
            let phi = phi_src
                .as_ref()
                .map_err(|e| Error::Parameter(e.to_string()))?
                .clone();
            let fac = prob.factorization_apply(&q, &phi)?;
            let g1 = l.reduce(&fac.lhs.sub(&fac.rhs1)?, false)?;
            let g2 = l.reduce(&fac.lhs.sub(&fac.rhs2)?, false)?;
            let scale = phi.max_abs(0)?.max(1.0) * q.max_modulus(0)?.max(1.0).powi(2);
            Ok(finish(
                &names[3],
                g1.max(g2),
                l.tol(RESIDUAL_TOL, h2.or(phi.grid_h2()), scale),
            ))
        })();
        out.push((names[3].clone(), RESIDUAL_TOL, r.map_err(|e| e.to_string())));
    }
    out
}

fn darboux_case(l: &mut Level) -> Vec<Outcome> {
    let names = [
        "darboux-eta",
        "darboux-vekua",
        "darboux-round-trip",
        "darboux-closed-form",
    ];
    let setup = (|| -> Result<_> {
        let f = l.scalar_or("f", "exp(x)")?;
        let u = l.scalar_or("u", "exp(0.6*x + 0.8*y)")?;
        let nu = l.nu_from(Some(&f), 1.0)?;
        let prob = l.problem(nu)?;
        let v = prob.darboux_v_from_u(&u, &f)?;
        Ok((f, u, prob, v))
    })();
    let (f, u, prob, v) = match setup {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            let mut out: Vec<Outcome> = names[..3]
                .iter()
                .map(|n| (n.to_string(), TRANSFORM_TOL, Err(msg.clone())))
                .collect();
            if l.cfg.field("v").is_some() {
                out.push((names[3].into(), TRANSFORM_TOL, Err(msg)));
            }
            return out;
        }
    };
    let h2 = f.grid_h2().or(u.grid_h2());
    let scale = u.max_abs(0).unwrap_or(1.0);
    let mut out = Vec::new();
    let r = (|| -> Result<IdentityResult> {
        let eta = prob.darboux_potential_eta(&f)?;
        let res = ComplexField::from_real(RiccatiProblem::new(eta)?.schrodinger_residual(&v)?);
        l.dump("darboux-eta", &res);
        Ok(finish(
            names[0],
            l.reduce(&res, false)?,
            l.tol(TRANSFORM_TOL, h2, scale),
        ))
    })();
    out.push((names[0].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    let r = (|| -> Result<IdentityResult> {
        let w = ComplexField::new(u.clone(), v.clone())?;
        let res = prob.vekua_residual(&w, &f)?;
        Ok(finish(
            names[1],
            l.reduce(&res, false)?,
            l.tol(TRANSFORM_TOL, h2, scale),
        ))
    })();
    out.push((names[1].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    let r = (|| -> Result<IdentityResult> {
        let back = prob.darboux_u_from_v(&v, &f)?;
        let base = prob.cfg.base;
        let alpha = (back.evaluate(base)? - u.evaluate(base)?) / f.evaluate(base)?;
        let err = ComplexField::from_real(back.sub(&f.scale(alpha))?.sub(&u)?);
        Ok(finish(
            names[2],
            l.reduce(&err, true)?,
            l.tol(TRANSFORM_TOL, h2, scale),
        ))
    })();
    out.push((names[2].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    if l.cfg.field("v").is_some() {
        let r = (|| -> Result<IdentityResult> {
            let want = l.scalar_or("v", "0")?;
            let err = ComplexField::from_real(v.sub(&want)?);
            Ok(finish(
                names[3],
                l.reduce(&err, false)?,
                l.tol(TRANSFORM_TOL, h2, scale),
            ))
        })();
        out.push((names[3].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    }
    out
}

fn euler1_case(l: &mut Level) -> Vec<Outcome> {
    let names = ["euler1-vekua", "euler1-round-trip", "euler1-schrodinger"];
    let setup = (|| -> Result<_> {
        let q = l.complex("Q", Some("0.3 - 0.4*i"))?.expect("default");
        let q0 = l.complex("Q0", Some("1/2"))?.expect("default");
        let prob = l.problem(l.nu_from(None, 1.0)?)?;
        let w = prob.euler_first_w_from_q(&q, &q0)?;
        let f = op_a(&q0, &prob.cfg.clone().with_constant(0.0))?.exp();
        Ok((q, prob, w, f))
    })();
    let (q, prob, w, f) = match setup {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            return names
                .iter()
                .map(|n| (n.to_string(), TRANSFORM_TOL, Err(msg.clone())))
                .collect();
        }
    };
    let h2 = q.grid_h2();
    let scale = w.max_modulus(0).unwrap_or(1.0);
    let mut out = Vec::new();
    let r = (|| -> Result<IdentityResult> {
        let res = prob.vekua_residual(&w, &f)?;
        l.dump("euler1-vekua", &res);
        Ok(finish(
            names[0],
            l.reduce(&res, true)?,
            l.tol(TRANSFORM_TOL, h2, scale),
        ))
    })();
    out.push((names[0].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    let r = (|| -> Result<IdentityResult> {
        let back = prob.euler_first_q_from_w(&w)?;
        let err = back.sub(&q)?;
        Ok(finish(
            names[1],
            l.reduce(&err, true)?,
            l.tol(TRANSFORM_TOL, h2, 1.0),
        ))
    })();
    out.push((names[1].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    let r = (|| -> Result<IdentityResult> {
        let eta = RiccatiProblem::new(prob.darboux_potential_eta(&f)?)?;
        let re = ComplexField::from_real(prob.schrodinger_residual(w.re())?);
        let im = ComplexField::from_real(eta.schrodinger_residual(w.im())?);
        let worst = l.reduce(&re, true)?.max(l.reduce(&im, true)?);
        Ok(finish(names[2], worst, l.tol(TRANSFORM_TOL, h2, scale)))
    })();
    out.push((names[2].into(), TRANSFORM_TOL, r.map_err(|e| e.to_string())));
    out
}

fn euler2_case(l: &mut Level) -> Vec<Outcome> {
    let name = "euler2-baseline";
    let r = (|| -> Result<IdentityResult> {
        // the baseline needs an analytic W, which a sampled grid is not
        let w = match l.cfg.field("W") {
            Some(FieldSource::Csv(_)) => l.complex("W", None)?.expect("present"),
            Some(FieldSource::Expr(e)) => ComplexField::parse(e, &l.domain)?,
            None => ComplexField::parse("exp(z)", &l.domain)?,
        };
        let z0 = l.cfg.z0;
        let region = l.cfg.region.clone().unwrap_or(TestRegion::Disk {
            center: z0,
            radius: 0.4 * l.cfg.radius,
        });
        euler_second_baseline(&w, z0, l.cfg.radius, l.cfg.terms, &region, l.cfg.tolerance)
    })();
    vec![(
        name.into(),
        l.cfg.tolerance.unwrap_or(EULER2_TOL),
        r.map_err(|e| e.to_string()),
    )]
}

fn default_picard() -> [OracleSpec; 4] {
    [
        OracleSpec::Separable { nu1: 1.0, nu2: 1.0 },
        OracleSpec::ExpFamily {
            nu: 2.0,
            theta: 2.0,
        },
        OracleSpec::Separable {
            nu1: 2.5,
            nu2: -0.5,
        },
        OracleSpec::ExpFamily {
            nu: 2.0,
            theta: -1.0,
        },
    ]
}

/// Riccati solutions from `keys`, else the leading oracles, else `defaults`.
fn solutions(
    l: &Level,
    keys: &[&str],
    defaults: &[OracleSpec],
) -> Result<(Vec<ComplexField>, ScalarField)> {
    if keys.iter().all(|k| l.cfg.field(k).is_some()) {
        let qs = keys
            .iter()
            .map(|k| Ok(l.complex(k, None)?.expect("present")))
            .collect::<Result<Vec<_>>>()?;
        return Ok((qs, l.nu_from(None, 0.0)?));
    }
    let specs: Vec<OracleSpec> = if l.cfg.oracles.len() >= keys.len() {
        l.cfg.oracles[..keys.len()].to_vec()
    } else {
        defaults.to_vec()
    };
    let sols = specs
        .iter()
        .map(|s| l.oracle(s))
        .collect::<Result<Vec<_>>>()?;
    let nu = sols[0].nu.clone();
    for s in &sols[1..] {
        if s.nu.sub(&nu)?.max_abs(0)? > 1e-14 {
            return Err(Error::Parameter(format!(
                "oracle {} has a different potential",
                s.spec
            )));
        }
    }
    let nu = l.scalar("nu", None)?.unwrap_or(nu);
    Ok((sols.into_iter().map(|s| s.q).collect(), nu))
}

fn perturbed(l: &Level, q: ComplexField) -> ComplexField {
    match l.cfg.perturb {
        Some(eps) => q.add_const(Complex64::new(eps, 0.0)),
        None => q,
    }
}

fn picard_case(l: &mut Level) -> Vec<Outcome> {
    let r = (|| -> Result<IdentityResult> {
        let (mut qs, nu) = solutions(l, &["Q1", "Q2", "Q3", "Q4"], &default_picard())?;
        qs[2] = perturbed(l, qs[2].clone());
        let prob = l.problem(nu)?;
        let refs = [&qs[0], &qs[1], &qs[2], &qs[3]];
        if l.dumps.is_some() {
            let sum = crate::theorems::picard_sum(refs)?;
            l.dump("picard", &sum);
        }
        let mut res = picard_identity(refs, &prob, l.samples.as_deref(), l.cfg.tolerance)?;
        if l.samples.is_none() && l.grid() {
            res.residual = l.reduce(&crate::theorems::picard_sum(refs)?, false)?;
            res.pass = res.residual < res.tolerance;
        }
        Ok(res)
    })();
    vec![(
        "picard".into(),
        l.cfg.tolerance.unwrap_or(PICARD_TOL),
        r.map_err(|e| e.to_string()),
    )]
}

fn cauchy_riccati_case(l: &mut Level) -> Vec<Outcome> {
    let r = (|| -> Result<IdentityResult> {
        let defaults = [
            OracleSpec::ExpFamily {
                nu: 1.0,
                theta: 0.0,
            },
            OracleSpec::ExpFamily {
                nu: 1.0,
                theta: default_theta(),
            },
        ];
        let (qs, nu) = solutions(l, &["Q0", "Q1"], &defaults)?;
        let q1 = perturbed(l, qs[1].clone());
        let prob = l.problem(nu)?;
        cauchy_riccati(
            &qs[0],
            &q1,
            &l.contour()?,
            &prob,
            l.contour_levels,
            l.cfg.tolerance,
        )
    })();
    vec![(
        "cauchy-riccati".into(),
        l.cfg.tolerance.unwrap_or(CAUCHY_TOL),
        r.map_err(|e| e.to_string()),
    )]
}

fn cauchy_schrodinger_case(l: &mut Level) -> Vec<Outcome> {
    let r = (|| -> Result<IdentityResult> {
        let f = l.scalar_or("f", "exp(x)")?;
        let u = l.scalar_or("u", "exp(0.6*x + 0.8*y)")?;
        let prob = l.problem(l.nu_from(Some(&f), 1.0)?)?;
        cauchy_schrodinger(
            &f,
            &u,
            &l.contour()?,
            &prob,
            l.contour_levels,
            l.cfg.tolerance,
        )
    })();
    vec![(
        "cauchy-schrodinger".into(),
        l.cfg.tolerance.unwrap_or(CAUCHY_TOL),
        r.map_err(|e| e.to_string()),
    )]
}

fn laplace_case(l: &mut Level) -> Vec<Outcome> {
    let tol = l.cfg.tolerance.unwrap_or(CAUCHY_TOL);
    let g = (|| -> Result<IdentityResult> {
        let u = l.scalar_or("u", "x^2 - y^2")?;
        cauchy_laplace_reductions(
            &u,
            &l.contour()?,
            LaplaceReduction::Gradient,
            l.contour_levels,
            l.cfg.tolerance,
        )
    })();
    let r = (|| -> Result<IdentityResult> {
        let f = l.scalar_or("f", "4 + x")?;
        cauchy_laplace_reductions(
            &f,
            &l.contour()?,
            LaplaceReduction::Reciprocal,
            l.contour_levels,
            l.cfg.tolerance,
        )
    })();
    vec![
        ("laplace-gradient".into(), tol, g.map_err(|e| e.to_string())),
        (
            "laplace-reciprocal".into(),
            tol,
            r.map_err(|e| e.to_string()),
        ),
    ]
}

fn dispatch(case: Case, l: &mut Level) -> Vec<Outcome> {
    match case {
        Case::RiccatiResidual => riccati_case(l),
        Case::Darboux => darboux_case(l),
        Case::Euler1 => euler1_case(l),
        Case::Euler2Baseline => euler2_case(l),
        Case::Picard => picard_case(l),
        Case::CauchyRiccati => cauchy_riccati_case(l),
        Case::CauchySchrodinger => cauchy_schrodinger_case(l),
        Case::LaplaceReductions => laplace_case(l),
        Case::All => unreachable!("expanded by run"),
    }
}

struct CaseOutput {
    results: Vec<IdentityResult>,
    dumps: Vec<(String, ComplexField)>,
    elapsed_ms: f64,
}

/// Runs one case; grid backends with `refine > 1` repeat it on successively
/// halved lattices and tabulate the residuals at the coarse interior nodes.
fn run_case(case: Case, cfg: &RunConfig, refine: usize, dump: bool) -> CaseOutput {
    let start = Instant::now();
    let csv = cfg
        .fields
        .values()
        .any(|s| matches!(s, FieldSource::Csv(_)));
    let domain_levels = if cfg.backend == Backend::Grid && !csv && case != Case::Euler2Baseline {
        refine
    } else {
        1
    };
    let contour_levels = if domain_levels > 1 { 1 } else { refine };
    let samples =
        (domain_levels > 1).then(|| cfg.domain.interior_nodes(crate::riccati::GRID_MARGIN));
    let mut domain = cfg.domain.clone();
    let mut per_level: Vec<Vec<Outcome>> = Vec::new();
    let mut dumps = Vec::new();
    for k in 0..domain_levels {
        if k > 0 {
            domain = domain.refined();
        }
        let last = k + 1 == domain_levels;
        let mut level = Level {
            cfg,
            domain: domain.clone(),
            samples: samples.clone(),
            contour_levels,
            dumps: (dump && last).then(Vec::new),
        };
        per_level.push(dispatch(case, &mut level));
        if let Some(d) = level.dumps {
            dumps = d;
        }
    }
    let finest = per_level.pop().unwrap_or_default();
    let results = finest
        .into_iter()
        .enumerate()
        .map(|(i, (name, tol, r))| match r {
            Ok(mut res) => {
                res.name = name;
                if domain_levels > 1 {
                    let mut table: Vec<(f64, f64)> = per_level
                        .iter()
                        .zip(0..)
                        .filter_map(|(lv, k)| {
                            let n = (cfg.domain.nx() - 1) * (1 << k) + 1;
                            lv.get(i)
                                .and_then(|(_, _, r)| r.as_ref().ok())
                                .map(|r| (n as f64, r.residual))
                        })
                        .collect();
                    table.push((domain.nx() as f64, res.residual));
                    res.refinement = table;
                }
                res
            }
            Err(e) => IdentityResult::failed(name, tol, e),
        })
        .collect();
    CaseOutput {
        results,
        dumps,
        elapsed_ms: ms(start),
    }
}

fn write_dumps(dir: &Path, dumps: &[(String, ComplexField)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, f) in dumps {
        f.write_csv(&dir.join(name)).map_err(|e| match e {
            Error::Io { .. } => e,
            other => Error::io(dir.join(name), std::io::Error::other(other.to_string())),
        })?;
    }
    Ok(())
}

/// Runs every identity of the configured case (all cases for `all`, in
/// parallel) and returns the report. Only I/O failures while writing field
/// dumps abort the run.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<Report> {
    let start = Instant::now();
    let refine = opts.refine.unwrap_or(cfg.refine).max(1);
    let dump = opts.dump_dir.is_some();
    let mut cases: Vec<Case> = match cfg.case {
        Case::All => Case::SUITE.to_vec(),
        c => vec![c],
    };
    cases.sort_by_key(|c| c.name());
    let outputs: Vec<CaseOutput> = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|&c| s.spawn(move || run_case(c, cfg, refine, dump)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("case thread panicked"))
            .collect()
    });
    let mut identities = Vec::new();
    let mut dumps = Vec::new();
    for out in outputs {
        for r in out.results {
            identities.push(IdentityReport {
                result: r,
                elapsed_ms: out.elapsed_ms,
            });
        }
        dumps.extend(out.dumps);
    }
    if let Some(dir) = &opts.dump_dir {
        write_dumps(dir, &dumps)?;
    }
    let pass = !identities.is_empty() && identities.iter().all(|r| r.result.pass);
    Ok(Report {
        config: ConfigEcho {
            case: cfg.case.name().into(),
            entries: cfg.entries.clone(),
        },
        identities,
        pass,
        elapsed_ms: ms(start),
    })
}
