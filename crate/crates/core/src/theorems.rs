//! Numeric checks of the identities satisfied by Riccati and Schrödinger
//! solutions: Picard's four-solution identity, Cauchy-type integral theorems
//! and the Taylor-series representation of Riccati solutions for `ν ≡ 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ComplexField, DomainSpec, Point, ScalarField};
use crate::quadrature::{line_integral_dz, op_a, Contour};
use crate::riccati::{margin, RiccatiProblem};

pub const PICARD_TOL: f64 = 1e-8;
pub const CAUCHY_TOL: f64 = 1e-10;
pub const EULER2_TOL: f64 = 1e-6;
/// Pairs `(i, j)` whose differences appear in Picard's identity, with the
/// sign of their term.
pub const PICARD_PAIRS: [(usize, usize, f64); 4] =
    [(1, 2, 1.0), (3, 4, 1.0), (1, 4, -1.0), (3, 2, -1.0)];
/// Differences smaller than this make a Picard pair degenerate.
pub const PICARD_PAIR_EPS: f64 = 1e-8;
/// Circle radius (relative to `R`) and node count used for Taylor coefficients.
pub const TAYLOR_RADIUS_FRACTION: f64 = 0.1;
pub const TAYLOR_NODES: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResult {
    #[serde(rename = "case")]
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// `(resolution, residual)` pairs, resolution increasing.
    pub refinement: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl IdentityResult {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        IdentityResult {
            name: name.into(),
            residual,
            tolerance,
            pass: residual < tolerance,
            refinement: Vec::new(),
            reason: None,
        }
    }

    pub fn with_refinement(mut self, table: Vec<(f64, f64)>) -> Self {
        self.refinement = table;
        self
    }

    /// A checker that could not run: failing result carrying the reason.
    pub fn failed(name: impl Into<String>, tolerance: f64, err: impl std::fmt::Display) -> Self {
        IdentityResult {
            name: name.into(),
            residual: f64::NAN,
            tolerance,
            pass: false,
            refinement: Vec::new(),
            reason: Some(err.to_string()),
        }
    }
}

/// Grid inputs relax a tolerance by the same O(h²) allowance used for
/// solution-hood.
fn tolerance_for(base: f64, h2: Option<f64>, scale: f64, prob: &RiccatiProblem) -> f64 {
    match h2 {
        None => base,
        Some(h2) => base + prob.tol.grid_coeff * h2 * scale.max(1.0),
    }
}

/// Residuals of `f` evaluated on successively refined lattices, starting from
/// `domain` and halving the spacing `levels − 1` times. Resolution is the
/// node count along x.
pub fn refinement_table(
    domain: &DomainSpec,
    levels: usize,
    mut f: impl FnMut(&DomainSpec) -> Result<f64>,
) -> Result<Vec<(f64, f64)>> {
    let mut d = domain.clone();
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        if k > 0 {
            d = d.refined();
        }
        out.push((d.nx() as f64, f(&d)?));
    }
    Ok(out)
}

/// Empirical orders `log2(e_k / e_{k+1})` of a table built by halving `h`.
pub fn observed_orders(table: &[(f64, f64)]) -> Vec<f64> {
    table.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect()
}

/// The four terms `[∂_z̄(Qi−Qj) + 2i Im(Q̄iQj)]/(Qi−Qj)` of Picard's identity,
/// in the order (1,2), (3,4), (1,4), (3,2).
pub fn picard_terms(q: [&ComplexField; 4]) -> Result<[ComplexField; 4]> {
    let term = |i: usize, j: usize| -> Result<ComplexField> {
        let (a, b) = (q[i - 1], q[j - 1]);
        let diff = a.sub(b)?;
        let cross = a.re().mul(b.im())?.sub(&a.im().mul(b.re())?)?;
        let im = ComplexField::new(ScalarField::constant(0.0, cross.domain()), cross.scale(2.0))?;
        diff.d_zbar()?.add(&im)?.div(&diff)
    };
    Ok([term(1, 2)?, term(3, 4)?, term(1, 4)?, term(3, 2)?])
}

/// `t12 + t34 − t14 − t32`, which vanishes for four Riccati solutions.
pub fn picard_sum(q: [&ComplexField; 4]) -> Result<ComplexField> {
    let [t12, t34, t14, t32] = picard_terms(q)?;
    t12.add(&t34)?.sub(&t14)?.sub(&t32)
}

/// Max modulus of Picard's sum over `samples`, or over the lattice (minus a
/// two-cell margin for grid inputs) when `samples` is `None`. Convergence
/// studies pass a fixed coarse sample set so that every level is measured at
/// the same points.
pub fn picard_identity(
    q: [&ComplexField; 4],
    prob: &RiccatiProblem,
    samples: Option<&[Point]>,
    tolerance: Option<f64>,
) -> Result<IdentityResult> {
    let grid = q.iter().any(|f| f.is_grid());
    let m = margin(grid);
    for (k, f) in q.iter().enumerate() {
        prob.require_riccati(f, &format!("Q{}", k + 1))?;
    }
    for &(i, j, _) in &PICARD_PAIRS {
        let (_, min) = q[i - 1].sub(q[j - 1])?.min_modulus(m)?;
        if !(min > PICARD_PAIR_EPS) {
            return Err(Error::DegeneratePair(i, j));
        }
    }
    let sum = picard_sum(q)?;
    let residual = match samples {
        Some(pts) => sum.max_modulus_at(pts)?,
        None => sum.max_modulus(m)?,
    };
    let scale = q
        .iter()
        .map(|f| f.max_modulus(0))
        .collect::<Result<Vec<_>>>()?;
    let scale = scale.into_iter().fold(1.0f64, f64::max).powi(2);
    let h2 = q.iter().find_map(|f| f.grid_h2());
    let tol = tolerance.unwrap_or_else(|| tolerance_for(PICARD_TOL, h2, scale, prob));
    Ok(IdentityResult::new("picard", residual, tol))
}

fn require_closed(gamma: &Contour, domain: &DomainSpec) -> Result<()> {
    if !gamma.is_closed() {
        return Err(Error::ContourNotClosed);
    }
    gamma.check_inside(domain)
}

/// Halves the contour resolution `levels − 1` times (circles stop at 16
/// nodes) and tabulates `f` from coarse to fine. Grid inputs (spacing
/// `grid_h`) are integrated once at a resolution matched to the grid; their
/// convergence is studied by refining the grid instead.
fn grid_spacing(domains: &[Option<&DomainSpec>]) -> Option<f64> {
    domains.iter().flatten().map(|d| d.h_max()).reduce(f64::min)
}

fn contour_table(
    gamma: &Contour,
    levels: usize,
    grid_h: Option<f64>,
    mut f: impl FnMut(&Contour) -> Result<f64>,
) -> Result<Vec<(f64, f64)>> {
    if let Some(h) = grid_h {
        let g = gamma.resolved_for(h)?;
        return Ok(vec![(g.resolution() as f64, f(&g)?)]);
    }
    let mut res = Vec::new();
    let mut n = gamma.resolution();
    let min = if matches!(gamma, Contour::Circle { .. }) {
        16
    } else {
        1
    };
    for _ in 0..levels.max(1) {
        if n < min {
            break;
        }
        res.push(n);
        n /= 2;
    }
    res.reverse();
    res.into_iter()
        .map(|n| Ok((n as f64, f(&gamma.with_resolution(n)?)?)))
        .collect()
}

/// `∮(Q1−Q0)e^{A[Q1−Q0]}dz` must be imaginary and `∮(Q1−Q0)e^{A[Q1+Q0]}dz`
/// real; residual `|Re I1| + |Im I2|`.
pub fn cauchy_riccati(
    q0: &ComplexField,
    q1: &ComplexField,
    gamma: &Contour,
    prob: &RiccatiProblem,
    levels: usize,
    tolerance: Option<f64>,
) -> Result<IdentityResult> {
    require_closed(gamma, prob.domain())?;
    prob.require_riccati(q0, "Q0")?;
    prob.require_riccati(q1, "Q1")?;
    for (f, what) in [(q0, "Q0"), (q1, "Q1")] {
        let b = f.max_modulus(0)?;
        if prob.tol.check_hypotheses && !(b <= prob.tol.bound) {
            return Err(Error::Unbounded {
                what: what.into(),
                value: b,
            });
        }
    }
    let cfg = prob.cfg.clone().with_constant(0.0);
    let diff = q1.sub(q0)?;
    let g1 = diff.mul_real(&op_a(&diff, &cfg)?.exp())?;
    let g2 = diff.mul_real(&op_a(&q1.add(q0)?, &cfg)?.exp())?;
    let eval = |c: &Contour| -> Result<f64> {
        let i1 = line_integral_dz(&g1, c)?;
        let i2 = line_integral_dz(&g2, c)?;
        Ok(i1.re.abs() + i2.im.abs())
    };
    let table = contour_table(
        gamma,
        levels,
        grid_spacing(&[
            q0.is_grid().then(|| q0.domain()),
            q1.is_grid().then(|| q1.domain()),
        ]),
        eval,
    )?;
    let residual = table.last().map(|r| r.1).unwrap_or(f64::NAN);
    let scale = g1.max_modulus(0)?.max(g2.max_modulus(0)?);
    let tol = tolerance
        .unwrap_or_else(|| tolerance_for(CAUCHY_TOL, q0.grid_h2().or(q1.grid_h2()), scale, prob));
    Ok(IdentityResult::new("cauchy-riccati", residual, tol).with_refinement(table))
}

/// `Re ∮∂_z(u/f)dz = 0` and `Im ∮f²∂_z(u/f)dz = 0` for solutions `u`, `f`.
pub fn cauchy_schrodinger(
    f: &ScalarField,
    u: &ScalarField,
    gamma: &Contour,
    prob: &RiccatiProblem,
    levels: usize,
    tolerance: Option<f64>,
) -> Result<IdentityResult> {
    require_closed(gamma, prob.domain())?;
    let (at, value) = f.min_abs(0)?;
    if !(value > prob.tol.nonvanishing) {
        return Err(Error::Vanishing { at, value });
    }
    prob.require_schrodinger(f, "f")?;
    prob.require_schrodinger(u, "u")?;
    let h = u.div(f)?.wirtinger().d_z;
    let h2 = h.mul_real(&f.square())?;
    let eval = |c: &Contour| -> Result<f64> {
        Ok(line_integral_dz(&h, c)?.re.abs() + line_integral_dz(&h2, c)?.im.abs())
    };
    let table = contour_table(
        gamma,
        levels,
        grid_spacing(&[
            f.is_grid().then(|| f.domain()),
            u.is_grid().then(|| u.domain()),
        ]),
        eval,
    )?;
    let residual = table.last().map(|r| r.1).unwrap_or(f64::NAN);
    let scale = h.max_modulus(0)?.max(h2.max_modulus(0)?);
    let tol = tolerance
        .unwrap_or_else(|| tolerance_for(CAUCHY_TOL, f.grid_h2().or(u.grid_h2()), scale, prob));
    Ok(IdentityResult::new("cauchy-schrodinger", residual, tol).with_refinement(table))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceReduction {
    /// `∮u_z dz = 0` for harmonic `u`.
    Gradient,
    /// `Re ∮∂_z(1/f) dz = 0` for harmonic nonvanishing `f`.
    Reciprocal,
}

pub fn cauchy_laplace_reductions(
    field: &ScalarField,
    gamma: &Contour,
    which: LaplaceReduction,
    levels: usize,
    tolerance: Option<f64>,
) -> Result<IdentityResult> {
    let prob = RiccatiProblem::constant(0.0, field.domain())?;
    require_closed(gamma, field.domain())?;
    let what = match which {
        LaplaceReduction::Gradient => "u",
        LaplaceReduction::Reciprocal => "f",
    };
    let residual = prob.schrodinger_residual_max(field)?;
    let scale = field.max_abs(0)?.max(1.0);
    let harmonic_tol = prob.tol.solution_for(field.grid_h2(), scale) * scale;
    if !(residual < harmonic_tol) {
        return Err(Error::NotASolution {
            what: format!("{what} (not harmonic)"),
            residual,
            tolerance: harmonic_tol,
        });
    }
    let (g, name) = match which {
        LaplaceReduction::Gradient => (field.wirtinger().d_z, "laplace-gradient"),
        LaplaceReduction::Reciprocal => {
            let (at, value) = field.min_abs(0)?;
            if !(value > prob.tol.nonvanishing) {
                return Err(Error::Vanishing { at, value });
            }
            (field.recip()?.wirtinger().d_z, "laplace-reciprocal")
        }
    };
    let eval = |c: &Contour| -> Result<f64> {
        let i = line_integral_dz(&g, c)?;
        Ok(match which {
            LaplaceReduction::Gradient => i.norm(),
            LaplaceReduction::Reciprocal => i.re.abs(),
        })
    };
    let table = contour_table(
        gamma,
        levels,
        grid_spacing(&[field.is_grid().then(|| field.domain())]),
        eval,
    )?;
    let residual = table.last().map(|r| r.1).unwrap_or(f64::NAN);
    let tol = tolerance.unwrap_or_else(|| {
        tolerance_for(
            CAUCHY_TOL,
            field.grid_h2(),
            g.max_modulus(0).unwrap_or(1.0),
            &prob,
        )
    });
    Ok(IdentityResult::new(name, residual, tol).with_refinement(table))
}

/// Where the truncated representation is compared with the exact one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestRegion {
    Disk {
        center: Point,
        radius: f64,
    },
    Annulus {
        center: Point,
        inner: f64,
        outer: f64,
    },
    Rect {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
}

impl TestRegion {
    /// Deterministic sample points: a polar lattice for disks and annuli
    /// (including the outer circle), a 21×21 lattice for rectangles.
    pub fn points(&self) -> Vec<Point> {
        let polar = |c: Point, r0: f64, r1: f64| {
            let mut v = Vec::new();
            if r0 == 0.0 {
                v.push(c);
            }
            let rings = 16;
            for k in 0..rings {
                let r = r1 - (r1 - r0) * k as f64 / rings as f64;
                for a in 0..64 {
                    let t = std::f64::consts::TAU * a as f64 / 64.0;
                    v.push(Point {
                        x: c.x + r * t.cos(),
                        y: c.y + r * t.sin(),
                    });
                }
            }
            if r0 > 0.0 {
                for a in 0..64 {
                    let t = std::f64::consts::TAU * a as f64 / 64.0;
                    v.push(Point {
                        x: c.x + r0 * t.cos(),
                        y: c.y + r0 * t.sin(),
                    });
                }
            }
            v
        };
        match *self {
            TestRegion::Disk { center, radius } => polar(center, 0.0, radius),
            TestRegion::Annulus {
                center,
                inner,
                outer,
            } => polar(center, inner, outer),
            TestRegion::Rect {
                x_min,
                x_max,
                y_min,
                y_max,
            } => {
                let n = 21;
                let mut v = Vec::with_capacity(n * n);
                for j in 0..n {
                    for i in 0..n {
                        v.push(Point {
                            x: x_min + (x_max - x_min) * i as f64 / (n - 1) as f64,
                            y: y_min + (y_max - y_min) * j as f64 / (n - 1) as f64,
                        });
                    }
                }
                v
            }
        }
    }

    /// Largest `|z − z0|` over the region.
    pub fn max_distance(&self, z0: Point) -> f64 {
        self.points()
            .iter()
            .map(|p| (p.as_complex() - z0.as_complex()).norm())
            .fold(0.0, f64::max)
    }
}

/// Taylor data of an analytic `W` around `z0`: coefficients `a_n` of
/// `Σ a_n (z − z0)^n`, valid for `|z − z0| < R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormalPowerBaseline {
    pub z0: Point,
    pub radius: f64,
    pub coefficients: Vec<Complex64>,
}

impl FormalPowerBaseline {
    /// `a_n = (1/M) Σ_k W(z0 + r e^{iθ_k}) (r e^{iθ_k})^{−n}` on the circle of
    /// radius `r = 0.1 R` with `M = 128` nodes.
    pub fn from_contour(w: &ComplexField, z0: Point, radius: f64, degree: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let r = TAYLOR_RADIUS_FRACTION * radius;
        let m = TAYLOR_NODES;
        let mut a = vec![Complex64::new(0.0, 0.0); degree + 1];
        for k in 0..m {
            let zeta = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / m as f64);
            let val = w.evaluate(Point::from_complex(z0.as_complex() + zeta))?;
            let inv = zeta.inv();
            let mut p = Complex64::new(1.0, 0.0);
            for c in a.iter_mut() {
                *c += val * p;
                p *= inv;
            }
        }
        for c in a.iter_mut() {
            *c /= m as f64;
        }
        Ok(FormalPowerBaseline {
            z0,
            radius,
            coefficients: a,
        })
    }

    /// `(S_N(z), S_N'(z))` for the partial sum of degree `n`.
    pub fn partial_sum(&self, n: usize, z: Complex64) -> (Complex64, Complex64) {
        let w = z - self.z0.as_complex();
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().take(n + 1).rev() {
            ds = ds * w + s;
            s = s * w + c;
        }
        (s, ds)
    }

    /// `∂_z Re S_N / Re S_N = (S_N'/2) / Re S_N`.
    pub fn q_partial(&self, n: usize, p: Point) -> Result<Complex64> {
        let (s, ds) = self.partial_sum(n, p.as_complex());
        if s.re.abs() <= crate::field::NONVANISHING_EPS {
            return Err(Error::Vanishing {
                at: p,
                value: s.re.abs(),
            });
        }
        Ok(ds / (2.0 * s.re))
    }
}

/// Compares `Q = ∂_z Re W / Re W` with the ratios built from the Taylor
/// partial sums of degree `1..=n_terms` over `region`. The refinement table
/// lists `(N, max |Q_N − Q|)`.
pub fn euler_second_baseline(
    w: &ComplexField,
    z0: Point,
    radius: f64,
    n_terms: usize,
    region: &TestRegion,
    tolerance: Option<f64>,
) -> Result<IdentityResult> {
    if n_terms == 0 {
        return Err(Error::Parameter("need at least one term".into()));
    }
    let analytic = w.d_zbar()?.max_modulus(0)?;
    let scale = w.max_modulus(0)?.max(1.0);
    if !(analytic < 1e-8 * scale) {
        return Err(Error::NotASolution {
            what: "W (not analytic)".into(),
            residual: analytic,
            tolerance: 1e-8 * scale,
        });
    }
    let pts = region.points();
    if region.max_distance(z0) >= radius {
        return Err(Error::Parameter(format!(
            "test region reaches |z - z0| = {} beyond the radius {radius}",
            region.max_distance(z0)
        )));
    }
    let dw = w.d_z()?;
    let exact = pts
        .iter()
        .map(|&p| {
            let v = w.evaluate(p)?;
            if v.re.abs() <= crate::field::NONVANISHING_EPS {
                return Err(Error::Vanishing {
                    at: p,
                    value: v.re.abs(),
                });
            }
            Ok(dw.evaluate(p)? / (2.0 * v.re))
        })
        .collect::<Result<Vec<_>>>()?;
    let base = FormalPowerBaseline::from_contour(w, z0, radius, n_terms)?;
    let mut table = Vec::with_capacity(n_terms);
    for n in 1..=n_terms {
        let mut worst = 0.0f64;
        let mut skipped = false;
        for (p, q) in pts.iter().zip(&exact) {
            match base.q_partial(n, *p) {
                Ok(v) => worst = worst.max((v - q).norm()),
                // low-degree partial sums of polynomials may vanish; only the
                // final degree has to be usable
                Err(Error::Vanishing { .. }) if n < n_terms => {
                    skipped = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !skipped {
            table.push((n as f64, worst));
        }
    }
    let residual = table.last().unwrap().1;
    Ok(
        IdentityResult::new("euler2-baseline", residual, tolerance.unwrap_or(EULER2_TOL))
            .with_refinement(table),
    )
}
