//! Contours, line integrals and the antiderivative operators `A` and `Ā`.
//!
//! `Ā[Φ]` inverts `∂_z̄` and `A[Φ]` inverts `∂_z` on real-valued scalars. Both
//! integrate along the L-shaped path from the base point: vertically at
//! `x = x0` up to the target height, then horizontally to the target.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::{grid, ComplexField, DomainSpec, Point, ScalarField};

const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];

const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Relative change between successive dyadic refinements that ends
/// adaptive segment quadrature.
pub const REFINE_REL_TOL: f64 = 1e-10;
pub const MAX_PANELS: usize = 1 << 14;

/// Composite 8-point Gauss–Legendre over `[a, b]` with `panels` equal panels.
pub fn gauss_legendre<T>(
    mut f: impl FnMut(f64) -> Result<T>,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut acc = T::default();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (t, w) in GL8_NODES.iter().zip(&GL8_WEIGHTS) {
            acc = acc + f(mid + half * t)? * (w * half);
        }
    }
    Ok(acc)
}

/// Dyadically refined composite Gauss–Legendre: doubles the panel count
/// until two successive estimates agree to [`REFINE_REL_TOL`] or
/// [`MAX_PANELS`] is reached.
pub fn integrate_adaptive(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut prev = gauss_legendre(&mut f, a, b, 1)?;
    let mut panels = 1;
    loop {
        panels *= 2;
        let mut l1 = 0.0;
        let cur = gauss_legendre(
            |t| {
                let v = f(t)?;
                l1 += v.abs();
                Ok(v)
            },
            a,
            b,
            panels,
        )?;
        let scale = l1 * (b - a).abs() / (8 * panels) as f64;
        let diff = (cur - prev).abs();
        if diff <= REFINE_REL_TOL * cur.abs() || diff <= 1e-15 * scale || panels >= MAX_PANELS {
            return Ok(cur);
        }
        prev = cur;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Contour {
    /// Counterclockwise circle sampled by the trapezoid rule.
    Circle {
        center: Point,
        radius: f64,
        n_nodes: usize,
    },
    /// Piecewise-linear path; closed when the last vertex repeats the first.
    Polyline {
        vertices: Vec<Point>,
        panels_per_segment: usize,
    },
    /// Vertical then horizontal path from `from` to `to`.
    LPath {
        from: Point,
        to: Point,
        panels_per_segment: usize,
    },
}

impl Contour {
    pub fn circle(center: Point, radius: f64, n_nodes: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidContour(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if n_nodes < 16 {
            return Err(Error::InvalidContour(format!(
                "circle needs at least 16 nodes, got {n_nodes}"
            )));
        }
        Ok(Contour::Circle {
            center,
            radius,
            n_nodes,
        })
    }

    pub fn polyline(vertices: Vec<Point>, panels_per_segment: usize) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidContour(
                "polyline needs at least two vertices".into(),
            ));
        }
        if panels_per_segment == 0 {
            return Err(Error::InvalidContour(
                "panels per segment must be positive".into(),
            ));
        }
        Ok(Contour::Polyline {
            vertices,
            panels_per_segment,
        })
    }

    pub fn l_path(from: Point, to: Point, panels_per_segment: usize) -> Result<Self> {
        if panels_per_segment == 0 {
            return Err(Error::InvalidContour(
                "panels per segment must be positive".into(),
            ));
        }
        Ok(Contour::LPath {
            from,
            to,
            panels_per_segment,
        })
    }

    /// Parses `circle cx cy r n`, `polyline x1 y1 ... xk yk n_per_segment` or
    /// `lpath [x y]` (from the domain base point to `(x, y)`, default the
    /// upper-right corner).
    pub fn parse(spec: &str, domain: &DomainSpec) -> Result<Self> {
        let mut words = spec.split_whitespace();
        let kind = words.next().unwrap_or("");
        let nums = words
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|_| Error::InvalidContour(format!("`{w}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidContour(format!(
                    "`{v}` is not a positive count"
                )))
            }
        };
        match kind {
            "circle" => {
                if nums.len() != 4 {
                    return Err(Error::InvalidContour("usage: circle cx cy r n".into()));
                }
                Contour::circle(Point::new(nums[0], nums[1])?, nums[2], count(nums[3])?)
            }
            "polyline" => {
                if nums.len() < 5 || nums.len() % 2 == 0 {
                    return Err(Error::InvalidContour(
                        "usage: polyline x1 y1 x2 y2 ... n_per_segment".into(),
                    ));
                }
                let (coords, n) = nums.split_at(nums.len() - 1);
                let vertices = coords
                    .chunks(2)
                    .map(|c| Point::new(c[0], c[1]))
                    .collect::<Result<Vec<_>>>()?;
                Contour::polyline(vertices, count(n[0])?)
            }
            "lpath" => {
                let to = match nums.as_slice() {
                    [] => Point::new(domain.x_max(), domain.y_max())?,
                    [x, y] => Point::new(*x, *y)?,
                    _ => return Err(Error::InvalidContour("usage: lpath [x y]".into())),
                };
                Contour::l_path(domain.base(), to, 4)
            }
            other => Err(Error::InvalidContour(format!(
                "unknown contour kind `{other}`"
            ))),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Contour::Circle { .. } => true,
            Contour::Polyline { vertices, .. } => {
                let (a, b) = (vertices[0], vertices[vertices.len() - 1]);
                (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12
            }
            Contour::LPath { .. } => false,
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Contour::Circle { .. } => Vec::new(),
            Contour::Polyline { vertices, .. } => vertices.clone(),
            Contour::LPath { from, to, .. } => vec![*from, Point { x: from.x, y: to.y }, *to],
        }
    }

    /// Node count for circles, panels per segment otherwise.
    pub fn resolution(&self) -> usize {
        match self {
            Contour::Circle { n_nodes, .. } => *n_nodes,
            Contour::Polyline {
                panels_per_segment, ..
            }
            | Contour::LPath {
                panels_per_segment, ..
            } => *panels_per_segment,
        }
    }

    pub fn with_resolution(&self, n: usize) -> Result<Self> {
        match self {
            Contour::Circle { center, radius, .. } => Contour::circle(*center, *radius, n),
            Contour::Polyline { vertices, .. } => Contour::polyline(vertices.clone(), n),
            Contour::LPath { from, to, .. } => Contour::l_path(*from, *to, n),
        }
    }

    /// Resolution suited to bilinear grid data with spacing `h`, whose
    /// derivative jumps at every cell edge otherwise leave an h-independent
    /// quadrature error. Circles get nodes at most `h/4` apart; polylines get
    /// a multiple of one panel per cell, so panels of grid-aligned segments
    /// end exactly on cell edges.
    pub fn resolved_for(&self, h: f64) -> Result<Self> {
        let n = match self {
            Contour::Circle {
                radius, n_nodes, ..
            } => {
                let needed = (std::f64::consts::TAU * radius / (h / 4.0)).ceil() as usize;
                needed.max(*n_nodes)
            }
            _ => {
                let longest = self
                    .vertices()
                    .windows(2)
                    .map(|s| (s[1].as_complex() - s[0].as_complex()).norm())
                    .fold(0.0, f64::max);
                let cells = ((longest / h - 1e-9).ceil() as usize).max(1);
                cells * self.resolution().div_ceil(cells)
            }
        };
        self.with_resolution(n)
    }

    pub fn check_inside(&self, domain: &DomainSpec) -> Result<()> {
        let pts = match self {
            Contour::Circle { center, radius, .. } => vec![
                Point {
                    x: center.x - radius,
                    y: center.y - radius,
                },
                Point {
                    x: center.x + radius,
                    y: center.y + radius,
                },
            ],
            _ => self.vertices(),
        };
        match pts.into_iter().find(|p| !domain.contains(*p)) {
            Some(p) => Err(Error::OutsideDomain(p)),
            None => Ok(()),
        }
    }
}

/// `∮_Γ g dz`: trapezoid rule in the angle for circles, composite
/// Gauss–Legendre per segment for polylines.
pub fn line_integral_dz(g: &ComplexField, gamma: &Contour) -> Result<Complex64> {
    gamma.check_inside(g.domain())?;
    match gamma {
        Contour::Circle {
            center,
            radius,
            n_nodes,
        } => {
            let c = center.as_complex();
            let dt = std::f64::consts::TAU / *n_nodes as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..*n_nodes {
                let e = Complex64::from_polar(1.0, k as f64 * dt);
                let z = c + *radius * e;
                acc += g.evaluate(Point::from_complex(z))? * (Complex64::i() * *radius * e);
            }
            Ok(acc * dt)
        }
        _ => {
            let panels = gamma.resolution();
            let verts = gamma.vertices();
            let mut acc = Complex64::new(0.0, 0.0);
            for seg in verts.windows(2) {
                let (a, b) = (seg[0].as_complex(), seg[1].as_complex());
                let dz = b - a;
                let part = gauss_legendre(
                    |t| Ok(g.evaluate(Point::from_complex(a + t * dz))? * dz),
                    0.0,
                    1.0,
                    panels,
                )?;
                acc += part;
            }
            Ok(acc)
        }
    }
}

/// Which compatibility condition a complex field is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compat {
    /// `∂_y Φ1 − ∂_x Φ2 = 0`, required by `Ā` (inverse of `∂_z̄`).
    Dzbar,
    /// `∂_y Φ1 + ∂_x Φ2 = 0`, required by `A` (inverse of `∂_z`).
    Dz,
}

impl Compat {
    fn sign(self) -> f64 {
        match self {
            Compat::Dzbar => 1.0,
            Compat::Dz => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntiderivativeConfig {
    pub base: Point,
    /// Value of the reconstruction at the base point.
    pub constant_c: f64,
    pub compat_tol: f64,
    /// Grid inputs carry O(h²) compatibility defects; they are accepted up to
    /// `compat_tol + grid_compat_coeff * h² * max(1, max|Φ|)`.
    pub grid_compat_coeff: f64,
}

impl AntiderivativeConfig {
    pub fn new(domain: &DomainSpec) -> Self {
        AntiderivativeConfig {
            base: domain.base(),
            constant_c: 0.0,
            compat_tol: 1e-8,
            grid_compat_coeff: 50.0,
        }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant_c = c;
        self
    }

    pub fn with_base(mut self, base: Point) -> Self {
        self.base = base;
        self
    }

    pub fn with_compat_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Parameter(format!(
                "compat_tol must be positive, got {tol}"
            )));
        }
        self.compat_tol = tol;
        Ok(self)
    }
}

/// Max over the sample lattice of `|∂_y Φ1 ∓ ∂_x Φ2|`.
pub fn compatibility_check(phi: &ComplexField, which: Compat) -> Result<f64> {
    let r = phi.re().dy().add(&phi.im().dx().scale(-which.sign()))?;
    // Φ is usually itself a derivative of integrated grid data; each nested
    // one-sided stencil costs an order at the edge, so skip one more ring
    // than the residual checks do.
    r.max_abs(if r.is_grid() {
        crate::riccati::GRID_MARGIN + 1
    } else {
        0
    })
}

fn effective_compat_tol(phi: &ComplexField, cfg: &AntiderivativeConfig) -> Result<f64> {
    Ok(match phi.grid_h2() {
        None => cfg.compat_tol,
        Some(h2) => cfg.compat_tol + cfg.grid_compat_coeff * h2 * phi.max_modulus(0)?.max(1.0),
    })
}

/// `Ā[Φ]`: real `φ` with `∂_z̄ φ = Φ` and `φ(base) = c`.
pub fn op_abar(phi: &ComplexField, cfg: &AntiderivativeConfig) -> Result<ScalarField> {
    antiderivative(phi, cfg, Compat::Dzbar)
}

/// `A[Φ]`: real `φ` with `∂_z φ = Φ` and `φ(base) = c`.
pub fn op_a(phi: &ComplexField, cfg: &AntiderivativeConfig) -> Result<ScalarField> {
    antiderivative(phi, cfg, Compat::Dz)
}

fn antiderivative(
    phi: &ComplexField,
    cfg: &AntiderivativeConfig,
    which: Compat,
) -> Result<ScalarField> {
    let domain = phi.domain().clone();
    if !domain.contains(cfg.base) {
        return Err(Error::OutsideDomain(cfg.base));
    }
    let residual = compatibility_check(phi, which)?;
    let tolerance = effective_compat_tol(phi, cfg)?;
    if !(residual <= tolerance) {
        return Err(Error::Compatibility {
            residual,
            tolerance,
        });
    }
    // dφ/dx = 2Φ1, dφ/dy = ±2Φ2
    let sign = which.sign();
    match (phi.re().expr(), phi.im().expr()) {
        (Some(p1), Some(p2)) => {
            let e = Expr::potential(
                p1.scale(2.0),
                p2.scale(2.0 * sign),
                cfg.base,
                cfg.constant_c,
            );
            Ok(ScalarField::from_expr(e, &domain))
        }
        _ => {
            let gx = phi.re().scale(2.0).to_grid()?.on_domain(&domain)?;
            let gy = phi.im().scale(2.0 * sign).to_grid()?.on_domain(&domain)?;
            grid_potential(
                &domain,
                gx.grid_values().unwrap(),
                gy.grid_values().unwrap(),
                cfg,
            )
        }
    }
}

fn grid_potential(
    d: &DomainSpec,
    gx: &[f64],
    gy: &[f64],
    cfg: &AntiderivativeConfig,
) -> Result<ScalarField> {
    let (nx, ny) = (d.nx(), d.ny());
    let (hx, hy) = (d.hx(), d.hy());
    let Point { x: x0, y: y0 } = cfg.base;
    // gy along the column x = x0, linearly interpolated between grid columns
    let s = ((x0 - d.x_min()) / hx).clamp(0.0, (nx - 1) as f64);
    let i0 = (s.floor() as usize).min(nx - 2);
    let w = s - i0 as f64;
    let column: Vec<f64> = (0..ny)
        .map(|j| gy[j * nx + i0] * (1.0 - w) + gy[j * nx + i0 + 1] * w)
        .collect();
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let row = &gx[j * nx..(j + 1) * nx];
        let yj = d.node(0, j).y;
        let vertical = grid::integrate_linear(d.y_min(), hy, &column, y0, yj);
        for i in 0..nx {
            let xi = d.node(i, 0).x;
            out.push(
                cfg.constant_c + vertical + grid::integrate_linear(d.x_min(), hx, row, x0, xi),
            );
        }
    }
    ScalarField::from_grid(d, out)
}

/// `c + 2∫ Φ1 dx ± Φ2 dy` along an arbitrary polyline starting at the base
/// point; used to confirm path independence of `A` and `Ā`.
pub fn potential_along(
    phi: &ComplexField,
    path: &[Point],
    which: Compat,
    cfg: &AntiderivativeConfig,
) -> Result<f64> {
    let sign = which.sign();
    let mut acc = cfg.constant_c;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        acc += integrate_adaptive(
            |t| {
                let v = phi.evaluate(Point {
                    x: a.x + t * dx,
                    y: a.y + t * dy,
                })?;
                Ok(2.0 * (v.re * dx + sign * v.im * dy))
            },
            0.0,
            1.0,
        )?;
    }
    Ok(acc)
}
