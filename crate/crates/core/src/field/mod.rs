//! Real and complex scalar fields on planar rectangles.
//!
//! A [`ScalarField`] is backed either by an [`Expr`] (exact derivatives) or by
//! uniform grid samples (second-order finite differences, bilinear
//! evaluation). Mixing backends in arithmetic samples the expression onto the
//! grid, so any pipeline touching grid data stays on that grid.

pub(crate) mod grid;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, CExpr, Expr, Var};
use grid::Axis;

/// Values whose modulus falls below this count as zeros of a field.
pub const NONVANISHING_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Parameter(format!("non-finite point ({x}, {y})")));
        }
        Ok(Point { x, y })
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Point { x: z.re, y: z.im }
    }
}

/// Rectangle `[x_min, x_max] x [y_min, y_max]` with a base point and the
/// `nx x ny` node lattice used for grids and for sampled diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainSpec {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    base: Point,
    nx: usize,
    ny: usize,
}

impl DomainSpec {
    /// Base point defaults to the centre of the rectangle.
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidDomain("bounds must be finite".into()));
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidDomain(format!(
                "empty rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::Resolution { nx, ny });
        }
        let base = Point {
            x: 0.5 * (x_min + x_max),
            y: 0.5 * (y_min + y_max),
        };
        Ok(DomainSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            base,
            nx,
            ny,
        })
    }

    pub fn with_base(mut self, base: Point) -> Result<Self> {
        if !self.contains(base) {
            return Err(Error::InvalidDomain(format!(
                "base point ({}, {}) outside the rectangle",
                base.x, base.y
            )));
        }
        self.base = base;
        Ok(self)
    }

    pub fn with_resolution(self, nx: usize, ny: usize) -> Result<Self> {
        let d = DomainSpec::new(self.x_min, self.x_max, self.y_min, self.y_max, nx, ny)?;
        d.with_base(self.base)
    }

    /// Same rectangle with the grid spacing halved.
    pub fn refined(&self) -> Self {
        let mut d = self.clone();
        d.nx = 2 * self.nx - 1;
        d.ny = 2 * self.ny - 1;
        d
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    pub fn base(&self) -> Point {
        self.base
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn h_max(&self) -> f64 {
        self.hx().max(self.hy())
    }

    pub fn center(&self) -> Point {
        Point {
            x: 0.5 * (self.x_min + self.x_max),
            y: 0.5 * (self.y_min + self.y_max),
        }
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        // Last node pinned to the bound so refinement keeps shared nodes bit-identical.
        let x = if i == self.nx - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx()
        };
        let y = if j == self.ny - 1 {
            self.y_max
        } else {
            self.y_min + j as f64 * self.hy()
        };
        Point { x, y }
    }

    /// All lattice nodes, row-major with `y` increasing between rows.
    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.node(i, j)))
    }

    /// Lattice nodes at least `margin` cells away from every edge.
    pub fn interior_nodes(&self, margin: usize) -> Vec<Point> {
        let m = margin.min((self.nx - 1) / 2).min((self.ny - 1) / 2);
        (m..self.ny - m)
            .flat_map(|j| (m..self.nx - m).map(move |i| (i, j)))
            .map(|(i, j)| self.node(i, j))
            .collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        let tx = 1e-12 * (self.x_max - self.x_min);
        let ty = 1e-12 * (self.y_max - self.y_min);
        p.x >= self.x_min - tx
            && p.x <= self.x_max + tx
            && p.y >= self.y_min - ty
            && p.y <= self.y_max + ty
    }

    /// Same rectangle (resolution and base point may differ).
    pub fn same_region(&self, o: &DomainSpec) -> bool {
        self.x_min == o.x_min
            && self.x_max == o.x_max
            && self.y_min == o.y_min
            && self.y_max == o.y_max
    }

    fn same_lattice(&self, o: &DomainSpec) -> bool {
        self.same_region(o) && self.nx == o.nx && self.ny == o.ny
    }
}

#[derive(Clone)]
enum Repr {
    Expr(Expr),
    Grid(Arc<Vec<f64>>),
}

#[derive(Clone)]
pub struct ScalarField {
    domain: DomainSpec,
    repr: Repr,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Expr(e) => write!(f, "ScalarField::Expr({e})"),
            Repr::Grid(_) => write!(
                f,
                "ScalarField::Grid({}x{})",
                self.domain.nx, self.domain.ny
            ),
        }
    }
}

impl ScalarField {
    pub fn from_expr(expr: Expr, domain: &DomainSpec) -> Self {
        ScalarField {
            domain: domain.clone(),
            repr: Repr::Expr(expr),
        }
    }

    pub fn constant(c: f64, domain: &DomainSpec) -> Self {
        Self::from_expr(Expr::constant(c), domain)
    }

    pub fn parse(text: &str, domain: &DomainSpec) -> Result<Self> {
        Ok(Self::from_expr(expr::parse_real(text)?, domain))
    }

    pub fn from_grid(domain: &DomainSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.nx * domain.ny {
            return Err(Error::Parameter(format!(
                "grid has {} samples, expected {}",
                values.len(),
                domain.nx * domain.ny
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite grid sample at index {k}"
            )));
        }
        Ok(ScalarField {
            domain: domain.clone(),
            repr: Repr::Grid(Arc::new(values)),
        })
    }

    /// Samples `f` on the lattice of `domain`.
    pub fn sampled(domain: &DomainSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::from_grid(domain, domain.nodes().map(|p| f(p.x, p.y)).collect())
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.repr {
            Repr::Expr(e) => Some(e),
            Repr::Grid(_) => None,
        }
    }

    pub fn grid_values(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Grid(v) => Some(v),
            Repr::Expr(_) => None,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.repr, Repr::Grid(_))
    }

    /// Squared grid spacing for grid fields; `None` for exact fields.
    pub fn grid_h2(&self) -> Option<f64> {
        self.is_grid().then(|| self.domain.h_max().powi(2))
    }

    /// Same field re-expressed on another domain description (base point or
    /// sample resolution). Grid fields only accept an identical lattice.
    pub fn on_domain(&self, domain: &DomainSpec) -> Result<Self> {
        match &self.repr {
            Repr::Expr(e) if self.domain.same_region(domain) => {
                Ok(Self::from_expr(e.clone(), domain))
            }
            Repr::Grid(v) if self.domain.same_lattice(domain) => Ok(ScalarField {
                domain: domain.clone(),
                repr: Repr::Grid(v.clone()),
            }),
            _ => Err(Error::DomainMismatch),
        }
    }

    pub fn to_grid(&self) -> Result<Self> {
        match &self.repr {
            Repr::Grid(_) => Ok(self.clone()),
            Repr::Expr(_) => Self::from_grid(&self.domain, self.node_values(&self.domain)?),
        }
    }

    fn node_values(&self, lattice: &DomainSpec) -> Result<Vec<f64>> {
        match &self.repr {
            Repr::Grid(v) if self.domain.same_lattice(lattice) => Ok(v.as_ref().clone()),
            Repr::Grid(_) => Err(Error::DomainMismatch),
            Repr::Expr(e) => {
                if !self.domain.same_region(lattice) {
                    return Err(Error::DomainMismatch);
                }
                lattice.nodes().map(|p| e.eval(p.x, p.y)).collect()
            }
        }
    }

    pub fn evaluate(&self, p: Point) -> Result<f64> {
        if !self.domain.contains(p) {
            return Err(Error::OutsideDomain(p));
        }
        self.eval_unchecked(p)
    }

    pub(crate) fn eval_unchecked(&self, p: Point) -> Result<f64> {
        match &self.repr {
            Repr::Expr(e) => e.eval(p.x, p.y),
            Repr::Grid(v) => Ok(grid::bilinear(&self.domain, v, p)),
        }
    }

    fn map(&self, sym: impl Fn(&Expr) -> Expr, num: impl Fn(f64) -> f64) -> Self {
        match &self.repr {
            Repr::Expr(e) => Self::from_expr(sym(e), &self.domain),
            Repr::Grid(v) => ScalarField {
                domain: self.domain.clone(),
                repr: Repr::Grid(Arc::new(v.iter().map(|&a| num(a)).collect())),
            },
        }
    }

    fn zip(
        &self,
        o: &ScalarField,
        sym: impl Fn(&Expr, &Expr) -> Expr,
        num: impl Fn(f64, f64, Point) -> Result<f64>,
    ) -> Result<Self> {
        if let (Repr::Expr(a), Repr::Expr(b)) = (&self.repr, &o.repr) {
            if !self.domain.same_region(&o.domain) {
                return Err(Error::DomainMismatch);
            }
            return Ok(Self::from_expr(sym(a, b), &self.domain));
        }
        let lattice = if self.is_grid() {
            &self.domain
        } else {
            &o.domain
        };
        let a = self.node_values(lattice)?;
        let b = o.node_values(lattice)?;
        let out = a
            .iter()
            .zip(&b)
            .zip(lattice.nodes())
            .map(|((&p, &q), at)| num(p, q, at))
            .collect::<Result<Vec<_>>>()?;
        Self::from_grid(lattice, out)
    }

    pub fn add(&self, o: &ScalarField) -> Result<Self> {
        self.zip(o, Expr::add, |a, b, _| Ok(a + b))
    }

    pub fn sub(&self, o: &ScalarField) -> Result<Self> {
        self.zip(o, Expr::sub, |a, b, _| Ok(a - b))
    }

    pub fn mul(&self, o: &ScalarField) -> Result<Self> {
        self.zip(o, Expr::mul, |a, b, _| Ok(a * b))
    }

    pub fn div(&self, o: &ScalarField) -> Result<Self> {
        self.zip(o, Expr::div, |a, b, at| {
            if b.abs() < expr::SINGULARITY_EPS {
                Err(Error::Singularity(at))
            } else {
                Ok(a / b)
            }
        })
    }

    pub fn neg(&self) -> Self {
        self.map(Expr::neg, |a| -a)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|e| e.scale(c), |a| c * a)
    }

    pub fn add_const(&self, c: f64) -> Self {
        self.map(|e| e.add(&Expr::constant(c)), |a| a + c)
    }

    pub fn square(&self) -> Self {
        self.map(Expr::square, |a| a * a)
    }

    pub fn exp(&self) -> Self {
        self.map(Expr::exp, f64::exp)
    }

    pub fn sin(&self) -> Self {
        self.map(Expr::sin, f64::sin)
    }

    pub fn cos(&self) -> Self {
        self.map(Expr::cos, f64::cos)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(1.0, &self.domain).div(self)
    }

    fn partial(&self, var: Var) -> Self {
        match &self.repr {
            Repr::Expr(e) => Self::from_expr(e.diff(var), &self.domain),
            Repr::Grid(v) => {
                let axis = if var == Var::X { Axis::X } else { Axis::Y };
                ScalarField {
                    domain: self.domain.clone(),
                    repr: Repr::Grid(Arc::new(grid::first_derivative(&self.domain, v, axis))),
                }
            }
        }
    }

    pub fn dx(&self) -> Self {
        self.partial(Var::X)
    }

    pub fn dy(&self) -> Self {
        self.partial(Var::Y)
    }

    /// `(d_z, d_zbar)` with `d_z = (dx - i dy)/2` and `d_zbar = (dx + i dy)/2`.
    pub fn wirtinger(&self) -> Wirtinger {
        let hx = self.dx().scale(0.5);
        let hy = self.dy().scale(0.5);
        Wirtinger {
            d_z: ComplexField::from_parts_unchecked(hx.clone(), hy.neg()),
            d_zbar: ComplexField::from_parts_unchecked(hx, hy),
        }
    }

    /// Exact `dxx + dyy` for expressions, five-point stencil for grids.
    pub fn laplacian(&self) -> Self {
        match &self.repr {
            Repr::Expr(e) => {
                let l = e
                    .diff(Var::X)
                    .diff(Var::X)
                    .add(&e.diff(Var::Y).diff(Var::Y));
                Self::from_expr(l, &self.domain)
            }
            Repr::Grid(v) => ScalarField {
                domain: self.domain.clone(),
                repr: Repr::Grid(Arc::new(grid::laplacian(&self.domain, v))),
            },
        }
    }

    /// `(|grad f| / f)^2`; `f` must stay away from zero on the sample set.
    pub fn gradient_norm_ratio(&self) -> Result<Self> {
        self.check_nonvanishing(0)?;
        self.dx()
            .square()
            .add(&self.dy().square())?
            .div(&self.square())
    }

    /// Values on the lattice nodes at least `margin` cells from the edges.
    pub fn samples(&self, margin: usize) -> Result<Vec<(Point, f64)>> {
        self.domain
            .interior_nodes(margin)
            .into_iter()
            .map(|p| Ok((p, self.eval_unchecked(p)?)))
            .collect()
    }

    pub fn max_abs(&self, margin: usize) -> Result<f64> {
        Ok(self
            .samples(margin)?
            .iter()
            .fold(0.0, |m, (_, v)| m.max(v.abs())))
    }

    pub fn max_abs_at(&self, points: &[Point]) -> Result<f64> {
        points
            .iter()
            .try_fold(0.0f64, |m, &p| Ok(m.max(self.evaluate(p)?.abs())))
    }

    /// Smallest sampled modulus and where it occurs.
    pub fn min_abs(&self, margin: usize) -> Result<(Point, f64)> {
        let s = self.samples(margin)?;
        Ok(s.into_iter().map(|(p, v)| (p, v.abs())).fold(
            (self.domain.base, f64::INFINITY),
            |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            },
        ))
    }

    pub fn check_nonvanishing(&self, margin: usize) -> Result<()> {
        let (at, value) = self.min_abs(margin)?;
        if value.is_nan() || value <= NONVANISHING_EPS {
            return Err(Error::Vanishing { at, value });
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (domain, values) = grid::from_csv(path, &text)?;
        Self::from_grid(&domain, values)
    }

    /// Writes the field sampled on its lattice in the grid CSV format.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let values = self.node_values(&self.domain)?;
        std::fs::write(path, grid::to_csv(&self.domain, &values)).map_err(|e| Error::io(path, e))
    }
}

/// Both Wirtinger derivatives of a field.
#[derive(Clone, Debug)]
pub struct Wirtinger {
    pub d_z: ComplexField,
    pub d_zbar: ComplexField,
}

#[derive(Clone, Debug)]
pub struct ComplexField {
    re: ScalarField,
    im: ScalarField,
}

impl ComplexField {
    pub fn new(re: ScalarField, im: ScalarField) -> Result<Self> {
        if !re.domain.same_region(&im.domain) {
            return Err(Error::DomainMismatch);
        }
        if re.is_grid() && im.is_grid() && !re.domain.same_lattice(&im.domain) {
            return Err(Error::DomainMismatch);
        }
        Ok(Self::from_parts_unchecked(re, im))
    }

    fn from_parts_unchecked(re: ScalarField, im: ScalarField) -> Self {
        ComplexField { re, im }
    }

    pub fn from_real(re: ScalarField) -> Self {
        let im = ScalarField::constant(0.0, &re.domain);
        ComplexField { re, im }
    }

    pub fn from_cexpr(e: CExpr, domain: &DomainSpec) -> Self {
        ComplexField {
            re: ScalarField::from_expr(e.re, domain),
            im: ScalarField::from_expr(e.im, domain),
        }
    }

    pub fn constant(c: Complex64, domain: &DomainSpec) -> Self {
        Self::from_cexpr(CExpr::constant(c), domain)
    }

    pub fn parse(text: &str, domain: &DomainSpec) -> Result<Self> {
        Ok(Self::from_cexpr(expr::parse_complex(text)?, domain))
    }

    pub fn re(&self) -> &ScalarField {
        &self.re
    }

    pub fn im(&self) -> &ScalarField {
        &self.im
    }

    pub fn domain(&self) -> &DomainSpec {
        if self.im.is_grid() {
            &self.im.domain
        } else {
            &self.re.domain
        }
    }

    pub fn is_grid(&self) -> bool {
        self.re.is_grid() || self.im.is_grid()
    }

    pub fn grid_h2(&self) -> Option<f64> {
        self.re.grid_h2().or(self.im.grid_h2())
    }

    pub fn on_domain(&self, domain: &DomainSpec) -> Result<Self> {
        Ok(ComplexField {
            re: self.re.on_domain(domain)?,
            im: self.im.on_domain(domain)?,
        })
    }

    pub fn to_grid(&self) -> Result<Self> {
        ComplexField::new(self.re.to_grid()?, self.im.to_grid()?)
    }

    pub fn evaluate(&self, p: Point) -> Result<Complex64> {
        Ok(Complex64::new(self.re.evaluate(p)?, self.im.evaluate(p)?))
    }

    pub(crate) fn eval_unchecked(&self, p: Point) -> Result<Complex64> {
        Ok(Complex64::new(
            self.re.eval_unchecked(p)?,
            self.im.eval_unchecked(p)?,
        ))
    }

    fn is_real_expr(&self) -> bool {
        self.im.expr().is_some_and(Expr::is_zero)
    }

    pub fn add(&self, o: &ComplexField) -> Result<Self> {
        ComplexField::new(self.re.add(&o.re)?, self.im.add(&o.im)?)
    }

    pub fn sub(&self, o: &ComplexField) -> Result<Self> {
        ComplexField::new(self.re.sub(&o.re)?, self.im.sub(&o.im)?)
    }

    pub fn mul(&self, o: &ComplexField) -> Result<Self> {
        let re = self.re.mul(&o.re)?.sub(&self.im.mul(&o.im)?)?;
        let im = self.re.mul(&o.im)?.add(&self.im.mul(&o.re)?)?;
        ComplexField::new(re, im)
    }

    pub fn mul_real(&self, o: &ScalarField) -> Result<Self> {
        ComplexField::new(self.re.mul(o)?, self.im.mul(o)?)
    }

    pub fn div(&self, o: &ComplexField) -> Result<Self> {
        if o.is_real_expr() {
            return self.div_real(&o.re);
        }
        let den = o.modulus_sq()?;
        let re = self.re.mul(&o.re)?.add(&self.im.mul(&o.im)?)?.div(&den)?;
        let im = self.im.mul(&o.re)?.sub(&self.re.mul(&o.im)?)?.div(&den)?;
        ComplexField::new(re, im)
    }

    pub fn div_real(&self, o: &ScalarField) -> Result<Self> {
        ComplexField::new(self.re.div(o)?, self.im.div(o)?)
    }

    pub fn conj(&self) -> Self {
        ComplexField {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn neg(&self) -> Self {
        ComplexField {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        ComplexField {
            re: self.re.scale(c),
            im: self.im.scale(c),
        }
    }

    pub fn mul_i(&self) -> Self {
        ComplexField {
            re: self.im.neg(),
            im: self.re.clone(),
        }
    }

    pub fn add_const(&self, c: Complex64) -> Self {
        ComplexField {
            re: self.re.add_const(c.re),
            im: self.im.add_const(c.im),
        }
    }

    pub fn modulus_sq(&self) -> Result<ScalarField> {
        self.re.square().add(&self.im.square())
    }

    pub fn exp(&self) -> Result<Self> {
        if self.is_real_expr() {
            return Ok(ComplexField::from_real(self.re.exp()));
        }
        let mag = self.re.exp();
        ComplexField::new(mag.mul(&self.im.cos())?, mag.mul(&self.im.sin())?)
    }

    pub fn wirtinger(&self) -> Result<Wirtinger> {
        let (ax, ay) = (self.re.dx(), self.re.dy());
        let (bx, by) = (self.im.dx(), self.im.dy());
        let d_z = ComplexField::new(ax.add(&by)?.scale(0.5), bx.sub(&ay)?.scale(0.5))?;
        let d_zbar = ComplexField::new(ax.sub(&by)?.scale(0.5), bx.add(&ay)?.scale(0.5))?;
        Ok(Wirtinger { d_z, d_zbar })
    }

    pub fn d_z(&self) -> Result<Self> {
        Ok(self.wirtinger()?.d_z)
    }

    pub fn d_zbar(&self) -> Result<Self> {
        Ok(self.wirtinger()?.d_zbar)
    }

    pub fn samples(&self, margin: usize) -> Result<Vec<(Point, Complex64)>> {
        self.domain()
            .interior_nodes(margin)
            .into_iter()
            .map(|p| Ok((p, self.eval_unchecked(p)?)))
            .collect()
    }

    pub fn max_modulus(&self, margin: usize) -> Result<f64> {
        Ok(self
            .samples(margin)?
            .iter()
            .fold(0.0, |m, (_, v)| m.max(v.norm())))
    }

    pub fn max_modulus_at(&self, points: &[Point]) -> Result<f64> {
        points
            .iter()
            .try_fold(0.0f64, |m, &p| Ok(m.max(self.evaluate(p)?.norm())))
    }

    pub fn min_modulus(&self, margin: usize) -> Result<(Point, f64)> {
        Ok(self
            .samples(margin)?
            .into_iter()
            .map(|(p, v)| (p, v.norm()))
            .fold((self.domain().base, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            }))
    }

    /// Reads `<prefix>_re.csv` and `<prefix>_im.csv`.
    pub fn read_csv(prefix: &Path) -> Result<Self> {
        let (re_path, im_path) = complex_paths(prefix);
        ComplexField::new(
            ScalarField::read_csv(&re_path)?,
            ScalarField::read_csv(&im_path)?,
        )
    }

    pub fn write_csv(&self, prefix: &Path) -> Result<()> {
        let (re_path, im_path) = complex_paths(prefix);
        self.re.write_csv(&re_path)?;
        self.im.write_csv(&im_path)
    }
}

fn complex_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let base = prefix.as_os_str().to_string_lossy();
    (
        PathBuf::from(format!("{base}_re.csv")),
        PathBuf::from(format!("{base}_im.csv")),
    )
}

impl From<ScalarField> for ComplexField {
    fn from(f: ScalarField) -> Self {
        ComplexField::from_real(f)
    }
}
