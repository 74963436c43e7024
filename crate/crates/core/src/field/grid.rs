//! Uniform-grid kernels: second-order finite differences, bilinear
//! interpolation and the CSV exchange format.
//!
//! Samples are stored row-major with `y` increasing from row to row:
//! `values[j * nx + i]` is the value at `(x_min + i*hx, y_min + j*hy)`.

use std::fmt::Write as _;
use std::path::Path;

use super::{DomainSpec, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Axis {
    X,
    Y,
}

fn stride(d: &DomainSpec, axis: Axis) -> (usize, usize, usize, f64) {
    // (line length, step within a line, number of lines, spacing)
    match axis {
        Axis::X => (d.nx, 1, d.ny, d.hx()),
        Axis::Y => (d.ny, d.nx, d.nx, d.hy()),
    }
}

fn line_start(d: &DomainSpec, axis: Axis, line: usize) -> usize {
    match axis {
        Axis::X => line * d.nx,
        Axis::Y => line,
    }
}

/// First derivative: central differences inside, second-order one-sided
/// differences on the two boundary nodes of every line.
pub(crate) fn first_derivative(d: &DomainSpec, v: &[f64], axis: Axis) -> Vec<f64> {
    let (n, step, lines, h) = stride(d, axis);
    let mut out = vec![0.0; v.len()];
    for line in 0..lines {
        let s = line_start(d, axis, line);
        let at = |k: usize| v[s + k * step];
        out[s] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        for k in 1..n - 1 {
            out[s + k * step] = (at(k + 1) - at(k - 1)) / (2.0 * h);
        }
        out[s + (n - 1) * step] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    }
    out
}

/// Second derivative along one axis: three-point stencil inside, four-point
/// second-order one-sided stencil at the ends (three-point when the line is
/// too short).
pub(crate) fn second_derivative(d: &DomainSpec, v: &[f64], axis: Axis) -> Vec<f64> {
    let (n, step, lines, h) = stride(d, axis);
    let h2 = h * h;
    let mut out = vec![0.0; v.len()];
    for line in 0..lines {
        let s = line_start(d, axis, line);
        let at = |k: usize| v[s + k * step];
        for k in 1..n - 1 {
            out[s + k * step] = (at(k + 1) - 2.0 * at(k) + at(k - 1)) / h2;
        }
        if n >= 4 {
            out[s] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
            out[s + (n - 1) * step] =
                (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / h2;
        } else {
            out[s] = out[s + step];
            out[s + (n - 1) * step] = out[s + (n - 2) * step];
        }
    }
    out
}

/// Five-point Laplacian in the interior, one-sided second differences on the
/// boundary.
pub(crate) fn laplacian(d: &DomainSpec, v: &[f64]) -> Vec<f64> {
    let dxx = second_derivative(d, v, Axis::X);
    let dyy = second_derivative(d, v, Axis::Y);
    dxx.iter().zip(&dyy).map(|(a, b)| a + b).collect()
}

pub(crate) fn bilinear(d: &DomainSpec, v: &[f64], p: Point) -> f64 {
    let locate = |t: f64, min: f64, h: f64, n: usize| -> (usize, f64) {
        let s = ((t - min) / h).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n - 2);
        (k, s - k as f64)
    };
    let (i, tx) = locate(p.x, d.x_min, d.hx(), d.nx);
    let (j, ty) = locate(p.y, d.y_min, d.hy(), d.ny);
    let at = |i: usize, j: usize| v[j * d.nx + i];
    let lo = at(i, j) * (1.0 - tx) + at(i + 1, j) * tx;
    let hi = at(i, j + 1) * (1.0 - tx) + at(i + 1, j + 1) * tx;
    lo * (1.0 - ty) + hi * ty
}

/// Integral over `[a, b]` of the piecewise-linear interpolant of samples
/// `vals` taken at uniformly spaced `coords` starting at `origin`.
pub(crate) fn integrate_linear(origin: f64, h: f64, vals: &[f64], a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let n = vals.len();
    let value_at = |t: f64| {
        let s = ((t - origin) / h).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n - 2);
        let w = s - k as f64;
        vals[k] * (1.0 - w) + vals[k + 1] * w
    };
    let mut total = 0.0;
    let mut t = lo;
    while t < hi {
        let s = (t - origin) / h;
        // next breakpoint strictly above t
        let mut k = s.floor() + 1.0;
        if origin + k * h <= t {
            k += 1.0;
        }
        let next = (origin + k * h).min(hi);
        total += 0.5 * (next - t) * (value_at(t) + value_at(next));
        t = next;
    }
    sign * total
}

pub(crate) fn to_csv(d: &DomainSpec, v: &[f64]) -> String {
    let mut s = format!(
        "{},{},{},{},{},{}\n",
        d.nx, d.ny, d.x_min, d.x_max, d.y_min, d.y_max
    );
    for row in v.chunks(d.nx) {
        let line: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    s
}

pub(crate) fn from_csv(path: &Path, text: &str) -> Result<(DomainSpec, Vec<f64>)> {
    let bad = |msg: String| Error::GridFormat {
        path: path.to_path_buf(),
        msg,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields.len() != 6 {
        return Err(bad(format!(
            "header must be nx,ny,x_min,x_max,y_min,y_max (got {} fields)",
            fields.len()
        )));
    }
    let nx: usize = fields[0]
        .parse()
        .map_err(|_| bad(format!("bad nx `{}`", fields[0])))?;
    let ny: usize = fields[1]
        .parse()
        .map_err(|_| bad(format!("bad ny `{}`", fields[1])))?;
    let mut bounds = [0.0; 4];
    for (b, f) in bounds.iter_mut().zip(&fields[2..]) {
        *b = f.parse().map_err(|_| bad(format!("bad bound `{f}`")))?;
    }
    let domain = DomainSpec::new(bounds[0], bounds[1], bounds[2], bounds[3], nx, ny)?;
    let mut values = Vec::with_capacity(nx * ny);
    for (row, line) in lines.enumerate() {
        let before = values.len();
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| bad(format!("row {}: bad value `{}`", row + 1, cell.trim())))?;
            values.push(v);
        }
        if values.len() - before != nx {
            return Err(bad(format!(
                "row {} has {} values, expected {nx}",
                row + 1,
                values.len() - before
            )));
        }
    }
    if values.len() != nx * ny {
        return Err(bad(format!(
            "expected {ny} rows, found {}",
            values.len() / nx.max(1)
        )));
    }
    Ok((domain, values))
}
