//! Line-oriented run configuration: `key = value` per line, `#` starts a
//! comment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr;
use crate::field::{DomainSpec, Point};
use crate::oracle::OracleSpec;
use crate::quadrature::Contour;
use crate::theorems::TestRegion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    RiccatiResidual,
    Darboux,
    Euler1,
    Euler2Baseline,
    Picard,
    CauchyRiccati,
    CauchySchrodinger,
    LaplaceReductions,
    All,
}

impl Case {
    pub const SUITE: [Case; 8] = [
        Case::RiccatiResidual,
        Case::Darboux,
        Case::Euler1,
        Case::Euler2Baseline,
        Case::Picard,
        Case::CauchyRiccati,
        Case::CauchySchrodinger,
        Case::LaplaceReductions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::RiccatiResidual => "riccati-residual",
            Case::Darboux => "darboux",
            Case::Euler1 => "euler1",
            Case::Euler2Baseline => "euler2-baseline",
            Case::Picard => "picard",
            Case::CauchyRiccati => "cauchy-riccati",
            Case::CauchySchrodinger => "cauchy-schrodinger",
            Case::LaplaceReductions => "laplace-reductions",
            Case::All => "all",
        }
    }

    fn parse(s: &str) -> Option<Case> {
        Case::SUITE
            .into_iter()
            .chain([Case::All])
            .find(|c| c.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Expr,
    Grid,
}

/// Where a field comes from: an expression in `x`, `y` (or `z` for complex
/// fields) or a grid CSV file (a `_re.csv`/`_im.csv` prefix for complex ones).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    Expr(String),
    Csv(PathBuf),
}

/// Names of field-valued keys; each also accepts a `<name>_csv` variant.
pub const FIELD_KEYS: [&str; 12] = [
    "u", "v", "f", "nu", "phi", "W", "Q", "Q0", "Q1", "Q2", "Q3", "Q4",
];
const COMPLEX_KEYS: [&str; 7] = ["W", "Q", "Q0", "Q1", "Q2", "Q3", "Q4"];

const SCALAR_KEYS: [&str; 17] = [
    "case",
    "domain",
    "base",
    "grid",
    "backend",
    "oracle",
    "contour",
    "tolerance",
    "solution_tol",
    "compat_tol",
    "c",
    "refine",
    "terms",
    "z0",
    "radius",
    "region",
    "perturb",
];

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub case: Case,
    pub domain: DomainSpec,
    pub backend: Backend,
    pub oracles: Vec<OracleSpec>,
    pub fields: BTreeMap<String, FieldSource>,
    pub contour: Option<Contour>,
    pub tolerance: Option<f64>,
    pub solution_tol: Option<f64>,
    pub compat_tol: Option<f64>,
    pub c: f64,
    pub refine: usize,
    pub terms: usize,
    pub z0: Point,
    pub radius: f64,
    pub region: Option<TestRegion>,
    pub perturb: Option<f64>,
    /// The `key = value` lines as written, for the report.
    pub entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn field(&self, key: &str) -> Option<&FieldSource> {
        self.fields.get(key)
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigSyntax {
        line,
        msg: msg.into(),
    }
}

fn field_err(field: &str, msg: impl Into<String>) -> Error {
    Error::ConfigField {
        field: field.into(),
        msg: msg.into(),
    }
}

fn numbers(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| field_err(key, format!("`{w}` is not a number")))
        })
        .collect()
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(field_err(key, format!("must be positive, got {v}")))
    }
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| field_err(key, format!("expected a positive integer, got `{value}`")))
}

fn region(value: &str) -> Result<TestRegion> {
    let mut words = value.split_whitespace();
    let kind = words.next().unwrap_or("");
    let rest: Vec<&str> = words.collect();
    let v = numbers("region", &rest.join(" "))?;
    let at = |x: f64, y: f64| Point::new(x, y);
    match (kind, v.as_slice()) {
        ("disk", [x, y, r]) => Ok(TestRegion::Disk {
            center: at(*x, *y)?,
            radius: positive("region", *r)?,
        }),
        ("annulus", [x, y, r0, r1]) if r0 < r1 => Ok(TestRegion::Annulus {
            center: at(*x, *y)?,
            inner: positive("region", *r0)?,
            outer: *r1,
        }),
        ("rect", [x0, x1, y0, y1]) if x0 < x1 && y0 < y1 => Ok(TestRegion::Rect {
            x_min: *x0,
            x_max: *x1,
            y_min: *y0,
            y_max: *y1,
        }),
        _ => Err(field_err(
            "region",
            "expected `disk cx cy r`, `annulus cx cy r_in r_out` or `rect x_min x_max y_min y_max`",
        )),
    }
}

/// Parses and validates a run configuration. Relative CSV paths are resolved
/// against `base_dir` and must exist.
pub fn parse_config(text: &str, base_dir: Option<&std::path::Path>) -> Result<RunConfig> {
    let mut entries: Vec<(String, String, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(syntax(line, "missing key"));
        }
        if value.is_empty() {
            return Err(syntax(line, format!("missing value for `{key}`")));
        }
        let known = SCALAR_KEYS.contains(&key)
            || FIELD_KEYS
                .iter()
                .any(|f| key == *f || key == format!("{f}_csv"));
        if !known {
            return Err(syntax(line, format!("unknown key `{key}`")));
        }
        if key != "oracle" && entries.iter().any(|(k, _, _)| k == key) {
            return Err(syntax(line, format!("duplicate key `{key}`")));
        }
        entries.push((key.to_string(), value.to_string(), line));
    }
    let get = |key: &str| {
        entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    };

    let case_text = get("case").ok_or_else(|| field_err("case", "missing"))?;
    let case = Case::parse(case_text)
        .ok_or_else(|| field_err("case", format!("unknown case `{case_text}`")))?;

    let bounds = numbers(
        "domain",
        get("domain").ok_or_else(|| field_err("domain", "missing"))?,
    )?;
    let [x0, x1, y0, y1] = bounds[..] else {
        return Err(field_err("domain", "expected `x_min x_max y_min y_max`"));
    };
    let (nx, ny) = match get("grid") {
        None => (41, 41),
        Some(g) => {
            let v = g.split_whitespace().collect::<Vec<_>>();
            match v.as_slice() {
                [n] => (count("grid", n)?, count("grid", n)?),
                [a, b] => (count("grid", a)?, count("grid", b)?),
                _ => return Err(field_err("grid", "expected `n` or `nx ny`")),
            }
        }
    };
    let mut domain =
        DomainSpec::new(x0, x1, y0, y1, nx, ny).map_err(|e| field_err("domain", e.to_string()))?;
    if let Some(b) = get("base") {
        let v = numbers("base", b)?;
        let [bx, by] = v[..] else {
            return Err(field_err("base", "expected `x y`"));
        };
        domain = domain
            .with_base(Point::new(bx, by)?)
            .map_err(|e| field_err("base", e.to_string()))?;
    }

    let backend = match get("backend") {
        None | Some("expr") | Some("expression") => Backend::Expr,
        Some("grid") => Backend::Grid,
        Some(other) => {
            return Err(field_err(
                "backend",
                format!("expected `expr` or `grid`, got `{other}`"),
            ))
        }
    };

    let mut oracles = Vec::new();
    let mut perturb = None;
    for (k, v, line) in &entries {
        if k == "oracle" {
            let (spec, eps) = OracleSpec::parse(v).map_err(|e| syntax(*line, e.to_string()))?;
            if eps.is_some() {
                return Err(syntax(
                    *line,
                    "use the `perturb` key instead of eps= in oracle lines",
                ));
            }
            oracles.push(spec);
        }
    }
    if let Some(p) = get("perturb") {
        let v = numbers("perturb", p)?;
        match v[..] {
            [e] if e != 0.0 => perturb = Some(e),
            _ => return Err(field_err("perturb", "expected one nonzero number")),
        }
    }

    let mut fields = BTreeMap::new();
    for name in FIELD_KEYS.iter() {
        let complex = COMPLEX_KEYS.contains(name);
        let csv_key = format!("{name}_csv");
        match (get(name), get(&csv_key)) {
            (Some(_), Some(_)) => {
                return Err(field_err(
                    name,
                    format!("give either `{name}` or `{csv_key}`, not both"),
                ))
            }
            (Some(e), None) => {
                let parsed = if complex {
                    expr::parse_complex(e).map(|_| ())
                } else {
                    expr::parse_real(e).map(|_| ())
                };
                parsed.map_err(|err| field_err(name, err.to_string()))?;
                fields.insert(name.to_string(), FieldSource::Expr(e.to_string()));
            }
            (None, Some(p)) => {
                let mut path = PathBuf::from(p);
                if path.is_relative() {
                    if let Some(dir) = base_dir {
                        path = dir.join(path);
                    }
                }
                let probe = if complex {
                    PathBuf::from(format!("{}_re.csv", path.display()))
                } else {
                    path.clone()
                };
                if let Err(e) = std::fs::metadata(&probe) {
                    return Err(Error::io(probe, e));
                }
                fields.insert(name.to_string(), FieldSource::Csv(path));
            }
            (None, None) => {}
        }
    }

    let contour = get("contour")
        .map(|c| Contour::parse(c, &domain).map_err(|e| field_err("contour", e.to_string())))
        .transpose()?;
    let opt_pos = |key: &str| -> Result<Option<f64>> {
        get(key)
            .map(|v| {
                let n = numbers(key, v)?;
                match n[..] {
                    [x] => positive(key, x),
                    _ => Err(field_err(key, "expected one number")),
                }
            })
            .transpose()
    };
    let tolerance = opt_pos("tolerance")?;
    let solution_tol = opt_pos("solution_tol")?;
    let compat_tol = opt_pos("compat_tol")?;
    let radius = opt_pos("radius")?.unwrap_or(1.0);
    let c = match get("c") {
        None => 0.0,
        Some(v) => match numbers("c", v)?[..] {
            [x] => x,
            _ => return Err(field_err("c", "expected one number")),
        },
    };
    let refine = get("refine")
        .map(|v| count("refine", v))
        .transpose()?
        .unwrap_or(1);
    let terms = get("terms")
        .map(|v| count("terms", v))
        .transpose()?
        .unwrap_or(8);
    let z0 = match get("z0") {
        None => Point { x: 0.0, y: 0.0 },
        Some(v) => match numbers("z0", v)?[..] {
            [x, y] => Point::new(x, y)?,
            _ => return Err(field_err("z0", "expected `x y`")),
        },
    };
    let region = get("region").map(region).transpose()?;

    Ok(RunConfig {
        case,
        domain,
        backend,
        oracles,
        fields,
        contour,
        tolerance,
        solution_tol,
        compat_tol,
        c,
        refine,
        terms,
        z0,
        radius,
        region,
        perturb,
        entries: entries.into_iter().map(|(k, v, _)| (k, v)).collect(),
    })
}
