use std::str::FromStr;

use hypercurv_core::mass::{pmt_decomposition, InnerBoundary, PmtOptions};
use hypercurv_core::quadrature::QuadratureSpec;
use hypercurv_core::FieldRegistry;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::build_field;
use crate::output::{outcome, Check, Outcome, Table};
use crate::spec::{broadcast, case_count, nonzero, one_or_many, positive, require, CliError, Common};

/// Inner boundary as written on the command line: `ball:R`, `level:C` or
/// `level-radius:R` (the level through `R e₁`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Inner {
    Ball(f64),
    Level(f64),
    LevelRadius(f64),
}

impl FromStr for Inner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, value) = s.split_once(':').ok_or_else(|| format!("`{s}`: expected KIND:VALUE"))?;
        let v: f64 = value.trim().parse().map_err(|_| format!("`{value}` is not a number"))?;
        match kind.trim() {
            "ball" => Ok(Inner::Ball(v)),
            "level" => Ok(Inner::Level(v)),
            "level-radius" => Ok(Inner::LevelRadius(v)),
            other => Err(format!("unknown inner boundary `{other}` (ball, level, level-radius)")),
        }
    }
}

impl From<Inner> for String {
    fn from(i: Inner) -> String {
        match i {
            Inner::Ball(v) => format!("ball:{v}"),
            Inner::Level(v) => format!("level:{v}"),
            Inner::LevelRadius(v) => format!("level-radius:{v}"),
        }
    }
}

impl TryFrom<String> for Inner {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Catalog field; repeat for several cases
    #[arg(long)]
    #[serde(deserialize_with = "one_or_many")]
    pub field: Option<Vec<String>>,
    /// Dimensions, one per case
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    /// Outer sphere radii, one per case
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub outer: Option<Vec<f64>>,
    /// Inner boundaries `ball:R`, `level:C` or `level-radius:R`, one per case
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub inner: Option<Vec<Inner>>,
    /// Polar quadrature nodes [default: 16]
    #[arg(long)]
    pub polar: Option<usize>,
    /// Radial Gauss panels [default: 64]
    #[arg(long)]
    pub panels: Option<usize>,
    /// Relative bound on the residual [default: 1e-3]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute bound, used when it exceeds the relative one [default: 1e-6]
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Serialize)]
struct Case {
    field: String,
    n: usize,
    outer: f64,
    inner: Inner,
}

#[derive(Debug, Serialize)]
struct Params {
    cases: Vec<Case>,
    polar: usize,
    panels: usize,
    rel_tol: f64,
    abs_tol: f64,
}

#[derive(Debug, Serialize)]
struct CaseSummary {
    field: String,
    inner_level: Option<f64>,
    boundary_value: f64,
    interior_r_integral: f64,
    inner_term: f64,
    decomposition_residual: f64,
    tolerance: f64,
}

fn run_case(registry: &FieldRegistry, case: &Case, p: &Params) -> Result<CaseSummary, CliError> {
    let field = build_field(registry, &case.field, case.n)?;
    let (inner, inner_level) = match case.inner {
        Inner::Ball(r) => (InnerBoundary::Ball(r), None),
        Inner::Level(c) => (InnerBoundary::Level(c), Some(c)),
        Inner::LevelRadius(r) => {
            let mut x = vec![0.0; case.n];
            x[0] = r;
            if !field.admissible(&x) {
                return Err(CliError::spec(format!("radius {r} is outside the domain of `{}`", case.field)));
            }
            let c = field.eval(&x);
            (InnerBoundary::Level(c), Some(c))
        }
    };
    let opts = PmtOptions { quad: QuadratureSpec::new(p.polar)?, radial_panels: p.panels, ..PmtOptions::default() };
    let rep = pmt_decomposition(field.as_ref(), case.outer, inner, &opts)?;
    let boundary = rep.boundary_value();
    Ok(CaseSummary {
        field: case.field.clone(),
        inner_level,
        boundary_value: boundary,
        interior_r_integral: rep.interior_r_integral,
        inner_term: rep.level_term,
        decomposition_residual: rep.decomposition_residual,
        tolerance: (p.rel_tol * boundary.abs()).max(p.abs_tol),
    })
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    let fields = require(args.field, "field")?;
    let n = require(args.n, "n")?;
    let outer = require(args.outer, "outer")?;
    let inner = require(args.inner, "inner")?;
    let count = case_count(&[fields.len(), n.len(), outer.len(), inner.len()]);
    let (fields, n, outer, inner) = (
        broadcast(&fields, count, "field")?,
        broadcast(&n, count, "n")?,
        broadcast(&outer, count, "outer")?,
        broadcast(&inner, count, "inner")?,
    );
    let cases = (0..count)
        .map(|i| {
            Ok(Case { field: fields[i].clone(), n: n[i], outer: positive(outer[i], "outer")?, inner: inner[i] })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let params = Params {
        cases,
        polar: args.polar.unwrap_or(16),
        panels: nonzero(args.panels.unwrap_or(64), "panels")?,
        rel_tol: positive(args.rel_tol.unwrap_or(1e-3), "rel-tol")?,
        abs_tol: positive(args.abs_tol.unwrap_or(1e-6), "abs-tol")?,
    };

    let registry = FieldRegistry::with_builtins();
    let results: Vec<CaseSummary> = params
        .cases
        .par_iter()
        .map(|c| run_case(&registry, c, &params))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&[
        "field",
        "n",
        "outer",
        "inner",
        "boundary_value",
        "interior_r_integral",
        "inner_term",
        "decomposition_residual",
    ]);
    let mut checks = Vec::new();
    for (case, s) in params.cases.iter().zip(&results) {
        let inner = String::from(case.inner);
        checks.push(Check::at_most(
            format!("residual {} {inner}", case.field),
            s.decomposition_residual.abs(),
            s.tolerance,
        ));
        table.push(vec![
            case.field.as_str().into(),
            case.n.into(),
            case.outer.into(),
            inner.into(),
            s.boundary_value.into(),
            s.interior_r_integral.into(),
            s.inner_term.into(),
            s.decomposition_residual.into(),
        ]);
    }
    Ok(outcome("pmt-check", &params, checks, &results, table, false))
}
