use hypercurv_core::fields::FieldRequest;
use hypercurv_core::mass::{adm_mass_chart, mass_limit};
use hypercurv_core::quadrature::QuadratureSpec;
use hypercurv_core::FieldRegistry;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::build_field;
use crate::output::{outcome, Cell, Check, Outcome, Table};
use crate::spec::{broadcast, one_or_many, positive, CliError, Common};

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Catalog field; repeat for several. A bare `schwarzschild` is expanded over --m
    #[arg(long)]
    #[serde(deserialize_with = "one_or_many")]
    pub field: Option<Vec<String>>,
    /// Dimension [default: 3]
    #[arg(long)]
    pub n: Option<usize>,
    /// Schwarzschild masses
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub m: Option<Vec<f64>>,
    /// Sphere radii, increasing [default: 25,50,100,200]
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub radii: Option<Vec<f64>>,
    /// Polar quadrature nodes [default: 16]
    #[arg(long)]
    pub polar: Option<usize>,
    /// Expected masses, one per case (default: m for Schwarzschild, 0 for plane and bump)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub expect: Option<Vec<f64>>,
    /// Relative tolerance against the expected mass [default: 0.01]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance, used when it exceeds the relative one [default: 1e-10]
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Also compare with the chart-form flux at this radius
    #[arg(long)]
    pub chart_radius: Option<f64>,
    /// Relative bound for the chart comparison [default: 0.01]
    #[arg(long)]
    pub chart_tol: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Serialize)]
struct Case {
    field: String,
    m: Option<f64>,
    expect: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Params {
    n: usize,
    cases: Vec<Case>,
    radii: Vec<f64>,
    polar: usize,
    rel_tol: f64,
    abs_tol: f64,
    chart_radius: Option<f64>,
    chart_tol: f64,
}

#[derive(Debug, Serialize)]
struct CaseSummary {
    field: String,
    mass_estimate: f64,
    extrapolation_order: f64,
    converged: bool,
    note: Option<String>,
    chart_graphical: Option<f64>,
    chart_value: Option<f64>,
    chart_relative_difference: Option<f64>,
}

struct CaseResult {
    summary: CaseSummary,
    values: Vec<f64>,
}

fn expand(fields: &[String], n: usize, m: Option<&[f64]>) -> Result<Vec<Case>, CliError> {
    let mut cases = Vec::new();
    for spec in fields {
        let req = FieldRequest::parse(spec, Some(n)).map_err(|e| CliError::spec(e.to_string()))?;
        if req.name == "schwarzschild" && req.args.is_empty() {
            let ms = m.ok_or_else(|| CliError::spec("bare `schwarzschild` needs --m"))?;
            for &m in ms {
                cases.push(Case { field: format!("schwarzschild({n},{m})"), m: Some(m), expect: Some(m) });
            }
            continue;
        }
        let expect = match req.name.as_str() {
            "schwarzschild" => req.numbers().ok().and_then(|v| v.get(1).copied()),
            "plane" | "bump" => Some(0.0),
            _ => None,
        };
        cases.push(Case { field: spec.clone(), m: None, expect });
    }
    Ok(cases)
}

fn run_case(registry: &FieldRegistry, case: &Case, p: &Params) -> Result<CaseResult, CliError> {
    let field = build_field(registry, &case.field, p.n)?;
    let quad = QuadratureSpec::new(p.polar)?;
    let rep = mass_limit(field.as_ref(), &p.radii, quad)?;
    let (chart_graphical, chart_value, chart_relative_difference) = match p.chart_radius {
        Some(r) => {
            let graphical = hypercurv_core::mass::boundary_mass_integral(field.as_ref(), r, quad)?;
            let chart = adm_mass_chart(field.as_ref(), r, quad)?;
            let scale = graphical.abs().max(p.abs_tol);
            (Some(graphical), Some(chart), Some((chart - graphical).abs() / scale))
        }
        None => (None, None, None),
    };
    Ok(CaseResult {
        summary: CaseSummary {
            field: case.field.clone(),
            mass_estimate: rep.mass_estimate,
            extrapolation_order: rep.extrapolation_order,
            converged: rep.converged,
            note: rep.note,
            chart_graphical,
            chart_value,
            chart_relative_difference,
        },
        values: rep.boundary_values,
    })
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    let n = args.n.unwrap_or(3);
    let fields = args.field.unwrap_or_else(|| vec!["schwarzschild".into()]);
    let mut cases = expand(&fields, n, args.m.as_deref())?;
    if cases.is_empty() {
        return Err(CliError::spec("no fields given"));
    }
    if let Some(expect) = &args.expect {
        let expect = broadcast(expect, cases.len(), "expect")?;
        for (c, e) in cases.iter_mut().zip(expect) {
            c.expect = Some(e);
        }
    }
    let radii = args.radii.unwrap_or_else(|| vec![25.0, 50.0, 100.0, 200.0]);
    if radii.len() < 3 || radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
        return Err(CliError::spec("`radii` needs at least three positive, increasing values"));
    }
    let params = Params {
        n,
        cases,
        radii,
        polar: args.polar.unwrap_or(16),
        rel_tol: positive(args.rel_tol.unwrap_or(0.01), "rel-tol")?,
        abs_tol: positive(args.abs_tol.unwrap_or(1e-10), "abs-tol")?,
        chart_radius: args.chart_radius.map(|r| positive(r, "chart-radius")).transpose()?,
        chart_tol: positive(args.chart_tol.unwrap_or(0.01), "chart-tol")?,
    };

    let registry = FieldRegistry::with_builtins();
    let results: Vec<CaseResult> = params
        .cases
        .par_iter()
        .map(|c| run_case(&registry, c, &params))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&["field", "radius", "boundary_value"]);
    let mut checks = Vec::new();
    for (case, res) in params.cases.iter().zip(&results) {
        let s = &res.summary;
        checks.push(Check::holds(format!("converged {}", case.field), s.converged));
        if let Some(e) = case.expect {
            let tol = (params.rel_tol * e.abs()).max(params.abs_tol);
            checks.push(Check::at_most(format!("mass_error {}", case.field), (s.mass_estimate - e).abs(), tol));
        }
        if let Some(rel) = s.chart_relative_difference {
            checks.push(Check::below(format!("chart_vs_graphical {}", case.field), rel, params.chart_tol));
        }
        for (r, v) in params.radii.iter().zip(&res.values) {
            table.push(vec![case.field.as_str().into(), (*r).into(), (*v).into()]);
        }
        if let (Some(r), Some(v)) = (params.chart_radius, s.chart_value) {
            table.push(vec![format!("chart {}", case.field).into(), r.into(), Cell::Float(v)]);
        }
    }
    // Mass increases with m along the Schwarzschild family.
    let family: Vec<(f64, f64)> = params
        .cases
        .iter()
        .zip(&results)
        .filter_map(|(c, r)| c.m.map(|m| (m, r.summary.mass_estimate)))
        .collect();
    if family.len() >= 2 {
        let mut sorted = family.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let increasing = sorted.windows(2).all(|w| w[0].0 == w[1].0 || w[1].1 > w[0].1);
        checks.push(Check::holds("mass_increasing_in_m", increasing));
    }
    let summary: Vec<&CaseSummary> = results.iter().map(|r| &r.summary).collect();
    Ok(outcome("mass", &params, checks, &summary, table, false))
}
