use hypercurv_core::graphgeo::{curvature_at, scalar_curvature_divergence};
use hypercurv_core::{jet_at, FieldRegistry, JetScheme, SharedField};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_field, norm};
use crate::output::{joined, outcome, Check, Outcome, Table};
use crate::spec::{nonzero, one_or_many, positive, require, CliError, Common};

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Catalog field, e.g. `hemisphere(1)`, or `catalog` for the built-in test set
    #[arg(long)]
    pub field: Option<String>,
    /// Dimension of the base hyperplane
    #[arg(long)]
    pub n: Option<usize>,
    /// Points per field [default: 100]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random seed (required unless --point is given)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Half-width of the sampling cube [default: 1]
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub half_width: Option<f64>,
    /// Reject samples with |x| below this
    #[arg(long)]
    pub min_radius: Option<f64>,
    /// Reject samples with |x| above this
    #[arg(long)]
    pub max_radius: Option<f64>,
    /// Evaluate at this single point instead of sampling
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub point: Option<Vec<f64>>,
    /// Divergence step relative to max(|x|, 1) [default: 1e-4]
    #[arg(long)]
    pub step: Option<f64>,
    /// Bound on the divergence-vs-Gauss relative error [default: 1e-5]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Bound on the Gauss-equation relative residual [default: 1e-9]
    #[arg(long)]
    pub gauss_tol: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Serialize)]
struct Case {
    field: String,
    n: usize,
    #[serde(rename = "box")]
    half_width: f64,
    min_radius: Option<f64>,
    max_radius: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Params {
    cases: Vec<Case>,
    samples: usize,
    seed: Option<u64>,
    point: Option<Vec<f64>>,
    step: f64,
    rel_tol: f64,
    gauss_tol: f64,
}

#[derive(Debug, Serialize)]
struct FieldSummary {
    field: String,
    points: usize,
    attempts: usize,
    max_relative_error: f64,
    max_gauss_residual: f64,
}

struct Sample {
    x: Vec<f64>,
    h: f64,
    r_gauss: f64,
    r_divergence: f64,
    relative_error: f64,
    gauss_residual: f64,
}

fn catalog() -> Vec<Case> {
    let case = |field: &str, n, half_width, min_radius, max_radius| Case {
        field: field.into(),
        n,
        half_width,
        min_radius,
        max_radius,
    };
    vec![
        case("plane(0.3,0.2,-0.1)", 2, 2.0, None, None),
        case("hemisphere(1)", 3, 0.9, None, Some(0.9)),
        case("cubic_sheet", 3, 1.0, None, None),
        case("cylinder(1)", 3, 0.9, None, None),
        case("poly(x1^2*x2 + 0.3*x2^3*x3 - x1*x3^2 + x1^4)", 3, 1.0, None, None),
        case("power(1.5,0.5)", 3, 3.0, Some(0.5), None),
        case("bump(1,3,0.5)", 3, 3.0, Some(1.05), Some(2.95)),
        case("rot_odd(5,3,2.5)", 5, 3.5, None, None),
        case("rot_even(6,4,2.5)", 6, 3.5, None, None),
        case("schwarzschild(3,1)", 3, 20.0, Some(2.2), None),
        case("schwarzschild(4,1)", 4, 20.0, Some(1.2), None),
    ]
}

fn evaluate(field: &SharedField, x: Vec<f64>, step: f64) -> Option<Sample> {
    let f = field.as_ref();
    let h = step * norm(&x).max(1.0);
    let div = scalar_curvature_divergence(f, &x, h).ok()?;
    let jet = jet_at(f, &x, JetScheme::preferred(f, &x)).ok()?;
    let curv = curvature_at(&jet).ok()?;
    let scale = curv.scale();
    let relative = |d: f64| if scale > 0.0 { d / scale } else { d };
    Some(Sample {
        h: curv.h,
        r_gauss: curv.r,
        r_divergence: div,
        relative_error: relative((div - curv.r).abs()),
        gauss_residual: relative((curv.r - (curv.h * curv.h - curv.norm_a2)).abs()),
        x,
    })
}

const MAX_ATTEMPTS: usize = 2_000_000;

fn sample_case(
    registry: &FieldRegistry,
    case: &Case,
    index: usize,
    params: &Params,
) -> Result<(Vec<Sample>, usize), CliError> {
    let field = build_field(registry, &case.field, case.n)?;
    if let Some(p) = &params.point {
        if p.len() != case.n {
            return Err(CliError::spec(format!("`point` has {} coordinates, n = {}", p.len(), case.n)));
        }
        if !field.admissible(p) {
            return Err(CliError::spec(format!("point {p:?} is outside the domain of `{}`", case.field)));
        }
        let s = evaluate(&field, p.clone(), params.step)
            .ok_or_else(|| CliError::Breakdown(format!("curvature evaluation failed at {p:?}")))?;
        return Ok((vec![s], 1));
    }
    let seed = params.seed.expect("validated");
    let mut rng = crate::item_rng(seed, index as u64);
    let mut out = Vec::with_capacity(params.samples);
    let mut attempts = 0;
    while out.len() < params.samples {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(CliError::spec(format!(
                "`{}`: only {} admissible points in {MAX_ATTEMPTS} draws",
                case.field,
                out.len()
            )));
        }
        let x: Vec<f64> = (0..case.n).map(|_| rng.gen_range(-case.half_width..case.half_width)).collect();
        let rho = norm(&x);
        if case.min_radius.is_some_and(|m| rho <= m) || case.max_radius.is_some_and(|m| rho >= m) {
            continue;
        }
        if !field.admissible(&x) {
            continue;
        }
        if let Some(s) = evaluate(&field, x, params.step) {
            out.push(s);
        }
    }
    Ok((out, attempts))
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    let field = args.field.unwrap_or_else(|| "catalog".into());
    let cases = if field == "catalog" {
        if args.n.is_some() || args.point.is_some() {
            return Err(CliError::spec("`catalog` fixes its own dimensions and sampling boxes"));
        }
        catalog()
    } else {
        vec![Case {
            field,
            n: require(args.n, "n")?,
            half_width: positive(args.half_width.unwrap_or(1.0), "box")?,
            min_radius: args.min_radius,
            max_radius: args.max_radius,
        }]
    };
    let params = Params {
        cases,
        samples: nonzero(args.samples.unwrap_or(100), "samples")?,
        seed: args.seed,
        point: args.point,
        step: positive(args.step.unwrap_or(1e-4), "step")?,
        rel_tol: positive(args.rel_tol.unwrap_or(1e-5), "rel-tol")?,
        gauss_tol: positive(args.gauss_tol.unwrap_or(1e-9), "gauss-tol")?,
    };
    if params.point.is_none() && params.seed.is_none() {
        return Err(CliError::spec("`seed` is required for sampled points"));
    }

    let registry = FieldRegistry::with_builtins();
    let results: Vec<(Vec<Sample>, usize)> = params
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| sample_case(&registry, case, i, &params))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&["field", "x", "h", "r_gauss", "r_divergence", "relative_error", "gauss_residual"]);
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    for (case, (samples, attempts)) in params.cases.iter().zip(&results) {
        let worst = super::max_of(samples.iter().map(|s| s.relative_error));
        let gauss = super::max_of(samples.iter().map(|s| s.gauss_residual));
        checks.push(Check::below(format!("divergence_vs_gauss {}", case.field), worst, params.rel_tol));
        checks.push(Check::at_most(format!("gauss_equation {}", case.field), gauss, params.gauss_tol));
        summary.push(FieldSummary {
            field: case.field.clone(),
            points: samples.len(),
            attempts: *attempts,
            max_relative_error: worst,
            max_gauss_residual: gauss,
        });
        for s in samples {
            table.push(vec![
                case.field.as_str().into(),
                joined(&s.x),
                s.h.into(),
                s.r_gauss.into(),
                s.r_divergence.into(),
                s.relative_error.into(),
                s.gauss_residual.into(),
            ]);
        }
    }
    Ok(outcome("curvature", &params, checks, &summary, table, false))
}
