use hypercurv_core::graphgeo::curvature_at;
use hypercurv_core::rotex::{
    admissible_window, b_nk, family_field, margin_factored, sign_change_radius, sigma_profile, sweep, RotationalFamily,
    Variant,
};
use hypercurv_core::{jet_at, JetScheme};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{outcome, Check, Outcome, Table};
use crate::spec::{broadcast, case_count, nonzero, one_or_many, positive, require, CliError, Common};

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// `odd` or `even`
    #[arg(long)]
    pub variant: Option<String>,
    /// Dimensions, one per case
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    /// Orders k, one per case [default: largest k <= n of the variant's parity]
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub k: Option<Vec<usize>>,
    /// Centre radii a, one per case
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub a: Option<Vec<f64>>,
    /// Radial grid points [default: 10000]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Points for the closed form vs graph pipeline comparison [default: 50]
    #[arg(long)]
    pub pipeline_points: Option<usize>,
    /// Relative bound for the pipeline comparison [default: 1e-8]
    #[arg(long)]
    pub pipeline_tol: Option<f64>,
    /// Allowed negative sigma_k [default: 1e-9]
    #[arg(long)]
    pub sigma_tol: Option<f64>,
    /// Instead of sweeping, tabulate the even-window margin for 4 <= k <= n <= NMAX
    #[arg(long, value_name = "NMAX")]
    pub margins: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Case {
    n: usize,
    k: usize,
    a: f64,
}

#[derive(Debug, Serialize)]
struct Params {
    variant: &'static str,
    cases: Vec<Case>,
    grid: usize,
    pipeline_points: usize,
    pipeline_tol: f64,
    sigma_tol: f64,
}

#[derive(Debug, Serialize)]
struct CaseSummary {
    n: usize,
    k: usize,
    a: f64,
    window: [f64; 2],
    min_sigma_k: f64,
    expected_crossing: f64,
    crossings: Vec<f64>,
    crossing_offset: Option<f64>,
    grid_cell: f64,
    pipeline_max_relative: f64,
    note: Option<String>,
}

struct CaseResult {
    summary: CaseSummary,
    in_window: bool,
    crossing_ok: bool,
    radii: Vec<f64>,
    sigma_1: Vec<f64>,
    sigma_k: Vec<f64>,
}

/// Adapted point at radius `r` where the closed form applies.
fn adapted_point(variant: Variant, n: usize, r: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    match variant {
        Variant::Odd => {
            x[0] = 0.6 * r;
            x[n - 1] = 0.8 * r;
        }
        Variant::Even => x[n - 2] = r,
    }
    x
}

fn run_case(variant: Variant, case: Case, p: &Params) -> Result<CaseResult, CliError> {
    let family = RotationalFamily::new(variant, case.n, case.k, case.a)?;
    let window = admissible_window(variant, case.n, case.k)?;
    let s = sweep(&family, p.grid)?;
    let expected = sign_change_radius(variant, case.n, case.a)?;
    let (lo, hi) = family.r_range();
    let (crossing_offset, crossing_ok, note) = match s.sigma1_crossings.as_slice() {
        [r] => {
            let off = (r - expected).abs();
            (Some(off), off <= s.cell, None)
        }
        [] if (expected - lo).min(hi - expected) <= s.cell => {
            (None, true, Some("sign change inside the first or last grid cell".to_string()))
        }
        _ => (None, false, None),
    };

    let field = family_field(&family);
    let mut pipeline = 0.0f64;
    for i in 1..=p.pipeline_points {
        let r = lo + (hi - lo) * i as f64 / (p.pipeline_points + 1) as f64;
        let jet = jet_at(field.as_ref(), &adapted_point(variant, case.n, r), JetScheme::Analytic)?;
        let curv = curvature_at(&jet)?;
        for j in 1..=case.n {
            let closed = sigma_profile(&family, j, r)?;
            pipeline = pipeline.max((curv.sigmas[j] - closed).abs() / closed.abs().max(1.0));
        }
    }
    Ok(CaseResult {
        summary: CaseSummary {
            n: case.n,
            k: case.k,
            a: case.a,
            window: [window.window.0, window.window.1],
            min_sigma_k: s.min_sigma_k,
            expected_crossing: expected,
            crossings: s.sigma1_crossings.clone(),
            crossing_offset,
            grid_cell: s.cell,
            pipeline_max_relative: pipeline,
            note,
        },
        in_window: window.contains(case.a),
        crossing_ok,
        radii: s.radii,
        sigma_1: s.sigma_1,
        sigma_k: s.sigma_k,
    })
}

#[derive(Debug, Serialize)]
struct MarginParams {
    n_max: usize,
}

#[derive(Debug, Serialize)]
struct MarginSummary {
    pairs: usize,
    min_margin: f64,
    argmin: [usize; 2],
    max_factored_difference: f64,
}

fn margins(n_max: usize) -> Result<Outcome, CliError> {
    if n_max < 4 {
        return Err(CliError::spec("`margins` needs NMAX >= 4"));
    }
    let mut table = Table::new(&["n", "k", "b_nk", "margin", "margin_factored"]);
    let mut summary = MarginSummary { pairs: 0, min_margin: f64::INFINITY, argmin: [0, 0], max_factored_difference: 0.0 };
    for n in 4..=n_max {
        for k in 4..=n {
            let b = b_nk(n, k);
            let margin = n as f64 / 2.0 - 1.0 - b;
            let factored = margin_factored(n, k);
            summary.pairs += 1;
            summary.max_factored_difference = summary.max_factored_difference.max((margin - factored).abs());
            if margin < summary.min_margin {
                summary.min_margin = margin;
                summary.argmin = [n, k];
            }
            table.push(vec![n.into(), k.into(), b.into(), margin.into(), factored.into()]);
        }
    }
    let checks = vec![
        Check::above("min_margin", summary.min_margin, 0.0),
        Check::below("max_factored_difference", summary.max_factored_difference, 1e-10),
    ];
    Ok(outcome("examples-sweep", &MarginParams { n_max }, checks, &summary, table, false))
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    if let Some(n_max) = args.margins {
        if args.variant.is_some() || args.n.is_some() || args.a.is_some() {
            return Err(CliError::spec("`margins` runs on its own"));
        }
        return margins(n_max);
    }
    let variant = Variant::parse(&require(args.variant, "variant")?)?;
    let n = require(args.n, "n")?;
    let a = require(args.a, "a")?;
    let count = case_count(&[n.len(), a.len(), args.k.as_ref().map_or(1, Vec::len)]);
    let n = broadcast(&n, count, "n")?;
    let a = broadcast(&a, count, "a")?;
    let k = match &args.k {
        Some(k) => broadcast(k, count, "k")?,
        None => n.iter().map(|&n| variant.default_k(n)).collect(),
    };
    let cases: Vec<Case> = (0..count).map(|i| Case { n: n[i], k: k[i], a: a[i] }).collect();
    let params = Params {
        variant: variant.name(),
        cases,
        grid: nonzero(args.grid.unwrap_or(10_000), "grid")?,
        pipeline_points: args.pipeline_points.unwrap_or(50),
        pipeline_tol: positive(args.pipeline_tol.unwrap_or(1e-8), "pipeline-tol")?,
        sigma_tol: positive(args.sigma_tol.unwrap_or(1e-9), "sigma-tol")?,
    };

    let results: Vec<CaseResult> = params
        .cases
        .par_iter()
        .map(|&c| run_case(variant, c, &params))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&["n", "k", "a", "r", "sigma_1", "sigma_k"]);
    let mut checks = Vec::new();
    for res in &results {
        let s = &res.summary;
        let tag = format!("({},{},{})", s.n, s.k, s.a);
        checks.push(Check::holds(format!("a_in_window {tag}"), res.in_window));
        checks.push(Check::at_least(format!("min_sigma_k {tag}"), s.min_sigma_k, -params.sigma_tol));
        checks.push(Check::holds(format!("sigma_1_crossing_within_cell {tag}"), res.crossing_ok));
        if params.pipeline_points > 0 {
            checks.push(Check::at_most(format!("pipeline {tag}"), s.pipeline_max_relative, params.pipeline_tol));
        }
        for i in 0..res.radii.len() {
            table.push(vec![
                s.n.into(),
                s.k.into(),
                s.a.into(),
                res.radii[i].into(),
                res.sigma_1[i].into(),
                res.sigma_k[i].into(),
            ]);
        }
    }
    let summary: Vec<&CaseSummary> = results.iter().map(|r| &r.summary).collect();
    Ok(outcome("examples-sweep", &params, checks, &summary, table, false))
}
