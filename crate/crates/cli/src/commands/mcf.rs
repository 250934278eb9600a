use std::path::PathBuf;

use hypercurv_core::fields::FieldRequest;
use hypercurv_core::mcf::{read_profile_file, run as flow, FlowParams, FlowRun, ProfileCurve, ProfileRegistry};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{outcome, Cell, Check, Outcome, Table};
use crate::spec::{broadcast, nonzero, one_or_many, positive, CliError, Common};

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Built-in profile, e.g. `sphere(1)`, `ellipsoid(1,2)`; repeat for several runs
    #[arg(long)]
    #[serde(deserialize_with = "one_or_many")]
    pub profile: Option<Vec<String>>,
    /// Profile file of `r z` pairs, one per line; repeatable
    #[arg(long)]
    #[serde(deserialize_with = "one_or_many")]
    pub profile_file: Option<Vec<PathBuf>>,
    /// Dimension of the hypersurface [default: 2]
    #[arg(long)]
    pub n: Option<usize>,
    /// Nodes for built-in profiles and after redistribution [default: 400]
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Time step [default: 1e-5]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Stability constant [default: 0.4]
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Steps between arclength redistributions [default: 20]
    #[arg(long)]
    pub redistribute_every: Option<usize>,
    /// Final times, one per run [default: 0.1]
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub t_end: Option<Vec<f64>>,
    /// Steps between monitor samples [default: 100]
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Bound on the sphere radius error relative to r0 [default: 1e-3]
    #[arg(long)]
    pub radius_tol: Option<f64>,
    /// Scalar curvature floor once the flow has started [default: 1e-9]
    #[arg(long)]
    pub positivity_floor: Option<f64>,
    /// Allowed increase of the enclosed area between samples [default: 1e-9]
    #[arg(long)]
    pub area_tol: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Serialize)]
struct RunSpec {
    profile: String,
    t_end: f64,
}

#[derive(Debug, Serialize)]
struct Params {
    n: usize,
    runs: Vec<RunSpec>,
    nodes: usize,
    dt: f64,
    cfl: f64,
    redistribute_every: usize,
    sample_every: usize,
    radius_tol: f64,
    positivity_floor: f64,
    area_tol: f64,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    profile: String,
    stop: &'static str,
    steps: usize,
    final_t: f64,
    samples: usize,
    initial_min_r: f64,
    min_r_after_start: Option<f64>,
    min_h: f64,
    max_area_increase: f64,
    sphere_radius: Option<f64>,
    max_radius_error: Option<f64>,
}

enum Source {
    Builtin(String),
    File(PathBuf),
}

/// Initial radius when the profile is a round sphere.
fn sphere_radius(spec: &str) -> Option<f64> {
    let req = FieldRequest::parse(spec, None).ok()?;
    if req.name != "sphere" {
        return None;
    }
    match req.numbers().ok()?.as_slice() {
        [] => Some(1.0),
        [r] => Some(*r),
        _ => None,
    }
}

fn initial(source: &Source, p: &Params) -> Result<ProfileCurve, CliError> {
    Ok(match source {
        Source::Builtin(spec) => ProfileRegistry::with_builtins()
            .build(spec, p.n, p.nodes)
            .map_err(|e| CliError::spec(format!("profile `{spec}`: {e}")))?,
        Source::File(path) => read_profile_file(path, p.n)?,
    })
}

fn exact_radius(r0: f64, n: usize, t: f64) -> f64 {
    (r0 * r0 - 2.0 * n as f64 * t).max(0.0).sqrt()
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    let mut sources: Vec<Source> = args.profile.unwrap_or_default().into_iter().map(Source::Builtin).collect();
    sources.extend(args.profile_file.unwrap_or_default().into_iter().map(Source::File));
    if sources.is_empty() {
        sources.push(Source::Builtin("sphere".into()));
    }
    let t_end = broadcast(&args.t_end.unwrap_or_else(|| vec![0.1]), sources.len(), "t-end")?;
    let runs = sources
        .iter()
        .zip(&t_end)
        .map(|(s, &t)| {
            let profile = match s {
                Source::Builtin(spec) => spec.clone(),
                Source::File(path) => path.display().to_string(),
            };
            Ok(RunSpec { profile, t_end: positive(t, "t-end")? })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let n = args.n.unwrap_or(2);
    if n < 2 {
        return Err(CliError::spec("`n` must be at least 2"));
    }
    let params = Params {
        n,
        runs,
        nodes: nonzero(args.nodes.unwrap_or(400), "nodes")?,
        dt: positive(args.dt.unwrap_or(1e-5), "dt")?,
        cfl: positive(args.cfl.unwrap_or(0.4), "cfl")?,
        redistribute_every: nonzero(args.redistribute_every.unwrap_or(20), "redistribute-every")?,
        sample_every: nonzero(args.sample_every.unwrap_or(100), "sample-every")?,
        radius_tol: positive(args.radius_tol.unwrap_or(1e-3), "radius-tol")?,
        positivity_floor: positive(args.positivity_floor.unwrap_or(1e-9), "positivity-floor")?,
        area_tol: positive(args.area_tol.unwrap_or(1e-9), "area-tol")?,
    };
    let flow_params = FlowParams {
        dt: params.dt,
        cfl: params.cfl,
        redistribute_every: params.redistribute_every,
        target_nodes: params.nodes,
        ..FlowParams::default()
    };

    let flows: Vec<FlowRun> = sources
        .par_iter()
        .zip(&params.runs)
        .map(|(s, spec)| {
            let start = initial(s, &params)?;
            Ok(flow(&start, &flow_params, spec.t_end, params.sample_every)?)
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new(&[
        "profile",
        "t",
        "min_h",
        "min_r",
        "min_q2",
        "max_speed",
        "enclosed_profile_area",
        "mean_radius",
        "nodes",
        "exact_radius",
    ]);
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    let mut breakdown = false;
    for ((source, spec), run) in sources.iter().zip(&params.runs).zip(&flows) {
        let label = &spec.profile;
        let r0 = match source {
            Source::Builtin(s) => sphere_radius(s),
            Source::File(_) => None,
        };
        let first = &run.monitors[0];
        let later = &run.monitors[1..];
        let min_r_after = (!later.is_empty()).then(|| super::min_of(later.iter().map(|m| m.min_r)));
        let max_area_increase = super::max_of(
            run.monitors.windows(2).map(|w| w[1].enclosed_profile_area - w[0].enclosed_profile_area),
        )
        .max(0.0);
        let radius_error = r0.map(|r0| {
            let horizon = 0.8 * r0 * r0 / (2.0 * n as f64);
            super::max_of(
                run.monitors
                    .iter()
                    .filter(|m| m.t <= horizon)
                    .map(|m| (m.mean_radius - exact_radius(r0, n, m.t)).abs()),
            )
            .max(0.0)
        });

        breakdown |= run.stop.is_breakdown();
        checks.push(Check::holds(format!("no_breakdown {label}"), !run.stop.is_breakdown()));
        checks.push(Check::at_most(format!("area_monotone {label}"), max_area_increase, params.area_tol));
        if let (Some(r0), Some(err)) = (r0, radius_error) {
            checks.push(Check::below(format!("sphere_radius_error {label}"), err, params.radius_tol * r0));
        }
        if first.min_r >= -params.positivity_floor {
            if let Some(min_r) = min_r_after {
                checks.push(Check::above(format!("positive_scalar_curvature {label}"), min_r, params.positivity_floor));
            }
        }

        for m in &run.monitors {
            table.push(vec![
                label.as_str().into(),
                m.t.into(),
                m.min_h.into(),
                m.min_r.into(),
                m.min_q2.into(),
                m.max_speed.into(),
                m.enclosed_profile_area.into(),
                m.mean_radius.into(),
                m.nodes.into(),
                r0.map_or(Cell::Empty, |r0| exact_radius(r0, n, m.t).into()),
            ]);
        }
        summary.push(RunSummary {
            profile: label.clone(),
            stop: run.stop.label(),
            steps: run.steps,
            final_t: run.monitors.last().map_or(0.0, |m| m.t),
            samples: run.monitors.len(),
            initial_min_r: first.min_r,
            min_r_after_start: min_r_after,
            min_h: super::min_of(run.monitors.iter().map(|m| m.min_h)),
            max_area_increase,
            sphere_radius: r0,
            max_radius_error: radius_error,
        });
    }
    Ok(outcome("mcf", &params, checks, &summary, table, breakdown))
}
