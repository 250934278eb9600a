use clap::ValueEnum;
use hypercurv_core::fields::Polynomial;
use hypercurv_core::levelset::{
    sample_level_points, trace_level, LevelPoint, Orientation, ProjectionOptions, Region, SamplePlan,
};
use hypercurv_core::{FieldRegistry, SharedField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::build_field;
use crate::output::{joined, outcome, Check, Outcome, Table};
use crate::spec::{nonzero, one_or_many, positive, CliError, Common};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orient {
    Along,
    Against,
    Both,
}

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Catalog field to check
    #[arg(long)]
    pub field: Option<String>,
    /// Dimensions
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    /// Random quartic graphs per dimension
    #[arg(long)]
    pub random_quartics: Option<usize>,
    /// Level points per graph [default: 25]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random seed (required for sampled levels)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Half-width of the sampling cube [default: 1]
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub half_width: Option<f64>,
    /// Trace this level of --field on a grid instead of sampling
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<f64>,
    /// Grid cells per axis for --level [default: 40]
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Level-set normal(s) to check [default: both]
    #[arg(long, value_enum)]
    pub orientation: Option<Orient>,
    /// Allowed negative gap [default: 1e-9]
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Treat --field as an equality case
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub expect_equality: Option<bool>,
    /// Additional equality-case field, sampled in every dimension of --n
    #[arg(long)]
    pub equality: Option<String>,
    /// Sampling half-width for --equality [default: 0.55]
    #[arg(long)]
    pub equality_box: Option<f64>,
    /// Bound on |gap| for equality cases [default: 1e-9]
    #[arg(long)]
    pub equality_tol: Option<f64>,
    /// Bound on the umbilicity defect for equality cases [default: 1e-6]
    #[arg(long)]
    pub umbilicity_tol: Option<f64>,
    /// Fewest level points required [default: 1]
    #[arg(long)]
    pub min_points: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Source {
    Quartic { n: usize, graph: usize, #[serde(rename = "box")] half_width: f64 },
    Field { field: String, n: usize, #[serde(rename = "box")] half_width: f64, equality: bool },
}

#[derive(Debug, Serialize)]
struct Params {
    sources: Vec<Source>,
    samples: usize,
    seed: Option<u64>,
    level: Option<f64>,
    resolution: usize,
    orientation: Orient,
    gap_tol: f64,
    equality_tol: f64,
    umbilicity_tol: f64,
    min_points: usize,
}

#[derive(Debug, Serialize)]
struct GraphSummary {
    source: String,
    expression: Option<String>,
    points: usize,
    rejected: Option<usize>,
    min_gap: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    graphs: usize,
    points: usize,
    min_gap: f64,
    equality_points: usize,
    equality_max_abs_gap: Option<f64>,
    equality_max_umbilicity: Option<f64>,
    per_graph: Vec<GraphSummary>,
}

fn orientation_label(o: Orientation) -> &'static str {
    match o {
        Orientation::AlongGradient => "along",
        Orientation::AgainstGradient => "against",
    }
}

struct Traced {
    label: String,
    expression: Option<String>,
    equality: bool,
    rows: Vec<(Orientation, LevelPoint)>,
    distinct: usize,
    rejected: Option<usize>,
}

fn trace_source(registry: &FieldRegistry, source: &Source, index: usize, p: &Params) -> Result<Traced, CliError> {
    let opts = ProjectionOptions::default();
    let mut expression = None;
    let (field, label, half, equality): (SharedField, String, f64, bool) = match source {
        Source::Quartic { n, graph, half_width } => {
            let mut rng = crate::item_rng(p.seed.expect("validated"), index as u64);
            let poly = Polynomial::random(&mut rng, *n, 4, 1.0);
            expression = Some(poly.to_expression());
            (Arc::new(poly), format!("quartic n={n} #{graph}"), *half_width, false)
        }
        Source::Field { field, n, half_width, equality } => {
            (build_field(registry, field, *n)?, field.clone(), *half_width, *equality)
        }
    };
    let n = field.dim();
    let region = Region::cube(n, half);
    let (base, rejected) = match p.level {
        Some(c) => {
            let traced = trace_level(field.as_ref(), c, &region, p.resolution, Orientation::AlongGradient, &opts)?;
            (traced.points, Some(traced.rejected))
        }
        None => {
            let mut rng = crate::item_rng(p.seed.expect("validated"), (1 << 32) | index as u64);
            let plan = SamplePlan::new(region, p.samples);
            let points = sample_level_points(field.as_ref(), &plan, &mut rng);
            (points, None)
        }
    };
    let distinct = base.len();
    let mut rows = Vec::with_capacity(2 * distinct);
    for point in base {
        if p.orientation != Orient::Along {
            let flipped = LevelPoint::evaluate(
                field.as_ref(),
                point.x.clone(),
                point.c,
                Orientation::AgainstGradient,
                opts.grad_floor,
            )?;
            if p.orientation == Orient::Both {
                rows.push((Orientation::AlongGradient, point));
            }
            rows.push((Orientation::AgainstGradient, flipped));
        } else {
            rows.push((Orientation::AlongGradient, point));
        }
    }
    Ok(Traced { label, expression, equality, rows, distinct, rejected })
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    let dims = args.n.clone().unwrap_or_else(|| vec![2, 3, 4]);
    if dims.is_empty() || dims.iter().any(|&n| n < 2) {
        return Err(CliError::spec("`n` must list dimensions >= 2"));
    }
    let half_width = positive(args.half_width.unwrap_or(1.0), "box")?;
    let mut sources = Vec::new();
    if let Some(graphs) = args.random_quartics {
        for &n in &dims {
            for graph in 0..graphs {
                sources.push(Source::Quartic { n, graph, half_width });
            }
        }
    }
    if let Some(field) = &args.field {
        for &n in &dims {
            sources.push(Source::Field {
                field: field.clone(),
                n,
                half_width,
                equality: args.expect_equality.unwrap_or(false),
            });
        }
    }
    if let Some(field) = &args.equality {
        let half_width = positive(args.equality_box.unwrap_or(0.55), "equality-box")?;
        for &n in &dims {
            sources.push(Source::Field { field: field.clone(), n, half_width, equality: true });
        }
    }
    if sources.is_empty() {
        return Err(CliError::spec("give --field, --random-quartics or --equality"));
    }
    if args.level.is_some() && (args.field.is_none() || args.random_quartics.is_some() || args.equality.is_some()) {
        return Err(CliError::spec("`level` traces --field only"));
    }
    let params = Params {
        sources,
        samples: nonzero(args.samples.unwrap_or(25), "samples")?,
        seed: args.seed,
        level: args.level,
        resolution: nonzero(args.resolution.unwrap_or(40), "resolution")?,
        orientation: args.orientation.unwrap_or(Orient::Both),
        gap_tol: positive(args.gap_tol.unwrap_or(1e-9), "gap-tol")?,
        equality_tol: positive(args.equality_tol.unwrap_or(1e-9), "equality-tol")?,
        umbilicity_tol: positive(args.umbilicity_tol.unwrap_or(1e-6), "umbilicity-tol")?,
        min_points: args.min_points.unwrap_or(1),
    };
    if params.level.is_none() && params.seed.is_none() {
        return Err(CliError::spec("`seed` is required for sampled levels"));
    }

    let registry = FieldRegistry::with_builtins();
    let traced: Vec<Traced> = params
        .sources
        .par_iter()
        .enumerate()
        .map(|(i, s)| trace_source(&registry, s, i, &params))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&[
        "source",
        "n",
        "c",
        "x",
        "orientation",
        "cos_angle",
        "h_sigma",
        "lhs",
        "rhs",
        "gap",
        "umbilicity_defect",
        "principal_cluster_defect",
    ]);
    let mut summary = Summary {
        graphs: traced.len(),
        points: 0,
        min_gap: f64::INFINITY,
        equality_points: 0,
        equality_max_abs_gap: None,
        equality_max_umbilicity: None,
        per_graph: Vec::new(),
    };
    let (mut eq_gap, mut eq_umb) = (0.0f64, 0.0f64);
    for t in &traced {
        let min_gap = super::min_of(t.rows.iter().map(|(_, p)| p.gap));
        summary.points += t.distinct;
        summary.min_gap = summary.min_gap.min(min_gap);
        if t.equality {
            summary.equality_points += t.distinct;
            for (_, p) in &t.rows {
                eq_gap = eq_gap.max(p.gap.abs());
                eq_umb = eq_umb.max(p.diagnostics.umbilicity_defect);
            }
        }
        summary.per_graph.push(GraphSummary {
            source: t.label.clone(),
            expression: t.expression.clone(),
            points: t.distinct,
            rejected: t.rejected,
            min_gap,
        });
        for (o, p) in &t.rows {
            table.push(vec![
                t.label.as_str().into(),
                p.x.len().into(),
                p.c.into(),
                joined(&p.x),
                orientation_label(*o).into(),
                p.cos_angle.into(),
                p.h_sigma.into(),
                p.lhs.into(),
                p.rhs.into(),
                p.gap.into(),
                p.diagnostics.umbilicity_defect.into(),
                p.diagnostics.principal_cluster_defect.into(),
            ]);
        }
    }
    let mut checks = vec![
        Check::at_least("points", summary.points as f64, params.min_points as f64),
        Check::at_least("min_gap", summary.min_gap, -params.gap_tol),
    ];
    if params.sources.iter().any(|s| matches!(s, Source::Field { equality: true, .. })) {
        summary.equality_max_abs_gap = Some(eq_gap);
        summary.equality_max_umbilicity = Some(eq_umb);
        checks.push(Check::at_least("equality_points", summary.equality_points as f64, 1.0));
        checks.push(Check::below("equality_max_abs_gap", eq_gap, params.equality_tol));
        checks.push(Check::below("equality_max_umbilicity", eq_umb, params.umbilicity_tol));
    }
    Ok(outcome("hhr-check", &params, checks, &summary, table, false))
}
