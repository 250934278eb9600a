use hypercurv_core::symfun::{identity_breakdown, SquareMatrix};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{outcome, Cell, Check, Outcome, Table};
use crate::spec::{nonzero, one_or_many, positive, require, CliError, Common};

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Matrix sizes
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    /// Matrices per size [default: 1000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Random seed (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bound on |residual| / max|a_ij|^2 [default: 1e-12]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Draw matrices with a_ij a_ji >= 0 and also check the inequality
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub coherent: Option<bool>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Serialize)]
struct Params {
    n: Vec<usize>,
    trials: usize,
    seed: u64,
    tol: f64,
    coherent: bool,
    log10_scale_range: [f64; 2],
}

#[derive(Debug, Serialize)]
struct Summary {
    matrices: usize,
    max_relative_residual: f64,
    worst_n: usize,
    min_relative_gap: Option<f64>,
}

struct Row {
    max_abs: f64,
    residual: f64,
    relative: f64,
    relative_gap: f64,
}

const SCALE_RANGE: [f64; 2] = [-2.0, 2.0];

fn draw(n: usize, seed: u64, trial: usize, coherent: bool) -> Result<Row, CliError> {
    let mut rng = crate::item_rng(seed, ((n as u64) << 40) | trial as u64);
    let scale = 10f64.powf(rng.gen_range(SCALE_RANGE[0]..SCALE_RANGE[1]));
    let mut entries: Vec<f64> = (0..n * n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
    if coherent {
        for i in 0..n {
            for j in (i + 1)..n {
                let upper = entries[i * n + j];
                entries[j * n + i] = entries[j * n + i].abs().copysign(upper);
            }
        }
    }
    let a = SquareMatrix::from_row_slice(n, &entries)?;
    let b = identity_breakdown(&a)?;
    let s2 = a.max_abs().powi(2);
    Ok(Row {
        max_abs: a.max_abs(),
        residual: b.residual,
        relative: b.residual.abs() / s2,
        relative_gap: b.inequality_gap() / s2,
    })
}

pub fn run(args: Args) -> Result<Outcome, CliError> {
    let params = Params {
        n: args.n.unwrap_or_else(|| (2..=8).collect()),
        trials: nonzero(args.trials.unwrap_or(1000), "trials")?,
        seed: require(args.seed, "seed")?,
        tol: positive(args.tol.unwrap_or(1e-12), "tol")?,
        coherent: args.coherent.unwrap_or(false),
        log10_scale_range: SCALE_RANGE,
    };
    if params.n.is_empty() || params.n.iter().any(|&n| n < 2) {
        return Err(CliError::spec("`n` must list sizes >= 2"));
    }

    let mut table = Table::new(&["n", "trial", "max_abs_entry", "residual", "relative_residual", "relative_gap"]);
    let mut checks = Vec::new();
    let mut summary = Summary { matrices: 0, max_relative_residual: 0.0, worst_n: params.n[0], min_relative_gap: None };
    for &n in &params.n {
        let rows: Vec<Row> = (0..params.trials)
            .into_par_iter()
            .map(|t| draw(n, params.seed, t, params.coherent))
            .collect::<Result<_, _>>()?;
        let worst = super::max_of(rows.iter().map(|r| r.relative));
        checks.push(Check::below(format!("max_relative_residual_n{n}"), worst, params.tol));
        if params.coherent {
            let gap = super::min_of(rows.iter().map(|r| r.relative_gap));
            checks.push(Check::at_least(format!("min_relative_gap_n{n}"), gap, -params.tol));
            summary.min_relative_gap = Some(summary.min_relative_gap.map_or(gap, |g| g.min(gap)));
        }
        if worst > summary.max_relative_residual {
            summary.max_relative_residual = worst;
            summary.worst_n = n;
        }
        summary.matrices += rows.len();
        for (t, r) in rows.iter().enumerate() {
            table.push(vec![
                n.into(),
                t.into(),
                r.max_abs.into(),
                r.residual.into(),
                r.relative.into(),
                if params.coherent { r.relative_gap.into() } else { Cell::Empty },
            ]);
        }
    }
    Ok(outcome("identity-check", &params, checks, &summary, table, false))
}
