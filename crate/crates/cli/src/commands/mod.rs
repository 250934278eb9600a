//! One module per subcommand: flag/JSON arguments, resolved parameters and
//! the run itself.

pub mod curvature;
pub mod hhr;
pub mod identity;
pub mod mass;
pub mod mcf;
pub mod pmt;
pub mod sweep;


use hypercurv_core::{FieldRegistry, SharedField};

use crate::spec::CliError;

pub fn build_field(registry: &FieldRegistry, spec: &str, n: usize) -> Result<SharedField, CliError> {
    registry.build(spec, Some(n)).map_err(|e| CliError::spec(format!("field `{spec}`: {e}")))
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

