//! Run-spec ingestion: a JSON file overlaid with command-line flags.

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use hypercurv_core::GeomError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_INVALID_SPEC: i32 = 3;
pub const EXIT_BREAKDOWN: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Spec(String),
    Breakdown(String),
    Io(String),
}

impl CliError {
    pub fn spec(msg: impl Into<String>) -> Self {
        CliError::Spec(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => EXIT_INVALID_SPEC,
            CliError::Breakdown(_) => EXIT_BREAKDOWN,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Spec(m) => write!(f, "invalid spec: {m}"),
            CliError::Breakdown(m) => write!(f, "numerical breakdown: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match &e {
            GeomError::Io(m) => CliError::Io(m.clone()),
            _ if e.is_numeric_breakdown() => CliError::Breakdown(e.to_string()),
            _ => CliError::Spec(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    #[default]
    Csv,
    Json,
}

/// Options shared by every subcommand; they never enter the report.
#[derive(clap::Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run spec; flags given on the command line override its keys
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    /// Directory for report.json and the data file (report goes to stdout otherwise)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: HYPERCURV_WORKERS, then available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Data file format
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
}

/// Output settings after merging file and flags.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub format: DataFormat,
}

fn take<T: DeserializeOwned>(obj: &mut Map<String, Value>, key: &str) -> Result<Option<T>, CliError> {
    match obj.remove(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| CliError::spec(format!("key `{key}`: {e}"))),
    }
}

/// Merge `flags` over the spec file (if any) and deserialize the result.
pub fn resolve<A>(command: &str, flags: &A, common: &Common) -> Result<(A, Settings), CliError>
where
    A: Serialize + DeserializeOwned,
{
    let mut merged = Map::new();
    let mut settings = Settings::default();
    if let Some(path) = &common.spec {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?;
        let Value::Object(mut obj) = value else {
            return Err(CliError::spec(format!("{}: expected a JSON object", path.display())));
        };
        if let Some(cmd) = take::<String>(&mut obj, "command")? {
            if cmd != command {
                return Err(CliError::spec(format!("spec file is for `{cmd}`, not `{command}`")));
            }
        }
        settings.out = take(&mut obj, "out")?;
        settings.workers = take(&mut obj, "workers")?;
        settings.format = take(&mut obj, "format")?.unwrap_or_default();
        merged = obj;
    }
    let Value::Object(given) = serde_json::to_value(flags).map_err(|e| CliError::spec(e.to_string()))? else {
        unreachable!("argument structs serialize to objects");
    };
    for (k, v) in given {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    let args = serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::spec(e.to_string()))?;
    if common.out.is_some() {
        settings.out = common.out.clone();
    }
    if common.workers.is_some() {
        settings.workers = common.workers;
    }
    if let Some(f) = common.format {
        settings.format = f;
    }
    Ok((args, settings))
}

/// Accept either a scalar or an array for list-valued keys.
pub fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Option::<OneOrMany<T>>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    }))
}

pub fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::spec(format!("`{key}` is required")))
}

pub fn positive(value: f64, key: &str) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::spec(format!("`{key}` must be positive, got {value}")))
    }
}

pub fn nonzero(value: usize, key: &str) -> Result<usize, CliError> {
    if value > 0 {
        Ok(value)
    } else {
        Err(CliError::spec(format!("`{key}` must be at least 1")))
    }
}

/// Expand lists to a common length; each must have length 1 or `len`.
pub fn broadcast<T: Clone>(values: &[T], len: usize, key: &str) -> Result<Vec<T>, CliError> {
    match values.len() {
        1 => Ok(vec![values[0].clone(); len]),
        l if l == len => Ok(values.to_vec()),
        0 => Err(CliError::spec(format!("`{key}` is empty"))),
        l => Err(CliError::spec(format!("`{key}` has {l} entries, expected 1 or {len}"))),
    }
}

pub fn case_count(lengths: &[usize]) -> usize {
    lengths.iter().copied().max().unwrap_or(1).max(1)
}
