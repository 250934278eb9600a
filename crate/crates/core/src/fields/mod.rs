//! Catalog of scalar fields addressable by name, e.g. `hemisphere(1)` or
//! `schwarzschild(3,1)`.
//!
//! Each catalog entry is a factory registered under its name; callers pick
//! one at runtime from a spec string.

pub mod basic;
pub mod polynomial;
pub mod radial;
pub mod rotational;
pub mod schwarzschild;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::jets::ScalarField;

pub use basic::{Affine, CubicSheet, Cylinder};
pub use polynomial::{Monomial, Polynomial};
pub use radial::{AnnularBump, Hemisphere, PowerLaw, RadialField, RadialProfile, TorusArc};
pub use rotational::SphereBundleArc;
pub use schwarzschild::SchwarzschildProfile;

pub type SharedField = Arc<dyn ScalarField>;

/// A parsed `name(args)` spec plus the dimension requested by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRequest {
    pub name: String,
    pub args: String,
    pub dim: Option<usize>,
}

impl FieldRequest {
    pub fn parse(spec: &str, dim: Option<usize>) -> Result<Self> {
        let spec = spec.trim();
        let (name, args) = match spec.find('(') {
            Some(open) => {
                let close = spec
                    .rfind(')')
                    .filter(|&c| c > open && c == spec.len() - 1)
                    .ok_or_else(|| GeomError::parse(spec, "unbalanced parentheses"))?;
                (&spec[..open], &spec[open + 1..close])
            }
            None => (spec, ""),
        };
        if name.is_empty() {
            return Err(GeomError::parse(spec, "missing field name"));
        }
        Ok(FieldRequest {
            name: name.trim().to_string(),
            args: args.trim().to_string(),
            dim,
        })
    }

    /// Comma-separated numeric arguments.
    pub fn numbers(&self) -> Result<Vec<f64>> {
        if self.args.is_empty() {
            return Ok(Vec::new());
        }
        self.args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| GeomError::parse(&self.args, format!("`{a}` is not a number")))
            })
            .collect()
    }

    pub fn require_dim(&self) -> Result<usize> {
        match self.dim {
            Some(n) if n >= 1 => Ok(n),
            _ => Err(GeomError::domain(format!("field `{}` needs a dimension", self.name))),
        }
    }
}

type Factory = Box<dyn Fn(&FieldRequest) -> Result<SharedField> + Send + Sync>;

struct Entry {
    usage: &'static str,
    factory: Factory,
}

/// Name → factory map for scalar fields.
pub struct FieldRegistry {
    entries: BTreeMap<String, Entry>,
}

impl Default for FieldRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl FieldRegistry {
    pub fn empty() -> Self {
        FieldRegistry { entries: BTreeMap::new() }
    }

    pub fn register<F>(&mut self, name: &str, usage: &'static str, factory: F)
    where
        F: Fn(&FieldRequest) -> Result<SharedField> + Send + Sync + 'static,
    {
        self.entries.insert(
            name.to_string(),
            Entry { usage, factory: Box::new(factory) },
        );
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn usage(&self, name: &str) -> Option<&'static str> {
        self.entries.get(name).map(|e| e.usage)
    }

    pub fn build(&self, spec: &str, dim: Option<usize>) -> Result<SharedField> {
        let request = FieldRequest::parse(spec, dim)?;
        let entry = self
            .entries
            .get(&request.name)
            .ok_or_else(|| GeomError::UnknownEntry(request.name.clone()))?;
        let field = (entry.factory)(&request)?;
        if let Some(n) = dim {
            if field.dim() != n {
                return Err(GeomError::domain(format!(
                    "`{spec}` has dimension {}, but n = {n} was requested",
                    field.dim()
                )));
            }
        }
        Ok(field)
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("plane", "plane | plane(c) | plane(c,a1,...,an)", |req| {
            let n = req.require_dim()?;
            let nums = req.numbers()?;
            let field = match nums.len() {
                0 => Affine::zero(n),
                1 => Affine { offset: nums[0], slope: vec![0.0; n] },
                len if len == n + 1 => Affine { offset: nums[0], slope: nums[1..].to_vec() },
                _ => {
                    return Err(GeomError::parse(&req.args, format!("plane takes 0, 1 or {} numbers", n + 1)))
                }
            };
            Ok(Arc::new(field) as SharedField)
        });
        reg.register("hemisphere", "hemisphere | hemisphere(radius)", |req| {
            let n = req.require_dim()?;
            let radius = single_or(req, 1.0)?;
            positive(radius, "hemisphere radius")?;
            Ok(Arc::new(RadialField::new(Hemisphere { radius }, n)) as SharedField)
        });
        reg.register("cubic_sheet", "cubic_sheet  (f = (x^n)^3)", |req| {
            let n = req.require_dim()?;
            Ok(Arc::new(CubicSheet { n }) as SharedField)
        });
        reg.register("cylinder", "cylinder | cylinder(radius)", |req| {
            let n = req.require_dim()?;
            let radius = single_or(req, 1.0)?;
            positive(radius, "cylinder radius")?;
            Ok(Arc::new(Cylinder { n, radius }) as SharedField)
        });
        reg.register("poly", "poly(0.5*x1^2*x2 - x3 + 1)", |req| {
            Ok(Arc::new(Polynomial::parse(&req.args, req.dim)?) as SharedField)
        });
        reg.register("power", "power(c,p)  (f = c|x|^p)", |req| {
            let n = req.require_dim()?;
            let nums = req.numbers()?;
            if nums.len() != 2 {
                return Err(GeomError::parse(&req.args, "power takes (c,p)"));
            }
            Ok(Arc::new(RadialField::new(
                PowerLaw { coefficient: nums[0], exponent: nums[1] },
                n,
            )) as SharedField)
        });
        reg.register("bump", "bump(r1,r2,amplitude)", |req| {
            let n = req.require_dim()?;
            let nums = req.numbers()?;
            if nums.len() != 3 || !(0.0 <= nums[0] && nums[0] < nums[1]) {
                return Err(GeomError::parse(&req.args, "bump takes (r1,r2,amplitude) with 0 <= r1 < r2"));
            }
            Ok(Arc::new(RadialField::new(
                AnnularBump { inner: nums[0], outer: nums[1], amplitude: nums[2] },
                n,
            )) as SharedField)
        });
        reg.register("rot_odd", "rot_odd(n,a) | rot_odd(n,k,a)", |req| {
            let family = rotational_request(req, crate::rotex::Variant::Odd)?;
            Ok(crate::rotex::family_field(&family))
        });
        reg.register("rot_even", "rot_even(n,a) | rot_even(n,k,a)", |req| {
            let family = rotational_request(req, crate::rotex::Variant::Even)?;
            Ok(crate::rotex::family_field(&family))
        });
        reg.register("schwarzschild", "schwarzschild(n,m)", |req| {
            let nums = req.numbers()?;
            if nums.len() != 2 {
                return Err(GeomError::parse(&req.args, "schwarzschild takes (n,m)"));
            }
            let n = as_dimension(nums[0])?;
            crate::rotex::schwarzschild_field(n, nums[1])
        });
        reg
    }
}

fn single_or(req: &FieldRequest, default: f64) -> Result<f64> {
    let nums = req.numbers()?;
    match nums.as_slice() {
        [] => Ok(default),
        [v] => Ok(*v),
        _ => Err(GeomError::parse(&req.args, format!("`{}` takes at most one number", req.name))),
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(GeomError::domain(format!("{what} must be positive, got {v}")))
    }
}

fn as_dimension(v: f64) -> Result<usize> {
    if v.fract() != 0.0 || v < 1.0 {
        return Err(GeomError::domain(format!("dimension must be a positive integer, got {v}")));
    }
    Ok(v as usize)
}

fn rotational_request(req: &FieldRequest, variant: crate::rotex::Variant) -> Result<crate::rotex::RotationalFamily> {
    let nums = req.numbers()?;
    let (n, k, a) = match nums.as_slice() {
        [n, a] => {
            let n = as_dimension(*n)?;
            (n, variant.default_k(n), *a)
        }
        [n, k, a] => (as_dimension(*n)?, as_dimension(*k)?, *a),
        _ => return Err(GeomError::parse(&req.args, "expected (n,a) or (n,k,a)")),
    };
    crate::rotex::RotationalFamily::new(variant, n, k, a)
}
