//! Named initial profiles and the plain-text node-list format.

use std::collections::BTreeMap;
use std::path::Path;

use super::{ProfileCurve, ProfileKind};
use crate::error::{GeomError, Result};
use crate::fields::FieldRequest;

type Builder = Box<dyn Fn(usize, &[f64], usize) -> Result<ProfileCurve> + Send + Sync>;

/// Name → profile constructor, called with `(n, parameters, node count)`.
pub struct ProfileRegistry {
    entries: BTreeMap<String, (&'static str, Builder)>,
}

impl Default for ProfileRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ProfileRegistry {
    pub fn empty() -> Self {
        ProfileRegistry { entries: BTreeMap::new() }
    }

    pub fn register<F>(&mut self, name: &str, usage: &'static str, build: F)
    where
        F: Fn(usize, &[f64], usize) -> Result<ProfileCurve> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), (usage, Box::new(build)));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn usage(&self, name: &str) -> Option<&'static str> {
        self.entries.get(name).map(|e| e.0)
    }

    pub fn build(&self, spec: &str, n: usize, nodes: usize) -> Result<ProfileCurve> {
        let req = FieldRequest::parse(spec, Some(n))?;
        let (_, build) = self
            .entries
            .get(&req.name)
            .ok_or_else(|| GeomError::UnknownEntry(req.name.clone()))?;
        build(n, &req.numbers()?, nodes)
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("sphere", "sphere | sphere(radius)", |n, args, count| {
            ProfileCurve::sphere(n, optional(args, 0, 1.0, "sphere")?, count)
        });
        reg.register("ellipsoid", "ellipsoid(a_r,a_z)", |n, args, count| match args {
            [a, b] => ProfileCurve::ellipsoid(n, *a, *b, count),
            [] => ProfileCurve::ellipsoid(n, 1.0, 2.0, count),
            _ => Err(GeomError::domain("ellipsoid takes (a_r,a_z)")),
        });
        reg.register("torus", "torus(a) | torus(a,minor)", |n, args, count| match args {
            [a] => ProfileCurve::torus(n, *a, 1.0, count),
            [a, b] => ProfileCurve::torus(n, *a, *b, count),
            _ => Err(GeomError::domain("torus takes (a) or (a,minor)")),
        });
        reg.register("superellipse", "superellipse | superellipse(p) | superellipse(p,scale)", |n, args, count| {
            match args {
                [] => ProfileCurve::superellipse(n, 4.0, 1.0, count),
                [p] => ProfileCurve::superellipse(n, *p, 1.0, count),
                [p, s] => ProfileCurve::superellipse(n, *p, *s, count),
                _ => Err(GeomError::domain("superellipse takes (p) or (p,scale)")),
            }
        });
        reg
    }
}

fn optional(args: &[f64], idx: usize, default: f64, name: &str) -> Result<f64> {
    if args.len() > idx + 1 {
        return Err(GeomError::domain(format!("too many parameters for {name}")));
    }
    Ok(args.get(idx).copied().unwrap_or(default))
}

/// Parse `r z` pairs, one per line; `#` starts a comment. Arcs that begin
/// and end on the axis are sphere-type, anything else is a closed loop.
pub fn parse_profile(text: &str, n: usize) -> Result<ProfileCurve> {
    let mut nodes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parsed: Vec<f64> = parts.iter().filter_map(|p| p.parse().ok()).collect();
        if parts.len() != 2 || parsed.len() != 2 {
            return Err(GeomError::parse(raw, format!("line {}: expected `r z`", lineno + 1)));
        }
        nodes.push([parsed[0], parsed[1]]);
    }
    if nodes.len() < 3 {
        return Err(GeomError::parse(text, "profile needs at least three nodes"));
    }
    let on_axis = |p: &[f64; 2]| p[0].abs() < 1e-12;
    let kind = if on_axis(&nodes[0]) && on_axis(&nodes[nodes.len() - 1]) {
        let last = nodes.len() - 1;
        nodes[0][0] = 0.0;
        nodes[last][0] = 0.0;
        ProfileKind::SphereType
    } else {
        ProfileKind::TorusType
    };
    ProfileCurve::new(n, kind, nodes)
}

pub fn read_profile_file(path: &Path, n: usize) -> Result<ProfileCurve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GeomError::Io(format!("{}: {e}", path.display())))?;
    parse_profile(&text, n)
}
