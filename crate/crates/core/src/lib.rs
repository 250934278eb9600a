//! Extrinsic geometry of graph hypersurfaces `x^{n+1} = f(x)` in ℝⁿ⁺¹.
//!
//! The crate covers the elementary symmetric functions of matrices, 2-jets of
//! scalar fields, shape operators and curvatures of graphs, level-set
//! inequality checks, rotational example families, graphical mass integrals
//! and a small mean curvature flow solver for surfaces of revolution.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod graphgeo;
pub mod jets;
pub mod levelset;
pub mod mass;
pub mod mcf;
pub mod numeric;
pub mod quadrature;
pub mod rotex;
pub mod symfun;

pub use error::{GeomError, Result};
pub use fields::{FieldRegistry, SharedField};
pub use jets::{jet_at, Jet2, JetScheme, ScalarField};
