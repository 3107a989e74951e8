//! Numerical laboratory for Müntz spaces: weighted norms of lacunary
//! polynomials, moment conditions on measures, and type constants of
//! operators acting on monomials.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference constants are quoted at the precision they were published with.
#![allow(clippy::excessive_precision)]
#![allow(clippy::too_many_arguments)]

pub mod config;
pub mod error;
pub mod exponents;
pub mod measures;
pub mod muntz_poly;
pub mod operators;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod sphere;
pub mod trend;
pub mod typeconst;
pub mod verify;

pub use error::{Error, Result};
