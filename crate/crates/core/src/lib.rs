//! Self-gravitating elastic balls with a polytropic-type constitutive law.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod constitutive;
pub mod error;
pub mod homologous;
pub mod interp;
pub mod lagrangian;
pub mod material;
pub mod ode;
pub mod output;
pub mod phase;
pub mod static_ball;

pub use error::{Error, Result};
pub use material::{Material, MaterialParams, StrainState};
