// `!(x > 0.0)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartesian;
pub mod error;
pub mod grid;
pub mod harness;
pub mod invert_ac;
pub mod invert_hs;
pub mod invert_john;
pub mod invert_svd;
pub mod profile;
pub mod quadrature;
pub mod specfun;
pub mod xform;

pub use error::{Error, Result};
