//! Weighted Hardy–Littlewood averaging operators and their norms on grand
//! Lebesgue spaces of radial functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aniso;
pub mod error;
pub mod quadrature;
pub mod norms;
pub mod operators;
pub mod radialfn;
pub mod specfun;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
