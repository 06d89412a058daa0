//! Quaternionic Frenet frames and Mannheim curve pairs in E3 and E4.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod frenet;
pub mod io;
pub mod mannheim;
pub mod quat;
pub mod stencil;

pub use error::{Error, Result};
pub use quat::{Quaternion, SpatialQuaternion};
