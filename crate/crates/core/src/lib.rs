//! Exact signed counts of the points where a 4x4 polynomial matrix (or the
//! Jacobian matrix of a map R⁴ → R⁴) has rank two, local indices at rational
//! points, and topological degrees of proper maps.

pub mod bilinear;
pub mod cli;
pub mod error;
pub mod groebner;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod parser;
pub mod pipeline;
pub mod poly;
pub mod quotient;
pub mod univariate;

pub use error::{Error, Result};
