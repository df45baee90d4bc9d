//! Exact-arithmetic engine for a noncommutative KP hierarchy with
//! hypercomplex coefficients.

pub mod algebra;
pub mod cli;
pub mod diffcoeff;
pub mod error;
pub mod hierarchy;
pub mod io;
pub mod numeric;
pub mod psido;
pub mod reductions;
pub mod scalar;
pub mod timealg;

pub use error::{Error, Result};
pub use scalar::Scalar;
