pub mod arith;
pub mod bounds;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod field;
pub mod homogenize;
pub mod interval;
pub mod linalg;
pub mod lp;
pub mod newton;
pub mod poly;
pub mod sums;

pub use error::{Error, Result};
pub use poly::{ExponentVector, Polynomial, QuasiWeights};
