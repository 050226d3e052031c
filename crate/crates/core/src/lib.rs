#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adda;
pub mod error;
pub mod linalg;
pub mod mstruct;
pub mod oracle;
pub mod probgen;
pub mod problem;

pub use error::{Error, Result};
pub use linalg::Matrix;
