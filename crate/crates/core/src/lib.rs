// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gas;
pub mod linalg;
pub mod metric;
pub mod numdiff;
pub mod reaction;
pub mod scan;
pub mod solution;
pub mod standard;

pub use error::{Error, Result};
