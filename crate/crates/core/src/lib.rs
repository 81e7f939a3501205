// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cerf;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod laxphillips;
pub mod ledger;
pub mod model;
pub mod poles;
pub mod quad;
pub mod resolvent;

pub use error::{Error, Result};
