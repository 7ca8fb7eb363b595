#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod cli;
pub mod error;
pub mod herglotz;
pub mod matkit;
pub mod oplog;
pub mod quad;
pub mod random;
pub mod shift;
