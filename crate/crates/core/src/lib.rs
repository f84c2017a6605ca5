//! Super dense coding capacities over covariant noisy channels.

// `!(x >= 0.0)` style checks are used so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod cases;
pub mod channels;
pub mod error;
pub mod optimize;
pub mod qlin;
pub mod random;
pub mod states;
pub mod verify;

pub use error::{Result, SdcError};
