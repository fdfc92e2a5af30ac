#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod optimize;
pub mod pulses;
pub mod qla;

pub use error::{Error, Result};
