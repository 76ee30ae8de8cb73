#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cadlag;
pub mod decompositions;
pub mod error;
pub mod integral;
pub mod metrics;
pub mod processes;
pub mod rng;
pub mod runner;
pub mod sde;
pub mod stats;
