#![no_std]
// NaN must fail every `!(a > b)` guard in this crate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod linalg;
pub mod model;
pub mod benchmarks;
pub mod sdre;
pub mod ode;
pub mod optimizer;
pub mod simulate;
