#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN
pub mod aggregate;
pub mod alignment;
pub mod bundle;
pub mod dist;
pub mod driver;
pub mod effect_size;
pub mod evidence;
pub mod parser;
mod quadrature;
pub mod special;
pub mod stat_tests;
