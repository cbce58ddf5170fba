#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod correlators;
pub mod ensemble;
pub mod error;
pub mod genfunc;
pub mod graph;
pub mod noise;
pub mod oracle;
pub mod par;
pub mod purification;
pub mod statmech;
