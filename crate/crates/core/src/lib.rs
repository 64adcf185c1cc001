//! Energy-minimizing routing of heterogeneous drone fleets whose energy use
//! depends on the payload still on board.

// `!(x > 0.0)` is how NaN inputs get rejected alongside non-positive ones
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod energy;
pub mod feasibility;
pub mod milp;
pub mod model;
pub mod solver;
