//! Geometry of generalized stretch maps on hyperbolic surfaces with boundary.

pub mod cli;
pub mod hyp_core;
pub mod pieces;
pub mod stretch;
pub mod surface;
pub mod traintrack;
pub mod tol;
