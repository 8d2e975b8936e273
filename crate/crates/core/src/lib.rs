//! Exact curvature and algebraic Schouten soliton computations for the
//! three-dimensional Lorentzian Lie algebras.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod exactpoly;
pub mod geometry;
pub mod liealgebras;
pub mod soliton;
