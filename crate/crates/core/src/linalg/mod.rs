//! Exact rational arithmetic: scalars, plane vectors, intervals and small
//! dense matrices with rank, solving and left-null-space extraction.
//!
//! Elimination always pivots on the first nonzero entry of a column, so
//! every derived vector is reproducible bit for bit.

mod interval;
mod matrix;
mod rational;
mod vec2;

pub use interval::RatInterval;
pub use matrix::Mat;
pub use rational::{common_denominator, rat, ParseRationalError, Rational};
pub use vec2::{v2, Vec2};
