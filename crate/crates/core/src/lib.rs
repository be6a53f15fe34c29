//! Multiply periodic splines on the Klein disk.

pub mod cli;
pub mod export;
pub mod field;
pub mod geometry;
pub mod group;
pub mod partition;
pub mod linalg;
pub mod poly;
pub mod spline;
