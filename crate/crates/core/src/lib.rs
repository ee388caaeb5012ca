//! Exact topological recursion on genus-0 spectral curves.

pub mod algebra;
pub mod curve;
pub mod oracles;
pub mod recursion;
pub mod transforms;
