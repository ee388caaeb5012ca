//! Benchmark fixtures.

use toprec_core::curve::{builtin_curve, SpectralCurve};
use toprec_core::recursion::Engine;

pub fn curve(name: &str) -> SpectralCurve {
    builtin_curve(name).expect("shipped curve")
}

/// A fresh engine, so nothing is memoised between iterations.
pub fn engine(name: &str) -> Engine {
    Engine::new(curve(name)).expect("valid curve")
}
