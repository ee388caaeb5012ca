//! Checkers that never call the recursion engine: map enumeration, Hurwitz
//! numbers, ψ-class intersection numbers, and a direct evaluation of
//! `ω_2^(1)`.

mod hurwitz;
mod maps;
mod omega21;
mod tau;
mod tutte;

pub use hurwitz::{cut_and_join_hurwitz, genus0_one_part, normalized_hurwitz, Partition};
pub use maps::one_face_maps;
pub use omega21::omega21_direct;
pub use tau::TauTable;
pub use tutte::{tutte_disc, tutte_disc_perturbative};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::curve::CurveError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("t_2 must be nonzero")]
    ZeroQuadraticTime,
    #[error("time t_{0} makes the recursion non-forward; use the perturbative form")]
    NotForward(usize),
    #[error("k = {0} is too large for exhaustive enumeration (at most {1})")]
    TooLarge(u32, u32),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("⟨{ds:?}⟩ at genus {g} is outside the string/dilaton closure of the seeds")]
    Unreachable { g: u32, ds: Vec<u32> },
    #[error("(g, n) = ({g}, {n}) is unstable")]
    Unstable { g: u32, n: u32 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
