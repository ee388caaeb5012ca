//! Re-expansion of correlators: coefficients in powers of a weight function,
//! decomposition over the `B_{a,k}` forms, Kontsevich times and their duals,
//! and intersection numbers for curves of Airy type.

mod basis;
mod expand;

pub use basis::{basis_decomposition, dual_times, extract_times, intersection_numbers, times_from_delta};
pub use expand::{expand_at_point, Target};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Rational, RationalFunction};
use crate::curve::ChartPoint;
use crate::recursion::EngineError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("bad weight: {0}")]
    BadWeight(String),
    #[error("leading coefficient {q} of x - x(a) at a = {point} is not a rational square")]
    NotASquare { point: Rational, q: Rational },
    #[error("{0}")]
    Precondition(String),
    #[error("principal part at {point} is not spanned by the B forms (residual at order {order})")]
    Residual { point: Rational, order: u32 },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// How coefficient indices are attached to powers of the weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexConvention {
    /// `Ã_k = Res W f^k / v`: the coefficient of `f^(-k-1) df`.
    #[default]
    Power,
    /// `Ã_μ = Res W f^(-μ) / v`: the coefficient of `f^(μ-1) df`.
    Winding,
}

/// `f(ζ) = R(ζ) exp(Q(ζ))` around `point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    pub point: ChartPoint,
    pub rational: RationalFunction,
    pub exponent: RationalFunction,
    pub index: IndexConvention,
}

impl WeightFunction {
    pub fn rational(point: ChartPoint, rational: RationalFunction) -> Self {
        Self {
            point,
            rational,
            exponent: RationalFunction::zero(),
            index: IndexConvention::Power,
        }
    }

    /// `f = ζ - p`, or `f = 1/ζ` at infinity: the chart variable itself.
    pub fn local_coordinate(point: ChartPoint) -> Self {
        use crate::algebra::Polynomial;
        let rational = match &point {
            ChartPoint::Finite(p) => RationalFunction::from_poly(Polynomial::linear_root(p)),
            ChartPoint::Infinity => RationalFunction::identity().recip().expect("nonzero"),
        };
        Self::rational(point, rational)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    TildeA,
    BasisA,
    KontsevichTimes,
    DualTimes,
    IntersectionNumbers,
}

/// Index of one reported value: branch point per slot (when relevant) and the integer indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReportIndex {
    pub at: Vec<usize>,
    pub k: Vec<i64>,
}

impl ReportIndex {
    pub fn plain(k: Vec<i64>) -> Self {
        Self { at: Vec::new(), k }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionReport {
    pub kind: ReportKind,
    /// Labels for the indices in [`ReportIndex::at`].
    pub points: Vec<Rational>,
    pub values: BTreeMap<ReportIndex, Rational>,
    pub notes: BTreeMap<String, String>,
}

impl ExpansionReport {
    pub fn new(kind: ReportKind) -> Self {
        Self {
            kind,
            points: Vec::new(),
            values: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn get(&self, k: &[i64]) -> Option<&Rational> {
        self.values.get(&ReportIndex::plain(k.to_vec()))
    }

    pub fn get_at(&self, at: &[usize], k: &[i64]) -> Option<&Rational> {
        self.values.get(&ReportIndex {
            at: at.to_vec(),
            k: k.to_vec(),
        })
    }

    pub fn to_record(&self) -> ReportRecord {
        ReportRecord {
            kind: self.kind,
            notes: self.notes.clone(),
            entries: self
                .values
                .iter()
                .map(|(i, v)| ReportEntry {
                    at: i.at.iter().map(|&p| self.points[p].to_string()).collect(),
                    index: i.k.clone(),
                    value: v.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub kind: ReportKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
    pub entries: Vec<ReportEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub at: Vec<String>,
    pub index: Vec<i64>,
    pub value: String,
}
