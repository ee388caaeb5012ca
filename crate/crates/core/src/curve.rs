//! Genus-0 spectral curves and the local data attached to their branch points.
//!
//! A curve is given in a global coordinate `ζ` by a rational function `y(ζ)`
//! and a rational one-form `dx = ρ(ζ) dζ`. The function `x` itself is only
//! needed when it is rational; log-type curves supply `ρ` alone.
//!
//! All local work happens in `s = ζ - a` at a branch point `a`. The sheet
//! exchange near `a` is the series involution `σ(s)`, characterised by
//! `X(σ(s)) = X(s)` where `X(s) = x(a + s) - x(a)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    parse_rational, rational_roots, AlgebraError, Polynomial, Rational, RationalFunction,
    TruncatedSeries,
};
use crate::transforms::{IndexConvention, WeightFunction};

use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("curve document: {0}")]
    Parse(String),
    #[error("dx must not vanish identically")]
    ZeroForm,
    #[error("x' = {derivative} does not match dx/dζ = {rho}")]
    DerivativeMismatch {
        derivative: RationalFunction,
        rho: RationalFunction,
    },
    #[error("dx has zeros outside the rationals; irreducible factor {0}")]
    IrrationalZero(Polynomial),
    #[error("branch point {a} is not simple (multiplicity {multiplicity})")]
    NonSimple { a: Rational, multiplicity: u32 },
    #[error("y has a pole at the branch point {0}")]
    PoleOfY(Rational),
    #[error("dy vanishes at the branch point {0}")]
    ZeroOfDy(Rational),
    #[error("dx vanishes at infinity; move the branch point to a finite chart")]
    BranchPointAtInfinity,
    #[error("no branch points")]
    NoBranchPoints,
    #[error("local data at {a}: {source}")]
    Local { a: Rational, source: AlgebraError },
    #[error("involution check failed at {0}")]
    Involution(Rational),
}

/// A point of the ζ-sphere used as an expansion centre.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartPoint {
    Finite(Rational),
    Infinity,
}

impl std::fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChartPoint::Finite(a) => write!(f, "{a}"),
            ChartPoint::Infinity => write!(f, "infinity"),
        }
    }
}

/// A named weight function supplied by a curve file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionPoint {
    pub name: String,
    pub weight: WeightFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCurve {
    pub label: String,
    pub y: RationalFunction,
    /// `ρ` with `dx = ρ(ζ) dζ`.
    pub rho: RationalFunction,
    pub x: Option<RationalFunction>,
    pub expansion_points: Vec<ExpansionPoint>,
}

impl SpectralCurve {
    pub fn new(
        label: impl Into<String>,
        y: RationalFunction,
        rho: RationalFunction,
        x: Option<RationalFunction>,
    ) -> Result<Self, CurveError> {
        if rho.is_zero() {
            return Err(CurveError::ZeroForm);
        }
        if let Some(x) = &x {
            let derivative = x.derivative();
            if derivative != rho {
                return Err(CurveError::DerivativeMismatch { derivative, rho });
            }
        }
        Ok(Self {
            label: label.into(),
            y,
            rho,
            x,
            expansion_points: Vec::new(),
        })
    }

    /// Same curve with `y` replaced.
    pub fn with_y(&self, y: RationalFunction) -> Self {
        Self { y, ..self.clone() }
    }

    pub fn expansion_point(&self, name: &str) -> Option<&ExpansionPoint> {
        self.expansion_points.iter().find(|p| p.name == name)
    }
}

/// Zeros of `dx`, each validated as a simple, regular branch point.
pub fn find_branchpoints(curve: &SpectralCurve) -> Result<Vec<Rational>, CurveError> {
    let num = curve.rho.numer();
    let den = curve.rho.denom();
    let deg_num = num.degree().unwrap_or(0) as i64;
    let deg_den = den.degree().unwrap_or(0) as i64;
    // dx = -ρ(1/t) dt/t² near ζ = ∞
    if deg_den - deg_num - 2 > 0 {
        return Err(CurveError::BranchPointAtInfinity);
    }
    let split = rational_roots(num);
    if !split.cofactor.is_constant() {
        return Err(CurveError::IrrationalZero(split.cofactor.monic()));
    }
    let mut out = Vec::with_capacity(split.roots.len());
    for (a, multiplicity) in split.roots {
        if multiplicity != 1 {
            return Err(CurveError::NonSimple { a, multiplicity });
        }
        if curve.y.denom().eval(&a).is_zero() {
            return Err(CurveError::PoleOfY(a));
        }
        let dy = curve.y.derivative();
        if dy.eval(&a).is_none_or(|v| v.is_zero()) {
            return Err(CurveError::ZeroOfDy(a));
        }
        out.push(a);
    }
    if out.is_empty() {
        return Err(CurveError::NoBranchPoints);
    }
    Ok(out)
}

fn local(a: &Rational) -> impl Fn(AlgebraError) -> CurveError + '_ {
    move |source| CurveError::Local {
        a: a.clone(),
        source,
    }
}

/// `X(s) = ∫_0^s ρ(a + t) dt`.
fn offset_series(curve: &SpectralCurve, a: &Rational, order: i64) -> Result<TruncatedSeries, AlgebraError> {
    curve.rho.expand_at(a, order - 1)?.integral()
}

/// `σ(s)` with `X(σ(s)) = X(s)` and `σ(s) = -s + O(s²)`.
///
/// With `X = q s² U(s)`, `U(0) = 1`, put `w = s √U`; then `X = q w²` and the
/// involution is `w ↦ -w` pulled back through the reversion of `w`.
pub fn local_involution(
    curve: &SpectralCurve,
    a: &Rational,
    order: i64,
) -> Result<TruncatedSeries, CurveError> {
    let x = offset_series(curve, a, order + 1).map_err(local(a))?;
    involution_from_offset(&x, order).map_err(local(a))
}

fn involution_from_offset(x: &TruncatedSeries, order: i64) -> Result<TruncatedSeries, AlgebraError> {
    if x.valuation() != 2 {
        return Err(AlgebraError::InvalidValuation {
            expected: "exactly 2",
            found: x.valuation(),
        });
    }
    let q = x.leading().cloned().expect("nonzero offset");
    let unit = x.shift(-2).scale(&q.recip());
    let w = unit.sqrt()?.shift(1).truncate(order);
    let w_inv = w.reversion()?;
    w_inv.compose(&w.scale(&-Rational::one()))
}

/// Local data at one branch point, certified below `order` in `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchFrame {
    pub a: Rational,
    pub sigma: TruncatedSeries,
    /// `σ'(s)`.
    pub sigma_prime: TruncatedSeries,
    pub x_off: TruncatedSeries,
    pub delta_y: TruncatedSeries,
    /// `Φ' = y ρ`, `Φ(0) = 0`.
    pub phi: TruncatedSeries,
    /// `ρ(a + s)`.
    pub rho: TruncatedSeries,
    pub order: i64,
}

pub fn build_frame(curve: &SpectralCurve, a: &Rational, order: i64) -> Result<BranchFrame, CurveError> {
    let err = local(a);
    let rho = curve.rho.expand_at(a, order).map_err(&err)?;
    let x_off = rho.integral().map_err(&err)?;
    let sigma = involution_from_offset(&x_off, order).map_err(&err)?;
    let sigma_prime = sigma.derivative();

    let x_back = x_off.compose(&sigma).map_err(&err)?;
    let twice = sigma.compose(&sigma).map_err(&err)?;
    if !(&x_back - &x_off).is_zero() || twice != TruncatedSeries::monomial(Rational::one(), 1, twice.order()) {
        return Err(CurveError::Involution(a.clone()));
    }

    let y = curve.y.expand_at(a, order).map_err(&err)?;
    if y.valuation() < 0 {
        return Err(CurveError::PoleOfY(a.clone()));
    }
    let y_bar = y.compose(&sigma).map_err(&err)?;
    let delta_y = &y - &y_bar;
    if delta_y.valuation() != 1 {
        return Err(CurveError::ZeroOfDy(a.clone()));
    }
    let phi = (&y * &rho).integral().map_err(&err)?;
    Ok(BranchFrame {
        a: a.clone(),
        sigma,
        sigma_prime,
        x_off,
        delta_y,
        phi,
        rho,
        order,
    })
}

/// Structured curve description, as read from and written to curve files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub label: String,
    pub y: RationalDoc,
    pub dx: RationalDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<RationalDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expansion_points: Vec<ExpansionPointDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<SettingsDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalDoc {
    pub num: Vec<CoeffDoc>,
    #[serde(default = "unit_den")]
    pub den: Vec<CoeffDoc>,
}

fn unit_den() -> Vec<CoeffDoc> {
    vec![CoeffDoc::Int(1)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPointDoc {
    pub name: String,
    /// A rational in text form, or `"infinity"`.
    pub location: String,
    pub weight: WeightDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDoc {
    pub rational: RationalDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<RationalDoc>,
    #[serde(default)]
    pub index: IndexConvention,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<String>,
}

impl CoeffDoc {
    fn value(&self) -> Result<Rational, CurveError> {
        match self {
            CoeffDoc::Int(n) => Ok(Rational::from_integer((*n).into())),
            CoeffDoc::Text(t) => parse_rational(t).map_err(|e| CurveError::Parse(e.to_string())),
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        if q.is_integer() {
            if let Ok(n) = i64::try_from(q.to_integer()) {
                return CoeffDoc::Int(n);
            }
        }
        CoeffDoc::Text(q.to_string())
    }
}

impl RationalDoc {
    pub fn to_function(&self) -> Result<RationalFunction, CurveError> {
        let poly = |c: &[CoeffDoc]| -> Result<Polynomial, CurveError> {
            Ok(Polynomial::new(c.iter().map(CoeffDoc::value).collect::<Result<_, _>>()?))
        };
        RationalFunction::new(poly(&self.num)?, poly(&self.den)?)
            .map_err(|_| CurveError::Parse("zero denominator".into()))
    }

    pub fn from_function(f: &RationalFunction) -> Self {
        let list = |p: &Polynomial| p.coeffs().iter().map(CoeffDoc::from_rational).collect();
        Self {
            num: list(f.numer()),
            den: list(f.denom()),
        }
    }
}

impl CurveDocument {
    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        serde_json::from_str(text).map_err(|e| CurveError::Parse(e.to_string()))
    }

    pub fn to_curve(&self) -> Result<SpectralCurve, CurveError> {
        let x = self.x.as_ref().map(RationalDoc::to_function).transpose()?;
        let mut curve = SpectralCurve::new(&self.label, self.y.to_function()?, self.dx.to_function()?, x)?;
        for p in &self.expansion_points {
            let point = if p.location.trim() == "infinity" {
                ChartPoint::Infinity
            } else {
                ChartPoint::Finite(parse_rational(&p.location).map_err(|e| CurveError::Parse(e.to_string()))?)
            };
            let exponent = match &p.weight.exponent {
                Some(q) => q.to_function()?,
                None => RationalFunction::zero(),
            };
            curve.expansion_points.push(ExpansionPoint {
                name: p.name.clone(),
                weight: WeightFunction {
                    point,
                    rational: p.weight.rational.to_function()?,
                    exponent,
                    index: p.weight.index,
                },
            });
        }
        Ok(curve)
    }
}

/// Names of the curves shipped with the crate.
pub const BUILTIN_CURVES: [&str; 3] = ["airy", "gaussian", "lambert"];

/// Source text of a shipped curve file.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name {
        "airy" => Some(include_str!("../../../curves/airy.json")),
        "gaussian" => Some(include_str!("../../../curves/gaussian.json")),
        "lambert" => Some(include_str!("../../../curves/lambert.json")),
        _ => None,
    }
}

pub fn builtin_curve(name: &str) -> Option<SpectralCurve> {
    builtin_source(name).map(|t| load_curve(t).expect("shipped curves are valid"))
}

/// Parses and validates a curve document.
pub fn load_curve(text: &str) -> Result<SpectralCurve, CurveError> {
    CurveDocument::from_json(text)?.to_curve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
    }

    fn airy() -> SpectralCurve {
        SpectralCurve::new("airy", rf(&[0, 1], &[1]), rf(&[0, 2], &[1]), Some(rf(&[0, 0, 1], &[1]))).unwrap()
    }

    fn gaussian() -> SpectralCurve {
        SpectralCurve::new("gaussian", rf(&[1], &[0, 1]), rf(&[-1, 0, 1], &[0, 0, 1]), Some(rf(&[1, 0, 1], &[0, 1])))
            .unwrap()
    }

    fn lambert() -> SpectralCurve {
        SpectralCurve::new("lambert", rf(&[1, -1], &[1]), rf(&[0, -1], &[1, -1]), None).unwrap()
    }

    #[test]
    fn loading_checks_derivative() {
        let bad = SpectralCurve::new("bad", rf(&[0, 1], &[1]), rf(&[0, 2], &[1]), Some(rf(&[0, 0, 0, 1], &[1])));
        assert!(matches!(bad, Err(CurveError::DerivativeMismatch { .. })));
        assert_eq!(SpectralCurve::new("z", rf(&[1], &[1]), RationalFunction::zero(), None), Err(CurveError::ZeroForm));
    }

    #[test]
    fn branchpoints_of_shipped_curves() {
        assert_eq!(find_branchpoints(&airy()).unwrap(), vec![rat(0)]);
        assert_eq!(find_branchpoints(&gaussian()).unwrap(), vec![rat(-1), rat(1)]);
        assert_eq!(find_branchpoints(&lambert()).unwrap(), vec![rat(0)]);
    }

    #[test]
    fn irrational_zero_is_reported() {
        let c = SpectralCurve::new("irr", rf(&[0, 1], &[1]), rf(&[-2, 0, 1], &[1]), None).unwrap();
        assert_eq!(find_branchpoints(&c), Err(CurveError::IrrationalZero(Polynomial::from_ints(&[-2, 0, 1]))));
    }

    #[test]
    fn irregular_branch_points_are_rejected() {
        let flat = SpectralCurve::new("flat", rf(&[0, 0, 1], &[1]), rf(&[0, 2], &[1]), None).unwrap();
        assert_eq!(find_branchpoints(&flat), Err(CurveError::ZeroOfDy(rat(0))));
        let pole = SpectralCurve::new("pole", rf(&[1], &[0, 1]), rf(&[0, 2], &[1]), None).unwrap();
        assert_eq!(find_branchpoints(&pole), Err(CurveError::PoleOfY(rat(0))));
        let double = SpectralCurve::new("double", rf(&[0, 1], &[1]), rf(&[0, 0, 3], &[1]), None).unwrap();
        assert!(matches!(find_branchpoints(&double), Err(CurveError::NonSimple { .. })));
    }

    #[test]
    fn involution_examples() {
        let s = local_involution(&airy(), &rat(0), 8).unwrap();
        assert_eq!(s, TruncatedSeries::from_ints(1, &[-1], 8));

        // 1/(1+s) - 1
        let s = local_involution(&gaussian(), &rat(1), 8).unwrap();
        assert_eq!(s, TruncatedSeries::from_ints(1, &[-1, 1, -1, 1, -1, 1, -1], 8));

        let s = local_involution(&lambert(), &rat(0), 6).unwrap();
        assert_eq!(s.coeff(1).unwrap(), rat(-1));
        assert_eq!(s.coeff(2).unwrap(), ratio(-2, 3));
        assert_eq!(s.coeff(3).unwrap(), ratio(-4, 9));
    }

    #[test]
    fn frame_examples() {
        let f = build_frame(&airy(), &rat(0), 8).unwrap();
        assert_eq!(f.x_off, TruncatedSeries::monomial(rat(1), 2, f.x_off.order()));
        assert_eq!(f.delta_y, TruncatedSeries::from_ints(1, &[2], f.delta_y.order()));
        assert_eq!(f.phi.valuation(), 3);
        assert_eq!(f.phi.coeff(3).unwrap(), ratio(2, 3));

        let f = build_frame(&gaussian(), &rat(1), 8).unwrap();
        // 1/(1+s) - (1+s)
        assert_eq!(f.delta_y.coeff(1).unwrap(), rat(-2));
        assert_eq!(f.delta_y.coeff(2).unwrap(), rat(1));
        assert_eq!(f.delta_y.coeff(3).unwrap(), rat(-1));
        assert_eq!(f.delta_y.coeff(4).unwrap(), rat(1));
        // s²/(1+s)
        assert_eq!(f.x_off.coeff(2).unwrap(), rat(1));
        assert_eq!(f.x_off.coeff(3).unwrap(), rat(-1));
        assert_eq!(f.x_off.coeff(4).unwrap(), rat(1));
    }

    #[test]
    fn frame_invariants_and_order_growth() {
        for curve in [airy(), gaussian(), lambert()] {
            for a in find_branchpoints(&curve).unwrap() {
                let f = build_frame(&curve, &a, 10).unwrap();
                assert_eq!(f.x_off.valuation(), 2);
                assert_eq!(f.delta_y.valuation(), 1);
                let dy_back = f.delta_y.compose(&f.sigma).unwrap();
                assert!((&dy_back + &f.delta_y).is_zero());
                let g = build_frame(&curve, &a, 20).unwrap();
                for k in 1..f.sigma.order() {
                    assert_eq!(f.sigma.coeff(k).unwrap(), g.sigma.coeff(k).unwrap());
                }
                for k in 1..f.phi.order() {
                    assert_eq!(f.phi.coeff(k).unwrap(), g.phi.coeff(k).unwrap());
                }
            }
        }
    }

    #[test]
    fn document_round_trip() {
        let text = r#"{"label":"airy","y":{"num":[0,1]},"dx":{"num":[0,2],"den":[1]},"x":{"num":[0,0,"1"]}}"#;
        let c = load_curve(text).unwrap();
        assert_eq!(c, airy());
        let doc = CurveDocument::from_json(text).unwrap();
        assert_eq!(RationalDoc::from_function(&c.y).to_function().unwrap(), c.y);
        assert!(doc.x.is_some());
    }
}
