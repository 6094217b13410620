//! Target densities written as `p(x) ∝ exp{-V(x)}` with a generalized potential
//! `V(x) = Σᵢ V̄ᵢ(gᵢ(x))`: each marginal potential `V̄ᵢ` is convex with a known
//! minimizer and each nonlinearity `gᵢ` is convex, concave or affine.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::support::Interval;

/// Potentials above this value are treated as `+∞` (density exactly zero).
pub const POTENTIAL_CAP: f64 = 700.0;

/// Curvature class of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curvature {
    Convex,
    Concave,
    Linear,
}

impl Curvature {
    pub fn flipped(self) -> Self {
        match self {
            Curvature::Convex => Curvature::Concave,
            Curvature::Concave => Curvature::Convex,
            Curvature::Linear => Curvature::Linear,
        }
    }

    fn of_second_derivative_sign(sign: f64) -> Self {
        if sign > 0.0 {
            Curvature::Convex
        } else if sign < 0.0 {
            Curvature::Concave
        } else {
            Curvature::Linear
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied convex marginal potential.
#[derive(Clone)]
pub struct CustomMarginal {
    pub name: String,
    pub eval: ScalarFn,
    pub deriv: ScalarFn,
    pub argmin: f64,
    pub min_value: f64,
}

/// A convex scalar potential `V̄(ϑ)` with known minimizer `μ`.
#[derive(Clone)]
pub enum MarginalPotential {
    /// `scale·ϑ²`, minimum at 0.
    Quadratic { scale: f64 },
    /// `ϑ² − k·ln ϑ` on `ϑ > 0`, minimum at `√(k/2)`.
    SquareMinusLog { k: f64 },
    /// `slope·|ϑ|`, minimum at 0.
    AbsLinear { slope: f64 },
    /// `slope·ϑ`; unbounded below, so its minimizer sits at `∓∞`.
    Linear { slope: f64 },
    /// `½(e^ϑ − ϑ)`, minimum at 0.
    HalfExpMinusLinear,
    /// `noise(observation − ϑ)`: a noise potential evaluated at the residual.
    Residual {
        observation: f64,
        noise: Box<MarginalPotential>,
    },
    Custom(Arc<CustomMarginal>),
}

impl MarginalPotential {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        argmin: f64,
    ) -> Self {
        let min_value = if argmin.is_finite() {
            eval(argmin)
        } else {
            f64::NEG_INFINITY
        };
        MarginalPotential::Custom(Arc::new(CustomMarginal {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            argmin,
            min_value,
        }))
    }

    pub fn residual(observation: f64, noise: MarginalPotential) -> Self {
        MarginalPotential::Residual {
            observation,
            noise: Box::new(noise),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            MarginalPotential::Quadratic { scale } => scale * t * t,
            MarginalPotential::SquareMinusLog { k } => {
                if t > 0.0 {
                    t * t - k * t.ln()
                } else {
                    f64::INFINITY
                }
            }
            MarginalPotential::AbsLinear { slope } => slope * t.abs(),
            MarginalPotential::Linear { slope } => slope * t,
            MarginalPotential::HalfExpMinusLinear => 0.5 * (t.exp() - t),
            MarginalPotential::Residual { observation, noise } => noise.eval(observation - t),
            MarginalPotential::Custom(c) => (c.eval)(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            MarginalPotential::Quadratic { scale } => 2.0 * scale * t,
            MarginalPotential::SquareMinusLog { k } => {
                if t > 0.0 {
                    2.0 * t - k / t
                } else {
                    f64::NAN
                }
            }
            MarginalPotential::AbsLinear { slope } => {
                if t > 0.0 {
                    *slope
                } else if t < 0.0 {
                    -slope
                } else {
                    0.0
                }
            }
            MarginalPotential::Linear { slope } => *slope,
            MarginalPotential::HalfExpMinusLinear => 0.5 * (t.exp() - 1.0),
            MarginalPotential::Residual { observation, noise } => -noise.deriv(observation - t),
            MarginalPotential::Custom(c) => (c.deriv)(t),
        }
    }

    /// Location `μ` of the minimum (may be `±∞` for potentials unbounded below).
    pub fn argmin(&self) -> f64 {
        match self {
            MarginalPotential::Quadratic { .. } => 0.0,
            MarginalPotential::SquareMinusLog { k } => (0.5 * k).sqrt(),
            MarginalPotential::AbsLinear { .. } => 0.0,
            MarginalPotential::Linear { slope } => {
                if *slope > 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            MarginalPotential::HalfExpMinusLinear => 0.0,
            MarginalPotential::Residual { observation, noise } => observation - noise.argmin(),
            MarginalPotential::Custom(c) => c.argmin,
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            MarginalPotential::Linear { .. } => f64::NEG_INFINITY,
            MarginalPotential::Residual { noise, .. } => noise.min_value(),
            MarginalPotential::Custom(c) => c.min_value,
            other => other.eval(other.argmin()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            MarginalPotential::Quadratic { .. } => "quadratic",
            MarginalPotential::SquareMinusLog { .. } => "square_minus_log",
            MarginalPotential::AbsLinear { .. } => "abs_linear",
            MarginalPotential::Linear { .. } => "linear",
            MarginalPotential::HalfExpMinusLinear => "half_exp_minus_linear",
            MarginalPotential::Residual { noise, .. } => noise.name(),
            MarginalPotential::Custom(c) => &c.name,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: format!("must be finite and positive, got {v}"),
                })
            }
        };
        match self {
            MarginalPotential::Quadratic { scale } => positive("scale", *scale),
            MarginalPotential::SquareMinusLog { k } => positive("k", *k),
            MarginalPotential::AbsLinear { slope } => positive("slope", *slope),
            MarginalPotential::Linear { slope } => {
                if slope.is_finite() && *slope != 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "slope".into(),
                        reason: format!("must be finite and non-zero, got {slope}"),
                    })
                }
            }
            MarginalPotential::HalfExpMinusLinear => Ok(()),
            MarginalPotential::Residual { observation, noise } => {
                if !observation.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "observation".into(),
                        reason: "must be finite".into(),
                    });
                }
                noise.validate()
            }
            MarginalPotential::Custom(_) => Ok(()),
        }
    }
}

impl fmt::Debug for MarginalPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarginalPotential::Quadratic { scale } => write!(f, "Quadratic {{ scale: {scale} }}"),
            MarginalPotential::SquareMinusLog { k } => write!(f, "SquareMinusLog {{ k: {k} }}"),
            MarginalPotential::AbsLinear { slope } => write!(f, "AbsLinear {{ slope: {slope} }}"),
            MarginalPotential::Linear { slope } => write!(f, "Linear {{ slope: {slope} }}"),
            MarginalPotential::HalfExpMinusLinear => write!(f, "HalfExpMinusLinear"),
            MarginalPotential::Residual { observation, noise } => {
                write!(f, "Residual {{ observation: {observation}, noise: {noise:?} }}")
            }
            MarginalPotential::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

/// Which half-line a logarithmic chart `z = ln|x|` covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

/// User-supplied nonlinearity.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub eval: ScalarFn,
    pub deriv: ScalarFn,
    pub curvature: Curvature,
    /// Curvature of `z ↦ g(±e^z)` on each side, when known.
    pub log_curvature: [Option<Curvature>; 2],
}

/// A nonlinearity `g(x)` with declared curvature.
#[derive(Clone)]
pub enum Nonlinearity {
    /// `slope·x + offset`.
    Affine { slope: f64, offset: f64 },
    /// `a·e^{−b x}`.
    ScaledExpDecay { a: f64, b: f64 },
    /// `c·ln(d x + 1)`.
    ScaledLog1p { c: f64, d: f64 },
    /// `(x − center)²`.
    ShiftedSquare { center: f64 },
    /// `scale·ln(x²) + offset`, affine in `ln|x|`.
    LogSquare { scale: f64, offset: f64 },
    Custom(Arc<CustomNonlinearity>),
}

impl Nonlinearity {
    pub fn identity() -> Self {
        Nonlinearity::Affine {
            slope: 1.0,
            offset: 0.0,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        curvature: Curvature,
    ) -> Self {
        Nonlinearity::Custom(Arc::new(CustomNonlinearity {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            curvature,
            log_curvature: [None, None],
        }))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Nonlinearity::Affine { slope, offset } => slope * x + offset,
            Nonlinearity::ScaledExpDecay { a, b } => a * (-b * x).exp(),
            Nonlinearity::ScaledLog1p { c, d } => c * (d * x).ln_1p(),
            Nonlinearity::ShiftedSquare { center } => (x - center) * (x - center),
            Nonlinearity::LogSquare { scale, offset } => scale * (x * x).ln() + offset,
            Nonlinearity::Custom(c) => (c.eval)(x),
        }
    }

    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Nonlinearity::Affine { slope, .. } => *slope,
            Nonlinearity::ScaledExpDecay { a, b } => -a * b * (-b * x).exp(),
            Nonlinearity::ScaledLog1p { c, d } => c * d / (d * x + 1.0),
            Nonlinearity::ShiftedSquare { center } => 2.0 * (x - center),
            Nonlinearity::LogSquare { scale, .. } => 2.0 * scale / x,
            Nonlinearity::Custom(c) => (c.deriv)(x),
        }
    }

    pub fn curvature(&self) -> Curvature {
        match self {
            Nonlinearity::Affine { .. } => Curvature::Linear,
            Nonlinearity::ScaledExpDecay { a, b } => {
                if *b == 0.0 {
                    Curvature::Linear
                } else {
                    Curvature::of_second_derivative_sign(*a)
                }
            }
            Nonlinearity::ScaledLog1p { c, d } => {
                if *d == 0.0 {
                    Curvature::Linear
                } else {
                    Curvature::of_second_derivative_sign(-c)
                }
            }
            Nonlinearity::ShiftedSquare { .. } => Curvature::Convex,
            Nonlinearity::LogSquare { scale, .. } => Curvature::of_second_derivative_sign(-scale),
            Nonlinearity::Custom(c) => c.curvature,
        }
    }

    /// Curvature of `z ↦ g(x)` with `x = ±e^z` on the given side, if it is known
    /// to hold on the whole half-line.
    pub fn log_curvature(&self, side: Side) -> Option<Curvature> {
        match self {
            Nonlinearity::Affine { slope, .. } => {
                let c = Curvature::of_second_derivative_sign(*slope);
                Some(match side {
                    Side::Positive => c,
                    Side::Negative => c.flipped(),
                })
            }
            Nonlinearity::LogSquare { .. } => Some(Curvature::Linear),
            Nonlinearity::Custom(c) => c.log_curvature[side as usize],
            _ => None,
        }
    }

    /// Value and derivative of `z ↦ g(±e^z)` at `z`.
    #[inline]
    pub fn eval_log_chart(&self, side: Side, z: f64) -> (f64, f64) {
        match self {
            Nonlinearity::LogSquare { scale, offset } => (2.0 * scale * z + offset, 2.0 * scale),
            _ => {
                let x = match side {
                    Side::Positive => z.exp(),
                    Side::Negative => -z.exp(),
                };
                (self.eval(x), self.deriv(x) * x)
            }
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Nonlinearity::Affine { .. } => "affine",
            Nonlinearity::ScaledExpDecay { .. } => "scaled_exp_decay",
            Nonlinearity::ScaledLog1p { .. } => "scaled_log1p",
            Nonlinearity::ShiftedSquare { .. } => "shifted_square",
            Nonlinearity::LogSquare { .. } => "log_square",
            Nonlinearity::Custom(c) => &c.name,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: format!("must be finite, got {v}"),
                })
            }
        };
        match self {
            Nonlinearity::Affine { slope, offset } => {
                finite("slope", *slope)?;
                finite("offset", *offset)
            }
            Nonlinearity::ScaledExpDecay { a, b } => {
                finite("a", *a)?;
                finite("b", *b)
            }
            Nonlinearity::ScaledLog1p { c, d } => {
                finite("c", *c)?;
                finite("d", *d)
            }
            Nonlinearity::ShiftedSquare { center } => finite("center", *center),
            Nonlinearity::LogSquare { scale, offset } => {
                finite("scale", *scale)?;
                finite("offset", *offset)
            }
            Nonlinearity::Custom(_) => Ok(()),
        }
    }
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Affine { slope, offset } => {
                write!(f, "Affine {{ slope: {slope}, offset: {offset} }}")
            }
            Nonlinearity::ScaledExpDecay { a, b } => write!(f, "ScaledExpDecay {{ a: {a}, b: {b} }}"),
            Nonlinearity::ScaledLog1p { c, d } => write!(f, "ScaledLog1p {{ c: {c}, d: {d} }}"),
            Nonlinearity::ShiftedSquare { center } => {
                write!(f, "ShiftedSquare {{ center: {center} }}")
            }
            Nonlinearity::LogSquare { scale, offset } => {
                write!(f, "LogSquare {{ scale: {scale}, offset: {offset} }}")
            }
            Nonlinearity::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

/// One summand `V̄(g(x))` of the potential.
#[derive(Debug, Clone)]
pub struct Term {
    pub marginal: MarginalPotential,
    pub nonlinearity: Nonlinearity,
}

impl Term {
    pub fn new(marginal: MarginalPotential, nonlinearity: Nonlinearity) -> Self {
        Term {
            marginal,
            nonlinearity,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.marginal.eval(self.nonlinearity.eval(x))
    }
}

/// The auxiliary potentials used by the ratio-of-uniforms bounds.
///
/// With `p = exp(−V)`: `Height` is the potential of `p^{1/(ρ+1)}`,
/// `PositiveWidth` of `x·p^{ρ/(ρ+1)}` (x > 0) and `NegativeWidth` of
/// `−x·p^{ρ/(ρ+1)}` (x < 0). `Target` is `V` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxKind {
    Target,
    Height,
    PositiveWidth,
    NegativeWidth,
}

impl AuxKind {
    /// Multiplier applied to `V`.
    pub fn scale(self, rho: f64) -> f64 {
        match self {
            AuxKind::Target => 1.0,
            AuxKind::Height => 1.0 / (rho + 1.0),
            AuxKind::PositiveWidth | AuxKind::NegativeWidth => rho / (rho + 1.0),
        }
    }

    pub fn has_log_term(self) -> bool {
        matches!(self, AuxKind::PositiveWidth | AuxKind::NegativeWidth)
    }
}

/// A target density `p(x) ∝ exp{−Σᵢ V̄ᵢ(gᵢ(x))}` on a support interval.
///
/// Immutable after construction; share it behind an `Arc` across samplers.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    terms: Vec<Term>,
    support: Interval,
}

impl PotentialModel {
    pub fn new(terms: Vec<Term>, support: Interval) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter {
                name: "terms".into(),
                reason: "a model needs at least one term".into(),
            });
        }
        for t in &terms {
            t.marginal.validate()?;
            t.nonlinearity.validate()?;
        }
        Ok(PotentialModel { terms, support })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// `V(x)` without the support check; non-finite or capped values map to `+∞`.
    #[inline]
    pub fn potential(&self, x: f64) -> f64 {
        saturate(self.terms.iter().map(|t| t.eval(x)).sum())
    }

    /// `V(x)` with all terms except `skip` (no saturation).
    #[inline]
    pub(crate) fn partial_sum(&self, skip: Option<usize>, x: f64) -> f64 {
        self.terms
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, t)| t.eval(x))
            .sum()
    }

    /// Unnormalized density `exp(−V(x))`, zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        (-self.potential(x)).exp()
    }

    pub fn eval_potential(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.potential(x))
    }

    /// `V₋ⱼ(x) = Σ_{i≠j} V̄ᵢ(gᵢ(x))` with a zero-based term index.
    pub fn eval_reduced_potential(&self, j: usize, x: f64) -> Result<f64> {
        self.check_index(j)?;
        self.check_support(x)?;
        Ok(saturate(self.partial_sum(Some(j), x)))
    }

    pub fn eval_term(&self, j: usize, x: f64) -> Result<f64> {
        self.check_index(j)?;
        self.check_support(x)?;
        Ok(self.terms[j].eval(x))
    }

    pub fn eval_aux_potential(&self, which: AuxKind, rho: f64, x: f64) -> Result<f64> {
        check_rho(rho)?;
        self.check_support(x)?;
        let v = self.potential(x);
        let scaled = which.scale(rho) * v;
        match which {
            AuxKind::Target | AuxKind::Height => Ok(scaled),
            AuxKind::PositiveWidth => {
                if x > 0.0 {
                    Ok(scaled - x.ln())
                } else {
                    Err(Error::Sign {
                        what: "the positive-width potential",
                        requirement: "> 0",
                        x,
                    })
                }
            }
            AuxKind::NegativeWidth => {
                if x < 0.0 {
                    Ok(scaled - (-x).ln())
                } else {
                    Err(Error::Sign {
                        what: "the negative-width potential",
                        requirement: "< 0",
                        x,
                    })
                }
            }
        }
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j < self.terms.len() {
            Ok(())
        } else {
            Err(Error::TermIndex {
                index: j,
                len: self.terms.len(),
            })
        }
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if self.support.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideSupport {
                x,
                support: self.support,
            })
        }
    }

    /// The four-term posterior of a positive signal observed through three
    /// nonlinear channels under an exponential prior.
    pub fn artificial3obs(p: &Artificial3ObsParams) -> Result<Self> {
        if !(p.lambda > 0.0 && p.lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda".into(),
                reason: format!("must be finite and positive, got {}", p.lambda),
            });
        }
        let terms = vec![
            Term::new(
                MarginalPotential::residual(p.y1, MarginalPotential::SquareMinusLog { k: 4.0 }),
                Nonlinearity::ScaledExpDecay { a: p.a, b: p.b },
            ),
            Term::new(
                MarginalPotential::residual(p.y2, MarginalPotential::SquareMinusLog { k: 2.0 }),
                Nonlinearity::ScaledLog1p { c: p.c, d: p.d },
            ),
            Term::new(
                MarginalPotential::residual(p.y3, MarginalPotential::Quadratic { scale: 1.0 }),
                Nonlinearity::ShiftedSquare { center: p.e },
            ),
            Term::new(
                MarginalPotential::AbsLinear { slope: p.lambda },
                Nonlinearity::identity(),
            ),
        ];
        PotentialModel::new(terms, Interval::nonnegative())
    }

    /// Per-particle target of the stochastic-volatility filter: likelihood of
    /// `y` times the transition density from a previous state with
    /// `α = β·ln(x_prev²)`.
    pub fn sv_step(y: f64, alpha: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("y", y), ("alpha", alpha)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma".into(),
                reason: format!("must be finite and positive, got {sigma}"),
            });
        }
        let terms = vec![
            Term::new(
                MarginalPotential::HalfExpMinusLinear,
                Nonlinearity::LogSquare {
                    scale: -1.0,
                    offset: y,
                },
            ),
            Term::new(
                MarginalPotential::Quadratic {
                    scale: 1.0 / (2.0 * sigma * sigma),
                },
                Nonlinearity::LogSquare {
                    scale: 1.0,
                    offset: -alpha,
                },
            ),
        ];
        PotentialModel::new(
            terms,
            Interval {
                lo: 0.0,
                hi: f64::INFINITY,
            },
        )
    }
}

impl PotentialModel {
    /// [`PotentialModel::sv_step`] with the change-of-variables factor `2/x`
    /// of the transition density, contributing `ln x = ½·ln(x²)`.
    pub fn sv_step_jacobian(y: f64, alpha: f64, sigma: f64) -> Result<Self> {
        let base = PotentialModel::sv_step(y, alpha, sigma)?;
        let mut terms = base.terms;
        terms.push(Term::new(
            MarginalPotential::Linear { slope: 0.5 },
            Nonlinearity::LogSquare {
                scale: 1.0,
                offset: 0.0,
            },
        ));
        PotentialModel::new(terms, base.support)
    }
}

#[inline]
fn saturate(v: f64) -> f64 {
    if v <= POTENTIAL_CAP {
        v
    } else {
        f64::INFINITY
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRho(rho))
    }
}

/// Constants of the three-observation example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Artificial3ObsParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub lambda: f64,
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

impl Default for Artificial3ObsParams {
    fn default() -> Self {
        Artificial3ObsParams {
            a: -2.0,
            b: 1.1,
            c: -0.8,
            d: 1.5,
            e: 2.0,
            lambda: 0.2,
            y1: 2.314,
            y2: 1.6,
            y3: 2.0,
        }
    }
}

/// Names accepted by [`builtin_model`].
pub const BUILTIN_MODELS: &[&str] = &["artificial3obs", "sv_step", "sv_step_jacobian"];

/// Builds a registered model from a parameter map. `artificial3obs` falls
/// back to its default constants; `sv_step` and `sv_step_jacobian` require
/// `y`, `alpha` and `sigma`.
pub fn builtin_model(name: &str, params: &BTreeMap<String, f64>) -> Result<PotentialModel> {
    let known: &[&str] = match name {
        "artificial3obs" => &["a", "b", "c", "d", "e", "lambda", "y1", "y2", "y3"],
        "sv_step" | "sv_step_jacobian" => &["y", "alpha", "sigma"],
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::InvalidParameter {
            name: k.clone(),
            reason: format!("not a parameter of `{name}`"),
        });
    }
    match name {
        "artificial3obs" => {
            let d = Artificial3ObsParams::default();
            let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
            PotentialModel::artificial3obs(&Artificial3ObsParams {
                a: get("a", d.a),
                b: get("b", d.b),
                c: get("c", d.c),
                d: get("d", d.d),
                e: get("e", d.e),
                lambda: get("lambda", d.lambda),
                y1: get("y1", d.y1),
                y2: get("y2", d.y2),
                y3: get("y3", d.y3),
            })
        }
        _ => {
            let get = |k: &str| {
                params.get(k).copied().ok_or_else(|| Error::InvalidParameter {
                    name: k.to_string(),
                    reason: "missing".into(),
                })
            };
            let (y, alpha, sigma) = (get("y")?, get("alpha")?, get("sigma")?);
            if name == "sv_step" {
                PotentialModel::sv_step(y, alpha, sigma)
            } else {
                PotentialModel::sv_step_jacobian(y, alpha, sigma)
            }
        }
    }
}
