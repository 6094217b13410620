//! Model configuration files.
//!
//! ```toml
//! supports = [0.0, 0.5858, 2.0, 3.4142]   # optional initial support points
//!
//! [support]                                # optional; omitted bounds are infinite
//! lo = 0.0
//!
//! [[terms]]
//! marginal = { kind = "square_minus_log", k = 4.0, observation = 2.314 }
//! nonlinearity = { kind = "scaled_exp_decay", a = -2.0, b = 1.1 }
//!
//! [[terms]]
//! marginal = { kind = "abs_linear", slope = 0.2 }
//! nonlinearity = { kind = "affine" }       # slope 1, offset 0
//! ```
//!
//! Marginal kinds: `quadratic {scale}`, `square_minus_log {k}`,
//! `abs_linear {slope}`, `linear {slope}`, `half_exp_minus_linear`. Any
//! marginal may carry `observation = y`, which evaluates it at `y − g(x)`.
//!
//! Nonlinearity kinds: `affine {slope, offset}`, `scaled_exp_decay {a, b}`,
//! `scaled_log1p {c, d}`, `shifted_square {center}`, `log_square {scale, offset}`.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use tailsampler::model::{MarginalPotential, Nonlinearity, PotentialModel, Term};
use tailsampler::support::Interval;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginalSpec {
    Quadratic { scale: f64 },
    SquareMinusLog { k: f64 },
    AbsLinear { slope: f64 },
    Linear { slope: f64 },
    HalfExpMinusLinear,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MarginalEntry {
    #[serde(flatten)]
    pub spec: MarginalSpec,
    #[serde(default)]
    pub observation: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearitySpec {
    Affine {
        #[serde(default = "one")]
        slope: f64,
        #[serde(default)]
        offset: f64,
    },
    ScaledExpDecay {
        a: f64,
        b: f64,
    },
    ScaledLog1p {
        c: f64,
        d: f64,
    },
    ShiftedSquare {
        center: f64,
    },
    LogSquare {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub marginal: MarginalEntry,
    pub nonlinearity: NonlinearitySpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSpec {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub support: SupportSpec,
    #[serde(default)]
    pub supports: Option<Vec<f64>>,
    pub terms: Vec<TermSpec>,
}

impl MarginalEntry {
    fn build(&self) -> MarginalPotential {
        let base = match self.spec {
            MarginalSpec::Quadratic { scale } => MarginalPotential::Quadratic { scale },
            MarginalSpec::SquareMinusLog { k } => MarginalPotential::SquareMinusLog { k },
            MarginalSpec::AbsLinear { slope } => MarginalPotential::AbsLinear { slope },
            MarginalSpec::Linear { slope } => MarginalPotential::Linear { slope },
            MarginalSpec::HalfExpMinusLinear => MarginalPotential::HalfExpMinusLinear,
        };
        match self.observation {
            Some(y) => MarginalPotential::residual(y, base),
            None => base,
        }
    }
}

impl NonlinearitySpec {
    fn build(&self) -> Nonlinearity {
        match *self {
            NonlinearitySpec::Affine { slope, offset } => Nonlinearity::Affine { slope, offset },
            NonlinearitySpec::ScaledExpDecay { a, b } => Nonlinearity::ScaledExpDecay { a, b },
            NonlinearitySpec::ScaledLog1p { c, d } => Nonlinearity::ScaledLog1p { c, d },
            NonlinearitySpec::ShiftedSquare { center } => Nonlinearity::ShiftedSquare { center },
            NonlinearitySpec::LogSquare { scale, offset } => Nonlinearity::LogSquare { scale, offset },
        }
    }
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid model configuration")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read model configuration {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn build(&self) -> Result<PotentialModel> {
        let support = Interval::new(
            self.support.lo.unwrap_or(f64::NEG_INFINITY),
            self.support.hi.unwrap_or(f64::INFINITY),
        )?;
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.marginal.build(), t.nonlinearity.build()))
            .collect();
        Ok(PotentialModel::new(terms, support)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_residual_terms_and_defaults() {
        let cfg = ModelConfig::parse(
            r#"
            supports = [0.0, 1.0]
            [support]
            lo = 0.0
            [[terms]]
            marginal = { kind = "quadratic", scale = 1.0, observation = 2.0 }
            nonlinearity = { kind = "shifted_square", center = 2.0 }
            [[terms]]
            marginal = { kind = "abs_linear", slope = 0.2 }
            nonlinearity = { kind = "affine" }
            "#,
        )
        .unwrap();
        let m = cfg.build().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.support(), Interval::nonnegative());
        let v = m.eval_potential(1.0).unwrap();
        assert!((v - ((2.0 - 1.0f64).powi(2) + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn unknown_kinds_are_errors() {
        assert!(ModelConfig::parse(
            r#"
            [[terms]]
            marginal = { kind = "cubic", scale = 1.0 }
            nonlinearity = { kind = "affine" }
            "#
        )
        .is_err());
        assert!(ModelConfig::parse("terms = []").unwrap().build().is_err());
    }
}
