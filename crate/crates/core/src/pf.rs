//! Accept/reject particle filter for the stochastic volatility model
//!
//! ```text
//! ln(x_k²) = β·ln(x_{k−1}²) + ϑ₂,   ϑ₂ ~ N(0, σ²)
//! y_k      = ln(x_k²) + ln(ϑ₀²),    ϑ₀ ~ N(0, 1)
//! ```
//!
//! Each step resamples ancestors uniformly and draws every new particle
//! exactly from `p(y_k | x_k)·p(x_k | x_{k−1})` with the adaptive
//! ratio-of-uniforms sampler, so no importance weights are needed.
//!
//! The transition density of `x_k` includes the factor `2/x_k` from the
//! change of variables `x ↦ ln(x²)` by default ([`SvTarget::Jacobian`]).
//! [`SvTarget::Written`] drops it and reproduces the Gaussian-in-`ln(x²)`
//! form, which biases the posterior toward larger volatilities.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bounds::BoundOptions;
use crate::error::{Error, Result};
use crate::model::PotentialModel;
use crate::rou::RouSampler;
use crate::support::SupportSet;

/// AR coefficient and state-noise standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SVParams {
    pub beta: f64,
    pub sigma: f64,
}

impl SVParams {
    pub fn new(beta: f64, sigma: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                reason: format!("must be finite, got {beta}"),
            });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma".into(),
                reason: format!("must be finite and positive, got {sigma}"),
            });
        }
        Ok(SVParams { beta, sigma })
    }

    /// Variance of `ln(x²)` under the stationary law, or `σ²` when `|β| ≥ 1`.
    pub fn initial_log_variance(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        if self.beta.abs() < 1.0 {
            s2 / (1.0 - self.beta * self.beta)
        } else {
            s2
        }
    }
}

/// Simulates `steps` states and observations from `x0`. `sigma = 0` is
/// accepted here and gives a deterministic state path.
pub fn simulate_sv<R: Rng + ?Sized>(
    beta: f64,
    sigma: f64,
    steps: usize,
    x0: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x0".into(),
            reason: format!("must be finite and positive, got {x0}"),
        });
    }
    let mut l = (x0 * x0).ln();
    let mut states = Vec::with_capacity(steps);
    let mut obs = Vec::with_capacity(steps);
    for _ in 0..steps {
        let n: f64 = StandardNormal.sample(rng);
        l = beta * l + sigma * n;
        let e: f64 = StandardNormal.sample(rng);
        states.push((0.5 * l).exp());
        obs.push(l + (e * e).ln());
    }
    Ok((states, obs))
}

/// Form of the per-particle target density.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SvTarget {
    /// Likelihood times the transition density of `x_k`.
    #[default]
    Jacobian,
    /// Likelihood times a Gaussian kernel in `ln(x_k²)`, without `2/x_k`.
    Written,
}

impl SvTarget {
    pub fn model(self, y: f64, alpha: f64, sigma: f64) -> Result<PotentialModel> {
        match self {
            SvTarget::Jacobian => PotentialModel::sv_step_jacobian(y, alpha, sigma),
            SvTarget::Written => PotentialModel::sv_step(y, alpha, sigma),
        }
    }
}

/// Options shared by the filter functions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FilterOptions {
    pub bounds: BoundOptions,
    pub target: SvTarget,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    /// Particles over candidates drawn.
    pub acceptance_rate: f64,
    pub trials: u64,
    /// Number of distinct ancestors.
    pub groups: usize,
}

/// Per-step filter output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterTrace {
    pub estimates: Vec<f64>,
    pub stds: Vec<f64>,
    pub acceptance_rates: Vec<f64>,
    /// True states, when known.
    pub truth: Option<Vec<f64>>,
}

impl FilterTrace {
    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn mean_acceptance(&self) -> f64 {
        self.acceptance_rates.iter().sum::<f64>() / self.acceptance_rates.len() as f64
    }

    /// Mean squared error of the estimates against `truth`.
    pub fn mse(&self) -> Option<f64> {
        let truth = self.truth.as_ref()?;
        Some(mse(&self.estimates, truth))
    }

    /// Comma-separated `k,truth,estimate,std,acceptance_rate` with a header;
    /// `k` starts at 1 and `truth` is empty when unknown.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("k,truth,estimate,std,acceptance_rate\n");
        for k in 0..self.len() {
            let truth = self
                .truth
                .as_ref()
                .map(|t| t[k].to_string())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                k + 1,
                truth,
                self.estimates[k],
                self.stds[k],
                self.acceptance_rates[k]
            );
        }
        out
    }
}

pub fn mse(estimates: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(estimates.len(), truth.len());
    estimates
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t) * (e - t))
        .sum::<f64>()
        / estimates.len() as f64
}

/// Initial support points `{0, m/4, m/2, m, 2m, 4m}` with
/// `m = exp(α/2 + y/4)`.
pub fn initial_supports(alpha: f64, y: f64) -> Result<SupportSet> {
    let m = (0.5 * alpha + 0.25 * y).exp();
    let m = if m.is_finite() && m > 0.0 { m } else { 1.0 };
    SupportSet::new([0.0, 0.25 * m, 0.5 * m, m, 2.0 * m, 4.0 * m])
}

/// Sorted ancestor indices drawn uniformly with replacement, run-length
/// encoded as `(ancestor, count)`.
pub fn draw_ancestors<R: Rng + ?Sized>(len: usize, n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..len)).collect();
    idx.sort_unstable();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some((r, c)) if *r == i => *c += 1,
            _ => groups.push((i, 1)),
        }
    }
    groups
}

/// Draws `count` particles from the target of one ancestor.
pub fn sample_group<R: Rng + ?Sized>(
    x_prev: f64,
    y: f64,
    params: &SVParams,
    count: usize,
    rng: &mut R,
    opts: FilterOptions,
) -> Result<(Vec<f64>, u64)> {
    let alpha = params.beta * (x_prev * x_prev).ln();
    let model = Arc::new(opts.target.model(y, alpha, params.sigma)?);
    let mut sampler = RouSampler::new(model, 1.0, initial_supports(alpha, y)?, opts.bounds)?;
    let xs = sampler.sample_n(count, rng)?;
    Ok((xs, sampler.stats().total_trials()))
}

/// One propagation step. Groups run in parallel, each on its own
/// deterministic random stream derived from a single draw of `rng`.
pub fn filter_step<R: Rng + ?Sized>(
    particles: &[f64],
    y: f64,
    params: &SVParams,
    n: usize,
    rng: &mut R,
    opts: FilterOptions,
) -> Result<(Vec<f64>, StepStats)> {
    if particles.is_empty() {
        return Err(Error::InvalidParameter {
            name: "particles".into(),
            reason: "particle set is empty".into(),
        });
    }
    if let Some(&bad) = particles.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "particles".into(),
            reason: format!("particles must be finite and positive, got {bad}"),
        });
    }
    if !y.is_finite() {
        return Err(Error::InvalidParameter {
            name: "y".into(),
            reason: format!("observation must be finite, got {y}"),
        });
    }
    let groups = draw_ancestors(particles.len(), n, rng);
    let step_seed: u64 = rng.random();
    let results = groups
        .par_iter()
        .enumerate()
        .map(|(g, &(r, count))| {
            let mut grng = ChaCha8Rng::seed_from_u64(step_seed);
            grng.set_stream(g as u64);
            sample_group(particles[r], y, params, count, &mut grng, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n);
    let mut trials = 0;
    for (xs, t) in results {
        out.extend(xs);
        trials += t;
    }
    let stats = StepStats {
        acceptance_rate: n as f64 / trials as f64,
        trials,
        groups: groups.len(),
    };
    Ok((out, stats))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Initial particles with `ln(x²)` drawn from the stationary law.
pub fn initial_particles<R: Rng + ?Sized>(params: &SVParams, n: usize, rng: &mut R) -> Vec<f64> {
    let sd = params.initial_log_variance().sqrt();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            (0.5 * sd * z).exp()
        })
        .collect()
}

/// Runs the filter over `observations` with `n` particles.
pub fn run_filter<R: Rng + ?Sized>(
    params: &SVParams,
    observations: &[f64],
    n: usize,
    rng: &mut R,
    opts: FilterOptions,
) -> Result<FilterTrace> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "particles".into(),
            reason: "need at least one particle".into(),
        });
    }
    let mut particles = initial_particles(params, n, rng);
    let mut trace = FilterTrace::default();
    for &y in observations {
        let (next, stats) = filter_step(&particles, y, params, n, rng, opts)?;
        particles = next;
        let (m, s) = mean_std(&particles);
        trace.estimates.push(m);
        trace.stds.push(s);
        trace.acceptance_rates.push(stats.acceptance_rate);
    }
    Ok(trace)
}

/// Particle means of the state propagated through the transition alone,
/// ignoring observations.
pub fn prior_propagation<R: Rng + ?Sized>(params: &SVParams, steps: usize, n: usize, rng: &mut R) -> Vec<f64> {
    let mut logs: Vec<f64> = initial_particles(params, n, rng)
        .into_iter()
        .map(|x| (x * x).ln())
        .collect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        for l in logs.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *l = params.beta * *l + params.sigma * z;
        }
        out.push(logs.iter().map(|l| (0.5 * l).exp()).sum::<f64>() / n as f64);
    }
    out
}
