//! Adaptive rejection sampling with a mixture-of-truncated-densities proposal.
//!
//! One term `j` of the potential is kept as the proposal density
//! `q(x) = exp{−V̄ⱼ(gⱼ(x))}`; the remaining terms are bounded below on every
//! interval of the support set by `γ_k`, giving the envelope
//! `L_k·q(x) ≥ p(x)` with `L_k = exp(−γ_k)`. Every rejected candidate is
//! added to the support set and its interval split.

use std::sync::Arc;

use rand::Rng;

use crate::bounds::{build_linearized_reduced, BoundOptions, LinearizedPotential};
use crate::error::{Error, Result};
use crate::model::PotentialModel;
use crate::stats::AcceptanceStats;
use crate::support::{Interval, SupportSet};

/// Largest admissible acceptance ratio before the envelope is declared broken.
pub const RATIO_SLACK: f64 = 1e-6;

/// A proposal density with closed-form interval masses and truncated sampling.
pub trait TruncatableDensity {
    /// Natural log of `∫_I q(x) dx` for the unnormalized `q`.
    fn log_mass(&self, interval: &Interval) -> f64;

    fn mass(&self, interval: &Interval) -> f64 {
        self.log_mass(interval).exp()
    }

    /// Draw from `q` restricted to `interval`.
    fn sample_truncated<R: Rng + ?Sized>(&self, interval: &Interval, rng: &mut R) -> f64;

    /// `−ln q(x)`.
    fn potential(&self, x: f64) -> f64;

    /// Domain on which `q` is defined.
    fn domain(&self) -> Interval;
}

/// `q(x) = e^{−λx}` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialDensity {
    rate: f64,
}

impl ExponentialDensity {
    pub fn new(rate: f64) -> Result<Self> {
        if rate.is_finite() && rate > 0.0 {
            Ok(ExponentialDensity { rate })
        } else {
            Err(Error::InvalidParameter {
                name: "rate".into(),
                reason: format!("must be finite and positive, got {rate}"),
            })
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl TruncatableDensity for ExponentialDensity {
    fn log_mass(&self, iv: &Interval) -> f64 {
        let a = iv.lo.max(0.0);
        let b = iv.hi;
        if b <= a {
            return f64::NEG_INFINITY;
        }
        // ∫_a^b e^{−λx} dx = e^{−λa}·(1 − e^{−λ(b−a)})/λ
        let tail = -(-self.rate * (b - a)).exp_m1();
        -self.rate * a + tail.ln() - self.rate.ln()
    }

    fn sample_truncated<R: Rng + ?Sized>(&self, iv: &Interval, rng: &mut R) -> f64 {
        let a = iv.lo.max(0.0);
        let u: f64 = rng.random();
        let x = if iv.hi.is_finite() {
            let w = iv.hi - a;
            a - (u * (-self.rate * w).exp_m1()).ln_1p() / self.rate
        } else {
            a - (-u).ln_1p() / self.rate
        };
        x.clamp(a, iv.hi)
    }

    fn potential(&self, x: f64) -> f64 {
        self.rate * x
    }

    fn domain(&self) -> Interval {
        Interval::nonnegative()
    }
}

/// One piece `L_k·q(x)·1{x ∈ I_k}` of the proposal.
#[derive(Debug, Clone)]
pub struct Piece {
    pub bound: LinearizedPotential,
    /// `ln ᾱ_k = −γ_k + ln ∫_{I_k} q`.
    pub log_weight: f64,
}

impl Piece {
    pub fn interval(&self) -> Interval {
        self.bound.interval
    }

    pub fn gamma(&self) -> f64 {
        self.bound.gamma
    }
}

/// Mixture of truncated, scaled copies of `q` covering the model support.
#[derive(Debug, Clone)]
pub struct MixtureProposal {
    pieces: Vec<Piece>,
    cumulative: Vec<f64>,
    log_scale: f64,
}

impl MixtureProposal {
    fn from_pieces(pieces: Vec<Piece>) -> Self {
        let mut p = MixtureProposal {
            pieces,
            cumulative: Vec::new(),
            log_scale: 0.0,
        };
        p.refresh();
        p
    }

    fn refresh(&mut self) {
        self.log_scale = self
            .pieces
            .iter()
            .map(|p| p.log_weight)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        self.cumulative.clear();
        for p in &self.pieces {
            acc += (p.log_weight - self.log_scale).exp();
            self.cumulative.push(acc);
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Normalized mixture weights `α_k`.
    pub fn weights(&self) -> Vec<f64> {
        let total = self.cumulative.last().copied().unwrap_or(0.0);
        self.pieces
            .iter()
            .map(|p| (p.log_weight - self.log_scale).exp() / total)
            .collect()
    }

    /// `ln Σ ᾱ_k`.
    pub fn log_total_mass(&self) -> f64 {
        self.log_scale + self.cumulative.last().copied().unwrap_or(0.0).ln()
    }

    /// Index of the piece whose interval contains `x` (left-closed pieces).
    pub fn piece_of(&self, x: f64) -> Option<usize> {
        let k = self.pieces.partition_point(|p| p.bound.interval.hi < x);
        if k < self.pieces.len() && self.pieces[k].bound.interval.contains(x) {
            Some(k)
        } else {
            None
        }
    }

    /// `ln(L_k·q(x))` for the piece containing `x`.
    pub fn log_envelope<Q: TruncatableDensity>(&self, q: &Q, x: f64) -> f64 {
        match self.piece_of(x) {
            Some(k) => -self.pieces[k].gamma() - q.potential(x),
            None => f64::NEG_INFINITY,
        }
    }

    fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("proposal has pieces");
        let target = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.pieces.len() - 1)
    }

    /// Draws a piece index with probability `α_k`, then a point from `q`
    /// truncated to that piece.
    pub fn sample<Q: TruncatableDensity, R: Rng + ?Sized>(&self, q: &Q, rng: &mut R) -> (usize, f64) {
        let k = self.select(rng);
        (k, q.sample_truncated(&self.pieces[k].bound.interval, rng))
    }
}

fn make_piece<Q: TruncatableDensity>(bound: LinearizedPotential, q: &Q) -> Result<Piece> {
    if bound.gamma == f64::NEG_INFINITY {
        return Err(Error::InfiniteEnvelope(bound.interval));
    }
    let log_weight = -bound.gamma + q.log_mass(&bound.interval);
    Ok(Piece { bound, log_weight })
}

fn check_proposal<Q: TruncatableDensity>(model: &PotentialModel, j: usize, q: &Q) -> Result<()> {
    model.check_index(j)?;
    let support = model.support();
    let qd = q.domain();
    if support.lo < qd.lo || support.hi > qd.hi {
        return Err(Error::ProposalMismatch(j));
    }
    for x in support.grid(9, 10.0) {
        let x = x.clamp(support.lo, support.hi);
        let a = model.terms()[j].eval(x);
        let b = q.potential(x);
        if (a.is_finite() || b.is_finite()) && (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
            return Err(Error::ProposalMismatch(j));
        }
    }
    Ok(())
}

/// Builds the mixture proposal for term `j` (zero-based) over the intervals
/// induced by `supports`.
pub fn build_proposal<Q: TruncatableDensity>(
    model: &PotentialModel,
    j: usize,
    q: &Q,
    supports: &SupportSet,
    opts: BoundOptions,
) -> Result<MixtureProposal> {
    check_proposal(model, j, q)?;
    supports.check_within(&model.support())?;
    let pieces = supports
        .intervals(&model.support())
        .into_iter()
        .map(|iv| make_piece(build_linearized_reduced(model, j, iv, opts)?, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixtureProposal::from_pieces(pieces))
}

/// Adaptive sampler state for one proposal term.
#[derive(Debug, Clone)]
pub struct Ars1Sampler<Q> {
    model: Arc<PotentialModel>,
    j: usize,
    q: Q,
    supports: SupportSet,
    proposal: MixtureProposal,
    opts: BoundOptions,
    stats: AcceptanceStats,
}

impl<Q: TruncatableDensity> Ars1Sampler<Q> {
    pub fn new(
        model: Arc<PotentialModel>,
        j: usize,
        q: Q,
        supports: SupportSet,
        opts: BoundOptions,
    ) -> Result<Self> {
        let proposal = build_proposal(&model, j, &q, &supports, opts)?;
        Ok(Ars1Sampler {
            model,
            j,
            q,
            supports,
            proposal,
            opts,
            stats: AcceptanceStats::new(),
        })
    }

    pub fn proposal(&self) -> &MixtureProposal {
        &self.proposal
    }

    pub fn supports(&self) -> &SupportSet {
        &self.supports
    }

    pub fn stats(&self) -> &AcceptanceStats {
        &self.stats
    }

    pub fn density(&self) -> &Q {
        &self.q
    }

    pub fn into_parts(self) -> (AcceptanceStats, SupportSet) {
        (self.stats, self.supports)
    }

    /// `ln` of the acceptance ratio `exp(−V₋ⱼ(x))/L_k` for a candidate in piece `k`.
    fn log_ratio(&self, k: usize, x: f64) -> f64 {
        let reduced = self.model.partial_sum(Some(self.j), x);
        let r = self.proposal.pieces[k].gamma() - reduced;
        if r.is_nan() {
            f64::NEG_INFINITY
        } else {
            r
        }
    }

    fn refine(&mut self, k: usize, x: f64) {
        let domain = self.model.support();
        if !domain.contains_interior(x) || !self.proposal.pieces[k].bound.interval.contains_interior(x) {
            self.stats.skipped_insertions += 1;
            return;
        }
        let mut trial = self.supports.clone();
        if !trial.insert(x) {
            self.stats.skipped_insertions += 1;
            return;
        }
        let split = self.proposal.pieces[k]
            .bound
            .split(&self.model, x, self.opts)
            .and_then(|(a, b)| Ok((make_piece(a, &self.q)?, make_piece(b, &self.q)?)));
        match split {
            Ok((a, b)) => {
                self.supports = trial;
                self.proposal.pieces.splice(k..=k, [a, b]);
                self.proposal.refresh();
            }
            Err(_) => self.stats.skipped_insertions += 1,
        }
    }

    /// Draws one exact sample, refining the proposal on every rejection.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<f64> {
        let mut trials = 0u64;
        loop {
            trials += 1;
            let (k, x) = self.proposal.sample(&self.q, rng);
            let log_ratio = self.log_ratio(k, x);
            if log_ratio > RATIO_SLACK.ln_1p() {
                return Err(Error::InvariantViolation(format!(
                    "acceptance ratio exp({log_ratio}) exceeds 1 at x = {x} on {}",
                    self.proposal.pieces[k].interval()
                )));
            }
            let u: f64 = rng.random();
            if u.ln() <= log_ratio {
                self.stats.record(trials);
                return Ok(x);
            }
            self.stats.rejections += 1;
            self.refine(k, x);
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Runs a fresh sampler for `n` samples and returns them with the trial
/// statistics and the final support set.
pub fn adaptive_sample<Q: TruncatableDensity, R: Rng + ?Sized>(
    model: Arc<PotentialModel>,
    j: usize,
    q: Q,
    supports: SupportSet,
    n: usize,
    rng: &mut R,
    opts: BoundOptions,
) -> Result<(Vec<f64>, AcceptanceStats, SupportSet)> {
    let mut s = Ars1Sampler::new(model, j, q, supports, opts)?;
    let xs = s.sample_n(n, rng)?;
    let (stats, supports) = s.into_parts();
    Ok((xs, stats, supports))
}
