//! Convex minorants of generalized potentials over a single interval.
//!
//! Every nonlinearity `gᵢ` is replaced by a linear function `rᵢ` with
//! `V̄ᵢ(rᵢ(x)) ≤ V̄ᵢ(gᵢ(x))`, which makes the modified potential
//! `M(x) = scale·Σᵢ V̄ᵢ(rᵢ(x)) + logterm(x)` convex. A tangent line of `M`
//! then gives a constant lower bound `γ` of the potential on the interval.
//!
//! Potentials whose nonlinearities are affine in `ln|x|` (such as the
//! stochastic-volatility step) are also linearized in the chart `z = ln|x|`,
//! where their tails stay convex, and the larger of the two bounds is kept.

use crate::error::{Error, Result};
use crate::model::{check_rho, AuxKind, Curvature, MarginalPotential, Nonlinearity, PotentialModel, Side};
use crate::support::Interval;

/// `slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFn {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearFn {
    pub fn constant(c: f64) -> Self {
        LinearFn {
            slope: 0.0,
            intercept: c,
        }
    }

    /// Line through `(x, value)` with the given slope.
    pub fn through(x: f64, value: f64, slope: f64) -> Self {
        LinearFn {
            slope,
            intercept: value - slope * x,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Limit of the line as `x → ±∞` (or its value at a finite `x`).
    pub fn value_or_limit(&self, x: f64) -> f64 {
        if x.is_finite() {
            return self.eval(x);
        }
        if self.slope == 0.0 {
            self.intercept
        } else if (self.slope > 0.0) == (x > 0.0) {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }

    fn is_finite(&self) -> bool {
        self.slope.is_finite() && self.intercept.is_finite()
    }
}

/// Coordinate in which an interval is linearized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `t = x`.
    Identity,
    /// `t = ln x` on a nonnegative interval.
    LogPositive,
    /// `t = ln(−x)` on a nonpositive interval.
    LogNegative,
}

impl Chart {
    #[inline]
    pub fn to_chart(self, x: f64) -> f64 {
        match self {
            Chart::Identity => x,
            Chart::LogPositive => x.ln(),
            Chart::LogNegative => (-x).ln(),
        }
    }

    #[inline]
    pub fn from_chart(self, t: f64) -> f64 {
        match self {
            Chart::Identity => t,
            Chart::LogPositive => t.exp(),
            Chart::LogNegative => -t.exp(),
        }
    }

    /// Image of an x-interval, as `(lo, hi)` in chart coordinates.
    pub fn map_interval(self, iv: &Interval) -> (f64, f64) {
        match self {
            Chart::Identity => (iv.lo, iv.hi),
            Chart::LogPositive => (iv.lo.ln(), iv.hi.ln()),
            Chart::LogNegative => ((-iv.hi).ln(), (-iv.lo).ln()),
        }
    }

    fn side(self) -> Option<Side> {
        match self {
            Chart::Identity => None,
            Chart::LogPositive => Some(Side::Positive),
            Chart::LogNegative => Some(Side::Negative),
        }
    }

    #[inline]
    fn term(self, g: &Nonlinearity, t: f64) -> (f64, f64) {
        match self.side() {
            None => (g.eval(t), g.deriv(t)),
            Some(side) => g.eval_log_chart(side, t),
        }
    }

    fn curvature(self, g: &Nonlinearity) -> Option<Curvature> {
        match self.side() {
            None => Some(g.curvature()),
            Some(side) => g.log_curvature(side),
        }
    }

    /// `−ln|x|` and its derivative, in chart coordinates.
    #[inline]
    fn log_term(self, t: f64) -> (f64, f64) {
        match self {
            Chart::Identity => (-t.abs().ln(), -1.0 / t),
            _ => (-t, -1.0),
        }
    }
}

/// Options for bound construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundOptions {
    /// Anchor tangents of finite intervals at a golden-section minimizer of
    /// the modified potential instead of the midpoint.
    pub tighten: bool,
}

/// Piecewise-linear minorant data of one interval.
#[derive(Debug, Clone)]
pub struct LinearizedPotential {
    pub interval: Interval,
    pub chart: Chart,
    pub aux: AuxKind,
    pub rho: f64,
    /// Term left out of the sum (reduced potentials).
    pub skip: Option<usize>,
    /// One entry per model term; `None` for the skipped term and for terms
    /// that admit no linear replacement (in which case `gamma` is `−∞`).
    pub replacements: Vec<Option<LinearFn>>,
    /// Tangent line of the modified potential, in chart coordinates.
    pub tangent: Option<LinearFn>,
    /// Tangent point, in chart coordinates.
    pub anchor: f64,
    /// Lower bound of the (auxiliary or reduced) potential on the interval;
    /// `−∞` when no finite bound exists.
    pub gamma: f64,
}

impl LinearizedPotential {
    fn scale(&self) -> f64 {
        self.aux.scale(self.rho)
    }

    /// Modified potential `M` and its derivative at chart coordinate `t`.
    pub fn modified_at_chart(&self, model: &PotentialModel, t: f64) -> (f64, f64) {
        modified(model, &self.replacements, self.scale(), self.aux, self.chart, t)
    }

    /// Modified potential at abscissa `x`.
    pub fn modified_at(&self, model: &PotentialModel, x: f64) -> f64 {
        self.modified_at_chart(model, self.chart.to_chart(x)).0
    }

    /// Tangent line at abscissa `x`.
    pub fn tangent_at(&self, x: f64) -> f64 {
        match self.tangent {
            Some(w) => w.eval(self.chart.to_chart(x)),
            None => f64::NEG_INFINITY,
        }
    }

    /// The potential this object bounds, evaluated exactly at `x`.
    pub fn target_at(&self, model: &PotentialModel, x: f64) -> f64 {
        let v = model.partial_sum(self.skip, x);
        let scaled = self.scale() * v;
        if self.aux.has_log_term() {
            scaled - x.abs().ln()
        } else {
            scaled
        }
    }

    /// `exp(−γ)`.
    pub fn envelope(&self) -> f64 {
        (-self.gamma).exp()
    }

    /// Splits at an interior point. Each child keeps the larger of its own
    /// bound and the parent's, which remains valid on any sub-interval.
    pub fn split(
        &self,
        model: &PotentialModel,
        at: f64,
        opts: BoundOptions,
    ) -> Result<(LinearizedPotential, LinearizedPotential)> {
        if !self.interval.contains_interior(at) {
            return Err(Error::InvalidInterval {
                lo: self.interval.lo,
                hi: at,
            });
        }
        let left = Interval::new(self.interval.lo, at)?;
        let right = Interval::new(at, self.interval.hi)?;
        let mut a = build(model, self.skip, left, self.aux, self.rho, opts)?;
        let mut b = build(model, self.skip, right, self.aux, self.rho, opts)?;
        a.gamma = a.gamma.max(self.gamma);
        b.gamma = b.gamma.max(self.gamma);
        Ok((a, b))
    }
}

#[inline]
fn modified(
    model: &PotentialModel,
    reps: &[Option<LinearFn>],
    scale: f64,
    aux: AuxKind,
    chart: Chart,
    t: f64,
) -> (f64, f64) {
    let mut value = 0.0;
    let mut deriv = 0.0;
    for (term, r) in model.terms().iter().zip(reps) {
        if let Some(r) = r {
            let theta = r.eval(t);
            value += term.marginal.eval(theta);
            deriv += term.marginal.deriv(theta) * r.slope;
        }
    }
    value *= scale;
    deriv *= scale;
    if aux.has_log_term() {
        let (l, dl) = chart.log_term(t);
        value += l;
        deriv += dl;
    }
    (value, deriv)
}

/// Linear replacement `r` of `g` on `[lo, hi]` (chart coordinates) such that
/// `r` lies between `g` and `μ` pointwise. `f` returns `(g(t), g'(t))`.
/// `None` when no valid replacement exists and `μ` is infinite.
fn linearize(
    curvature: Curvature,
    mu: f64,
    lo: f64,
    hi: f64,
    f: impl Fn(f64) -> (f64, f64),
) -> Option<LinearFn> {
    let fallback = if mu.is_finite() {
        Some(LinearFn::constant(mu))
    } else {
        None
    };
    let tangent_at = |t: f64| {
        let (g, d) = f(t);
        let w = LinearFn::through(t, g, d);
        if w.is_finite() {
            Some(w)
        } else {
            None
        }
    };

    if curvature == Curvature::Linear {
        let t = if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        return tangent_at(t).or(fallback);
    }
    let convex = curvature == Curvature::Convex;

    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let (ga, _) = f(lo);
            let (gb, _) = f(hi);
            if !ga.is_finite() || !gb.is_finite() {
                return fallback;
            }
            let chord = || {
                let slope = (gb - ga) / (hi - lo);
                let w = LinearFn::through(lo, ga, slope);
                if w.is_finite() {
                    Some(w)
                } else {
                    None
                }
            };
            let above = ga >= mu && gb >= mu;
            let below = ga <= mu && gb <= mu;
            let candidate = match (convex, above, below) {
                (true, true, _) => tangent_at(0.5 * (lo + hi))
                    .filter(|w| w.eval(lo) >= mu && w.eval(hi) >= mu),
                (true, false, true) => chord(),
                (false, true, _) => chord(),
                (false, false, true) => tangent_at(0.5 * (lo + hi))
                    .filter(|w| w.eval(lo) <= mu && w.eval(hi) <= mu),
                _ => None,
            };
            candidate.or(fallback)
        }
        (true, false) => {
            let (ga, da) = f(lo);
            let ok = if convex {
                ga >= mu && (da >= 0.0 || mu == f64::NEG_INFINITY)
            } else {
                ga <= mu && (da <= 0.0 || mu == f64::INFINITY)
            };
            if ok {
                tangent_at(lo).or(fallback)
            } else {
                fallback
            }
        }
        (false, true) => {
            let (gb, db) = f(hi);
            let ok = if convex {
                gb >= mu && (db <= 0.0 || mu == f64::NEG_INFINITY)
            } else {
                gb <= mu && (db >= 0.0 || mu == f64::INFINITY)
            };
            if ok {
                tangent_at(hi).or(fallback)
            } else {
                fallback
            }
        }
        (false, false) => fallback,
    }
}

/// Linear replacement of one term on an interval of the real line.
///
/// The result `r` satisfies `V̄(r(x)) ≤ V̄(g(x))` on the interval. `None` is
/// returned only for marginals without an attained minimum when no linear
/// minorant can be certified.
pub fn linearize_term(
    marginal: &MarginalPotential,
    nonlinearity: &Nonlinearity,
    interval: &Interval,
) -> Option<LinearFn> {
    linearize(
        nonlinearity.curvature(),
        marginal.argmin(),
        interval.lo,
        interval.hi,
        |x| (nonlinearity.eval(x), nonlinearity.deriv(x)),
    )
}

/// Minimum of a line over `[lo, hi]`, honoring infinite endpoints.
fn line_min(w: &LinearFn, lo: f64, hi: f64) -> f64 {
    let m = w.value_or_limit(lo).min(w.value_or_limit(hi));
    if m.is_nan() {
        f64::NEG_INFINITY
    } else {
        m
    }
}

/// Tangent-line lower bound of a convex `m` on an interval.
///
/// `m` returns `(M(x), M'(x))`. The bound is `min(w(lo), w(hi))` for the
/// tangent `w` at `anchor`; an infinite endpoint contributes `−∞` unless `w`
/// ascends toward it.
pub fn lower_bound(m: impl Fn(f64) -> (f64, f64), interval: &Interval, anchor: f64) -> f64 {
    tangent_bound(&m, interval.lo, interval.hi, anchor).1
}

fn tangent_bound(
    m: &impl Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    anchor: f64,
) -> (Option<LinearFn>, f64) {
    let (v, d) = m(anchor);
    if !v.is_finite() || !d.is_finite() {
        return (None, f64::NEG_INFINITY);
    }
    let w = LinearFn::through(anchor, v, d);
    if !w.is_finite() {
        return (None, f64::NEG_INFINITY);
    }
    (Some(w), line_min(&w, lo, hi))
}

const GOLDEN_ITERATIONS: usize = 20;
const OUTWARD_STEPS: i32 = 64;
const BISECTION_STEPS: usize = 40;

fn golden_section(m: &impl Fn(f64) -> (f64, f64), lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let value = |t: f64| {
        let v = m(t).0;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (value(c), value(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = value(d);
        }
    }
    0.5 * (a + b)
}

/// Anchor on a half-line: the finite endpoint when `M` already ascends there,
/// otherwise a point just past the minimizer located by outward doubling and
/// bisection on the sign of `M'`. `None` when `M` never ascends.
fn tail_anchor(m: &impl Fn(f64) -> (f64, f64), finite: f64, direction: f64) -> Option<f64> {
    let ascending = |t: f64| {
        let (v, d) = m(t);
        v.is_finite() && d.is_finite() && d * direction >= 0.0
    };
    if ascending(finite) {
        return Some(finite);
    }
    let h = finite.abs().max(1.0);
    let mut inner = finite;
    for k in 0..OUTWARD_STEPS {
        let outer = finite + direction * h * 2f64.powi(k);
        if !outer.is_finite() {
            return None;
        }
        if ascending(outer) {
            let mut out = outer;
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (inner + out);
                if mid == inner || mid == out {
                    break;
                }
                if ascending(mid) {
                    out = mid;
                } else {
                    inner = mid;
                }
            }
            return Some(out);
        }
        inner = outer;
    }
    None
}

fn chart_bound(
    m: &impl Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    opts: BoundOptions,
) -> (Option<LinearFn>, f64, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let anchor = if opts.tighten {
                golden_section(m, lo, hi)
            } else {
                0.5 * (lo + hi)
            };
            let (w, g) = tangent_bound(m, lo, hi, anchor);
            (w, anchor, g)
        }
        (true, false) => match tail_anchor(m, lo, 1.0) {
            Some(anchor) => {
                let (w, g) = tangent_bound(m, lo, hi, anchor);
                (w, anchor, g)
            }
            None => (None, lo, f64::NEG_INFINITY),
        },
        (false, true) => match tail_anchor(m, hi, -1.0) {
            Some(anchor) => {
                let (w, g) = tangent_bound(m, lo, hi, anchor);
                (w, anchor, g)
            }
            None => (None, hi, f64::NEG_INFINITY),
        },
        (false, false) => {
            let (wl, al, gl) = chart_bound(m, lo, 0.0, opts);
            let (wr, ar, gr) = chart_bound(m, 0.0, hi, opts);
            if gl <= gr {
                (wl, al, gl)
            } else {
                (wr, ar, gr)
            }
        }
    }
}

fn build_in_chart(
    model: &PotentialModel,
    skip: Option<usize>,
    interval: Interval,
    aux: AuxKind,
    rho: f64,
    chart: Chart,
    opts: BoundOptions,
) -> LinearizedPotential {
    let (lo, hi) = chart.map_interval(&interval);
    let mut replacements = Vec::with_capacity(model.len());
    let mut complete = true;
    for (i, term) in model.terms().iter().enumerate() {
        if Some(i) == skip {
            replacements.push(None);
            continue;
        }
        let r = chart.curvature(&term.nonlinearity).and_then(|curv| {
            linearize(curv, term.marginal.argmin(), lo, hi, |t| {
                chart.term(&term.nonlinearity, t)
            })
        });
        complete &= r.is_some();
        replacements.push(r);
    }
    let mut lp = LinearizedPotential {
        interval,
        chart,
        aux,
        rho,
        skip,
        replacements,
        tangent: None,
        anchor: chart.to_chart(0.5 * (interval.lo + interval.hi)),
        gamma: f64::NEG_INFINITY,
    };
    if !complete {
        return lp;
    }
    let scale = aux.scale(rho);
    let m = |t: f64| modified(model, &lp.replacements, scale, aux, chart, t);
    let (w, anchor, gamma) = chart_bound(&m, lo, hi, opts);
    lp.tangent = w;
    lp.anchor = anchor;
    lp.gamma = gamma;
    lp
}

fn log_chart_for(model: &PotentialModel, skip: Option<usize>, interval: &Interval) -> Option<Chart> {
    let chart = if interval.is_nonnegative() {
        Chart::LogPositive
    } else if interval.is_nonpositive() {
        Chart::LogNegative
    } else {
        return None;
    };
    let (lo, hi) = chart.map_interval(interval);
    if !lo.is_finite() && !hi.is_finite() {
        return None;
    }
    let admissible = model
        .terms()
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .all(|(_, t)| chart.curvature(&t.nonlinearity).is_some());
    if admissible {
        Some(chart)
    } else {
        None
    }
}

fn build(
    model: &PotentialModel,
    skip: Option<usize>,
    interval: Interval,
    aux: AuxKind,
    rho: f64,
    opts: BoundOptions,
) -> Result<LinearizedPotential> {
    check_rho(rho)?;
    let support = model.support();
    if interval.lo < support.lo || interval.hi > support.hi {
        return Err(Error::InvalidInterval {
            lo: interval.lo,
            hi: interval.hi,
        });
    }
    match aux {
        AuxKind::PositiveWidth if !interval.is_nonnegative() => {
            return Err(Error::Sign {
                what: "the positive-width bound",
                requirement: ">= 0 on the whole interval",
                x: interval.lo,
            })
        }
        AuxKind::NegativeWidth if !interval.is_nonpositive() => {
            return Err(Error::Sign {
                what: "the negative-width bound",
                requirement: "<= 0 on the whole interval",
                x: interval.hi,
            })
        }
        _ => {}
    }
    let mut best = build_in_chart(model, skip, interval, aux, rho, Chart::Identity, opts);
    if let Some(chart) = log_chart_for(model, skip, &interval) {
        let alt = build_in_chart(model, skip, interval, aux, rho, chart, opts);
        if alt.gamma > best.gamma {
            best = alt;
        }
    }
    Ok(best)
}

/// Minorant of the target or of an auxiliary potential on `interval`.
pub fn build_linearized(
    model: &PotentialModel,
    interval: Interval,
    aux: AuxKind,
    rho: f64,
    opts: BoundOptions,
) -> Result<LinearizedPotential> {
    build(model, None, interval, aux, rho, opts)
}

/// Minorant of the reduced potential `V₋ⱼ` (zero-based `j`) on `interval`.
pub fn build_linearized_reduced(
    model: &PotentialModel,
    j: usize,
    interval: Interval,
    opts: BoundOptions,
) -> Result<LinearizedPotential> {
    model.check_index(j)?;
    build(model, Some(j), interval, AuxKind::Target, 1.0, opts)
}

/// Log-scale ratio-of-uniforms bounds `(γ⁽¹⁾, γ⁽²'³⁾)` of a sign-pure interval.
pub fn rou_log_bounds(
    model: &PotentialModel,
    interval: Interval,
    rho: f64,
    opts: BoundOptions,
) -> Result<(f64, f64)> {
    let width = if interval.is_nonnegative() {
        AuxKind::PositiveWidth
    } else if interval.is_nonpositive() {
        AuxKind::NegativeWidth
    } else {
        return Err(Error::Sign {
            what: "ratio-of-uniforms bounds",
            requirement: "of one sign on the whole interval",
            x: interval.lo,
        });
    };
    let g1 = build_linearized(model, interval, AuxKind::Height, rho, opts)?.gamma;
    let g23 = build_linearized(model, interval, width, rho, opts)?.gamma;
    if g1 == f64::NEG_INFINITY || g23 == f64::NEG_INFINITY {
        return Err(Error::UnboundedRegion(interval));
    }
    Ok((g1, g23))
}

/// `L1 ≥ sup p^{1/(ρ+1)}` and `L23 ≥ sup |x|·p^{ρ/(ρ+1)}` over a sign-pure interval.
pub fn rou_bounds(model: &PotentialModel, interval: Interval, rho: f64) -> Result<(f64, f64)> {
    let (g1, g23) = rou_log_bounds(model, interval, rho, BoundOptions::default())?;
    Ok(((-g1).exp(), (-g23).exp()))
}
