use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;

use super::cover::TriangleCover;
use super::geometry::{build_triangle, cone_radius, sample_uniform_triangle, Point2, Triangle};
use crate::bounds::{build_linearized, BoundOptions, LinearizedPotential};
use crate::error::{Error, Result};
use crate::model::{check_rho, AuxKind, PotentialModel};
use crate::stats::AcceptanceStats;
use crate::support::{Interval, SupportSet};

/// Accept test `(ρ+1)·ln u ≤ −(V(v/u^ρ) − offset)`.
#[inline]
pub(crate) fn accept_shifted(model: &PotentialModel, rho: f64, offset: f64, p: Point2) -> bool {
    if p.u.is_nan() || p.u <= 0.0 {
        return false;
    }
    let x = p.v / p.u.powf(rho);
    if !model.support().contains(x) {
        return false;
    }
    (rho + 1.0) * p.u.ln() <= -(model.potential(x) - offset)
}

/// Whether `p` lies in the region `{0 < u ≤ p(v/u^ρ)^{1/(ρ+1)}}`.
pub fn rou_accept(model: &PotentialModel, rho: f64, p: Point2) -> bool {
    accept_shifted(model, rho, 0.0, p)
}

/// Classic ratio-of-uniforms test `u² ≤ p(v/u)`, in log space.
pub fn rou_accept_standard(model: &PotentialModel, p: Point2) -> bool {
    if p.u.is_nan() || p.u <= 0.0 {
        return false;
    }
    let x = p.v / p.u;
    if !model.support().contains(x) {
        return false;
    }
    2.0 * p.u.ln() <= -model.potential(x)
}

/// Minimum finite potential over the given points, or 0.
pub(crate) fn reference_offset(model: &PotentialModel, points: impl IntoIterator<Item = f64>) -> f64 {
    let support = model.support();
    let c = points
        .into_iter()
        .filter(|&x| support.contains(x))
        .map(|x| model.potential(x))
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    if c.is_finite() {
        c
    } else {
        0.0
    }
}

/// Log-spaced and evenly spaced abscissae over `domain`, for coverage probes
/// and boundary polylines. `scale` sets the bulk width.
pub fn probe_abscissae(domain: &Interval, scale: f64, count: usize) -> Vec<f64> {
    let scale = scale.abs().max(1.0);
    let mut xs = Vec::with_capacity(count);
    let linear = count / 2;
    xs.extend(domain.grid(linear, 20.0 * scale));
    let sides: Vec<f64> = [1.0, -1.0]
        .into_iter()
        .filter(|&s| if s > 0.0 { domain.hi > 0.0 } else { domain.lo < 0.0 })
        .collect();
    let logs = count - linear;
    if !sides.is_empty() && logs > 0 {
        for i in 0..logs {
            let e = -8.0 + 16.0 * i as f64 / (logs.max(2) - 1) as f64;
            let x = sides[i % sides.len()] * scale * 10f64.powf(e);
            xs.push(x);
        }
    }
    xs.retain(|&x| domain.contains(x) && x.is_finite());
    xs
}

#[derive(Debug, Clone)]
struct Cell {
    height: LinearizedPotential,
    width: LinearizedPotential,
}

impl Cell {
    fn build(model: &PotentialModel, interval: Interval, rho: f64, opts: BoundOptions) -> Result<Self> {
        let width = if interval.is_nonnegative() {
            AuxKind::PositiveWidth
        } else {
            AuxKind::NegativeWidth
        };
        let height = build_linearized(model, interval, AuxKind::Height, rho, opts)?;
        let width = build_linearized(model, interval, width, rho, opts)?;
        let cell = Cell { height, width };
        cell.check()?;
        Ok(cell)
    }

    fn check(&self) -> Result<()> {
        if self.height.gamma == f64::NEG_INFINITY || self.width.gamma == f64::NEG_INFINITY {
            Err(Error::UnboundedRegion(self.interval()))
        } else {
            Ok(())
        }
    }

    fn interval(&self) -> Interval {
        self.height.interval
    }

    fn split(&self, model: &PotentialModel, at: f64, opts: BoundOptions) -> Result<(Cell, Cell)> {
        let (h1, h2) = self.height.split(model, at, opts)?;
        let (w1, w2) = self.width.split(model, at, opts)?;
        let a = Cell { height: h1, width: w1 };
        let b = Cell { height: h2, width: w2 };
        a.check()?;
        b.check()?;
        Ok((a, b))
    }

    /// `(L1, L23)` for the density shifted by `exp(offset)`.
    fn envelope(&self, rho: f64, offset: f64) -> (f64, f64) {
        let l1 = (-(self.height.gamma - offset / (rho + 1.0))).exp();
        let l23 = (-(self.width.gamma - rho * offset / (rho + 1.0))).exp();
        (l1, l23)
    }
}

fn slope_of(angle: f64) -> f64 {
    if angle >= FRAC_PI_2 {
        f64::INFINITY
    } else if angle <= -FRAC_PI_2 {
        f64::NEG_INFINITY
    } else {
        angle.tan()
    }
}

/// Region data for plotting: cover triangles and boundary points of the
/// ratio-of-uniforms region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionDump {
    pub triangles: Vec<Triangle>,
    pub boundary: Vec<Point2>,
}

impl RegionDump {
    /// Comma-separated text with a header row. Triangle rows carry three
    /// vertices and the area; boundary rows carry one `(v, u)` point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,v1,u1,v2,u2,v3,u3,area\n");
        for t in &self.triangles {
            let _ = writeln!(
                out,
                "triangle,{},{},{},{},{},{},{}",
                t.v1.v, t.v1.u, t.v2.v, t.v2.u, t.v3.v, t.v3.u, t.area
            );
        }
        for p in &self.boundary {
            let _ = writeln!(out, "boundary,{},{},,,,,", p.v, p.u);
        }
        out
    }
}

/// Adaptive ratio-of-uniforms sampler.
///
/// The proposal region is a union of triangles, one per angular cone. A
/// rejected candidate `x` becomes a new support point: its interval is split
/// and the cover rebuilt, for `ρ = 1` only inside the affected cone.
#[derive(Debug, Clone)]
pub struct RouSampler {
    model: Arc<PotentialModel>,
    rho: f64,
    offset: f64,
    opts: BoundOptions,
    supports: SupportSet,
    cells: Vec<Cell>,
    cover: TriangleCover,
    stats: AcceptanceStats,
}

impl RouSampler {
    pub fn new(model: Arc<PotentialModel>, rho: f64, supports: SupportSet, opts: BoundOptions) -> Result<Self> {
        check_rho(rho)?;
        let domain = model.support();
        supports.check_within(&domain)?;
        if domain.contains(0.0) && !supports.contains(0.0) {
            return Err(Error::MissingZeroSupport(domain));
        }
        let intervals = supports.intervals(&domain);
        let midpoints = intervals
            .iter()
            .filter(|iv| iv.is_finite())
            .map(|iv| 0.5 * (iv.lo + iv.hi));
        let offset = reference_offset(&model, supports.points().iter().copied().chain(midpoints));
        let cells = intervals
            .into_iter()
            .map(|iv| Cell::build(&model, iv, rho, opts))
            .collect::<Result<Vec<_>>>()?;
        let mut s = RouSampler {
            model,
            rho,
            offset,
            opts,
            supports,
            cells,
            cover: TriangleCover::new(vec![0.0], Vec::new()),
            stats: AcceptanceStats::new(),
        };
        s.cover = s.build_cover()?;
        Ok(s)
    }

    pub fn model(&self) -> &Arc<PotentialModel> {
        &self.model
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Potential shift applied to the density before bounding.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn supports(&self) -> &SupportSet {
        &self.supports
    }

    pub fn cover(&self) -> &TriangleCover {
        &self.cover
    }

    pub fn stats(&self) -> &AcceptanceStats {
        &self.stats
    }

    pub fn into_parts(self) -> (AcceptanceStats, SupportSet) {
        (self.stats, self.supports)
    }

    /// Per-interval `(interval, L1, L23)` of the shifted density.
    pub fn interval_bounds(&self) -> Vec<(Interval, f64, f64)> {
        self.cells
            .iter()
            .map(|c| {
                let (l1, l23) = c.envelope(self.rho, self.offset);
                (c.interval(), l1, l23)
            })
            .collect()
    }

    fn triangle_for(&self, cell: &Cell, lo: f64, hi: f64) -> Result<Triangle> {
        let (l1, l23) = cell.envelope(self.rho, self.offset);
        build_triangle(cone_radius(l1, l23), lo, hi)
    }

    fn build_cover(&self) -> Result<TriangleCover> {
        if self.rho == 1.0 {
            let mut edges = Vec::with_capacity(self.cells.len() + 1);
            edges.push(self.cells[0].interval().lo.atan());
            let mut triangles = Vec::with_capacity(self.cells.len());
            for cell in &self.cells {
                let lo = *edges.last().expect("nonempty");
                let hi = cell.interval().hi.atan();
                triangles.push(self.triangle_for(cell, lo, hi)?);
                edges.push(hi);
            }
            return Ok(TriangleCover::new(edges, triangles));
        }
        let domain = self.model.support();
        let lower = if domain.lo < 0.0 { -FRAC_PI_2 } else { 0.0 };
        let upper = if domain.hi > 0.0 { FRAC_PI_2 } else { 0.0 };
        let mut edges = vec![lower];
        edges.extend(
            self.supports
                .points()
                .iter()
                .map(|s| s.atan())
                .filter(|&a| lower < a && a < upper),
        );
        edges.push(upper);
        let triangles = edges
            .windows(2)
            .map(|w| build_triangle(self.generalized_radius(w[0], w[1]), w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TriangleCover::new(edges, triangles))
    }

    /// Radius of the region part inside the cone `[a_lo, a_hi]` for `ρ > 1`,
    /// where a point with abscissa `x` lies on the ray of slope `x·u^{ρ−1}`.
    fn generalized_radius(&self, a_lo: f64, a_hi: f64) -> f64 {
        let (t_lo, t_hi) = (slope_of(a_lo), slope_of(a_hi));
        let negative = t_hi <= 0.0;
        // Work with |t| and |x| so both sides share one formula.
        let (s_lo, s_hi) = if negative { (-t_hi, -t_lo) } else { (t_lo, t_hi) };
        let p = 1.0 / (self.rho - 1.0);
        let mut r: f64 = 0.0;
        for cell in &self.cells {
            let iv = cell.interval();
            let same_side = if negative { iv.is_nonpositive() } else { iv.is_nonnegative() };
            if !same_side {
                continue;
            }
            let (x_lo, x_hi) = if negative { (-iv.hi, -iv.lo) } else { (iv.lo, iv.hi) };
            let (l1, l23) = cell.envelope(self.rho, self.offset);
            if s_lo > 0.0 && x_hi.is_finite() && (s_lo / x_hi).powf(p) > l1 {
                continue;
            }
            let u_cap = if x_lo > 0.0 && s_hi.is_finite() {
                (s_hi / x_lo).powf(p)
            } else {
                f64::INFINITY
            };
            let u = l1.min(u_cap);
            let v = if s_hi.is_finite() { l23.min(s_hi * u) } else { l23 };
            r = r.max(u.hypot(v));
        }
        r
    }

    /// Boundary point `(x·p̃^{ρ/(ρ+1)}, p̃^{1/(ρ+1)})` of the shifted density,
    /// or `None` where the density vanishes.
    pub fn boundary_point(&self, x: f64) -> Option<Point2> {
        self.boundary_from_potential(x, self.model.potential(x), 0.0)
    }

    fn boundary_from_potential(&self, x: f64, v: f64, shrink: f64) -> Option<Point2> {
        let log_u = -(v - self.offset) / (self.rho + 1.0) + (-shrink).ln_1p();
        if !log_u.is_finite() {
            return None;
        }
        let u = log_u.exp();
        if u == 0.0 || !u.is_finite() {
            return None;
        }
        Some(Point2::new(x * u.powf(self.rho), u))
    }

    /// Number of probe abscissae whose boundary point is not covered.
    pub fn coverage_violations(&self, probes: usize) -> usize {
        self.probe_points(probes)
            .into_iter()
            .filter_map(|x| self.boundary_point(x))
            .filter(|p| !self.cover.covers(*p))
            .count()
    }

    fn probe_points(&self, probes: usize) -> Vec<f64> {
        let scale = self
            .supports
            .points()
            .iter()
            .fold(1.0f64, |m, s| m.max(s.abs()));
        let mut xs = probe_abscissae(&self.model.support(), scale, probes);
        for cell in &self.cells {
            let iv = cell.interval();
            if iv.is_finite() {
                xs.push(iv.lo);
                xs.push(0.5 * (iv.lo + iv.hi));
            }
        }
        xs
    }

    /// Cover triangles and a boundary polyline of the region of `p` itself
    /// (the internal offset is undone), with boundary points pulled inward
    /// by a relative `1e-12` so they test as inside the region.
    pub fn export_region(&self, probes: usize) -> RegionDump {
        let mut xs = probe_abscissae(&self.model.support(), self.probe_scale(), probes);
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        let su = (-self.offset / (self.rho + 1.0)).exp();
        let sv = (-self.rho * self.offset / (self.rho + 1.0)).exp();
        let unshift = |p: Point2| Point2::new(p.v * sv, p.u * su);
        let boundary = xs
            .into_iter()
            .filter_map(|x| self.boundary_from_potential(x, self.model.potential(x), 1e-12))
            .map(unshift)
            .filter(|p| p.u > 0.0)
            .collect();
        let triangles = self
            .cover
            .triangles()
            .iter()
            .map(|t| Triangle::new(unshift(t.v1), unshift(t.v2), unshift(t.v3)))
            .collect();
        RegionDump { triangles, boundary }
    }

    fn probe_scale(&self) -> f64 {
        self.supports
            .points()
            .iter()
            .fold(1.0f64, |m, s| m.max(s.abs()))
    }

    fn cell_of(&self, x: f64) -> Option<usize> {
        let k = self.cells.partition_point(|c| c.interval().hi < x);
        if k < self.cells.len() && self.cells[k].interval().contains_interior(x) {
            Some(k)
        } else {
            None
        }
    }

    fn refine(&mut self, x: f64) -> Result<()> {
        let Some(k) = self.cell_of(x) else {
            self.stats.skipped_insertions += 1;
            return Ok(());
        };
        let mut trial = self.supports.clone();
        if !trial.insert(x) {
            self.stats.skipped_insertions += 1;
            return Ok(());
        }
        let Ok((a, b)) = self.cells[k].split(&self.model, x, self.opts) else {
            self.stats.skipped_insertions += 1;
            return Ok(());
        };
        if self.rho == 1.0 {
            let edges = self.cover.edges();
            let (lo, hi, mid) = (edges[k], edges[k + 1], x.atan());
            if !(lo < mid && mid < hi) {
                self.stats.skipped_insertions += 1;
                return Ok(());
            }
            let ta = self.triangle_for(&a, lo, mid)?;
            let tb = self.triangle_for(&b, mid, hi)?;
            self.cells.splice(k..=k, [a, b]);
            self.cover.split(k, mid, ta, tb);
        } else {
            let old_cells = self.cells.clone();
            self.cells.splice(k..=k, [a, b]);
            let old_supports = std::mem::replace(&mut self.supports, trial);
            match self.build_cover() {
                Ok(cover) => self.cover = cover,
                Err(_) => {
                    self.cells = old_cells;
                    self.supports = old_supports;
                    self.stats.skipped_insertions += 1;
                }
            }
            return Ok(());
        }
        self.supports = trial;
        Ok(())
    }

    /// Draws one exact sample, refining the cover on every rejection.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<f64> {
        let mut trials = 0u64;
        loop {
            trials += 1;
            let k = self.cover.select(rng);
            let p = sample_uniform_triangle(&self.cover.triangles()[k], rng);
            if p.u.is_nan() || p.u <= 0.0 {
                self.stats.rejections += 1;
                self.stats.skipped_insertions += 1;
                continue;
            }
            let x = p.v / p.u.powf(self.rho);
            if !self.model.support().contains(x) {
                self.stats.rejections += 1;
                self.stats.skipped_insertions += 1;
                continue;
            }
            let v = self.model.potential(x);
            if (self.rho + 1.0) * p.u.ln() <= -(v - self.offset) {
                self.stats.record(trials);
                return Ok(x);
            }
            self.stats.rejections += 1;
            if let Some(b) = self.boundary_from_potential(x, v, 0.0) {
                if !self.cover.covers(b) {
                    return Err(Error::InvariantViolation(format!(
                        "region point at x = {x} lies outside the triangle cover"
                    )));
                }
            }
            self.refine(x)?;
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Runs a fresh sampler for `n` samples.
pub fn adaptive_rou_sample<R: Rng + ?Sized>(
    model: Arc<PotentialModel>,
    rho: f64,
    supports: SupportSet,
    n: usize,
    rng: &mut R,
    opts: BoundOptions,
) -> Result<(Vec<f64>, AcceptanceStats, SupportSet)> {
    let mut s = RouSampler::new(model, rho, supports, opts)?;
    let xs = s.sample_n(n, rng)?;
    let (stats, supports) = s.into_parts();
    Ok((xs, stats, supports))
}
