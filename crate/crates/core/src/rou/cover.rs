use rand::Rng;

use super::geometry::{Point2, Triangle};

/// Barycentric slack used by coverage checks.
pub const COVERAGE_SLACK: f64 = 1e-9;

/// Union of cone-aligned triangles with apex at the origin.
///
/// Cone `k` spans the angles `edges[k]..edges[k+1]`, measured from the `u`
/// axis toward `+v`; triangle `k` lies in cone `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCover {
    edges: Vec<f64>,
    triangles: Vec<Triangle>,
    cumulative: Vec<f64>,
}

impl TriangleCover {
    /// `edges` must be strictly increasing and have one more entry than
    /// `triangles`.
    pub fn new(edges: Vec<f64>, triangles: Vec<Triangle>) -> Self {
        assert_eq!(edges.len(), triangles.len() + 1);
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut c = TriangleCover {
            edges,
            triangles,
            cumulative: Vec::new(),
        };
        c.refresh();
        c
    }

    fn refresh(&mut self) {
        let mut acc = 0.0;
        self.cumulative = self
            .triangles
            .iter()
            .map(|t| {
                acc += t.area;
                acc
            })
            .collect();
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Selection weights `ω_k = |T_k| / Σ|T_i|`.
    pub fn weights(&self) -> Vec<f64> {
        let total = self.total_area();
        self.triangles.iter().map(|t| t.area / total).collect()
    }

    /// Replaces triangle `k` by two triangles split at angle `edge`.
    pub fn split(&mut self, k: usize, edge: f64, left: Triangle, right: Triangle) {
        debug_assert!(self.edges[k] < edge && edge < self.edges[k + 1]);
        self.edges.insert(k + 1, edge);
        self.triangles.splice(k..=k, [left, right]);
        self.refresh();
    }

    /// Cone containing the direction of `p`, if any.
    pub fn cone_of(&self, p: Point2) -> Option<usize> {
        let a = p.angle();
        let first = *self.edges.first()?;
        let last = *self.edges.last()?;
        if a < first || a > last {
            return None;
        }
        let k = self.edges.partition_point(|&e| e <= a);
        Some(k.saturating_sub(1).min(self.triangles.len() - 1))
    }

    /// Whether `p` lies in the triangle of its cone (or in a neighbor when it
    /// sits on a shared ray).
    pub fn covers(&self, p: Point2) -> bool {
        let Some(k) = self.cone_of(p) else {
            return false;
        };
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(self.triangles.len() - 1);
        (lo..=hi).any(|i| self.triangles[i].contains(p, COVERAGE_SLACK))
    }

    /// Triangle index chosen with probability proportional to area.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let target = rng.random::<f64>() * self.total_area();
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.triangles.len() - 1)
    }
}
