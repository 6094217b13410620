use rand::Rng;

use crate::error::{Error, Result};

/// A point of the `(v, u)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub v: f64,
    pub u: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { v: 0.0, u: 0.0 };

    pub fn new(v: f64, u: f64) -> Self {
        Point2 { v, u }
    }

    /// Unit vector at angle `alpha` measured from the `u` axis toward `+v`.
    pub fn direction(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Point2 { v: s, u: c }
    }

    /// Angle from the `u` axis, in `[−π, π]`.
    pub fn angle(&self) -> f64 {
        self.v.atan2(self.u)
    }

    pub fn norm(&self) -> f64 {
        self.v.hypot(self.u)
    }

    fn scaled(self, k: f64) -> Self {
        Point2 {
            v: self.v * k,
            u: self.u * k,
        }
    }
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.v - o.v) * (b.u - o.u) - (a.u - o.u) * (b.v - o.v)
}

/// A triangle with precomputed area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub v1: Point2,
    pub v2: Point2,
    pub v3: Point2,
    pub area: f64,
}

impl Triangle {
    pub fn new(v1: Point2, v2: Point2, v3: Point2) -> Self {
        let area = 0.5 * cross(v1, v2, v3).abs();
        Triangle { v1, v2, v3, area }
    }

    /// Barycentric coordinates of `p` (weights of `v1`, `v2`, `v3`).
    pub fn barycentric(&self, p: Point2) -> [f64; 3] {
        let d = cross(self.v1, self.v2, self.v3);
        let l2 = cross(self.v1, p, self.v3) / d;
        let l3 = cross(self.v1, self.v2, p) / d;
        [1.0 - l2 - l3, l2, l3]
    }

    /// Membership with a barycentric slack.
    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        self.barycentric(p).iter().all(|&l| l >= -slack)
    }

    pub fn centroid(&self) -> Point2 {
        Point2 {
            v: (self.v1.v + self.v2.v + self.v3.v) / 3.0,
            u: (self.v1.u + self.v2.u + self.v3.u) / 3.0,
        }
    }
}

/// Maps two uniforms to a point of the triangle; `(u1, u2) = (1, 1)` gives
/// `v1`, `(0, 1)` gives `v3` and `(0, 0)` gives `v2`.
#[inline]
pub fn triangle_point(t: &Triangle, u1: f64, u2: f64) -> Point2 {
    let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
    let (a, b, c) = (lo, 1.0 - hi, hi - lo);
    Point2 {
        v: t.v1.v * a + t.v2.v * b + t.v3.v * c,
        u: t.v1.u * a + t.v2.u * b + t.v3.u * c,
    }
}

/// Uniform draw from a triangle.
#[inline]
pub fn sample_uniform_triangle<R: Rng + ?Sized>(t: &Triangle, rng: &mut R) -> Point2 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    triangle_point(t, u1, u2)
}

/// Smallest admissible cone aperture.
pub const MIN_APERTURE: f64 = 1e-12;

/// Triangle with apex at the origin covering the sector of radius `radius`
/// between the rays at `alpha_lo` and `alpha_hi`. Its outer edge is tangent
/// to the circle at the angular midpoint.
pub fn build_triangle(radius: f64, alpha_lo: f64, alpha_hi: f64) -> Result<Triangle> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let aperture = alpha_hi - alpha_lo;
    if aperture.is_nan() || aperture < MIN_APERTURE || alpha_lo < -half_pi || alpha_hi > half_pi {
        return Err(Error::DegenerateCone {
            lo: alpha_lo,
            hi: alpha_hi,
        });
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvariantViolation(format!(
            "cone radius must be finite and nonnegative, got {radius}"
        )));
    }
    let half = 0.5 * (alpha_hi - alpha_lo);
    let reach = radius / half.cos();
    Ok(Triangle::new(
        Point2::ORIGIN,
        Point2::direction(alpha_lo).scaled(reach),
        Point2::direction(alpha_hi).scaled(reach),
    ))
}

/// Radius of the circle containing `{0 ≤ u ≤ l1, |v| ≤ l23}`.
pub fn cone_radius(l1: f64, l23: f64) -> f64 {
    l1.hypot(l23)
}
