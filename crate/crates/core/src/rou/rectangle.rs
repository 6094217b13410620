use std::sync::Arc;

use rand::Rng;

use super::geometry::Point2;
use super::sampler::{accept_shifted, reference_offset};
use crate::bounds::{rou_log_bounds, BoundOptions};
use crate::error::Result;
use crate::model::{check_rho, PotentialModel};
use crate::support::Interval;

/// Sign-pure parts of the support.
fn halves(support: &Interval) -> (Option<Interval>, Option<Interval>) {
    let pos = (support.hi > 0.0).then(|| Interval {
        lo: support.lo.max(0.0),
        hi: support.hi,
    });
    let neg = (support.lo < 0.0).then(|| Interval {
        lo: support.lo,
        hi: support.hi.min(0.0),
    });
    (pos, neg)
}

/// `ln` of the rectangle bounds `(u_max, v_min, v_max)` for `p·e^{offset}`.
fn log_rectangle(model: &PotentialModel, rho: f64, offset: f64) -> Result<(f64, f64, f64)> {
    check_rho(rho)?;
    let (pos, neg) = halves(&model.support());
    let opts = BoundOptions::default();
    let mut log_u = f64::NEG_INFINITY;
    let (mut v_min, mut v_max) = (0.0, 0.0);
    let h = offset / (rho + 1.0);
    let w = rho * offset / (rho + 1.0);
    if let Some(iv) = pos {
        let (g1, g2) = rou_log_bounds(model, iv, rho, opts)?;
        log_u = log_u.max(-(g1 - h));
        v_max = (-(g2 - w)).exp();
    }
    if let Some(iv) = neg {
        let (g1, g3) = rou_log_bounds(model, iv, rho, opts)?;
        log_u = log_u.max(-(g1 - h));
        v_min = -(-(g3 - w)).exp();
    }
    Ok((log_u.exp(), v_min, v_max))
}

/// Rectangle `[v_min, v_max] × [0, u_max]` containing the ratio-of-uniforms
/// region of `p`, from single-interval bounds over each sign of the support.
pub fn bounding_rectangle(model: &PotentialModel, rho: f64) -> Result<(f64, f64, f64)> {
    log_rectangle(model, rho, 0.0)
}

/// Non-adaptive ratio-of-uniforms rejection from the bounding rectangle.
#[derive(Debug, Clone)]
pub struct RectangleSampler {
    model: Arc<PotentialModel>,
    rho: f64,
    offset: f64,
    u_max: f64,
    v_min: f64,
    v_max: f64,
    trials: u64,
}

impl RectangleSampler {
    pub fn new(model: Arc<PotentialModel>, rho: f64) -> Result<Self> {
        let probes = model.support().grid(65, 20.0);
        let offset = reference_offset(&model, probes);
        let (u_max, v_min, v_max) = log_rectangle(&model, rho, offset)?;
        Ok(RectangleSampler {
            model,
            rho,
            offset,
            u_max,
            v_min,
            v_max,
            trials: 0,
        })
    }

    /// `(u_max, v_min, v_max)` of the shifted density.
    pub fn rectangle(&self) -> (f64, f64, f64) {
        (self.u_max, self.v_min, self.v_max)
    }

    /// Candidates drawn so far.
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        loop {
            self.trials += 1;
            let u = self.u_max * rng.random::<f64>();
            let v = self.v_min + (self.v_max - self.v_min) * rng.random::<f64>();
            let p = Point2::new(v, u);
            if accept_shifted(&self.model, self.rho, self.offset, p) {
                return v / u.powf(self.rho);
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MarginalPotential, Nonlinearity, Term};

    #[test]
    fn exponential_rectangle() {
        let m = PotentialModel::new(
            vec![Term::new(MarginalPotential::AbsLinear { slope: 1.0 }, Nonlinearity::identity())],
            Interval::nonnegative(),
        )
        .unwrap();
        let (u, vmin, vmax) = bounding_rectangle(&m, 1.0).unwrap();
        assert!(u >= 1.0);
        assert_eq!(vmin, 0.0);
        assert!(vmax >= 2.0 / std::f64::consts::E);
    }

    #[test]
    fn symmetric_target_gives_symmetric_rectangle() {
        let m = PotentialModel::new(
            vec![Term::new(MarginalPotential::Quadratic { scale: 0.5 }, Nonlinearity::identity())],
            Interval::real_line(),
        )
        .unwrap();
        let (_, vmin, vmax) = bounding_rectangle(&m, 1.0).unwrap();
        assert!((vmin + vmax).abs() < 1e-12 * vmax);
    }
}
