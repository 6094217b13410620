//! Exact adaptive rejection sampling for univariate densities
//! `p(x) ∝ exp{−V(x)}` whose potential is a sum of convex marginal
//! potentials composed with convex or concave nonlinearities.
//!
//! Two samplers are provided:
//!
//! * [`ars_mixture::Ars1Sampler`] draws from a mixture of truncated pieces of
//!   one term's density, scaled by interval-wise bounds of the remaining
//!   terms. It handles multimodal targets but needs a term whose reduced
//!   potential is bounded on the tails.
//! * [`rou::RouSampler`] is an adaptive ratio-of-uniforms sampler whose
//!   proposal region is a union of cone-aligned triangles. It handles
//!   log-convex tails, and heavier tails through the `rho` parameter.
//!
//! [`pf`] builds an accept/reject particle filter for a stochastic
//! volatility model on top of the ratio-of-uniforms sampler.
//!
//! ```
//! use rand::SeedableRng;
//! use tailsampler::{model::PotentialModel, rou::RouSampler, support::SupportSet};
//!
//! let model = PotentialModel::artificial3obs(&Default::default()).unwrap();
//! let supports = SupportSet::new([0.0, 2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()]).unwrap();
//! let mut sampler = RouSampler::new(model.into(), 1.0, supports, Default::default()).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let xs = sampler.sample_n(100, &mut rng).unwrap();
//! assert!(xs.iter().all(|&x| x >= 0.0));
//! ```

pub mod ars_mixture;
pub mod bounds;
pub mod error;
pub mod model;
pub mod pf;
pub mod rou;
pub mod stats;
pub mod support;

pub use error::{Error, Result};
