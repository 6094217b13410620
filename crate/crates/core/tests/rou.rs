use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailsampler::bounds::BoundOptions;
use tailsampler::model::{Artificial3ObsParams, MarginalPotential, Nonlinearity, PotentialModel, Term};
use tailsampler::rou::{adaptive_rou_sample, sample_uniform_triangle, RectangleSampler, RouSampler};
use tailsampler::support::{Interval, SupportSet};
use tailsampler::Error;
use tailsampler_oracle::models::ThreeObs;
use tailsampler_oracle::quad::{integrate, NumericCdf};
use tailsampler_oracle::stats::{binomial_band, ks_statistic, ks_test, ks_two_sample};

fn exponential() -> Arc<PotentialModel> {
    Arc::new(
        PotentialModel::new(
            vec![Term::new(MarginalPotential::AbsLinear { slope: 1.0 }, Nonlinearity::identity())],
            Interval::nonnegative(),
        )
        .unwrap(),
    )
}

fn artificial() -> Arc<PotentialModel> {
    Arc::new(PotentialModel::artificial3obs(&Artificial3ObsParams::default()).unwrap())
}

fn gaussian() -> Arc<PotentialModel> {
    Arc::new(
        PotentialModel::new(
            vec![Term::new(MarginalPotential::Quadratic { scale: 0.5 }, Nonlinearity::identity())],
            Interval::real_line(),
        )
        .unwrap(),
    )
}

fn s0() -> SupportSet {
    let r = std::f64::consts::SQRT_2;
    SupportSet::new([0.0, 2.0 - r, 2.0, 2.0 + r]).unwrap()
}

fn zero() -> SupportSet {
    SupportSet::new([0.0]).unwrap()
}

#[test]
fn exponential_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (xs, _, _) = adaptive_rou_sample(exponential(), 1.0, zero(), 10_000, &mut rng, BoundOptions::default()).unwrap();
    let d = ks_statistic(&xs, |x| 1.0 - (-x).exp());
    assert!(d < 0.015, "KS d = {d}");
}

#[test]
fn generalized_exponent_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for rho in [2.0, 3.0] {
        let (xs, _, _) =
            adaptive_rou_sample(exponential(), rho, zero(), 5_000, &mut rng, BoundOptions::default()).unwrap();
        let (_, p) = ks_test(&xs, |x| 1.0 - (-x).exp());
        assert!(p > 0.001, "rho = {rho}: p = {p}");
    }
}

#[test]
fn two_sided_support_samples() {
    let normal = normal_cdf();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let supports = SupportSet::new([-1.0, 0.0, 1.0]).unwrap();
    let (xs, _, _) = adaptive_rou_sample(gaussian(), 1.0, supports, 10_000, &mut rng, BoundOptions::default()).unwrap();
    let (_, p) = ks_test(&xs, normal);
    assert!(p > 0.001);
}

fn normal_cdf() -> impl Fn(f64) -> f64 {
    let cdf = NumericCdf::new(|x: f64| (-0.5 * x * x).exp(), -12.0, 12.0, 4000);
    move |x| cdf.cdf(x)
}

#[test]
fn artificial_samples_match_the_reference() {
    let o = ThreeObs::default();
    let cdf = NumericCdf::new(|x| o.density(x), 0.0, 50.0, 20_000);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let (xs, stats, supports) =
        adaptive_rou_sample(artificial(), 1.0, s0(), 10_000, &mut rng, BoundOptions::default()).unwrap();
    let (_, p) = ks_test(&xs, |x| cdf.cdf(x));
    assert!(p > 0.001);
    assert_eq!(supports.len() as u64, 4 + stats.rejections - stats.skipped_insertions);
}

/// Probability that a uniform point of the cover lands in the region.
fn cover_hit_rate(s: &RouSampler, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tri = s.cover().triangles();
    let mut hits = 0;
    for _ in 0..n {
        let p = sample_uniform_triangle(&tri[s.cover().select(&mut rng)], &mut rng);
        if p.u <= 0.0 {
            continue;
        }
        let x = p.v / p.u.powf(s.rho());
        if s.model().support().contains(x) && (s.rho() + 1.0) * p.u.ln() <= -(s.model().potential(x) - s.offset()) {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

#[test]
fn acceptance_matches_area_ratio() {
    let o = ThreeObs::default();
    let mass = integrate(|x| o.density(x), 0.0, 60.0, 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for rho in [1.0, 2.0] {
        let mut s = RouSampler::new(artificial(), rho, s0(), BoundOptions::default()).unwrap();
        for _ in 0..2 {
            let area = mass * s.offset().exp() / (rho + 1.0);
            let ratio = area / s.cover().total_area();
            let n = 200_000;
            let rate = cover_hit_rate(&s, n, 99);
            let (lo, hi) = binomial_band(ratio, n, 5.0);
            assert!(lo <= rate && rate <= hi, "rho = {rho}: {rate} vs {ratio}");
            s.sample_n(100, &mut rng).unwrap();
        }
    }
}

#[test]
fn nine_point_cover_is_complete() {
    let supports = SupportSet::new([0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0]).unwrap();
    for rho in [1.0, 2.0] {
        let s = RouSampler::new(artificial(), rho, supports.clone(), BoundOptions::default()).unwrap();
        assert_eq!(s.cover().len(), 9);
        assert_eq!(s.interval_bounds().len(), 9);
        assert_eq!(s.coverage_violations(10_000), 0);
    }
}

#[test]
fn coverage_survives_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for rho in [1.0, 1.5, 3.0] {
        let mut s = RouSampler::new(artificial(), rho, s0(), BoundOptions::default()).unwrap();
        while s.stats().rejections < 100 {
            s.sample(&mut rng).unwrap();
        }
        assert_eq!(s.coverage_violations(10_000), 0, "rho = {rho}");
    }
}

#[test]
fn rectangle_and_cover_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let mut rect = RectangleSampler::new(exponential(), 1.0).unwrap();
    let a = rect.sample_n(10_000, &mut rng);
    let (b, _, _) = adaptive_rou_sample(exponential(), 1.0, zero(), 10_000, &mut rng, BoundOptions::default()).unwrap();
    let (_, p) = ks_two_sample(&a, &b);
    assert!(p > 0.001);
    let (u, vmin, vmax) = rect.rectangle();
    assert!(u >= 1.0 && vmin <= 0.0 && vmax >= 2.0 / std::f64::consts::E);
}

#[test]
fn construction_errors() {
    let no_zero = SupportSet::new([1.0]).unwrap();
    assert!(matches!(
        RouSampler::new(exponential(), 1.0, no_zero, BoundOptions::default()),
        Err(Error::MissingZeroSupport(_))
    ));
    assert!(matches!(
        RouSampler::new(exponential(), 0.5, zero(), BoundOptions::default()),
        Err(Error::InvalidRho(_))
    ));
    // p(x) = x^{-3/2} on [1, ∞): integrable, but x·p^{1/2} grows without bound.
    let pareto = Arc::new(
        PotentialModel::new(
            vec![Term::new(
                MarginalPotential::Linear { slope: 0.75 },
                Nonlinearity::LogSquare { scale: 1.0, offset: 0.0 },
            )],
            Interval::new(1.0, f64::INFINITY).unwrap(),
        )
        .unwrap(),
    );
    assert!(matches!(
        RouSampler::new(pareto, 1.0, SupportSet::new([2.0]).unwrap(), BoundOptions::default()),
        Err(Error::UnboundedRegion(_))
    ));
}
