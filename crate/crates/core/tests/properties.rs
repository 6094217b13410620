use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailsampler::ars_mixture::{build_proposal, ExponentialDensity};
use tailsampler::bounds::{build_linearized, build_linearized_reduced, BoundOptions};
use tailsampler::model::{Artificial3ObsParams, AuxKind, Curvature, MarginalPotential, Nonlinearity, PotentialModel};
use tailsampler::pf::draw_ancestors;
use tailsampler::rou::{sample_uniform_triangle, Point2, RouSampler, Triangle};
use tailsampler::support::{Interval, SupportSet};
use tailsampler_oracle::quad::grid_min;

fn params() -> impl Strategy<Value = Artificial3ObsParams> {
    (
        (-3.0..-0.5f64, 0.5..2.0f64, -1.5..-0.3f64, 0.5..2.0f64, 0.5..3.0f64),
        (0.05..1.0f64, 1.0..3.0f64, 0.5..2.5f64, 0.0..3.0f64),
    )
        .prop_map(|((a, b, c, d, e), (lambda, y1, y2, y3))| Artificial3ObsParams {
            a,
            b,
            c,
            d,
            e,
            lambda,
            y1,
            y2,
            y3,
        })
}

fn marginal() -> impl Strategy<Value = MarginalPotential> {
    prop_oneof![
        (0.1..5.0f64).prop_map(|scale| MarginalPotential::Quadratic { scale }),
        (0.5..6.0f64).prop_map(|k| MarginalPotential::SquareMinusLog { k }),
        (0.1..3.0f64).prop_map(|slope| MarginalPotential::AbsLinear { slope }),
        (-3.0..3.0f64).prop_map(|slope| MarginalPotential::Linear { slope }),
        Just(MarginalPotential::HalfExpMinusLinear),
        ((-2.0..2.0f64), (0.1..3.0f64))
            .prop_map(|(y, s)| MarginalPotential::residual(y, MarginalPotential::Quadratic { scale: s })),
    ]
}

/// Nonlinearities paired with a sub-domain on which they are smooth.
fn nonlinearity() -> impl Strategy<Value = (Nonlinearity, f64, f64)> {
    prop_oneof![
        ((-3.0..3.0f64), (-2.0..2.0f64)).prop_map(|(slope, offset)| (Nonlinearity::Affine { slope, offset }, -5.0, 5.0)),
        ((-3.0..3.0f64), (0.2..2.0f64)).prop_map(|(a, b)| (Nonlinearity::ScaledExpDecay { a, b }, 0.0, 5.0)),
        ((-3.0..3.0f64), (0.2..2.0f64)).prop_map(|(c, d)| (Nonlinearity::ScaledLog1p { c, d }, 0.0, 5.0)),
        (-2.0..2.0f64).prop_map(|center| (Nonlinearity::ShiftedSquare { center }, -5.0, 5.0)),
        (prop_oneof![Just(1.0), Just(-1.0)], (-2.0..2.0f64))
            .prop_map(|(scale, offset)| (Nonlinearity::LogSquare { scale, offset }, 0.05, 5.0)),
    ]
}

fn second_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    f(x - h) - 2.0 * f(x) + f(x + h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_are_convex_with_consistent_derivatives(m in marginal(), t in -4.0..4.0f64) {
        let f = |s: f64| m.eval(s);
        prop_assume!(t.abs() > 0.05 && f(t).is_finite());
        let h = 1e-3;
        prop_assume!(f(t - h).is_finite() && f(t + h).is_finite());
        let d2 = second_difference(f, t, h);
        prop_assert!(d2 >= -1e-8 * (1.0 + f(t).abs()));
        let fd = (f(t + 1e-6) - f(t - 1e-6)) / 2e-6;
        prop_assert!((fd - m.deriv(t)).abs() <= 1e-4 * (1.0 + fd.abs()));
        prop_assert!(m.min_value() <= f(t) + 1e-12);
    }

    #[test]
    fn nonlinearity_curvature_tags_hold((g, lo, hi) in nonlinearity(), s in 0.02..0.98f64) {
        let x = lo + (hi - lo) * s;
        let h = 1e-3 * (hi - lo);
        let v = g.eval(x);
        prop_assume!(v.is_finite());
        let d2 = second_difference(|y| g.eval(y), x, h);
        let tol = 1e-7 * (1.0 + v.abs());
        match g.curvature() {
            Curvature::Convex => prop_assert!(d2 >= -tol),
            Curvature::Concave => prop_assert!(d2 <= tol),
            Curvature::Linear => prop_assert!(d2.abs() <= tol),
        }
        let fd = (g.eval(x + 1e-6) - g.eval(x - 1e-6)) / 2e-6;
        prop_assert!((fd - g.deriv(x)).abs() <= 1e-4 * (1.0 + fd.abs()));
    }

    #[test]
    fn potential_is_the_sum_of_its_terms(p in params(), x in 0.0..8.0f64) {
        let m = PotentialModel::artificial3obs(&p).unwrap();
        let sum: f64 = (0..m.len()).map(|j| m.eval_term(j, x).unwrap()).sum();
        let v = m.eval_potential(x).unwrap();
        if sum <= 700.0 {
            prop_assert!((v - sum).abs() <= 1e-12 * (1.0 + sum.abs()));
        } else {
            prop_assert_eq!(v, f64::INFINITY);
        }
        let reduced = m.eval_reduced_potential(3, x).unwrap();
        let expected = sum - m.eval_term(3, x).unwrap();
        if expected <= 700.0 {
            prop_assert!((reduced - expected).abs() <= 1e-9 * (1.0 + sum.abs()));
        }
    }

    #[test]
    fn linearized_bounds_minorize(p in params(), a in 0.0..6.0f64, w in 0.05..4.0f64, tighten in any::<bool>()) {
        let m = PotentialModel::artificial3obs(&p).unwrap();
        let iv = Interval::new(a, a + w).unwrap();
        let opts = BoundOptions { tighten };
        for b in [
            build_linearized_reduced(&m, 3, iv, opts).unwrap(),
            build_linearized(&m, iv, AuxKind::Height, 2.0, opts).unwrap(),
        ] {
            let gmin = grid_min(|x| b.target_at(&m, x), iv.lo, iv.hi, 2001);
            prop_assert!(b.gamma <= gmin + 1e-9);
            for i in 0..=200 {
                let x = iv.lo + w * i as f64 / 200.0;
                let t = b.target_at(&m, x);
                let mv = b.modified_at(&m, x);
                if t.is_finite() {
                    prop_assert!(mv <= t + 1e-9 * (1.0 + t.abs()));
                }
                if mv.is_finite() {
                    prop_assert!(b.tangent_at(x) <= mv + 1e-9 * (1.0 + mv.abs()));
                }
            }
        }
    }

    #[test]
    fn splitting_never_loosens(p in params(), a in 0.0..6.0f64, w in 0.1..4.0f64, s in 0.05..0.95f64) {
        let m = PotentialModel::artificial3obs(&p).unwrap();
        let iv = Interval::new(a, a + w).unwrap();
        let parent = build_linearized_reduced(&m, 3, iv, BoundOptions::default()).unwrap();
        let (l, r) = parent.split(&m, a + s * w, BoundOptions::default()).unwrap();
        prop_assert!(l.gamma >= parent.gamma && r.gamma >= parent.gamma);
        prop_assert_eq!(l.interval.hi, r.interval.lo);
    }

    #[test]
    fn mixture_envelope_dominates(p in params(), extra in proptest::collection::vec(0.01..8.0f64, 0..6)) {
        let m = PotentialModel::artificial3obs(&p).unwrap();
        let mut points = vec![0.0];
        points.extend(extra);
        let Ok(supports) = SupportSet::new(points) else { return Ok(()) };
        let q = ExponentialDensity::new(p.lambda).unwrap();
        let proposal = build_proposal(&m, 3, &q, &supports, BoundOptions::default()).unwrap();
        for i in 0..400 {
            let x = 0.025 * i as f64;
            prop_assert!(proposal.log_envelope(&q, x) >= -m.potential(x) - 1e-9);
        }
    }

    #[test]
    fn triangle_cover_contains_the_region(p in params(), rho in 1.0..3.0f64, seed in any::<u64>()) {
        let m = Arc::new(PotentialModel::artificial3obs(&p).unwrap());
        let r = std::f64::consts::SQRT_2;
        let supports = SupportSet::new([0.0, 2.0 - r, 2.0, 2.0 + r]).unwrap();
        let mut s = RouSampler::new(m, rho, supports, BoundOptions::default()).unwrap();
        prop_assert_eq!(s.coverage_violations(2000), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        s.sample_n(20, &mut rng).unwrap();
        prop_assert_eq!(s.coverage_violations(2000), 0);
    }

    #[test]
    fn uniform_triangle_points_stay_inside(
        v in proptest::array::uniform6(-5.0..5.0f64),
        seed in any::<u64>(),
    ) {
        let t = Triangle::new(Point2::new(v[0], v[1]), Point2::new(v[2], v[3]), Point2::new(v[4], v[5]));
        prop_assume!(t.area > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            prop_assert!(t.contains(sample_uniform_triangle(&t, &mut rng), 1e-9));
        }
    }

    #[test]
    fn support_sets_are_sorted_and_distinct(xs in proptest::collection::vec(-10.0..10.0f64, 1..20)) {
        if let Ok(s) = SupportSet::new(xs.clone()) {
            prop_assert!(s.points().windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(s.len(), xs.len());
        }
    }

    #[test]
    fn ancestor_groups_partition_the_draws(len in 1usize..50, n in 0usize..500, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups = draw_ancestors(len, n, &mut rng);
        prop_assert_eq!(groups.iter().map(|g| g.1).sum::<usize>(), n);
        prop_assert!(groups.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(groups.iter().all(|g| g.0 < len && g.1 > 0));
    }
}
