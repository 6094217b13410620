use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailsampler::pf::{
    filter_step, initial_particles, run_filter, sample_group, simulate_sv, FilterOptions, SVParams, SvTarget,
};
use tailsampler::Error;
use tailsampler_oracle::models::sv_potential;
use tailsampler_oracle::quad::NumericCdf;
use tailsampler_oracle::stats::ks_test;

#[test]
fn single_ancestor_draws_follow_the_step_target() {
    let params = SVParams::new(0.8, 0.9).unwrap();
    let (x_prev, y) = (1.3f64, -0.7);
    let alpha = params.beta * (x_prev * x_prev).ln();
    for (target, jacobian) in [(SvTarget::Jacobian, true), (SvTarget::Written, false)] {
        let density = move |x: f64| {
            if x <= 0.0 {
                return 0.0;
            }
            let v = sv_potential(x, y, alpha, params.sigma) + if jacobian { x.ln() } else { 0.0 };
            (-v).exp()
        };
        let cdf = NumericCdf::new(density, 0.0, 60.0, 30_000);
        let opts = FilterOptions { target, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (xs, trials) = sample_group(x_prev, y, &params, 10_000, &mut rng, opts).unwrap();
        assert_eq!(xs.len(), 10_000);
        assert!(trials >= 10_000);
        let (d, p) = ks_test(&xs, |x| cdf.cdf(x));
        assert!(p > 0.001, "{target:?}: d = {d}, p = {p}");
    }
}

#[test]
fn unit_noise_increments_without_persistence() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let sigma = 0.9;
    let (xs, obs) = simulate_sv(0.0, sigma, 100_000, 1.0, &mut rng).unwrap();
    let logs: Vec<f64> = xs.iter().map(|x| (x * x).ln()).collect();
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 0.02);
    assert!((var / (sigma * sigma) - 1.0).abs() < 0.03, "var = {var}");
    // E ln(ϑ₀²) = −(γ_E + ln 2) for a standard normal ϑ₀.
    let resid = obs.iter().zip(&logs).map(|(y, l)| y - l).sum::<f64>() / n;
    assert!((resid + 1.2703628).abs() < 0.03, "{resid}");
}

#[test]
fn step_acceptance_is_moderate() {
    let params = SVParams::new(0.8, 0.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let particles = initial_particles(&params, 1000, &mut rng);
    for y in [-2.5, -1.0, 0.5] {
        let (next, stats) = filter_step(&particles, y, &params, 1000, &mut rng, FilterOptions::default()).unwrap();
        assert_eq!(next.len(), 1000);
        assert!((0.30..=0.55).contains(&stats.acceptance_rate), "y = {y}: {}", stats.acceptance_rate);
        assert!(stats.groups <= 1000 && stats.groups > 500);
    }
}

#[test]
fn steps_do_not_depend_on_thread_count() {
    let params = SVParams::new(0.8, 0.9).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(34);
            let (_, obs) = simulate_sv(0.8, 0.9, 5, 1.0, &mut rng).unwrap();
            run_filter(&params, &obs, 300, &mut rng, FilterOptions::default()).unwrap()
        })
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn invalid_inputs() {
    let params = SVParams::new(0.8, 0.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    assert!(SVParams::new(0.8, 0.0).is_err());
    assert!(SVParams::new(f64::NAN, 1.0).is_err());
    assert!(matches!(
        run_filter(&params, &[0.0], 0, &mut rng, FilterOptions::default()),
        Err(Error::InvalidParameter { .. })
    ));
    assert!(filter_step(&[1.0, -1.0], 0.0, &params, 10, &mut rng, FilterOptions::default()).is_err());
    assert!(filter_step(&[1.0], f64::NAN, &params, 10, &mut rng, FilterOptions::default()).is_err());
    assert!(simulate_sv(0.8, 0.9, 3, 0.0, &mut rng).is_err());
}

#[test]
fn trace_reports_every_step() {
    let params = SVParams::new(0.8, 0.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let (states, obs) = simulate_sv(0.8, 0.9, 8, 1.0, &mut rng).unwrap();
    let mut trace = run_filter(&params, &obs, 200, &mut rng, FilterOptions::default()).unwrap();
    trace.truth = Some(states);
    assert_eq!(trace.len(), 8);
    assert!(trace.stds.iter().all(|&s| s > 0.0));
    assert!(trace.mse().unwrap().is_finite());
    let csv = trace.to_csv();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("k,truth,estimate,std,acceptance_rate\n1,"));
}
