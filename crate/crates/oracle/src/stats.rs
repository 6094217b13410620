//! Goodness-of-fit tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Asymptotic Kolmogorov survival function `P(K > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// One-sample KS statistic and asymptotic p-value.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let d = ks_statistic(samples, cdf);
    let sn = (samples.len() as f64).sqrt();
    (d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d))
}

/// Two-sample KS statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    (d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d))
}

/// Pearson chi-square statistic and p-value for observed counts against
/// expected probabilities (bins with zero expectation are skipped).
pub fn chi_square(observed: &[u64], expected_prob: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected_prob.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &p) in observed.iter().zip(expected_prob) {
        if p <= 0.0 {
            continue;
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    let dof = (bins.max(2) - 1) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat);
    (stat, p)
}

/// `k`-sigma binomial band for a proportion.
pub fn binomial_band(p: f64, n: usize, k: f64) -> (f64, f64) {
    let s = (p * (1.0 - p) / n as f64).sqrt();
    (p - k * s, p + k * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_known_values() {
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn uniform_grid_has_small_statistic() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let (d, p) = ks_test(&xs, |x| x);
        assert!(d <= 0.0005 + 1e-12);
        assert!(p > 0.99);
        let (d2, p2) = ks_two_sample(&xs, &xs);
        assert_eq!(d2, 0.0);
        assert!(p2 > 0.99);
    }

    #[test]
    fn chi_square_of_exact_counts_is_zero() {
        let (s, p) = chi_square(&[25, 25, 50], &[0.25, 0.25, 0.5]);
        assert_eq!(s, 0.0);
        assert!(p > 0.999);
    }
}
