//! Adaptive Simpson quadrature and tabulated CDFs.

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` to absolute tolerance `tol` with adaptive Simpson.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// CDF of an unnormalized density on `[a, b]`, tabulated on a uniform grid
/// and refined by quadrature inside cells.
pub struct NumericCdf<F> {
    f: F,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl<F: Fn(f64) -> f64> NumericCdf<F> {
    pub fn new(f: F, a: f64, b: f64, cells: usize) -> Self {
        let nodes: Vec<f64> = (0..=cells)
            .map(|i| a + (b - a) * i as f64 / cells as f64)
            .collect();
        let mut cumulative = vec![0.0];
        let mut acc = 0.0;
        for w in nodes.windows(2) {
            acc += integrate(&f, w[0], w[1], 1e-13);
            cumulative.push(acc);
        }
        NumericCdf {
            f,
            nodes,
            cumulative,
            total: acc,
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let a = self.nodes[0];
        let b = *self.nodes.last().unwrap();
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return 1.0;
        }
        let k = self.nodes.partition_point(|&n| n <= x) - 1;
        let part = integrate(&self.f, self.nodes[k], x, 1e-13);
        ((self.cumulative[k] + part) / self.total).clamp(0.0, 1.0)
    }

    /// Normalized mass of `[lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.cdf(hi) - self.cdf(lo)
    }
}

/// Minimum of `f` over `count` evenly spaced points of `[a, b]`.
pub fn grid_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, count: usize) -> f64 {
    (0..count)
        .map(|i| f(a + (b - a) * i as f64 / (count - 1) as f64))
        .filter(|v| !v.is_nan())
        .fold(f64::INFINITY, f64::min)
}

/// Maximum of `f` over `count` evenly spaced points of `[a, b]`.
pub fn grid_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, count: usize) -> f64 {
    -grid_min(|x| -f(x), a, b, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_known_functions() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-10);
        assert!((integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-13) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tabulated_cdf_of_exponential() {
        let c = NumericCdf::new(|x: f64| (-x).exp(), 0.0, 60.0, 600);
        for x in [0.1, 1.0, 2.5, 7.0] {
            assert!((c.cdf(x) - (1.0 - (-x).exp())).abs() < 1e-10);
        }
    }
}
