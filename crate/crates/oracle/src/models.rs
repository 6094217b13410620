//! Direct transcriptions of the example potentials, written out term by term
//! without any of the library's abstractions.

/// Constants of the three-observation example.
#[derive(Debug, Clone, Copy)]
pub struct ThreeObs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub lambda: f64,
    pub y: [f64; 3],
}

impl Default for ThreeObs {
    fn default() -> Self {
        ThreeObs {
            a: -2.0,
            b: 1.1,
            c: -0.8,
            d: 1.5,
            e: 2.0,
            lambda: 0.2,
            y: [2.314, 1.6, 2.0],
        }
    }
}

impl ThreeObs {
    /// Negative log-likelihood of the three observations.
    pub fn likelihood_potential(&self, x: f64) -> f64 {
        let t1 = self.y[0] - self.a * (-self.b * x).exp();
        let t2 = self.y[1] - self.c * (self.d * x + 1.0).ln();
        let t3 = self.y[2] - (x - self.e).powi(2);
        t1 * t1 - (t1.powi(4)).ln() + t2 * t2 - (t2 * t2).ln() + t3 * t3
    }

    /// Full potential including the exponential prior.
    pub fn potential(&self, x: f64) -> f64 {
        self.likelihood_potential(x) + self.lambda * x
    }

    pub fn density(&self, x: f64) -> f64 {
        (-self.potential(x)).exp()
    }
}

/// Negative log of `p(y|x)·p(x|x_prev)` for the stochastic-volatility step,
/// with `α = β·ln(x_prev²)`.
pub fn sv_potential(x: f64, y: f64, alpha: f64, sigma: f64) -> f64 {
    let lx2 = (x * x).ln();
    let likelihood = 0.5 * (-(y - lx2) + y.exp() / (x * x));
    let prior = (lx2 - alpha).powi(2) / (2.0 * sigma * sigma);
    likelihood + prior
}
