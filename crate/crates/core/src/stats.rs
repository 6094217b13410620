//! Per-sample trial accounting for acceptance-rate curves.

/// Trial counts of an adaptive sampler.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AcceptanceStats {
    /// Number of candidates drawn for each accepted sample (always ≥ 1).
    pub trials_per_accept: Vec<u64>,
    /// Rejected candidates.
    pub rejections: u64,
    /// Rejected candidates that were not inserted because they duplicated a
    /// support point (or could not be bounded).
    pub skipped_insertions: u64,
}

impl AcceptanceStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accepted(&self) -> usize {
        self.trials_per_accept.len()
    }

    pub fn total_trials(&self) -> u64 {
        self.trials_per_accept.iter().sum()
    }

    /// Accepted samples over total trials.
    pub fn acceptance_rate(&self) -> f64 {
        let total = self.total_trials();
        if total == 0 {
            return f64::NAN;
        }
        self.accepted() as f64 / total as f64
    }

    pub fn record(&mut self, trials: u64) {
        debug_assert!(trials >= 1);
        self.trials_per_accept.push(trials);
    }

    pub fn merge(&mut self, other: &AcceptanceStats) {
        self.trials_per_accept.extend_from_slice(&other.trials_per_accept);
        self.rejections += other.rejections;
        self.skipped_insertions += other.skipped_insertions;
    }
}

/// Mean reciprocal trial count at each sample index across runs.
///
/// All runs must have the same length.
pub fn acceptance_curve(runs: &[AcceptanceStats]) -> Vec<f64> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let len = first.accepted();
    let mut curve = vec![0.0; len];
    for run in runs {
        assert_eq!(run.accepted(), len, "runs have different lengths");
        for (c, &k) in curve.iter_mut().zip(&run.trials_per_accept) {
            *c += 1.0 / k as f64;
        }
    }
    let m = runs.len() as f64;
    curve.iter_mut().for_each(|c| *c /= m);
    curve
}
