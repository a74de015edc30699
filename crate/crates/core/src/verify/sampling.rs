use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling box with a deterministic stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub intervals: Vec<(f64, f64)>,
    pub count: usize,
    pub seed: u64,
    /// Minimum distance kept from declared singular sets.
    #[serde(default)]
    pub margin: f64,
}

impl SampleSpec {
    pub fn new(intervals: Vec<(f64, f64)>, count: usize, seed: u64) -> Self {
        Self {
            intervals,
            count,
            seed,
            margin: 0.0,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParams("sample count must be at least 1".into()));
        }
        if self.intervals.is_empty() {
            return Err(Error::InvalidParams("no sampling intervals".into()));
        }
        for &(lo, hi) in &self.intervals {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParams(format!("bad sampling interval [{lo}, {hi}]")));
            }
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(Error::InvalidParams("margin must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub points: Vec<Vec<f64>>,
    pub rejected: usize,
}

/// Draws `spec.count` points, rejecting those within `spec.margin` of the
/// singular set. Fails once more than 99% of candidates are rejected.
pub fn sample_points(spec: &SampleSpec, singular: Option<&(dyn Fn(&[f64], f64) -> bool + Sync)>) -> Result<Sampled> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let max_attempts = 100 * spec.count;
    let mut points = Vec::with_capacity(spec.count);
    let mut attempts = 0;
    while points.len() < spec.count {
        if attempts >= max_attempts {
            return Err(Error::Rejection {
                rejected: attempts - points.len(),
                attempts,
            });
        }
        attempts += 1;
        let x: Vec<f64> = spec
            .intervals
            .iter()
            .map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..hi) })
            .collect();
        if singular.is_some_and(|p| p(&x, spec.margin)) {
            continue;
        }
        points.push(x);
    }
    Ok(Sampled {
        rejected: attempts - points.len(),
        points,
    })
}
