//! Synthetic delay sequences with one planted burst.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)` and
//! switched to stream `stream`; position `i` consumes the `i`-th `f64`
//! drawn from that stream. Trials of an experiment share a seed and use
//! distinct streams, so every trial is reproducible on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BurstError, Result};
use crate::model::{DelaySequence, LevelSequence};

/// Where the burst goes and how delays are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantSpec {
    pub n: usize,
    /// First index inside the burst.
    pub burst_start: usize,
    /// One past the last index inside the burst.
    pub burst_end: usize,
    /// Exponential rate outside the burst.
    pub base_rate: f64,
    /// Exponential rate inside the burst.
    pub burst_rate: f64,
    pub seed: u64,
    pub stream: u64,
}

impl PlantSpec {
    /// A burst of length `len` centred in a sequence of length `n`.
    pub fn centered(n: usize, len: usize, base_rate: f64, burst_rate: f64, seed: u64) -> Self {
        let len = len.min(n);
        let start = (n - len) / 2;
        Self {
            n,
            burst_start: start,
            burst_end: start + len,
            base_rate,
            burst_rate,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(BurstError::Domain("planted sequence needs n >= 1".into()));
        }
        if !(self.burst_start <= self.burst_end && self.burst_end <= self.n) {
            return Err(BurstError::Domain(format!(
                "burst [{}, {}) does not fit in 0..{}",
                self.burst_start, self.burst_end, self.n
            )));
        }
        for rate in [self.base_rate, self.burst_rate] {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(BurstError::Domain(format!("rates must be > 0; got {rate}")));
            }
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draw delays and the matching 0/1 ground-truth levels.
pub fn generate(spec: &PlantSpec) -> Result<(DelaySequence, LevelSequence)> {
    spec.validate()?;
    let mut rng = spec.rng();
    let mut values = Vec::with_capacity(spec.n);
    let mut truth = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let inside = (spec.burst_start..spec.burst_end).contains(&i);
        let rate = if inside {
            spec.burst_rate
        } else {
            spec.base_rate
        };
        // Inverse CDF on U ∈ (0, 1].
        let u = 1.0 - rng.gen::<f64>();
        values.push(-u.ln() / rate);
        truth.push(inside as usize);
    }
    Ok((DelaySequence::new(values)?, LevelSequence::new(truth, 1)?))
}

/// `Σ |ℓᵢ − ℓ*ᵢ|`.
pub fn hamming(a: &LevelSequence, b: &LevelSequence) -> Result<usize> {
    if a.len() != b.len() {
        return Err(BurstError::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.levels()
        .iter()
        .zip(b.levels())
        .map(|(&x, &y)| x.abs_diff(y))
        .sum())
}
