//! Delay sequences, level sequences, model parameters and the burst score.
//!
//! Scores are extended reals carried in `f64`: `+inf` is a legal value (a
//! geometric rate of zero cannot produce a positive delay) and compares and
//! sums correctly. NaN never appears as long as inputs pass validation.
//! All logarithms are natural.

use crate::error::{BurstError, Result};

/// Delay distribution used for every level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `p(s; λ) = λ exp(-λ s)`, real delays, change rate `α > 1`.
    Exp,
    /// `p(s; λ) = (1 - λ) λ^s`, integer delays, change rate `0 ≤ α < 1`.
    Geo,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exp => "exp",
            Family::Geo => "geo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayKind {
    Real,
    Integer,
}

/// Summary statistics of a delay sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceStats {
    pub n: usize,
    /// Arithmetic mean μ.
    pub mean: f64,
    /// Geometric mean g; `None` when some delay is zero.
    pub geo_mean: Option<f64>,
    /// Maximum Ω.
    pub max: f64,
    /// Minimum ω.
    pub min: f64,
}

impl SequenceStats {
    /// The shift ψ = n log g used by the exponential-model guarantees.
    pub fn psi(&self) -> Option<f64> {
        self.geo_mean.map(|g| self.n as f64 * g.ln())
    }

    fn compute(values: &[f64]) -> Self {
        let n = values.len();
        let sum: f64 = values.iter().sum();
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let geo_mean = if values.iter().all(|&s| s > 0.0) {
            let log_sum: f64 = values.iter().map(|s| s.ln()).sum();
            Some((log_sum / n as f64).exp())
        } else {
            None
        };
        Self {
            n,
            mean: sum / n as f64,
            geo_mean,
            max,
            min,
        }
    }
}

/// Recompute the statistics of `s` from its values.
pub fn sequence_stats(s: &DelaySequence) -> SequenceStats {
    SequenceStats::compute(s.values())
}

/// A nonempty sequence of nonnegative delays with cached statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct DelaySequence {
    values: Vec<f64>,
    kind: DelayKind,
    stats: SequenceStats,
}

impl DelaySequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(BurstError::domain("delay sequence must be nonempty"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(BurstError::domain(format!(
                "delay {i} must be finite and nonnegative; got {v}"
            )));
        }
        let kind = if values.iter().all(|v| v.fract() == 0.0) {
            DelayKind::Integer
        } else {
            DelayKind::Real
        };
        let stats = SequenceStats::compute(&values);
        Ok(Self {
            values,
            kind,
            stats,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn kind(&self) -> DelayKind {
        self.kind
    }

    pub fn stats(&self) -> &SequenceStats {
        &self.stats
    }

    /// Fails unless every delay is strictly positive (exponential family).
    pub fn require_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0) {
            Some(i) => Err(BurstError::domain(format!(
                "delay {i} is zero; the exponential model is ill-defined with zero delays \
                 (shift the delays by a small amount or fix the change rate)"
            ))),
            None => Ok(()),
        }
    }

    /// Fails unless every delay is a whole number (geometric family).
    pub fn require_integer(&self) -> Result<()> {
        match self.values.iter().position(|v| v.fract() != 0.0) {
            Some(i) => Err(BurstError::domain(format!(
                "delay {i} = {} is not an integer; the geometric model needs integer delays",
                self.values[i]
            ))),
            None => Ok(()),
        }
    }

    /// A copy with `delta` added to every delay.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v + delta).collect())
    }
}

/// Burst levels ℓ₁..ℓₙ, each in `0..=k`. ℓ₀ = 0 is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelSequence {
    levels: Vec<usize>,
    k: usize,
}

impl LevelSequence {
    pub fn new(levels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&l) = levels.iter().find(|&&l| l > k) {
            return Err(BurstError::domain(format!("level {l} exceeds cap k = {k}")));
        }
        Ok(Self { levels, k })
    }

    pub fn flat(n: usize, k: usize) -> Self {
        Self {
            levels: vec![0; n],
            k,
        }
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Σ max(ℓᵢ − ℓᵢ₋₁, 0), the total number of level raises.
    pub fn total_rise(&self) -> usize {
        let mut prev = 0;
        let mut rise = 0;
        for &l in &self.levels {
            rise += l.saturating_sub(prev);
            prev = l;
        }
        rise
    }

    /// Σ ℓᵢ.
    pub fn level_sum(&self) -> usize {
        self.levels.iter().sum()
    }
}

/// Model family together with α, β, γ and the level cap k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurstParams {
    family: Family,
    alpha: f64,
    beta: f64,
    gamma: f64,
    k: usize,
}

impl BurstParams {
    pub fn new(family: Family, alpha: f64, beta: f64, gamma: f64, k: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(BurstError::domain(format!(
                "gamma must be > 0; got {gamma}"
            )));
        }
        match family {
            Family::Exp => {
                // α = 1 is admitted as the degenerate model where levels carry no signal.
                if !(alpha.is_finite() && alpha >= 1.0) {
                    return Err(BurstError::domain(format!(
                        "exponential change rate must satisfy alpha > 1; got {alpha}"
                    )));
                }
                if !(beta.is_finite() && beta > 0.0) {
                    return Err(BurstError::domain(format!(
                        "exponential base rate must be > 0; got {beta}"
                    )));
                }
                if !(beta * alpha.powi(k as i32)).is_finite() {
                    return Err(BurstError::domain("beta * alpha^k overflows"));
                }
            }
            Family::Geo => {
                if !(0.0..1.0).contains(&alpha) {
                    return Err(BurstError::domain(format!(
                        "geometric change rate must satisfy 0 <= alpha < 1; got {alpha}"
                    )));
                }
                if !(0.0..1.0).contains(&beta) {
                    return Err(BurstError::domain(format!(
                        "geometric base rate must satisfy 0 <= beta < 1; got {beta}"
                    )));
                }
            }
        }
        Ok(Self {
            family,
            alpha,
            beta,
            gamma,
            k,
        })
    }

    pub fn exp(alpha: f64, beta: f64, gamma: f64, k: usize) -> Result<Self> {
        Self::new(Family::Exp, alpha, beta, gamma, k)
    }

    pub fn geo(alpha: f64, beta: f64, gamma: f64, k: usize) -> Result<Self> {
        Self::new(Family::Geo, alpha, beta, gamma, k)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// β·α^level, with α⁰ = 1 even for α = 0.
    pub fn rate(&self, level: usize) -> f64 {
        self.beta * self.alpha.powi(level as i32)
    }

    /// Negative log-likelihood of delay `s` at `level`.
    pub(crate) fn cost(&self, s: f64, level: usize) -> f64 {
        let rate = self.rate(level);
        match self.family {
            Family::Exp => nll_exp(s, rate),
            Family::Geo => nll_geo(s, rate),
        }
    }
}

/// Solver bookkeeping attached to a [`Solution`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Candidate parameter values in the scan schedule.
    pub candidates: usize,
    /// Candidates skipped by refit pruning.
    pub skipped: usize,
    /// Outer (α) candidates, for the joint solvers.
    pub outer_candidates: usize,
    /// Terminal `(j, a, b)` cells of the exact solver tying with the optimum.
    pub tied_cells: Vec<(usize, usize, usize)>,
}

/// A level sequence with its fitted parameters and score.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub levels: LevelSequence,
    pub alpha: f64,
    pub beta: f64,
    pub score: f64,
    pub viterbi_calls: usize,
    pub diagnostics: Diagnostics,
}

impl Solution {
    /// The parameters this solution was scored under.
    pub fn params(&self, family: Family, gamma: f64) -> Result<BurstParams> {
        BurstParams::new(family, self.alpha, self.beta, gamma, self.levels.k())
    }
}

pub(crate) fn nll_exp(s: f64, rate: f64) -> f64 {
    s * rate - rate.ln()
}

pub(crate) fn nll_geo(s: f64, rate: f64) -> f64 {
    if rate == 0.0 {
        // 0·log 0 = 0
        if s == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if s == 0.0 {
        -(-rate).ln_1p()
    } else {
        -(-rate).ln_1p() - s * rate.ln()
    }
}

/// `−log p_exp(s; λ) = sλ − log λ`.
pub fn neg_loglik_exp(s: f64, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(BurstError::domain(format!(
            "exponential rate must be > 0; got {lambda}"
        )));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(BurstError::domain(format!("delay must be >= 0; got {s}")));
    }
    Ok(nll_exp(s, lambda))
}

/// `−log p_geo(s; λ) = −log(1 − λ) − s log λ`, with 0·log 0 = 0.
pub fn neg_loglik_geo(s: f64, lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(BurstError::domain(format!(
            "geometric rate must lie in [0, 1); got {lambda}"
        )));
    }
    if !(s.is_finite() && s >= 0.0 && s.fract() == 0.0) {
        return Err(BurstError::domain(format!(
            "geometric delay must be a nonnegative integer; got {s}"
        )));
    }
    Ok(nll_geo(s, lambda))
}

/// Transition cost `max(y − x, 0)·γ·log n`.
pub fn penalty(x: usize, y: usize, gamma: f64, n: usize) -> f64 {
    y.saturating_sub(x) as f64 * gamma * (n as f64).ln()
}

fn check_lengths(levels: &LevelSequence, s: &DelaySequence, p: &BurstParams) -> Result<()> {
    if levels.len() != s.len() {
        return Err(BurstError::LengthMismatch {
            expected: s.len(),
            actual: levels.len(),
        });
    }
    if levels.levels().iter().any(|&l| l > p.k()) {
        return Err(BurstError::domain(
            "level sequence exceeds the parameter cap k",
        ));
    }
    if p.family() == Family::Geo {
        s.require_integer()?;
    }
    Ok(())
}

/// Per-index contributions `−log p(sᵢ; βα^ℓᵢ) + τ(ℓᵢ₋₁, ℓᵢ)`.
pub fn score_terms(levels: &LevelSequence, s: &DelaySequence, p: &BurstParams) -> Result<Vec<f64>> {
    check_lengths(levels, s, p)?;
    let n = s.len();
    let mut prev = 0;
    Ok(levels
        .levels()
        .iter()
        .zip(s.values())
        .map(|(&l, &v)| {
            let term = p.cost(v, l) + penalty(prev, l, p.gamma(), n);
            prev = l;
            term
        })
        .collect())
}

/// Total burst score of `levels` on `s` under `p`.
pub fn score_total(levels: &LevelSequence, s: &DelaySequence, p: &BurstParams) -> Result<f64> {
    Ok(score_terms(levels, s, p)?.into_iter().sum())
}
