//! (1 + ε)-approximations for the geometric model.
//!
//! [`geo_alpha`] fixes α and scans β over `η^c` for `η = μ/(μ + 1)`,
//! `c = 1, 1/(1+ε), 1/(1+ε)², …` until `η^c` passes `μ/(μ + 1/n)`; the
//! optimal β always lies in `[μ/(1 + μ), μ/(1/n + μ)]`, so some tested β′
//! satisfies `β*^(1+ε) ≤ β′ ≤ β*`, which costs at most a (1 + ε) factor.
//! [`approx_geo`] probes α = 0, then scans α the same way from `1/(1 + nk)`
//! up to `σ^(ε/k)` with `σ = μ/(μ + 1/n)`.

use rayon::prelude::*;

use crate::error::{BurstError, Result};
use crate::model::{BurstParams, DelaySequence, Diagnostics, LevelSequence, Solution};
use crate::viterbi::viterbi;
use crate::{best_of, check_epsilon};

/// Candidates `η^c` for `c = (1+ε)^{-r}`, `r = 0, 1, …`, while `η^c ≤ stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSchedule {
    base: f64,
    stop: f64,
    ratio: f64,
}

impl ScanSchedule {
    pub fn new(base: f64, stop: f64, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(base > 0.0 && base < 1.0) {
            return Err(BurstError::domain(format!(
                "scan base must lie in (0, 1); got {base}"
            )));
        }
        Ok(Self {
            base,
            stop,
            ratio: 1.0 + epsilon,
        })
    }

    /// Schedule for β at fixed α: `η = μ/(μ+1)`, stop `μ/(μ + 1/n)`.
    pub fn for_beta(stats_mean: f64, n: usize, epsilon: f64) -> Result<Self> {
        let mu = stats_mean;
        Self::new(mu / (mu + 1.0), mu / (mu + 1.0 / n as f64), epsilon)
    }

    /// Schedule for α: `η = 1/(1 + nk)`, stop `σ^(ε/k)` with `σ = μ/(μ + 1/n)`.
    pub fn for_alpha(stats_mean: f64, n: usize, k: usize, epsilon: f64) -> Result<Self> {
        let sigma = stats_mean / (stats_mean + 1.0 / n as f64);
        Self::new(
            1.0 / (1.0 + (n * k) as f64),
            sigma.powf(epsilon / k as f64),
            epsilon,
        )
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    /// Candidate values in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0i32..)
            .map(move |r| self.base.powf(self.ratio.powi(-r)))
            .take_while(move |&v| v <= self.stop)
    }

    pub fn candidates(&self) -> Vec<f64> {
        self.iter().collect()
    }
}

/// `⌈(ln ln(n+1) − ln ln 2) / ln(1+ε)⌉ + 1`.
///
/// This count is only an upper bound on the [`geo_alpha`] scan when μ is
/// close to `1/n`. The scan length grows with μ towards
/// [`geo_alpha_call_bound`]; see [`geo_alpha_candidate_count`].
pub fn geo_alpha_loglog_bound(n: usize, epsilon: f64) -> usize {
    let r = (((n + 1) as f64).ln().ln() - 2f64.ln().ln()) / epsilon.ln_1p();
    r.ceil() as usize + 1
}

/// Number of β candidates [`geo_alpha`] tests for mean `μ > 0`:
/// `⌊ln(ln(1 + 1/μ) / ln(1 + 1/(nμ))) / ln(1+ε)⌋ + 1`.
pub fn geo_alpha_candidate_count(mean: f64, n: usize, epsilon: f64) -> usize {
    let ratio = (1.0 / mean).ln_1p() / (1.0 / (n as f64 * mean)).ln_1p();
    (ratio.ln() / epsilon.ln_1p()).floor() as usize + 1
}

/// Upper bound on the number of β candidates of [`geo_alpha`] for any μ:
/// `⌈ln n / ln(1+ε)⌉ + 1`. The ratio inside [`geo_alpha_candidate_count`]
/// is at most `n` by concavity of `ln(1 + x)`.
pub fn geo_alpha_call_bound(n: usize, epsilon: f64) -> usize {
    ((n as f64).ln() / epsilon.ln_1p()).ceil() as usize + 1
}

/// Upper bound on the number of α candidates of [`approx_geo`], α = 0 probe included.
pub fn approx_geo_outer_bound(n: usize, mean: f64, k: usize, epsilon: f64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    ((kf.ln() + (1.0 + nf * mean).ln() - epsilon.ln() + (1.0 + nf * kf).ln().ln())
        / epsilon.ln_1p())
        + 2.0
}

fn validate_geo(s: &DelaySequence, alpha: f64, gamma: f64, k: usize, epsilon: f64) -> Result<()> {
    s.require_integer()?;
    check_epsilon(epsilon)?;
    // Validates α and γ.
    BurstParams::geo(alpha, 0.0, gamma, k)?;
    Ok(())
}

/// Geometric model with α given; β chosen from a (1 + ε) scan.
pub fn geo_alpha(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    epsilon: f64,
) -> Result<Solution> {
    validate_geo(s, alpha, gamma, k, epsilon)?;
    let st = s.stats();
    if st.mean == 0.0 {
        // All delays are zero: β = 0 makes every term vanish.
        return Ok(Solution {
            levels: LevelSequence::flat(s.len(), k),
            alpha,
            beta: 0.0,
            score: 0.0,
            viterbi_calls: 0,
            diagnostics: Diagnostics::default(),
        });
    }
    let schedule = ScanSchedule::for_beta(st.mean, s.len(), epsilon)?;
    let candidates = schedule.candidates();
    let solutions = candidates
        .par_iter()
        .map(|&beta| viterbi(s, &BurstParams::geo(alpha, beta, gamma, k)?))
        .collect::<Result<Vec<_>>>()?;
    let mut best = best_of(solutions, |sol| sol.beta).ok_or(BurstError::Infeasible)?;
    best.diagnostics.candidates = candidates.len();
    Ok(best)
}

/// Geometric model with both α and β chosen from (1 + ε) scans.
pub fn approx_geo(s: &DelaySequence, gamma: f64, k: usize, epsilon: f64) -> Result<Solution> {
    validate_geo(s, 0.0, gamma, k, epsilon)?;
    let st = s.stats();
    let mut alphas = vec![0.0];
    if k > 0 && st.mean > 0.0 {
        alphas.extend(ScanSchedule::for_alpha(st.mean, s.len(), k, epsilon)?.iter());
    }
    let solutions = alphas
        .par_iter()
        .map(|&alpha| geo_alpha(s, alpha, gamma, k, epsilon))
        .collect::<Result<Vec<_>>>()?;
    let candidates = solutions.iter().map(|sol| sol.diagnostics.candidates).sum();
    let mut best = best_of(solutions, |sol| sol.alpha).ok_or(BurstError::Infeasible)?;
    best.diagnostics = Diagnostics {
        candidates,
        outer_candidates: alphas.len(),
        ..Diagnostics::default()
    };
    Ok(best)
}

/// Baseline with β = μ/(μ + 1).
pub fn geo_mean(s: &DelaySequence, alpha: f64, gamma: f64, k: usize) -> Result<Solution> {
    s.require_integer()?;
    let mu = s.stats().mean;
    viterbi(s, &BurstParams::geo(alpha, mu / (mu + 1.0), gamma, k)?)
}
