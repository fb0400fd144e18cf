//! Approximations for the exponential model.
//!
//! [`exp_alpha`] scans `βᵢ = μ⁻¹(1+ε)⁻ⁱ` down to `1/(α^k μ)`; the optimal β
//! always lies in that range, so the best tested candidate is within a
//! (1 + ε) factor of the optimum once scores are shifted by `ψ = n log g`.
//! [`approx_exp`] wraps it in a scan over α from `Ω/ω` down to 1 with step
//! `(1+ε)^(1/2k)`, calling the inner scan at ε/2.
//!
//! [`prune_scan`] is the refit speed-up: after testing βᵢ with optimal
//! levels L, the optimum of the α-fixed problem cannot lie strictly between
//! βᵢ and `β′ = n / Σ sᵢ α^ℓᵢ`, so candidates in that open interval are
//! skipped, bar the one nearest β′ (see [`PruneState::skip_between`]). Candidates are visited in the order `0, 2ᵐ, 2·2ᵐ, …` and then
//! with the stride halved each round, down to stride 1.

use rayon::prelude::*;

use crate::error::{BurstError, Result};
use crate::model::{BurstParams, DelaySequence, Diagnostics, LevelSequence, Solution};
use crate::viterbi::viterbi;
use crate::{best_of, check_epsilon};

/// `β′ = n / Σ sᵢ α^ℓᵢ`, the best base rate for a fixed level sequence.
pub fn refit_beta(s: &DelaySequence, levels: &LevelSequence, alpha: f64) -> Result<f64> {
    if levels.len() != s.len() {
        return Err(BurstError::LengthMismatch {
            expected: s.len(),
            actual: levels.len(),
        });
    }
    let weighted: f64 = s
        .values()
        .iter()
        .zip(levels.levels())
        .map(|(&v, &l)| v * alpha.powi(l as i32))
        .sum();
    if weighted.is_nan() || weighted <= 0.0 {
        return Err(BurstError::domain(
            "refit needs a positive weighted delay sum",
        ));
    }
    Ok(s.len() as f64 / weighted)
}

/// The β candidates of [`exp_alpha`], in decreasing order.
pub fn beta_ladder(mean: f64, alpha: f64, k: usize, epsilon: f64) -> Vec<f64> {
    let top = 1.0 / mean;
    let floor = top / alpha.powi(k as i32);
    let ratio = 1.0 + epsilon;
    (0i32..)
        .map(|i| top * ratio.powi(-i))
        .take_while(|&b| b >= floor)
        .collect()
}

/// `⌈k log α / log(1 + ε)⌉ + 1`.
pub fn exp_alpha_call_bound(alpha: f64, k: usize, epsilon: f64) -> usize {
    (k as f64 * alpha.ln() / epsilon.ln_1p()).ceil() as usize + 1
}

/// `2k log(Ω/ω) / log(1 + ε) + 1`.
pub fn approx_exp_outer_bound(max_over_min: f64, k: usize, epsilon: f64) -> f64 {
    2.0 * k as f64 * max_over_min.ln() / epsilon.ln_1p() + 1.0
}

fn validate_exp(s: &DelaySequence, gamma: f64, k: usize, epsilon: f64) -> Result<()> {
    s.require_positive()?;
    check_epsilon(epsilon)?;
    BurstParams::exp(1.0, 1.0, gamma, k)?;
    Ok(())
}

fn check_change_rate(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 {
        Ok(())
    } else {
        Err(BurstError::domain(format!(
            "exponential change rate must satisfy alpha > 1; got {alpha}"
        )))
    }
}

/// Exponential model with α given; β chosen from a (1 + ε) scan.
pub fn exp_alpha(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    epsilon: f64,
    prune: bool,
) -> Result<Solution> {
    check_change_rate(alpha)?;
    validate_exp(s, gamma, k, epsilon)?;
    scan_exp(s, alpha, gamma, k, epsilon, prune)
}

/// The β scan behind [`exp_alpha`]; also accepts the degenerate α = 1.
fn scan_exp(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    epsilon: f64,
    prune: bool,
) -> Result<Solution> {
    let candidates = beta_ladder(s.stats().mean, alpha, k, epsilon);
    if prune {
        return run_pruned(s, alpha, gamma, k, candidates).map(|(sol, _)| sol);
    }
    let solutions = candidates
        .par_iter()
        .map(|&beta| viterbi(s, &BurstParams::exp(alpha, beta, gamma, k)?))
        .collect::<Result<Vec<_>>>()?;
    let mut best = best_of(solutions, |sol| sol.beta).ok_or(BurstError::Infeasible)?;
    best.diagnostics.candidates = candidates.len();
    Ok(best)
}

/// Visit/skip bookkeeping for the refit-pruned β scan.
#[derive(Clone, Debug)]
pub struct PruneState {
    candidates: Vec<f64>,
    visited: Vec<bool>,
    skipped: Vec<bool>,
}

impl PruneState {
    /// `candidates` must be strictly decreasing.
    pub fn new(candidates: Vec<f64>) -> Self {
        let t = candidates.len();
        Self {
            candidates,
            visited: vec![false; t],
            skipped: vec![false; t],
        }
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn is_visited(&self, i: usize) -> bool {
        self.visited[i]
    }

    pub fn is_skipped(&self, i: usize) -> bool {
        self.skipped[i]
    }

    pub fn visited_count(&self) -> usize {
        self.visited.iter().filter(|&&v| v).count()
    }

    pub fn skipped_count(&self) -> usize {
        self.skipped.iter().filter(|&&v| v).count()
    }

    pub fn mark_visited(&mut self, i: usize) {
        self.visited[i] = true;
    }

    /// Whether candidate `i` still needs a test.
    pub fn is_pending(&self, i: usize) -> bool {
        !self.visited[i] && !self.skipped[i]
    }

    /// Skip the unvisited candidates strictly between `tested` and `refit`,
    /// except the one closest to `refit`.
    ///
    /// The continuous optimum is never inside the open interval, but the best
    /// candidate can be: the envelope score is monotone on the interval and
    /// smallest at the `refit` end, so the candidate next to `refit` is kept.
    pub fn skip_between(&mut self, tested: f64, refit: f64) {
        let (lo, hi) = if tested < refit {
            (tested, refit)
        } else {
            (refit, tested)
        };
        let start = self.candidates.partition_point(|&c| c >= hi);
        let end = self.candidates.partition_point(|&c| c > lo);
        if start >= end {
            return;
        }
        // Candidates decrease, so the one nearest `refit` sits at an end.
        let keep = if refit >= tested { start } else { end - 1 };
        for i in (start..end).filter(|&i| i != keep) {
            if !self.visited[i] {
                self.skipped[i] = true;
            }
        }
    }

    /// `0, 2ᵐ, 2·2ᵐ, …, then 2ᵐ⁻¹, 3·2ᵐ⁻¹, …, then 1, 3, 5, …`, each index once;
    /// `m` is the largest integer with `2ᵐ ≤ t`.
    pub fn traversal_order(t: usize) -> Vec<usize> {
        if t == 0 {
            return Vec::new();
        }
        let mut stride = 1usize << (usize::BITS - 1 - t.leading_zeros());
        let mut seen = vec![false; t];
        let mut order = Vec::with_capacity(t);
        loop {
            for i in (0..t).step_by(stride) {
                if !seen[i] {
                    seen[i] = true;
                    order.push(i);
                }
            }
            if stride == 1 {
                break;
            }
            stride /= 2;
        }
        order
    }
}

fn run_pruned(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    candidates: Vec<f64>,
) -> Result<(Solution, PruneState)> {
    let t = candidates.len();
    let mut state = PruneState::new(candidates);
    let mut best: Option<Solution> = None;
    for i in PruneState::traversal_order(t) {
        if !state.is_pending(i) {
            continue;
        }
        let beta = state.candidates()[i];
        let sol = viterbi(s, &BurstParams::exp(alpha, beta, gamma, k)?)?;
        state.mark_visited(i);
        let refit = refit_beta(s, &sol.levels, alpha)?;
        state.skip_between(beta, refit);
        let better = match &best {
            None => true,
            Some(b) => sol.score < b.score || (sol.score == b.score && sol.beta < b.beta),
        };
        if better {
            best = Some(sol);
        }
    }
    let mut best = best.ok_or(BurstError::Infeasible)?;
    best.viterbi_calls = state.visited_count();
    best.diagnostics = Diagnostics {
        candidates: t,
        skipped: state.skipped_count(),
        ..Diagnostics::default()
    };
    Ok((best, state))
}

/// The refit-pruned version of [`exp_alpha`].
pub fn prune_scan(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    epsilon: f64,
) -> Result<Solution> {
    exp_alpha(s, alpha, gamma, k, epsilon, true)
}

/// [`prune_scan`] together with its final visit/skip flags.
pub fn prune_scan_traced(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    epsilon: f64,
) -> Result<(Solution, PruneState)> {
    check_change_rate(alpha)?;
    validate_exp(s, gamma, k, epsilon)?;
    run_pruned(
        s,
        alpha,
        gamma,
        k,
        beta_ladder(s.stats().mean, alpha, k, epsilon),
    )
}

/// Exponential model with both α and β chosen from scans.
pub fn approx_exp(
    s: &DelaySequence,
    gamma: f64,
    k: usize,
    epsilon: f64,
    prune: bool,
) -> Result<Solution> {
    validate_exp(s, gamma, k, epsilon)?;
    let st = s.stats();
    let top = st.max / st.min;
    let alphas: Vec<f64> = if k == 0 {
        vec![top]
    } else {
        let step = epsilon.ln_1p() / (2 * k) as f64;
        (0i32..)
            .map(|i| top * (-(i as f64) * step).exp())
            .take_while(|&a| a >= 1.0)
            .collect()
    };
    let inner_eps = epsilon / 2.0;
    let solutions = alphas
        .par_iter()
        .map(|&alpha| scan_exp(s, alpha, gamma, k, inner_eps, prune))
        .collect::<Result<Vec<_>>>()?;
    let candidates = solutions.iter().map(|sol| sol.diagnostics.candidates).sum();
    let skipped = solutions.iter().map(|sol| sol.diagnostics.skipped).sum();
    let mut best = best_of(solutions, |sol| sol.alpha).ok_or(BurstError::Infeasible)?;
    best.diagnostics = Diagnostics {
        candidates,
        skipped,
        outer_candidates: alphas.len(),
        ..Diagnostics::default()
    };
    Ok(best)
}

/// Baseline with β = 1/μ.
pub fn exp_mean(s: &DelaySequence, alpha: f64, gamma: f64, k: usize) -> Result<Solution> {
    let mu = s.stats().mean;
    if mu <= 0.0 {
        return Err(BurstError::domain("mean delay must be positive"));
    }
    viterbi(s, &BurstParams::exp(alpha, 1.0 / mu, gamma, k)?)
}
