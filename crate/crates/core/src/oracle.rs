//! Reference solvers for tests: exhaustive enumeration and parameter grids.
//!
//! Neither touches the DP path it is meant to check. [`brute_force_viterbi`]
//! scores every level sequence with [`score_total`]; [`grid_opt`] minimises
//! Viterbi scores over an (α, β) grid and is the reference for the
//! approximation ratios.

use rayon::prelude::*;

use crate::error::{BurstError, Result};
use crate::model::{
    score_total, BurstParams, DelaySequence, Diagnostics, Family, LevelSequence, Solution,
};
use crate::viterbi::viterbi;

/// Largest number of level sequences [`brute_force_viterbi`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 10_000_000;

/// Exact minimiser by enumerating all `(k + 1)ⁿ` level sequences.
///
/// Sequences are visited with ℓₙ as the most significant digit, and a later
/// sequence only replaces the incumbent when it is better by more than a
/// relative 1e-12. Among optimal sequences this picks the one with the
/// smallest ℓₙ, then the smallest ℓₙ₋₁, and so on, which is the sequence the
/// Viterbi backtrace returns.
pub fn brute_force_viterbi(s: &DelaySequence, p: &BurstParams) -> Result<Solution> {
    let n = s.len();
    let base = p.k() + 1;
    let total = u32::try_from(n)
        .ok()
        .and_then(|n| base.checked_pow(n))
        .filter(|&t| t <= BRUTE_FORCE_LIMIT)
        .ok_or_else(|| {
            BurstError::Capacity(format!(
                "{base}^{n} level sequences exceed the enumeration limit"
            ))
        })?;

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut levels = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in levels.iter_mut().rev() {
            *slot = c % base;
            c /= base;
        }
        let candidate = LevelSequence::new(levels.clone(), p.k())?;
        let score = score_total(&candidate, s, p)?;
        let replace = match &best {
            None => score < f64::INFINITY,
            Some((b, _)) => score < b - 1e-12 * b.abs().max(1.0),
        };
        if replace {
            best = Some((score, levels.clone()));
        }
    }
    let (score, levels) = best.ok_or(BurstError::Infeasible)?;
    Ok(Solution {
        levels: LevelSequence::new(levels, p.k())?,
        alpha: p.alpha(),
        beta: p.beta(),
        score,
        viterbi_calls: 0,
        diagnostics: Diagnostics {
            candidates: total,
            ..Diagnostics::default()
        },
    })
}

const GEO_ALPHA_CEILING: f64 = 0.999;

/// Which α values the grid covers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaGrid {
    /// Only this α.
    Fixed(f64),
    /// exp: log-uniform over `[1, Ω/ω]`; geo: `{0}` plus uniform over
    /// `[1/(1 + nk), 0.999]`.
    Scan,
}

/// Grid shape and stopping rule for [`grid_opt`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub alpha: AlphaGrid,
    pub beta_points: usize,
    pub alpha_points: usize,
    /// Stop once two successive refinements differ by at most this much
    /// (relative to `max(1, |score|)`).
    pub tolerance: f64,
    pub max_rounds: usize,
}

impl GridSpec {
    pub fn fixed_alpha(alpha: f64, beta_points: usize) -> Self {
        Self {
            alpha: AlphaGrid::Fixed(alpha),
            beta_points,
            alpha_points: 1,
            tolerance: 1e-6,
            max_rounds: 8,
        }
    }

    pub fn joint(alpha_points: usize, beta_points: usize) -> Self {
        Self {
            alpha: AlphaGrid::Scan,
            beta_points,
            alpha_points,
            tolerance: 1e-6,
            max_rounds: 6,
        }
    }
}

/// Best grid point found.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOpt {
    pub score: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Viterbi evaluations over all rounds.
    pub evaluations: usize,
    pub rounds: usize,
    /// Whether the last two rounds agreed within the tolerance.
    pub converged: bool,
}

fn uniform(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 || hi <= lo {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn log_uniform(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 || hi <= lo {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

fn alpha_values(
    s: &DelaySequence,
    family: Family,
    k: usize,
    spec: &GridSpec,
    points: usize,
) -> Vec<f64> {
    match (spec.alpha, family) {
        (AlphaGrid::Fixed(a), _) => vec![a],
        (AlphaGrid::Scan, Family::Exp) => {
            let st = s.stats();
            log_uniform(1.0, (st.max / st.min).max(1.0), points)
        }
        (AlphaGrid::Scan, Family::Geo) if k == 0 => vec![0.0],
        (AlphaGrid::Scan, Family::Geo) => {
            let lo = 1.0 / (1.0 + (s.len() * k) as f64);
            let mut v = vec![0.0];
            v.extend(uniform(lo, GEO_ALPHA_CEILING, points));
            v
        }
    }
}

fn beta_values(s: &DelaySequence, family: Family, alpha: f64, k: usize, points: usize) -> Vec<f64> {
    let mu = s.stats().mean;
    match family {
        Family::Exp => log_uniform(1.0 / (alpha.powi(k as i32) * mu), 1.0 / mu, points),
        Family::Geo => {
            let n = s.len() as f64;
            uniform(mu / (1.0 + mu), mu / (1.0 / n + mu), points)
        }
    }
}

fn grid_round(
    s: &DelaySequence,
    family: Family,
    gamma: f64,
    k: usize,
    spec: &GridSpec,
    alpha_points: usize,
    beta_points: usize,
) -> Result<(f64, f64, f64, usize)> {
    let pairs: Vec<(f64, f64)> = alpha_values(s, family, k, spec, alpha_points)
        .into_iter()
        .flat_map(|a| {
            beta_values(s, family, a, k, beta_points)
                .into_iter()
                .map(move |b| (a, b))
        })
        .collect();
    let scores = pairs
        .par_iter()
        .map(|&(a, b)| {
            let p = BurstParams::new(family, a, b, gamma, k)?;
            match viterbi(s, &p) {
                Ok(sol) => Ok(sol.score),
                Err(BurstError::Infeasible) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let (i, score) =
        scores.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    Ok((score, pairs[i].0, pairs[i].1, pairs.len()))
}

/// Minimum Viterbi score over an (α, β) grid, refined until stable.
///
/// β ranges over the interval known to contain the optimal base rate for
/// each α. Each refinement doubles the grid resolution while keeping the
/// previous points, so the reported score never increases between rounds.
pub fn grid_opt(
    s: &DelaySequence,
    family: Family,
    gamma: f64,
    k: usize,
    spec: &GridSpec,
) -> Result<GridOpt> {
    match family {
        Family::Exp => s.require_positive()?,
        Family::Geo => s.require_integer()?,
    }
    if family == Family::Geo && s.stats().mean == 0.0 {
        return Ok(GridOpt {
            score: 0.0,
            alpha: 0.0,
            beta: 0.0,
            evaluations: 0,
            rounds: 0,
            converged: true,
        });
    }
    let mut alpha_points = spec.alpha_points.max(1);
    let mut beta_points = spec.beta_points.max(2);
    let (mut score, mut alpha, mut beta, mut evaluations) =
        grid_round(s, family, gamma, k, spec, alpha_points, beta_points)?;
    let mut rounds = 1;
    let mut converged = false;
    while rounds < spec.max_rounds {
        if matches!(spec.alpha, AlphaGrid::Scan) {
            alpha_points = 2 * alpha_points - 1;
        }
        beta_points = 2 * beta_points - 1;
        let (next, a, b, evals) = grid_round(s, family, gamma, k, spec, alpha_points, beta_points)?;
        evaluations += evals;
        rounds += 1;
        let settled = (score - next).abs() <= spec.tolerance * next.abs().max(1.0);
        if next < score {
            score = next;
            alpha = a;
            beta = b;
        }
        if settled {
            converged = true;
            break;
        }
    }
    Ok(GridOpt {
        score,
        alpha,
        beta,
        evaluations,
        rounds,
        converged,
    })
}
