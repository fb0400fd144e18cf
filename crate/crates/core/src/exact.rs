//! Exact solver for the exponential model with α given and β optimized.
//!
//! For a fixed level sequence the score is
//! `β f(L) − n log β − m log α + d γ log n` with `f(L) = Σ α^ℓᵢ sᵢ`,
//! `d` the total rise and `m` the level sum, and the best β is `n / f(L)`.
//! So for every reachable `(d, m)` pair it suffices to minimise `f(L)`,
//! which the budgeted DP `o[i, j, a, b]` does:
//!
//! ```text
//! o[i, j, a, b] = α^j sᵢ + min_{j'} o[i − 1, j', a − max(0, j − j'), b − j]
//! ```
//!
//! with `a ≤ ⌊k(n + 1)/2⌋` and `b ≤ kn`. Time O(n³k⁴), memory O(n³k³).

use crate::approx_exp::refit_beta;
use crate::error::{BurstError, Result};
use crate::model::{DelaySequence, Diagnostics, LevelSequence, Solution};

/// Default cap on the number of `(i, j, a, b)` cells.
pub const DEFAULT_MAX_CELLS: usize = 1 << 25;

/// The budgeted DP table with predecessor levels.
#[derive(Clone, Debug)]
pub struct BndBurstTable {
    n: usize,
    k: usize,
    max_rise: usize,
    max_sum: usize,
    o: Vec<f64>,
    back: Vec<u16>,
}

impl BndBurstTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Largest rise budget `a` stored, `⌊k(n + 1)/2⌋`.
    pub fn max_rise(&self) -> usize {
        self.max_rise
    }

    /// Largest level-sum budget `b` stored, `kn`.
    pub fn max_sum(&self) -> usize {
        self.max_sum
    }

    #[inline]
    fn index(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * (self.k + 1) + j) * (self.max_rise + 1) + a) * (self.max_sum + 1) + b
    }

    /// Minimal `Σ α^ℓₓ sₓ` over prefixes of length `i` ending at `j` with
    /// total rise `a` and level sum `b`; `+inf` when no prefix qualifies.
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        if j > self.k || a > self.max_rise || b > self.max_sum {
            return f64::INFINITY;
        }
        self.o[self.index(i, j, a, b)]
    }

    /// Level sequence realising cell `(n, j, a, b)`.
    pub fn reconstruct(&self, j: usize, a: usize, b: usize) -> Result<LevelSequence> {
        if !self.get(self.n, j, a, b).is_finite() {
            return Err(BurstError::Infeasible);
        }
        let (mut j, mut a, mut b) = (j, a, b);
        let mut levels = vec![0; self.n];
        for i in (1..=self.n).rev() {
            levels[i - 1] = j;
            let prev = self.back[self.index(i, j, a, b)] as usize;
            a -= j.saturating_sub(prev);
            b -= j;
            j = prev;
        }
        LevelSequence::new(levels, self.k)
    }
}

/// Fill the full budgeted table.
pub fn solve_bndburst(s: &DelaySequence, alpha: f64, k: usize) -> Result<BndBurstTable> {
    solve_bndburst_with_limit(s, alpha, k, DEFAULT_MAX_CELLS)
}

pub fn solve_bndburst_with_limit(
    s: &DelaySequence,
    alpha: f64,
    k: usize,
    max_cells: usize,
) -> Result<BndBurstTable> {
    s.require_positive()?;
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(BurstError::domain(format!(
            "alpha must be > 1; got {alpha}"
        )));
    }
    if k > u16::MAX as usize {
        return Err(BurstError::Capacity(format!("level cap {k} is too large")));
    }
    let n = s.len();
    let max_rise = k * (n + 1) / 2;
    let max_sum = k * n;
    let cells = (n + 1)
        .checked_mul(k + 1)
        .and_then(|c| c.checked_mul(max_rise + 1))
        .and_then(|c| c.checked_mul(max_sum + 1))
        .filter(|&c| c <= max_cells)
        .ok_or_else(|| {
            BurstError::Capacity(format!(
                "exact table for n = {n}, k = {k} exceeds {max_cells} cells"
            ))
        })?;

    let mut table = BndBurstTable {
        n,
        k,
        max_rise,
        max_sum,
        o: vec![f64::INFINITY; cells],
        back: vec![0; cells],
    };
    let start = table.index(0, 0, 0, 0);
    table.o[start] = 0.0;

    let powers: Vec<f64> = (0..=k).map(|j| alpha.powi(j as i32)).collect();
    for (i, &delay) in s.values().iter().enumerate().map(|(i, v)| (i + 1, v)) {
        // A prefix of length i has level sum at most i·k, and rise ≤ level sum.
        let sum_cap = max_sum.min(i * k);
        for (j, &power) in powers.iter().enumerate() {
            let weight = power * delay;
            for b in j..=sum_cap {
                for a in 0..=max_rise.min(b) {
                    let mut best = f64::INFINITY;
                    let mut from = 0usize;
                    for jp in 0..=k {
                        let rise = j.saturating_sub(jp);
                        if rise > a {
                            continue;
                        }
                        let v = table.o[table.index(i - 1, jp, a - rise, b - j)];
                        if v < best {
                            best = v;
                            from = jp;
                        }
                    }
                    if best.is_finite() {
                        let idx = table.index(i, j, a, b);
                        table.o[idx] = best + weight;
                        table.back[idx] = from as u16;
                    }
                }
            }
        }
    }
    Ok(table)
}

/// Exact optimum of the exponential model over levels and β, α fixed.
pub fn solve_exp_alpha_exact(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
) -> Result<Solution> {
    solve_exp_alpha_exact_with_limit(s, alpha, gamma, k, DEFAULT_MAX_CELLS)
}

pub fn solve_exp_alpha_exact_with_limit(
    s: &DelaySequence,
    alpha: f64,
    gamma: f64,
    k: usize,
    max_cells: usize,
) -> Result<Solution> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(BurstError::domain(format!(
            "gamma must be > 0; got {gamma}"
        )));
    }
    let table = solve_bndburst_with_limit(s, alpha, k, max_cells)?;
    let n = s.len();
    let nf = n as f64;
    let log_n = nf.ln();
    let log_alpha = alpha.ln();

    let closed_form = |f: f64, a: usize, b: usize| {
        let beta = nf / f;
        beta * f - nf * beta.ln() - b as f64 * log_alpha + a as f64 * gamma * log_n
    };

    let mut best: Option<(f64, (usize, usize, usize))> = None;
    let mut scored = Vec::new();
    for j in 0..=k {
        for a in 0..=table.max_rise() {
            for b in 0..=table.max_sum() {
                let f = table.get(n, j, a, b);
                if !f.is_finite() {
                    continue;
                }
                let score = closed_form(f, a, b);
                scored.push((score, (j, a, b)));
                if score < best.map_or(f64::INFINITY, |x| x.0) {
                    best = Some((score, (j, a, b)));
                }
            }
        }
    }
    let (score, (j, a, b)) = best.ok_or(BurstError::Infeasible)?;
    let tol = 1e-12 * score.abs().max(1.0);
    let tied_cells = scored
        .into_iter()
        .filter(|(v, _)| (v - score).abs() <= tol)
        .map(|(_, cell)| cell)
        .collect();

    let levels = table.reconstruct(j, a, b)?;
    let beta = refit_beta(s, &levels, alpha)?;
    Ok(Solution {
        levels,
        alpha,
        beta,
        score,
        viterbi_calls: 0,
        diagnostics: Diagnostics {
            tied_cells,
            ..Diagnostics::default()
        },
    })
}
