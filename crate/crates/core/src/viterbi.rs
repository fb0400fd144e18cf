//! O(nk) Viterbi for fixed (α, β).
//!
//! Row `i` is filled from row `i - 1` through two helper arrays:
//! `a[j]`, the smallest-index argmin of `o[i-1, x]` over `x ≥ j` (descending
//! is free), and `b[j]`, the smallest-index argmin of `o[i-1, x] + τ(x, j)`
//! over `x ≤ j`. Since τ is linear in `j - x`, `b[j]` is either `j` or
//! `b[j-1]`, so both arrays cost O(k) per row. Ties always resolve toward
//! the smaller predecessor level, and the backtrace starts from the smallest
//! optimal terminal level.

use crate::error::{BurstError, Result};
use crate::model::{BurstParams, DelaySequence, Diagnostics, Family, LevelSequence, Solution};

/// Optimal prefix scores and back pointers, `(n + 1) × (k + 1)`.
#[derive(Clone, Debug)]
pub struct DpTable {
    n: usize,
    k: usize,
    o: Vec<f64>,
    back: Vec<usize>,
    cell_updates: usize,
}

impl DpTable {
    /// Build a table from raw rows; row 0 is the fixed start state.
    ///
    /// `scores[i]` and `back[i]` describe prefix length `i + 1`.
    pub fn from_rows(scores: Vec<Vec<f64>>, back: Vec<Vec<usize>>) -> Result<Self> {
        let n = scores.len();
        if n == 0 || back.len() != n {
            return Err(BurstError::domain(
                "table needs matching nonempty score and back rows",
            ));
        }
        let k = scores[0]
            .len()
            .checked_sub(1)
            .ok_or_else(|| BurstError::domain("empty row"))?;
        if scores.iter().any(|r| r.len() != k + 1)
            || back
                .iter()
                .any(|r| r.len() != k + 1 || r.iter().any(|&x| x > k))
        {
            return Err(BurstError::domain("ragged table rows"));
        }
        let mut table = Self::empty(n, k);
        for (i, (row, brow)) in scores.iter().zip(&back).enumerate() {
            table.o[(i + 1) * (k + 1)..(i + 2) * (k + 1)].copy_from_slice(row);
            table.back[i * (k + 1)..(i + 1) * (k + 1)].copy_from_slice(brow);
        }
        Ok(table)
    }

    fn empty(n: usize, k: usize) -> Self {
        let mut o = vec![f64::INFINITY; (n + 1) * (k + 1)];
        o[0] = 0.0;
        Self {
            n,
            k,
            o,
            back: vec![0; n * (k + 1)],
            cell_updates: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Optimal score of a length-`i` prefix ending at level `j`.
    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.o[i * (self.k + 1) + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.o[i * (self.k + 1)..(i + 1) * (self.k + 1)]
    }

    /// Predecessor level of cell `(i, j)`, for `i ≥ 1`.
    pub fn predecessor(&self, i: usize, j: usize) -> usize {
        self.back[(i - 1) * (self.k + 1) + j]
    }

    /// Number of `(i, j)` cells written by the forward pass.
    pub fn cell_updates(&self) -> usize {
        self.cell_updates
    }

    /// Smallest terminal level attaining the minimum, with its score.
    pub fn best_terminal(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (j, &v) in self.row(self.n).iter().enumerate() {
            if v < best.map_or(f64::INFINITY, |b| b.1) {
                best = Some((j, v));
            }
        }
        best
    }
}

/// Fill the DP table for `s` under fixed parameters.
pub fn viterbi_table(s: &DelaySequence, p: &BurstParams) -> Result<DpTable> {
    if p.family() == Family::Geo {
        s.require_integer()?;
    }
    let n = s.len();
    let k = p.k();
    let width = k + 1;
    let step = p.gamma() * (n as f64).ln();
    let rates: Vec<f64> = (0..=k).map(|j| p.rate(j)).collect();
    let mut table = DpTable::empty(n, k);
    let mut a = vec![0usize; width];
    let mut b = vec![0usize; width];

    for (i, &delay) in s.values().iter().enumerate() {
        let (done, rest) = table.o.split_at_mut((i + 1) * width);
        let prev = &done[i * width..];
        let cur = &mut rest[..width];

        a[k] = k;
        for j in (0..k).rev() {
            a[j] = if prev[j] <= prev[a[j + 1]] {
                j
            } else {
                a[j + 1]
            };
        }
        b[0] = 0;
        for j in 1..width {
            let carried = prev[b[j - 1]] + (j - b[j - 1]) as f64 * step;
            b[j] = if carried <= prev[j] { b[j - 1] } else { j };
        }

        let back = &mut table.back[i * width..(i + 1) * width];
        for j in 0..width {
            let down = prev[a[j]];
            let up = prev[b[j]] + (j - b[j]) as f64 * step;
            let (best, from) = if up <= down { (up, b[j]) } else { (down, a[j]) };
            let cost = match p.family() {
                Family::Exp => crate::model::nll_exp(delay, rates[j]),
                Family::Geo => crate::model::nll_geo(delay, rates[j]),
            };
            cur[j] = best + cost;
            back[j] = from;
            table.cell_updates += 1;
        }
    }
    Ok(table)
}

/// Follow back pointers from the smallest optimal terminal level.
pub fn backtrace(table: &DpTable) -> Result<LevelSequence> {
    let (mut j, v) = table.best_terminal().ok_or(BurstError::Infeasible)?;
    if !v.is_finite() {
        return Err(BurstError::Infeasible);
    }
    let mut levels = vec![0; table.n()];
    for i in (1..=table.n()).rev() {
        levels[i - 1] = j;
        j = table.predecessor(i, j);
    }
    LevelSequence::new(levels, table.k())
}

/// Optimal level sequence for fixed (α, β).
pub fn viterbi(s: &DelaySequence, p: &BurstParams) -> Result<Solution> {
    let table = viterbi_table(s, p)?;
    let levels = backtrace(&table)?;
    let (_, score) = table.best_terminal().ok_or(BurstError::Infeasible)?;
    Ok(Solution {
        levels,
        alpha: p.alpha(),
        beta: p.beta(),
        score,
        viterbi_calls: 1,
        diagnostics: Diagnostics::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::score_total;

    fn enumerate(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
        let total = (k + 1).pow(n as u32);
        (0..total).map(move |mut code| {
            let mut v = vec![0; n];
            for slot in v.iter_mut() {
                *slot = code % (k + 1);
                code /= k + 1;
            }
            v
        })
    }

    #[test]
    fn huge_gamma_forces_flat() {
        let s = DelaySequence::new(vec![1.0; 4]).unwrap();
        let p = BurstParams::exp(2.0, 1.0, 10.0, 2).unwrap();
        let sol = viterbi(&s, &p).unwrap();
        assert_eq!(sol.levels.levels(), &[0, 0, 0, 0]);
        assert_eq!(sol.viterbi_calls, 1);
    }

    #[test]
    fn single_delay_matches_enumeration() {
        for (s, p) in [
            (vec![1.0], BurstParams::exp(2.0, 1.0, 1.0, 3).unwrap()),
            (vec![0.1], BurstParams::exp(2.0, 1.0, 1.0, 3).unwrap()),
            (vec![1.0], BurstParams::geo(0.5, 0.6, 1.0, 3).unwrap()),
        ] {
            let s = DelaySequence::new(s).unwrap();
            let sol = viterbi(&s, &p).unwrap();
            let best = (0..=3)
                .map(|l| {
                    let l = LevelSequence::new(vec![l], 3).unwrap();
                    (score_total(&l, &s, &p).unwrap(), l)
                })
                .fold(None::<(f64, LevelSequence)>, |acc, c| match acc {
                    Some(a) if a.0 <= c.0 => Some(a),
                    _ => Some(c),
                })
                .unwrap();
            assert_eq!(sol.levels, best.1);
            assert!((sol.score - best.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geo_n8_matches_enumeration() {
        let s = DelaySequence::new(vec![3.0, 0.0, 1.0, 5.0, 0.0, 0.0, 2.0, 4.0]).unwrap();
        let p = BurstParams::geo(0.5, 0.6, 0.2, 2).unwrap();
        let sol = viterbi(&s, &p).unwrap();
        let brute = enumerate(8, 2)
            .map(|l| score_total(&LevelSequence::new(l, 2).unwrap(), &s, &p).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(enumerate(8, 2).count(), 6561);
        assert!((sol.score - brute).abs() <= 1e-9 * brute.abs().max(1.0));
    }

    #[test]
    fn boundary_rows() {
        let s = DelaySequence::new(vec![1.0, 2.0]).unwrap();
        let p = BurstParams::exp(2.0, 0.5, 1.0, 2).unwrap();
        let t = viterbi_table(&s, &p).unwrap();
        assert_eq!(t.score(0, 0), 0.0);
        assert!(t.score(0, 1).is_infinite() && t.score(0, 2).is_infinite());
        assert_eq!(t.cell_updates(), 2 * 3);
    }

    #[test]
    fn infeasible_everywhere() {
        // β = 0 at every level leaves a positive delay impossible.
        let s = DelaySequence::new(vec![1.0]).unwrap();
        let p = BurstParams::geo(0.5, 0.0, 1.0, 1).unwrap();
        assert_eq!(viterbi(&s, &p).unwrap_err(), BurstError::Infeasible);
    }

    #[test]
    fn backtrace_prefers_smaller_terminal() {
        let t = DpTable::from_rows(vec![vec![0.5, 0.5, 2.0]], vec![vec![0, 0, 0]]).unwrap();
        assert_eq!(backtrace(&t).unwrap().levels(), &[0]);

        let t = DpTable::from_rows(
            vec![vec![1.0, 2.0], vec![3.0, 1.5]],
            vec![vec![0, 0], vec![0, 0]],
        )
        .unwrap();
        assert_eq!(backtrace(&t).unwrap().levels(), &[0, 1]);

        let t = DpTable::from_rows(vec![vec![f64::INFINITY; 2]], vec![vec![0, 0]]).unwrap();
        assert_eq!(backtrace(&t).unwrap_err(), BurstError::Infeasible);
    }
}
