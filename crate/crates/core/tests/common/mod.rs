//! Oracles and instance generators shared by the integration tests.
//!
//! Nothing here calls the library's scoring or DP code: likelihoods and
//! penalties are written out again, and optima come from enumerating every
//! level sequence with the rate parameters minimised per sequence.

#![allow(dead_code)]

use burstopt::{BurstParams, DelaySequence, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if !(a.is_finite() && b.is_finite()) {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn nll_exp(s: f64, rate: f64) -> f64 {
    s * rate - rate.ln()
}

pub fn nll_geo(s: f64, rate: f64) -> f64 {
    if rate == 0.0 {
        return if s == 0.0 { 0.0 } else { f64::INFINITY };
    }
    -(1.0 - rate).ln() - s * rate.ln()
}

/// `α^ℓ` with `0^0 = 1`.
pub fn power(alpha: f64, level: usize) -> f64 {
    (0..level).fold(1.0, |acc, _| acc * alpha)
}

pub fn rise(levels: &[usize]) -> usize {
    let mut prev = 0;
    let mut d = 0;
    for &l in levels {
        d += l.saturating_sub(prev);
        prev = l;
    }
    d
}

pub fn score(
    levels: &[usize],
    s: &[f64],
    family: Family,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> f64 {
    let n = s.len() as f64;
    let lik: f64 = levels
        .iter()
        .zip(s)
        .map(|(&l, &v)| {
            let rate = beta * power(alpha, l);
            match family {
                Family::Exp => nll_exp(v, rate),
                Family::Geo => nll_geo(v, rate),
            }
        })
        .sum();
    lik + rise(levels) as f64 * gamma * n.ln()
}

/// Every level sequence in `[0, k]ⁿ`.
pub fn all_levels(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=k).map(move |l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// Minimum score at fixed parameters and the sequence the shared
/// tie-break picks: among optimal sequences, compare `ℓₙ` first, then
/// `ℓₙ₋₁`, and so on.
pub fn enumerate_min(s: &[f64], p: &BurstParams) -> (f64, Vec<usize>) {
    let scored: Vec<(f64, Vec<usize>)> = all_levels(s.len(), p.k())
        .into_iter()
        .map(|l| (score(&l, s, p.family(), p.alpha(), p.beta(), p.gamma()), l))
        .collect();
    let best = scored.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let pick = scored
        .into_iter()
        .filter(|(v, _)| rel_close(*v, best, 1e-12))
        .min_by(|a, b| a.1.iter().rev().cmp(b.1.iter().rev()))
        .map(|x| x.1)
        .unwrap_or_default();
    (best, pick)
}

/// Golden-section minimum of a convex function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let ends = [(f(lo), lo), (f(hi), hi), (f1, x1), (f2, x2)];
    let (v, x) = ends
        .into_iter()
        .fold((f64::INFINITY, lo), |a, b| if b.0 < a.0 { b } else { a });
    (x, v)
}

/// Exponential optimum over β for one level sequence: `β = n / Σ sᵢα^ℓᵢ`.
pub fn exp_best_for_levels(levels: &[usize], s: &[f64], alpha: f64, gamma: f64) -> (f64, f64) {
    let n = s.len() as f64;
    let f: f64 = levels
        .iter()
        .zip(s)
        .map(|(&l, &v)| v * power(alpha, l))
        .sum();
    let beta = n / f;
    (score(levels, s, Family::Exp, alpha, beta, gamma), beta)
}

/// Exact optimum of the exponential model at fixed α: `(score, β)`.
pub fn exp_opt_fixed_alpha(s: &[f64], alpha: f64, gamma: f64, k: usize) -> (f64, f64) {
    all_levels(s.len(), k)
        .iter()
        .map(|l| exp_best_for_levels(l, s, alpha, gamma))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
}

/// Optimum of the exponential model over α ≥ 1 and β > 0.
///
/// With β at its stationary value the score of a fixed sequence is
/// `n + n ln(Σ sᵢ e^{ℓᵢ t} / n) − t Σ ℓᵢ + dγ ln n` for `t = ln α`, which is
/// convex in `t`.
pub fn exp_opt_joint(s: &[f64], gamma: f64, k: usize) -> f64 {
    let n = s.len() as f64;
    let omega = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let big = s.iter().cloned().fold(0.0, f64::max);
    let t_hi = 2.0 * (big / omega).ln() + 2.0;
    all_levels(s.len(), k)
        .iter()
        .map(|l| {
            let m: usize = l.iter().sum();
            let pen = rise(l) as f64 * gamma * n.ln();
            let g = |t: f64| {
                let f: f64 = l
                    .iter()
                    .zip(s)
                    .map(|(&x, &v)| v * (x as f64 * t).exp())
                    .sum();
                n + n * (f / n).ln() - t * m as f64 + pen
            };
            golden_min(g, 0.0, t_hi).1
        })
        .fold(f64::INFINITY, f64::min)
}

/// Optimum of the geometric model at fixed α: `(score, β)`.
///
/// For one sequence the score is convex in `ln β`.
pub fn geo_opt_fixed_alpha(s: &[f64], alpha: f64, gamma: f64, k: usize) -> (f64, f64) {
    if s.iter().all(|&v| v == 0.0) {
        return (0.0, 0.0);
    }
    all_levels(s.len(), k)
        .iter()
        .map(|l| {
            let f = |u: f64| score(l, s, Family::Geo, alpha, u.exp(), gamma);
            let (u, v) = golden_min(f, -60.0, -1e-12);
            (v, u.exp())
        })
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
}

pub fn real_delays(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn integer_delays(rng: &mut ChaCha8Rng, n: usize, max: u32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0..=max) as f64).collect()
}

pub fn seq(values: Vec<f64>) -> DelaySequence {
    DelaySequence::new(values).unwrap()
}

/// Random valid parameters for either family.
pub fn random_params(rng: &mut ChaCha8Rng, family: Family, k: usize) -> BurstParams {
    let gamma = rng.gen_range(0.05..2.0);
    match family {
        Family::Exp => {
            BurstParams::exp(rng.gen_range(1.05..4.0), rng.gen_range(0.1..3.0), gamma, k)
        }
        Family::Geo => {
            let alpha = if rng.gen_bool(0.15) {
                0.0
            } else {
                rng.gen_range(0.05..0.95)
            };
            BurstParams::geo(alpha, rng.gen_range(0.0..0.95), gamma, k)
        }
    }
    .unwrap()
}
