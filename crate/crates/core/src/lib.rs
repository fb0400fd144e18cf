//! Burst detection with optimized base and change rates.
//!
//! Delays between events are modelled with an exponential (real delays) or
//! geometric (integer delays) distribution whose rate is `β·α^ℓ` at burst
//! level `ℓ ∈ 0..=k`. Raising the level costs `γ log n` per step; lowering
//! it is free. For fixed `(α, β)` the optimal level sequence is a Viterbi
//! pass ([`viterbi`]); this crate additionally optimizes β, or both α and
//! β, with exact ([`exact`]) and (1 + ε)-approximate ([`approx_exp`],
//! [`approx_geo`]) solvers.
//!
//! ```
//! use burstopt::{exp_alpha, DelaySequence};
//!
//! let s = DelaySequence::new(vec![1.0, 1.2, 0.2, 0.1, 0.3, 1.1, 0.9]).unwrap();
//! let sol = exp_alpha(&s, 2.0, 1.0, 1, 0.05, true).unwrap();
//! assert_eq!(sol.levels.len(), 7);
//! ```

pub mod approx_exp;
pub mod approx_geo;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod model;
pub mod oracle;
pub mod synth;
pub mod viterbi;

pub use approx_exp::{
    approx_exp, exp_alpha, exp_mean, prune_scan, prune_scan_traced, refit_beta, PruneState,
};
pub use approx_geo::{approx_geo, geo_alpha, geo_mean, ScanSchedule};
pub use error::{BurstError, Result};
pub use exact::{solve_bndburst, solve_exp_alpha_exact, BndBurstTable};
pub use model::{
    neg_loglik_exp, neg_loglik_geo, penalty, score_terms, score_total, sequence_stats, BurstParams,
    DelayKind, DelaySequence, Diagnostics, Family, LevelSequence, SequenceStats, Solution,
};
pub use oracle::{brute_force_viterbi, grid_opt, GridOpt, GridSpec};
pub use synth::{generate, hamming, PlantSpec};
pub use viterbi::{backtrace, viterbi, viterbi_table, DpTable};

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(BurstError::Domain(format!(
            "epsilon must be > 0; got {epsilon}"
        )))
    }
}

/// Lowest score wins; equal scores go to the smaller `param`. The returned
/// solution carries the total Viterbi call count of all inputs.
pub(crate) fn best_of(
    solutions: Vec<Solution>,
    param: impl Fn(&Solution) -> f64,
) -> Option<Solution> {
    let calls = solutions.iter().map(|s| s.viterbi_calls).sum();
    let mut best = solutions.into_iter().reduce(|a, b| {
        if b.score < a.score || (b.score == a.score && param(&b) < param(&a)) {
            b
        } else {
            a
        }
    })?;
    best.viterbi_calls = calls;
    Some(best)
}
