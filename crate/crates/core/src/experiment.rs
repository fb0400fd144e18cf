//! Planted-burst experiments comparing the fitted base rate against β = 1/μ.
//!
//! Each configuration (a burst length, or a sequence length) runs a number
//! of independent trials. Trial `t` of configuration `c` draws its sequence
//! from stream `(c << 32) | t` of the experiment seed. Both methods see the
//! same sequence and are scored by the L1 distance to the planted levels.

use rayon::prelude::*;

use crate::approx_exp::{exp_alpha, exp_mean};
use crate::error::Result;
use crate::synth::{generate, hamming, PlantSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// β optimized by the (1 + ε) scan.
    ExpAlpha,
    /// β = 1/μ.
    ExpMean,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExpAlpha => "exp_alpha",
            Method::ExpMean => "exp_mean",
        }
    }
}

/// Shared model and sampling settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialSettings {
    pub k: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Exponential rate outside the burst.
    pub base_rate: f64,
    /// Exponential rate inside the burst (higher rate, shorter delays).
    pub burst_rate: f64,
    pub seed: u64,
}

impl Default for TrialSettings {
    fn default() -> Self {
        Self {
            k: 1,
            alpha: 2.0,
            gamma: 1.0,
            epsilon: 0.05,
            base_rate: 1.0,
            burst_rate: 2.0,
            seed: 2016,
        }
    }
}

/// Fixed sequence length, varying burst length.
#[derive(Clone, Debug, PartialEq)]
pub struct BurstLengthExperiment {
    pub n: usize,
    pub burst_lengths: Vec<usize>,
    pub trials: usize,
    pub settings: TrialSettings,
}

impl Default for BurstLengthExperiment {
    fn default() -> Self {
        Self {
            n: 500,
            burst_lengths: (50..=250).step_by(10).collect(),
            trials: 100,
            settings: TrialSettings::default(),
        }
    }
}

/// Varying sequence length, burst length `n / 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceLengthExperiment {
    pub lengths: Vec<usize>,
    pub trials: usize,
    pub settings: TrialSettings,
}

impl Default for SequenceLengthExperiment {
    fn default() -> Self {
        Self {
            lengths: (50..=500).step_by(50).collect(),
            trials: 300,
            settings: TrialSettings::default(),
        }
    }
}

/// One method on one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub n: usize,
    pub burst_len: usize,
    pub trial: usize,
    pub stream: u64,
    pub method: Method,
    pub hamming: usize,
}

/// Per-configuration means.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub burst_len: usize,
    pub trials: usize,
    pub mean_exp_alpha: f64,
    pub mean_exp_mean: f64,
}

impl SummaryRow {
    pub fn normalized_exp_alpha(&self) -> f64 {
        self.mean_exp_alpha / self.n as f64
    }

    pub fn normalized_exp_mean(&self) -> f64 {
        self.mean_exp_mean / self.n as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Format with 12 significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

impl ExperimentReport {
    /// `seed  n  burst_len  trial  stream  method  hamming`, one row per method and trial.
    pub fn trials_tsv(&self) -> String {
        let mut out = String::from("seed\tn\tburst_len\ttrial\tstream\tmethod\thamming\n");
        for r in &self.trials {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                self.seed,
                r.n,
                r.burst_len,
                r.trial,
                r.stream,
                r.method.name(),
                r.hamming
            ));
        }
        out
    }

    /// Means and length-normalized means per configuration.
    pub fn summary_tsv(&self) -> String {
        let mut out = String::from(
            "n\tburst_len\ttrials\texp_alpha\texp_mean\texp_alpha_normalized\texp_mean_normalized\n",
        );
        for r in &self.summary {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.n,
                r.burst_len,
                r.trials,
                fmt_sig(r.mean_exp_alpha),
                fmt_sig(r.mean_exp_mean),
                fmt_sig(r.normalized_exp_alpha()),
                fmt_sig(r.normalized_exp_mean()),
            ));
        }
        out
    }
}

fn run_configs(
    configs: &[(usize, usize)],
    trials: usize,
    settings: &TrialSettings,
) -> Result<ExperimentReport> {
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();
    let per_trial = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (n, len) = configs[c];
            let stream = ((c as u64) << 32) | t as u64;
            let spec = PlantSpec::centered(
                n,
                len,
                settings.base_rate,
                settings.burst_rate,
                settings.seed,
            )
            .with_stream(stream);
            let (delays, truth) = generate(&spec)?;
            let fitted = exp_alpha(
                &delays,
                settings.alpha,
                settings.gamma,
                settings.k,
                settings.epsilon,
                false,
            )?;
            let baseline = exp_mean(&delays, settings.alpha, settings.gamma, settings.k)?;
            let record = |method, hamming| TrialRecord {
                n,
                burst_len: len,
                trial: t,
                stream,
                method,
                hamming,
            };
            Ok([
                record(Method::ExpAlpha, hamming(&fitted.levels, &truth)?),
                record(Method::ExpMean, hamming(&baseline.levels, &truth)?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = configs
        .iter()
        .enumerate()
        .map(|(c, &(n, len))| {
            let rows = &per_trial[c * trials..(c + 1) * trials];
            let mean = |m: usize| {
                rows.iter().map(|r| r[m].hamming as f64).sum::<f64>() / trials.max(1) as f64
            };
            SummaryRow {
                n,
                burst_len: len,
                trials,
                mean_exp_alpha: mean(0),
                mean_exp_mean: mean(1),
            }
        })
        .collect();
    Ok(ExperimentReport {
        seed: settings.seed,
        trials: per_trial.into_iter().flatten().collect(),
        summary,
    })
}

impl BurstLengthExperiment {
    pub fn run(&self) -> Result<ExperimentReport> {
        let configs: Vec<_> = self
            .burst_lengths
            .iter()
            .map(|&len| (self.n, len))
            .collect();
        run_configs(&configs, self.trials, &self.settings)
    }
}

impl SequenceLengthExperiment {
    pub fn run(&self) -> Result<ExperimentReport> {
        let configs: Vec<_> = self.lengths.iter().map(|&n| (n, n / 3)).collect();
        run_configs(&configs, self.trials, &self.settings)
    }
}
