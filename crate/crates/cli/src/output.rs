use std::fs;
use std::path::Path;

use burstopt::experiment::fmt_sig;
use serde::Serialize;

use crate::error::CliError;

/// A maximal run of equal levels covering `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentRun {
    pub start: usize,
    pub end: usize,
    pub level: usize,
}

pub fn segments(levels: &[usize]) -> Vec<SegmentRun> {
    let mut runs: Vec<SegmentRun> = Vec::new();
    for (i, &level) in levels.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if run.level == level => run.end = i + 1,
            _ => runs.push(SegmentRun {
                start: i,
                end: i + 1,
                level,
            }),
        }
    }
    runs
}

pub fn levels_tsv(levels: &[usize]) -> String {
    let mut out = String::from("index\tlevel\n");
    for (i, l) in levels.iter().enumerate() {
        out.push_str(&format!("{i}\t{l}\n"));
    }
    out
}

pub fn segments_tsv(runs: &[SegmentRun]) -> String {
    let mut out = String::from("start\tend\tlevel\n");
    for r in runs {
        out.push_str(&format!("{}\t{}\t{}\n", r.start, r.end, r.level));
    }
    out
}

/// Round to 12 significant digits. Non-finite values become `null`.
pub fn sig(x: f64) -> Option<f64> {
    x.is_finite().then(|| fmt_sig(x).parse().unwrap_or(x))
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub model: &'static str,
    pub mode: &'static str,
    pub n: usize,
    pub k: usize,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub score: Option<f64>,
    pub epsilon: Option<f64>,
    pub viterbi_calls: usize,
    pub runtime_ms: Option<f64>,
}

pub fn write_run(dir: &Path, levels: &[usize], summary: &Summary) -> Result<String, CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("levels.tsv"), levels_tsv(levels))?;
    fs::write(dir.join("segments.tsv"), segments_tsv(&segments(levels)))?;
    let json = serde_json::to_string_pretty(summary).map_err(|e| CliError::Io(e.into()))?;
    fs::write(dir.join("summary.json"), format!("{json}\n"))?;
    Ok(json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_tile_the_sequence() {
        let l = [0, 0, 1, 1, 1, 0, 2];
        let runs = segments(&l);
        assert_eq!(
            runs,
            vec![
                SegmentRun {
                    start: 0,
                    end: 2,
                    level: 0
                },
                SegmentRun {
                    start: 2,
                    end: 5,
                    level: 1
                },
                SegmentRun {
                    start: 5,
                    end: 6,
                    level: 0
                },
                SegmentRun {
                    start: 6,
                    end: 7,
                    level: 2
                },
            ]
        );
        assert!(runs
            .windows(2)
            .all(|w| w[0].end == w[1].start && w[0].level != w[1].level));
        assert!(segments(&[]).is_empty());
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(sig(2.0 / 3.0), Some(0.666666666667));
        assert_eq!(sig(f64::INFINITY), None);
    }
}
