use std::path::Path;

use burstopt::{DelaySequence, Family};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Granularity {
    Seconds,
    Minutes,
    Days,
}

impl Granularity {
    fn seconds(self) -> f64 {
        match self {
            Granularity::Seconds => 1.0,
            Granularity::Minutes => 60.0,
            Granularity::Days => 86_400.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IngestOptions {
    pub family: Family,
    pub timestamps: bool,
    pub granularity: Granularity,
    pub shift: Option<f64>,
}

/// Parse one number per line; blank lines are ignored.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            let v: f64 = line.trim().parse().map_err(|_| {
                CliError::Input(format!("line {}: not a number: {:?}", i + 1, line.trim()))
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Input(format!(
                    "line {}: value must be finite",
                    i + 1
                )))
            }
        })
        .collect()
}

/// Delays `tᵢ − tᵢ₋₁` after truncating epoch seconds to the granularity.
pub fn delays_from_timestamps(
    stamps: &[f64],
    granularity: Granularity,
) -> Result<Vec<f64>, CliError> {
    if stamps.len() < 2 {
        return Err(CliError::Input("need at least two timestamps".into()));
    }
    let unit = granularity.seconds();
    let ticks: Vec<f64> = stamps.iter().map(|t| (t / unit).floor()).collect();
    ticks
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if w[1] < w[0] {
                Err(CliError::Input(format!(
                    "timestamps must be non-decreasing; line {} is earlier than line {}",
                    i + 2,
                    i + 1
                )))
            } else {
                Ok(w[1] - w[0])
            }
        })
        .collect()
}

pub fn delays_from_text(text: &str, opts: &IngestOptions) -> Result<DelaySequence, CliError> {
    let values = parse_values(text)?;
    let mut delays = if opts.timestamps {
        delays_from_timestamps(&values, opts.granularity)?
    } else {
        values
    };
    if let Some(delta) = opts.shift {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(CliError::Usage(format!(
                "--shift-delays must be >= 0; got {delta}"
            )));
        }
        delays.iter_mut().for_each(|v| *v += delta);
    }
    if delays.is_empty() {
        return Err(CliError::Input("no delays in input".into()));
    }
    let seq = DelaySequence::new(delays)?;
    match opts.family {
        Family::Exp => seq.require_positive()?,
        Family::Geo => seq.require_integer()?,
    }
    Ok(seq)
}

pub fn ingest(path: &Path, opts: &IngestOptions) -> Result<DelaySequence, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    delays_from_text(&text, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(family: Family, timestamps: bool, shift: Option<f64>) -> IngestOptions {
        IngestOptions {
            family,
            timestamps,
            granularity: Granularity::Seconds,
            shift,
        }
    }

    #[test]
    fn timestamps_to_delays() {
        let s = delays_from_text("0\n1\n3\n6\n", &opts(Family::Exp, true, None)).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_delay_needs_shift() {
        let err = delays_from_text("0\n2\n", &opts(Family::Exp, false, None)).unwrap_err();
        assert!(err
            .to_string()
            .contains("shift the delays by a small amount"));
        let s = delays_from_text("0\n2\n", &opts(Family::Exp, false, Some(1.0))).unwrap();
        assert_eq!(s.values(), &[1.0, 3.0]);
    }

    #[test]
    fn granularity_truncates_before_differencing() {
        let o = IngestOptions {
            granularity: Granularity::Minutes,
            ..opts(Family::Geo, true, None)
        };
        let s = delays_from_text("0\n59\n61\n300\n", &o).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 4.0]);
        let o = IngestOptions {
            granularity: Granularity::Days,
            ..o
        };
        let s = delays_from_text("0\n90000\n180000\n", &o).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0]);
    }

    #[test]
    fn bad_lines() {
        assert!(matches!(parse_values("1\nx\n"), Err(CliError::Input(_))));
        assert!(matches!(
            delays_from_text("3\n2\n", &opts(Family::Exp, true, None)),
            Err(CliError::Input(_))
        ));
        assert!(delays_from_text("1.5\n", &opts(Family::Geo, false, None)).is_err());
        assert_eq!(parse_values("1\n\n 2 \n").unwrap(), vec![1.0, 2.0]);
    }
}
