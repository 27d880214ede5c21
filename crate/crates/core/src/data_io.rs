//! CSV input and output.
//!
//! Inputs are price series (`date,close`) that become log-return observation
//! sequences for the stochastic volatility model. Outputs are per-step filter
//! diagnostics and the benchmark tables.
//!
//! All floating-point output goes through [`fmt_sig9`], which renders nine
//! significant digits with trailing zeros stripped. The format is
//! deterministic, so rewriting the same results produces byte-identical
//! files, and nine digits keep a round trip through `f64` parsing within a
//! relative error of `5e-9`. Files use LF line endings throughout.

use crate::bench::{MedianVarianceCheck, RmseReport, TimingReport, VarianceReport};
use crate::engine::FilterOutput;
use crate::error::SmcError;
use crate::resample::Scheme;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Formats a float with nine significant digits, trailing zeros stripped.
///
/// Values with decimal exponent in `[-4, 8]` print in fixed notation, the
/// rest in scientific notation (`1.23456789e11`, `2e-5`). Zero prints as `0`.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    // {:.8e} renders nine significant digits: d.dddddddd e exp.
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        strip_trailing_zeros(format!("{x:.decimals$}"))
    } else {
        let mantissa = strip_trailing_zeros(mantissa.to_string());
        format!("{mantissa}e{exp}")
    }
}

fn strip_trailing_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

/// A loaded price series: ISO dates and strictly positive closing prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<String>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    if !(digits(0..4) && digits(5..7) && digits(8..10)) {
        return false;
    }
    let month: u32 = s[5..7].parse().unwrap_or(0);
    let day: u32 = s[8..10].parse().unwrap_or(0);
    (1..=12).contains(&month) && (1..=31).contains(&day)
}

/// Loads a `date,close` CSV.
///
/// Requirements: exact header `date,close`; ISO `YYYY-MM-DD` dates in
/// strictly increasing order; finite, strictly positive closes. Blank lines
/// are ignored. Errors carry the 1-based line number (the header is line 1).
pub fn load_prices_csv(path: &Path) -> Result<PriceSeries, SmcError> {
    let file = File::open(path).map_err(|e| SmcError::ParseError {
        row: 0,
        msg: format!("cannot open {}: {e}", path.display()),
    })?;
    let reader = BufReader::new(file);
    let mut dates: Vec<String> = Vec::new();
    let mut closes: Vec<f64> = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let row = idx + 1;
        let line = line.map_err(|e| SmcError::ParseError {
            row,
            msg: format!("cannot read line: {e}"),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line != "date,close" {
                return Err(SmcError::ParseError {
                    row,
                    msg: format!("expected header 'date,close', found '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let mut fields = line.split(',');
        let (date, close) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(c), None) => (d, c),
            _ => {
                return Err(SmcError::ParseError {
                    row,
                    msg: format!("expected two fields 'date,close', found '{line}'"),
                })
            }
        };
        if !is_iso_date(date) {
            return Err(SmcError::ParseError {
                row,
                msg: format!("'{date}' is not a YYYY-MM-DD date"),
            });
        }
        if let Some(prev) = dates.last() {
            // ISO dates compare chronologically as strings.
            if date <= prev.as_str() {
                return Err(SmcError::ParseError {
                    row,
                    msg: format!("date {date} does not increase over {prev}"),
                });
            }
        }
        let value: f64 = close.trim().parse().map_err(|_| SmcError::ParseError {
            row,
            msg: format!("'{close}' is not a number"),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(SmcError::ParseError {
                row,
                msg: format!("close {value} must be positive and finite"),
            });
        }
        dates.push(date.to_string());
        closes.push(value);
    }
    if !saw_header {
        return Err(SmcError::ParseError {
            row: 1,
            msg: "missing header 'date,close'".into(),
        });
    }
    Ok(PriceSeries { dates, closes })
}

/// Log returns `ln(p_t / p_{t-1})` of a price series; needs at least two
/// prices.
pub fn log_returns(prices: &PriceSeries) -> Result<Vec<f64>, SmcError> {
    if prices.closes.len() < 2 {
        return Err(SmcError::InsufficientData(format!(
            "log returns need at least 2 prices, got {}",
            prices.closes.len()
        )));
    }
    for (i, &c) in prices.closes.iter().enumerate() {
        if !c.is_finite() || c <= 0.0 {
            return Err(SmcError::InvalidParams(format!(
                "price {c} at index {i} must be positive and finite"
            )));
        }
    }
    Ok(prices
        .closes
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect())
}

fn create(path: &Path) -> Result<BufWriter<File>, SmcError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes per-step filter diagnostics:
/// `t,ess,weight_variance,unique_ancestors,resampled,mean_estimate`.
pub fn write_diagnostics_csv(path: &Path, output: &FilterOutput) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "t,ess,weight_variance,unique_ancestors,resampled,mean_estimate")?;
    for (i, d) in output.diagnostics.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            d.t,
            fmt_sig9(d.ess),
            fmt_sig9(d.weight_variance),
            d.unique_ancestors,
            u8::from(output.resample_events[i]),
            fmt_sig9(output.means[i]),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the full weight-variance traces in long format:
/// `scheme,seed,t,weight_variance`.
pub fn write_variance_csv(path: &Path, report: &VarianceReport) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "scheme,seed,t,weight_variance")?;
    for (si, &scheme) in report.schemes.iter().enumerate() {
        for (ki, &seed) in report.seeds.iter().enumerate() {
            for (t, v) in report.series[si][ki].iter().enumerate() {
                writeln!(w, "{},{},{},{}", scheme, seed, t + 1, fmt_sig9(*v))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes per-scheme aggregates of a variance comparison:
/// `scheme,mean_weight_variance,win_rate_vs_multinomial,share_lowest`.
///
/// The win-rate column is empty when multinomial is not part of the report.
pub fn write_variance_summary_csv(path: &Path, report: &VarianceReport) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "scheme,mean_weight_variance,win_rate_vs_multinomial,share_lowest")?;
    for &scheme in &report.schemes {
        let mean = report
            .aggregate_mean(scheme)
            .expect("scheme taken from the report");
        let win = report
            .win_rate(scheme, Scheme::Multinomial)
            .map(fmt_sig9)
            .unwrap_or_default();
        let lowest = report
            .share_lowest(scheme)
            .expect("scheme taken from the report");
        writeln!(w, "{},{},{},{}", scheme, fmt_sig9(mean), win, fmt_sig9(lowest))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every error-sweep cell:
/// `scheme,n_particles,seed,rmse,kalman_correlation`.
pub fn write_rmse_csv(path: &Path, report: &RmseReport) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "scheme,n_particles,seed,rmse,kalman_correlation")?;
    for c in &report.cells {
        writeln!(
            w,
            "{},{},{},{},{}",
            c.scheme,
            c.n_particles,
            c.seed,
            fmt_sig9(c.rmse),
            fmt_sig9(c.kalman_correlation),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes error-sweep aggregates:
/// `scheme,n_particles,median_rmse,median_correlation,min_correlation`.
pub fn write_rmse_summary_csv(path: &Path, report: &RmseReport) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "scheme,n_particles,median_rmse,median_correlation,min_correlation")?;
    for &scheme in &report.schemes {
        for &n in &report.particle_counts {
            let med = report.median_rmse(scheme, n).expect("cell grid is complete");
            let mcorr = report
                .median_correlation(scheme, n)
                .expect("cell grid is complete");
            let min = report.min_correlation(scheme, n).expect("cell grid is complete");
            writeln!(
                w,
                "{},{},{},{},{}",
                scheme,
                n,
                fmt_sig9(med),
                fmt_sig9(mcorr),
                fmt_sig9(min),
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes timing rows: `scheme,n_particles,mean_seconds_per_call,stddev`.
pub fn write_timing_csv(path: &Path, report: &TimingReport) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "scheme,n_particles,mean_seconds_per_call,stddev")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.scheme,
            r.n_particles,
            fmt_sig9(r.mean_seconds_per_call),
            fmt_sig9(r.stddev),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes median-of-uniforms variance checks:
/// `r,replicates,empirical_variance,analytic_variance,relative_error`.
pub fn write_median_checks_csv(
    path: &Path,
    checks: &[MedianVarianceCheck],
) -> Result<(), SmcError> {
    let mut w = create(path)?;
    writeln!(w, "r,replicates,empirical_variance,analytic_variance,relative_error")?;
    for c in checks {
        writeln!(
            w,
            "{},{},{},{},{}",
            c.r,
            c.replicates,
            fmt_sig9(c.empirical_variance),
            fmt_sig9(c.analytic_variance),
            fmt_sig9(c.relative_error()),
        )?;
    }
    w.flush()?;
    Ok(())
}
