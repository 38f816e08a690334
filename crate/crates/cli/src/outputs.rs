//! Report serialization: JSON reports, CSV tables, and the
//! ground-truth noise-trace format shared by `simulate` and the
//! validation mode of `analyze`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use zca_core::NoiseTraces;

use crate::config::PS;
use crate::error::{CliError, Result};

/// Serializes `value` as pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|err| CliError::Config(format!("serializing {}: {err}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Formats a duration in seconds as picoseconds with the reporting
/// resolution of a tenth of a picosecond.
pub fn ps1(seconds: f64) -> String {
    format!("{:.1}", seconds / PS)
}

/// Seconds to picoseconds for JSON fields.
pub fn to_ps(seconds: f64) -> f64 {
    seconds / PS
}

/// Writes one CSV file: a header line, then the rows.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row.as_ref())?;
    }
    out.flush()?;
    Ok(())
}

/// Writes ground-truth noise traces as CSV.
///
/// The first line is a comment carrying the exact grid, so a reader can
/// rebuild the traces without trusting the rounded time column. Jitter
/// is in ps; the other traces are in full-scale amplitude units.
pub fn write_traces(path: &Path, traces: &NoiseTraces) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "# sample_rate_hz={:.6} start_time_s={:.9}",
        traces.sample_rate, traces.start_time
    )?;
    writeln!(out, "time_s,j_ps,a_m_fs,n_pi_fs,a_total_fs")?;
    for i in 0..traces.j.len() {
        let t = traces.start_time + i as f64 / traces.sample_rate;
        writeln!(
            out,
            "{:.6},{:.5e},{:.5e},{:.5e},{:.5e}",
            t,
            traces.j[i] / PS,
            traces.a_m[i],
            traces.n_pi[i],
            traces.a_total[i]
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a traces CSV written by [`write_traces`].
pub fn read_traces(path: &Path) -> Result<NoiseTraces> {
    let bad = |what: &str| CliError::Config(format!("{}: {what}", path.display()));
    let mut lines = BufReader::new(File::open(path)?).lines();
    let grid = lines.next().ok_or_else(|| bad("empty traces file"))??;
    let grid = grid
        .strip_prefix("# ")
        .ok_or_else(|| bad("missing grid comment on the first line"))?;
    let mut sample_rate = None;
    let mut start_time = None;
    for part in grid.split_whitespace() {
        if let Some(v) = part.strip_prefix("sample_rate_hz=") {
            sample_rate = v.parse::<f64>().ok();
        } else if let Some(v) = part.strip_prefix("start_time_s=") {
            start_time = v.parse::<f64>().ok();
        }
    }
    let sample_rate = sample_rate.ok_or_else(|| bad("missing sample_rate_hz in the grid comment"))?;
    let start_time = start_time.ok_or_else(|| bad("missing start_time_s in the grid comment"))?;
    let header = lines.next().ok_or_else(|| bad("missing header line"))??;
    if header != "time_s,j_ps,a_m_fs,n_pi_fs,a_total_fs" {
        return Err(bad(&format!("unexpected header {header:?}")));
    }

    let mut traces = NoiseTraces::zeros(16, sample_rate, start_time);
    traces.j.clear();
    traces.a_m.clear();
    traces.n_pi.clear();
    traces.a_total.clear();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut take = |name: &str| -> Result<f64> {
            fields
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| bad(&format!("row {}: bad {name} field", n + 1)))
        };
        take("time_s")?;
        traces.j.push(take("j_ps")? * PS);
        traces.a_m.push(take("a_m_fs")?);
        traces.n_pi.push(take("n_pi_fs")?);
        traces.a_total.push(take("a_total_fs")?);
    }
    if traces.j.is_empty() {
        return Err(bad("no data rows"));
    }
    Ok(traces)
}

/// One histogram bin in ps.
#[derive(Debug, Serialize)]
pub struct HistogramBin {
    pub lo_ps: f64,
    pub hi_ps: f64,
    pub count: usize,
}

/// Bins `values` (seconds) into 81 equal bins spanning the mean plus or
/// minus four standard deviations, for distribution plots.
pub fn histogram_ps(values: &[f64]) -> Vec<HistogramBin> {
    if values.is_empty() {
        return Vec::new();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 {
        return vec![HistogramBin { lo_ps: to_ps(mean), hi_ps: to_ps(mean), count: values.len() }];
    }
    let bins = 81usize;
    let lo = mean - 4.0 * sd;
    let width = 8.0 * sd / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = ((v - lo) / width).floor();
        let k = (k.max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lo_ps: to_ps(lo + k as f64 * width),
            hi_ps: to_ps(lo + (k + 1) as f64 * width),
            count,
        })
        .collect()
}

/// Writes a histogram as CSV.
pub fn write_histogram(path: &Path, bins: &[HistogramBin]) -> Result<()> {
    write_csv(
        path,
        "delta_lo_ps,delta_hi_ps,count",
        bins.iter().map(|b| format!("{:.4},{:.4},{}", b.lo_ps, b.hi_ps, b.count)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_round_trip_through_csv() {
        let dir = std::env::temp_dir().join("zca-cli-outputs-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("traces.csv");
        let mut traces = NoiseTraces::zeros(32, 192_000.0, 0.25);
        for i in 0..32 {
            traces.j[i] = (i as f64 - 16.0) * 1e-12;
            traces.n_pi[i] = (i as f64).sin() * 1e-3;
        }
        write_traces(&path, &traces).unwrap();
        let back = read_traces(&path).unwrap();
        assert_eq!(back.j.len(), 32);
        assert!((back.sample_rate - 192_000.0).abs() < 1e-9);
        assert!((back.start_time - 0.25).abs() < 1e-12);
        for i in 0..32 {
            assert!(
                (back.j[i] - traces.j[i]).abs() < 1e-16,
                "jitter row {i} moved: {} vs {}",
                back.j[i],
                traces.j[i]
            );
            assert!((back.n_pi[i] - traces.n_pi[i]).abs() < 1e-8);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn histogram_covers_every_value_once() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 1e-12).collect();
        let bins = histogram_ps(&values);
        assert_eq!(bins.len(), 81);
        let total: usize = bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 1000);
    }

    #[test]
    fn constant_input_collapses_to_one_bin() {
        let bins = histogram_ps(&[2e-12; 5]);
        assert_eq!(bins.len(), 1);
        assert_eq!(bins[0].count, 5);
        assert!((bins[0].lo_ps - 2.0).abs() < 1e-9);
    }

    #[test]
    fn picosecond_formatting_keeps_one_decimal() {
        assert_eq!(ps1(39.7261e-12), "39.7");
        assert_eq!(ps1(-4.06e-12), "-4.1");
    }
}
