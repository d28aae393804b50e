//! Result files.
//!
//! Per record: `<prefix>.csv` and `<prefix>.dat` (suffixed `_T<i>` in a
//! sweep). Per run: `summary.json`, and `timing.json` for the wall-clock
//! times, kept apart so the other files are byte-identical across runs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::runner::{ResultRecord, SpectrumRow, Summary, VERSION};

fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_csv(path: &Path, rows: &[SpectrumRow]) -> io::Result<()> {
    let with_unitarity = rows.iter().any(|r| r.unitarity.is_some());
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["mode", "omega", "dn_vacuum", "dn_thermal", "dn_total"];
    if with_unitarity {
        header.push("unitarity");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.mode.clone(),
            num(r.omega),
            num(r.dn_vacuum),
            num(r.dn_thermal),
            num(r.dn_total),
        ];
        if with_unitarity {
            rec.push(r.unitarity.map_or_else(String::new, num));
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

/// Two columns, `omega dn_total`, for plotting.
pub fn write_dat(path: &Path, rows: &[SpectrumRow]) -> io::Result<()> {
    let mut s = String::from("# omega dn_total\n");
    for r in rows {
        s.push_str(&format!("{} {}\n", num(r.omega), num(r.dn_total)));
    }
    fs::write(path, s)
}

#[derive(Serialize)]
struct RecordSummary<'a> {
    temperature: f64,
    temperature_natural: f64,
    rows: usize,
    csv: String,
    dat: String,
    summary: &'a Summary,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct RunSummary<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a str,
    /// The fully expanded configuration.
    config: &'a str,
    records: Vec<RecordSummary<'a>>,
}

#[derive(Serialize)]
struct Timing {
    workers: usize,
    total_seconds: f64,
    records: Vec<f64>,
}

fn stem(prefix: &str, i: usize, n: usize) -> String {
    if n == 1 {
        prefix.to_string()
    } else {
        format!("{prefix}_T{i}")
    }
}

/// Writes all files for a run and returns their paths, primary files first.
pub fn write_run(
    dir: &Path,
    prefix: &str,
    config: &str,
    records: &[ResultRecord],
    workers: usize,
    total_seconds: f64,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut summaries = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let s = stem(prefix, i, records.len());
        let (csv, dat) = (format!("{s}.csv"), format!("{s}.dat"));
        write_csv(&dir.join(&csv), &rec.rows)?;
        write_dat(&dir.join(&dat), &rec.rows)?;
        paths.push(dir.join(&csv));
        paths.push(dir.join(&dat));
        summaries.push(RecordSummary {
            temperature: rec.temperature,
            temperature_natural: rec.temperature_natural,
            rows: rec.rows.len(),
            csv,
            dat,
            summary: &rec.summary,
            warnings: &rec.warnings,
        });
    }
    let scenario = records.first().map_or("", |r| r.scenario);
    let summary = RunSummary {
        tool: "qrad",
        version: VERSION,
        scenario,
        config,
        records: summaries,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(io::Error::other)?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    paths.push(dir.join("summary.json"));

    let timing = Timing {
        workers,
        total_seconds,
        records: records.iter().map(|r| r.wall_clock.as_secs_f64()).collect(),
    };
    let json = serde_json::to_string_pretty(&timing).map_err(io::Error::other)?;
    fs::write(dir.join("timing.json"), json + "\n")?;
    paths.push(dir.join("timing.json"));
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![SpectrumRow {
            mode: "w0".into(),
            omega: 0.5,
            dn_vacuum: 1e-300,
            dn_thermal: 2.0,
            dn_total: 2.0,
            unitarity: Some(0.0),
        }];
        let p = dir.path().join("a.csv");
        write_csv(&p, &rows).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(
            text,
            "mode,omega,dn_vacuum,dn_thermal,dn_total,unitarity\nw0,5e-1,1e-300,2e0,2e0,0e0\n"
        );
    }
}
