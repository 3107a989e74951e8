//! Report files: `<id>.json` plus `<id>_<table>.csv`, never overwriting an
//! earlier run (later runs get `<id>.1`, `<id>.2`, ...).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use muntz_lab::verify::{ExperimentReport, Status, Table};

use crate::Format;

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn free_stem(dir: &Path, id: &str) -> String {
    (0..)
        .map(|i| if i == 0 { id.to_string() } else { format!("{id}.{i}") })
        .find(|s| !dir.join(format!("{s}.json")).exists())
        .expect("some suffix is free")
}

fn write_table(path: &Path, t: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(&t.columns).map_err(csv_err)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush()
}

/// Writes the report and its tables; returns the JSON path.
pub fn write_report(dir: &Path, rep: &ExperimentReport) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let stem = free_stem(dir, &rep.id);
    let json = dir.join(format!("{stem}.json"));
    fs::write(&json, serde_json::to_string_pretty(rep)? + "\n")?;
    for (name, t) in &rep.tables {
        write_table(&dir.join(format!("{stem}_{name}.csv")), t)?;
    }
    Ok(json)
}

pub fn echo_report(rep: &ExperimentReport, format: Format) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(rep)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["verdict", "status", "detail"]).map_err(csv_err)?;
            for v in &rep.verdicts {
                w.write_record([v.name.as_str(), status_name(v.status), v.detail.as_str()]).map_err(csv_err)?;
            }
            w.flush()
        }
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Inconclusive => "INCONCLUSIVE",
        Status::Fail => "FAIL",
    }
}

#[derive(Serialize)]
pub struct SummaryRow {
    pub file: String,
    pub id: String,
    pub status: Status,
    pub pass: usize,
    pub inconclusive: usize,
    pub fail: usize,
}

/// Collects every report in `dir` into `summary.json` and `summary.csv`.
pub fn summarise(dir: &Path) -> Result<(Vec<SummaryRow>, Status), crate::Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| crate::Failure::Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_stem().is_some_and(|s| s != "summary"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for path in files {
        let text = fs::read_to_string(&path)?;
        let Ok(rep) = serde_json::from_str::<ExperimentReport>(&text) else {
            continue;
        };
        let count = |s: Status| rep.verdicts.iter().filter(|v| v.status == s).count();
        rows.push(SummaryRow {
            file: path.file_name().unwrap().to_string_lossy().into_owned(),
            id: rep.id.clone(),
            status: rep.status,
            pass: count(Status::Pass),
            inconclusive: count(Status::Inconclusive),
            fail: count(Status::Fail),
        });
    }
    if rows.is_empty() {
        return Err(crate::Failure::Usage(format!("no reports found in {}", dir.display())));
    }
    let status = Status::combine(rows.iter().map(|r| r.status));
    let doc = serde_json::json!({"status": status, "reports": rows});
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&doc).map_err(io::Error::from)? + "\n")?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(csv_err)?;
    for r in &rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok((rows, status))
}

pub fn echo_summary(rows: &[SummaryRow], format: Format) -> io::Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Json => {
            let mut out = out;
            writeln!(out, "{}", serde_json::to_string_pretty(rows)?)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()
        }
    }
}
