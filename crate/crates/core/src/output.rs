//! CSV output for snapshots and diagnostics series.
//!
//! Every number is written with 17 significant digits in scientific
//! notation, which round-trips `f64` exactly. Lines end with `\n`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::State;

pub const SNAPSHOT_HEADER: &str = "x,f,g,h";

/// 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `x,f,g,h` with one row per cell, `h = f + g`.
pub fn write_snapshot(state: &State, grid: &Grid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    grid.check_len(&state.f)?;
    grid.check_len(&state.g)?;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{SNAPSHOT_HEADER}").map_err(io)?;
    for ((x, f), g) in grid.cell_centers().iter().zip(&state.f).zip(&state.g) {
        writeln!(
            w,
            "{},{},{},{}",
            format_f64(*x),
            format_f64(*f),
            format_f64(*g),
            format_f64(f + g)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a snapshot back as `(state at t = 0, cell centres)`.
pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(State, Vec<f64>)> {
    let path = path.as_ref();
    let rows = read_table(path, SNAPSHOT_HEADER, 4)?;
    let mut x = Vec::with_capacity(rows.len());
    let mut f = Vec::with_capacity(rows.len());
    let mut g = Vec::with_capacity(rows.len());
    for row in rows {
        x.push(row[0]);
        f.push(row[1]);
        g.push(row[2]);
    }
    Ok((State::new(f, g, 0.0), x))
}

pub fn write_diagnostics(series: &[DiagnosticsRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", DiagnosticsRecord::CSV_HEADER).map_err(io)?;
    for r in series {
        let line: Vec<String> = r.values().iter().map(|&v| format_f64(v)).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_diagnostics(path: impl AsRef<Path>) -> Result<Vec<DiagnosticsRecord>> {
    let rows = read_table(path.as_ref(), DiagnosticsRecord::CSV_HEADER, 14)?;
    Ok(rows
        .into_iter()
        .map(|v| DiagnosticsRecord {
            time: v[0],
            mass_f: v[1],
            mass_g: v[2],
            e1: v[3],
            e2: v[4],
            d1_rate: v[5],
            d2_rate: v[6],
            min_f: v[7],
            min_g: v[8],
            clamp_mass_cum: v[9],
            dist2_f: v[10],
            dist2_g: v[11],
            grad_f_l2: v[12],
            grad_g_l2: v[13],
        })
        .collect())
}

fn read_table(path: &Path, header: &str, columns: usize) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(h)) if h == header => {}
        Some(Ok(h)) => return Err(parse_err(1, format!("expected header '{header}', found '{h}'"))),
        Some(Err(e)) => return Err(Error::io(path, e)),
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        if row.len() != columns {
            return Err(parse_err(line_no, format!("expected {columns} columns, found {}", row.len())));
        }
        rows.push(row);
    }
    Ok(rows)
}
