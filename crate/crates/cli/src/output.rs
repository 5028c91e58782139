//! CSV and TOML writers for simulation results, with matching readers.

use std::fs;
use std::io;
use std::path::Path;

use dephasing_core::experiments::{DecayCurve, EnsembleResult};
use dephasing_core::linalg::C64;
use dephasing_core::pulse::PulseSchedule;
use thiserror::Error;

pub const CURVE_HEADER: &str = "time_s,magnitude,fit_magnitude";
pub const AMPLITUDE_HEADER: &str = "kind,index,re,im";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("refusing to write an empty curve to {0}")]
    EmptyCurve(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schedule { path: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

/// File-name suffix for a memory run, e.g. `_a010` for α = 0.10.
pub fn alpha_suffix(alpha: f64) -> String {
    format!("_a{:03}", (alpha * 100.0).round() as u32)
}

/// One row of a curve file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub time: f64,
    pub magnitude: f64,
    /// Empty in the file when the curve has no fit.
    pub fit_magnitude: Option<f64>,
}

pub fn curve_rows(curve: &DecayCurve) -> Vec<CurveRow> {
    curve
        .points
        .iter()
        .map(|&(time, magnitude)| CurveRow {
            time,
            magnitude,
            fit_magnitude: curve.fit.map(|f| f.magnitude_at(time)),
        })
        .collect()
}

pub fn render_curve(curve: &DecayCurve) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for row in curve_rows(curve) {
        let fit = row.fit_magnitude.map(format_value).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{}\n",
            format_value(row.time),
            format_value(row.magnitude),
            fit
        ));
    }
    out
}

pub fn emit_curve(curve: &DecayCurve, path: &Path) -> Result<(), OutputError> {
    if curve.points.is_empty() {
        return Err(OutputError::EmptyCurve(path.display().to_string()));
    }
    fs::write(path, render_curve(curve)).map_err(io_err(path))
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> OutputError {
    OutputError::Malformed {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64, OutputError> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(path, line, format!("not a number: {field:?}")))
}

pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(malformed(
            path,
            1,
            format!("expected header {CURVE_HEADER:?}"),
        ));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 2;
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != 3 {
                return Err(malformed(path, line, "expected 3 fields"));
            }
            Ok(CurveRow {
                time: parse_f64(path, line, fields[0])?,
                magnitude: parse_f64(path, line, fields[1])?,
                fit_magnitude: if fields[2].is_empty() {
                    None
                } else {
                    Some(parse_f64(path, line, fields[2])?)
                },
            })
        })
        .collect()
}

/// Amplitudes of every trial, group and the grand average.
pub fn render_ensemble(result: &EnsembleResult) -> String {
    let mut out = String::from(AMPLITUDE_HEADER);
    out.push('\n');
    let mut row = |kind: &str, i: usize, z: C64| {
        out.push_str(&format!(
            "{kind},{i},{},{}\n",
            format_value(z.re),
            format_value(z.im)
        ));
    };
    for (i, &a) in result.amplitudes.iter().enumerate() {
        row("trial", i, a);
    }
    for (i, &a) in result.group_averages.iter().enumerate() {
        row("group", i, a);
    }
    row("grand", 0, result.grand_average);
    out
}

pub fn emit_ensemble(result: &EnsembleResult, path: &Path) -> Result<(), OutputError> {
    fs::write(path, render_ensemble(result)).map_err(io_err(path))
}

/// `(kind, index, amplitude)` rows of an amplitude file.
pub fn read_ensemble(path: &Path) -> Result<Vec<(String, usize, C64)>, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    if lines.next() != Some(AMPLITUDE_HEADER) {
        return Err(malformed(
            path,
            1,
            format!("expected header {AMPLITUDE_HEADER:?}"),
        ));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 2;
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != 4 {
                return Err(malformed(path, line, "expected 4 fields"));
            }
            let index = fields[1]
                .parse()
                .map_err(|_| malformed(path, line, format!("bad index {:?}", fields[1])))?;
            let z = C64::new(
                parse_f64(path, line, fields[2])?,
                parse_f64(path, line, fields[3])?,
            );
            Ok((fields[0].to_string(), index, z))
        })
        .collect()
}

pub fn render_schedule(schedule: &PulseSchedule) -> Result<String, toml::ser::Error> {
    toml::to_string(schedule)
}

pub fn emit_schedule(schedule: &PulseSchedule, path: &Path) -> Result<(), OutputError> {
    let text = render_schedule(schedule).map_err(|e| OutputError::Schedule {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_schedule(path: &Path) -> Result<PulseSchedule, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| OutputError::Schedule {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
