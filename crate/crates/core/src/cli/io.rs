//! CSV, PGM and JSON writers, plus the prediction CSV reader.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::analytic::{Branch, VortexPrediction};
use crate::detector::DetectedVortex;
use crate::error::{Result, VortexError};
use crate::wavefield::FieldGrid;

pub const PREDICTION_HEADER: &str =
    "m,n,branch,theta_rad,r_perp_over_lambda0,x_over_lambda0,y_over_lambda0";
pub const DETECTION_HEADER: &str = "charge,x_over_lambda0,y_over_lambda0,min_amp";

/// Raster content written by [`write_raster`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RasterKind {
    Amplitude,
    Phase,
    PhaseBgSubtracted,
}

pub fn predictions_csv(preds: &[VortexPrediction]) -> String {
    let mut s = String::with_capacity(64 * (preds.len() + 1));
    s.push_str(PREDICTION_HEADER);
    s.push('\n');
    for p in preds {
        let _ = writeln!(
            s,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.m,
            p.n,
            p.branch.as_str(),
            p.theta,
            p.r_perp,
            p.x,
            p.y
        );
    }
    s
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str, line: usize) -> Result<T> {
    field
        .and_then(|f| f.trim().parse().ok())
        .ok_or_else(|| VortexError::InvalidParameter(format!("line {line}: bad or missing {what}")))
}

/// Parses a prediction CSV. The file does not carry `z0`, so the caller
/// supplies it.
pub fn read_predictions_csv(text: &str, z0: f64) -> Result<Vec<VortexPrediction>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PREDICTION_HEADER => {}
        _ => {
            return Err(VortexError::InvalidParameter(
                "missing prediction CSV header".into(),
            ))
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ln = i + 2;
        let mut f = line.split(',');
        let m = parse_field(f.next(), "m", ln)?;
        let n = parse_field(f.next(), "n", ln)?;
        let branch: Branch = f
            .next()
            .ok_or_else(|| VortexError::InvalidParameter(format!("line {ln}: missing branch")))?
            .trim()
            .parse()?;
        out.push(VortexPrediction {
            m,
            n,
            branch,
            theta: parse_field(f.next(), "theta_rad", ln)?,
            r_perp: parse_field(f.next(), "r_perp", ln)?,
            x: parse_field(f.next(), "x", ln)?,
            y: parse_field(f.next(), "y", ln)?,
            z0,
        });
    }
    Ok(out)
}

pub fn detections_csv(dets: &[DetectedVortex]) -> String {
    let mut s = String::with_capacity(48 * (dets.len() + 1));
    s.push_str(DETECTION_HEADER);
    s.push('\n');
    for d in dets {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e}",
            d.charge, d.position.0, d.position.1, d.plaquette_min_amplitude
        );
    }
    s
}

/// Maps raster samples to 8-bit gray levels, row 0 being the maximum-y row.
pub fn raster_bytes(grid: &FieldGrid, kind: RasterKind) -> Vec<u8> {
    let level = |row: usize, col: usize| -> f64 {
        let v = grid.get(row, col);
        match kind {
            RasterKind::Amplitude => v.norm(),
            RasterKind::Phase | RasterKind::PhaseBgSubtracted => v.im.atan2(v.re),
        }
    };
    let mut out = Vec::with_capacity(grid.rows * grid.cols);
    match kind {
        RasterKind::Amplitude => {
            let amps = grid.amplitude();
            let lo = amps.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = amps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            for row in (0..grid.rows).rev() {
                for col in 0..grid.cols {
                    let g = if span > 0.0 {
                        (level(row, col) - lo) / span * 255.0
                    } else {
                        0.0
                    };
                    out.push(g.round().clamp(0.0, 255.0) as u8);
                }
            }
        }
        _ => {
            for row in (0..grid.rows).rev() {
                for col in 0..grid.cols {
                    // atan2 returns [-pi, pi]; fold +pi onto -pi
                    let mut p = level(row, col);
                    if p >= PI {
                        p -= TAU;
                    }
                    let g = ((p + PI) / TAU * 256.0).floor();
                    out.push(g.clamp(0.0, 255.0) as u8);
                }
            }
        }
    }
    out
}

pub fn pgm_bytes(grid: &FieldGrid, kind: RasterKind) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.cols, grid.rows).into_bytes();
    out.extend(raster_bytes(grid, kind));
    out
}

/// Writes an 8-bit binary PGM. Background subtraction, if wanted, must
/// already have been applied to `grid`.
pub fn write_raster(grid: &FieldGrid, kind: RasterKind, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, pgm_bytes(grid, kind))
}

pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}
