//! Numerical vortex detection on sampled fields.
//!
//! Every 2x2 plaquette of samples is a closed loop; the sum of wrapped phase
//! steps around it is `2pi` times the enclosed topological charge.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::VortexPrediction;
use crate::error::{Result, VortexError};
use crate::wavefield::FieldGrid;

/// Above this condition number the bilinear solve falls back to the plaquette center.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectedVortex {
    pub charge: i32,
    /// Lower-left sample `(row, col)` of the plaquette.
    pub pixel: (usize, usize),
    pub position: (f64, f64),
    pub plaquette_min_amplitude: f64,
}

/// Wraps a phase step into `(-pi, pi]`.
fn wrap_step(d: f64) -> f64 {
    let w = d - TAU * (d / TAU).round();
    if w <= -PI {
        w + TAU
    } else if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Net phase winding of a closed loop through `phases` (traversed in
/// order, then back to the first), in units of `2pi`.
pub fn loop_charge(phases: &[f64]) -> i64 {
    if phases.len() < 2 {
        return 0;
    }
    let total: f64 = phases
        .iter()
        .zip(phases.iter().cycle().skip(1))
        .map(|(a, b)| wrap_step(b - a))
        .sum();
    (total / TAU).round() as i64
}

/// Winding number of a plaquette whose corner phases are listed counter-clockwise.
pub fn winding_number(phases: [f64; 4]) -> i32 {
    loop_charge(&phases) as i32
}

fn phase(v: Complex64) -> f64 {
    v.im.atan2(v.re)
}

/// Winding number around the rectangle of samples with corners
/// `(row0, col0)` and `(row1, col1)`, traversed counter-clockwise.
/// Equals the total charge of the plaquettes inside.
pub fn rectangle_charge(
    grid: &FieldGrid,
    row0: usize,
    col0: usize,
    row1: usize,
    col1: usize,
) -> i64 {
    assert!(row0 < row1 && col0 < col1 && row1 < grid.rows && col1 < grid.cols);
    let mut loop_phases = Vec::with_capacity(2 * (row1 - row0 + col1 - col0));
    for c in col0..col1 {
        loop_phases.push(phase(grid.get(row0, c)));
    }
    for r in row0..row1 {
        loop_phases.push(phase(grid.get(r, col1)));
    }
    for c in (col0 + 1..=col1).rev() {
        loop_phases.push(phase(grid.get(row1, c)));
    }
    for r in (row0 + 1..=row1).rev() {
        loop_phases.push(phase(grid.get(r, col0)));
    }
    loop_charge(&loop_phases)
}

fn condition_number(j: [[f64; 2]; 2]) -> f64 {
    // singular values of a 2x2 matrix from the eigenvalues of J^T J
    let a = j[0][0] * j[0][0] + j[1][0] * j[1][0];
    let b = j[0][0] * j[0][1] + j[1][0] * j[1][1];
    let d = j[0][1] * j[0][1] + j[1][1] * j[1][1];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let s_max = (0.5 * (tr + disc)).max(0.0).sqrt();
    let s_min = (0.5 * (tr - disc)).max(0.0).sqrt();
    if s_min == 0.0 {
        f64::INFINITY
    } else {
        s_max / s_min
    }
}

/// Zero of the bilinear interpolant of the plaquette `[f00, f10, f11, f01]`
/// in local coordinates `(u, v)` in the unit square; `None` when the
/// linearised system is too ill-conditioned.
fn bilinear_zero(corners: [Complex64; 4]) -> Option<(f64, f64)> {
    let [f00, f10, f11, f01] = corners;
    let du = f10 - f00;
    let dv = f01 - f00;
    let cross = f00 - f10 - f01 + f11;
    let (mut u, mut v) = (0.5, 0.5);
    for _ in 0..50 {
        let value = f00 + du * u + dv * v + cross * (u * v);
        let ju = du + cross * v;
        let jv = dv + cross * u;
        let jac = [[ju.re, jv.re], [ju.im, jv.im]];
        if condition_number(jac) > MAX_CONDITION {
            return None;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let step_u = (jac[1][1] * value.re - jac[0][1] * value.im) / det;
        let step_v = (-jac[1][0] * value.re + jac[0][0] * value.im) / det;
        u = (u - step_u).clamp(0.0, 1.0);
        v = (v - step_v).clamp(0.0, 1.0);
        if step_u.abs() < 1e-14 && step_v.abs() < 1e-14 {
            break;
        }
    }
    Some((u, v))
}

/// Scans every plaquette and reports the ones with non-zero winding, in
/// row-major order of their lower-left sample.
pub fn detect_vortices(grid: &FieldGrid) -> Result<Vec<DetectedVortex>> {
    if grid.rows < 2 || grid.cols < 2 {
        return Err(VortexError::GridTooSmall {
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    let phases = grid.phase();
    let found: Vec<Vec<DetectedVortex>> = (0..grid.rows - 1)
        .into_par_iter()
        .map(|row| {
            let mut out = Vec::new();
            for col in 0..grid.cols - 1 {
                let idx = [
                    row * grid.cols + col,
                    row * grid.cols + col + 1,
                    (row + 1) * grid.cols + col + 1,
                    (row + 1) * grid.cols + col,
                ];
                let charge = winding_number(idx.map(|i| phases[i]));
                if charge == 0 {
                    continue;
                }
                let corners = idx.map(|i| grid.values[i]);
                let (u, v) = bilinear_zero(corners).unwrap_or((0.5, 0.5));
                let (x0, y0) = grid.position(row, col);
                out.push(DetectedVortex {
                    charge,
                    pixel: (row, col),
                    position: (x0 + u * grid.step, y0 + v * grid.step),
                    plaquette_min_amplitude: corners
                        .iter()
                        .map(|c| c.norm())
                        .fold(f64::INFINITY, f64::min),
                });
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub prediction: usize,
    pub detection: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchPair>,
    pub unmatched_predictions: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
    /// Root-mean-square pair distance; 0 when nothing was paired.
    pub rms_residual: f64,
    /// For each unmatched prediction, its nearest unmatched detection, which
    /// lies beyond the tolerance.
    pub rejected: Vec<MatchPair>,
}

/// Greedy nearest-first pairing of two point sets.
pub fn match_points(
    predictions: &[(f64, f64)],
    detections: &[(f64, f64)],
    tolerance: f64,
) -> MatchReport {
    let dist = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).hypot(p.1 - q.1);
    let mut candidates: Vec<MatchPair> = Vec::new();
    for (i, p) in predictions.iter().enumerate() {
        for (j, q) in detections.iter().enumerate() {
            let d = dist(*p, *q);
            if d <= tolerance {
                candidates.push(MatchPair {
                    prediction: i,
                    detection: j,
                    distance: d,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.prediction.cmp(&b.prediction))
            .then(a.detection.cmp(&b.detection))
    });

    let mut used_p = vec![false; predictions.len()];
    let mut used_d = vec![false; detections.len()];
    let mut pairs = Vec::new();
    for c in candidates {
        if !used_p[c.prediction] && !used_d[c.detection] {
            used_p[c.prediction] = true;
            used_d[c.detection] = true;
            pairs.push(c);
        }
    }
    pairs.sort_by_key(|p| p.prediction);

    let unmatched_predictions: Vec<usize> =
        (0..predictions.len()).filter(|i| !used_p[*i]).collect();
    let unmatched_detections: Vec<usize> = (0..detections.len()).filter(|j| !used_d[*j]).collect();
    let rejected = unmatched_predictions
        .iter()
        .filter_map(|&i| {
            unmatched_detections
                .iter()
                .map(|&j| MatchPair {
                    prediction: i,
                    detection: j,
                    distance: dist(predictions[i], detections[j]),
                })
                .min_by(|a, b| a.distance.total_cmp(&b.distance))
        })
        .collect();

    let rms_residual = if pairs.is_empty() {
        0.0
    } else {
        (pairs.iter().map(|p| p.distance * p.distance).sum::<f64>() / pairs.len() as f64).sqrt()
    };
    MatchReport {
        pairs,
        unmatched_predictions,
        unmatched_detections,
        rms_residual,
        rejected,
    }
}

pub fn match_vortices(
    predictions: &[VortexPrediction],
    detections: &[DetectedVortex],
    tolerance: f64,
) -> Result<MatchReport> {
    if !(tolerance > 0.0) {
        return Err(VortexError::InvalidParameter(format!(
            "matching tolerance must be positive, got {tolerance}"
        )));
    }
    let p: Vec<_> = predictions.iter().map(|v| (v.x, v.y)).collect();
    let d: Vec<_> = detections.iter().map(|v| v.position).collect();
    Ok(match_points(&p, &d, tolerance))
}

/// Default matching tolerance, `0.02 z0`.
pub fn default_tolerance(z0: f64) -> f64 {
    0.02 * z0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::{sample_grid, ModelTag, PlaneWave, PlaneWaveField, Window};

    #[test]
    fn winding_examples() {
        assert_eq!(winding_number([0.0, PI / 2.0, PI, 3.0 * PI / 2.0]), 1);
        assert_eq!(winding_number([0.0, -PI / 2.0, -PI, -3.0 * PI / 2.0]), -1);
        assert_eq!(winding_number([0.3; 4]), 0);
    }

    #[test]
    fn wrap_step_range() {
        assert_eq!(wrap_step(PI), PI);
        assert_eq!(wrap_step(-PI), PI);
        assert!((wrap_step(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    fn grid_from(values: Vec<Complex64>, n: usize, step: f64) -> FieldGrid {
        FieldGrid {
            values,
            rows: n,
            cols: n,
            origin_x: 0.0,
            origin_y: 0.0,
            step,
            z0: 1.0,
            model_tag: ModelTag::Exact,
        }
    }

    #[test]
    fn single_vortex_localised() {
        // psi = (x - x0) + i (y - y0) is exactly bilinear
        let (x0, y0) = (1.37, 2.81);
        let n = 8;
        let step = 0.5;
        let mut values = Vec::new();
        for r in 0..n {
            for c in 0..n {
                values.push(Complex64::new(c as f64 * step - x0, r as f64 * step - y0));
            }
        }
        let g = grid_from(values, n, step);
        let found = detect_vortices(&g).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].charge, 1);
        assert!((found[0].position.0 - x0).abs() < 1e-12);
        assert!((found[0].position.1 - y0).abs() < 1e-12);
        assert_eq!(rectangle_charge(&g, 0, 0, n - 1, n - 1), 1);
    }

    #[test]
    fn antivortex_has_negative_charge() {
        let n = 6;
        let mut values = Vec::new();
        for r in 0..n {
            for c in 0..n {
                values.push(Complex64::new(c as f64 - 2.5, -(r as f64 - 2.2)));
            }
        }
        let found = detect_vortices(&grid_from(values, n, 1.0)).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].charge, -1);
    }

    #[test]
    fn bilinear_solve_conditioning() {
        // well-conditioned square, zero at the center
        let corners = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        assert!(bilinear_zero(corners).is_some());
        assert_eq!(bilinear_zero([Complex64::new(1.0, 1.0); 4]), None);
    }

    #[test]
    fn too_small() {
        let g = grid_from(vec![Complex64::new(1.0, 0.0)], 1, 1.0);
        assert_eq!(
            detect_vortices(&g),
            Err(VortexError::GridTooSmall { rows: 1, cols: 1 })
        );
    }

    #[test]
    fn constant_field_has_no_vortices() {
        let flat = PlaneWaveField(vec![PlaneWave::new(1.0, [0.0, 0.0, 1.0], 0.0).unwrap()]);
        let g = sample_grid(&flat, Window::centered(1.0), 2, 0.0).unwrap();
        assert!(detect_vortices(&g).unwrap().is_empty());
    }

    #[test]
    fn matching_basics() {
        let pts = vec![(0.0, 0.0), (1.0, 1.0), (5.0, -2.0)];
        let rep = match_points(&pts, &pts, 0.1);
        assert_eq!(rep.pairs.len(), 3);
        assert_eq!(rep.rms_residual, 0.0);

        let rep = match_points(&pts, &[], 0.1);
        assert_eq!(rep.unmatched_predictions, vec![0, 1, 2]);
        assert!(rep.pairs.is_empty());
    }

    #[test]
    fn matching_is_greedy_and_exclusive() {
        let preds = vec![(0.0, 0.0), (0.3, 0.0)];
        let dets = vec![(0.25, 0.0)];
        let rep = match_points(&preds, &dets, 1.0);
        assert_eq!(rep.pairs.len(), 1);
        assert_eq!(rep.pairs[0].prediction, 1);
        assert_eq!(rep.unmatched_predictions, vec![0]);
        assert!(rep.rejected.is_empty());

        let rep = match_points(&[(0.0, 0.0)], &[(2.0, 0.0)], 1.0);
        assert_eq!(rep.rejected.len(), 1);
        assert_eq!(rep.rejected[0].distance, 2.0);
    }

    #[test]
    fn matching_rejects_bad_tolerance() {
        assert!(match_vortices(&[], &[], 0.0).is_err());
    }
}
