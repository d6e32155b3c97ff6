//! The `(m, n)` parameter space: the conic whose interior holds every index
//! pair that yields a vortex pair, its geometry, and lattice-point enumeration.
//!
//! Coefficients and closed-form invariants describe the conic for in-phase
//! sources. Source phases translate the integer lattice instead of reshaping
//! the ellipse, see [`lattice_shift`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::wavefield::{SourceArrangement, COLLINEAR_SIN_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseDescriptor {
    pub a: f64,
    pub h: f64,
    pub b: f64,
    pub g: f64,
    pub f: f64,
    pub c: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub delta: f64,
    pub tau: f64,
    pub m0: f64,
    pub n0: f64,
    pub phi_rot: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub wavenumber: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicClass {
    Ellipse,
    DegenerateLine,
    Empty,
}

impl EllipseDescriptor {
    /// Value of `Q(m, n) = a m^2 + 2h mn + b n^2 + 2g m + 2f n + c`.
    pub fn q(&self, m: f64, n: f64) -> f64 {
        self.a * m * m
            + 2.0 * self.h * m * n
            + self.b * n * n
            + 2.0 * self.g * m
            + 2.0 * self.f * n
            + self.c
    }

    /// Direction of the longer semi-axis, measured anticlockwise from the
    /// `m` axis, in `(-pi/2, pi/2]`.
    pub fn major_axis_angle(&self) -> f64 {
        // eigenvector of the smaller eigenvalue of [[a, h], [h, b]]
        let larger = 0.5 * (2.0 * self.h).atan2(self.a - self.b);
        let angle = larger + 0.5 * PI;
        if angle > 0.5 * PI {
            angle - PI
        } else {
            angle
        }
    }
}

/// Determinant of the 3x3 conic matrix.
pub fn big_delta_from_coefficients(d: &EllipseDescriptor) -> f64 {
    d.a * (d.b * d.c - d.f * d.f) - d.h * (d.h * d.c - d.f * d.g) + d.g * (d.h * d.f - d.b * d.g)
}

/// `arccot` with range `(0, pi)`; `arccot(+-inf)` gives `0` and `pi`.
fn arccot(x: f64) -> f64 {
    1f64.atan2(x)
}

pub fn conic_from_arrangement(arr: &SourceArrangement) -> EllipseDescriptor {
    let k = arr.wavenumber();
    let (r2, r3) = (arr.r2, arr.r3);
    let (sin3, cos3) = arr.theta3.sin_cos();
    let kterm = 3.0 * k * r2 * r3 * sin3 / TAU;

    let a = 9.0 * r3 * r3;
    let h = -9.0 * r2 * r3 * cos3;
    let b = 9.0 * r2 * r2;
    let g = 3.0 * r3 * r3 - 6.0 * r2 * r3 * cos3;
    let f = 6.0 * r2 * r2 - 3.0 * r2 * r3 * cos3;
    let c = r3 * r3 + 4.0 * r2 * r2 - 4.0 * r2 * r3 * cos3 - kterm * kterm;

    let area2 = (r2 * r3 * sin3).powi(2);
    let big_delta = -(27.0 * k / TAU * area2).powi(2);
    let delta = (9.0 * r2 * r3 * sin3).powi(2);
    let tau = 9.0 * (r2 * r2 + r3 * r3);

    let denom = h * h - a * b;
    let (m0, n0) = if denom != 0.0 {
        ((b * g - h * f) / denom, (a * f - h * g) / denom)
    } else {
        (-1.0 / 3.0, -2.0 / 3.0)
    };

    let phi_rot = if h == 0.0 {
        // (b - a) / 2h is +-inf, or 0/0 for a circle
        if b > a {
            0.0
        } else if b < a {
            0.5 * PI
        } else {
            0.0
        }
    } else {
        0.5 * arccot((b - a) / (2.0 * h))
    };

    let root = ((2.0 * r2 * r3 * cos3).powi(2) + (r2 * r2 - r3 * r3).powi(2)).sqrt();
    let sum_sq = r2 * r2 + r3 * r3;
    let lambda_plus = 4.5 * (sum_sq + root);
    let lambda_minus = 4.5 * (sum_sq - root);

    let collinear = sin3.abs() < COLLINEAR_SIN_EPS;
    let (s_plus, s_minus) = if r2 == 0.0 || r3 == 0.0 || k == 0.0 {
        (0.0, 0.0)
    } else if collinear {
        // the ellipse collapses onto a diagonal of the bounding rectangle
        (0.0, (k / TAU) * r2.hypot(r3))
    } else {
        let num = (k * r2 * r3 * sin3).abs();
        let sp = num / (PI * (2.0 * (root + sum_sq).abs()).sqrt());
        let sm = num / (PI * (2.0 * (root - sum_sq).abs()).sqrt());
        (sp, sm)
    };

    EllipseDescriptor {
        a,
        h,
        b,
        g,
        f,
        c,
        big_delta,
        delta,
        tau,
        m0,
        n0,
        phi_rot,
        s_plus,
        s_minus,
        lambda_plus,
        lambda_minus,
        wavenumber: k,
    }
}

pub fn classify(desc: &EllipseDescriptor) -> ConicClass {
    if desc.a <= 0.0 || desc.b <= 0.0 || desc.wavenumber <= 0.0 {
        return ConicClass::Empty;
    }
    // delta / (a b) = sin^2(theta3)
    if desc.delta <= COLLINEAR_SIN_EPS * COLLINEAR_SIN_EPS * desc.a * desc.b {
        return ConicClass::DegenerateLine;
    }
    if desc.big_delta != 0.0 && desc.delta > 0.0 && desc.big_delta / desc.tau < 0.0 {
        ConicClass::Ellipse
    } else {
        ConicClass::Empty
    }
}

/// Lattice translation produced by the source phases: `(phi2 / 2pi, phi3 / 2pi)`.
pub fn lattice_shift(phi2: f64, phi3: f64) -> (f64, f64) {
    (phi2 / TAU, phi3 / TAU)
}

/// Envelope of the ellipse family obtained by sweeping `theta3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingRectangle {
    pub center: (f64, f64),
    pub width_m: f64,
    pub width_n: f64,
}

impl BoundingRectangle {
    pub fn contains(&self, m: f64, n: f64) -> bool {
        (m - self.center.0).abs() < 0.5 * self.width_m
            && (n - self.center.1).abs() < 0.5 * self.width_n
    }
}

pub fn bounding_rectangle(arr: &SourceArrangement) -> BoundingRectangle {
    let k = arr.wavenumber();
    let (dm, dn) = lattice_shift(arr.phi2, arr.phi3);
    BoundingRectangle {
        center: (-1.0 / 3.0 + dm, -2.0 / 3.0 + dn),
        width_m: k * arr.r2 / PI,
        width_n: k * arr.r3 / PI,
    }
}

/// Left and right sides of the admissibility inequality at `(m, n)` after
/// removing the phase shift.
fn inequality_sides(arr: &SourceArrangement, m: f64, n: f64) -> (f64, f64) {
    let k = arr.wavenumber();
    let (dm, dn) = lattice_shift(arr.phi2, arr.phi3);
    let (mp, np) = (m - dm, n - dn);
    let (sin3, cos3) = arr.theta3.sin_cos();
    let ratio = arr.r2 / arr.r3;
    let lhs = ((1.0 + 3.0 * mp) * sin3).powi(2)
        + ((2.0 + 3.0 * np) * ratio - (1.0 + 3.0 * mp) * cos3).powi(2);
    let rhs = (3.0 * k * arr.r2 * sin3 / TAU).powi(2);
    (lhs, rhs)
}

/// Normalised depth of `(m, n)` inside the (phase-shifted) ellipse:
/// 1 at the center, 0 on the boundary, negative outside.
pub fn ellipse_depth(arr: &SourceArrangement, m: f64, n: f64) -> f64 {
    let (lhs, rhs) = inequality_sides(arr, m, n);
    if rhs > 0.0 {
        1.0 - lhs / rhs
    } else {
        f64::NEG_INFINITY
    }
}

fn scan_ranges(
    arr: &SourceArrangement,
) -> (std::ops::RangeInclusive<i64>, std::ops::RangeInclusive<i64>) {
    let rect = bounding_rectangle(arr);
    let half_m = 0.5 * rect.width_m + 1.0;
    let half_n = 0.5 * rect.width_n + 1.0;
    (
        (rect.center.0 - half_m).floor() as i64..=(rect.center.0 + half_m).ceil() as i64,
        (rect.center.1 - half_n).floor() as i64..=(rect.center.1 + half_n).ceil() as i64,
    )
}

/// Whether `(m, n)` lies strictly inside the phase-shifted ellipse.
pub fn is_admissible(arr: &SourceArrangement, m: i64, n: i64) -> bool {
    if arr.is_collinear() {
        return false;
    }
    let (lhs, rhs) = inequality_sides(arr, m as f64, n as f64);
    lhs < rhs
}

/// All integer pairs strictly inside the phase-shifted ellipse, sorted
/// lexicographically. Collinear or degenerate arrangements give an empty list.
pub fn enumerate_lattice(arr: &SourceArrangement) -> Vec<(i64, i64)> {
    if classify(&conic_from_arrangement(arr)) != ConicClass::Ellipse || arr.is_collinear() {
        return Vec::new();
    }
    let (ms, ns) = scan_ranges(arr);
    let mut out = Vec::new();
    for m in ms {
        for n in ns.clone() {
            if is_admissible(arr, m, n) {
                out.push((m, n));
            }
        }
    }
    out
}

/// Lattice points whose normalised depth is within `tol` of the boundary,
/// inside or outside.
pub fn boundary_lattice_points(arr: &SourceArrangement, tol: f64) -> Vec<(i64, i64)> {
    if arr.is_collinear() || arr.wavenumber() == 0.0 {
        return Vec::new();
    }
    let (ms, ns) = scan_ranges(arr);
    let mut out = Vec::new();
    for m in ms {
        for n in ns.clone() {
            if ellipse_depth(arr, m as f64, n as f64).abs() < tol {
                out.push((m, n));
            }
        }
    }
    out
}

/// Approximate vortex count, twice the ellipse area: `k^2 |r2 r3 sin theta3| / 2pi`.
pub fn estimate_count(arr: &SourceArrangement) -> f64 {
    let k = arr.wavenumber();
    k * k / TAU * (arr.r2 * arr.r3 * arr.theta3.sin()).abs()
}
