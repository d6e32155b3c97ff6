//! Closed-form far-field vortex positions.
//!
//! At a zero of the far-field sum the three unit phasors close into an
//! equilateral triangle, which fixes the two relative phase angles up to
//! integer multiples of `2pi`. Each integer pair `(m, n)` then determines a
//! polar angle and a radius in the observation plane.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::lattice::{bounding_rectangle, lattice_shift};
use crate::wavefield::{farfield_value, SourceArrangement};

/// Magnitude of the far-field sum, relative to `3A / r`, below which a point
/// counts as a zero.
pub const ZERO_FIELD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasorAngles {
    pub gamma: f64,
    pub eta: f64,
    pub m: i64,
    pub n: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = VortexError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Branch::Plus),
            "minus" => Ok(Branch::Minus),
            other => Err(VortexError::InvalidParameter(format!(
                "unknown branch {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexPrediction {
    pub m: i64,
    pub n: i64,
    pub branch: Branch,
    /// Polar angle in `[0, 2pi)`.
    pub theta: f64,
    pub r_perp: f64,
    pub x: f64,
    pub y: f64,
    pub z0: f64,
}

impl VortexPrediction {
    fn new(m: i64, n: i64, branch: Branch, theta: f64, r_perp: f64, z0: f64) -> Self {
        let theta = theta.rem_euclid(TAU);
        // rem_euclid may return TAU for tiny negative inputs
        let theta = if theta >= TAU { 0.0 } else { theta };
        Self {
            m,
            n,
            branch,
            theta,
            r_perp,
            x: r_perp * theta.cos(),
            y: r_perp * theta.sin(),
            z0,
        }
    }
}

/// `M = 2(1 + 3m)pi - 3 phi2`, `N = 2(2 + 3n)pi - 3 phi3`.
pub fn mn_scale(m: i64, n: i64, phi2: f64, phi3: f64) -> (f64, f64) {
    (
        2.0 * (1.0 + 3.0 * m as f64) * PI - 3.0 * phi2,
        2.0 * (2.0 + 3.0 * n as f64) * PI - 3.0 * phi3,
    )
}

fn check_closed_form(arr: &SourceArrangement) -> Result<()> {
    arr.common_amplitude()?;
    if arr.is_collinear() {
        return Err(VortexError::CollinearArrangement);
    }
    Ok(())
}

fn check_z0(z0: f64) -> Result<()> {
    if z0 > 0.0 && z0.is_finite() {
        Ok(())
    } else {
        Err(VortexError::InvalidParameter(format!(
            "z0 must be positive, got {z0}"
        )))
    }
}

/// Principal-branch polar angle of the `(m, n)` core, in `(-pi/2, pi/2)`.
pub fn predict_theta(m: i64, n: i64, arr: &SourceArrangement) -> Result<f64> {
    check_closed_form(arr)?;
    let (big_m, big_n) = mn_scale(m, n, arr.phi2, arr.phi3);
    if big_m == 0.0 {
        return Err(VortexError::DegenerateIndex(m));
    }
    Ok(tan_theta(arr, big_m, big_n).atan())
}

fn tan_theta(arr: &SourceArrangement, big_m: f64, big_n: f64) -> f64 {
    let (sin3, cos3) = arr.theta3.sin_cos();
    ((arr.r2 / arr.r3) * (big_n / big_m) - cos3) / sin3
}

/// Solves the closure conditions `-3k r2 r_perp cos(theta) / r = scale_m` and
/// `-3k r3 r_perp cos(theta - theta3) / r = scale_n` for `(theta, r_perp)`.
fn solve_closure(
    arr: &SourceArrangement,
    scale_m: f64,
    scale_n: f64,
    z0: f64,
) -> Option<(f64, f64)> {
    if scale_m == 0.0 {
        return None;
    }
    let k = arr.wavenumber();
    let tan = tan_theta(arr, scale_m, scale_n);
    let radicand = (3.0 * k * arr.r2 / scale_m).powi(2) / (1.0 + tan * tan) - 1.0;
    if !(radicand > 0.0) {
        return None;
    }
    let r_perp = z0 / radicand.sqrt();
    // r_perp cos(theta) must have the sign of -scale_m
    let principal = tan.atan();
    let theta = if scale_m > 0.0 {
        principal + PI
    } else {
        principal
    };
    Some((theta, r_perp))
}

/// The vortex cores labelled by `(m, n)`.
///
/// The plus branch is the core whose phasors close with angles
/// `(2pi/3 + 2m pi, 4pi/3 + 2n pi)`. The minus branch closes the opposite
/// way round, at index `(-m - 1, -n - 1)`; for in-phase sources it is the
/// point reflection `theta + pi` of the plus branch. Both are exact zeros
/// of the far-field sum. For in-phase sources the two branches exist or
/// vanish together; returns an empty vector when `(m, n)` lies outside the
/// ellipse.
pub fn predict_vortex(
    m: i64,
    n: i64,
    arr: &SourceArrangement,
    z0: f64,
) -> Result<Vec<VortexPrediction>> {
    check_closed_form(arr)?;
    check_z0(z0)?;
    let (big_m, big_n) = mn_scale(m, n, arr.phi2, arr.phi3);
    if big_m == 0.0 {
        return Err(VortexError::DegenerateIndex(m));
    }
    let mut out = Vec::with_capacity(2);
    if let Some((theta, r)) = solve_closure(arr, big_m, big_n, z0) {
        out.push(VortexPrediction::new(m, n, Branch::Plus, theta, r, z0));
    }
    let mirror_m = -(2.0 * (1.0 + 3.0 * m as f64) * PI + 3.0 * arr.phi2);
    let mirror_n = -(2.0 * (2.0 + 3.0 * n as f64) * PI + 3.0 * arr.phi3);
    if let Some((theta, r)) = solve_closure(arr, mirror_m, mirror_n, z0) {
        out.push(VortexPrediction::new(m, n, Branch::Minus, theta, r, z0));
    }
    Ok(out)
}

/// Every far-field vortex core for the arrangement, sorted by `(m, n, branch)`.
pub fn predict_all(arr: &SourceArrangement, z0: f64) -> Result<Vec<VortexPrediction>> {
    check_closed_form(arr)?;
    check_z0(z0)?;
    // the plus branch uses the lattice shifted by +phase, the minus branch by -phase
    let rect = bounding_rectangle(arr);
    let (dm, dn) = lattice_shift(arr.phi2, arr.phi3);
    let half_m = 0.5 * rect.width_m + dm.abs() + 1.0;
    let half_n = 0.5 * rect.width_n + dn.abs() + 1.0;
    let (cm, cn) = (-1.0 / 3.0, -2.0 / 3.0);
    let mut out = Vec::new();
    for m in (cm - half_m).floor() as i64..=(cm + half_m).ceil() as i64 {
        for n in (cn - half_n).floor() as i64..=(cn + half_n).ceil() as i64 {
            match predict_vortex(m, n, arr, z0) {
                Ok(found) => out.extend(found),
                // M(m) = 0 puts the plus core on the theta = +-pi/2 asymptote;
                // it cannot be expressed in this parametrisation
                Err(VortexError::DegenerateIndex(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Phasor angles at a point in the plane `z = z0`, together with the nearest
/// integer labels of the equilateral-closure conditions.
pub fn phasor_angles(arr: &SourceArrangement, r_perp: f64, theta: f64, z0: f64) -> PhasorAngles {
    let k = arr.wavenumber();
    let r = (z0 * z0 + r_perp * r_perp).sqrt();
    let gamma = -k * r_perp * arr.r2 * theta.cos() / r + arr.phi2;
    let eta = -k * r_perp * arr.r3 * (theta - arr.theta3).cos() / r + arr.phi3;
    PhasorAngles {
        gamma,
        eta,
        m: ((gamma - 2.0 * PI / 3.0) / TAU).round() as i64,
        n: ((eta - 4.0 * PI / 3.0) / TAU).round() as i64,
    }
}

fn hyperbola(scale: f64, kr: f64, cos_angle: f64, z0: f64) -> Option<f64> {
    let radicand = (3.0 * kr * cos_angle).powi(2) - scale * scale;
    if radicand > 0.0 {
        Some(scale.abs() * z0 / radicand.sqrt())
    } else {
        None
    }
}

/// Radius along the trajectory a core follows as `phi2` varies, for fixed `m`.
pub fn hyperbola_m(m: i64, arr: &SourceArrangement, z0: f64, theta: f64) -> Result<Option<f64>> {
    check_z0(z0)?;
    let (big_m, _) = mn_scale(m, 0, arr.phi2, arr.phi3);
    if big_m == 0.0 {
        return Err(VortexError::DegenerateIndex(m));
    }
    Ok(hyperbola(big_m, arr.wavenumber() * arr.r2, theta.cos(), z0))
}

/// Radius along the trajectory a core follows as `phi3` varies, for fixed `n`.
pub fn hyperbola_n(n: i64, arr: &SourceArrangement, z0: f64, theta: f64) -> Result<Option<f64>> {
    check_z0(z0)?;
    let (_, big_n) = mn_scale(0, n, arr.phi2, arr.phi3);
    if big_n == 0.0 {
        return Err(VortexError::DegenerateIndex(n));
    }
    Ok(hyperbola(
        big_n,
        arr.wavenumber() * arr.r3,
        (theta - arr.theta3).cos(),
        z0,
    ))
}

/// An intersection of an `m` trajectory with an `n` trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryIntersection {
    pub theta: f64,
    pub r_perp: f64,
    /// Whether the far-field sum actually vanishes there.
    pub physical: bool,
}

/// Both intersections of the `m` and `n` trajectories, at `theta*` and
/// `theta* + pi`. Only points where the far-field sum vanishes are flagged
/// physical; for in-phase sources both are.
pub fn trajectory_intersections(
    m: i64,
    n: i64,
    arr: &SourceArrangement,
    z0: f64,
) -> Result<Vec<TrajectoryIntersection>> {
    let theta = predict_theta(m, n, arr)?;
    let amp = arr.common_amplitude()?;
    let mut out = Vec::new();
    for candidate in [theta, theta + PI] {
        let rm = hyperbola_m(m, arr, z0, candidate)?;
        let rn = hyperbola_n(n, arr, z0, candidate)?;
        if let (Some(rm), Some(_)) = (rm, rn) {
            let field = farfield_value(arr, rm, candidate, z0)?;
            let r = (z0 * z0 + rm * rm).sqrt();
            out.push(TrajectoryIntersection {
                theta: candidate.rem_euclid(TAU),
                r_perp: rm,
                physical: field.norm() < ZERO_FIELD_TOL * 3.0 * amp / r,
            });
        }
    }
    Ok(out)
}

/// Largest `|epsilon|` accepted by [`collinear_limit`].
pub const COLLINEAR_EPS_MAX: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialCoordinate {
    Real(f64),
    /// `r_perp = i * value`: the core has left the plane.
    Imaginary(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollinearLimit {
    pub theta: f64,
    pub r_perp: RadialCoordinate,
}

/// Small-angle form of the `(m, n)` core position for `theta3 = pi + epsilon`.
///
/// Uses `r2`, `r3`, the wavenumber and phases of `arr`; its `theta3` is
/// ignored in favour of `pi + epsilon`.
pub fn collinear_limit(
    epsilon: f64,
    m: i64,
    n: i64,
    arr: &SourceArrangement,
    z0: f64,
) -> Result<CollinearLimit> {
    if !(epsilon.abs() <= COLLINEAR_EPS_MAX) {
        return Err(VortexError::InvalidParameter(format!(
            "|epsilon| must not exceed {COLLINEAR_EPS_MAX}, got {epsilon}"
        )));
    }
    if !(arr.r2 > 0.0 && arr.r3 > 0.0) {
        return Err(VortexError::CollinearArrangement);
    }
    check_z0(z0)?;
    let (big_m, big_n) = mn_scale(m, n, arr.phi2, arr.phi3);
    if big_m == 0.0 {
        return Err(VortexError::DegenerateIndex(m));
    }
    let numerator = (arr.r2 / arr.r3) * (big_n / big_m) + 1.0;
    let (theta, inv_sec2) = if numerator == 0.0 {
        (0.0, 1.0)
    } else if epsilon == 0.0 {
        (FRAC_PI_2.copysign(numerator), 0.0)
    } else {
        let tan = numerator / epsilon;
        (tan.atan(), 1.0 / (1.0 + tan * tan))
    };
    let k = arr.wavenumber();
    let radicand = (3.0 * k * arr.r2 / big_m).powi(2) * inv_sec2 - 1.0;
    let r_perp = if radicand > 0.0 {
        RadialCoordinate::Real(z0 / radicand.sqrt())
    } else if radicand == 0.0 {
        RadialCoordinate::Real(f64::INFINITY)
    } else {
        RadialCoordinate::Imaginary(z0 / (-radicand).sqrt())
    };
    Ok(CollinearLimit { theta, r_perp })
}
