//! Scalar field synthesis: plane-wave triples, exact spherical point sources,
//! the far-field approximation, and sampled rasters over a `z = z0` plane.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};

/// Maps an angle to the principal interval `[-pi, pi)`.
pub fn wrap_phase(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU for inputs a hair below a multiple of 2pi
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Phase of a complex sample in `[-pi, pi)`.
pub fn principal_phase(value: Complex64) -> f64 {
    let phase = value.im.atan2(value.re);
    if phase >= PI {
        -PI
    } else {
        phase
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub amplitude: f64,
    pub wavevector: [f64; 3],
    pub phase_offset: f64,
}

impl PlaneWave {
    pub fn new(amplitude: f64, wavevector: [f64; 3], phase_offset: f64) -> Result<Self> {
        if !(amplitude >= 0.0) {
            return Err(VortexError::InvalidParameter(format!(
                "plane-wave amplitude must be non-negative, got {amplitude}"
            )));
        }
        let norm = wavevector.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(VortexError::InvalidParameter(
                "plane-wave wavevector must be non-zero".into(),
            ));
        }
        Ok(Self {
            amplitude,
            wavevector,
            phase_offset,
        })
    }

    /// The symmetric triple with transverse components 120 degrees apart and a
    /// common longitudinal component of 10: `(sqrt3, -1, 10)`, `(-sqrt3, -1, 10)`, `(0, 2, 10)`.
    pub fn reference_triple() -> [PlaneWave; 3] {
        let s3 = 3f64.sqrt();
        [
            PlaneWave {
                amplitude: 1.0,
                wavevector: [s3, -1.0, 10.0],
                phase_offset: 0.0,
            },
            PlaneWave {
                amplitude: 1.0,
                wavevector: [-s3, -1.0, 10.0],
                phase_offset: 0.0,
            },
            PlaneWave {
                amplitude: 1.0,
                wavevector: [0.0, 2.0, 10.0],
                phase_offset: 0.0,
            },
        ]
    }

    pub fn value(&self, point: [f64; 3]) -> Complex64 {
        let k_dot_r: f64 = self
            .wavevector
            .iter()
            .zip(point.iter())
            .map(|(k, r)| k * r)
            .sum();
        Complex64::from_polar(self.amplitude, k_dot_r + self.phase_offset)
    }
}

/// Three coplanar point sources in `z = 0`.
///
/// Source 1 sits at the origin, source 2 on the +x axis at distance `r2`,
/// source 3 at distance `r3` and polar angle `theta3`. Phases are relative to
/// source 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceArrangement {
    pub wavelength: f64,
    pub r2: f64,
    pub r3: f64,
    pub theta3: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub amplitudes: [f64; 3],
}

/// Below this |sin theta3| the arrangement is treated as collinear.
pub const COLLINEAR_SIN_EPS: f64 = 1e-12;

impl SourceArrangement {
    pub fn new(wavelength: f64, r2: f64, r3: f64, theta3: f64) -> Result<Self> {
        let arr = Self {
            wavelength,
            r2,
            r3,
            theta3,
            phi2: 0.0,
            phi3: 0.0,
            amplitudes: [1.0, 1.0, 1.0],
        };
        arr.validate()?;
        Ok(arr)
    }

    pub fn with_phases(mut self, phi2: f64, phi3: f64) -> Self {
        self.phi2 = phi2;
        self.phi3 = phi3;
        self
    }

    pub fn with_amplitudes(mut self, amplitudes: [f64; 3]) -> Self {
        self.amplitudes = amplitudes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(VortexError::InvalidParameter(format!(
                "wavelength must be positive, got {}",
                self.wavelength
            )));
        }
        if !(self.r2 >= 0.0) || !(self.r3 >= 0.0) {
            return Err(VortexError::InvalidParameter(
                "source distances r2, r3 must be non-negative".into(),
            ));
        }
        if self.amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return Err(VortexError::InvalidParameter(
                "amplitudes must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn positions(&self) -> [[f64; 3]; 3] {
        [
            [0.0, 0.0, 0.0],
            [self.r2, 0.0, 0.0],
            [
                self.r3 * self.theta3.cos(),
                self.r3 * self.theta3.sin(),
                0.0,
            ],
        ]
    }

    pub fn phases(&self) -> [f64; 3] {
        [0.0, self.phi2, self.phi3]
    }

    /// Geometric centroid of the three sources.
    pub fn centroid(&self) -> [f64; 3] {
        let p = self.positions();
        [
            (p[0][0] + p[1][0] + p[2][0]) / 3.0,
            (p[0][1] + p[1][1] + p[2][1]) / 3.0,
            0.0,
        ]
    }

    /// Largest pairwise source separation.
    pub fn max_spacing(&self) -> f64 {
        let p = self.positions();
        let d = |a: [f64; 3], b: [f64; 3]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        d(p[0], p[1]).max(d(p[0], p[2])).max(d(p[1], p[2]))
    }

    pub fn is_collinear(&self) -> bool {
        self.r2 == 0.0 || self.r3 == 0.0 || self.theta3.sin().abs() < COLLINEAR_SIN_EPS
    }

    /// Returns the common amplitude, or `UnequalAmplitudes`.
    pub fn common_amplitude(&self) -> Result<f64> {
        let [a1, a2, a3] = self.amplitudes;
        if a1 == a2 && a2 == a3 {
            Ok(a1)
        } else {
            Err(VortexError::UnequalAmplitudes(a1, a2, a3))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Exact,
    Farfield,
    Planewave,
    Pinhole,
}

/// Anything that can be evaluated at a point in space.
pub trait FieldModel: Sync {
    fn value(&self, point: [f64; 3]) -> Result<Complex64>;
    fn tag(&self) -> ModelTag;
}

/// `sum_j A_j exp[i(k_j . r + phi_j)]`.
pub fn plane_superposition(waves: &[PlaneWave], point: [f64; 3]) -> Complex64 {
    waves.iter().map(|w| w.value(point)).sum()
}

/// Exact superposition of three outgoing spherical waves, no approximation.
pub fn spherical_superposition(arr: &SourceArrangement, point: [f64; 3]) -> Result<Complex64> {
    let k = arr.wavenumber();
    let mut total = Complex64::new(0.0, 0.0);
    for (j, (source, (amp, phase))) in arr
        .positions()
        .iter()
        .zip(arr.amplitudes.iter().zip(arr.phases()))
        .enumerate()
    {
        let dx = point[0] - source[0];
        let dy = point[1] - source[1];
        let dz = point[2] - source[2];
        let dist = (dx * dx + dy * dy + dz * dz).sqrt();
        if dist == 0.0 {
            return Err(VortexError::SourceCoincidence(j + 1));
        }
        total += Complex64::from_polar(amp / dist, k * dist + phase);
    }
    Ok(total)
}

/// Far-field value at cylindrical coordinates `(r_perp, theta, z0)`.
///
/// Phases are linearised as `r - r_perp . r_j / r` and all three amplitudes
/// as `A / r`; requires equal source amplitudes.
pub fn farfield_value(
    arr: &SourceArrangement,
    r_perp: f64,
    theta: f64,
    z0: f64,
) -> Result<Complex64> {
    let amp = arr.common_amplitude()?;
    if !(z0 > 0.0) {
        return Err(VortexError::InvalidParameter(format!(
            "far-field model needs z0 > 0, got {z0}"
        )));
    }
    let k = arr.wavenumber();
    let r = (z0 * z0 + r_perp * r_perp).sqrt();
    let proj2 = r_perp * arr.r2 * theta.cos() / r;
    let proj3 = r_perp * arr.r3 * (theta - arr.theta3).cos() / r;
    let sum = Complex64::from_polar(1.0, k * r)
        + Complex64::from_polar(1.0, k * (r - proj2) + arr.phi2)
        + Complex64::from_polar(1.0, k * (r - proj3) + arr.phi3);
    Ok(sum * (amp / r))
}

/// Exact spherical-source model.
#[derive(Debug, Clone, Copy)]
pub struct ExactField(pub SourceArrangement);

impl FieldModel for ExactField {
    fn value(&self, point: [f64; 3]) -> Result<Complex64> {
        spherical_superposition(&self.0, point)
    }

    fn tag(&self) -> ModelTag {
        ModelTag::Exact
    }
}

/// Far-field spherical-source model.
#[derive(Debug, Clone, Copy)]
pub struct FarField(pub SourceArrangement);

impl FieldModel for FarField {
    fn value(&self, point: [f64; 3]) -> Result<Complex64> {
        let r_perp = point[0].hypot(point[1]);
        let theta = point[1].atan2(point[0]);
        farfield_value(&self.0, r_perp, theta, point[2])
    }

    fn tag(&self) -> ModelTag {
        ModelTag::Farfield
    }
}

#[derive(Debug, Clone)]
pub struct PlaneWaveField(pub Vec<PlaneWave>);

impl FieldModel for PlaneWaveField {
    fn value(&self, point: [f64; 3]) -> Result<Complex64> {
        Ok(plane_superposition(&self.0, point))
    }

    fn tag(&self) -> ModelTag {
        ModelTag::Planewave
    }
}

/// Square observation window in the `z = z0` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center_x: f64,
    pub center_y: f64,
    pub half_width: f64,
}

impl Window {
    pub fn centered(half_width: f64) -> Self {
        Self {
            center_x: 0.0,
            center_y: 0.0,
            half_width,
        }
    }

    /// Default window: centered on the axis, half-width `0.6 z0`.
    pub fn default_for(z0: f64) -> Self {
        Self::centered(0.6 * z0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.center_x).abs() < self.half_width && (y - self.center_y).abs() < self.half_width
    }
}

pub const DEFAULT_RESOLUTION: usize = 512;

/// Row-major raster of complex samples. Row index grows with `y`, column
/// index with `x`; sample `(row, col)` sits at
/// `(origin_x + col * step, origin_y + row * step, z0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub values: Vec<Complex64>,
    pub rows: usize,
    pub cols: usize,
    pub origin_x: f64,
    pub origin_y: f64,
    pub step: f64,
    pub z0: f64,
    pub model_tag: ModelTag,
}

impl FieldGrid {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.cols + col]
    }

    pub fn position(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_x + col as f64 * self.step,
            self.origin_y + row as f64 * self.step,
        )
    }

    pub fn amplitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.values.iter().map(|v| principal_phase(*v)).collect()
    }

    /// Physical extent `(x_min, x_max, y_min, y_max)` of the sample centers.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        let (x1, y1) = self.position(self.rows - 1, self.cols - 1);
        (self.origin_x, x1, self.origin_y, y1)
    }
}

/// Samples `field` at pixel centers of a `resolution x resolution` raster
/// covering `window` in the plane `z = z0`.
pub fn sample_grid<F: FieldModel + ?Sized>(
    field: &F,
    window: Window,
    resolution: usize,
    z0: f64,
) -> Result<FieldGrid> {
    if resolution < 2 {
        return Err(VortexError::InvalidParameter(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    if !(window.half_width > 0.0) {
        return Err(VortexError::InvalidParameter(format!(
            "window half-width must be positive, got {}",
            window.half_width
        )));
    }
    let tag = field.tag();
    if tag != ModelTag::Planewave && !(z0 > 0.0) {
        return Err(VortexError::InvalidParameter(format!(
            "z0 must be positive for {tag:?} fields, got {z0}"
        )));
    }
    let step = 2.0 * window.half_width / resolution as f64;
    let origin_x = window.center_x - window.half_width + 0.5 * step;
    let origin_y = window.center_y - window.half_width + 0.5 * step;

    let rows: Vec<Vec<Complex64>> = (0..resolution)
        .into_par_iter()
        .map(|row| {
            let y = origin_y + row as f64 * step;
            (0..resolution)
                .map(|col| field.value([origin_x + col as f64 * step, y, z0]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(FieldGrid {
        values: rows.into_iter().flatten().collect(),
        rows: resolution,
        cols: resolution,
        origin_x,
        origin_y,
        step,
        z0,
        model_tag: tag,
    })
}

/// Removes the phase of a spherical wave radiated from the sources' centroid:
/// every sample is multiplied by `exp(-i k r_c)`. Amplitudes are untouched.
pub fn subtract_background(grid: &FieldGrid, arr: &SourceArrangement) -> Result<FieldGrid> {
    if grid.model_tag == ModelTag::Planewave {
        return Err(VortexError::UnsupportedModel(
            "background subtraction applies to spherical-source fields".into(),
        ));
    }
    let k = arr.wavenumber();
    let c = arr.centroid();
    let mut out = grid.clone();
    out.values
        .par_chunks_mut(grid.cols)
        .enumerate()
        .for_each(|(row, chunk)| {
            for (col, v) in chunk.iter_mut().enumerate() {
                let (x, y) = grid.position(row, col);
                let rc = ((x - c[0]).powi(2) + (y - c[1]).powi(2) + grid.z0 * grid.z0).sqrt();
                *v *= Complex64::from_polar(1.0, -k * rc);
            }
        });
    Ok(out)
}
