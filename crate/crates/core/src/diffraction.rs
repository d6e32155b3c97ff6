//! First-kind Rayleigh-Sommerfeld propagation from ideal point pinholes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::wavefield::{FieldModel, ModelTag, SourceArrangement};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pinhole {
    pub x: f64,
    pub y: f64,
    pub weight: Complex64,
}

/// An opaque screen in `z = 0` with delta-function apertures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinholeScreen {
    pub pinholes: Vec<Pinhole>,
    pub k: f64,
}

impl PinholeScreen {
    pub fn new(pinholes: Vec<Pinhole>, k: f64) -> Result<Self> {
        if pinholes.is_empty() {
            return Err(VortexError::InvalidParameter(
                "a screen needs at least one pinhole".into(),
            ));
        }
        if !(k > 0.0) {
            return Err(VortexError::InvalidParameter(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        Ok(Self { pinholes, k })
    }

    /// Pinholes at the source positions, weighted `A_j exp(i phi_j)`.
    pub fn from_arrangement(arr: &SourceArrangement) -> Self {
        let pinholes = arr
            .positions()
            .iter()
            .zip(arr.amplitudes.iter().zip(arr.phases()))
            .map(|(p, (a, phi))| Pinhole {
                x: p[0],
                y: p[1],
                weight: Complex64::from_polar(*a, phi),
            })
            .collect();
        Self {
            pinholes,
            k: arr.wavenumber(),
        }
    }
}

fn distance(obs: [f64; 3], hole: (f64, f64)) -> f64 {
    ((obs[0] - hole.0).powi(2) + (obs[1] - hole.1).powi(2) + obs[2] * obs[2]).sqrt()
}

/// `K = (1/2pi) (z/r) (ik/r - 1/r^2) exp(ikr)`.
pub fn rs_kernel(obs: [f64; 3], hole: (f64, f64), k: f64) -> Result<Complex64> {
    if obs[2] < 0.0 {
        return Err(VortexError::InvalidParameter(format!(
            "observation point must satisfy z >= 0, got {}",
            obs[2]
        )));
    }
    let r = distance(obs, hole);
    if r == 0.0 {
        return Err(VortexError::SingularPoint);
    }
    let z = obs[2];
    let bracket = Complex64::new(-1.0 / (r * r), k / r);
    Ok(bracket * Complex64::from_polar(z / (TAU * r), k * r))
}

/// Far-field kernel `(ikz / 2pi r^2) exp(ikr)`.
pub fn rs_kernel_far(obs: [f64; 3], hole: (f64, f64), k: f64) -> Complex64 {
    let r = distance(obs, hole);
    Complex64::new(0.0, k * obs[2] / (TAU * r * r)) * Complex64::from_polar(1.0, k * r)
}

pub fn pinhole_field(screen: &PinholeScreen, obs: [f64; 3]) -> Result<Complex64> {
    screen
        .pinholes
        .iter()
        .try_fold(Complex64::new(0.0, 0.0), |acc, p| {
            Ok(acc + p.weight * rs_kernel(obs, (p.x, p.y), screen.k)?)
        })
}

impl FieldModel for PinholeScreen {
    fn value(&self, point: [f64; 3]) -> Result<Complex64> {
        pinhole_field(self, point)
    }

    fn tag(&self) -> ModelTag {
        ModelTag::Pinhole
    }
}

/// `N_F = a^2 / (lambda0 z)`.
pub fn fresnel_number(max_spacing: f64, lambda0: f64, z: f64) -> f64 {
    max_spacing * max_spacing / (lambda0 * z)
}
