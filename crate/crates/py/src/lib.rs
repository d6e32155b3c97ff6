//! Python bindings. Angles are in radians and lengths in the same units as
//! the wavelength, as in the Rust API.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use trivortex::analytic::{self, Branch};
use trivortex::detector;
use trivortex::lattice;
use trivortex::wavefield::{self, ExactField, FarField, FieldModel, PlaneWave, PlaneWaveField};

create_exception!(trivortex, VortexError, PyValueError);

fn err(e: trivortex::VortexError) -> PyErr {
    VortexError::new_err(e.to_string())
}

#[pyclass(
    name = "SourceArrangement",
    module = "trivortex",
    frozen,
    from_py_object
)]
#[derive(Clone, Copy)]
pub struct PyArrangement {
    inner: wavefield::SourceArrangement,
}

#[pymethods]
impl PyArrangement {
    #[new]
    #[pyo3(signature = (r2, r3, theta3, phi2 = 0.0, phi3 = 0.0, amplitudes = (1.0, 1.0, 1.0), wavelength = 1.0))]
    fn new(
        r2: f64,
        r3: f64,
        theta3: f64,
        phi2: f64,
        phi3: f64,
        amplitudes: (f64, f64, f64),
        wavelength: f64,
    ) -> PyResult<Self> {
        let inner = wavefield::SourceArrangement::new(wavelength, r2, r3, theta3)
            .map_err(err)?
            .with_phases(phi2, phi3)
            .with_amplitudes([amplitudes.0, amplitudes.1, amplitudes.2]);
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength
    }
    #[getter]
    fn r2(&self) -> f64 {
        self.inner.r2
    }
    #[getter]
    fn r3(&self) -> f64 {
        self.inner.r3
    }
    #[getter]
    fn theta3(&self) -> f64 {
        self.inner.theta3
    }
    #[getter]
    fn phi2(&self) -> f64 {
        self.inner.phi2
    }
    #[getter]
    fn phi3(&self) -> f64 {
        self.inner.phi3
    }
    #[getter]
    fn amplitudes(&self) -> (f64, f64, f64) {
        let a = self.inner.amplitudes;
        (a[0], a[1], a[2])
    }
    #[getter]
    fn wavenumber(&self) -> f64 {
        self.inner.wavenumber()
    }

    fn is_collinear(&self) -> bool {
        self.inner.is_collinear()
    }

    fn positions(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .positions()
            .iter()
            .map(|p| (p[0], p[1], p[2]))
            .collect()
    }

    /// Exact spherical-wave sum at a point.
    fn field(&self, x: f64, y: f64, z: f64) -> PyResult<Complex64> {
        wavefield::spherical_superposition(&self.inner, [x, y, z]).map_err(err)
    }

    /// Far-field sum at polar coordinates `(r_perp, theta)` in the plane `z0`.
    fn farfield(&self, r_perp: f64, theta: f64, z0: f64) -> PyResult<Complex64> {
        wavefield::farfield_value(&self.inner, r_perp, theta, z0).map_err(err)
    }

    fn __repr__(&self) -> String {
        let a = &self.inner;
        format!(
            "SourceArrangement(r2={}, r3={}, theta3={}, phi2={}, phi3={}, amplitudes={:?}, wavelength={})",
            a.r2, a.r3, a.theta3, a.phi2, a.phi3, a.amplitudes, a.wavelength
        )
    }
}

#[pyclass(
    name = "VortexPrediction",
    module = "trivortex",
    frozen,
    get_all,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyPrediction {
    m: i64,
    n: i64,
    branch: String,
    theta: f64,
    r_perp: f64,
    x: f64,
    y: f64,
    z0: f64,
}

impl From<analytic::VortexPrediction> for PyPrediction {
    fn from(p: analytic::VortexPrediction) -> Self {
        Self {
            m: p.m,
            n: p.n,
            branch: p.branch.as_str().to_string(),
            theta: p.theta,
            r_perp: p.r_perp,
            x: p.x,
            y: p.y,
            z0: p.z0,
        }
    }
}

impl PyPrediction {
    fn to_core(&self) -> PyResult<analytic::VortexPrediction> {
        let branch: Branch = self.branch.parse().map_err(err)?;
        Ok(analytic::VortexPrediction {
            m: self.m,
            n: self.n,
            branch,
            theta: self.theta,
            r_perp: self.r_perp,
            x: self.x,
            y: self.y,
            z0: self.z0,
        })
    }
}

#[pymethods]
impl PyPrediction {
    fn __repr__(&self) -> String {
        format!(
            "VortexPrediction(m={}, n={}, branch='{}', x={:.6}, y={:.6})",
            self.m, self.n, self.branch, self.x, self.y
        )
    }
}

#[pyclass(
    name = "DetectedVortex",
    module = "trivortex",
    frozen,
    get_all,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyDetection {
    charge: i32,
    pixel: (usize, usize),
    position: (f64, f64),
    plaquette_min_amplitude: f64,
}

impl From<detector::DetectedVortex> for PyDetection {
    fn from(d: detector::DetectedVortex) -> Self {
        Self {
            charge: d.charge,
            pixel: d.pixel,
            position: d.position,
            plaquette_min_amplitude: d.plaquette_min_amplitude,
        }
    }
}

#[pymethods]
impl PyDetection {
    fn __repr__(&self) -> String {
        format!(
            "DetectedVortex(charge={}, x={:.6}, y={:.6})",
            self.charge, self.position.0, self.position.1
        )
    }
}

/// A sampled raster. Row index grows with `y`.
#[pyclass(name = "FieldGrid", module = "trivortex", frozen)]
pub struct PyGrid {
    inner: wavefield::FieldGrid,
}

#[pymethods]
impl PyGrid {
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows, self.inner.cols)
    }
    #[getter]
    fn step(&self) -> f64 {
        self.inner.step
    }
    #[getter]
    fn origin(&self) -> (f64, f64) {
        (self.inner.origin_x, self.inner.origin_y)
    }
    #[getter]
    fn z0(&self) -> f64 {
        self.inner.z0
    }

    fn values(&self) -> Vec<Vec<Complex64>> {
        self.inner
            .values
            .chunks(self.inner.cols)
            .map(<[_]>::to_vec)
            .collect()
    }

    fn amplitude(&self) -> Vec<Vec<f64>> {
        self.inner
            .amplitude()
            .chunks(self.inner.cols)
            .map(<[_]>::to_vec)
            .collect()
    }

    fn phase(&self) -> Vec<Vec<f64>> {
        self.inner
            .phase()
            .chunks(self.inner.cols)
            .map(<[_]>::to_vec)
            .collect()
    }

    fn detect(&self) -> PyResult<Vec<PyDetection>> {
        let found = detector::detect_vortices(&self.inner).map_err(err)?;
        Ok(found.into_iter().map(Into::into).collect())
    }
}

fn model_for(arr: &wavefield::SourceArrangement, model: &str) -> PyResult<Box<dyn FieldModel>> {
    Ok(match model {
        "exact" => Box::new(ExactField(*arr)),
        "farfield" => Box::new(FarField(*arr)),
        "pinhole" => Box::new(trivortex::PinholeScreen::from_arrangement(arr)),
        "planewave" => Box::new(PlaneWaveField(PlaneWave::reference_triple().to_vec())),
        other => {
            return Err(VortexError::new_err(format!(
            "UnsupportedModel: unknown model {other:?}; use exact, farfield, pinhole or planewave"
        )))
        }
    })
}

/// Samples a field on a square raster of pixel centers.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (arr, z0, half_width = None, resolution = 512, model = "exact", center = (0.0, 0.0), subtract_background = false))]
fn sample_grid(
    py: Python<'_>,
    arr: PyArrangement,
    z0: f64,
    half_width: Option<f64>,
    resolution: usize,
    model: &str,
    center: (f64, f64),
    subtract_background: bool,
) -> PyResult<PyGrid> {
    let field = model_for(&arr.inner, model)?;
    let window = wavefield::Window {
        center_x: center.0,
        center_y: center.1,
        half_width: half_width.unwrap_or(0.6 * z0),
    };
    let inner = py
        .detach(|| {
            let grid = wavefield::sample_grid(field.as_ref(), window, resolution, z0)?;
            if subtract_background {
                wavefield::subtract_background(&grid, &arr.inner)
            } else {
                Ok(grid)
            }
        })
        .map_err(err)?;
    Ok(PyGrid { inner })
}

#[pyfunction]
fn predict_all(arr: PyArrangement, z0: f64) -> PyResult<Vec<PyPrediction>> {
    let preds = analytic::predict_all(&arr.inner, z0).map_err(err)?;
    Ok(preds.into_iter().map(Into::into).collect())
}

#[pyfunction]
fn predict_vortex(m: i64, n: i64, arr: PyArrangement, z0: f64) -> PyResult<Vec<PyPrediction>> {
    let preds = analytic::predict_vortex(m, n, &arr.inner, z0).map_err(err)?;
    Ok(preds.into_iter().map(Into::into).collect())
}

#[pyfunction]
fn predict_theta(m: i64, n: i64, arr: PyArrangement) -> PyResult<f64> {
    analytic::predict_theta(m, n, &arr.inner).map_err(err)
}

#[pyfunction]
fn mn_scale(m: i64, n: i64, phi2: f64, phi3: f64) -> (f64, f64) {
    analytic::mn_scale(m, n, phi2, phi3)
}

#[pyfunction]
fn enumerate_lattice(arr: PyArrangement) -> Vec<(i64, i64)> {
    lattice::enumerate_lattice(&arr.inner)
}

#[pyfunction]
fn estimate_count(arr: PyArrangement) -> f64 {
    lattice::estimate_count(&arr.inner)
}

/// Conic coefficients, invariants, center, rotation and semi-axes as a dict.
#[pyfunction]
fn ellipse<'py>(py: Python<'py>, arr: PyArrangement) -> PyResult<Bound<'py, PyDict>> {
    let d = lattice::conic_from_arrangement(&arr.inner);
    let out = PyDict::new(py);
    for (k, v) in [
        ("a", d.a),
        ("h", d.h),
        ("b", d.b),
        ("g", d.g),
        ("f", d.f),
        ("c", d.c),
        ("Delta", d.big_delta),
        ("delta", d.delta),
        ("tau", d.tau),
        ("phi_rot", d.phi_rot),
        ("s_plus", d.s_plus),
        ("s_minus", d.s_minus),
        ("lambda_plus", d.lambda_plus),
        ("lambda_minus", d.lambda_minus),
        ("major_axis_angle", d.major_axis_angle()),
    ] {
        out.set_item(k, v)?;
    }
    out.set_item("center", (d.m0, d.n0))?;
    let class = match lattice::classify(&d) {
        lattice::ConicClass::Ellipse => "ellipse",
        lattice::ConicClass::DegenerateLine => "degenerate_line",
        lattice::ConicClass::Empty => "empty",
    };
    out.set_item("class", class)?;
    Ok(out)
}

/// Greedy nearest-first matching; returns pairs, unmatched indices and the
/// rms residual.
#[pyfunction]
fn match_vortices<'py>(
    py: Python<'py>,
    predictions: Vec<PyRef<'py, PyPrediction>>,
    detections: Vec<PyRef<'py, PyDetection>>,
    tolerance: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let preds = predictions
        .iter()
        .map(|p| p.to_core())
        .collect::<PyResult<Vec<_>>>()?;
    let dets: Vec<detector::DetectedVortex> = detections
        .iter()
        .map(|d| detector::DetectedVortex {
            charge: d.charge,
            pixel: d.pixel,
            position: d.position,
            plaquette_min_amplitude: d.plaquette_min_amplitude,
        })
        .collect();
    let rep = detector::match_vortices(&preds, &dets, tolerance).map_err(err)?;
    let out = PyDict::new(py);
    let pairs: Vec<(usize, usize, f64)> = rep
        .pairs
        .iter()
        .map(|p| (p.prediction, p.detection, p.distance))
        .collect();
    out.set_item("pairs", pairs)?;
    out.set_item("unmatched_predictions", rep.unmatched_predictions)?;
    out.set_item("unmatched_detections", rep.unmatched_detections)?;
    out.set_item("rms_residual", rep.rms_residual)?;
    Ok(out)
}

#[pyfunction]
fn winding_number(phases: [f64; 4]) -> i32 {
    detector::winding_number(phases)
}

#[pyfunction]
fn fresnel_number(max_spacing: f64, wavelength: f64, z: f64) -> f64 {
    trivortex::diffraction::fresnel_number(max_spacing, wavelength, z)
}

#[pyfunction]
fn rs_kernel(obs: [f64; 3], hole: (f64, f64), k: f64) -> PyResult<Complex64> {
    trivortex::diffraction::rs_kernel(obs, hole, k).map_err(err)
}

#[pyfunction]
fn rs_kernel_far(obs: [f64; 3], hole: (f64, f64), k: f64) -> Complex64 {
    trivortex::diffraction::rs_kernel_far(obs, hole, k)
}

#[pymodule]
#[pyo3(name = "trivortex")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VortexError", m.py().get_type::<VortexError>())?;
    m.add_class::<PyArrangement>()?;
    m.add_class::<PyPrediction>()?;
    m.add_class::<PyDetection>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(sample_grid, m)?)?;
    m.add_function(wrap_pyfunction!(predict_all, m)?)?;
    m.add_function(wrap_pyfunction!(predict_vortex, m)?)?;
    m.add_function(wrap_pyfunction!(predict_theta, m)?)?;
    m.add_function(wrap_pyfunction!(mn_scale, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_count, m)?)?;
    m.add_function(wrap_pyfunction!(ellipse, m)?)?;
    m.add_function(wrap_pyfunction!(match_vortices, m)?)?;
    m.add_function(wrap_pyfunction!(winding_number, m)?)?;
    m.add_function(wrap_pyfunction!(fresnel_number, m)?)?;
    m.add_function(wrap_pyfunction!(rs_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(rs_kernel_far, m)?)?;
    Ok(())
}
