//! Command-line front end.
//!
//! Lengths on the command line are in units of the wavelength, angles in
//! degrees. Exit status is 0 on success, 1 on a domain or I/O error (the
//! error name goes to stderr) and 2 on a usage error.

pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{hyperbola_m, hyperbola_n, mn_scale, predict_all, VortexPrediction};
use crate::detector::{
    default_tolerance, detect_vortices, match_vortices, DetectedVortex, MatchPair,
};
use crate::diffraction::{fresnel_number, PinholeScreen};
use crate::error::VortexError;
use crate::lattice::{
    boundary_lattice_points, bounding_rectangle, classify, conic_from_arrangement, ellipse_depth,
    enumerate_lattice, estimate_count, BoundingRectangle, ConicClass, EllipseDescriptor,
};
use crate::wavefield::{
    sample_grid, subtract_background, ExactField, FarField, FieldGrid, FieldModel, ModelTag,
    PlaneWave, PlaneWaveField, SourceArrangement, Window, DEFAULT_RESOLUTION,
};
use io::RasterKind;

/// Lattice points closer than this (in normalized depth) to the ellipse
/// boundary are flagged in reports.
pub const BOUNDARY_DEPTH_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "trivortex",
    version,
    about = "Phase vortices from three interfering point sources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an amplitude or phase raster as a binary PGM.
    Render(RenderArgs),
    /// Closed-form far-field vortex positions as CSV.
    Predict(PredictArgs),
    /// Winding-number detections on a sampled field as CSV.
    Detect(DetectArgs),
    /// Predict, sample, detect and match; writes a JSON report.
    Compare(CompareArgs),
    /// Parameter-space ellipse descriptor and lattice points as JSON.
    Ellipse(EllipseArgs),
    /// Vary theta3 or a source phase and report per-step counts as JSON.
    Sweep(SweepArgs),
    /// Sampled m- and n-hyperbolas as CSV.
    Trajectories(TrajectoryArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ArrangementArgs {
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub r2: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub r3: f64,
    /// Polar angle of source 3, degrees.
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    pub theta3: f64,
    /// Phase of source 2 relative to source 1, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi2: f64,
    /// Phase of source 3 relative to source 1, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi3: f64,
    /// Source amplitudes `A1,A2,A3`.
    #[arg(long, default_value = "1,1,1", value_parser = parse_triple)]
    pub amplitudes: [f64; 3],
}

impl ArrangementArgs {
    pub fn arrangement(&self) -> Result<SourceArrangement, VortexError> {
        let arr = SourceArrangement::new(1.0, self.r2, self.r3, self.theta3.to_radians())?
            .with_phases(self.phi2.to_radians(), self.phi3.to_radians())
            .with_amplitudes(self.amplitudes);
        arr.validate()?;
        Ok(arr)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ObservationArgs {
    /// Observation-plane distance.
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    pub z0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center_x: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center_y: f64,
    /// Window half-width; defaults to 0.6 z0.
    #[arg(long, allow_negative_numbers = true)]
    pub half_width: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = ModelTag::Exact)]
    pub model: ModelTag,
    /// Plane wave `A,kx,ky,kz,phi_deg` for the planewave model; repeatable.
    /// Defaults to the symmetric three-wave reference set.
    #[arg(long = "wave", value_parser = parse_wave, allow_negative_numbers = true)]
    pub waves: Vec<PlaneWave>,
}

impl ObservationArgs {
    pub fn window(&self) -> Window {
        Window {
            center_x: self.center_x,
            center_y: self.center_y,
            half_width: self.half_width.unwrap_or(0.6 * self.z0),
        }
    }

    pub fn field(&self, arr: &SourceArrangement) -> Box<dyn FieldModel> {
        match self.model {
            ModelTag::Exact => Box::new(ExactField(*arr)),
            ModelTag::Farfield => Box::new(FarField(*arr)),
            ModelTag::Pinhole => Box::new(PinholeScreen::from_arrangement(arr)),
            ModelTag::Planewave => {
                let waves = if self.waves.is_empty() {
                    PlaneWave::reference_triple().to_vec()
                } else {
                    self.waves.clone()
                };
                Box::new(PlaneWaveField(waves))
            }
        }
    }

    pub fn sample(&self, arr: &SourceArrangement) -> Result<FieldGrid, VortexError> {
        sample_grid(
            self.field(arr).as_ref(),
            self.window(),
            self.resolution,
            self.z0,
        )
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub observation: ObservationArgs,
    #[arg(long, value_enum, default_value_t = RasterKind::Phase)]
    pub kind: RasterKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    pub z0: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub observation: ObservationArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub observation: ObservationArgs,
    /// Matching tolerance; defaults to 0.02 z0.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EllipseArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Theta3,
    Phi2,
    Phi3,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub observation: ObservationArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// First value, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    /// Last value, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Also sample and detect at every step.
    #[arg(long)]
    pub detect: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    pub z0: f64,
    /// Number of polar-angle samples over one turn.
    #[arg(long, default_value_t = 720)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected three values, got {}", v.len()))
}

fn parse_wave(s: &str) -> Result<PlaneWave, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 5 {
        return Err(format!("expected A,kx,ky,kz,phi, got {} values", v.len()));
    }
    PlaneWave::new(v[0], [v[1], v[2], v[3]], v[4].to_radians()).map_err(|e| e.to_string())
}

#[derive(Debug)]
pub enum CliError {
    Domain(VortexError),
    Io(std::io::Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.name(),
            CliError::Io(_) => "Io",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "Io: {e}"),
        }
    }
}

impl From<VortexError> for CliError {
    fn from(e: VortexError) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Predictions for an arrangement, empty when the sources are collinear
/// (no vortices form).
fn predictions_or_empty(
    arr: &SourceArrangement,
    z0: f64,
) -> Result<Vec<VortexPrediction>, VortexError> {
    match predict_all(arr, z0) {
        Err(VortexError::CollinearArrangement) => Ok(Vec::new()),
        other => other,
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Render(a) => {
            let arr = a.arrangement.arrangement()?;
            let mut grid = a.observation.sample(&arr)?;
            if a.kind == RasterKind::PhaseBgSubtracted {
                grid = subtract_background(&grid, &arr)?;
            }
            io::write_raster(&grid, a.kind, &a.out)?;
        }
        Command::Predict(a) => {
            let arr = a.arrangement.arrangement()?;
            let preds = predictions_or_empty(&arr, a.z0)?;
            io::emit(a.out.as_deref(), io::predictions_csv(&preds).as_bytes())?;
        }
        Command::Detect(a) => {
            let arr = a.arrangement.arrangement()?;
            let grid = a.observation.sample(&arr)?;
            let dets = detect_vortices(&grid)?;
            io::emit(a.out.as_deref(), io::detections_csv(&dets).as_bytes())?;
        }
        Command::Compare(a) => {
            let arr = a.arrangement.arrangement()?;
            let report = compare_report(&arr, &a.observation, a.tolerance)?;
            io::emit(a.out.as_deref(), io::json_string(&report).as_bytes())?;
        }
        Command::Ellipse(a) => {
            let arr = a.arrangement.arrangement()?;
            io::emit(
                a.out.as_deref(),
                io::json_string(&ellipse_report(&arr)).as_bytes(),
            )?;
        }
        Command::Sweep(a) => {
            let steps = sweep(a)?;
            io::emit(a.out.as_deref(), io::json_string(&steps).as_bytes())?;
        }
        Command::Trajectories(a) => {
            let arr = a.arrangement.arrangement()?;
            let csv = trajectories_csv(&arr, a.z0, a.samples)?;
            io::emit(a.out.as_deref(), csv.as_bytes())?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ArrangementEcho {
    pub wavelength: f64,
    pub r2: f64,
    pub r3: f64,
    pub theta3_deg: f64,
    pub phi2_deg: f64,
    pub phi3_deg: f64,
    pub amplitudes: [f64; 3],
}

impl From<&SourceArrangement> for ArrangementEcho {
    fn from(a: &SourceArrangement) -> Self {
        Self {
            wavelength: a.wavelength,
            r2: a.r2,
            r3: a.r3,
            theta3_deg: a.theta3.to_degrees(),
            phi2_deg: a.phi2.to_degrees(),
            phi3_deg: a.phi3.to_degrees(),
            amplitudes: a.amplitudes,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EllipseReport {
    pub arrangement: ArrangementEcho,
    pub conic_class: ConicClass,
    pub descriptor: EllipseDescriptor,
    pub center: [f64; 2],
    pub semi_axes: [f64; 2],
    pub major_axis_angle_rad: f64,
    pub bounding_rectangle: BoundingRectangle,
    pub lattice_points: Vec<(i64, i64)>,
    pub boundary_points: Vec<(i64, i64)>,
    pub estimate_count: f64,
}

pub fn ellipse_report(arr: &SourceArrangement) -> EllipseReport {
    let d = conic_from_arrangement(arr);
    EllipseReport {
        arrangement: arr.into(),
        conic_class: classify(&d),
        descriptor: d,
        center: [d.m0, d.n0],
        semi_axes: [d.s_plus, d.s_minus],
        major_axis_angle_rad: d.major_axis_angle(),
        bounding_rectangle: bounding_rectangle(arr),
        lattice_points: enumerate_lattice(arr),
        boundary_points: boundary_lattice_points(arr, BOUNDARY_DEPTH_TOL),
        estimate_count: estimate_count(arr),
    }
}

#[derive(Debug, Serialize)]
pub struct PredictionEntry {
    #[serde(flatten)]
    pub prediction: VortexPrediction,
    pub ellipse_depth: f64,
    pub near_boundary: bool,
}

#[derive(Debug, Serialize)]
pub struct ResidualStats {
    pub count: usize,
    pub rms: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub arrangement: ArrangementEcho,
    pub z0: f64,
    pub window: Window,
    pub resolution: usize,
    pub model: ModelTag,
    pub tolerance: f64,
    pub fresnel_number: f64,
    pub ellipse: EllipseDescriptor,
    pub conic_class: ConicClass,
    pub lattice_points: Vec<(i64, i64)>,
    pub boundary_points: Vec<(i64, i64)>,
    /// In-window predictions; pair indices refer to this list.
    pub predictions: Vec<PredictionEntry>,
    pub detections: Vec<DetectedVortex>,
    pub pairs: Vec<MatchPair>,
    pub unmatched_predictions: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
    pub rejected: Vec<MatchPair>,
    pub residual: ResidualStats,
}

pub fn compare_report(
    arr: &SourceArrangement,
    obs: &ObservationArgs,
    tolerance: Option<f64>,
) -> Result<CompareReport, VortexError> {
    let window = obs.window();
    let tolerance = tolerance.unwrap_or_else(|| default_tolerance(obs.z0));
    let preds: Vec<VortexPrediction> = predictions_or_empty(arr, obs.z0)?
        .into_iter()
        .filter(|p| window.contains(p.x, p.y))
        .collect();
    let grid = obs.sample(arr)?;
    let detections = detect_vortices(&grid)?;
    let report = match_vortices(&preds, &detections, tolerance)?;

    let dists: Vec<f64> = report.pairs.iter().map(|p| p.distance).collect();
    let residual = ResidualStats {
        count: dists.len(),
        rms: report.rms_residual,
        mean: if dists.is_empty() {
            0.0
        } else {
            dists.iter().sum::<f64>() / dists.len() as f64
        },
        max: dists.iter().copied().fold(0.0, f64::max),
    };
    let predictions = preds
        .into_iter()
        .map(|p| {
            let depth = ellipse_depth(arr, p.m as f64, p.n as f64);
            PredictionEntry {
                prediction: p,
                ellipse_depth: depth,
                near_boundary: depth < BOUNDARY_DEPTH_TOL,
            }
        })
        .collect();
    let d = conic_from_arrangement(arr);
    Ok(CompareReport {
        arrangement: arr.into(),
        z0: obs.z0,
        window,
        resolution: obs.resolution,
        model: obs.model,
        tolerance,
        fresnel_number: fresnel_number(arr.max_spacing(), arr.wavelength, obs.z0),
        ellipse: d,
        conic_class: classify(&d),
        lattice_points: enumerate_lattice(arr),
        boundary_points: boundary_lattice_points(arr, BOUNDARY_DEPTH_TOL),
        predictions,
        detections,
        pairs: report.pairs,
        unmatched_predictions: report.unmatched_predictions,
        unmatched_detections: report.unmatched_detections,
        rejected: report.rejected,
        residual,
    })
}

#[derive(Debug, Serialize)]
pub struct HyperbolaParams {
    pub index: i64,
    /// `M(m)` or `N(n)`.
    pub scale: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepStep {
    pub param: SweepParam,
    pub value_deg: f64,
    pub conic_class: ConicClass,
    pub lattice_count: usize,
    pub prediction_count: usize,
    pub estimate_count: f64,
    pub boundary_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection_count: Option<usize>,
    /// `3 k r2`, the m-hyperbola asymptote scale; phase sweeps only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_asymptote: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_asymptote: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub m_hyperbolas: Vec<HyperbolaParams>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n_hyperbolas: Vec<HyperbolaParams>,
}

pub fn sweep(a: &SweepArgs) -> Result<Vec<SweepStep>, VortexError> {
    if a.steps == 0 {
        return Err(VortexError::InvalidParameter(
            "sweep needs at least one step".into(),
        ));
    }
    let mut out = Vec::with_capacity(a.steps);
    for i in 0..a.steps {
        let t = if a.steps == 1 {
            0.0
        } else {
            i as f64 / (a.steps - 1) as f64
        };
        let value = a.from + t * (a.to - a.from);
        let mut args = a.arrangement.clone();
        match a.param {
            SweepParam::Theta3 => args.theta3 = value,
            SweepParam::Phi2 => args.phi2 = value,
            SweepParam::Phi3 => args.phi3 = value,
        }
        let arr = args.arrangement()?;
        let lattice = enumerate_lattice(&arr);
        let preds = predictions_or_empty(&arr, a.observation.z0)?;
        let detection_count = if a.detect {
            Some(detect_vortices(&a.observation.sample(&arr)?)?.len())
        } else {
            None
        };
        let phase_sweep = a.param != SweepParam::Theta3;
        let k = arr.wavenumber();
        let (mut ms, mut ns): (Vec<i64>, Vec<i64>) = lattice.iter().copied().unzip();
        ms.sort_unstable();
        ms.dedup();
        ns.sort_unstable();
        ns.dedup();
        let (m_hyperbolas, n_hyperbolas) = if phase_sweep {
            (
                ms.iter()
                    .map(|&m| HyperbolaParams {
                        index: m,
                        scale: mn_scale(m, 0, arr.phi2, arr.phi3).0,
                    })
                    .collect(),
                ns.iter()
                    .map(|&n| HyperbolaParams {
                        index: n,
                        scale: mn_scale(0, n, arr.phi2, arr.phi3).1,
                    })
                    .collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        out.push(SweepStep {
            param: a.param,
            value_deg: value,
            conic_class: classify(&conic_from_arrangement(&arr)),
            lattice_count: lattice.len(),
            prediction_count: preds.len(),
            estimate_count: estimate_count(&arr),
            boundary_count: boundary_lattice_points(&arr, BOUNDARY_DEPTH_TOL).len(),
            detection_count,
            m_asymptote: phase_sweep.then_some(3.0 * k * arr.r2),
            n_asymptote: phase_sweep.then_some(3.0 * k * arr.r3),
            m_hyperbolas,
            n_hyperbolas,
        });
    }
    Ok(out)
}

pub const TRAJECTORY_HEADER: &str = "family,index,theta_rad,r_perp_over_lambda0";

/// Samples every m- and n-hyperbola that passes through an enumerated
/// lattice point, skipping angles where a curve does not exist.
pub fn trajectories_csv(
    arr: &SourceArrangement,
    z0: f64,
    samples: usize,
) -> Result<String, VortexError> {
    use std::fmt::Write as _;
    if samples == 0 {
        return Err(VortexError::InvalidParameter(
            "need at least one sample".into(),
        ));
    }
    let lattice = enumerate_lattice(arr);
    let (mut ms, mut ns): (Vec<i64>, Vec<i64>) = lattice.iter().copied().unzip();
    ms.sort_unstable();
    ms.dedup();
    ns.sort_unstable();
    ns.dedup();
    let thetas: Vec<f64> = (0..samples)
        .map(|i| std::f64::consts::TAU * i as f64 / samples as f64)
        .collect();
    let mut s = String::from(TRAJECTORY_HEADER);
    s.push('\n');
    for &m in &ms {
        for &t in &thetas {
            if let Some(r) = hyperbola_m(m, arr, z0, t)? {
                let _ = writeln!(s, "m,{m},{t:.16e},{r:.16e}");
            }
        }
    }
    for &n in &ns {
        for &t in &thetas {
            if let Some(r) = hyperbola_n(n, arr, z0, t)? {
                let _ = writeln!(s, "n,{n},{t:.16e},{r:.16e}");
            }
        }
    }
    Ok(s)
}
