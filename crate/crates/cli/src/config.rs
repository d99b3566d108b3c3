//! The experiment config schema: a strict, unit-suffixed JSON tree.
//!
//! Every length/frequency key carries its unit (`_m`, `_hz`, `_per_m`,
//! `_m2_per_s`, `_rad`); unknown keys are rejected. Frequencies are given in
//! Hz and converted to angular rates internally. Exactly-one-of choices
//! (detuning, pump power) are single-key objects, so a sweep can address any
//! numeric leaf by its dotted path, e.g. `medium.detuning.delta_over_gamma`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use slowlight::medium::MediumParams;
use slowlight::propagation::{Segment, SegmentMedium};
use slowlight::scenes::{Envelope, GratingAxis, GratingSpec, Resampling};
use slowlight::Grid2D;

use crate::CliError;

/// Default wavelength (m) when a config omits `lambda_m`.
pub const DEFAULT_LAMBDA_M: f64 = 794.979e-9;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridConfig,
    pub source: SourceConfig,
    /// Optional low-pass iris applied to the source before the train.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iris_k_cut_per_m: Option<f64>,
    /// Carrier wavelength for trains without a medium (free-space-only
    /// references); a medium's `lambda_m` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_m: Option<f64>,
    /// Cell parameters; required when the train contains an `eit` segment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumConfig>,
    /// Slabs applied in order; may be empty for purely analytic measurements.
    #[serde(default)]
    pub train: Vec<SegmentConfig>,
    /// Divide the output by each EIT slab's `exp(i chi(0) L)` so shapes can
    /// be compared across detunings.
    #[serde(default)]
    pub normalize_uniform_loss: bool,
    #[serde(default)]
    pub measurements: Vec<MeasurementConfig>,
    /// Output directory; overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub dx_m: f64,
    pub dy_m: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Grating(GratingConfig),
    Gaussian(GaussianConfig),
    Point(PointConfig),
    Mask(MaskConfig),
    Uniform(UniformConfig),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GratingConfig {
    pub period_m: f64,
    pub duty: f64,
    /// Modulation axis: `"x"` or `"y"`.
    pub axis: AxisConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_half_width_m: Option<f64>,
    /// Super-Gaussian order of the envelope window (default 4).
    #[serde(default = "default_envelope_order")]
    pub envelope_order: u32,
}

fn default_envelope_order() -> u32 {
    4
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisConfig {
    X,
    Y,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    pub waist_m: f64,
    #[serde(default)]
    pub center_x_m: f64,
    #[serde(default)]
    pub center_y_m: f64,
    #[serde(default)]
    pub tilt_x_rad: f64,
    #[serde(default)]
    pub tilt_y_rad: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub radius_m: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MaskConfig {
    /// PGM path, resolved relative to the config file.
    pub path: PathBuf,
    pub pitch_m: f64,
    #[serde(default)]
    pub resample: ResampleConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResampleConfig {
    #[default]
    Nearest,
    Bilinear,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct UniformConfig {
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub d_m2_per_s: f64,
    pub gamma_hz: f64,
    pub detuning: DetuningConfig,
    pub pump: PumpConfig,
    pub alpha_per_m: f64,
    #[serde(default = "default_lambda")]
    pub lambda_m: f64,
    #[serde(default)]
    pub theta_pump_x_rad: f64,
    #[serde(default)]
    pub theta_pump_y_rad: f64,
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA_M
}

/// Raman detuning, either absolute (Hz) or in units of gamma.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DetuningConfig {
    DeltaHz(f64),
    DeltaOverGamma(f64),
}

/// Pump power, given directly as the power-broadening width or through the
/// group velocity it produces (absolutely, or as a fraction of `qD` so the
/// elimination and lens points are exact).
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PumpConfig {
    GammaPHz(f64),
    GroupVelocityMPerS(f64),
    GroupVelocityRatioQd(f64),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentConfig {
    Free(SegmentBody),
    Eit(SegmentBody),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentBody {
    pub length_m: f64,
    /// Record the field after this segment.
    #[serde(default)]
    pub snapshot: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementConfig {
    Contrast(ContrastMeasurementConfig),
    Deflection(DeflectionMeasurementConfig),
    Widths(WidthsMeasurementConfig),
    TransmissionSweep(TransmissionSweepConfig),
    ChiExport(ChiExportConfig),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastMeasurementConfig {
    /// Analysis window half width as a fraction of the grating envelope half
    /// width (default 0.6, the central region clear of envelope edges).
    #[serde(default = "default_window_fraction")]
    pub window_fraction: f64,
}

fn default_window_fraction() -> f64 {
    0.6
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DeflectionMeasurementConfig {
    /// Length used to convert the centroid displacement to an angle;
    /// defaults to the total EIT length of the train.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_m: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WidthsMeasurementConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_half_width_m: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionSweepConfig {
    pub delta_over_gamma_min: f64,
    pub delta_over_gamma_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChiExportConfig {
    pub k_max_per_m: f64,
    pub k_steps: usize,
    pub deltas_over_gamma: Vec<f64>,
}

impl ExperimentConfig {
    /// Parse and validate a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let needs_medium = self
            .train
            .iter()
            .any(|s| matches!(s, SegmentConfig::Eit(_)));
        if needs_medium && self.medium.is_none() {
            return Err(CliError::Config(
                "train contains an eit segment but no medium is given".into(),
            ));
        }
        if self.normalize_uniform_loss && needs_medium && self.medium.is_none() {
            return Err(CliError::Config(
                "normalize_uniform_loss requires a medium".into(),
            ));
        }
        if self
            .measurements
            .iter()
            .any(|m| matches!(m, MeasurementConfig::Contrast(_)))
            && !matches!(self.source, SourceConfig::Grating(_))
        {
            return Err(CliError::Config(
                "contrast measurement requires a grating source".into(),
            ));
        }
        let analytic_needs_medium = self.measurements.iter().any(|m| {
            matches!(
                m,
                MeasurementConfig::TransmissionSweep(_) | MeasurementConfig::ChiExport(_)
            )
        });
        if analytic_needs_medium && self.medium.is_none() {
            return Err(CliError::Config(
                "transmission_sweep and chi_export need a medium".into(),
            ));
        }
        for m in &self.measurements {
            if let MeasurementConfig::TransmissionSweep(t) = m {
                if t.steps < 2 {
                    return Err(CliError::Config("transmission sweep needs >= 2 steps".into()));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2D, CliError> {
        Grid2D::new(self.grid.nx, self.grid.ny, self.grid.dx_m, self.grid.dy_m)
            .map_err(CliError::Physics)
    }

    /// The slab length the EIT cell contributes (used for delay, deflection).
    pub fn eit_length(&self) -> f64 {
        self.train
            .iter()
            .filter_map(|s| match s {
                SegmentConfig::Eit(b) => Some(b.length_m),
                SegmentConfig::Free(_) => None,
            })
            .sum()
    }

    pub fn grating_spec(&self) -> Option<GratingSpec> {
        match &self.source {
            SourceConfig::Grating(gc) => Some(GratingSpec {
                period: gc.period_m,
                duty: gc.duty,
                axis: match gc.axis {
                    AxisConfig::X => GratingAxis::X,
                    AxisConfig::Y => GratingAxis::Y,
                },
                envelope: gc.envelope_half_width_m.map(|hw| Envelope {
                    half_width: hw,
                    order: gc.envelope_order,
                }),
            }),
            _ => None,
        }
    }
}

impl MediumConfig {
    /// Resolve into core medium parameters (rad/s internally).
    pub fn to_params(&self) -> Result<MediumParams, CliError> {
        let gamma = 2.0 * PI * self.gamma_hz;
        let delta = match self.detuning {
            DetuningConfig::DeltaHz(hz) => 2.0 * PI * hz,
            DetuningConfig::DeltaOverGamma(r) => r * gamma,
        };
        let mut p = MediumParams::new(
            self.d_m2_per_s,
            gamma,
            0.0,
            delta,
            self.alpha_per_m,
            self.lambda_m,
        )
        .map_err(CliError::Physics)?
        .with_pump_tilt([self.theta_pump_x_rad, self.theta_pump_y_rad]);
        p.gamma_p = match self.pump {
            PumpConfig::GammaPHz(hz) => 2.0 * PI * hz,
            PumpConfig::GroupVelocityMPerS(v) => {
                p.gamma_p_for_group_velocity(v).map_err(CliError::Physics)?
            }
            PumpConfig::GroupVelocityRatioQd(r) => {
                let target = r * p.q() * p.diffusion;
                p.gamma_p_for_group_velocity(target).map_err(CliError::Physics)?
            }
        };
        p.validate().map_err(CliError::Physics)?;
        Ok(p)
    }
}

/// Core-facing view of the train.
pub fn build_segments(cfg: &ExperimentConfig) -> Result<(Vec<Segment>, Vec<usize>), CliError> {
    let mut segments = Vec::new();
    let mut snapshots = Vec::new();
    let medium = cfg.medium.as_ref().map(|m| m.to_params()).transpose()?;
    for (i, s) in cfg.train.iter().enumerate() {
        let (seg, snap) = match s {
            SegmentConfig::Free(b) => (Segment::free_space(b.length_m), b.snapshot),
            SegmentConfig::Eit(b) => {
                let p = medium.ok_or_else(|| {
                    CliError::Config("eit segment without a medium".into())
                })?;
                (
                    Segment {
                        medium: SegmentMedium::Eit(p),
                        length: b.length_m,
                    },
                    b.snapshot,
                )
            }
        };
        segments.push(seg);
        if snap {
            snapshots.push(i);
        }
    }
    Ok((segments, snapshots))
}

impl ResampleConfig {
    pub fn to_core(self) -> Resampling {
        match self {
            ResampleConfig::Nearest => Resampling::Nearest,
            ResampleConfig::Bilinear => Resampling::Bilinear,
        }
    }
}
