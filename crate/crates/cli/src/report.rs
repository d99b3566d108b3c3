//! Run reports and deterministic CSV/JSON emission.
//!
//! Numbers in CSVs carry 9 significant digits with `.` decimal separator
//! (RFC 4180 layout); JSON key order follows struct declaration order, so a
//! byte-identical config yields byte-identical outputs.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Format a float with 9 significant digits for CSV cells.
pub fn fmt9(v: f64) -> String {
    format!("{v:.8e}")
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub config_sha256: String,
    /// Echo of the resolved experiment config.
    pub config: crate::config::ExperimentConfig,
    pub derived: Option<DerivedReport>,
    pub input_power: f64,
    pub output_power: f64,
    /// Output / input power (after any loss normalization).
    pub transmission: f64,
    pub measurements: Vec<MeasurementResult>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct DerivedReport {
    pub group_velocity_m_per_s: Option<f64>,
    pub k0_per_m: f64,
    /// `null` when undefined, the string `"singular"` exactly at v_g = qD.
    pub n_eff: Option<NEffReport>,
    pub group_delay_s: Option<f64>,
    pub talbot_distance_m: Option<f64>,
    /// `|q theta_pump| / k0`; the walk-off law holds well below ~0.3.
    pub paraxial_ratio: f64,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum NEffReport {
    Finite(f64),
    Singular(String),
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementResult {
    Contrast {
        original_mean: f64,
        reciprocal_mean: f64,
        contrast: f64,
        stripe_width_m: f64,
    },
    Deflection {
        input_centroid_x_m: f64,
        input_centroid_y_m: f64,
        output_centroid_x_m: f64,
        output_centroid_y_m: f64,
        theta_probe_x_rad: f64,
        theta_probe_y_rad: f64,
        residual_tilt_x_rad: f64,
        residual_tilt_y_rad: f64,
    },
    Widths {
        centroid_x_m: f64,
        centroid_y_m: f64,
        sigma_x_m: f64,
        sigma_y_m: f64,
    },
    TransmissionSweep {
        csv: String,
    },
    ChiExport {
        csv: String,
    },
}

impl MeasurementResult {
    pub fn kind(&self) -> &'static str {
        match self {
            MeasurementResult::Contrast { .. } => "contrast",
            MeasurementResult::Deflection { .. } => "deflection",
            MeasurementResult::Widths { .. } => "widths",
            MeasurementResult::TransmissionSweep { .. } => "transmission_sweep",
            MeasurementResult::ChiExport { .. } => "chi_export",
        }
    }

    /// Every numeric field, for the long-format measurements CSV.
    pub fn metrics(&self) -> Vec<(&'static str, f64)> {
        match self {
            MeasurementResult::Contrast {
                original_mean,
                reciprocal_mean,
                contrast,
                stripe_width_m,
            } => vec![
                ("original_mean", *original_mean),
                ("reciprocal_mean", *reciprocal_mean),
                ("contrast", *contrast),
                ("stripe_width_m", *stripe_width_m),
            ],
            MeasurementResult::Deflection {
                input_centroid_x_m,
                input_centroid_y_m,
                output_centroid_x_m,
                output_centroid_y_m,
                theta_probe_x_rad,
                theta_probe_y_rad,
                residual_tilt_x_rad,
                residual_tilt_y_rad,
            } => vec![
                ("input_centroid_x_m", *input_centroid_x_m),
                ("input_centroid_y_m", *input_centroid_y_m),
                ("output_centroid_x_m", *output_centroid_x_m),
                ("output_centroid_y_m", *output_centroid_y_m),
                ("theta_probe_x_rad", *theta_probe_x_rad),
                ("theta_probe_y_rad", *theta_probe_y_rad),
                ("residual_tilt_x_rad", *residual_tilt_x_rad),
                ("residual_tilt_y_rad", *residual_tilt_y_rad),
            ],
            MeasurementResult::Widths {
                centroid_x_m,
                centroid_y_m,
                sigma_x_m,
                sigma_y_m,
            } => vec![
                ("centroid_x_m", *centroid_x_m),
                ("centroid_y_m", *centroid_y_m),
                ("sigma_x_m", *sigma_x_m),
                ("sigma_y_m", *sigma_y_m),
            ],
            MeasurementResult::TransmissionSweep { .. } | MeasurementResult::ChiExport { .. } => {
                Vec::new()
            }
        }
    }

    /// Scalar columns contributed to a sweep's aggregate CSV.
    pub fn scalar_columns(&self) -> Vec<(&'static str, f64)> {
        match self {
            MeasurementResult::Contrast { contrast, .. } => vec![("contrast", *contrast)],
            MeasurementResult::Deflection {
                theta_probe_x_rad,
                theta_probe_y_rad,
                residual_tilt_x_rad,
                ..
            } => vec![
                ("theta_probe_x_rad", *theta_probe_x_rad),
                ("theta_probe_y_rad", *theta_probe_y_rad),
                ("residual_tilt_x_rad", *residual_tilt_x_rad),
            ],
            MeasurementResult::Widths {
                sigma_x_m, sigma_y_m, ..
            } => vec![("sigma_x_m", *sigma_x_m), ("sigma_y_m", *sigma_y_m)],
            MeasurementResult::TransmissionSweep { .. } | MeasurementResult::ChiExport { .. } => {
                Vec::new()
            }
        }
    }
}

pub fn write_json(path: &Path, report: &RunReport) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    let emit = |w: &mut dyn Write, cells: &[String]| -> std::io::Result<()> {
        writeln!(w, "{}", cells.join(","))
    };
    emit(&mut w, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>())
        .and_then(|_| {
            for row in rows {
                emit(&mut w, &row)?;
            }
            w.flush()
        })
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
