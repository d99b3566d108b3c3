//! Experiment execution: source -> iris -> train -> measurements -> files.
//!
//! A run simulates entirely in memory and only then writes its artifacts, so
//! a failing run leaves no partial outputs. Sweep points are independent
//! runs executed across a bounded worker pool; the aggregate CSV is
//! assembled in point order regardless of completion order.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use slowlight::analysis::{
    centroid, chi_curve_export, deflection_measurement, grating_contrast, rms_width,
    talbot_distance, transmission_spectrum, AnalysisWindow,
};
use slowlight::propagation::GUARD_EDGE_WARN_FRACTION;
use slowlight::scenes::{
    apply_mask, binary_grating, gaussian_beam, iris_filter, load_mask, point_source, GratingAxis,
};
use slowlight::{
    io as field_io, normalize_uniform_loss, run_train, ComplexField, Complex64, EffectiveIndex,
    MediumParams, OpticalTrain,
};

use crate::config::{
    build_segments, ExperimentConfig, MeasurementConfig, SegmentConfig, SourceConfig,
    DEFAULT_LAMBDA_M,
};
use crate::report::{
    fmt9, write_csv, write_json, DerivedReport, MeasurementResult, NEffReport, RunReport,
};
use crate::CliError;

fn phys(e: slowlight::Error) -> CliError {
    match e {
        slowlight::Error::Io(io) => CliError::Io(io.to_string()),
        other => CliError::Physics(other),
    }
}

/// Everything a finished simulation holds before artifacts are written.
pub struct Completed {
    pub report: RunReport,
    input: ComplexField,
    output: ComplexField,
    snapshots: Vec<(usize, ComplexField)>,
    tables: Vec<(String, Vec<String>, Vec<Vec<String>>)>, // name, header, rows
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn carrier_q(cfg: &ExperimentConfig, medium: Option<&MediumParams>) -> f64 {
    match medium {
        Some(m) => m.q(),
        None => 2.0 * PI / cfg.lambda_m.unwrap_or(DEFAULT_LAMBDA_M),
    }
}

fn build_source(
    cfg: &ExperimentConfig,
    config_dir: &Path,
    q: f64,
) -> Result<ComplexField, CliError> {
    let grid = cfg.grid()?;
    match &cfg.source {
        SourceConfig::Grating(_) => {
            let spec = cfg.grating_spec().expect("grating source");
            binary_grating(&grid, &spec).map_err(phys)
        }
        SourceConfig::Gaussian(gc) => gaussian_beam(
            &grid,
            gc.waist_m,
            [gc.center_x_m, gc.center_y_m],
            [gc.tilt_x_rad, gc.tilt_y_rad],
            q,
        )
        .map_err(phys),
        SourceConfig::Point(pc) => point_source(&grid, pc.radius_m).map_err(phys),
        SourceConfig::Mask(mc) => {
            let path = if mc.path.is_absolute() {
                mc.path.clone()
            } else {
                config_dir.join(&mc.path)
            };
            let mask = load_mask(&path, mc.pitch_m).map_err(phys)?;
            apply_mask(&grid, &mask, mc.resample.to_core()).map_err(phys)
        }
        SourceConfig::Uniform(uc) => Ok(ComplexField::uniform(
            grid,
            Complex64::new(uc.amplitude, 0.0),
        )),
    }
}

fn derived_report(cfg: &ExperimentConfig, medium: Option<&MediumParams>) -> Option<DerivedReport> {
    let m = medium?;
    let d = m.derived();
    let eit_len = cfg.eit_length();
    let lambda = m.lambda;
    let talbot = cfg
        .grating_spec()
        .map(|s| talbot_distance(s.period, lambda).unwrap());
    let tilt = m.q() * m.theta_pump[0].hypot(m.theta_pump[1]);
    Some(DerivedReport {
        group_velocity_m_per_s: d.group_velocity,
        k0_per_m: d.k0,
        n_eff: d.n_eff.map(|n| match n {
            EffectiveIndex::Finite(v) => NEffReport::Finite(v),
            EffectiveIndex::Singular => NEffReport::Singular("singular".into()),
        }),
        group_delay_s: d.group_delay_per_length.map(|g| g * eit_len),
        talbot_distance_m: talbot,
        paraxial_ratio: tilt / d.k0,
    })
}

/// Run a parsed config. `config_dir` anchors relative asset paths;
/// `config_hash` is echoed into the report.
pub fn run_config(
    cfg: &ExperimentConfig,
    config_dir: &Path,
    config_hash: String,
) -> Result<Completed, CliError> {
    cfg.validate()?;
    let medium = cfg.medium.as_ref().map(|m| m.to_params()).transpose()?;
    let q = carrier_q(cfg, medium.as_ref());
    let mut warnings = Vec::new();

    // source and optional iris
    let source = build_source(cfg, config_dir, q)?;
    let input = match cfg.iris_k_cut_per_m {
        Some(kcut) => iris_filter(&source, kcut).map_err(phys)?,
        None => source,
    };
    if input.edge_power_fraction(2) > GUARD_EDGE_WARN_FRACTION {
        warnings.push("input power within 2 samples of the grid edge exceeds 1e-6 of total; expect wrap-around artifacts".into());
    }

    // train
    let (segments, snapshot_plan) = build_segments(cfg)?;
    let (mut output, snapshots) = if segments.is_empty() {
        (input.clone(), Vec::new())
    } else {
        let train = OpticalTrain::new(q, segments)
            .map_err(phys)?
            .with_snapshots(snapshot_plan);
        let out = run_train(&input, &train).map_err(phys)?;
        (out.output, out.snapshots)
    };

    // per-slab uniform-loss normalization
    if cfg.normalize_uniform_loss {
        if let Some(m) = &medium {
            for seg in &cfg.train {
                if let SegmentConfig::Eit(b) = seg {
                    output = normalize_uniform_loss(&output, m, b.length_m);
                }
            }
        }
    }
    if output.edge_power_fraction(2) > GUARD_EDGE_WARN_FRACTION {
        warnings.push("output power within 2 samples of the grid edge exceeds 1e-6 of total; expect wrap-around artifacts".into());
    }
    if let Some(m) = &medium {
        let d = m.derived();
        if m.q() * m.theta_pump[0].hypot(m.theta_pump[1]) > 0.3 * d.k0 {
            warnings.push("pump tilt beyond 0.3 k0/q: walk-off law leaves its validity range".into());
        }
    }

    // measurements
    let mut results = Vec::new();
    let mut tables: Vec<(String, Vec<String>, Vec<Vec<String>>)> = Vec::new();
    let gamma = medium.as_ref().map(|m| m.gamma);
    for meas in &cfg.measurements {
        match meas {
            MeasurementConfig::Contrast(mc) => {
                let spec = cfg.grating_spec().expect("validated grating source");
                let half = match spec.envelope {
                    Some(env) => mc.window_fraction * env.half_width,
                    None => {
                        let grid = input.grid();
                        let ext = match spec.axis {
                            GratingAxis::X => grid.extent_x(),
                            GratingAxis::Y => grid.extent_y(),
                        };
                        mc.window_fraction * ext / 2.0
                    }
                };
                let window = match spec.axis {
                    GratingAxis::X => AnalysisWindow::centered(half, f64::INFINITY),
                    GratingAxis::Y => AnalysisWindow::centered(f64::INFINITY, half),
                };
                let r = grating_contrast(&output, &spec, &window).map_err(phys)?;
                results.push(MeasurementResult::Contrast {
                    original_mean: r.original_mean,
                    reciprocal_mean: r.reciprocal_mean,
                    contrast: r.contrast,
                    stripe_width_m: r.stripe_width,
                });
            }
            MeasurementConfig::Deflection(dc) => {
                let l = dc.length_m.unwrap_or_else(|| cfg.eit_length());
                let r = deflection_measurement(&input, &output, l, q).map_err(phys)?;
                results.push(MeasurementResult::Deflection {
                    input_centroid_x_m: r.input_centroid[0],
                    input_centroid_y_m: r.input_centroid[1],
                    output_centroid_x_m: r.output_centroid[0],
                    output_centroid_y_m: r.output_centroid[1],
                    theta_probe_x_rad: r.theta_probe[0],
                    theta_probe_y_rad: r.theta_probe[1],
                    residual_tilt_x_rad: r.residual_tilt[0],
                    residual_tilt_y_rad: r.residual_tilt[1],
                });
            }
            MeasurementConfig::Widths(wc) => {
                let window = match wc.window_half_width_m {
                    Some(w) => AnalysisWindow::centered(w, w),
                    None => AnalysisWindow::full(),
                };
                let c = centroid(&output, &window).map_err(phys)?;
                let s = rms_width(&output, &window).map_err(phys)?;
                results.push(MeasurementResult::Widths {
                    centroid_x_m: c[0],
                    centroid_y_m: c[1],
                    sigma_x_m: s[0],
                    sigma_y_m: s[1],
                });
            }
            MeasurementConfig::TransmissionSweep(tc) => {
                let m = medium.as_ref().expect("validated medium");
                let g = gamma.expect("medium gamma");
                let l = if cfg.eit_length() > 0.0 {
                    cfg.eit_length()
                } else {
                    return Err(CliError::Config(
                        "transmission_sweep needs an eit segment for the cell length".into(),
                    ));
                };
                let deltas: Vec<f64> = (0..tc.steps)
                    .map(|i| {
                        let t = i as f64 / (tc.steps - 1) as f64;
                        (tc.delta_over_gamma_min
                            + t * (tc.delta_over_gamma_max - tc.delta_over_gamma_min))
                            * g
                    })
                    .collect();
                let rows = transmission_spectrum(m, &deltas, l)
                    .into_iter()
                    .map(|(delta, t)| {
                        vec![fmt9(delta / g), fmt9(delta / (2.0 * PI)), fmt9(t)]
                    })
                    .collect();
                tables.push((
                    "transmission.csv".into(),
                    vec!["delta_over_gamma".into(), "delta_hz".into(), "transmission".into()],
                    rows,
                ));
                results.push(MeasurementResult::TransmissionSweep {
                    csv: "transmission.csv".into(),
                });
            }
            MeasurementConfig::ChiExport(cc) => {
                let m = medium.as_ref().expect("validated medium");
                let g = gamma.expect("medium gamma");
                let ks: Vec<f64> = (0..cc.k_steps)
                    .map(|i| cc.k_max_per_m * i as f64 / (cc.k_steps.max(2) - 1) as f64)
                    .collect();
                let deltas: Vec<f64> = cc.deltas_over_gamma.iter().map(|r| r * g).collect();
                let rows = chi_curve_export(m, &ks, &deltas)
                    .into_iter()
                    .map(|s| {
                        vec![
                            fmt9(s.k),
                            fmt9(s.delta / g),
                            fmt9(s.chi.re),
                            fmt9(s.chi.im),
                        ]
                    })
                    .collect();
                tables.push((
                    "chi.csv".into(),
                    vec![
                        "k_per_m".into(),
                        "delta_over_gamma".into(),
                        "re_chi_per_m".into(),
                        "im_chi_per_m".into(),
                    ],
                    rows,
                ));
                results.push(MeasurementResult::ChiExport {
                    csv: "chi.csv".into(),
                });
            }
        }
    }

    let input_power = input.power();
    let output_power = output.power();
    let report = RunReport {
        name: cfg.name.clone(),
        config_sha256: config_hash,
        config: cfg.clone(),
        derived: derived_report(cfg, medium.as_ref()),
        input_power,
        output_power,
        transmission: if input_power > 0.0 {
            output_power / input_power
        } else {
            0.0
        },
        measurements: results,
        warnings,
        artifacts: Vec::new(),
    };
    Ok(Completed {
        report,
        input,
        output,
        snapshots,
        tables,
    })
}

/// Write all artifacts of a completed run into `out_dir`.
pub fn write_artifacts(mut done: Completed, out_dir: &Path) -> Result<RunReport, CliError> {
    let io_err = |e: slowlight::Error| match e {
        slowlight::Error::Io(io) => CliError::Io(io.to_string()),
        other => CliError::Io(other.to_string()),
    };
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut artifacts = Vec::new();
    let emit_field = |name: &str, f: &ComplexField, artifacts: &mut Vec<String>| {
        field_io::write_field_dump(out_dir.join(format!("{name}.fld")), f).map_err(io_err)?;
        field_io::write_intensity_pgm(out_dir.join(format!("{name}.pgm")), f).map_err(io_err)?;
        artifacts.push(format!("{name}.fld"));
        artifacts.push(format!("{name}.pgm"));
        Ok::<(), CliError>(())
    };
    emit_field("input", &done.input, &mut artifacts)?;
    emit_field("output", &done.output, &mut artifacts)?;
    for (idx, snap) in &done.snapshots {
        emit_field(&format!("snapshot_{idx}"), snap, &mut artifacts)?;
    }

    // transverse cross section of the output through the grid center
    let g = done.output.grid();
    let iy = g.ny() / 2;
    let rows: Vec<Vec<String>> = (0..g.nx())
        .map(|ix| vec![fmt9(g.x(ix)), fmt9(done.output.at(ix, iy).norm_sqr())])
        .collect();
    write_csv(
        &out_dir.join("cross_section.csv"),
        &["x_m", "intensity"],
        rows,
    )?;
    artifacts.push("cross_section.csv".into());

    // long-format summary: one row per reported metric
    let meas_rows: Vec<Vec<String>> = done
        .report
        .measurements
        .iter()
        .enumerate()
        .flat_map(|(i, m)| {
            m.metrics()
                .into_iter()
                .map(move |(metric, v)| {
                    vec![i.to_string(), m.kind().to_string(), metric.to_string(), fmt9(v)]
                })
        })
        .collect();
    write_csv(
        &out_dir.join("measurements.csv"),
        &["index", "kind", "metric", "value"],
        meas_rows,
    )?;
    artifacts.push("measurements.csv".into());

    for (name, header, rows) in std::mem::take(&mut done.tables) {
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        write_csv(&out_dir.join(&name), &header_refs, rows)?;
        artifacts.push(name);
    }

    done.report.artifacts = artifacts;
    done.report.artifacts.push("report.json".into());
    write_json(&out_dir.join("report.json"), &done.report)?;
    Ok(done.report)
}

/// Load, simulate and write one experiment; returns the report.
pub fn run(config_path: &Path, out_override: Option<&Path>) -> Result<RunReport, CliError> {
    let bytes = std::fs::read(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let hash = sha256_hex(&bytes);
    let cfg = ExperimentConfig::load(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new("."));
    let done = run_config(&cfg, config_dir, hash)?;
    let out_dir = resolve_out_dir(&cfg, out_override);
    write_artifacts(done, &out_dir)
}

pub fn resolve_out_dir(cfg: &ExperimentConfig, out_override: Option<&Path>) -> PathBuf {
    out_override
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name))
}

/// Human-readable derived-quantity summary, no field computation.
pub fn describe(config_path: &Path) -> Result<String, CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let medium = cfg.medium.as_ref().map(|m| m.to_params()).transpose()?;
    let grid = cfg.grid()?;
    let mut out = String::new();
    let mut push = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    push(format!("experiment: {}", cfg.name));
    push(format!(
        "grid: {} x {} samples, {:.3e} x {:.3e} m, dk = {:.4e} 1/m",
        grid.nx(),
        grid.ny(),
        grid.extent_x(),
        grid.extent_y(),
        grid.dkx(),
    ));
    if let Some(m) = &medium {
        let d = m.derived();
        push(format!(
            "medium: gamma = {:.4e} rad/s, gamma_p = {:.4e} rad/s, alpha = {:.3} 1/m, lambda = {:.6e} m",
            m.gamma, m.gamma_p, m.alpha, m.lambda
        ));
        push(format!("k0 = {:.4e} 1/m", d.k0));
        match d.group_velocity {
            Some(v) => push(format!("v_g = {v:.4e} m/s")),
            None => push("v_g: undefined (alpha * gamma_p = 0)".into()),
        }
        match d.n_eff {
            Some(EffectiveIndex::Finite(n)) => push(format!("n_eff = {n:.6}")),
            Some(EffectiveIndex::Singular) => {
                push("n_eff: singular (diffraction fully eliminated)".into())
            }
            None => push("n_eff: undefined".into()),
        }
        let eit_len = cfg.eit_length();
        if let Some(gd) = d.group_delay_per_length {
            push(format!(
                "group delay over {:.3e} m of cell = {:.4e} s",
                eit_len,
                gd * eit_len
            ));
        }
        push(format!(
            "paraxial ratio |q theta_pump| / k0 = {:.4}",
            m.q() * m.theta_pump[0].hypot(m.theta_pump[1]) / d.k0
        ));
    } else {
        push("medium: none (free-space train)".into());
    }
    if let Some(spec) = cfg.grating_spec() {
        let lambda = medium
            .as_ref()
            .map(|m| m.lambda)
            .or(cfg.lambda_m)
            .unwrap_or(DEFAULT_LAMBDA_M);
        let lt = talbot_distance(spec.period, lambda).map_err(phys)?;
        push(format!(
            "grating: period = {:.4e} m, Talbot distance = {:.4e} m",
            spec.period, lt
        ));
    }
    push(format!("train: {} segment(s), total length {:.4e} m", cfg.train.len(), {
        cfg.train
            .iter()
            .map(|s| match s {
                SegmentConfig::Free(b) | SegmentConfig::Eit(b) => b.length_m,
            })
            .sum::<f64>()
    }));
    Ok(out)
}

/// Parameter sweep: patch `param` (dotted path into the config JSON) with
/// each value, run every point, and write per-point artifacts plus an
/// aggregate CSV.
pub fn sweep(
    config_path: &Path,
    param: &str,
    values: &[f64],
    out_override: Option<&Path>,
    workers: usize,
) -> Result<PathBuf, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs a non-empty value list".into()));
    }
    let bytes = std::fs::read(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let base_hash = sha256_hex(&bytes);
    let base: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", config_path.display())))?;
    let base_cfg: ExperimentConfig = serde_json::from_value(base.clone())
        .map_err(|e| CliError::Config(format!("{}: {e}", config_path.display())))?;
    base_cfg.validate()?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let out_dir = resolve_out_dir(&base_cfg, out_override);

    // patch, parse and validate every point up front: a bad path or value
    // fails before anything runs
    let mut configs = Vec::with_capacity(values.len());
    for &v in values {
        let mut point = base.clone();
        patch_value(&mut point, param, v)?;
        let cfg: ExperimentConfig = serde_json::from_value(point)
            .map_err(|e| CliError::Config(format!("patched config invalid: {e}")))?;
        cfg.validate()?;
        configs.push(cfg);
    }

    let workers = workers.max(1);
    let mut slots: Vec<Option<Result<Completed, CliError>>> =
        (0..configs.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slot_refs = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let res = run_config(&configs[i], &config_dir, base_hash.clone());
                let mut guard = slot_refs.lock().unwrap();
                guard[i] = Some(res);
            });
        }
    });

    // write artifacts in point order and build the aggregate
    let mut agg_rows = Vec::new();
    let mut columns: Option<Vec<&'static str>> = None;
    for (i, slot) in slots.into_iter().enumerate() {
        let done = slot.expect("every sweep slot filled")?;
        let point_dir = out_dir.join(format!("point_{i:03}"));
        let report = write_artifacts(done, &point_dir)?;
        let scalars: Vec<(&'static str, f64)> = report
            .measurements
            .iter()
            .flat_map(|m| m.scalar_columns())
            .collect();
        if columns.is_none() {
            columns = Some(scalars.iter().map(|(n, _)| *n).collect());
        }
        let mut row = vec![i.to_string(), fmt9(values[i]), fmt9(report.transmission)];
        row.extend(scalars.iter().map(|(_, v)| fmt9(*v)));
        agg_rows.push(row);
    }
    let mut header = vec!["index", "value", "transmission"];
    header.extend(columns.unwrap_or_default());
    write_csv(&out_dir.join("sweep.csv"), &header, agg_rows)?;
    Ok(out_dir)
}

fn patch_value(root: &mut serde_json::Value, path: &str, value: f64) -> Result<(), CliError> {
    let mut node = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("sweep path {path:?}: {seg:?} is not an object field"))
        })?;
        node = map.get_mut(*seg).ok_or_else(|| {
            CliError::Config(format!("sweep path {path:?}: no field {seg:?}"))
        })?;
        if i == segments.len() - 1 {
            if !node.is_number() {
                return Err(CliError::Config(format!(
                    "sweep path {path:?} does not address a numeric field"
                )));
            }
            *node = serde_json::json!(value);
        }
    }
    Ok(())
}
