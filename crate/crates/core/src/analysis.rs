//! Observables: Talbot distance, grating contrast, beam moments, walk-off
//! measurement, transmission and susceptibility diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::medium::MediumParams;
use crate::scenes::GratingSpec;
use crate::spectral::to_spectrum;

/// Self-imaging distance `2 a^2 / lambda` of a grating of period `a`.
pub fn talbot_distance(period: f64, lambda: f64) -> Result<f64> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::NonPositive(format!("grating period {period}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::NonPositive(format!("wavelength {lambda}")));
    }
    Ok(2.0 * period * period / lambda)
}

/// A rectangular analysis window, centered at `center` with the given half
/// extents. Infinite half extents select the whole grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisWindow {
    pub center: [f64; 2],
    pub half_extent: [f64; 2],
}

impl AnalysisWindow {
    pub fn centered(half_x: f64, half_y: f64) -> Self {
        Self {
            center: [0.0, 0.0],
            half_extent: [half_x, half_y],
        }
    }

    pub fn full() -> Self {
        Self::centered(f64::INFINITY, f64::INFINITY)
    }

    #[inline]
    fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.center[0]).abs() <= self.half_extent[0]
            && (y - self.center[1]).abs() <= self.half_extent[1]
    }
}

/// Talbot-contrast measurement of a propagated grating image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastReport {
    /// Mean intensity over stripes centered on the original bright lines.
    pub original_mean: f64,
    /// Mean intensity over stripes centered on the original dark lines.
    pub reciprocal_mean: f64,
    /// `(I_o - I_n) / (I_o + I_n)`, in `[-1, 1]`.
    pub contrast: f64,
    /// Echo of the sampled stripe width (m).
    pub stripe_width: f64,
}

/// Compare the intensity at the original and reciprocal line positions of a
/// grating.
///
/// Sampling stripes are `duty * a / 2` wide, centered on the generator's
/// registered line centers (original) and on the dark-line centers half a
/// period away (reciprocal); the window must span at least three periods
/// along the modulation axis and should exclude the envelope edges.
pub fn grating_contrast(
    field: &ComplexField,
    spec: &GratingSpec,
    window: &AnalysisWindow,
) -> Result<ContrastReport> {
    let grid = field.grid();
    spec.validate(grid)?;
    let span = match spec.axis {
        crate::scenes::GratingAxis::X => {
            2.0 * window.half_extent[0].min(grid.extent_x() / 2.0)
        }
        crate::scenes::GratingAxis::Y => {
            2.0 * window.half_extent[1].min(grid.extent_y() / 2.0)
        }
    };
    if span < 3.0 * spec.period {
        return Err(Error::WindowTooSmall(format!(
            "window spans {span:.3e} m, need at least 3 periods ({:.3e} m)",
            3.0 * spec.period
        )));
    }

    let half_sample = spec.duty / 4.0; // stripe width duty*a/2, in period units
    let mut orig = (0.0f64, 0usize);
    let mut recip = (0.0f64, 0usize);
    for iy in 0..grid.ny() {
        let y = grid.y(iy);
        for ix in 0..grid.nx() {
            let x = grid.x(ix);
            if !window.contains(x, y) {
                continue;
            }
            let u = spec.modulation_coord(x, y);
            let i = field.at(ix, iy).norm_sqr();
            if spec.center_offset(u).abs() < half_sample {
                orig.0 += i;
                orig.1 += 1;
            } else if spec.reciprocal_offset(u).abs() < half_sample {
                recip.0 += i;
                recip.1 += 1;
            }
        }
    }
    if orig.1 == 0 || recip.1 == 0 {
        return Err(Error::WindowTooSmall("no samples in a contrast region".into()));
    }
    let io = orig.0 / orig.1 as f64;
    let i_n = recip.0 / recip.1 as f64;
    let denom = io + i_n;
    if denom <= 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(ContrastReport {
        original_mean: io,
        reciprocal_mean: i_n,
        contrast: (io - i_n) / denom,
        stripe_width: spec.duty * spec.period / 2.0,
    })
}

fn moments(
    field: &ComplexField,
    window: &AnalysisWindow,
) -> Result<([f64; 2], [f64; 2], f64)> {
    let grid = field.grid();
    let (mut sx, mut sy, mut sxx, mut syy, mut p) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for iy in 0..grid.ny() {
        let y = grid.y(iy);
        for ix in 0..grid.nx() {
            let x = grid.x(ix);
            if !window.contains(x, y) {
                continue;
            }
            let w = field.at(ix, iy).norm_sqr();
            sx += w * x;
            sy += w * y;
            sxx += w * x * x;
            syy += w * y * y;
            p += w;
        }
    }
    if p <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let cx = sx / p;
    let cy = sy / p;
    let vx = (sxx / p - cx * cx).max(0.0);
    let vy = (syy / p - cy * cy).max(0.0);
    Ok(([cx, cy], [vx.sqrt(), vy.sqrt()], p))
}

/// Intensity-weighted first moment of the field within the window.
pub fn centroid(field: &ComplexField, window: &AnalysisWindow) -> Result<[f64; 2]> {
    Ok(moments(field, window)?.0)
}

/// Intensity-weighted RMS widths about the centroid, per axis.
pub fn rms_width(field: &ComplexField, window: &AnalysisWindow) -> Result<[f64; 2]> {
    Ok(moments(field, window)?.1)
}

/// Walk-off measurement: centroid displacement and residual carrier tilt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionReport {
    pub input_centroid: [f64; 2],
    pub output_centroid: [f64; 2],
    /// Effective deflection angle `(output - input) centroid / L` (rad).
    pub theta_probe: [f64; 2],
    /// Change of the spectral centroid divided by `q` (rad); near zero when
    /// the carrier keeps its direction through the cell.
    pub residual_tilt: [f64; 2],
}

/// Measure the deflection of `output` relative to `input` over a cell of
/// length `l`, with carrier wave number `q`.
pub fn deflection_measurement(
    input: &ComplexField,
    output: &ComplexField,
    l: f64,
    q: f64,
) -> Result<DeflectionReport> {
    if input.grid() != output.grid() {
        return Err(Error::GridMismatch);
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::NonPositive(format!("cell length {l}")));
    }
    if !(q > 0.0) {
        return Err(Error::NonPositive(format!("carrier wave number {q}")));
    }
    let win = AnalysisWindow::full();
    let ci = centroid(input, &win)?;
    let co = centroid(output, &win)?;
    let ki = to_spectrum(input).centroid()?;
    let ko = to_spectrum(output).centroid()?;
    Ok(DeflectionReport {
        input_centroid: ci,
        output_centroid: co,
        theta_probe: [(co[0] - ci[0]) / l, (co[1] - ci[1]) / l],
        residual_tilt: [(ko[0] - ki[0]) / q, (ko[1] - ki[1]) / q],
    })
}

/// Power ratio `output / input`.
pub fn transmission(input: &ComplexField, output: &ComplexField) -> Result<f64> {
    let pin = input.power();
    if pin <= 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(output.power() / pin)
}

/// Plane-wave (DC-only) transmission spectrum of a slab of length `l`:
/// `T(delta) = exp(-2 Im chi(0; delta) L)`, evaluated analytically rather
/// than by propagating a field.
pub fn transmission_spectrum(
    params: &MediumParams,
    deltas: &[f64],
    l: f64,
) -> Vec<(f64, f64)> {
    deltas
        .iter()
        .map(|&delta| {
            let p = params.with_delta(delta);
            let t = (-2.0 * p.chi_total([0.0, 0.0]).im * l).exp();
            (delta, t)
        })
        .collect()
}

/// One sampled susceptibility point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSample {
    /// Transverse wave number, taken along x (1/m).
    pub k: f64,
    /// Raman detuning (rad/s).
    pub delta: f64,
    /// Total susceptibility `chi(k; delta)` (1/m).
    pub chi: Complex64,
}

/// Sample the total susceptibility over a `k x delta` table, e.g. to
/// regenerate dispersion-curve plots.
pub fn chi_curve_export(params: &MediumParams, ks: &[f64], deltas: &[f64]) -> Vec<ChiSample> {
    let mut out = Vec::with_capacity(ks.len() * deltas.len());
    for &delta in deltas {
        let p = params.with_delta(delta);
        for &k in ks {
            out.push(ChiSample {
                k,
                delta,
                chi: p.chi_total([k, 0.0]),
            });
        }
    }
    out
}

/// Estimate the quadratic Taylor coefficient `f''(center)/2` of a sampled
/// curve by central second differences, Richardson-extrapolated once.
///
/// Three stencils (`step`, `step/2`, `step/4`) feed the extrapolation; if the
/// two Richardson levels disagree by more than a tenth of the leading-order
/// correction the step is too large for the curvature scale of `f` and an
/// error is returned.
pub fn fd_taylor_c2(
    f: impl Fn(f64) -> Complex64,
    center: f64,
    step: f64,
) -> Result<Complex64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::NonPositive(format!("finite-difference step {step}")));
    }
    let c2_at = |h: f64| {
        (f(center + h) - 2.0 * f(center) + f(center - h)) / Complex64::new(2.0 * h * h, 0.0)
    };
    let c1 = c2_at(step);
    let c2 = c2_at(step / 2.0);
    let c3 = c2_at(step / 4.0);
    if !(c1.is_finite() && c2.is_finite() && c3.is_finite()) {
        return Err(Error::FdNotConverged);
    }
    let r12 = (4.0 * c2 - c1) / 3.0;
    let r23 = (4.0 * c3 - c2) / 3.0;
    let scale = c1.norm().max(c2.norm()).max(c3.norm());
    if (r23 - r12).norm() > 0.1 * (c1 - c2).norm() + 1e-9 * scale {
        return Err(Error::FdNotConverged);
    }
    Ok(r23)
}
