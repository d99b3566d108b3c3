//! Input-field generators: gratings, Gaussian beams, top-hat sources, bitmap
//! masks, and the iris low-pass filter of the imaging system.
//!
//! All generators are pure constructors returning real, non-negative
//! amplitudes unless a tilt is requested; masks act on the field amplitude,
//! not the intensity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;
use crate::io;
use crate::spectral::filtered_round_trip;

/// Axis along which a grating's amplitude is modulated (lines run along the
/// other axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GratingAxis {
    X,
    Y,
}

/// A binary line grating.
///
/// Bright lines are centered on integer multiples of the period along the
/// modulation axis, with the central line registered to the grid origin; an
/// analysis that samples those centers (see
/// [`grating_contrast`](crate::analysis::grating_contrast)) aligns exactly
/// with the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec {
    /// Period `a` (m).
    pub period: f64,
    /// Bright fraction of each period, in `(0, 1)`.
    pub duty: f64,
    pub axis: GratingAxis,
    /// Optional super-Gaussian window along the modulation axis:
    /// `exp(-(u/half_width)^(2*order))`. `None` leaves the grating unwindowed
    /// (periodic across the grid).
    pub envelope: Option<Envelope>,
}

/// Soft super-Gaussian window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    /// 1/e amplitude half width (m).
    pub half_width: f64,
    /// Super-Gaussian order `m` in `exp(-(u/hw)^(2m))`; 4 gives a wide flat
    /// top with soft edges.
    pub order: u32,
}

impl GratingSpec {
    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::NonPositive(format!("grating period {}", self.period)));
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(Error::InvalidParams(format!(
                "duty cycle must lie in (0,1), got {}",
                self.duty
            )));
        }
        let d = match self.axis {
            GratingAxis::X => grid.dx(),
            GratingAxis::Y => grid.dy(),
        };
        if self.period < 8.0 * d {
            return Err(Error::UnresolvedFeature(format!(
                "grating period {} m spans fewer than 8 samples (spacing {} m)",
                self.period, d
            )));
        }
        if let Some(env) = self.envelope {
            if !(env.half_width > 0.0) || env.order == 0 {
                return Err(Error::InvalidParams("bad grating envelope".into()));
            }
        }
        Ok(())
    }

    /// Signed distance from `coord` to the nearest bright-line center, in
    /// periods (in `[-0.5, 0.5)`). Shared with the contrast analysis so the
    /// two always agree on registration.
    #[inline]
    pub(crate) fn center_offset(&self, coord: f64) -> f64 {
        (coord / self.period + 0.5).rem_euclid(1.0) - 0.5
    }

    /// As [`Self::center_offset`] but relative to the reciprocal (dark-line)
    /// centers at half-integer multiples of the period.
    #[inline]
    pub(crate) fn reciprocal_offset(&self, coord: f64) -> f64 {
        (coord / self.period).rem_euclid(1.0) - 0.5
    }

    #[inline]
    pub(crate) fn modulation_coord(&self, x: f64, y: f64) -> f64 {
        match self.axis {
            GratingAxis::X => x,
            GratingAxis::Y => y,
        }
    }
}

/// Generate a binary grating field.
pub fn binary_grating(grid: &Grid2D, spec: &GratingSpec) -> Result<ComplexField> {
    spec.validate(grid)?;
    Ok(ComplexField::from_fn(*grid, |x, y| {
        let u = spec.modulation_coord(x, y);
        let bright = spec.center_offset(u).abs() < spec.duty / 2.0;
        let amp = if bright {
            match spec.envelope {
                Some(env) => (-(u / env.half_width).abs().powi(2 * env.order as i32)).exp(),
                None => 1.0,
            }
        } else {
            0.0
        };
        Complex64::new(amp, 0.0)
    }))
}

/// Gaussian beam `exp(-r^2/w0^2)` with unit peak amplitude, optional center
/// offset and a linear phase `exp(i q (tx x + ty y))` encoding a tilt of the
/// carrier by `(tx, ty)` radians.
pub fn gaussian_beam(
    grid: &Grid2D,
    waist: f64,
    center: [f64; 2],
    tilt: [f64; 2],
    q: f64,
) -> Result<ComplexField> {
    let min_waist = 4.0 * grid.dx().max(grid.dy());
    if !(waist.is_finite() && waist >= min_waist) {
        return Err(Error::UnresolvedFeature(format!(
            "waist {waist} m under-resolved; need at least {min_waist} m on this grid"
        )));
    }
    if !(q > 0.0) {
        return Err(Error::NonPositive(format!("carrier wave number {q}")));
    }
    Ok(ComplexField::from_fn(*grid, |x, y| {
        let dx = x - center[0];
        let dy = y - center[1];
        let amp = (-(dx * dx + dy * dy) / (waist * waist)).exp();
        Complex64::from_polar(amp, q * (tilt[0] * x + tilt[1] * y))
    }))
}

/// Top-hat disc of amplitude 1 and the given radius, centered on the grid.
pub fn point_source(grid: &Grid2D, radius: f64) -> Result<ComplexField> {
    let min_r = 2.0 * grid.dx().max(grid.dy());
    if !(radius.is_finite() && radius >= min_r) {
        return Err(Error::UnresolvedFeature(format!(
            "source radius {radius} m under-resolved; need at least {min_r} m on this grid"
        )));
    }
    Ok(ComplexField::from_fn(*grid, |x, y| {
        if x * x + y * y <= radius * radius {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// A grayscale amplitude mask with a physical pixel pitch.
#[derive(Debug, Clone)]
pub struct MaskImage {
    width: usize,
    height: usize,
    /// Amplitude per pixel in `[0, 1]`, row-major, row 0 at the top
    /// (largest y).
    pixels: Vec<f64>,
    /// Physical size of one mask pixel (m).
    pitch: f64,
}

impl MaskImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>, pitch: f64) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::InvalidParams("mask dimensions mismatch".into()));
        }
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::NonPositive(format!("mask pitch {pitch}")));
        }
        if !pixels.iter().all(|p| (0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParams("mask values outside [0,1]".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
            pitch,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    #[inline]
    fn pixel(&self, mx: isize, my: isize) -> f64 {
        if mx < 0 || my < 0 || mx as usize >= self.width || my as usize >= self.height {
            0.0
        } else {
            self.pixels[my as usize * self.width + mx as usize]
        }
    }
}

/// How [`apply_mask`] samples the mask onto the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resampling {
    #[default]
    Nearest,
    Bilinear,
}

/// Load a PGM (P5, 8- or 16-bit) file as an amplitude mask; gray values map
/// linearly onto `[0, 1]`.
pub fn load_mask(path: impl AsRef<std::path::Path>, pitch: f64) -> Result<MaskImage> {
    let img = io::read_pgm(path)?;
    let scale = 1.0 / img.maxval as f64;
    let pixels = img.samples.iter().map(|&s| s as f64 * scale).collect();
    MaskImage::new(img.width, img.height, pixels, pitch)
}

/// Resample a mask (centered) onto a grid as a field amplitude in `[0, 1]`.
/// Points outside the mask are dark.
pub fn apply_mask(grid: &Grid2D, mask: &MaskImage, resampling: Resampling) -> Result<ComplexField> {
    let mask_w = mask.width as f64 * mask.pitch;
    let mask_h = mask.height as f64 * mask.pitch;
    if mask_w > grid.extent_x() || mask_h > grid.extent_y() {
        return Err(Error::MaskTooLarge(format!(
            "mask {:.3e} x {:.3e} m exceeds grid {:.3e} x {:.3e} m",
            mask_w,
            mask_h,
            grid.extent_x(),
            grid.extent_y()
        )));
    }
    Ok(ComplexField::from_fn(*grid, |x, y| {
        // mask pixel centers sit at ((m + 0.5) pitch - extent/2); row 0 on top
        let px = x / mask.pitch + mask.width as f64 / 2.0 - 0.5;
        let py = -y / mask.pitch + mask.height as f64 / 2.0 - 0.5;
        let amp = match resampling {
            Resampling::Nearest => mask.pixel(px.round() as isize, py.round() as isize),
            Resampling::Bilinear => {
                let x0 = px.floor();
                let y0 = py.floor();
                let fx = px - x0;
                let fy = py - y0;
                let (x0, y0) = (x0 as isize, y0 as isize);
                mask.pixel(x0, y0) * (1.0 - fx) * (1.0 - fy)
                    + mask.pixel(x0 + 1, y0) * fx * (1.0 - fy)
                    + mask.pixel(x0, y0 + 1) * (1.0 - fx) * fy
                    + mask.pixel(x0 + 1, y0 + 1) * fx * fy
            }
        };
        Complex64::new(amp, 0.0)
    }))
}

/// Low-pass the field: zero every spectral sample with `|k| > k_cut`.
/// Idempotent, never increases power; a cut at or beyond the spectral corner
/// returns the field unchanged.
pub fn iris_filter(field: &ComplexField, k_cut: f64) -> Result<ComplexField> {
    if !(k_cut > 0.0 && k_cut.is_finite()) {
        return Err(Error::NonPositive(format!("iris cutoff {k_cut}")));
    }
    let grid = field.grid();
    let corner = {
        let kx_max = std::f64::consts::PI / grid.dx();
        let ky_max = std::f64::consts::PI / grid.dy();
        kx_max * kx_max + ky_max * ky_max
    };
    if k_cut * k_cut >= corner {
        return Ok(field.clone());
    }
    let cut2 = k_cut * k_cut;
    Ok(filtered_round_trip(field, |spectrum, grid| {
        let mut i = 0;
        for iy in 0..grid.ny() {
            let ky = grid.ky(iy);
            for ix in 0..grid.nx() {
                let kx = grid.kx(ix);
                if kx * kx + ky * ky > cut2 {
                    spectrum[i] = Complex64::new(0.0, 0.0);
                }
                i += 1;
            }
        }
    }))
}
