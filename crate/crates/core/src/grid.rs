//! Uniform 2D sampling grids and their discrete spectral axes.
//!
//! A [`Grid2D`] carries the sample counts and spacings of a centered
//! rectangular grid. Spatial coordinates span `[-L/2, L/2)` per axis; the
//! spectral axes are the exact discrete Fourier duals, spaced
//! `dk = 2*pi/(n*d)` and covering `(-pi/d, pi/d]` (the Nyquist sample is
//! reported with positive sign).

use crate::error::{Error, Result};

/// A uniform, origin-centered 2D sampling grid.
///
/// Immutable after construction. Samples are addressed by `(ix, iy)` with
/// `0 <= ix < nx`, `0 <= iy < ny`; flat storage is row-major in `y`
/// (`index = iy * nx + ix`). Spectral samples use the same indexing and are
/// kept in natural FFT order; [`Grid2D::kx`] and [`Grid2D::ky`] map an index
/// to its physical (signed) wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid2D {
    /// Create a grid with `nx * ny` samples spaced `dx`, `dy` (meters).
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples per axis, got {nx} x {ny}"
            )));
        }
        if !(dx.is_finite() && dy.is_finite() && dx > 0.0 && dy > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacings must be finite and positive, got dx = {dx}, dy = {dy}"
            )));
        }
        Ok(Self { nx, ny, dx, dy })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Total number of samples `nx * ny`.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical extent `nx * dx` along x.
    pub fn extent_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    /// Physical extent `ny * dy` along y.
    pub fn extent_y(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    /// Flat index of sample `(ix, iy)`.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    /// Centered x coordinate of column `ix`.
    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.dx
    }

    /// Centered y coordinate of row `iy`.
    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.dy
    }

    /// Spectral spacing `2*pi/(nx*dx)` along x.
    pub fn dkx(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.extent_x()
    }

    /// Spectral spacing `2*pi/(ny*dy)` along y.
    pub fn dky(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.extent_y()
    }

    /// Signed spectral coordinate of column `ix` in FFT order.
    ///
    /// Indices up to `nx/2` map to `ix * dkx` (the even-`nx` Nyquist sample
    /// comes out positive, `+pi/dx`); the remainder wrap to negative values.
    #[inline]
    pub fn kx(&self, ix: usize) -> f64 {
        debug_assert!(ix < self.nx);
        let n = self.nx;
        if ix <= n / 2 {
            ix as f64 * self.dkx()
        } else {
            (ix as f64 - n as f64) * self.dkx()
        }
    }

    /// Signed spectral coordinate of row `iy` in FFT order.
    #[inline]
    pub fn ky(&self, iy: usize) -> f64 {
        debug_assert!(iy < self.ny);
        let n = self.ny;
        if iy <= n / 2 {
            iy as f64 * self.dky()
        } else {
            (iy as f64 - n as f64) * self.dky()
        }
    }

    /// `kx^2 + ky^2` for every spectral sample, in flat FFT order.
    ///
    /// Non-negative everywhere and exactly zero at the DC sample; this is the
    /// argument of every susceptibility evaluation, so it is precomputed once
    /// per grid.
    pub fn spectral_k_squared(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for iy in 0..self.ny {
            let ky = self.ky(iy);
            for ix in 0..self.nx {
                let kx = self.kx(ix);
                out.push(kx * kx + ky * ky);
            }
        }
        out
    }
}
