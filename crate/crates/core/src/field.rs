//! Complex field envelopes and their spectra.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// A sampled complex envelope `E(x, y)` on a [`Grid2D`].
///
/// Values are stored flat, row-major in `y` (`index = iy * nx + ix`), and the
/// field is immutable after construction.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField {
    /// Wrap an existing sample vector. The length must be `nx * ny` and all
    /// entries finite.
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidField("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    /// All-zero field.
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Constant-amplitude field.
    pub fn uniform(grid: Grid2D, amplitude: Complex64) -> Self {
        Self {
            grid,
            values: vec![amplitude; grid.len()],
        }
    }

    /// Sample `f(x, y)` at every grid point (centered coordinates).
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            let y = grid.y(iy);
            for ix in 0..grid.nx() {
                values.push(f(grid.x(ix), y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Sample at `(ix, iy)`.
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.idx(ix, iy)]
    }

    /// `|E|^2` per sample, same layout as `values`.
    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Total power `sum |E|^2 dx dy`, accumulated in index order so the
    /// result does not depend on any parallel schedule.
    pub fn power(&self) -> f64 {
        let cell = self.grid.dx() * self.grid.dy();
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }

    /// Apply `f` to every sample, yielding a new field.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Fraction of total power within `margin` samples of any grid edge.
    ///
    /// Periodic-boundary propagation silently wraps energy that reaches the
    /// edge; callers compare this against a small threshold (1e-6 is the
    /// conventional warning level) before trusting a result.
    pub fn edge_power_fraction(&self, margin: usize) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut edge = 0.0;
        let mut total = 0.0;
        for iy in 0..ny {
            for ix in 0..nx {
                let p = self.values[self.grid.idx(ix, iy)].norm_sqr();
                total += p;
                if ix < margin || iy < margin || ix >= nx - margin || iy >= ny - margin {
                    edge += p;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }
}

/// The discrete spectrum of a [`ComplexField`], indexed by `(kx, ky)`.
///
/// Samples are kept in natural FFT order (see [`Grid2D::kx`]) and are
/// normalized to the continuum convention: a forward transform approximates
/// `integral E(x,y) exp(-i k.x) dx dy`, so spectral power is
/// `sum |S|^2 dkx dky / (2 pi)^2` and Parseval holds against
/// [`ComplexField::power`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub(crate) fn from_raw(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn into_parts(self) -> (Grid2D, Vec<Complex64>) {
        (self.grid, self.values)
    }

    /// Sample at spectral index `(ix, iy)`; physical wave numbers are
    /// `(grid.kx(ix), grid.ky(iy))`.
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.idx(ix, iy)]
    }

    /// Spectral power `sum |S|^2 dkx dky / (2 pi)^2`.
    pub fn power(&self) -> f64 {
        let cell = self.grid.dkx() * self.grid.dky()
            / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }

    /// Intensity-weighted mean of `(kx, ky)` over the spectrum.
    pub fn centroid(&self) -> Result<[f64; 2]> {
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut tot = 0.0;
        for iy in 0..self.grid.ny() {
            let ky = self.grid.ky(iy);
            for ix in 0..self.grid.nx() {
                let w = self.values[self.grid.idx(ix, iy)].norm_sqr();
                sx += w * self.grid.kx(ix);
                sy += w * ky;
                tot += w;
            }
        }
        if tot <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok([sx / tot, sy / tot])
    }
}
