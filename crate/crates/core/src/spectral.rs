//! Forward and inverse 2D transforms between field and spectrum.
//!
//! Convention (fixed once, tested in `tests/properties.rs`): the forward
//! transform is the Riemann-sum approximation of
//! `S(k) = integral E(x) exp(-i k.x) dx dy`, i.e. an unnormalized DFT scaled
//! by `dx*dy`; the inverse applies the conjugate DFT scaled by
//! `1/(nx*ny*dx*dy)`. Under this pairing `from_spectrum(to_spectrum(f))`
//! reproduces `f` to machine precision and Parseval reads
//! `sum |E|^2 dx dy = sum |S|^2 dkx dky / (2 pi)^2`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::field::{ComplexField, SpectralField};
use crate::grid::Grid2D;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// In-place 2D DFT over row-major data: rows first, then columns via a
/// transpose round trip. No normalization is applied here.
fn dft2_inplace(values: &mut [Complex64], nx: usize, ny: usize, direction: FftDirection) {
    debug_assert_eq!(values.len(), nx * ny);

    let row_fft = plan(nx, direction);
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    for row in values.chunks_exact_mut(nx) {
        row_fft.process_with_scratch(row, &mut scratch);
    }

    let mut tr = vec![Complex64::default(); nx * ny];
    transpose(values, &mut tr, nx, ny);

    let col_fft = plan(ny, direction);
    let mut scratch = vec![Complex64::default(); col_fft.get_inplace_scratch_len()];
    for row in tr.chunks_exact_mut(ny) {
        col_fft.process_with_scratch(row, &mut scratch);
    }

    transpose(&tr, values, ny, nx);
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], ncols: usize, nrows: usize) {
    for r in 0..nrows {
        for c in 0..ncols {
            dst[c * nrows + r] = src[r * ncols + c];
        }
    }
}

/// Forward transform of a field into its spectrum.
pub fn to_spectrum(field: &ComplexField) -> SpectralField {
    let grid = *field.grid();
    let mut values = field.values().to_vec();
    dft2_inplace(&mut values, grid.nx(), grid.ny(), FftDirection::Forward);
    let scale = grid.dx() * grid.dy();
    for v in &mut values {
        *v *= scale;
    }
    SpectralField::from_raw(grid, values)
}

/// Inverse transform of a spectrum back into a field.
pub fn from_spectrum(spectrum: &SpectralField) -> ComplexField {
    let (grid, mut values) = spectrum.clone().into_parts();
    dft2_inplace(&mut values, grid.nx(), grid.ny(), FftDirection::Inverse);
    let scale = 1.0 / (grid.len() as f64 * grid.dx() * grid.dy());
    for v in &mut values {
        *v *= scale;
    }
    ComplexField::new(grid, values).expect("inverse transform preserves shape and finiteness")
}

/// Round trip `f -> spectrum -> H(k) * spectrum -> field` in one pass, without
/// the intermediate continuum scaling (it cancels exactly).
pub(crate) fn filtered_round_trip(
    field: &ComplexField,
    mut apply: impl FnMut(&mut [Complex64], &Grid2D),
) -> ComplexField {
    let grid = *field.grid();
    let mut values = field.values().to_vec();
    dft2_inplace(&mut values, grid.nx(), grid.ny(), FftDirection::Forward);
    apply(&mut values, &grid);
    dft2_inplace(&mut values, grid.nx(), grid.ny(), FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    for v in &mut values {
        *v *= scale;
    }
    ComplexField::new(grid, values).expect("round trip preserves shape and finiteness")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_field_is_dc_only() {
        let g = Grid2D::new(8, 4, 1e-6, 1e-6).unwrap();
        let f = ComplexField::uniform(g, Complex64::new(1.0, 0.0));
        let s = to_spectrum(&f);
        // DC sample holds the integral of E over the grid.
        let dc = s.at(0, 0);
        assert_relative_eq!(dc.re, g.extent_x() * g.extent_y(), max_relative = 1e-12);
        for iy in 0..4 {
            for ix in 0..8 {
                if ix != 0 || iy != 0 {
                    assert!(s.at(ix, iy).norm() < 1e-18);
                }
            }
        }
    }

    #[test]
    fn impulse_has_flat_magnitude_spectrum() {
        let g = Grid2D::new(8, 8, 1.0, 1.0).unwrap();
        let mut v = vec![Complex64::default(); g.len()];
        v[g.idx(3, 5)] = Complex64::new(1.0, 0.0);
        let f = ComplexField::new(g, v).unwrap();
        let s = to_spectrum(&f);
        let mag0 = s.at(0, 0).norm();
        for val in s.values() {
            assert_relative_eq!(val.norm(), mag0, max_relative = 1e-12);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let g = Grid2D::new(16, 12, 2e-6, 3e-6).unwrap();
        let f = ComplexField::from_fn(g, |x, y| {
            Complex64::new((1e6 * x).sin() + 0.3, (7e5 * y).cos())
        });
        let back = from_spectrum(&to_spectrum(&f));
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}
