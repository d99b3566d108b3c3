//! Spectral transfer functions and multi-slab propagation.
//!
//! Propagation through any uniform slab is a single multiplication in the
//! transverse Fourier plane: transform the field, multiply by
//! `H(k) = exp(i chi(k) L)`, transform back. No z-slicing is needed because
//! the media here are linear and z-invariant; multi-segment trains exist
//! only to change geometry and to record snapshots. The susceptibility is
//! evaluated at every grid `k` without paraxial truncation.
//!
//! Boundaries are periodic. Keep a guard band between the image support and
//! the grid edge and check [`ComplexField::edge_power_fraction`] (warn above
//! [`GUARD_EDGE_WARN_FRACTION`]): wrap-around is the dominant silent error in
//! FFT propagation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;
use crate::medium::MediumParams;
use crate::spectral::filtered_round_trip;

/// Fraction of power within two samples of the grid edge above which results
/// should be treated as wrap-contaminated.
pub const GUARD_EDGE_WARN_FRACTION: f64 = 1e-6;

/// A cached spectral transfer function `H(k) = exp(i chi(k) L)` for one slab.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    grid: Grid2D,
    h: Vec<Complex64>,
    length: f64,
    medium: MediumTag,
}

/// What produced a transfer function.
#[derive(Debug, Clone, PartialEq)]
pub enum MediumTag {
    FreeSpace,
    Eit(MediumParams),
}

impl TransferFunction {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.h
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn medium(&self) -> &MediumTag {
        &self.medium
    }
}

/// Free-space paraxial transfer function `H(k) = exp(-i k^2 L / (2q))`.
///
/// Negative `L` back-propagates (the inverse filter); `|H| = 1` everywhere.
pub fn free_space_tf(grid: &Grid2D, q: f64, length: f64) -> TransferFunction {
    assert!(q > 0.0, "carrier wave number must be positive");
    let h = grid
        .spectral_k_squared()
        .iter()
        .map(|&k2| Complex64::from_polar(1.0, -k2 * length / (2.0 * q)))
        .collect();
    TransferFunction {
        grid: *grid,
        h,
        length,
        medium: MediumTag::FreeSpace,
    }
}

/// EIT-cell transfer function `H(k) = exp(i chi(k) L)` over the full spectral
/// axes. Back-propagation (`L < 0`) through the absorbing medium is rejected;
/// it would amplify spectral noise exponentially.
pub fn eit_tf(grid: &Grid2D, params: &MediumParams, length: f64) -> Result<TransferFunction> {
    params.validate()?;
    if length < 0.0 {
        return Err(Error::NegativeEitLength(length));
    }
    let mut h = Vec::with_capacity(grid.len());
    for iy in 0..grid.ny() {
        let ky = grid.ky(iy);
        for ix in 0..grid.nx() {
            let chi = params.chi_total([grid.kx(ix), ky]);
            h.push((Complex64::i() * chi * length).exp());
        }
    }
    Ok(TransferFunction {
        grid: *grid,
        h,
        length,
        medium: MediumTag::Eit(*params),
    })
}

/// Apply one slab: `from_spectrum(H * to_spectrum(f))`. Linear in `f`.
pub fn propagate(field: &ComplexField, tf: &TransferFunction) -> Result<ComplexField> {
    if field.grid() != tf.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(filtered_round_trip(field, |spectrum, _| {
        for (s, h) in spectrum.iter_mut().zip(&tf.h) {
            *s *= h;
        }
    }))
}

/// Divide out the k-independent factor `exp(i chi(0) L)` of a slab so that
/// output shapes can be compared across detunings. This removes the uniform
/// attenuation (which the medium imposes in both real and k space) together
/// with the global phase; for free space it only strips a global phase.
pub fn normalize_uniform_loss(
    field: &ComplexField,
    params: &MediumParams,
    length: f64,
) -> ComplexField {
    let h0 = (Complex64::i() * params.chi_total([0.0, 0.0]) * length).exp();
    field.map(|v| v / h0)
}

/// One slab of an optical train.
#[derive(Debug, Clone)]
pub struct Segment {
    pub medium: SegmentMedium,
    /// Slab length (m); must be non-negative for EIT segments.
    pub length: f64,
}

#[derive(Debug, Clone)]
pub enum SegmentMedium {
    FreeSpace,
    Eit(MediumParams),
}

impl Segment {
    pub fn free_space(length: f64) -> Self {
        Self {
            medium: SegmentMedium::FreeSpace,
            length,
        }
    }

    pub fn eit(params: MediumParams, length: f64) -> Self {
        Self {
            medium: SegmentMedium::Eit(params),
            length,
        }
    }
}

/// An ordered sequence of slabs sharing one grid and carrier.
///
/// `q` is the carrier wave number used by free-space segments. An optional
/// snapshot plan records the field after selected segments.
#[derive(Debug, Clone)]
pub struct OpticalTrain {
    segments: Vec<Segment>,
    q: f64,
    snapshot_after: Vec<usize>,
}

impl OpticalTrain {
    pub fn new(q: f64, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyTrain);
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::NonPositive(format!("carrier wave number {q}")));
        }
        Ok(Self {
            segments,
            q,
            snapshot_after: Vec::new(),
        })
    }

    /// Record the field after segment `index` (0-based) during
    /// [`run_train`].
    pub fn with_snapshots(mut self, snapshot_after: Vec<usize>) -> Self {
        self.snapshot_after = snapshot_after;
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Total length of the EIT slabs only.
    pub fn eit_length(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| matches!(s.medium, SegmentMedium::Eit(_)))
            .map(|s| s.length)
            .sum()
    }
}

/// Result of running a train: the final field plus any planned snapshots,
/// in plan order.
#[derive(Debug)]
pub struct TrainOutput {
    pub output: ComplexField,
    pub snapshots: Vec<(usize, ComplexField)>,
}

/// Apply every segment of a train in order.
pub fn run_train(field: &ComplexField, train: &OpticalTrain) -> Result<TrainOutput> {
    let mut current = field.clone();
    let mut snapshots = Vec::new();
    for (i, seg) in train.segments.iter().enumerate() {
        let tf = match &seg.medium {
            SegmentMedium::FreeSpace => free_space_tf(current.grid(), train.q, seg.length),
            SegmentMedium::Eit(p) => eit_tf(current.grid(), p, seg.length)?,
        };
        current = propagate(&current, &tf)?;
        if train.snapshot_after.contains(&i) {
            snapshots.push((i, current.clone()));
        }
    }
    Ok(TrainOutput {
        output: current,
        snapshots,
    })
}
