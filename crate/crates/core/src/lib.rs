//! Paraxial wave-optics simulation of diffraction control in a hot-vapor
//! EIT medium.
//!
//! A weak probe carrying a 2D image propagates through an atomic vapor cell
//! under electromagnetically induced transparency. Atomic thermal motion
//! gives the susceptibility a quadratic dependence on the transverse wave
//! number, and tuning the Raman detuning turns that dependence into a knob
//! on paraxial diffraction itself: at `delta = -gamma` with the group
//! velocity set to `v_g = qD` diffraction (and diffusion) is eliminated; at
//! `delta = +gamma` it doubles; a tilted pump drags the image sideways
//! (walk-off); and at `v_g = qD/2` the cell behaves as a flat lens with
//! effective index -1.
//!
//! The numerical scheme is the angular-spectrum method: Fourier-transform
//! the incident envelope, multiply by `exp(i chi(k) L)`, and transform back.
//!
//! ```
//! use slowlight::{Grid2D, MediumParams, scenes, propagation, analysis};
//!
//! // a 70 kHz EIT line over D = 1100 mm^2/s, tuned for elimination
//! let gamma = 2.0 * std::f64::consts::PI * 70e3;
//! let mut medium = MediumParams::new(1.1e-3, gamma, 0.0, -gamma, 60.0, 794.979e-9)?;
//! medium.gamma_p = medium.gamma_p_for_group_velocity(medium.q() * medium.diffusion)?;
//!
//! let grid = Grid2D::new(128, 128, 20e-6, 20e-6)?;
//! let beam = scenes::gaussian_beam(&grid, 300e-6, [0.0, 0.0], [0.0, 0.0], medium.q())?;
//! let cell = propagation::eit_tf(&grid, &medium, 0.05)?;
//! let out = propagation::propagate(&beam, &cell)?;
//! let out = propagation::normalize_uniform_loss(&out, &medium, 0.05);
//!
//! // the beam shape survives the 50 mm cell
//! let win = analysis::AnalysisWindow::full();
//! let w_in = analysis::rms_width(&beam, &win)?[0];
//! let w_out = analysis::rms_width(&out, &win)?[0];
//! assert!((w_out - w_in).abs() / w_in < 1e-3);
//! # Ok::<(), slowlight::Error>(())
//! ```

pub mod analysis;
mod error;
mod field;
mod grid;
pub mod io;
pub mod medium;
pub mod propagation;
pub mod scenes;
mod spectral;

pub use error::{Error, Result};
pub use field::{ComplexField, SpectralField};
pub use grid::Grid2D;
pub use medium::{DerivedQuantities, EffectiveIndex, MediumParams};
pub use propagation::{
    eit_tf, free_space_tf, normalize_uniform_loss, propagate, run_train, OpticalTrain, Segment,
    SegmentMedium, TransferFunction,
};
pub use spectral::{from_spectrum, to_spectrum};

pub use num_complex::Complex64;
