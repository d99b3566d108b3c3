//! The vapor-medium physics: susceptibility, its quadratic expansion and the
//! derived propagation quantities.
//!
//! A weak probe at transverse wave vector `k` sees the susceptibility
//!
//! ```text
//! chi_eit(k) = i*alpha * (1 - gamma_p / (gamma + D*|k - q*theta_pump|^2 - i*delta))
//! chi(k)     = chi_eit(k) - |k|^2 / (2q)
//! ```
//!
//! in units of 1/m, so a slab of length `L` multiplies the spectrum by
//! `exp(i chi(k) L)`. All spectral widths (`gamma`, `gamma_p`, `delta`) are
//! angular frequencies in rad/s; only that convention reproduces the
//! measured low-pass width `k0 = sqrt(gamma/D)` from a line width quoted in
//! cycles (config files take Hz and convert by `2 pi` at the boundary).
//!
//! On Raman resonance (`delta = 0`) the motional term acts as a diffusion
//! filter of half width `k0`. At `delta = -gamma` its leading quadratic term
//! turns purely real and opposes free-space diffraction; with the group
//! velocity tuned to `v_g = D q` the two cancel and image propagation is
//! frozen. At `delta = +gamma` they add, doubling the diffraction, and for
//! `v_g < D q` the net diffraction is reversed (negative effective index).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance for requiring `delta = +gamma` or `delta = -gamma`.
const RESONANCE_TOL: f64 = 1e-9;

/// Threshold on `|1 - qD/v_g|` below which the effective index is reported
/// as singular (diffraction fully eliminated, rays never refocus).
const N_EFF_SINGULAR_TOL: f64 = 1e-12;

/// Pump-tilt magnitude, in units of `k0/q`, above which predictions carry a
/// beyond-paraxial warning.
const PARAXIAL_WARN_FRACTION: f64 = 0.3;

/// Physical parameters of the EIT vapor cell.
///
/// Fields are public and plain; call [`MediumParams::validate`] after
/// hand-assembling one, or build through [`MediumParams::new`] which
/// validates for you. Lengths are meters, rates rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Atomic diffusion coefficient `D` (m^2/s).
    pub diffusion: f64,
    /// EIT line width `gamma` (rad/s).
    pub gamma: f64,
    /// Power-broadening width `gamma_p` (rad/s), proportional to pump power.
    pub gamma_p: f64,
    /// Raman detuning `delta` (rad/s).
    pub delta: f64,
    /// Field absorption coefficient outside the EIT window, `alpha` (1/m);
    /// intensity attenuates as `exp(-2 alpha L)` there.
    pub alpha: f64,
    /// Optical wavelength `lambda` (m).
    pub lambda: f64,
    /// Pump tilt `(theta_x, theta_y)` relative to the propagation axis (rad).
    pub theta_pump: [f64; 2],
}

impl MediumParams {
    pub fn new(
        diffusion: f64,
        gamma: f64,
        gamma_p: f64,
        delta: f64,
        alpha: f64,
        lambda: f64,
    ) -> Result<Self> {
        let p = Self {
            diffusion,
            gamma,
            gamma_p,
            delta,
            alpha,
            lambda,
            theta_pump: [0.0, 0.0],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_pump_tilt(mut self, theta_pump: [f64; 2]) -> Self {
        self.theta_pump = theta_pump;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.diffusion > 0.0 && self.diffusion.is_finite()) {
            return bad(format!("diffusion must be positive, got {}", self.diffusion));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.gamma_p >= 0.0 && self.gamma_p.is_finite()) {
            return bad(format!("gamma_p must be non-negative, got {}", self.gamma_p));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !self.delta.is_finite() || !self.theta_pump.iter().all(|t| t.is_finite()) {
            return bad("delta and theta_pump must be finite".into());
        }
        Ok(())
    }

    /// Carrier wave number `q = 2 pi / lambda`.
    #[inline]
    pub fn q(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    /// Motional susceptibility
    /// `i*alpha (1 - gamma_p / (gamma + D|k - q theta_pump|^2 - i delta))`.
    #[inline]
    pub fn chi_eit(&self, k: [f64; 2]) -> Complex64 {
        let q = self.q();
        let ux = k[0] - q * self.theta_pump[0];
        let uy = k[1] - q * self.theta_pump[1];
        let denom = Complex64::new(self.gamma + self.diffusion * (ux * ux + uy * uy), -self.delta);
        let chi = Complex64::i() * self.alpha * (1.0 - self.gamma_p / denom);
        // No gain below saturation of the line.
        debug_assert!(self.gamma_p > self.gamma || chi.im >= -1e-12 * self.alpha.abs());
        chi
    }

    /// Total susceptibility `chi_eit(k) - |k|^2/(2q)`. The free-space term
    /// uses the untilted `|k|^2`.
    #[inline]
    pub fn chi_total(&self, k: [f64; 2]) -> Complex64 {
        let k2 = k[0] * k[0] + k[1] * k[1];
        self.chi_eit(k) - Complex64::new(k2 / (2.0 * self.q()), 0.0)
    }

    /// Group velocity `gamma^2 / (alpha gamma_p)`, if defined.
    pub fn group_velocity(&self) -> Option<f64> {
        let ag = self.alpha * self.gamma_p;
        (ag > 0.0).then(|| self.gamma * self.gamma / ag)
    }

    /// The `gamma_p` that yields a requested group velocity at this `gamma`
    /// and `alpha`; round-trips through [`MediumParams::group_velocity`].
    pub fn gamma_p_for_group_velocity(&self, target: f64) -> Result<f64> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(Error::NonPositive(format!("target group velocity {target}")));
        }
        if self.alpha <= 0.0 {
            return Err(Error::NonPositive("alpha (needed to set pump power)".into()));
        }
        Ok(self.gamma * self.gamma / (self.alpha * target))
    }

    /// All derived quantities in one report.
    pub fn derived(&self) -> DerivedQuantities {
        let k0 = (self.gamma / self.diffusion).sqrt();
        let group_velocity = self.group_velocity();
        let (n_eff, group_delay_per_length) = match group_velocity {
            Some(vg) => {
                let x = 1.0 - self.q() * self.diffusion / vg;
                let n = if x.abs() < N_EFF_SINGULAR_TOL {
                    EffectiveIndex::Singular
                } else {
                    EffectiveIndex::Finite(1.0 / x)
                };
                (Some(n), Some(1.0 / vg))
            }
            None => (None, None),
        };
        DerivedQuantities {
            group_velocity,
            k0,
            n_eff,
            group_delay_per_length,
        }
    }

    /// Time for the probe to cross a slab of length `l`.
    pub fn group_delay(&self, l: f64) -> Result<f64> {
        let vg = self.group_velocity().ok_or(Error::GroupVelocityUndefined)?;
        Ok(l / vg)
    }

    /// Sign of the detuning if `delta` is `+gamma` or `-gamma` (within
    /// [`RESONANCE_TOL`] relative), else an error.
    fn resonance_sign(&self) -> Result<f64> {
        if (self.delta - self.gamma).abs() <= RESONANCE_TOL * self.gamma {
            Ok(1.0)
        } else if (self.delta + self.gamma).abs() <= RESONANCE_TOL * self.gamma {
            Ok(-1.0)
        } else {
            Err(Error::DetuningOffResonance {
                delta: self.delta,
                gamma: self.gamma,
            })
        }
    }

    /// Quadratic expansion of `chi_eit` about the pump direction, valid for
    /// `delta = +gamma` or `delta = -gamma`:
    /// `chi_eit(k) = c0 + c2 |k - q theta_pump|^2 + O(k^4)` with
    /// `c2 = -D/(2 v_g)` at `+gamma` and `+D/(2 v_g)` at `-gamma`.
    pub fn quadratic_coeffs(&self) -> Result<QuadraticCoeffs> {
        let sign = self.resonance_sign()?;
        let vg = self.group_velocity().ok_or(Error::GroupVelocityUndefined)?;
        let q = self.q();
        let c0 = self.chi_eit([q * self.theta_pump[0], q * self.theta_pump[1]]);
        let c2 = Complex64::new(-sign * self.diffusion / (2.0 * vg), 0.0);
        Ok(QuadraticCoeffs { c0, c2 })
    }

    /// Predicted walk-off angle `theta_probe = -sign(delta) * (qD/v_g) *
    /// theta_pump`; the probe follows the pump at `delta = -gamma` and
    /// deflects opposite to it at `delta = +gamma`.
    pub fn deflection_prediction(&self) -> Result<DeflectionPrediction> {
        let sign = self.resonance_sign()?;
        let vg = self.group_velocity().ok_or(Error::GroupVelocityUndefined)?;
        let q = self.q();
        let gain = -sign * q * self.diffusion / vg;
        let k0 = (self.gamma / self.diffusion).sqrt();
        let tilt_mag = q * (self.theta_pump[0].hypot(self.theta_pump[1]));
        Ok(DeflectionPrediction {
            theta_probe: [gain * self.theta_pump[0], gain * self.theta_pump[1]],
            beyond_paraxial: tilt_mag > PARAXIAL_WARN_FRACTION * k0,
        })
    }
}

/// Quantities derived from the medium parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// `gamma^2/(alpha gamma_p)` (m/s); `None` when `alpha gamma_p = 0`.
    pub group_velocity: Option<f64>,
    /// Spectral half width of the motional low-pass filter,
    /// `k0 = sqrt(gamma/D)` (1/m).
    pub k0: f64,
    /// Effective paraxial index `(1 - qD/v_g)^-1`; `None` when the group
    /// velocity is undefined.
    pub n_eff: Option<EffectiveIndex>,
    /// `1/v_g` (s/m); `None` when the group velocity is undefined.
    pub group_delay_per_length: Option<f64>,
}

/// Effective index, singular exactly at the elimination point `v_g = qD`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveIndex {
    Finite(f64),
    Singular,
}

impl EffectiveIndex {
    pub fn finite(&self) -> Option<f64> {
        match self {
            EffectiveIndex::Finite(v) => Some(*v),
            EffectiveIndex::Singular => None,
        }
    }
}

/// `chi_eit(k) ~ c0 + c2 |k - q theta_pump|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    pub c0: Complex64,
    /// Quadratic coefficient (m); purely real on resonance at `+-gamma`.
    pub c2: Complex64,
}

/// Predicted probe deflection for a tilted pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionPrediction {
    pub theta_probe: [f64; 2],
    /// Set when `|q theta_pump| > 0.3 k0`, where the linear walk-off law
    /// degrades.
    pub beyond_paraxial: bool,
}
