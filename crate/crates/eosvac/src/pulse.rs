//! Probe-pulse spectra and the three functionals that parameterize every
//! signal formula: the detected photon number N, the mean detected frequency
//!
//! ω_p = ∫dω η E_p² / ∫dω (η/ω) E_p²,
//!
//! and the spectral autocorrelation
//!
//! f(Ω) = ∫dω [E_p(ω)E_p(ω+Ω) + E_p(ω)E_p(ω−Ω)] / 2∫dω η E_p².
//!
//! Spectra are stored with unit normalization ∫E_p² dω = 1/2; physical
//! amplitude enters the theory only through the configured photon number,
//! for which [`PulseSpectrum::photon_number_scale`] returns the equivalent
//! field rescaling. E_p(ω) is taken to vanish for ω ≤ 0.

use crate::constants::{C, EPS0, HBAR};
use crate::numerics::{integrate_1d, NumericsError, QuadratureSpec};
use std::sync::Arc;
use thiserror::Error;

pub type EfficiencyFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("quadrature for {what} did not converge (relative error {rel_err:.2e})")]
    QuadratureFailure { what: &'static str, rel_err: f64 },
    #[error("invalid pulse spectrum: {reason}")]
    InvalidSpectrum { reason: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Sampled spectral amplitude, linearly interpolated, zero outside its grid.
#[derive(Clone, Debug)]
pub struct TabulatedSpectrum {
    omegas: Vec<f64>,
    amps: Vec<f64>,
}

impl TabulatedSpectrum {
    /// Build from (frequency in THz, amplitude) rows.
    pub fn from_rows(rows: &[(f64, f64)]) -> Result<Self, PulseError> {
        if rows.len() < 2 {
            return Err(PulseError::InvalidSpectrum {
                reason: format!("tabulated spectrum needs at least two rows, got {}", rows.len()),
            });
        }
        let mut omegas = Vec::with_capacity(rows.len());
        let mut amps = Vec::with_capacity(rows.len());
        for (i, &(f_thz, a)) in rows.iter().enumerate() {
            if !(f_thz.is_finite() && a.is_finite()) || f_thz <= 0.0 || a < 0.0 {
                return Err(PulseError::InvalidSpectrum {
                    reason: format!("bad row {i}: ({f_thz}, {a})"),
                });
            }
            let w = crate::constants::omega_from_thz(f_thz);
            if let Some(&prev) = omegas.last() {
                if w <= prev {
                    return Err(PulseError::InvalidSpectrum {
                        reason: format!("frequencies must increase strictly (row {i})"),
                    });
                }
            }
            omegas.push(w);
            amps.push(a);
        }
        if amps.iter().all(|&a| a == 0.0) {
            return Err(PulseError::InvalidSpectrum {
                reason: "tabulated spectrum is identically zero".into(),
            });
        }
        Ok(TabulatedSpectrum { omegas, amps })
    }

    /// Parse the `freq_thz,amplitude` CSV format (blank lines and `#`
    /// comments skipped, optional header row).
    pub fn from_csv_text(text: &str) -> Result<Self, PulseError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields[0].parse::<f64>().is_err() && rows.is_empty() {
                continue;
            }
            if fields.len() != 2 {
                return Err(PulseError::InvalidSpectrum {
                    reason: format!("line {lineno}: expected 2 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64, PulseError> {
                s.parse().map_err(|_| PulseError::InvalidSpectrum {
                    reason: format!("line {lineno}: cannot parse '{s}'"),
                })
            };
            rows.push((parse(fields[0])?, parse(fields[1])?));
        }
        Self::from_rows(&rows)
    }

    fn amplitude(&self, omega: f64) -> f64 {
        if omega < self.omegas[0] || omega > *self.omegas.last().unwrap() {
            return 0.0;
        }
        let i = match self.omegas.binary_search_by(|p| p.total_cmp(&omega)) {
            Ok(i) => return self.amps[i],
            Err(i) => i,
        };
        let (w0, w1) = (self.omegas[i - 1], self.omegas[i]);
        let t = (omega - w0) / (w1 - w0);
        self.amps[i - 1] * (1.0 - t) + self.amps[i] * t
    }
}

#[derive(Clone, Debug)]
pub enum PulseShape {
    /// Flat spectrum on [ω_c − Δω/2, ω_c + Δω/2].
    Rectangular { omega_c: f64, delta_omega: f64 },
    /// E_p(ω) = σ^{-1/2} (2π)^{-1/4} e^{-(ω-ω_c)²/σ²} with σ = √(2/π)/Δt.
    Gaussian { omega_c: f64, delta_t: f64 },
    Tabulated(TabulatedSpectrum),
}

/// A probe pulse: spectral shape, detected photon number, and beam waist,
/// with an optional detection-efficiency weight η(ω) (default 1).
#[derive(Clone)]
pub struct PulseSpectrum {
    pub shape: PulseShape,
    pub photon_number: f64,
    pub beam_waist: f64,
    efficiency: Option<EfficiencyFn>,
}

impl std::fmt::Debug for PulseSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PulseSpectrum")
            .field("shape", &self.shape)
            .field("photon_number", &self.photon_number)
            .field("beam_waist", &self.beam_waist)
            .field(
                "efficiency",
                &if self.efficiency.is_some() { "custom" } else { "unit" },
            )
            .finish()
    }
}

impl PulseSpectrum {
    pub fn new(shape: PulseShape, photon_number: f64, beam_waist: f64) -> Result<Self, PulseError> {
        let fail = |reason: String| Err(PulseError::InvalidSpectrum { reason });
        if !(photon_number > 0.0 && photon_number.is_finite()) {
            return fail(format!("photon number must be positive, got {photon_number}"));
        }
        if !(beam_waist > 0.0 && beam_waist.is_finite()) {
            return fail(format!("beam waist must be positive, got {beam_waist}"));
        }
        match &shape {
            PulseShape::Rectangular { omega_c, delta_omega } => {
                if *omega_c <= 0.0 || *delta_omega <= 0.0 {
                    return fail("rectangular shape needs ω_c > 0 and Δω > 0".into());
                }
                if *delta_omega >= 2.0 * omega_c {
                    return fail(format!(
                        "rectangular support reaches ω ≤ 0: Δω = {delta_omega:e} ≥ 2ω_c = {:e}",
                        2.0 * omega_c
                    ));
                }
            }
            PulseShape::Gaussian { omega_c, delta_t } => {
                if *omega_c <= 0.0 || *delta_t <= 0.0 {
                    return fail("Gaussian shape needs ω_c > 0 and Δt > 0".into());
                }
            }
            PulseShape::Tabulated(_) => {}
        }
        Ok(PulseSpectrum {
            shape,
            photon_number,
            beam_waist,
            efficiency: None,
        })
    }

    pub fn with_efficiency(mut self, eta: EfficiencyFn) -> Self {
        self.efficiency = Some(eta);
        self
    }

    #[inline]
    pub fn efficiency_at(&self, omega: f64) -> f64 {
        match &self.efficiency {
            Some(f) => f(omega),
            None => 1.0,
        }
    }

    fn has_custom_efficiency(&self) -> bool {
        self.efficiency.is_some()
    }

    /// Gaussian spectral width σ, if the shape has one.
    pub fn sigma(&self) -> Option<f64> {
        match self.shape {
            PulseShape::Gaussian { delta_t, .. } => {
                Some((2.0 / std::f64::consts::PI).sqrt() / delta_t)
            }
            _ => None,
        }
    }

    /// Normalized spectral amplitude; zero for ω ≤ 0 and outside support.
    pub fn amplitude(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match &self.shape {
            PulseShape::Rectangular { omega_c, delta_omega } => {
                let half = delta_omega / 2.0;
                if (omega - omega_c).abs() <= half {
                    (2.0 * delta_omega).sqrt().recip()
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian { omega_c, .. } => {
                let sigma = self.sigma().unwrap();
                let u = (omega - omega_c) / sigma;
                sigma.sqrt().recip() * (-u * u).exp() / (2.0 * std::f64::consts::PI).powf(0.25)
            }
            PulseShape::Tabulated(t) => t.amplitude(omega),
        }
    }

    /// Interval outside which the amplitude is zero or negligible.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            PulseShape::Rectangular { omega_c, delta_omega } => {
                (omega_c - delta_omega / 2.0, omega_c + delta_omega / 2.0)
            }
            PulseShape::Gaussian { omega_c, .. } => {
                let sigma = self.sigma().unwrap();
                ((omega_c - 8.0 * sigma).max(0.0), omega_c + 8.0 * sigma)
            }
            PulseShape::Tabulated(t) => (t.omegas[0], *t.omegas.last().unwrap()),
        }
    }

    /// Carrier frequency: the configured ω_c, or the E_p²-weighted centroid
    /// for tabulated shapes.
    pub fn carrier(&self) -> f64 {
        match &self.shape {
            PulseShape::Rectangular { omega_c, .. } | PulseShape::Gaussian { omega_c, .. } => {
                *omega_c
            }
            PulseShape::Tabulated(t) => {
                let e2: Vec<f64> = t.amps.iter().map(|a| a * a).collect();
                let we2: Vec<f64> = t
                    .omegas
                    .iter()
                    .zip(&e2)
                    .map(|(w, e)| w * e)
                    .collect();
                crate::numerics::trapezoid(&t.omegas, &we2)
                    / crate::numerics::trapezoid(&t.omegas, &e2)
            }
        }
    }

    /// Width of the autocorrelation support: f(Ω) vanishes (rectangular,
    /// tabulated) or is negligible (Gaussian, < 3e-11) beyond this Ω.
    pub fn bandwidth(&self) -> f64 {
        match &self.shape {
            PulseShape::Rectangular { delta_omega, .. } => *delta_omega,
            PulseShape::Gaussian { .. } => 7.0 * self.sigma().unwrap(),
            PulseShape::Tabulated(t) => *t.omegas.last().unwrap() - t.omegas[0],
        }
    }

    fn quad_spec() -> QuadratureSpec {
        QuadratureSpec::with_rel_tol(1e-10)
    }

    fn integrate(
        &self,
        what: &'static str,
        a: f64,
        b: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<f64, PulseError> {
        let q = integrate_1d(f, a, b, &Self::quad_spec())?;
        if !q.converged {
            return Err(PulseError::QuadratureFailure {
                what,
                rel_err: q.error / q.value.abs().max(f64::MIN_POSITIVE),
            });
        }
        Ok(q.value)
    }

    /// ∫dω η(ω) E_p²(ω); equals 1/2 for the built-in shapes at unit η.
    pub fn norm_squared(&self) -> Result<f64, PulseError> {
        let (a, b) = self.support();
        self.integrate("pulse norm", a, b, |w| {
            let e = self.amplitude(w);
            self.efficiency_at(w) * e * e
        })
    }

    /// Mean detected frequency ω_p.
    pub fn mean_detected_frequency(&self) -> Result<f64, PulseError> {
        if let (PulseShape::Rectangular { omega_c, delta_omega }, false) =
            (&self.shape, self.has_custom_efficiency())
        {
            let ratio = (omega_c + delta_omega / 2.0) / (omega_c - delta_omega / 2.0);
            return Ok(delta_omega / ratio.ln());
        }
        let num = self.norm_squared()?;
        let (a, b) = self.support();
        let den = self.integrate("mean frequency", a, b, |w| {
            let e = self.amplitude(w);
            self.efficiency_at(w) / w * e * e
        })?;
        Ok(num / den)
    }

    /// Spectral autocorrelation f(Ω), evaluated at |Ω|.
    pub fn spectral_autocorrelation(&self, omega_shift: f64) -> Result<f64, PulseError> {
        let shift = omega_shift.abs();
        if !self.has_custom_efficiency() {
            match &self.shape {
                PulseShape::Rectangular { delta_omega, .. } => {
                    return Ok((1.0 - shift / delta_omega).max(0.0));
                }
                PulseShape::Gaussian { .. } => {
                    let sigma = self.sigma().unwrap();
                    let u = shift / sigma;
                    return Ok(if u * u > 1400.0 {
                        0.0
                    } else {
                        (-u * u / 2.0).exp()
                    });
                }
                PulseShape::Tabulated(_) => {}
            }
        }
        let (s0, s1) = self.support();
        let overlap = (s1 - shift) - s0;
        if overlap <= f64::EPSILON * s1 {
            return Ok(0.0);
        }
        // ∫ E(ω)E(ω+Ω): both factors inside support for ω ∈ [s0, s1−Ω].
        let up = self.integrate("autocorrelation (+Ω)", s0, s1 - shift, |w| {
            self.amplitude(w) * self.amplitude(w + shift)
        })?;
        // ∫ E(ω)E(ω−Ω): nonzero for ω ∈ [s0+Ω, s1]; zero-extension below.
        let down = self.integrate("autocorrelation (−Ω)", s0 + shift, s1, |w| {
            self.amplitude(w) * self.amplitude(w - shift)
        })?;
        Ok((up + down) / (2.0 * self.norm_squared()?))
    }

    /// Photon number produced by the stored unit-normalized amplitude:
    /// N̂ = 4πε₀c n(ω_c) ∫dω (η/ħω) E_p².
    pub fn unit_photon_number(&self, n_carrier: f64) -> Result<f64, PulseError> {
        let (a, b) = self.support();
        let integral = self.integrate("photon number", a, b, |w| {
            let e = self.amplitude(w);
            self.efficiency_at(w) / (HBAR * w) * e * e
        })?;
        Ok(4.0 * std::f64::consts::PI * EPS0 * C * n_carrier * integral)
    }

    /// Field rescaling a such that a·E_p carries the configured photon
    /// number. Every closed-form signal depends on amplitude only through
    /// (N, ω_p, f), so this is needed only where E_p enters explicitly.
    pub fn photon_number_scale(&self, n_carrier: f64) -> Result<f64, PulseError> {
        Ok((self.photon_number / self.unit_photon_number(n_carrier)?).sqrt())
    }
}
