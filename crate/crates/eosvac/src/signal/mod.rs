//! Experiment description and the signal-variance spectral density `s²(Ω)`.
//!
//! An electro-optic sampling measurement mixes a THz-band field with a
//! co-propagating probe pulse inside a χ⁽²⁾ crystal and reads the
//! ellipticity acquired by the probe.  For a vacuum or thermal input the
//! measured signal is Gaussian noise whose variance, normalised to the
//! probe shot noise, is characterised by a spectral density `s²(Ω)` over
//! the THz frequency Ω.  This module ties the materials, pulse, and
//! quadrature layers into a single [`ExperimentConfig`] and evaluates
//! `s²(Ω)` at several levels of approximation:
//!
//! * [`s2_full`] — evaluates the unapproximated wave-vector integrals of
//!   the sampled field (lossless media only);
//! * [`s2_laser_paraxial`] — treats only the probe beam paraxially, keeps
//!   the sampled field exact;
//! * [`s2_taylor`] — additionally expands the sampled transverse profile
//!   to second order around the optical axis;
//! * [`s2_paraxial`] — keeps only the leading on-axis term of that
//!   expansion;
//! * [`s2_paraxial_cutoff`] — same, restricted to modes the waist can
//!   resolve;
//! * [`s2_absorptive`] — mode-summed form valid in lossy media, with
//!   [`s2_absorptive_first`] / [`s2_absorptive_second`] exposing its two
//!   terms and [`s2_longitudinal`] / [`s2_transverse`] splitting the total
//!   by polarisation character of the sampled modes.
//!
//! Grid-level drivers ([`evaluate_spectrum`], [`variance`],
//! [`duration_sweep`]) build on the per-frequency evaluators.

use rayon::prelude::*;

use crate::greens::GreensError;
use crate::materials::{
    Chi2Denominator, Chi2Model, IndexModel, MaterialError, PhononResonanceModel, SellmeierModel,
    ThzIndex,
};
use crate::numerics::{trapezoid, NumericsError, Quadrature};

pub use crate::numerics::{linear_grid, log_grid};
use crate::pulse::{PulseError, PulseShape, PulseSpectrum};

mod absorptive;
mod full;
mod longitudinal;
mod maps;
mod paraxial;

pub use absorptive::{s2_absorptive, s2_absorptive_first, s2_absorptive_second};
pub use full::s2_full;
pub use longitudinal::{s2_longitudinal, s2_transverse};
pub use maps::{density_maps_xy, density_maps_z_omega, DensityMaps};
pub use paraxial::{
    s2_laser_paraxial, s2_laser_paraxial_halves, s2_paraxial, s2_paraxial_cutoff, s2_taylor,
    s2_taylor_leading,
};

/// Errors from signal-level evaluations.
#[derive(Debug, thiserror::Error)]
pub enum SignalError {
    /// An adaptive quadrature failed to reach its tolerance.
    #[error(
        "quadrature for {context} did not converge: estimated error {error:.3e} \
         after {evaluations} evaluations"
    )]
    QuadratureFailure {
        context: &'static str,
        error: f64,
        evaluations: usize,
    },
    /// The requested evaluator assumes a lossless medium at this frequency.
    #[error(
        "evaluator requires a lossless medium but Im n = {im_n:.3e} at \
         Ω = {omega:.6e} rad/s; use the absorptive component or disable absorption"
    )]
    AbsorptiveMediumUnsupported { omega: f64, im_n: f64 },
    /// A frequency grid is too coarse for the requested integral tolerance.
    #[error(
        "frequency grid too coarse: halving it changes the integral by a relative \
         {rel_change:.3e} (tolerance {rel_tol:.3e})"
    )]
    GridTooCoarse { rel_change: f64, rel_tol: f64 },
    /// The experiment description itself is invalid.
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Greens(#[from] GreensError),
}

fn invalid(reason: impl Into<String>) -> SignalError {
    SignalError::InvalidConfig {
        reason: reason.into(),
    }
}

/// Accept a quadrature result only if it converged.
pub(crate) fn require_converged<T>(
    q: Quadrature<T>,
    context: &'static str,
) -> Result<Quadrature<T>, SignalError> {
    if q.converged {
        Ok(q)
    } else {
        Err(SignalError::QuadratureFailure {
            context,
            error: q.error,
            evaluations: q.evaluations,
        })
    }
}

/// Tolerances of the nested quadratures inside [`s2_full`], the only
/// evaluator expensive enough to be worth tuning.  The reduced evaluators
/// use fixed internal tolerances that are cheap to satisfy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    /// Relative tolerance of the inner laser-frequency integrals.
    pub full_inner_rel_tol: f64,
    /// Relative tolerance of the outer angular integral.
    pub full_outer_rel_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            full_inner_rel_tol: 1e-6,
            full_outer_rel_tol: 3e-4,
        }
    }
}

/// Complete description of one sampling experiment.
///
/// The beam waist lives on the pulse (it is a property of the focused
/// probe); [`ExperimentConfig::beam_waist`] forwards to it.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Crystal length along the propagation axis, m.
    pub crystal_length: f64,
    /// Sample temperature, K.
    pub temperature: f64,
    /// Refractive-index model in the probe (optical) band.
    pub laser_index: SellmeierModel,
    /// Complex index model in the sampled (THz) band.
    pub thz_index: ThzIndex,
    /// Second-order susceptibility mixing the two bands.
    pub chi2: Chi2Model,
    /// Probe-pulse spectrum, photon number, and beam waist.
    pub pulse: PulseSpectrum,
    /// Quadrature tolerances for the full evaluator.
    pub quadrature: QuadratureSettings,
}

/// Carrier-band quantities shared by every evaluator: probe index and group
/// index at the carrier, and the mean detected frequency.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Derived {
    pub n_wc: f64,
    pub ng: f64,
    pub omega_p: f64,
}

impl ExperimentConfig {
    pub fn new(
        crystal_length: f64,
        temperature: f64,
        laser_index: SellmeierModel,
        thz_index: ThzIndex,
        chi2: Chi2Model,
        pulse: PulseSpectrum,
    ) -> Result<Self, SignalError> {
        if !crystal_length.is_finite() || crystal_length <= 0.0 {
            return Err(invalid(format!(
                "crystal length must be positive and finite, got {crystal_length:e}"
            )));
        }
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(invalid(format!(
                "temperature must be non-negative and finite, got {temperature:e}"
            )));
        }
        Ok(ExperimentConfig {
            crystal_length,
            temperature,
            laser_index,
            thz_index,
            chi2,
            pulse,
            quadrature: QuadratureSettings::default(),
        })
    }

    /// Probe beam waist, m (stored on the pulse).
    pub fn beam_waist(&self) -> f64 {
        self.pulse.beam_waist
    }

    /// Few-femtosecond bulk-ZnTe vacuum-sampling configuration: 7 µm
    /// crystal, 3 µm waist, 255·2π THz carrier with a rectangular
    /// 75·2π THz detection band, 5·10⁸ photons per pulse, T = 0,
    /// absorption neglected, constant χ⁽²⁾.
    pub fn riek2015() -> Self {
        use crate::constants::omega_from_thz;
        let pulse = PulseSpectrum::new(
            PulseShape::Rectangular {
                omega_c: omega_from_thz(255.0),
                delta_omega: omega_from_thz(75.0),
            },
            5.0e8,
            3.0e-6,
        )
        .expect("preset pulse parameters are valid");
        ExperimentConfig {
            crystal_length: 7.0e-6,
            temperature: 0.0,
            laser_index: SellmeierModel::znte(),
            thz_index: ThzIndex::new(IndexModel::Phonon(PhononResonanceModel::znte(false))),
            chi2: Chi2Model::Constant(1.17e-21),
            pulse,
            quadrature: QuadratureSettings::default(),
        }
    }

    /// Long-crystal thermal-field sampling configuration: 3 mm crystal,
    /// 125 µm waist, 375·2π THz carrier, 80 fs Gaussian probe, 10⁹ photons
    /// per pulse, T = 300 K, phonon absorption on and a dispersive χ⁽²⁾
    /// resonance.
    pub fn benea2019() -> Self {
        use crate::constants::omega_from_thz;
        let laser_index = SellmeierModel::znte();
        let omega_c = omega_from_thz(375.0);
        let n_wc = laser_index
            .index(omega_c)
            .expect("preset carrier is inside the model's validity range");
        let pulse = PulseSpectrum::new(
            PulseShape::Gaussian {
                omega_c,
                delta_t: 80.0e-15,
            },
            1.0e9,
            125.0e-6,
        )
        .expect("preset pulse parameters are valid");
        ExperimentConfig {
            crystal_length: 3.0e-3,
            temperature: 300.0,
            laser_index,
            thz_index: ThzIndex::new(IndexModel::Phonon(PhononResonanceModel::znte(true))),
            chi2: Chi2Model::dispersive(
                n_wc,
                1.17e-21,
                -0.07,
                omega_from_thz(5.31),
                omega_from_thz(0.09),
                Chi2Denominator::Resonant,
            ),
            pulse,
            quadrature: QuadratureSettings::default(),
        }
    }

    /// Non-fatal sanity warnings about the configuration, e.g. a crystal
    /// longer than the probe's Rayleigh range (the fixed-waist beam model
    /// then overestimates the focused interaction volume).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Ok(n_wc) = self.laser_index.index(self.pulse.carrier()) {
            let k = n_wc * self.pulse.carrier() / crate::constants::C;
            let rayleigh = 0.5 * self.beam_waist() * self.beam_waist() * k;
            if self.crystal_length > rayleigh {
                out.push(format!(
                    "crystal length {:.3e} m exceeds the probe Rayleigh range {:.3e} m; \
                     the collimated-beam model is only indicative here",
                    self.crystal_length, rayleigh
                ));
            }
        }
        out
    }

    pub(crate) fn derived(&self) -> Result<Derived, SignalError> {
        let omega_c = self.pulse.carrier();
        Ok(Derived {
            n_wc: self.laser_index.index(omega_c)?,
            ng: self.laser_index.group_index(omega_c)?,
            omega_p: self.pulse.mean_detected_frequency()?,
        })
    }
}

/// One evaluator of the signal-variance spectral density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignalComponent {
    /// Unapproximated wave-vector integrals (lossless media only).
    Full,
    /// Paraxial probe, exact sampled field.
    LaserParaxial,
    /// Second-order transverse expansion of the sampled field.
    Taylor,
    /// Leading on-axis (paraxial) term only.
    Paraxial,
    /// Paraxial term restricted to waist-resolvable modes.
    ParaxialCutoff,
    /// Mode-summed form valid in lossy media (both terms, both branches).
    Absorptive,
    /// First (absorption-driven) term of the mode-summed form.
    AbsorptiveFirst,
    /// Second (propagation-driven) term of the mode-summed form.
    AbsorptiveSecond,
    /// Longitudinal-mode share of the mode-summed total.
    Longitudinal,
    /// Transverse-mode share (total minus longitudinal).
    Transverse,
}

impl SignalComponent {
    pub const ALL: [SignalComponent; 10] = [
        SignalComponent::Full,
        SignalComponent::LaserParaxial,
        SignalComponent::Taylor,
        SignalComponent::Paraxial,
        SignalComponent::ParaxialCutoff,
        SignalComponent::Absorptive,
        SignalComponent::AbsorptiveFirst,
        SignalComponent::AbsorptiveSecond,
        SignalComponent::Longitudinal,
        SignalComponent::Transverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignalComponent::Full => "full",
            SignalComponent::LaserParaxial => "laser-paraxial",
            SignalComponent::Taylor => "taylor",
            SignalComponent::Paraxial => "paraxial",
            SignalComponent::ParaxialCutoff => "paraxial-cutoff",
            SignalComponent::Absorptive => "absorptive",
            SignalComponent::AbsorptiveFirst => "absorptive-first",
            SignalComponent::AbsorptiveSecond => "absorptive-second",
            SignalComponent::Longitudinal => "longitudinal",
            SignalComponent::Transverse => "transverse",
        }
    }
}

impl std::fmt::Display for SignalComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SignalComponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let canon = s.trim().to_ascii_lowercase().replace('_', "-");
        SignalComponent::ALL
            .into_iter()
            .find(|c| c.name() == canon)
            .ok_or_else(|| {
                format!(
                    "unknown component '{s}'; expected one of: {}",
                    SignalComponent::ALL.map(|c| c.name()).join(", ")
                )
            })
    }
}

/// A spectral density evaluated on a frequency grid.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Angular frequencies, rad/s, strictly increasing.
    pub omegas: Vec<f64>,
    /// Spectral density values (dimensionless per rad/s).
    pub values: Vec<f64>,
    /// Which evaluator produced the values.
    pub component: SignalComponent,
    /// Per-point quadrature error estimate (zero for closed forms).
    pub quadrature_error: Vec<f64>,
}

fn validate_grid(omegas: &[f64]) -> Result<(), SignalError> {
    if omegas.is_empty() {
        return Err(invalid("frequency grid is empty"));
    }
    for (i, &w) in omegas.iter().enumerate() {
        if !w.is_finite() || w <= 0.0 {
            return Err(invalid(format!(
                "frequency grid entries must be positive and finite, entry {i} is {w:e}"
            )));
        }
        if i > 0 && w <= omegas[i - 1] {
            return Err(invalid(format!(
                "frequency grid must be strictly increasing, entries {} and {i}",
                i - 1
            )));
        }
    }
    Ok(())
}

/// Evaluate one spectral-density component at a single frequency.
///
/// Returns the value and a quadrature error estimate (zero for closed
/// forms).
pub fn evaluate_point(
    cfg: &ExperimentConfig,
    component: SignalComponent,
    omega: f64,
) -> Result<(f64, f64), SignalError> {
    let d = cfg.derived()?;
    point_impl(cfg, &d, component, omega)
}

fn point_impl(
    cfg: &ExperimentConfig,
    d: &Derived,
    component: SignalComponent,
    omega: f64,
) -> Result<(f64, f64), SignalError> {
    match component {
        SignalComponent::Full => full::s2_full_impl(cfg, d, omega),
        SignalComponent::LaserParaxial => paraxial::s2_laser_paraxial_impl(cfg, d, omega),
        SignalComponent::Taylor => Ok((paraxial::s2_taylor_impl(cfg, d, omega)?, 0.0)),
        SignalComponent::Paraxial => Ok((paraxial::s2_paraxial_impl(cfg, d, omega)?, 0.0)),
        SignalComponent::ParaxialCutoff => {
            Ok((paraxial::s2_paraxial_cutoff_impl(cfg, d, omega)?, 0.0))
        }
        SignalComponent::Absorptive => {
            absorptive::s2_absorptive_impl(cfg, d, omega, absorptive::Term::Both, true)
        }
        SignalComponent::AbsorptiveFirst => {
            absorptive::s2_absorptive_impl(cfg, d, omega, absorptive::Term::First, false)
        }
        SignalComponent::AbsorptiveSecond => {
            absorptive::s2_absorptive_impl(cfg, d, omega, absorptive::Term::Second, false)
        }
        SignalComponent::Longitudinal => longitudinal::s2_longitudinal_impl(cfg, d, omega),
        SignalComponent::Transverse => {
            let (tot, e1) =
                absorptive::s2_absorptive_impl(cfg, d, omega, absorptive::Term::Both, true)?;
            let (lon, e2) = longitudinal::s2_longitudinal_impl(cfg, d, omega)?;
            Ok((tot - lon, e1 + e2))
        }
    }
}

/// Evaluate one component over a frequency grid.
///
/// Points are independent and evaluated in parallel; results come back in
/// grid order.
pub fn evaluate_spectrum(
    cfg: &ExperimentConfig,
    component: SignalComponent,
    omegas: &[f64],
) -> Result<SpectrumResult, SignalError> {
    validate_grid(omegas)?;
    let d = cfg.derived()?;
    let pts: Result<Vec<(f64, f64)>, SignalError> = omegas
        .par_iter()
        .map(|&w| point_impl(cfg, &d, component, w))
        .collect();
    let pts = pts?;
    for (i, (v, _)) in pts.iter().enumerate() {
        if !v.is_finite() {
            return Err(invalid(format!(
                "component {component} produced a non-finite value at grid entry {i}"
            )));
        }
    }
    Ok(SpectrumResult {
        omegas: omegas.to_vec(),
        values: pts.iter().map(|p| p.0).collect(),
        component,
        quadrature_error: pts.iter().map(|p| p.1).collect(),
    })
}

/// Default relative tolerance for the grid-refinement check in
/// [`variance_from_grid`].
pub const VARIANCE_REL_TOL: f64 = 5e-3;

/// Integrate an already-evaluated spectral density over its grid.
///
/// Uses the trapezoid rule and compares against the every-other-point
/// subsample; if dropping half the points moves the result by more than
/// `rel_tol` (relative), the grid does not resolve the integrand and
/// [`SignalError::GridTooCoarse`] is returned.
pub fn variance_from_grid(omegas: &[f64], values: &[f64], rel_tol: f64) -> Result<f64, SignalError> {
    if omegas.len() != values.len() {
        return Err(invalid("grid and value arrays differ in length"));
    }
    if omegas.len() < 5 {
        return Err(invalid("need at least 5 grid points to integrate"));
    }
    validate_grid(omegas)?;
    let fine = trapezoid(omegas, values);
    let mut xs = Vec::with_capacity(omegas.len() / 2 + 2);
    let mut ys = Vec::with_capacity(omegas.len() / 2 + 2);
    for i in (0..omegas.len()).step_by(2) {
        xs.push(omegas[i]);
        ys.push(values[i]);
    }
    if omegas.len() % 2 == 0 {
        xs.push(*omegas.last().unwrap());
        ys.push(*values.last().unwrap());
    }
    let coarse = trapezoid(&xs, &ys);
    let scale = fine.abs().max(f64::MIN_POSITIVE);
    let rel_change = (fine - coarse).abs() / scale;
    if fine != 0.0 && rel_change > rel_tol {
        return Err(SignalError::GridTooCoarse { rel_change, rel_tol });
    }
    Ok(fine)
}

/// Evaluate a component over a grid and integrate it, with the
/// grid-refinement check of [`variance_from_grid`] at [`VARIANCE_REL_TOL`].
pub fn variance(
    cfg: &ExperimentConfig,
    component: SignalComponent,
    omegas: &[f64],
) -> Result<f64, SignalError> {
    let spec = evaluate_spectrum(cfg, component, omegas)?;
    variance_from_grid(&spec.omegas, &spec.values, VARIANCE_REL_TOL)
}

/// How a sweep maps pulse duration Δt to the rectangular detection
/// bandwidth Δω.
#[derive(Clone, Copy, Debug)]
pub enum DurationMapping {
    /// Δω = 2π/Δt (transform-limited flat-top detection band).
    InverseDuration,
    /// Δω = factor·2π/Δt.
    Scaled(f64),
}

impl DurationMapping {
    pub fn delta_omega(self, delta_t: f64) -> f64 {
        match self {
            DurationMapping::InverseDuration => std::f64::consts::TAU / delta_t,
            DurationMapping::Scaled(f) => f * std::f64::consts::TAU / delta_t,
        }
    }
}

/// Integrated variances at one probe duration of a sweep.
#[derive(Clone, Copy, Debug)]
pub struct DurationPoint {
    /// Probe pulse duration, s.
    pub delta_t: f64,
    /// Integrated mode-summed variance.
    pub variance_total: f64,
    /// Longitudinal-mode share of the integrated variance.
    pub variance_longitudinal: f64,
    /// Transverse-mode share (total − longitudinal).
    pub variance_transverse: f64,
}

/// Frequency grid used for each duration in [`duration_sweep`]: a log grid
/// up to the detection-band edge, densified linearly across both phonon
/// resonances when the THz model has one.  The longitudinal density peaks
/// at the LO frequency (where ε crosses zero) with a half width of γ/2,
/// much narrower than the log spacing, so that window is sampled at γ/8.
///
/// Phase-matching fringes (one per coherence length, period
/// ≈ 2πc/(L·|n_g − n|)) are spaced uniformly in Ω, so for millimetre-scale
/// crystals where 160 log points would alias them a linear grid with
/// ≥ 12 samples per fringe is unioned in.
fn sweep_grid(cfg: &ExperimentConfig, delta_omega: f64) -> Vec<f64> {
    let lo = crate::constants::omega_from_thz(0.05).min(delta_omega / 200.0);
    let mut grid = log_grid(lo, delta_omega, 160);
    let ng = cfg
        .laser_index
        .group_index(cfg.pulse.carrier())
        .unwrap_or(0.0);
    // Mismatches beyond 1 only occur inside the reststrahlen window, where
    // absorption damps the fringes within one coherence length and the
    // resonance blocks below densify anyway — cap so a probe landing near
    // the pole does not blow up the point count.
    let mut mismatch = 0.0f64;
    for probe in [delta_omega, delta_omega / 3.0] {
        if let Ok(n) = cfg.thz_index.index(probe) {
            mismatch = mismatch.max((ng - n.re).abs().min(1.0));
        }
    }
    let fringes =
        delta_omega * cfg.crystal_length * mismatch / (std::f64::consts::TAU * crate::constants::C);
    if fringes > 10.0 {
        let points = ((12.0 * fringes).ceil() as usize).clamp(160, 6000);
        grid.extend(linear_grid(lo, delta_omega, points));
    }
    if let IndexModel::Phonon(ph) = &cfg.thz_index.model {
        for (center, half_span, points) in [
            (ph.omega_to, 6.0 * ph.gamma, 41),
            (ph.omega_lo, 8.0 * ph.gamma, 129),
        ] {
            let a = (center - half_span).max(lo);
            let b = (center + half_span).min(delta_omega);
            if b > a {
                grid.extend(linear_grid(a, b, points));
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    grid
}

/// Sweep the probe duration, integrating the mode-summed variance and its
/// longitudinal/transverse split at each duration.
///
/// Each duration keeps the carrier, photon number, waist, and material
/// models of `cfg` and replaces the pulse with a rectangular detection
/// band of width `mapping.delta_omega(Δt)`.
///
/// Lossy media integrate the mode-summed spectrum and its longitudinal
/// share.  A lossless medium supports no longitudinal modes at all, and
/// its in-medium correlator has a real-axis pole the mode-summed evaluator
/// cannot integrate through, so the total comes from the laser-paraxial
/// evaluator instead (scaled by the thermal occupation when T > 0) with an
/// exactly zero longitudinal share.
pub fn duration_sweep(
    cfg: &ExperimentConfig,
    delta_ts: &[f64],
    mapping: DurationMapping,
) -> Result<Vec<DurationPoint>, SignalError> {
    delta_ts
        .par_iter()
        .map(|&dt| {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(invalid(format!("pulse duration must be positive, got {dt:e}")));
            }
            let delta_omega = mapping.delta_omega(dt);
            let omega_c = cfg.pulse.carrier();
            if delta_omega >= 2.0 * omega_c {
                return Err(invalid(format!(
                    "duration {dt:e} s maps to bandwidth {delta_omega:e} rad/s, \
                     which exceeds twice the carrier"
                )));
            }
            let pulse = PulseSpectrum::new(
                PulseShape::Rectangular {
                    omega_c,
                    delta_omega,
                },
                cfg.pulse.photon_number,
                cfg.pulse.beam_waist,
            )?;
            let sub = ExperimentConfig {
                pulse,
                ..cfg.clone()
            };
            let grid = sweep_grid(&sub, delta_omega);
            let lossless = (1..=5).all(|i| {
                let w = delta_omega * i as f64 / 5.0;
                matches!(sub.thz_index.index(w), Ok(n) if n.im == 0.0)
            });
            let (vt, vl) = if lossless {
                let mut total = evaluate_spectrum(&sub, SignalComponent::LaserParaxial, &grid)?;
                if sub.temperature > 0.0 {
                    for (v, &w) in total.values.iter_mut().zip(&total.omegas) {
                        *v *= 2.0 * crate::materials::thermal_occupation(w, sub.temperature) + 1.0;
                    }
                }
                (
                    variance_from_grid(&total.omegas, &total.values, 2e-2)?,
                    0.0,
                )
            } else {
                let total = evaluate_spectrum(&sub, SignalComponent::Absorptive, &grid)?;
                let lon = evaluate_spectrum(&sub, SignalComponent::Longitudinal, &grid)?;
                (
                    variance_from_grid(&total.omegas, &total.values, 2e-2)?,
                    variance_from_grid(&lon.omegas, &lon.values, 2e-2)?,
                )
            };
            Ok(DurationPoint {
                delta_t: dt,
                variance_total: vt,
                variance_longitudinal: vl,
                variance_transverse: vt - vl,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::omega_from_thz;
    use approx::assert_relative_eq;

    #[test]
    fn config_rejects_unphysical_geometry() {
        let base = ExperimentConfig::riek2015();
        for bad_length in [0.0, -1.0e-6, f64::NAN] {
            let err = ExperimentConfig::new(
                bad_length,
                base.temperature,
                base.laser_index.clone(),
                base.thz_index.clone(),
                base.chi2.clone(),
                base.pulse.clone(),
            )
            .unwrap_err();
            assert!(matches!(err, SignalError::InvalidConfig { .. }));
        }
        let err = ExperimentConfig::new(
            base.crystal_length,
            -1.0,
            base.laser_index.clone(),
            base.thz_index.clone(),
            base.chi2.clone(),
            base.pulse.clone(),
        )
        .unwrap_err();
        assert!(matches!(err, SignalError::InvalidConfig { .. }));
    }

    #[test]
    fn warnings_flag_a_crystal_longer_than_the_rayleigh_range() {
        // Both presets keep the crystal inside the Rayleigh range.
        assert!(ExperimentConfig::riek2015().warnings().is_empty());
        assert!(ExperimentConfig::benea2019().warnings().is_empty());
        // A 3 µm waist at the 255·2π THz carrier has a ~66 µm Rayleigh
        // range; stretching the crystal past it must warn.
        let mut long = ExperimentConfig::riek2015();
        long.crystal_length = 1.0e-4;
        let warnings = long.warnings();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("Rayleigh"));
    }

    #[test]
    fn component_names_round_trip() {
        for c in SignalComponent::ALL {
            assert_eq!(c.name().parse::<SignalComponent>().unwrap(), c);
        }
        assert_eq!(
            "Laser_Paraxial".parse::<SignalComponent>().unwrap(),
            SignalComponent::LaserParaxial
        );
        assert!("fullest".parse::<SignalComponent>().is_err());
    }

    #[test]
    fn grid_validation_rejects_malformed_grids() {
        let cfg = ExperimentConfig::riek2015();
        for grid in [
            vec![],
            vec![1.0e12, 1.0e12],
            vec![2.0e12, 1.0e12],
            vec![-1.0e12, 1.0e12],
            vec![0.0, 1.0e12],
        ] {
            assert!(matches!(
                evaluate_spectrum(&cfg, SignalComponent::Paraxial, &grid),
                Err(SignalError::InvalidConfig { .. })
            ));
        }
    }

    #[test]
    fn spectrum_points_match_single_point_evaluation() {
        let cfg = ExperimentConfig::riek2015();
        let grid = log_grid(omega_from_thz(0.5), omega_from_thz(60.0), 7);
        let spec = evaluate_spectrum(&cfg, SignalComponent::Taylor, &grid).unwrap();
        assert_eq!(spec.component, SignalComponent::Taylor);
        for (i, &w) in grid.iter().enumerate() {
            let (v, e) = evaluate_point(&cfg, SignalComponent::Taylor, w).unwrap();
            assert_eq!(spec.values[i], v);
            assert_eq!(spec.quadrature_error[i], e);
        }
    }

    /// Grid integration against an exact antiderivative: ∫e^{−ω/τ}dω.
    #[test]
    fn variance_integrates_a_smooth_density_to_the_closed_form()
    {
        let tau = 1.0e12;
        let (a, b) = (1.0e12, 5.0e12);
        let omegas = linear_grid(a, b, 2001);
        let values: Vec<f64> = omegas.iter().map(|&w| (-w / tau).exp()).collect();
        let got = variance_from_grid(&omegas, &values, VARIANCE_REL_TOL).unwrap();
        let exact = tau * ((-a / tau).exp() - (-b / tau).exp());
        assert_relative_eq!(got, exact, max_relative = 1e-6);
    }

    #[test]
    fn variance_rejects_an_underresolved_density() {
        // A spike much narrower than the grid spacing: halving the grid
        // moves the trapezoid estimate by O(1).
        let omegas = linear_grid(1.0e12, 2.0e12, 9);
        let values: Vec<f64> = omegas
            .iter()
            .map(|&w| 1.0 / ((w / 1.0e12 - 1.5).powi(2) + 1.0e-4))
            .collect();
        let err = variance_from_grid(&omegas, &values, VARIANCE_REL_TOL).unwrap_err();
        assert!(matches!(err, SignalError::GridTooCoarse { .. }));
    }

    #[test]
    fn variance_requires_minimum_grid_support() {
        let omegas = vec![1.0e12, 2.0e12, 3.0e12];
        let values = vec![1.0, 1.0, 1.0];
        assert!(matches!(
            variance_from_grid(&omegas, &values, VARIANCE_REL_TOL),
            Err(SignalError::InvalidConfig { .. })
        ));
        assert!(matches!(
            variance_from_grid(&omegas, &values[..2], VARIANCE_REL_TOL),
            Err(SignalError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn duration_mapping_sets_the_detection_bandwidth() {
        let dt = 5.9e-15;
        assert_relative_eq!(
            DurationMapping::InverseDuration.delta_omega(dt),
            omega_from_thz(169.491525423728814),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            DurationMapping::Scaled(0.5).delta_omega(dt),
            0.5 * std::f64::consts::TAU / dt,
            max_relative = 1e-15
        );
    }

    #[test]
    fn duration_sweep_rejects_unusable_durations() {
        let mut cfg = ExperimentConfig::riek2015();
        cfg.thz_index = ThzIndex::new(IndexModel::Phonon(PhononResonanceModel::znte(true)));
        assert!(matches!(
            duration_sweep(&cfg, &[-1.0e-15], DurationMapping::InverseDuration),
            Err(SignalError::InvalidConfig { .. })
        ));
        // 1 fs maps to a 2π·10¹⁵ rad/s band, wider than twice the carrier.
        assert!(matches!(
            duration_sweep(&cfg, &[1.0e-15], DurationMapping::InverseDuration),
            Err(SignalError::InvalidConfig { .. })
        ));
    }

    /// One sweep point end to end: at 5.9 fs the integrated variance is
    /// dominated by transverse modes, with a small but nonzero
    /// longitudinal share, and the split is exact by construction.
    #[test]
    fn duration_sweep_splits_the_integrated_variance() {
        let mut cfg = ExperimentConfig::riek2015();
        cfg.thz_index = ThzIndex::new(IndexModel::Phonon(PhononResonanceModel::znte(true)));
        let pts = duration_sweep(&cfg, &[5.9e-15], DurationMapping::InverseDuration).unwrap();
        assert_eq!(pts.len(), 1);
        let p = &pts[0];
        assert_eq!(p.delta_t, 5.9e-15);
        assert!(p.variance_total > 0.0);
        assert!(p.variance_longitudinal > 0.0);
        assert!(p.variance_transverse > 0.0);
        assert_relative_eq!(
            p.variance_longitudinal + p.variance_transverse,
            p.variance_total,
            max_relative = 1e-12
        );
        assert!(
            p.variance_longitudinal < 0.1 * p.variance_total,
            "longitudinal share unexpectedly large: {:e} of {:e}",
            p.variance_longitudinal,
            p.variance_total
        );
    }

    /// A lossless medium supports no longitudinal modes: the sweep falls
    /// back to the laser-paraxial total and reports an exactly zero
    /// longitudinal share.
    #[test]
    fn duration_sweep_on_a_lossless_medium_has_no_longitudinal_share() {
        let cfg = ExperimentConfig::riek2015();
        let pts = duration_sweep(&cfg, &[40.0e-15], DurationMapping::InverseDuration).unwrap();
        assert_eq!(pts.len(), 1);
        let p = &pts[0];
        assert!(p.variance_total > 0.0);
        assert_eq!(p.variance_longitudinal, 0.0);
        assert_eq!(p.variance_transverse, p.variance_total);
    }

    /// Heating a lossless medium scales each mode by 2n̄(Ω)+1, so the
    /// integrated variance grows by a weighted average of that factor:
    /// more than its minimum over the band (at the band edge) and less
    /// than its value at the lowest grid frequency.
    #[test]
    fn duration_sweep_applies_the_thermal_factor_on_lossless_media() {
        let delta_t = 40.0e-15;
        let cold = ExperimentConfig::riek2015();
        let mut hot = ExperimentConfig::riek2015();
        hot.temperature = 300.0;
        let vc = duration_sweep(&cold, &[delta_t], DurationMapping::InverseDuration).unwrap()[0]
            .variance_total;
        let vh = duration_sweep(&hot, &[delta_t], DurationMapping::InverseDuration).unwrap()[0]
            .variance_total;
        let ratio = vh / vc;
        let factor = |w: f64| 2.0 * crate::materials::thermal_occupation(w, 300.0) + 1.0;
        let at_edge = factor(std::f64::consts::TAU / delta_t);
        let at_floor = factor(omega_from_thz(0.05));
        assert!(
            ratio > at_edge && ratio < at_floor,
            "thermal boost {ratio} outside ({at_edge}, {at_floor})"
        );
    }
}
