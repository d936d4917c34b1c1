//! Statistics of time-domain electro-optic sampling of THz vacuum and
//! thermal fields in nonlinear crystals.
//!
//! A femtosecond probe pulse co-propagating with the THz vacuum through a
//! χ⁽²⁾ crystal picks up a polarisation rotation whose shot-to-shot variance
//! carries the spectrum of the sampled field fluctuations. This crate
//! computes that variance and its decompositions from first principles:
//!
//! * [`materials`] — crystal dispersion in the probe band (Sellmeier) and
//!   the THz band (phonon resonance or tabulated measurements), the
//!   effective χ⁽²⁾, and thermal occupation numbers.
//! * [`pulse`] — probe-pulse spectral functionals: mean detected frequency,
//!   the detection bandwidth filter f(Ω), and the photon-number scale.
//! * [`greens`] — the dyadic Green's tensor of the bulk crystal in a Weyl
//!   (plane-wave) decomposition, with longitudinal/transverse splitting.
//! * [`signal`] — the signal spectrum s²(Ω) at every approximation level
//!   (full, laser-paraxial, Taylor, paraxial, cutoff, absorptive,
//!   longitudinal), integrated variances, spatial correlation/density maps,
//!   and pulse-duration sweeps.
//! * [`scan`] — synthesis and inversion of delay scans S²(δt).
//! * [`numerics`] — the adaptive quadrature underneath all of the above.
//! * [`config`], [`output`], [`run`] — run configuration, presets, CSV
//!   emission and the operations behind the `eosvac` binary.
//!
//! Frequencies are angular (rad/s) everywhere inside the library; only the
//! CLI and file formats use THz. All quantities are SI.

pub mod config;
pub mod constants;
pub mod greens;
pub mod materials;
pub mod numerics;
pub mod output;
pub mod pulse;
pub mod run;
pub mod scan;
pub mod signal;
