//! On-axis family of spectral-density evaluators.
//!
//! All four forms here treat the probe beam paraxially and take the THz
//! medium as lossless (the index enters through Re n(Ω)).  They differ in
//! how the transverse structure of the sampled field is handled:
//!
//! * [`s2_laser_paraxial`] keeps the sampled field exact and integrates
//!   over the polar angle of its wave vector;
//! * [`s2_taylor`] expands the sampled transverse profile to second order
//!   around the axis;
//! * [`s2_paraxial`] keeps only the leading (zeroth-order) term, and
//!   [`s2_taylor_leading`] is that same leading term exposed from the
//!   expansion's side — the two are algebraically identical;
//! * [`s2_paraxial_cutoff`] applies the paraxial form only to modes the
//!   waist can resolve (Re n(Ω)·Ω/c < π/w) and returns zero above.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::constants::{C, EPS0, HBAR};
use crate::numerics::{integrate_1d, sinc, QuadratureSpec};

use super::{invalid, require_converged, Derived, ExperimentConfig, SignalError};

/// Shared pieces of the on-axis forms at one frequency.
struct Parts {
    /// Prefactor of the on-axis spectral density.
    pref: f64,
    /// THz wavenumber Re n(Ω)·Ω/c.
    q: f64,
    /// Probe group wavenumber n_g·Ω/c.
    b: f64,
    /// Phase matching: sinc²(L(b−q)/2) + sinc²(L(b+q)/2).
    sinc_sum: f64,
}

/// Common THz-side quantities, or `None` when the detection band's
/// autocorrelation vanishes at this frequency (the density is then zero).
fn thz_side(
    cfg: &ExperimentConfig,
    omega: f64,
) -> Result<Option<(f64, f64, f64)>, SignalError> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(invalid(format!(
            "frequency must be positive and finite, got {omega:e}"
        )));
    }
    let f = cfg.pulse.spectral_autocorrelation(omega)?;
    if f == 0.0 {
        return Ok(None);
    }
    let n = cfg.thz_index.index(omega)?.re;
    if !(n > 0.0) {
        return Err(invalid(format!(
            "lossless evaluators need Re n(Ω) > 0, got {n:e} at Ω = {omega:e} rad/s"
        )));
    }
    Ok(Some((f, n, cfg.chi2.eval(omega).norm())))
}

fn parts(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<Option<Parts>, SignalError> {
    let Some((f, n, chi)) = thz_side(cfg, omega)? else {
        return Ok(None);
    };
    let q = n * omega / C;
    let b = d.ng * omega / C;
    let l = cfg.crystal_length;
    let w = cfg.beam_waist();
    let nl = cfg.pulse.photon_number * l * d.omega_p;
    let pref = HBAR * nl * nl * chi * chi * omega * f * f
        / (PI * PI * EPS0.powi(3) * C.powi(3) * d.n_wc * d.n_wc * n * w * w);
    let sm = sinc(0.5 * l * (b - q));
    let sp = sinc(0.5 * l * (b + q));
    Ok(Some(Parts {
        pref,
        q,
        b,
        sinc_sum: sm * sm + sp * sp,
    }))
}

pub(crate) fn s2_paraxial_impl(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<f64, SignalError> {
    Ok(match parts(cfg, d, omega)? {
        Some(p) => p.pref * p.sinc_sum,
        None => 0.0,
    })
}

pub(crate) fn s2_paraxial_cutoff_impl(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<f64, SignalError> {
    Ok(match parts(cfg, d, omega)? {
        Some(p) if p.q < PI / cfg.beam_waist() => p.pref * p.sinc_sum,
        _ => 0.0,
    })
}

/// 4 − e^{−x/4}(4 + x) for x ≥ 0, stable for small x.
fn bracket4(x: f64) -> f64 {
    if x < 1e-3 {
        x * x / 8.0 * (1.0 - x / 6.0 + x * x / 64.0)
    } else {
        4.0 - (-x / 4.0).exp() * (4.0 + x)
    }
}

/// (sinc(Ly) − sinc²(Ly/2)) / y with the removable singularity at y = 0
/// filled by its series.
fn h_ratio(y: f64, l: f64) -> f64 {
    let ly = l * y;
    if ly.abs() < 6e-3 {
        l * l * y * (-1.0 / 12.0 + ly * ly / 180.0)
    } else {
        let s = sinc(ly);
        let half = sinc(0.5 * ly);
        (s - half * half) / y
    }
}

pub(crate) fn s2_taylor_impl(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<f64, SignalError> {
    let Some(p) = parts(cfg, d, omega)? else {
        return Ok(0.0);
    };
    let l = cfg.crystal_length;
    let w = cfg.beam_waist();
    let x = p.q * p.q * w * w;
    let one_minus_g = -(-x / 4.0).exp_m1();
    let corr =
        bracket4(x) / (p.q * w * w) * (h_ratio(p.b - p.q, l) - h_ratio(p.b + p.q, l));
    Ok(p.pref * (one_minus_g * p.sinc_sum + corr))
}

/// Which phase-matching branches of the angular integral to keep.
enum Branches {
    Both,
    CoPropagating,
    CounterPropagating,
}

fn lp_integral(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
    branches: Branches,
) -> Result<(f64, f64), SignalError> {
    let Some((f, n, chi)) = thz_side(cfg, omega)? else {
        return Ok((0.0, 0.0));
    };
    let q = n * omega / C;
    let b = d.ng * omega / C;
    let l = cfg.crystal_length;
    let w = cfg.beam_waist();
    let nlp = cfg.pulse.photon_number * l * d.omega_p;
    let p15 = HBAR * nlp * nlp * chi * chi
        / (4.0 * PI.powi(3) * C.powi(4) * EPS0.powi(3) * d.n_wc * d.n_wc);
    let integrand = |theta: f64| -> f64 {
        let (st, ct) = theta.sin_cos();
        let qst = q * st;
        let gauss = (-qst * qst * w * w / 4.0).exp();
        let branch_sum = match branches {
            Branches::Both => {
                let sm = sinc(0.5 * l * (b - q * ct));
                let sp = sinc(0.5 * l * (b + q * ct));
                sm * sm + sp * sp
            }
            Branches::CoPropagating => {
                let sm = sinc(0.5 * l * (b - q * ct));
                sm * sm
            }
            Branches::CounterPropagating => {
                let sp = sinc(0.5 * l * (b + q * ct));
                sp * sp
            }
        };
        q * st * (1.0 - 0.5 * st * st) * gauss * branch_sum
    };
    let spec = QuadratureSpec::with_rel_tol(1e-10);
    let quad = require_converged(
        integrate_1d(integrand, 0.0, FRAC_PI_2, &spec)?,
        "laser-paraxial angular integral",
    )?;
    let scale = p15 * omega * omega * f * f * TAU;
    Ok((scale * quad.value, scale * quad.error))
}

pub(crate) fn s2_laser_paraxial_impl(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<(f64, f64), SignalError> {
    lp_integral(cfg, d, omega, Branches::Both)
}

/// Paraxial-probe spectral density with the sampled field kept exact:
/// a polar-angle integral over the sampled wave vector with both
/// phase-matching branches.
pub fn s2_laser_paraxial(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    Ok(s2_laser_paraxial_impl(cfg, &d, omega)?.0)
}

/// The two phase-matching branches of [`s2_laser_paraxial`], returned as
/// (co-propagating, counter-propagating); their sum is the total.
pub fn s2_laser_paraxial_halves(
    cfg: &ExperimentConfig,
    omega: f64,
) -> Result<(f64, f64), SignalError> {
    let d = cfg.derived()?;
    let co = lp_integral(cfg, &d, omega, Branches::CoPropagating)?.0;
    let counter = lp_integral(cfg, &d, omega, Branches::CounterPropagating)?.0;
    Ok((co, counter))
}

/// Leading on-axis spectral density: paraxial probe and sampled field
/// both reduced to the optical axis.
pub fn s2_paraxial(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    s2_paraxial_impl(cfg, &d, omega)
}

/// Second-order transverse expansion of the sampled field around the
/// axis: the paraxial term plus the waist-dependent curvature correction.
pub fn s2_taylor(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    s2_taylor_impl(cfg, &d, omega)
}

/// Leading term of the transverse expansion.  Algebraically identical to
/// [`s2_paraxial`]; exposed separately so the identity is part of the
/// public contract.
pub fn s2_taylor_leading(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    s2_paraxial_impl(cfg, &d, omega)
}

/// Paraxial spectral density restricted to sampled modes the probe waist
/// can resolve: zero wherever Re n(Ω)·Ω/c ≥ π/w.
pub fn s2_paraxial_cutoff(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    s2_paraxial_cutoff_impl(cfg, &d, omega)
}
