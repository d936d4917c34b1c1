//! Longitudinal-field contribution to the sampled vacuum noise.
//!
//! In an absorbing medium the sampled field contains, besides the
//! propagating transverse modes, a longitudinal part whose correlation is
//! local (∝ Im ε δ³(r − r′) in the mode sum).  Folding that δ-correlation
//! with the probe filter leaves a purely geometric factor: a closed form
//! in z = (b w/2)² built from the exponentially scaled upper incomplete
//! gamma function, plus a radial tail integral over the filter's
//! longitudinal spatial frequencies.  The transverse contribution is then
//! obtained by subtracting this from the full mode-summed density.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::constants::{C, EPS0, HBAR};
use crate::materials::thermal_occupation;
use crate::numerics::{integrate_1d, upper_incomplete_gamma0_scaled, QuadratureSpec};

use super::absorptive::{s2_absorptive_impl, Term};
use super::{invalid, Derived, ExperimentConfig, SignalError};

pub(crate) fn s2_longitudinal_impl(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<(f64, f64), SignalError> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(invalid(format!(
            "frequency must be positive and finite, got {omega:e}"
        )));
    }
    let f = cfg.pulse.spectral_autocorrelation(omega)?;
    if f == 0.0 {
        return Ok((0.0, 0.0));
    }
    let n = cfg.thz_index.index(omega)?;
    let eps = n * n;
    if eps.im == 0.0 {
        // Longitudinal correlation is proportional to Im ε: a strictly
        // lossless medium has no longitudinal contribution at all.
        return Ok((0.0, 0.0));
    }

    let b = d.ng * omega / C;
    let l = cfg.crystal_length;
    let w = cfg.beam_waist();

    // Closed-form part of the filter geometry.
    let z = (b * w / 2.0).powi(2);
    let t12 = l * b * b / 2.0 * (1.0 / z - upper_incomplete_gamma0_scaled(z));

    // Radial tail over the filter's longitudinal spatial frequencies.
    let integrand = |k: f64| -> f64 {
        let kc = Complex64::new(k, b);
        let num = (-(kc * l)).exp() - 1.0;
        k * k * (-k * k * w * w / 4.0).exp() * (num / (kc * kc)).re
    };
    let spec = QuadratureSpec::with_rel_tol(1e-9);
    let mut t3 = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0;
    let mut all_converged = true;
    for seg in [(0.0, 2.0 / w), (2.0 / w, 8.0 / w), (8.0 / w, 30.0 / w)] {
        let quad = integrate_1d(&integrand, seg.0, seg.1, &spec)?;
        t3 += quad.value;
        err += quad.error;
        evaluations += quad.evaluations;
        all_converged &= quad.converged;
    }
    let braces = t12 + t3;
    if !all_converged && err > 1e-7 * braces.abs() {
        return Err(SignalError::QuadratureFailure {
            context: "longitudinal radial integral",
            error: err,
            evaluations,
        });
    }

    let n_t = thermal_occupation(omega, cfg.temperature);
    let chi = cfg.chi2.eval(omega).norm();
    let amp = cfg.pulse.photon_number * d.omega_p / (d.n_wc * C);
    let pref = amp * amp * HBAR * chi * chi * f * f * eps.im * (2.0 * n_t + 1.0)
        / (EPS0.powi(3) * PI.powi(3) * n.norm().powi(4));
    Ok((pref * braces, pref * err))
}

/// Longitudinal-field part of the sampled noise density.  Identically
/// zero in a lossless medium.
pub fn s2_longitudinal(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    Ok(s2_longitudinal_impl(cfg, &d, omega)?.0)
}

/// Transverse-field part: the full mode-summed density minus the
/// longitudinal contribution.
pub fn s2_transverse(cfg: &ExperimentConfig, omega: f64) -> Result<f64, SignalError> {
    let d = cfg.derived()?;
    let (tot, _) = s2_absorptive_impl(cfg, &d, omega, Term::Both, true)?;
    let (lon, _) = s2_longitudinal_impl(cfg, &d, omega)?;
    Ok(tot - lon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::omega_from_thz;
    use crate::materials::{IndexModel, PhononResonanceModel, ThzIndex};
    use crate::pulse::{PulseShape, PulseSpectrum};
    use approx::assert_relative_eq;

    fn riek_sweep_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::riek2015();
        cfg.thz_index = ThzIndex::new(IndexModel::Phonon(PhononResonanceModel::znte(true)));
        cfg.pulse = PulseSpectrum::new(
            PulseShape::Rectangular {
                omega_c: omega_from_thz(255.0),
                delta_omega: std::f64::consts::TAU / 5.9e-15,
            },
            5.0e8,
            3.0e-6,
        )
        .unwrap();
        cfg
    }

    // Spot values computed independently with 25-digit arithmetic.
    #[test]
    fn sweep_geometry_matches_reference_spots() {
        let cfg = riek_sweep_config();
        let cases = [
            (1.0, 6.0870359073344803e-13),
            (5.31, 3.7060184038603157e-11),
            (10.0, 1.2694759073385689e-12),
        ];
        for (thz, expected) in cases {
            let got = s2_longitudinal(&cfg, omega_from_thz(thz)).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn millimeter_geometry_matches_reference_spots() {
        let cfg = ExperimentConfig::benea2019();
        let cases = [
            (1.0, 6.0328576646222796e-32),
            (3.0, 4.7367689789888019e-34),
            (5.31, 1.4863496073666642e-35),
        ];
        for (thz, expected) in cases {
            let got = s2_longitudinal(&cfg, omega_from_thz(thz)).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn lossless_medium_has_no_longitudinal_part() {
        // The default few-femtosecond preset runs with absorption off.
        let cfg = ExperimentConfig::riek2015();
        for thz in [1.0, 5.31, 50.0] {
            assert_eq!(s2_longitudinal(&cfg, omega_from_thz(thz)).unwrap(), 0.0);
        }
    }

    #[test]
    fn transverse_part_is_positive_and_complements_the_total() {
        let cfg = riek_sweep_config();
        for thz in [1.0, 5.31, 10.0] {
            let w = omega_from_thz(thz);
            let tot = super::super::s2_absorptive(&cfg, w).unwrap();
            let lon = s2_longitudinal(&cfg, w).unwrap();
            let trans = s2_transverse(&cfg, w).unwrap();
            assert!(trans > 0.0);
            assert_relative_eq!(lon + trans, tot, max_relative = 1e-12);
        }
    }
}
