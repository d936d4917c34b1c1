//! Spatial structure of the detection: probe filter × field correlation.
//!
//! The measured noise is an overlap of two spatial fields.  The probe
//! contributes a sampling filter — its transverse Gaussian and the
//! group-delay phase it accumulates along the crystal.  The medium
//! contributes the frequency-resolved field correlation, fixed by the
//! fluctuation–dissipation relation ⟨EE†⟩_Ω ∝ Ω²(n̄ + 1/2)·Im G(r, r′, Ω).
//! The maps here evaluate both fields and their pointwise product, either
//! over the transverse plane at a fixed frequency or along the
//! propagation axis against frequency; each field is returned normalised
//! to unit peak magnitude with the raw peak reported alongside.

use std::f64::consts::PI;

use crate::constants::{C, HBAR, MU0};
use crate::greens::{bulk_green_xx_im, closed_form_green_xx, BulkMedium};
use crate::materials::thermal_occupation;

use super::{invalid, validate_grid, Derived, ExperimentConfig, SignalError};

/// Probe filter, field correlation, and their product on a 2-D grid.
///
/// Values are stored row-major (`rows.len() × cols.len()`, see
/// [`DensityMaps::idx`]).  Each of the three fields is normalised to unit
/// peak magnitude; the `*_peak` fields carry the raw magnitudes divided
/// out, so `field[idx] * field_peak` restores absolute values.
#[derive(Clone, Debug)]
pub struct DensityMaps {
    /// First (row) coordinate axis.
    pub rows: Vec<f64>,
    /// Second (column) coordinate axis.
    pub cols: Vec<f64>,
    /// Probe sampling filter.
    pub filter: Vec<f64>,
    /// Field correlation of the medium.
    pub correlation: Vec<f64>,
    /// Pointwise filter × correlation: what the probe actually reads.
    pub density: Vec<f64>,
    /// Raw peak magnitude of the filter before normalisation.
    pub filter_peak: f64,
    /// Raw peak magnitude of the correlation before normalisation.
    pub correlation_peak: f64,
    /// Raw peak magnitude of the density before normalisation.
    pub density_peak: f64,
}

impl DensityMaps {
    /// Flat index of (row `i`, column `j`).
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.cols.len() + j
    }
}

fn validate_axis(name: &str, v: &[f64]) -> Result<(), SignalError> {
    if v.is_empty() {
        return Err(invalid(format!("{name} axis is empty")));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(invalid(format!("{name} axis entry {i} is not finite")));
        }
        if i > 0 && x <= v[i - 1] {
            return Err(invalid(format!(
                "{name} axis must be strictly increasing, entries {} and {i}",
                i - 1
            )));
        }
    }
    Ok(())
}

/// Normalise to unit peak magnitude, returning the raw peak.
fn normalized(mut v: Vec<f64>) -> (Vec<f64>, f64) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        for x in &mut v {
            *x /= peak;
        }
    }
    (v, peak)
}

/// Frequency-resolved field correlation at separation `dr`:
/// (2ħμ₀/π)·Ω²·(n̄ + 1/2)·Im G_xx.
fn correlation_value(
    medium: &BulkMedium,
    temperature: f64,
    omega: f64,
    dr: [f64; 3],
) -> Result<f64, SignalError> {
    let r2 = dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2];
    let im = if r2 == 0.0 {
        bulk_green_xx_im(medium, [0.0; 3], [0.0; 3], omega)?
    } else {
        let k = medium.wavenumber(omega)?;
        closed_form_green_xx(k, dr).im
    };
    let n_t = thermal_occupation(omega, temperature);
    Ok(2.0 * HBAR * MU0 / PI * omega * omega * (0.5 + n_t) * im)
}

/// Squared probe-filter amplitude prefactor at one frequency.
fn filter_prefactor(
    cfg: &ExperimentConfig,
    d: &Derived,
    omega: f64,
) -> Result<f64, SignalError> {
    let chi = cfg.chi2.eval(omega).norm();
    let f = cfg.pulse.spectral_autocorrelation(omega)?;
    let w = cfg.beam_waist();
    let base = 2.0 * chi * C * MU0 * cfg.pulse.photon_number * d.omega_p / (w * w * d.n_wc);
    Ok(base * base * f * f)
}

fn assemble(
    rows: &[f64],
    cols: &[f64],
    filter_raw: Vec<f64>,
    correlation_raw: Vec<f64>,
) -> DensityMaps {
    let density_raw: Vec<f64> = filter_raw
        .iter()
        .zip(&correlation_raw)
        .map(|(f, c)| f * c)
        .collect();
    let (filter, filter_peak) = normalized(filter_raw);
    let (correlation, correlation_peak) = normalized(correlation_raw);
    let (density, density_peak) = normalized(density_raw);
    DensityMaps {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        filter,
        correlation,
        density,
        filter_peak,
        correlation_peak,
        density_peak,
    }
}

/// Transverse-plane maps at a fixed frequency: probe filter, field
/// correlation against a source point on the axis, and their product,
/// over the plane z = z′ = 0.
///
/// The filter here is purely transverse — the probe's Gaussian intensity
/// profile, with no spectral weight — so the map stays meaningful at
/// frequencies outside the detection band; the frequency enters through
/// the correlation alone. The spectral response belongs to the z–Ω map.
///
/// In-plane correlations exist pointwise only for a lossless medium at
/// the chosen frequency (an absorbing medium's in-plane contact term
/// diverges); the underlying propagator reports that case as an error.
pub fn density_maps_xy(
    cfg: &ExperimentConfig,
    omega: f64,
    xs: &[f64],
    ys: &[f64],
) -> Result<DensityMaps, SignalError> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(invalid(format!(
            "frequency must be positive and finite, got {omega:e}"
        )));
    }
    validate_axis("x", xs)?;
    validate_axis("y", ys)?;
    let medium = BulkMedium::from_thz_index(cfg.thz_index.clone());
    let w2 = cfg.beam_waist() * cfg.beam_waist();
    let mut filter = Vec::with_capacity(xs.len() * ys.len());
    let mut correlation = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        for &y in ys {
            filter.push((-(x * x + y * y) / w2).exp());
            correlation.push(correlation_value(
                &medium,
                cfg.temperature,
                omega,
                [x, y, 0.0],
            )?);
        }
    }
    Ok(assemble(xs, ys, filter, correlation))
}

/// Axial maps against frequency: probe filter (group-delay phase along
/// z), field correlation between axial points z and 0, and their product.
///
/// Any z ≠ 0 works in absorbing media; a z = 0 row additionally requires
/// the medium to be lossless at that frequency.
pub fn density_maps_z_omega(
    cfg: &ExperimentConfig,
    zs: &[f64],
    omegas: &[f64],
) -> Result<DensityMaps, SignalError> {
    validate_axis("z", zs)?;
    validate_grid(omegas)?;
    let d = cfg.derived()?;
    let medium = BulkMedium::from_thz_index(cfg.thz_index.clone());
    let prefs = omegas
        .iter()
        .map(|&om| filter_prefactor(cfg, &d, om))
        .collect::<Result<Vec<_>, _>>()?;
    let mut filter = Vec::with_capacity(zs.len() * omegas.len());
    let mut correlation = Vec::with_capacity(zs.len() * omegas.len());
    for &z in zs {
        for (j, &om) in omegas.iter().enumerate() {
            filter.push(prefs[j] * (d.ng * om * z / C).cos());
            correlation.push(correlation_value(
                &medium,
                cfg.temperature,
                om,
                [0.0, 0.0, z],
            )?);
        }
    }
    Ok(assemble(zs, omegas, filter, correlation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::omega_from_thz;
    use crate::numerics::linear_grid;
    use approx::assert_relative_eq;

    #[test]
    fn transverse_filter_is_the_centered_probe_gaussian() {
        let cfg = ExperimentConfig::riek2015();
        let omega = omega_from_thz(1.0);
        let xs = linear_grid(-6.0e-6, 6.0e-6, 13);
        let ys = linear_grid(-4.0e-6, 4.0e-6, 9);
        let maps = density_maps_xy(&cfg, omega, &xs, &ys).unwrap();
        let w2 = cfg.beam_waist() * cfg.beam_waist();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let expected = (-(x * x + y * y) / w2).exp();
                assert_relative_eq!(
                    maps.filter[maps.idx(i, j)],
                    expected,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn coincidence_correlation_matches_the_analytic_limit() {
        let cfg = ExperimentConfig::riek2015();
        let omega = omega_from_thz(1.0);
        let xs = linear_grid(-3.0e-6, 3.0e-6, 7);
        let maps = density_maps_xy(&cfg, omega, &xs, &xs).unwrap();
        // Peak sits at the origin, where Im G_xx = nΩ/(6πc) for a
        // lossless medium; T = 0 leaves the half quantum.
        let n = cfg.thz_index.index(omega).unwrap().re;
        let expected =
            2.0 * HBAR * MU0 / PI * omega * omega * 0.5 * n * omega / (6.0 * PI * C);
        assert_relative_eq!(maps.correlation_peak, expected, max_relative = 1e-6);
        // And the center cell is that peak.
        let mid = maps.idx(3, 3);
        assert_relative_eq!(maps.correlation[mid], 1.0, max_relative = 1e-12);
    }

    /// The transverse filter carries no spectral weight, so the map works
    /// at frequencies far outside the detection band, where the
    /// correlation is much narrower than the probe.
    #[test]
    fn transverse_map_works_beyond_the_detection_band() {
        let cfg = ExperimentConfig::riek2015();
        let omega = omega_from_thz(300.0);
        let xs = linear_grid(-6.0e-6, 6.0e-6, 61);
        let maps = density_maps_xy(&cfg, omega, &xs, &xs).unwrap();
        assert_relative_eq!(maps.filter_peak, 1.0, max_relative = 1e-14);
        assert!(maps.correlation_peak > 0.0);
        assert!(maps.density_peak > 0.0);
        // Along y = 0 the optical-frequency correlation oscillates with a
        // sub-micrometre period while the 3 µm filter stays positive.
        let mid = xs.len() / 2;
        let row: Vec<f64> = (mid..xs.len())
            .map(|i| maps.correlation[maps.idx(i, mid)])
            .collect();
        let sign_changes = row
            .windows(2)
            .filter(|p| p[0].signum() != p[1].signum())
            .count();
        assert!(
            sign_changes >= 4,
            "expected several oscillations, got {sign_changes}"
        );
    }

    #[test]
    fn density_is_the_pointwise_product_of_the_raw_fields() {
        let cfg = ExperimentConfig::riek2015();
        let omega = omega_from_thz(1.0);
        let xs = linear_grid(-5.0e-6, 5.0e-6, 5);
        let maps = density_maps_xy(&cfg, omega, &xs, &xs).unwrap();
        for idx in 0..maps.filter.len() {
            let lhs = maps.density[idx] * maps.density_peak;
            let rhs = (maps.filter[idx] * maps.filter_peak)
                * (maps.correlation[idx] * maps.correlation_peak);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-300);
        }
    }

    #[test]
    fn all_three_fields_are_unit_normalized() {
        let cfg = ExperimentConfig::riek2015();
        let zs = linear_grid(-10.0e-6, 10.0e-6, 21);
        let omegas = vec![omega_from_thz(0.5), omega_from_thz(1.0), omega_from_thz(2.0)];
        let maps = density_maps_z_omega(&cfg, &zs, &omegas).unwrap();
        for field in [&maps.filter, &maps.correlation, &maps.density] {
            let peak = field.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert_relative_eq!(peak, 1.0, max_relative = 1e-14);
        }
    }

    /// On-axis correlation oscillates with the medium wavelength: beyond
    /// the near field its zero crossings are spaced by half of it,
    /// π c/(n Ω).
    #[test]
    fn axial_zero_crossings_follow_the_medium_wavelength() {
        let cfg = ExperimentConfig::riek2015();
        let omega = omega_from_thz(1.0);
        let zs = linear_grid(80.0e-6, 420.0e-6, 1361);
        let maps = density_maps_z_omega(&cfg, &zs, &[omega]).unwrap();
        let col: Vec<f64> = (0..zs.len()).map(|i| maps.correlation[maps.idx(i, 0)]).collect();
        let mut crossings = Vec::new();
        for i in 1..col.len() {
            if col[i - 1].signum() != col[i].signum() {
                let t = col[i - 1] / (col[i - 1] - col[i]);
                crossings.push(zs[i - 1] + t * (zs[i] - zs[i - 1]));
            }
        }
        let n = cfg.thz_index.index(omega).unwrap().re;
        let half_wavelength = PI * C / (n * omega);
        assert!(
            crossings.len() >= 4,
            "expected several crossings, got {}",
            crossings.len()
        );
        for pair in crossings.windows(2) {
            assert_relative_eq!(
                pair[1] - pair[0],
                half_wavelength,
                max_relative = 5e-2
            );
        }
        // The spacing converges onto the half wavelength going outward.
        let last = crossings[crossings.len() - 1] - crossings[crossings.len() - 2];
        assert_relative_eq!(last, half_wavelength, max_relative = 1e-2);
    }

    #[test]
    fn absorbing_media_reject_in_plane_maps_but_allow_axial_ones() {
        let cfg = ExperimentConfig::benea2019();
        let omega = omega_from_thz(1.0);
        let xs = linear_grid(-100.0e-6, 100.0e-6, 5);
        let err = density_maps_xy(&cfg, omega, &xs, &xs).unwrap_err();
        assert!(matches!(err, SignalError::Greens(_)));
        // Axial separations avoid the contact term entirely.
        let zs = linear_grid(10.0e-6, 100.0e-6, 7);
        let maps = density_maps_z_omega(&cfg, &zs, &[omega]).unwrap();
        assert!(maps.density.iter().all(|v| v.is_finite()));
    }
}
