//! Delay scans: the time-domain route to the sampled spectrum.
//!
//! Scanning the relative delay δt between two probe pulses yields the
//! correlation signal S²(δt), related to the spectral density by a cosine
//! transform:
//!
//! * synthesis: S²(δt) = ∫₀^∞ s²(Ω) cos(Ω δt) dΩ — a real, even function
//!   of the delay whose δt = 0 value is the integrated variance;
//! * inversion: s²(|Ω|) = (1/π) ∫ dδt S²(δt) e^{iΩδt} over the measured
//!   window, evaluated as a trapezoid-weighted sum on the conjugate
//!   frequency grid Ω_j = 2πj/(N·dt).
//!
//! The transform is a direct summation, not a radix-2 FFT: measured scans
//! are short (hundreds of points) and often live on grids no power-of-two
//! transform accepts, and exactness of the quadrature weights matters
//! more here than speed.  The forward/inverse pair above is
//! self-consistent: synthesising a spectrum and inverting the result
//! reproduces it on the conjugate grid up to window truncation.

use crate::signal::SpectrumResult;

/// Errors from delay-scan construction, synthesis, inversion, and file
/// ingestion.
#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    /// The spectral grid cannot resolve the requested delays.
    #[error(
        "spectral grid too coarse for the requested delays: spacing {max_spacing:.3e} rad/s \
         at max |δt| = {max_delay:.3e} s needs ≤ {required_spacing:.3e} rad/s \
         (8 points per oscillation)"
    )]
    UnderresolvedSpectrum {
        max_spacing: f64,
        max_delay: f64,
        required_spacing: f64,
    },
    /// A scan file violates the documented format.
    #[error("scan file format error at line {line}: {reason}")]
    FormatError { line: usize, reason: String },
    /// Scan-file delays must increase monotonically.
    #[error("scan delays are not strictly increasing at row {index}")]
    NonMonotoneDelays { index: usize },
    /// The delay grid violates a [`DelayScan`] invariant.
    #[error("invalid delay scan: {reason}")]
    InvalidScan { reason: String },
    #[error(transparent)]
    Signal(#[from] crate::signal::SignalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(reason: impl Into<String>) -> ScanError {
    ScanError::InvalidScan {
        reason: reason.into(),
    }
}

/// A sampled delay scan S²(δt) on a uniform grid symmetric about zero.
#[derive(Clone, Debug)]
pub struct DelayScan {
    /// Delays, s; uniform spacing, symmetric about δt = 0.
    pub delays: Vec<f64>,
    /// Scan values S²(δt), dimensionless.
    pub values: Vec<f64>,
    /// Grid step, s.
    pub dt_step: f64,
    /// Whether the values were resampled from a non-uniform source grid.
    pub resampled: bool,
}

impl DelayScan {
    /// Build a scan, validating the grid invariants: at least 4 points,
    /// finite values, uniform spacing, and symmetry about zero.
    pub fn new(delays: Vec<f64>, values: Vec<f64>) -> Result<Self, ScanError> {
        if delays.len() != values.len() {
            return Err(invalid("delay and value arrays differ in length"));
        }
        if delays.len() < 4 {
            return Err(invalid("need at least 4 delay points"));
        }
        for (i, (&d, &v)) in delays.iter().zip(&values).enumerate() {
            if !d.is_finite() || !v.is_finite() {
                return Err(invalid(format!("non-finite entry at row {i}")));
            }
        }
        let span = delays[delays.len() - 1] - delays[0];
        if span <= 0.0 {
            return Err(invalid("delays must be strictly increasing"));
        }
        let dt_step = span / (delays.len() - 1) as f64;
        let tol = 1e-6 * dt_step;
        for i in 1..delays.len() {
            let step = delays[i] - delays[i - 1];
            if (step - dt_step).abs() > tol {
                return Err(invalid(format!(
                    "delays are not uniformly spaced: step {step:e} at row {i} \
                     vs mean {dt_step:e}"
                )));
            }
        }
        if (delays[0] + delays[delays.len() - 1]).abs() > 1e-6 * span {
            return Err(invalid(format!(
                "delay grid is not symmetric about zero: spans {:e} to {:e}",
                delays[0],
                delays[delays.len() - 1]
            )));
        }
        Ok(DelayScan {
            delays,
            values,
            dt_step,
            resampled: false,
        })
    }

    /// Largest |δt| on the grid.
    pub fn max_delay(&self) -> f64 {
        self.delays
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

/// Synthesize a delay scan from a spectral density:
/// S²(δt) = ∫₀^∞ s²(Ω) cos(Ω δt) dΩ by trapezoid quadrature over the
/// spectrum's own grid.
///
/// Fails with [`ScanError::UnderresolvedSpectrum`] when the spectral grid
/// has fewer than 8 points per oscillation of cos(Ω δt) at the largest
/// requested delay.
pub fn synthesize_delay_scan(
    spectrum: &SpectrumResult,
    delays: &[f64],
) -> Result<DelayScan, ScanError> {
    let omegas = &spectrum.omegas;
    if omegas.len() < 2 {
        return Err(invalid("spectrum grid needs at least two points"));
    }
    if omegas.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(invalid("spectrum grid must be finite and non-negative"));
    }
    if omegas.windows(2).any(|p| p[1] <= p[0]) {
        return Err(invalid("spectrum grid must be strictly increasing"));
    }
    if spectrum.values.len() != omegas.len() {
        return Err(invalid("spectrum grid and value arrays differ in length"));
    }
    if spectrum.values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("spectrum contains non-finite values"));
    }
    let max_delay = delays.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let max_spacing = spectrum
        .omegas
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let required_spacing = std::f64::consts::TAU / (8.0 * max_delay);
    if max_spacing * max_delay > std::f64::consts::TAU / 8.0 {
        return Err(ScanError::UnderresolvedSpectrum {
            max_spacing,
            max_delay,
            required_spacing,
        });
    }
    // Trapezoid weights once, reused for every delay.
    let omegas = &spectrum.omegas;
    let n = omegas.len();
    let mut weights = vec![0.0; n];
    for i in 0..n - 1 {
        let h = 0.5 * (omegas[i + 1] - omegas[i]);
        weights[i] += h;
        weights[i + 1] += h;
    }
    let values: Vec<f64> = delays
        .iter()
        .map(|&dt| {
            omegas
                .iter()
                .zip(&spectrum.values)
                .zip(&weights)
                .map(|((&om, &s2), &w)| w * s2 * (om * dt).cos())
                .sum()
        })
        .collect();
    DelayScan::new(delays.to_vec(), values)
}

/// Spectrum recovered from a delay scan on the conjugate frequency grid.
#[derive(Clone, Debug)]
pub struct InvertedSpectrum {
    /// Conjugate grid Ω_j = 2πj/(N·dt), j = 0..=N/2 (DC through Nyquist).
    pub omegas: Vec<f64>,
    /// Recovered spectral density s²(|Ω_j|).
    pub values: Vec<f64>,
    /// Largest magnitude of the sine (odd) part across bins — zero for an
    /// exactly even scan, a data-quality diagnostic for measured ones.
    pub imag_residual_max: f64,
    /// Edge-to-peak ratio of |S²| when it exceeds 10⁻³ (window leakage
    /// likely); `None` when the scan has decayed at its edges.
    pub leakage_edge_ratio: Option<f64>,
    /// Human-readable diagnostics (currently only the leakage warning).
    pub warnings: Vec<String>,
}

/// Invert a delay scan back to the spectral density:
/// s²(|Ω|) = (1/π) ∫ dδt S²(δt) e^{iΩδt}, evaluated with trapezoid
/// weights on the conjugate grid Ω_j = 2πj/(N·dt).
///
/// A scan that has not decayed below 10⁻³ of its peak at the window edges
/// still inverts, but carries a leakage warning in the result.
pub fn spectrum_from_delay_scan(scan: &DelayScan) -> Result<InvertedSpectrum, ScanError> {
    let n = scan.delays.len();
    let dt = scan.dt_step;
    let peak = scan.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = scan.values[0].abs().max(scan.values[n - 1].abs());
    let mut warnings = Vec::new();
    let mut leakage_edge_ratio = None;
    if peak > 0.0 && edge > 1e-3 * peak {
        let ratio = edge / peak;
        leakage_edge_ratio = Some(ratio);
        warnings.push(format!(
            "scan has not decayed at the window edges (|S²|edge/peak = {ratio:.3e}); \
             the recovered spectrum carries leakage from the truncation"
        ));
    }
    let mut weights = vec![dt; n];
    weights[0] = 0.5 * dt;
    weights[n - 1] = 0.5 * dt;
    let bins = n / 2;
    let mut omegas = Vec::with_capacity(bins + 1);
    let mut values = Vec::with_capacity(bins + 1);
    let mut imag_residual_max = 0.0f64;
    for j in 0..=bins {
        let om = std::f64::consts::TAU * j as f64 / (n as f64 * dt);
        let mut re = 0.0;
        let mut im = 0.0;
        for ((&d, &v), &w) in scan.delays.iter().zip(&scan.values).zip(&weights) {
            let (s, c) = (om * d).sin_cos();
            re += w * v * c;
            im += w * v * s;
        }
        omegas.push(om);
        values.push(re / std::f64::consts::PI);
        imag_residual_max = imag_residual_max.max((im / std::f64::consts::PI).abs());
    }
    Ok(InvertedSpectrum {
        omegas,
        values,
        imag_residual_max,
        leakage_edge_ratio,
        warnings,
    })
}

/// Read a measured delay scan from a comma-separated file with header
/// `delay_fs,s2` (delays in femtoseconds).
///
/// Delays must increase strictly; a non-uniform grid is resampled onto a
/// uniform one of the same span and length by linear interpolation, with
/// [`DelayScan::resampled`] set.
pub fn ingest_experimental_scan(path: &std::path::Path) -> Result<DelayScan, ScanError> {
    let text = std::fs::read_to_string(path)?;
    parse_scan(&text)
}

/// Parse the `delay_fs,s2` format from an in-memory string; see
/// [`ingest_experimental_scan`].
pub fn parse_scan(text: &str) -> Result<DelayScan, ScanError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((i, line)) => {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                break (i, t);
            }
            None => {
                return Err(ScanError::FormatError {
                    line: 1,
                    reason: "empty file".into(),
                })
            }
        }
    };
    let normalized: String = header.1.split(',').map(str::trim).collect::<Vec<_>>().join(",");
    if normalized != "delay_fs,s2" {
        return Err(ScanError::FormatError {
            line: header.0 + 1,
            reason: format!("expected header 'delay_fs,s2', found '{}'", header.1),
        });
    }
    let mut delays = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut cols = t.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(ScanError::FormatError {
                line: i + 1,
                reason: "expected exactly two comma-separated columns".into(),
            });
        };
        let delay_fs: f64 = a.parse().map_err(|_| ScanError::FormatError {
            line: i + 1,
            reason: format!("cannot parse delay '{a}'"),
        })?;
        let value: f64 = b.parse().map_err(|_| ScanError::FormatError {
            line: i + 1,
            reason: format!("cannot parse value '{b}'"),
        })?;
        if !delay_fs.is_finite() || !value.is_finite() {
            return Err(ScanError::FormatError {
                line: i + 1,
                reason: "non-finite entry".into(),
            });
        }
        delays.push(delay_fs * 1.0e-15);
        values.push(value);
    }
    for i in 1..delays.len() {
        if delays[i] <= delays[i - 1] {
            return Err(ScanError::NonMonotoneDelays { index: i });
        }
    }
    if delays.len() < 4 {
        return Err(invalid("need at least 4 delay points"));
    }
    // Uniform already?  Reuse the grid; otherwise resample.
    let span = delays[delays.len() - 1] - delays[0];
    let dt_step = span / (delays.len() - 1) as f64;
    let uniform = delays
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt_step).abs() <= 1e-6 * dt_step);
    if uniform {
        return DelayScan::new(delays, values);
    }
    let n = delays.len();
    let grid: Vec<f64> = (0..n)
        .map(|i| delays[0] + span * i as f64 / (n - 1) as f64)
        .collect();
    let mut resampled = Vec::with_capacity(n);
    let mut seg = 0;
    for &d in &grid {
        while seg + 2 < delays.len() && delays[seg + 1] < d {
            seg += 1;
        }
        let t = (d - delays[seg]) / (delays[seg + 1] - delays[seg]);
        resampled.push(values[seg] + t.clamp(0.0, 1.0) * (values[seg + 1] - values[seg]));
    }
    let mut scan = DelayScan::new(grid, resampled)?;
    scan.resampled = true;
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::omega_from_thz;
    use crate::numerics::{linear_grid, trapezoid};
    use crate::signal::{
        evaluate_spectrum, ExperimentConfig, SignalComponent, SpectrumResult,
    };
    use approx::assert_relative_eq;

    fn synthetic_spectrum(omegas: Vec<f64>, values: Vec<f64>) -> SpectrumResult {
        let n = omegas.len();
        SpectrumResult {
            omegas,
            values,
            component: SignalComponent::Absorptive,
            quadrature_error: vec![0.0; n],
        }
    }

    /// Gaussian density e^{−Ω²/2σ²} on a dense linear grid, with its
    /// analytic scan σ√(π/2)·e^{−σ²δt²/2}.
    fn gaussian_setup() -> (SpectrumResult, f64) {
        let sigma = omega_from_thz(1.0);
        let omegas = linear_grid(0.0, 6.0 * sigma, 4801);
        let values = omegas.iter().map(|&w| (-w * w / (2.0 * sigma * sigma)).exp()).collect();
        (synthetic_spectrum(omegas, values), sigma)
    }

    #[test]
    fn zero_delay_equals_the_variance_integral() {
        let (spec, _) = gaussian_setup();
        let delays = linear_grid(-5.0e-13, 5.0e-13, 5);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        let variance = trapezoid(&spec.omegas, &spec.values);
        let mid = delays.len() / 2;
        assert_eq!(scan.delays[mid], 0.0);
        assert_relative_eq!(scan.values[mid], variance, max_relative = 1e-14);
    }

    #[test]
    fn synthesized_scan_is_even_in_the_delay() {
        let (spec, _) = gaussian_setup();
        let delays = linear_grid(-8.0e-13, 8.0e-13, 33);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        let n = delays.len();
        for i in 0..n {
            assert_relative_eq!(
                scan.values[i],
                scan.values[n - 1 - i],
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn synthesis_matches_the_analytic_gaussian_transform() {
        let (spec, sigma) = gaussian_setup();
        let s2_zero = sigma * (std::f64::consts::PI / 2.0).sqrt();
        let delays = linear_grid(-8.0e-13, 8.0e-13, 81);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        for (&dt, &got) in scan.delays.iter().zip(&scan.values) {
            let expected = s2_zero * (-sigma * sigma * dt * dt / 2.0).exp();
            // Relative in the body of the scan; near the wings the grid's
            // upper truncation leaves an absolute residue of ~1e-9 of the
            // zero-delay value, so allow an absolute floor well above it.
            assert_relative_eq!(got, expected, max_relative = 2e-5, epsilon = 1e-7 * s2_zero);
        }
    }

    /// A narrow bump at Ω₀ synthesizes to a cos(Ω₀δt) carrier under a
    /// slow Gaussian envelope.
    #[test]
    fn narrow_bump_synthesizes_to_its_carrier_oscillation() {
        let omega0 = omega_from_thz(1.0);
        let sb = omega0 / 100.0;
        let omegas = linear_grid(omega0 - 8.0 * sb, omega0 + 8.0 * sb, 1601);
        let values = omegas
            .iter()
            .map(|&w| (-(w - omega0) * (w - omega0) / (2.0 * sb * sb)).exp())
            .collect();
        let spec = synthetic_spectrum(omegas, values);
        let period = std::f64::consts::TAU / omega0;
        let delays = linear_grid(-3.0 * period, 3.0 * period, 121);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        let s0 = scan.values[delays.len() / 2];
        for (&dt, &got) in scan.delays.iter().zip(&scan.values) {
            let expected = s0 * (omega0 * dt).cos() * (-sb * sb * dt * dt / 2.0).exp();
            assert!(
                (got - expected).abs() <= 2e-3 * s0,
                "at δt = {dt:e}: got {got:e}, expected {expected:e}"
            );
        }
    }

    #[test]
    fn synthesis_rejects_an_underresolved_spectrum() {
        // 10 points over a wide band cannot resolve long delays.
        let omegas = linear_grid(omega_from_thz(0.1), omega_from_thz(10.0), 10);
        let values = vec![1.0; omegas.len()];
        let spec = synthetic_spectrum(omegas, values);
        let delays = linear_grid(-5.0e-12, 5.0e-12, 41);
        let err = synthesize_delay_scan(&spec, &delays).unwrap_err();
        match err {
            ScanError::UnderresolvedSpectrum {
                max_spacing,
                max_delay,
                required_spacing,
            } => {
                assert!(max_spacing > required_spacing);
                assert_eq!(max_delay, 5.0e-12);
            }
            other => panic!("expected UnderresolvedSpectrum, got {other:?}"),
        }
    }

    /// Synthesize-then-invert returns the Gaussian on the conjugate grid.
    #[test]
    fn roundtrip_recovers_a_smooth_spectrum() {
        let (spec, sigma) = gaussian_setup();
        let delays = linear_grid(-8.0e-13, 8.0e-13, 801);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        let inv = spectrum_from_delay_scan(&scan).unwrap();
        assert!(inv.warnings.is_empty(), "unexpected: {:?}", inv.warnings);
        let peak = inv.values[0];
        assert!(inv.imag_residual_max < 1e-6 * peak.abs());
        let mut checked = 0;
        for (&om, &got) in inv.omegas.iter().zip(&inv.values).skip(1) {
            let expected = (-om * om / (2.0 * sigma * sigma)).exp();
            if expected > 1e-3 {
                assert_relative_eq!(got, expected, max_relative = 1e-4);
                checked += 1;
            }
        }
        assert!(checked >= 3, "only {checked} interior bins compared");
    }

    #[test]
    fn parseval_ties_the_recovered_integral_to_the_zero_delay_value() {
        let (spec, _) = gaussian_setup();
        let delays = linear_grid(-8.0e-13, 8.0e-13, 801);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        let inv = spectrum_from_delay_scan(&scan).unwrap();
        let integral = trapezoid(&inv.omegas, &inv.values);
        let s2_zero = scan.values[delays.len() / 2];
        assert_relative_eq!(integral, s2_zero, max_relative = 1e-3);
    }

    #[test]
    fn inversion_is_linear_in_the_scan() {
        let delays = linear_grid(-4.0e-13, 4.0e-13, 161);
        let v1: Vec<f64> = delays
            .iter()
            .map(|&d| (-d * d / 2.0e-26).exp())
            .collect();
        let v2: Vec<f64> = delays
            .iter()
            .map(|&d| (-d * d / 8.0e-27).exp() * (omega_from_thz(0.8) * d).cos())
            .collect();
        let combined: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| 2.5 * a - 1.5 * b).collect();
        let s1 = DelayScan::new(delays.clone(), v1).unwrap();
        let s2 = DelayScan::new(delays.clone(), v2).unwrap();
        let sc = DelayScan::new(delays, combined).unwrap();
        let i1 = spectrum_from_delay_scan(&s1).unwrap();
        let i2 = spectrum_from_delay_scan(&s2).unwrap();
        let ic = spectrum_from_delay_scan(&sc).unwrap();
        // Near-cancelled bins have no relative accuracy to speak of, so
        // anchor the comparison to the spectral peak instead.
        let peak = ic.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..ic.values.len() {
            let lin = 2.5 * i1.values[j] - 1.5 * i2.values[j];
            assert!(
                (ic.values[j] - lin).abs() <= 1e-12 * peak,
                "bin {j}: {:e} vs {lin:e}",
                ic.values[j]
            );
        }
    }

    /// A constant scan concentrates in the DC bin; the other bins carry
    /// only the trapezoid edge term, down by the grid length — and the
    /// constant necessarily trips the leakage warning.
    #[test]
    fn constant_offset_maps_to_the_dc_bin() {
        let n = 2001;
        let delays = linear_grid(-1.0e-12, 1.0e-12, n);
        let values = vec![3.0; n];
        let scan = DelayScan::new(delays, values).unwrap();
        let inv = spectrum_from_delay_scan(&scan).unwrap();
        assert!(inv.leakage_edge_ratio.is_some());
        assert_eq!(inv.warnings.len(), 1);
        let dc = inv.values[0];
        assert!(dc > 0.0);
        for &v in &inv.values[1..] {
            assert!(
                v.abs() <= 2.0 * dc / (n - 1) as f64,
                "off-DC bin {v:e} vs DC {dc:e}"
            );
        }
    }

    /// Cross-module self-consistency: synthesize from the long-crystal
    /// thermal spectrum, invert, and compare against direct evaluation at
    /// the conjugate frequencies.
    #[test]
    fn thermal_preset_survives_the_synthesis_inversion_roundtrip() {
        let cfg = ExperimentConfig::benea2019();
        let grid = crate::signal::log_grid(omega_from_thz(0.1), omega_from_thz(6.0), 200);
        let spec = evaluate_spectrum(&cfg, SignalComponent::Absorptive, &grid).unwrap();
        let delays = linear_grid(-1.0e-12, 1.0e-12, 401);
        let scan = synthesize_delay_scan(&spec, &delays).unwrap();
        let inv = spectrum_from_delay_scan(&scan).unwrap();
        let mut checked = 0;
        for (&om, &got) in inv.omegas.iter().zip(&inv.values) {
            if om < omega_from_thz(1.0) || om > omega_from_thz(4.0) {
                continue;
            }
            let direct = crate::signal::s2_absorptive(&cfg, om).unwrap();
            assert_relative_eq!(got, direct, max_relative = 1e-2);
            checked += 1;
        }
        assert!(checked >= 4, "only {checked} bins compared");
    }

    #[test]
    fn scan_invariants_are_enforced() {
        // Non-uniform spacing.
        let err = DelayScan::new(vec![-2.0, -1.0, 1.5, 2.0], vec![0.0; 4]).unwrap_err();
        assert!(matches!(err, ScanError::InvalidScan { .. }));
        // Asymmetric about zero.
        let err =
            DelayScan::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0; 4]).unwrap_err();
        assert!(matches!(err, ScanError::InvalidScan { .. }));
        // Too short.
        let err = DelayScan::new(vec![-1.0, 0.0, 1.0], vec![0.0; 3]).unwrap_err();
        assert!(matches!(err, ScanError::InvalidScan { .. }));
    }

    #[test]
    fn parses_a_well_formed_scan_file() {
        let text = "delay_fs, s2\n-30, 0.5\n-10, 1.0\n10, 1.0\n30, 0.5\n";
        let scan = parse_scan(text).unwrap();
        assert_eq!(scan.delays.len(), 4);
        assert!(!scan.resampled);
        assert_relative_eq!(scan.dt_step, 20.0e-15, max_relative = 1e-12);
        assert_eq!(scan.values, vec![0.5, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn rejects_shuffled_rows() {
        let text = "delay_fs,s2\n-30,0.5\n10,1.0\n-10,1.0\n30,0.5\n";
        let err = parse_scan(text).unwrap_err();
        assert!(matches!(err, ScanError::NonMonotoneDelays { index: 2 }));
    }

    #[test]
    fn rejects_malformed_headers_and_rows() {
        let err = parse_scan("time,signal\n1,2\n").unwrap_err();
        assert!(matches!(err, ScanError::FormatError { line: 1, .. }));
        let err = parse_scan("delay_fs,s2\n-10,1.0\nbogus\n10,1.0\n").unwrap_err();
        assert!(matches!(err, ScanError::FormatError { line: 3, .. }));
        let err = parse_scan("delay_fs,s2\n-10,1.0,7\n10,1.0\n").unwrap_err();
        assert!(matches!(err, ScanError::FormatError { line: 2, .. }));
    }

    /// Non-uniform grids resample by linear interpolation: data that is
    /// itself linear in the delay passes through the resampler intact.
    #[test]
    fn resamples_non_uniform_grids_by_linear_interpolation() {
        let nodes_fs = [-40.0, -15.0, -5.0, 5.0, 15.0, 40.0];
        let mut text = String::from("delay_fs,s2\n");
        for d in nodes_fs {
            // values linear in delay: v = 2 + 0.03·δt_fs
            text.push_str(&format!("{},{}\n", d, 2.0 + 0.03 * d));
        }
        let scan = parse_scan(&text).unwrap();
        assert!(scan.resampled);
        assert_eq!(scan.delays.len(), nodes_fs.len());
        assert_relative_eq!(scan.dt_step, 16.0e-15, max_relative = 1e-12);
        for (&d, &v) in scan.delays.iter().zip(&scan.values) {
            assert_relative_eq!(v, 2.0 + 0.03 * (d / 1.0e-15), max_relative = 1e-12);
        }
    }
}
