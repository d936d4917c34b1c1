//! Run configuration: a layered key–value format with explicit units.
//!
//! A run is described by a flat set of dotted keys (`section.key`) written
//! in an INI-style text file:
//!
//! ```text
//! # comment
//! preset = riek2015          # optional base preset
//!
//! [crystal]
//! length_um = 7.0            # keys carry explicit unit suffixes
//! ```
//!
//! Three layers combine, later ones overriding earlier ones:
//!
//! 1. a **preset** (`riek2015` or `benea2019`) — complete, copy-editable
//!    data files shipped with the crate under `presets/`;
//! 2. a **config file** (`--config`), which may name the preset itself via
//!    a top-level `preset =` line, or be `preset = custom` / standalone;
//! 3. **command-line overrides** (`--set section.key=value`).
//!
//! Unknown keys are errors everywhere — there are no silent defaults.  A
//! custom configuration (no preset) must therefore spell out every key the
//! requested command needs.
//!
//! # Schema
//!
//! | key | meaning |
//! |-----|---------|
//! | `crystal.length_um` | crystal length along propagation, µm |
//! | `crystal.temperature_k` | sample temperature, K |
//! | `laser.sellmeier_a/_b/_c_um2` | probe-band index model n² = A + Bλ²/(λ²−C) |
//! | `laser.waist_um` | probe beam waist, µm |
//! | `laser.center_thz` | probe carrier frequency, THz |
//! | `laser.photon_number` | detected photons per pulse |
//! | `laser.pulse_shape` | `rect`, `gaussian`, or `table` |
//! | `laser.bandwidth_thz` | rectangular detection bandwidth, THz (`rect`) |
//! | `laser.duration_fs` | Gaussian pulse duration, fs (`gaussian`) |
//! | `laser.spectrum_file` | CSV `freq_thz,amplitude` (`table`) |
//! | `thz.model` | `phonon`, `fixed`, or `table` |
//! | `thz.eps_inf`, `thz.to_thz`, `thz.lo_thz`, `thz.gamma_thz` | phonon resonance parameters |
//! | `thz.absorption` | `on`/`off` — keep or drop Im n (`phonon`) |
//! | `thz.absorption_scale` | global scale on Im n |
//! | `thz.n_re`, `thz.n_im` | frequency-flat index (`fixed`) |
//! | `thz.index_file` | CSV `freq_thz,n_re,alpha_per_m` (`table`) |
//! | `chi2.model` | `constant` or `dispersive` |
//! | `chi2.value_c_per_v2` | flat χ⁽²⁾, C/V² (`constant`) |
//! | `chi2.r41_m_per_v`, `chi2.c0`, `chi2.resonance_thz`, `chi2.gamma_thz`, `chi2.denominator` | dispersive χ⁽²⁾ resonance; denominator `resonant` or `as-printed` |
//! | `grid.min_thz`, `grid.max_thz`, `grid.points`, `grid.scale` | frequency grid (`log`/`linear`) |
//! | `components.list` | comma-separated signal components |
//! | `output.dir` | output directory (relative to the working directory) |
//! | `quadrature.variance_rel_tol` | grid-refinement tolerance of integrated variances |
//! | `quadrature.full_inner_rel_tol`, `quadrature.full_outer_rel_tol` | nested tolerances of the full evaluator |
//! | `scan.max_delay_fs`, `scan.points` | delay window ±max and odd sample count |
//! | `density.maps` | comma-separated subset of `xy`, `zomega` |
//! | `density.xy_freq_thz`, `density.xy_extent_um`, `density.xy_points` | transverse map |
//! | `density.z_min_um`, `density.z_max_um`, `density.z_points`, `density.min_thz`, `density.max_thz`, `density.omega_points` | axial map |
//! | `sweep.min_fs`, `sweep.max_fs`, `sweep.points`, `sweep.mapping`, `sweep.scale_factor` | duration sweep; mapping `inverse` or `scaled` |
//!
//! File paths named by `*_file` keys resolve relative to the config file's
//! directory (relative to the working directory when given via `--set`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::constants::omega_from_thz;
use crate::materials::{
    Chi2Denominator, Chi2Model, IndexModel, PhononResonanceModel, SellmeierModel, TabulatedIndex,
    ThzIndex,
};
use crate::pulse::{PulseShape, PulseSpectrum, TabulatedSpectrum};
use crate::signal::{
    linear_grid, log_grid, DurationMapping, ExperimentConfig, QuadratureSettings, SignalComponent,
};

/// Errors raised while assembling a [`RunConfig`].
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {reason}")]
    Syntax {
        source_name: String,
        line: usize,
        reason: String,
    },
    #[error("unknown key '{key}' in {source_name}{hint}")]
    UnknownKey {
        key: String,
        source_name: String,
        hint: String,
    },
    #[error("duplicate key '{key}' in {source_name}")]
    DuplicateKey { key: String, source_name: String },
    #[error(
        "missing required key '{key}' ({expected}); presets provide it, \
         a custom configuration must set it explicitly"
    )]
    MissingKey { key: String, expected: &'static str },
    #[error("invalid value '{value}' for '{key}': {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("unknown preset '{name}'; available: riek2015, benea2019, custom")]
    UnknownPreset { name: String },
    #[error("--preset {flag} conflicts with 'preset = {file}' in the config file")]
    PresetConflict { flag: String, file: String },
    #[error("--set expects KEY=VALUE, got '{arg}'")]
    MalformedSet { arg: String },
    #[error("configuration rejected: {0}")]
    Model(String),
}

/// Every key the format knows, with the expected value in words.  Used for
/// unknown-key rejection and for missing-key error messages.
const KNOWN_KEYS: &[(&str, &str)] = &[
    ("preset", "one of: riek2015, benea2019, custom"),
    ("crystal.length_um", "crystal length in micrometres, > 0"),
    ("crystal.temperature_k", "sample temperature in kelvin, >= 0"),
    ("laser.sellmeier_a", "Sellmeier A coefficient, > 0"),
    ("laser.sellmeier_b", "Sellmeier B coefficient, >= 0"),
    ("laser.sellmeier_c_um2", "Sellmeier C coefficient in um^2, > 0"),
    ("laser.waist_um", "probe beam waist in micrometres, > 0"),
    ("laser.center_thz", "probe carrier frequency in THz, > 0"),
    ("laser.photon_number", "detected photons per pulse, > 0"),
    ("laser.pulse_shape", "one of: rect, gaussian, table"),
    (
        "laser.bandwidth_thz",
        "rectangular detection bandwidth in THz, > 0 (pulse_shape = rect)",
    ),
    (
        "laser.duration_fs",
        "Gaussian pulse duration in femtoseconds, > 0 (pulse_shape = gaussian)",
    ),
    (
        "laser.spectrum_file",
        "CSV file 'freq_thz,amplitude' (pulse_shape = table)",
    ),
    ("thz.model", "one of: phonon, fixed, table"),
    ("thz.eps_inf", "high-frequency permittivity, > 0 (model = phonon)"),
    ("thz.to_thz", "TO phonon frequency in THz, > 0 (model = phonon)"),
    ("thz.lo_thz", "LO phonon frequency in THz, > 0 (model = phonon)"),
    ("thz.gamma_thz", "phonon damping in THz, >= 0 (model = phonon)"),
    ("thz.absorption", "on or off (model = phonon)"),
    ("thz.absorption_scale", "global scale on Im n, >= 0"),
    ("thz.n_re", "fixed real index, > 0 (model = fixed)"),
    ("thz.n_im", "fixed imaginary index, >= 0 (model = fixed)"),
    (
        "thz.index_file",
        "CSV file 'freq_thz,n_re,alpha_per_m' (model = table)",
    ),
    ("chi2.model", "one of: constant, dispersive"),
    (
        "chi2.value_c_per_v2",
        "frequency-flat chi2 in C/V^2, > 0 (model = constant)",
    ),
    (
        "chi2.r41_m_per_v",
        "electro-optic coefficient r41 in m/V, > 0 (model = dispersive)",
    ),
    ("chi2.c0", "Faust-Henry coefficient, finite (model = dispersive)"),
    (
        "chi2.resonance_thz",
        "chi2 resonance frequency in THz, > 0 (model = dispersive)",
    ),
    (
        "chi2.gamma_thz",
        "chi2 resonance damping in THz, >= 0 (model = dispersive)",
    ),
    (
        "chi2.denominator",
        "one of: resonant, as-printed (model = dispersive)",
    ),
    ("grid.min_thz", "lower grid edge in THz, > 0"),
    ("grid.max_thz", "upper grid edge in THz, > min_thz"),
    ("grid.points", "number of grid points, 5 to 100000"),
    ("grid.scale", "one of: log, linear"),
    ("components.list", "comma-separated signal components, non-empty"),
    ("output.dir", "output directory"),
    (
        "quadrature.variance_rel_tol",
        "grid-refinement tolerance of integrated variances, in (0, 0.1]",
    ),
    (
        "quadrature.full_inner_rel_tol",
        "inner tolerance of the full evaluator, in (0, 0.1]",
    ),
    (
        "quadrature.full_outer_rel_tol",
        "outer tolerance of the full evaluator, in (0, 0.1]",
    ),
    ("scan.max_delay_fs", "delay window half-width in femtoseconds, > 0"),
    ("scan.points", "odd number of delay samples, >= 5"),
    ("density.maps", "comma-separated subset of: xy, zomega"),
    ("density.xy_freq_thz", "transverse-map frequency in THz, > 0"),
    ("density.xy_extent_um", "transverse half-extent in micrometres, > 0"),
    ("density.xy_points", "transverse samples per axis, 5 to 2001"),
    ("density.z_min_um", "axial-map start in micrometres, >= 0"),
    ("density.z_max_um", "axial-map end in micrometres, > z_min_um"),
    ("density.z_points", "axial samples, 5 to 2001"),
    ("density.min_thz", "axial-map lower frequency in THz, > 0"),
    ("density.max_thz", "axial-map upper frequency in THz, > min_thz"),
    ("density.omega_points", "axial-map frequency samples, 5 to 2001"),
    ("sweep.min_fs", "shortest probe duration in femtoseconds, > 0"),
    ("sweep.max_fs", "longest probe duration in femtoseconds, > min_fs"),
    ("sweep.points", "number of sweep durations, 2 to 2001"),
    ("sweep.mapping", "one of: inverse, scaled"),
    (
        "sweep.scale_factor",
        "bandwidth scale factor, > 0 (mapping = scaled)",
    ),
];

fn key_help(key: &str) -> Option<&'static str> {
    KNOWN_KEYS.iter().find(|(k, _)| *k == key).map(|(_, h)| *h)
}

fn unknown_key(key: &str, source_name: &str) -> ConfigError {
    let section = key.split('.').next().unwrap_or("");
    let mut peers = String::new();
    for (k, _) in KNOWN_KEYS {
        if k.split('.').next() == Some(section) && *k != "preset" {
            if !peers.is_empty() {
                peers.push_str(", ");
            }
            peers.push_str(k);
        }
    }
    let hint = if peers.is_empty() {
        String::new()
    } else {
        format!("; known keys in this section: {peers}")
    };
    ConfigError::UnknownKey {
        key: key.to_string(),
        source_name: source_name.to_string(),
        hint,
    }
}

/// Parse one INI-ish source into ordered `(dotted key, value)` pairs.
///
/// Lines are `key = value` under `[section]` headers; `#` starts a
/// full-line comment; blank lines are skipped.  Only `preset` may appear
/// before the first section header.  Duplicates within one source are
/// rejected.
fn parse_source(text: &str, source_name: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let syntax = |line: usize, reason: String| ConfigError::Syntax {
        source_name: source_name.to_string(),
        line,
        reason,
    };
    let mut section = String::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(syntax(lineno, format!("unterminated section header '{line}'")));
            };
            let name = name.trim();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            {
                return Err(syntax(
                    lineno,
                    format!("section names are lowercase words, got '[{name}]'"),
                ));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(syntax(lineno, format!("expected 'key = value', got '{line}'")));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(lineno, format!("invalid key name '{key}'")));
        }
        if value.is_empty() {
            return Err(syntax(lineno, format!("key '{key}' has an empty value")));
        }
        let dotted = if section.is_empty() {
            if key != "preset" {
                return Err(syntax(
                    lineno,
                    format!("key '{key}' appears before any [section]; only 'preset' may"),
                ));
            }
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if pairs.iter().any(|(k, _)| *k == dotted) {
            return Err(ConfigError::DuplicateKey {
                key: dotted,
                source_name: source_name.to_string(),
            });
        }
        pairs.push((dotted, value.to_string()));
    }
    Ok(pairs)
}

/// Text of a shipped preset data file, if the name matches one.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "riek2015" => Some(include_str!("../presets/riek2015.cfg")),
        "benea2019" => Some(include_str!("../presets/benea2019.cfg")),
        _ => None,
    }
}

/// Frequency grid specification resolved from the `[grid]` section.
#[derive(Clone, Copy, Debug)]
pub enum GridScale {
    Log,
    Linear,
}

/// Delay-scan window: symmetric `±max_delay` sampled at an odd number of
/// points so the zero-delay sample exists exactly.
#[derive(Clone, Copy, Debug)]
pub struct ScanSpec {
    /// Half-width of the delay window, s.
    pub max_delay: f64,
    /// Number of delay samples (odd).
    pub points: usize,
}

/// Transverse (z = 0 plane) density-map request.
#[derive(Clone, Copy, Debug)]
pub struct XyMapSpec {
    /// Sampled-field angular frequency, rad/s.
    pub omega: f64,
    /// Half-extent of the square map, m.
    pub extent: f64,
    /// Samples per axis.
    pub points: usize,
}

/// Axial (on-axis z–Ω plane) density-map request.
#[derive(Clone, Copy, Debug)]
pub struct ZOmegaMapSpec {
    /// Axial range, m.
    pub z_min: f64,
    pub z_max: f64,
    pub z_points: usize,
    /// Frequency range, rad/s.
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
}

/// Which density maps to compute.
#[derive(Clone, Copy, Debug, Default)]
pub struct DensitySpec {
    pub xy: Option<XyMapSpec>,
    pub zomega: Option<ZOmegaMapSpec>,
}

/// Duration-sweep request: the durations and the Δt → Δω mapping.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    /// Probe durations, s, increasing.
    pub durations: Vec<f64>,
    pub mapping: DurationMapping,
}

/// A fully layered run configuration.
///
/// Holds the effective key–value map after preset, config file, and
/// `--set` overrides; typed accessors validate and convert on demand so a
/// command only requires the keys it actually uses.
#[derive(Clone, Debug)]
pub struct RunConfig {
    keys: BTreeMap<String, String>,
    /// Name of the base preset (`"custom"` when none).
    pub preset: String,
    /// `--set` style overrides, in application order, for output headers.
    pub overrides: Vec<(String, String)>,
    /// Directory of the config file, for resolving `*_file` keys.
    base_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Layer a preset, an optional config file, and `--set` overrides.
    pub fn load(
        config_path: Option<&Path>,
        preset_flag: Option<&str>,
        sets: &[String],
    ) -> Result<Self, ConfigError> {
        let file_pairs = match config_path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                Some(parse_source(&text, &p.display().to_string())?)
            }
            None => None,
        };

        let file_preset = file_pairs
            .as_ref()
            .and_then(|pairs| pairs.iter().find(|(k, _)| k == "preset"))
            .map(|(_, v)| v.clone());
        let preset = match (preset_flag, file_preset) {
            (Some(a), Some(b)) if a != b => {
                return Err(ConfigError::PresetConflict {
                    flag: a.to_string(),
                    file: b,
                })
            }
            (Some(a), _) => a.to_string(),
            (None, Some(b)) => b,
            (None, None) => "custom".to_string(),
        };

        let mut keys = BTreeMap::new();
        if preset != "custom" {
            let text = preset_text(&preset).ok_or_else(|| ConfigError::UnknownPreset {
                name: preset.clone(),
            })?;
            for (k, v) in parse_source(text, &format!("preset {preset}"))? {
                keys.insert(k, v);
            }
        }

        if let Some(pairs) = file_pairs {
            let source_name = config_path.unwrap().display().to_string();
            for (k, v) in pairs {
                if k == "preset" {
                    continue;
                }
                if key_help(&k).is_none() {
                    return Err(unknown_key(&k, &source_name));
                }
                keys.insert(k, v);
            }
        }

        let mut overrides = Vec::new();
        for arg in sets {
            let Some((k, v)) = arg.split_once('=') else {
                return Err(ConfigError::MalformedSet { arg: arg.clone() });
            };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k == "preset" {
                return Err(ConfigError::InvalidValue {
                    key: k,
                    value: v,
                    reason: "select presets with --preset, not --set".to_string(),
                });
            }
            if key_help(&k).is_none() {
                return Err(unknown_key(&k, "--set"));
            }
            if v.is_empty() {
                return Err(ConfigError::MalformedSet { arg: arg.clone() });
            }
            keys.insert(k.clone(), v.clone());
            overrides.push((k, v));
        }

        Ok(RunConfig {
            keys,
            preset,
            overrides,
            base_dir: config_path.and_then(|p| p.parent().map(Path::to_path_buf)),
        })
    }

    /// Load a shipped preset with no file or overrides.
    pub fn from_preset(name: &str) -> Result<Self, ConfigError> {
        RunConfig::load(None, Some(name), &[])
    }

    /// The effective key map, for reproducibility headers.
    pub fn effective_keys(&self) -> &BTreeMap<String, String> {
        &self.keys
    }

    /// Apply one more override (used by the CLI for `--out`).
    pub fn push_override(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if key_help(key).is_none() {
            return Err(unknown_key(key, "--set"));
        }
        self.keys.insert(key.to_string(), value.to_string());
        self.overrides.push((key.to_string(), value.to_string()));
        Ok(())
    }

    fn require(&self, key: &'static str) -> Result<&str, ConfigError> {
        match self.keys.get(key) {
            Some(v) => Ok(v.as_str()),
            None => Err(ConfigError::MissingKey {
                key: key.to_string(),
                expected: key_help(key).unwrap_or("see the config module schema"),
            }),
        }
    }

    fn bad(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            key: key.to_string(),
            value: self.keys.get(key).cloned().unwrap_or_default(),
            reason: reason.into(),
        }
    }

    fn f64_key(&self, key: &'static str) -> Result<f64, ConfigError> {
        let raw = self.require(key)?;
        let v: f64 = raw
            .parse()
            .map_err(|_| self.bad(key, "not a number"))?;
        if !v.is_finite() {
            return Err(self.bad(key, "must be finite"));
        }
        Ok(v)
    }

    fn f64_pos(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.f64_key(key)?;
        if v <= 0.0 {
            return Err(self.bad(key, "must be > 0"));
        }
        Ok(v)
    }

    fn f64_nonneg(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.f64_key(key)?;
        if v < 0.0 {
            return Err(self.bad(key, "must be >= 0"));
        }
        Ok(v)
    }

    fn rel_tol(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.f64_pos(key)?;
        if v > 0.1 {
            return Err(self.bad(key, "relative tolerances above 0.1 are meaningless"));
        }
        Ok(v)
    }

    fn usize_key(&self, key: &'static str, min: usize, max: usize) -> Result<usize, ConfigError> {
        let raw = self.require(key)?;
        let v: usize = raw
            .parse()
            .map_err(|_| self.bad(key, "not a whole number"))?;
        if v < min || v > max {
            return Err(self.bad(key, format!("must be between {min} and {max}")));
        }
        Ok(v)
    }

    fn on_off(&self, key: &'static str) -> Result<bool, ConfigError> {
        match self.require(key)? {
            "on" => Ok(true),
            "off" => Ok(false),
            _ => Err(self.bad(key, "must be 'on' or 'off'")),
        }
    }

    fn list(&self, key: &'static str) -> Result<Vec<&str>, ConfigError> {
        let items: Vec<&str> = self
            .require(key)?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(self.bad(key, "list is empty"));
        }
        Ok(items)
    }

    fn read_aux_file(&self, key: &'static str) -> Result<String, ConfigError> {
        let rel = Path::new(self.require(key)?);
        let path = match (&self.base_dir, rel.is_relative()) {
            (Some(base), true) => base.join(rel),
            _ => rel.to_path_buf(),
        };
        std::fs::read_to_string(&path).map_err(|source| ConfigError::Io { path, source })
    }

    /// Build the physics-level experiment description.
    pub fn experiment(&self) -> Result<ExperimentConfig, ConfigError> {
        let model_err = |e: &dyn std::fmt::Display| ConfigError::Model(e.to_string());

        let sellmeier = SellmeierModel::new(
            self.f64_pos("laser.sellmeier_a")?,
            self.f64_nonneg("laser.sellmeier_b")?,
            self.f64_pos("laser.sellmeier_c_um2")?,
        );
        let omega_c = omega_from_thz(self.f64_pos("laser.center_thz")?);

        let shape = match self.require("laser.pulse_shape")? {
            "rect" => PulseShape::Rectangular {
                omega_c,
                delta_omega: omega_from_thz(self.f64_pos("laser.bandwidth_thz")?),
            },
            "gaussian" => PulseShape::Gaussian {
                omega_c,
                delta_t: self.f64_pos("laser.duration_fs")? * 1e-15,
            },
            "table" => {
                let text = self.read_aux_file("laser.spectrum_file")?;
                PulseShape::Tabulated(
                    TabulatedSpectrum::from_csv_text(&text).map_err(|e| model_err(&e))?,
                )
            }
            _ => return Err(self.bad("laser.pulse_shape", "must be rect, gaussian, or table")),
        };
        let pulse = PulseSpectrum::new(
            shape,
            self.f64_pos("laser.photon_number")?,
            self.f64_pos("laser.waist_um")? * 1e-6,
        )
        .map_err(|e| model_err(&e))?;

        let index_model = match self.require("thz.model")? {
            "phonon" => IndexModel::Phonon(PhononResonanceModel {
                eps_inf: self.f64_pos("thz.eps_inf")?,
                omega_to: omega_from_thz(self.f64_pos("thz.to_thz")?),
                omega_lo: omega_from_thz(self.f64_pos("thz.lo_thz")?),
                gamma: omega_from_thz(self.f64_nonneg("thz.gamma_thz")?),
                absorption: self.on_off("thz.absorption")?,
            }),
            "fixed" => IndexModel::Fixed(Complex64::new(
                self.f64_pos("thz.n_re")?,
                self.f64_nonneg("thz.n_im")?,
            )),
            "table" => {
                let text = self.read_aux_file("thz.index_file")?;
                IndexModel::Tabulated(
                    TabulatedIndex::from_csv_text(&text).map_err(|e| model_err(&e))?,
                )
            }
            _ => return Err(self.bad("thz.model", "must be phonon, fixed, or table")),
        };
        let scale = match self.keys.get("thz.absorption_scale") {
            Some(_) => self.f64_nonneg("thz.absorption_scale")?,
            None => 1.0,
        };
        let thz_index = ThzIndex::with_absorption_scale(index_model, scale);

        let chi2 = match self.require("chi2.model")? {
            "constant" => Chi2Model::Constant(self.f64_pos("chi2.value_c_per_v2")?),
            "dispersive" => {
                let n_wc = sellmeier.index(omega_c).map_err(|e| model_err(&e))?;
                let denominator = match self.require("chi2.denominator")? {
                    "resonant" => Chi2Denominator::Resonant,
                    "as-printed" => Chi2Denominator::AsPrinted,
                    _ => {
                        return Err(
                            self.bad("chi2.denominator", "must be resonant or as-printed")
                        )
                    }
                };
                Chi2Model::dispersive(
                    n_wc,
                    self.f64_pos("chi2.r41_m_per_v")?,
                    self.f64_key("chi2.c0")?,
                    omega_from_thz(self.f64_pos("chi2.resonance_thz")?),
                    omega_from_thz(self.f64_nonneg("chi2.gamma_thz")?),
                    denominator,
                )
            }
            _ => return Err(self.bad("chi2.model", "must be constant or dispersive")),
        };

        let mut cfg = ExperimentConfig::new(
            self.f64_pos("crystal.length_um")? * 1e-6,
            self.f64_nonneg("crystal.temperature_k")?,
            sellmeier,
            thz_index,
            chi2,
            pulse,
        )
        .map_err(|e| model_err(&e))?;
        cfg.quadrature = QuadratureSettings {
            full_inner_rel_tol: self.rel_tol("quadrature.full_inner_rel_tol")?,
            full_outer_rel_tol: self.rel_tol("quadrature.full_outer_rel_tol")?,
        };
        Ok(cfg)
    }

    /// The frequency grid, rad/s.
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let min = self.f64_pos("grid.min_thz")?;
        let max = self.f64_pos("grid.max_thz")?;
        if max <= min {
            return Err(self.bad("grid.max_thz", "must exceed grid.min_thz"));
        }
        let points = self.usize_key("grid.points", 5, 100_000)?;
        let (a, b) = (omega_from_thz(min), omega_from_thz(max));
        match self.require("grid.scale")? {
            "log" => Ok(log_grid(a, b, points)),
            "linear" => Ok(linear_grid(a, b, points)),
            _ => Err(self.bad("grid.scale", "must be log or linear")),
        }
    }

    /// The signal components to evaluate, in the configured order.
    pub fn components(&self) -> Result<Vec<SignalComponent>, ConfigError> {
        let mut out = Vec::new();
        for item in self.list("components.list")? {
            let c: SignalComponent = item
                .parse()
                .map_err(|e: String| self.bad("components.list", e))?;
            if out.contains(&c) {
                return Err(self.bad("components.list", format!("component '{c}' repeats")));
            }
            out.push(c);
        }
        Ok(out)
    }

    pub fn output_dir(&self) -> Result<PathBuf, ConfigError> {
        Ok(PathBuf::from(self.require("output.dir")?))
    }

    pub fn variance_rel_tol(&self) -> Result<f64, ConfigError> {
        self.rel_tol("quadrature.variance_rel_tol")
    }

    pub fn scan_spec(&self) -> Result<ScanSpec, ConfigError> {
        let points = self.usize_key("scan.points", 5, 100_001)?;
        if points % 2 == 0 {
            return Err(self.bad(
                "scan.points",
                "must be odd so the zero-delay sample exists",
            ));
        }
        Ok(ScanSpec {
            max_delay: self.f64_pos("scan.max_delay_fs")? * 1e-15,
            points,
        })
    }

    pub fn density_spec(&self) -> Result<DensitySpec, ConfigError> {
        let mut spec = DensitySpec::default();
        for item in self.list("density.maps")? {
            match item {
                "xy" if spec.xy.is_none() => {
                    spec.xy = Some(XyMapSpec {
                        omega: omega_from_thz(self.f64_pos("density.xy_freq_thz")?),
                        extent: self.f64_pos("density.xy_extent_um")? * 1e-6,
                        points: self.usize_key("density.xy_points", 5, 2001)?,
                    });
                }
                "zomega" if spec.zomega.is_none() => {
                    let z_min = self.f64_nonneg("density.z_min_um")? * 1e-6;
                    let z_max = self.f64_pos("density.z_max_um")? * 1e-6;
                    if z_max <= z_min {
                        return Err(self.bad("density.z_max_um", "must exceed density.z_min_um"));
                    }
                    let omega_min = omega_from_thz(self.f64_pos("density.min_thz")?);
                    let omega_max = omega_from_thz(self.f64_pos("density.max_thz")?);
                    if omega_max <= omega_min {
                        return Err(self.bad("density.max_thz", "must exceed density.min_thz"));
                    }
                    spec.zomega = Some(ZOmegaMapSpec {
                        z_min,
                        z_max,
                        z_points: self.usize_key("density.z_points", 5, 2001)?,
                        omega_min,
                        omega_max,
                        omega_points: self.usize_key("density.omega_points", 5, 2001)?,
                    });
                }
                "xy" | "zomega" => {
                    return Err(self.bad("density.maps", format!("map '{item}' repeats")))
                }
                _ => return Err(self.bad("density.maps", format!("unknown map '{item}'"))),
            }
        }
        Ok(spec)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let min = self.f64_pos("sweep.min_fs")? * 1e-15;
        let max = self.f64_pos("sweep.max_fs")? * 1e-15;
        if max <= min {
            return Err(self.bad("sweep.max_fs", "must exceed sweep.min_fs"));
        }
        let points = self.usize_key("sweep.points", 2, 2001)?;
        let mapping = match self.require("sweep.mapping")? {
            "inverse" => DurationMapping::InverseDuration,
            "scaled" => DurationMapping::Scaled(self.f64_pos("sweep.scale_factor")?),
            _ => return Err(self.bad("sweep.mapping", "must be inverse or scaled")),
        };
        Ok(SweepSpec {
            durations: log_grid(min, max, points),
            mapping,
        })
    }

    /// One-line, deterministic description of the layered sources, for
    /// output headers and logs.
    pub fn describe(&self) -> String {
        let mut s = format!("preset {0}", self.preset);
        if !self.overrides.is_empty() {
            let _ = write!(s, " with {} override(s)", self.overrides.len());
        }
        s
    }
}
