//! Deterministic CSV emission for the run operations.
//!
//! Every file starts with a commented metadata block that pins down how it
//! was produced — tool version, command, preset, command-line overrides,
//! and the complete effective configuration — followed by one plain column
//! header line and the data rows.  Floats are always written as 12-digit
//! scientific notation and map iteration is ordered, so identical
//! configuration and version produce byte-identical files.
//!
//! ```text
//! # eosvac 0.1.0
//! # command = spectrum
//! # preset = riek2015
//! # override = crystal.length_um=14.0
//! # cfg.chi2.model = constant
//! # ...
//! freq_thz,s2,err,component,s2_over_n2,s2_over_sqrt_c
//! 5.000000000000e-2,...
//! ```

use std::collections::BTreeMap;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::RunConfig;
use crate::constants::thz_from_omega;
use crate::signal::{DensityMaps, DurationPoint};

/// Tool name and version stamped into every header.
pub const TOOL: &str = concat!("eosvac ", env!("CARGO_PKG_VERSION"));

/// Fixed file representation of a float: 12-digit scientific notation,
/// `nan` for undefined entries.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.12e}")
    }
}

/// The commented reproducibility block at the top of every output file.
#[derive(Clone, Debug)]
pub struct Metadata {
    command: String,
    preset: String,
    overrides: Vec<(String, String)>,
    keys: BTreeMap<String, String>,
    extra: Vec<(String, String)>,
}

impl Metadata {
    /// Capture the effective configuration for one command.
    pub fn new(command: &str, rc: &RunConfig) -> Self {
        Metadata {
            command: command.to_string(),
            preset: rc.preset.clone(),
            overrides: rc.overrides.clone(),
            keys: rc.effective_keys().clone(),
            extra: Vec::new(),
        }
    }

    /// Append a command-specific `# key = value` line (kept in push order,
    /// after the configuration dump).
    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.extra.push((key.to_string(), value.into()));
    }

    pub fn push_float(&mut self, key: &str, value: f64) {
        self.push(key, fmt_float(value));
    }

    fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# {TOOL}")?;
        writeln!(w, "# command = {}", self.command)?;
        writeln!(w, "# preset = {}", self.preset)?;
        for (k, v) in &self.overrides {
            writeln!(w, "# override = {k}={v}")?;
        }
        for (k, v) in &self.keys {
            writeln!(w, "# cfg.{k} = {v}")?;
        }
        for (k, v) in &self.extra {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

fn open(path: &Path) -> io::Result<BufWriter<std::fs::File>> {
    Ok(BufWriter::new(std::fs::File::create(path)?))
}

/// One spectrum row: the density with its quadrature error estimate and
/// the two figure normalisations (by squared photon number and by the
/// coherent-amplitude scale √C).
#[derive(Clone, Copy, Debug)]
pub struct SpectrumRow {
    pub freq_thz: f64,
    pub s2: f64,
    pub err: f64,
    pub component: &'static str,
    pub s2_over_n2: f64,
    pub s2_over_sqrt_c: f64,
}

pub fn write_spectrum(path: &Path, meta: &Metadata, rows: &[SpectrumRow]) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "freq_thz,s2,err,component,s2_over_n2,s2_over_sqrt_c")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_float(r.freq_thz),
            fmt_float(r.s2),
            fmt_float(r.err),
            r.component,
            fmt_float(r.s2_over_n2),
            fmt_float(r.s2_over_sqrt_c),
        )?;
    }
    w.flush()
}

/// One integrated variance with its ratio against the full evaluator
/// (`nan` when the run did not include the full component).
#[derive(Clone, Copy, Debug)]
pub struct VarianceRow {
    pub component: &'static str,
    pub variance: f64,
    pub ratio_to_full: f64,
}

pub fn write_variance(path: &Path, meta: &Metadata, rows: &[VarianceRow]) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "component,variance,ratio_to_full")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{}",
            r.component,
            fmt_float(r.variance),
            fmt_float(r.ratio_to_full),
        )?;
    }
    w.flush()
}

/// Write a delay scan in the same `delay_fs,s2` format the ingest command
/// reads, so synthesized scans round-trip through the file layer.
pub fn write_scan(
    path: &Path,
    meta: &Metadata,
    delays_s: &[f64],
    values: &[f64],
) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "delay_fs,s2")?;
    for (&d, &v) in delays_s.iter().zip(values) {
        writeln!(w, "{},{}", fmt_float(d * 1e15), fmt_float(v))?;
    }
    w.flush()
}

/// One inverted-spectrum bin next to the direct model evaluation at the
/// same frequency, with their difference relative to the direct peak.
#[derive(Clone, Copy, Debug)]
pub struct InvertedRow {
    pub freq_thz: f64,
    pub s2_inverted: f64,
    pub s2_direct: f64,
    pub residual_over_peak: f64,
}

pub fn write_inverted(path: &Path, meta: &Metadata, rows: &[InvertedRow]) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "freq_thz,s2_inverted,s2_direct,residual_over_peak")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_float(r.freq_thz),
            fmt_float(r.s2_inverted),
            fmt_float(r.s2_direct),
            fmt_float(r.residual_over_peak),
        )?;
    }
    w.flush()
}

/// Transverse map: `x_um,y_um,filter,correlation,density`, rows in x-major
/// order matching [`DensityMaps::idx`].
pub fn write_density_xy(path: &Path, meta: &Metadata, maps: &DensityMaps) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "x_um,y_um,filter,correlation,density")?;
    write_density_rows(&mut w, maps, |x| x * 1e6, |y| y * 1e6)?;
    w.flush()
}

/// Axial map: `z_um,freq_thz,filter,correlation,density`, rows in z-major
/// order matching [`DensityMaps::idx`].
pub fn write_density_zomega(path: &Path, meta: &Metadata, maps: &DensityMaps) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "z_um,freq_thz,filter,correlation,density")?;
    write_density_rows(&mut w, maps, |z| z * 1e6, thz_from_omega)?;
    w.flush()
}

fn write_density_rows(
    w: &mut impl Write,
    maps: &DensityMaps,
    row_unit: impl Fn(f64) -> f64,
    col_unit: impl Fn(f64) -> f64,
) -> io::Result<()> {
    for (i, &r) in maps.rows.iter().enumerate() {
        for (j, &c) in maps.cols.iter().enumerate() {
            let k = maps.idx(i, j);
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_float(row_unit(r)),
                fmt_float(col_unit(c)),
                fmt_float(maps.filter[k]),
                fmt_float(maps.correlation[k]),
                fmt_float(maps.density[k]),
            )?;
        }
    }
    Ok(())
}

/// Duration sweep: one row per probe duration with the integrated variance
/// and its longitudinal/transverse split.
pub fn write_sweep(path: &Path, meta: &Metadata, points: &[DurationPoint]) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(
        w,
        "delta_t_fs,variance_total,variance_longitudinal,variance_transverse"
    )?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_float(p.delta_t * 1e15),
            fmt_float(p.variance_total),
            fmt_float(p.variance_longitudinal),
            fmt_float(p.variance_transverse),
        )?;
    }
    w.flush()
}

/// One bin of an ingested measurement inverted to the spectral domain,
/// next to the model prediction at the same frequency.
#[derive(Clone, Copy, Debug)]
pub struct IngestRow {
    pub freq_thz: f64,
    pub s2_measured: f64,
    pub s2_model: f64,
}

pub fn write_ingest(path: &Path, meta: &Metadata, rows: &[IngestRow]) -> io::Result<()> {
    let mut w = open(path)?;
    meta.write_to(&mut w)?;
    writeln!(w, "freq_thz,s2_measured,s2_model")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{}",
            fmt_float(r.freq_thz),
            fmt_float(r.s2_measured),
            fmt_float(r.s2_model),
        )?;
    }
    w.flush()
}
