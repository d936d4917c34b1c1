//! Crystal optics: probe-band and THz-band refractive index models, the
//! effective second-order susceptibility, and thermal photon occupation.
//!
//! The probe band is covered by a two-term Sellmeier form
//! n²(ω) = A + B λ²/(λ² − C) with λ = 2πc/ω in µm. The THz band uses either
//! a single phonon resonance,
//!
//! ε(Ω) = ε_∞ (1 + (ω_LO² − ω_TO²) / (ω_TO² − Ω² − iγΩ)),
//!
//! with n = √ε on the branch Im n ≥ 0, or a measured table of (n′, α) pairs
//! with Im n = α c / Ω. Disabling absorption keeps γ in ε but returns only
//! Re n, which is the conventional "lossless" reading of the resonance.

use crate::constants::{C, HBAR, KB};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("frequency {omega_thz} THz outside table range [{min_thz}, {max_thz}] THz")]
    OutOfTableRange {
        omega_thz: f64,
        min_thz: f64,
        max_thz: f64,
    },
    #[error("table frequencies must increase strictly (row {row})")]
    NonMonotoneGrid { row: usize },
    #[error("index table needs at least two rows, got {rows}")]
    TableTooShort { rows: usize },
    #[error("phonon resonance is degenerate: γ = 0 exactly at Ω = ω_TO")]
    DegenerateResonance,
    #[error("frequency must be non-negative, got {omega:e} rad/s")]
    NegativeFrequency { omega: f64 },
    #[error("Sellmeier form is singular or invalid at ω = {omega:e} rad/s (λ² ≤ C)")]
    SellmeierOutOfRange { omega: f64 },
    #[error("bad table row {row}: {reason}")]
    BadTableRow { row: usize, reason: String },
}

/// Two-term Sellmeier dispersion for the probe band; coefficients follow
/// the convention n² = A + B λ²/(λ² − C) with λ in µm and C in µm².
#[derive(Clone, Copy, Debug)]
pub struct SellmeierModel {
    pub a: f64,
    pub b: f64,
    pub c_um2: f64,
}

impl SellmeierModel {
    pub const fn new(a: f64, b: f64, c_um2: f64) -> Self {
        SellmeierModel { a, b, c_um2 }
    }

    /// ZnTe in the near infrared (Marple's fit).
    pub const fn znte() -> Self {
        SellmeierModel::new(4.27, 3.01, 0.142)
    }

    #[inline]
    fn lambda_sq_um2(omega: f64) -> f64 {
        let lam_um = C / omega * std::f64::consts::TAU * 1e6;
        lam_um * lam_um
    }

    /// Phase refractive index n(ω).
    pub fn index(&self, omega: f64) -> Result<f64, MaterialError> {
        if omega <= 0.0 {
            return Err(MaterialError::NegativeFrequency { omega });
        }
        let x = Self::lambda_sq_um2(omega);
        if x <= self.c_um2 {
            return Err(MaterialError::SellmeierOutOfRange { omega });
        }
        let n2 = self.a + self.b * x / (x - self.c_um2);
        if n2 <= 0.0 {
            return Err(MaterialError::SellmeierOutOfRange { omega });
        }
        Ok(n2.sqrt())
    }

    /// Group index n_g = c ∂k/∂ω = n + ω ∂n/∂ω.
    ///
    /// With x = λ², d(n²)/dx = −BC/(x − C)² and ω dx/dω = −2x, so
    /// n_g = n + B C x / (n (x − C)²) in closed form.
    pub fn group_index(&self, omega: f64) -> Result<f64, MaterialError> {
        let n = self.index(omega)?;
        let x = Self::lambda_sq_um2(omega);
        let d = x - self.c_um2;
        Ok(n + self.b * self.c_um2 * x / (n * d * d))
    }
}

/// Single phonon-resonance permittivity for the THz band.
#[derive(Clone, Copy, Debug)]
pub struct PhononResonanceModel {
    pub eps_inf: f64,
    /// Transverse optical phonon frequency, rad/s.
    pub omega_to: f64,
    /// Longitudinal optical phonon frequency, rad/s.
    pub omega_lo: f64,
    /// Damping rate, rad/s.
    pub gamma: f64,
    /// When false, only Re n is returned (absorption neglected).
    pub absorption: bool,
}

impl PhononResonanceModel {
    pub fn znte(absorption: bool) -> Self {
        use crate::constants::omega_from_thz;
        PhononResonanceModel {
            eps_inf: 6.7,
            omega_to: omega_from_thz(5.31),
            omega_lo: omega_from_thz(6.18),
            gamma: omega_from_thz(0.09),
            absorption,
        }
    }

    pub fn permittivity(&self, omega: f64) -> Result<Complex64, MaterialError> {
        if omega < 0.0 {
            return Err(MaterialError::NegativeFrequency { omega });
        }
        let den = Complex64::new(
            self.omega_to * self.omega_to - omega * omega,
            -self.gamma * omega,
        );
        if den.norm() == 0.0 {
            return Err(MaterialError::DegenerateResonance);
        }
        let num = self.omega_lo * self.omega_lo - self.omega_to * self.omega_to;
        Ok(self.eps_inf * (1.0 + num / den))
    }

    /// Complex index on the passive branch Im n ≥ 0; real part only when
    /// absorption is disabled.
    pub fn index(&self, omega: f64) -> Result<Complex64, MaterialError> {
        let eps = self.permittivity(omega)?;
        let mut n = eps.sqrt();
        if n.im < 0.0 {
            n = -n;
        }
        if self.absorption {
            Ok(n)
        } else {
            Ok(Complex64::new(n.re, 0.0))
        }
    }
}

/// Measured index table: strictly increasing frequencies with the real
/// index and the power absorption coefficient α (1/m). Queries interpolate
/// n′ and α linearly and never extrapolate; Im n = α c / Ω.
#[derive(Clone, Debug)]
pub struct TabulatedIndex {
    /// Angular frequencies, rad/s, strictly increasing.
    freqs: Vec<f64>,
    n_re: Vec<f64>,
    alpha: Vec<f64>,
}

impl TabulatedIndex {
    /// Build from (frequency in THz, n′, α in 1/m) rows.
    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<Self, MaterialError> {
        if rows.len() < 2 {
            return Err(MaterialError::TableTooShort { rows: rows.len() });
        }
        let mut freqs = Vec::with_capacity(rows.len());
        let mut n_re = Vec::with_capacity(rows.len());
        let mut alpha = Vec::with_capacity(rows.len());
        for (i, &(f_thz, n, a)) in rows.iter().enumerate() {
            if !(f_thz.is_finite() && n.is_finite() && a.is_finite()) || f_thz <= 0.0 {
                return Err(MaterialError::BadTableRow {
                    row: i,
                    reason: format!("non-finite or non-positive entry ({f_thz}, {n}, {a})"),
                });
            }
            if n <= 0.0 || a < 0.0 {
                return Err(MaterialError::BadTableRow {
                    row: i,
                    reason: format!("need n_re > 0 and alpha >= 0, got ({n}, {a})"),
                });
            }
            let w = crate::constants::omega_from_thz(f_thz);
            if let Some(&prev) = freqs.last() {
                if w <= prev {
                    return Err(MaterialError::NonMonotoneGrid { row: i });
                }
            }
            freqs.push(w);
            n_re.push(n);
            alpha.push(a);
        }
        Ok(TabulatedIndex { freqs, n_re, alpha })
    }

    /// Parse the `freq_thz,n_re,alpha_per_m` CSV format. Blank lines and
    /// `#` comments are skipped; a leading header row is recognised by its
    /// non-numeric first field.
    pub fn from_csv_text(text: &str) -> Result<Self, MaterialError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields[0].parse::<f64>().is_err() && rows.is_empty() {
                continue; // header row
            }
            if fields.len() != 3 {
                return Err(MaterialError::BadTableRow {
                    row: lineno,
                    reason: format!("expected 3 comma-separated fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64, MaterialError> {
                s.parse().map_err(|_| MaterialError::BadTableRow {
                    row: lineno,
                    reason: format!("cannot parse '{s}' as a number"),
                })
            };
            rows.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        }
        Self::from_rows(&rows)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.freqs[0], *self.freqs.last().unwrap())
    }

    fn interp(&self, xs: &[f64], omega: f64) -> f64 {
        // Binary search for the bracketing segment; bounds already checked.
        let i = match self
            .freqs
            .binary_search_by(|probe| probe.total_cmp(&omega))
        {
            Ok(i) => return xs[i],
            Err(i) => i,
        };
        let (w0, w1) = (self.freqs[i - 1], self.freqs[i]);
        let t = (omega - w0) / (w1 - w0);
        xs[i - 1] * (1.0 - t) + xs[i] * t
    }

    pub fn index(&self, omega: f64) -> Result<Complex64, MaterialError> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&omega) {
            return Err(MaterialError::OutOfTableRange {
                omega_thz: crate::constants::thz_from_omega(omega),
                min_thz: crate::constants::thz_from_omega(lo),
                max_thz: crate::constants::thz_from_omega(hi),
            });
        }
        let n = self.interp(&self.n_re, omega);
        let a = self.interp(&self.alpha, omega);
        Ok(Complex64::new(n, a * C / omega))
    }
}

/// Any complex-index provider for a homogeneous medium.
#[derive(Clone, Debug)]
pub enum IndexModel {
    /// Frequency-independent index (useful for controlled comparisons).
    Fixed(Complex64),
    Sellmeier(SellmeierModel),
    Phonon(PhononResonanceModel),
    Tabulated(TabulatedIndex),
}

impl IndexModel {
    pub fn index(&self, omega: f64) -> Result<Complex64, MaterialError> {
        match self {
            IndexModel::Fixed(n) => Ok(*n),
            IndexModel::Sellmeier(m) => m.index(omega).map(|n| Complex64::new(n, 0.0)),
            IndexModel::Phonon(m) => m.index(omega),
            IndexModel::Tabulated(t) => t.index(omega),
        }
    }
}

/// THz-band index with a global scale on its imaginary part, used to study
/// the lossless limit without touching the real dispersion.
#[derive(Clone, Debug)]
pub struct ThzIndex {
    pub model: IndexModel,
    pub absorption_scale: f64,
}

impl ThzIndex {
    pub fn new(model: IndexModel) -> Self {
        ThzIndex {
            model,
            absorption_scale: 1.0,
        }
    }

    pub fn with_absorption_scale(model: IndexModel, scale: f64) -> Self {
        ThzIndex {
            model,
            absorption_scale: scale,
        }
    }

    pub fn index(&self, omega: f64) -> Result<Complex64, MaterialError> {
        let n = self.model.index(omega)?;
        Ok(Complex64::new(n.re, n.im * self.absorption_scale))
    }
}

/// How the dispersive χ⁽²⁾ resonance denominator is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chi2Denominator {
    /// Faust–Henry form ω_TO²/(ω_TO² − Ω² − iγΩ); dimensionless and equal
    /// to 1 at Ω = 0, so the bracket tends to 1 + C₀ at low frequency.
    Resonant,
    /// The literal ħΩ − iħΩγ denominator. Dimensionally inconsistent, kept
    /// only so the two readings can be compared.
    AsPrinted,
}

/// Effective second-order susceptibility χ⁽²⁾(Ω) of the detection crystal.
#[derive(Clone, Copy, Debug)]
pub enum Chi2Model {
    /// Frequency-flat value in C/V².
    Constant(f64),
    Dispersive {
        /// n⁴(ω_c) ε₀ r₄₁ / 2, precomputed at construction.
        prefactor: f64,
        c0: f64,
        /// rad/s.
        omega_to: f64,
        /// rad/s.
        gamma: f64,
        denominator: Chi2Denominator,
    },
}

impl Chi2Model {
    /// Dispersive model; `n_carrier` is the probe index at the carrier.
    pub fn dispersive(
        n_carrier: f64,
        r41: f64,
        c0: f64,
        omega_to: f64,
        gamma: f64,
        denominator: Chi2Denominator,
    ) -> Self {
        let prefactor = n_carrier.powi(4) * crate::constants::EPS0 / 2.0 * r41;
        Chi2Model::Dispersive {
            prefactor,
            c0,
            omega_to,
            gamma,
            denominator,
        }
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        match *self {
            Chi2Model::Constant(v) => Complex64::new(v, 0.0),
            Chi2Model::Dispersive {
                prefactor,
                c0,
                omega_to,
                gamma,
                denominator,
            } => {
                let bracket = match denominator {
                    Chi2Denominator::Resonant => {
                        let den = Complex64::new(
                            omega_to * omega_to - omega * omega,
                            -gamma * omega,
                        );
                        1.0 + c0 * omega_to * omega_to / den
                    }
                    Chi2Denominator::AsPrinted => {
                        let den = Complex64::new(HBAR * omega, -HBAR * omega * gamma);
                        1.0 + c0 * (HBAR * omega_to) * (HBAR * omega_to) / den
                    }
                };
                prefactor * bracket
            }
        }
    }
}

/// Bose–Einstein occupation n_T(Ω) = 1/(e^{ħΩ/k_BT} − 1); zero at T = 0
/// and for non-positive frequency.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 || omega <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (KB * temperature);
    if x > 700.0 {
        return 0.0;
    }
    1.0 / x.exp_m1()
}
