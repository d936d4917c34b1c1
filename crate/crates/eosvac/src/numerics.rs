//! Adaptive quadrature and the few special functions the field integrals need.
//!
//! The integrator is a 15-point Kronrod / 7-point Gauss rule with adaptive
//! bisection of the worst panel, in the spirit of QUADPACK's QAG. It is
//! generic over the sample type so the same driver serves real spectral
//! densities and complex Weyl-plane integrands. Semi-infinite ranges are
//! folded onto [0, 1) with the exponentially stretched substitution
//! x = a − ln(1 − t), which turns exponentially decaying tails into smooth,
//! rapidly vanishing integrands.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    /// The integrand produced NaN or ±∞; the abscissa is reported so the
    /// offending region of a nested integral can be located.
    #[error("integrand returned a non-finite value at x = {abscissa:e}")]
    NonFiniteSample { abscissa: f64 },
    #[error("degenerate integration interval [{a:e}, {b:e}]")]
    BadInterval { a: f64, b: f64 },
}

/// Tolerances and budget for one adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Target relative error of the panel-sum estimate.
    pub rel_tol: f64,
    /// Absolute error floor; protects against endless refinement of
    /// integrals whose true value is (numerically) zero.
    pub abs_floor: f64,
    /// Maximum number of panel bisections before giving up and returning
    /// the best estimate with `converged = false`.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-6,
            abs_floor: 1e-300,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration.
///
/// `converged == false` means the subdivision budget ran out before the
/// error bound met the tolerance; `value` is still the best available
/// estimate and `error` its (conservative) bound.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Sample type a quadrature rule can accumulate: real or complex values.
pub trait Sample: Copy + Default + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> {
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Sample for f64 {
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn norm(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Sample for Complex64 {
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and the matching
// Kronrod and embedded 7-point Gauss weights, as tabulated in QUADPACK.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// QUADPACK-style damped error estimate for one panel.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

// BinaryHeap ordering: worst panel first.
impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<T: Sample, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
) -> Result<(Panel<T>, usize), NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let sample = |x: f64| -> Result<T, NumericsError> {
        let v = f(x);
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteSample { abscissa: x });
        }
        Ok(v)
    };

    let fc = sample(center)?;
    let mut resk = fc.scale(WGK[7]);
    let mut resg = fc.scale(WG[3]);
    let mut resabs = fc.norm() * WGK[7];
    let mut pairs = [(fc, fc); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = sample(center - dx)?;
        let f2 = sample(center + dx)?;
        pairs[j] = (f1, f2);
        resk = resk + (f1 + f2).scale(WGK[j]);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg = resg + (f1 + f2).scale(WG[j / 2]);
        }
    }

    let reskh = resk.scale(0.5);
    let mut resasc = WGK[7] * (fc - reskh).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((pairs[j].0 - reskh).norm() + (pairs[j].1 - reskh).norm());
    }

    let value = resk.scale(half);
    let raw_err = (resk - resg).norm() * half.abs();
    let error = rescale_error(raw_err, resabs * half.abs(), resasc * half.abs());
    Ok((Panel { a, b, value, error }, 15))
}

/// Adaptively integrate `f` over the finite interval `[a, b]`.
pub fn integrate_1d<T: Sample, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature<T>, NumericsError> {
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(NumericsError::BadInterval { a, b });
    }

    let (first, mut evaluations) = gauss_kronrod(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    let mut subdivisions = 0;
    loop {
        let mut total = T::default();
        let mut err_sum = 0.0;
        for p in heap.iter() {
            total = total + p.value;
            err_sum += p.error;
        }
        let bound = (spec.rel_tol * total.norm()).max(spec.abs_floor);
        if err_sum <= bound {
            return Ok(Quadrature {
                value: total,
                error: err_sum,
                converged: true,
                evaluations,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Ok(Quadrature {
                value: total,
                error: err_sum,
                converged: false,
                evaluations,
            });
        }

        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine precision; keep its estimate.
            let mut total = worst.value;
            let mut err_sum = worst.error;
            for p in heap.iter() {
                total = total + p.value;
                err_sum += p.error;
            }
            return Ok(Quadrature {
                value: total,
                error: err_sum,
                converged: err_sum <= (spec.rel_tol * total.norm()).max(spec.abs_floor),
                evaluations,
            });
        }
        let (left, n1) = gauss_kronrod(&f, worst.a, mid)?;
        let (right, n2) = gauss_kronrod(&f, mid, worst.b)?;
        evaluations += n1 + n2;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

/// Integrate `f` over `[a, ∞)` via the substitution x = a − ln(1 − t).
///
/// The integrand must decay at least exponentially for the transform to be
/// useful; values past the point where 1 − t underflows are treated as zero.
pub fn integrate_1d_to_inf<T: Sample, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature<T>, NumericsError> {
    integrate_1d(
        |t: f64| {
            let u = 1.0 - t;
            if u <= f64::MIN_POSITIVE {
                return T::default();
            }
            f(a - u.ln()).scale(1.0 / u)
        },
        0.0,
        1.0,
        spec,
    )
}

/// Nested 2D quadrature: adaptive outer integral over `[outer_a, outer_b]`,
/// with an adaptive inner integral whose bounds may depend on the outer
/// abscissa. `converged` is the conjunction over the outer rule and every
/// inner integral it sampled.
pub fn integrate_2d_nested<T, F, B>(
    f: F,
    outer_a: f64,
    outer_b: f64,
    inner_bounds: B,
    outer_spec: &QuadratureSpec,
    inner_spec: &QuadratureSpec,
) -> Result<Quadrature<T>, NumericsError>
where
    T: Sample,
    F: Fn(f64, f64) -> T,
    B: Fn(f64) -> (f64, f64),
{
    use std::cell::Cell;
    let inner_ok = Cell::new(true);
    let inner_evals = Cell::new(0usize);
    let failure = Cell::new(None);

    let outer = integrate_1d(
        |x: f64| {
            let (ia, ib) = inner_bounds(x);
            if ia == ib {
                return T::default();
            }
            match integrate_1d(|y| f(x, y), ia, ib, inner_spec) {
                Ok(q) => {
                    if !q.converged {
                        inner_ok.set(false);
                    }
                    inner_evals.set(inner_evals.get() + q.evaluations);
                    q.value
                }
                Err(e) => {
                    failure.set(Some(e));
                    T::default()
                }
            }
        },
        outer_a,
        outer_b,
        outer_spec,
    )?;

    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Quadrature {
        value: outer.value,
        error: outer.error,
        converged: outer.converged && inner_ok.get(),
        evaluations: outer.evaluations + inner_evals.get(),
    })
}

/// sin(x)/x, switching to its Taylor series below |x| = 1e-4 so the
/// removable singularity never costs accuracy.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper incomplete gamma function of order zero,
/// Γ(0, z) = ∫_z^∞ e^{−t} t^{−1} dt (the exponential integral E₁).
///
/// Power series for z ≤ 1, continued fraction beyond; both branches are
/// accurate to machine precision near the crossover.
pub fn upper_incomplete_gamma0(z: f64) -> f64 {
    assert!(z > 0.0, "Γ(0, z) requires z > 0, got {z}");
    if z <= 1.0 {
        e1_series(z)
    } else {
        (-z).exp() * e1_cf(z)
    }
}

/// e^z · Γ(0, z), stable for large z where Γ(0, z) alone underflows.
pub fn upper_incomplete_gamma0_scaled(z: f64) -> f64 {
    assert!(z > 0.0, "Γ(0, z) requires z > 0, got {z}");
    if z <= 1.0 {
        z.exp() * e1_series(z)
    } else {
        e1_cf(z)
    }
}

fn e1_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..=40 {
        term *= -z / k as f64;
        let contribution = -term / k as f64;
        sum += contribution;
        if contribution.abs() < f64::EPSILON * sum.abs().max(1e-30) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() + sum
}

/// Modified Lentz evaluation of the continued fraction for e^z E₁(z).
fn e1_cf(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=200 {
        let a = -(i as f64) * (i as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// Exponentially scaled modified Bessel function e^{−x}·I₀(x) for x ≥ 0.
///
/// Power series below x = 30 (all terms positive, no cancellation),
/// divergent asymptotic expansion truncated at its smallest term beyond.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    bessel_im_scaled(0, x)
}

/// Exponentially scaled modified Bessel function e^{−x}·I₂(x) for x ≥ 0.
pub fn bessel_i2_scaled(x: f64) -> f64 {
    bessel_im_scaled(2, x)
}

fn bessel_im_scaled(m: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "scaled I_{m} requires x ≥ 0, got {x}");
    if x < 30.0 {
        // I_m(x) = Σ_j (x/2)^{2j+m} / (j! (j+m)!)
        let half = 0.5 * x;
        let mut term = 1.0;
        for j in 1..=m {
            term *= half / j as f64;
        }
        let mut sum = term;
        let x2q = half * half;
        for j in 1..200 {
            term *= x2q / (j as f64 * (j + m as usize) as f64);
            sum += term;
            if term < f64::EPSILON * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // e^{−x} I_m(x) ≈ (2πx)^{−1/2} Σ_j (−1)^j Π_{i≤j}(4m² − (2i−1)²) / (j! (8x)^j)
        let mu = 4.0 * (m * m) as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut prev = f64::INFINITY;
        for j in 1..30 {
            let i = (2 * j - 1) as f64;
            term *= -(mu - i * i) / (j as f64 * 8.0 * x);
            if term.abs() >= prev {
                break; // divergent tail reached
            }
            prev = term.abs();
            sum += term;
            if term.abs() < f64::EPSILON * sum.abs() {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Trapezoid rule over a tabulated function; the grid need not be uniform.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "grid/value length mismatch");
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
    }
    acc
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "bad log grid ({lo}, {hi}, {n})");
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` linearly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2, "bad linear grid ({lo}, {hi}, {n})");
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
