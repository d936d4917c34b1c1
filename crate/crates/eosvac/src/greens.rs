//! Dyadic Green's tensor of a homogeneous (bulk) crystal in the Weyl
//! (2+1)-dimensional decomposition, together with its longitudinal and
//! transverse parts.
//!
//! The regular part of the tensor is
//!
//! G(r,r′) = (i/8π²) ∫d²k_∥ (e^{ik_∥·Δr_∥ + ik_z|Δz|}/k_z) Σ_σ e_σ± e_σ±,
//!
//! over s- and p-polarizations with k_z = √(k² − k_∥²), Im k_z ≥ 0, and
//! k = n(ω)ω/c. The longitudinal part replaces the polarization sum by the
//! electrostatic kernel e^{−k_∥|Δz|}[k_∥(ê_∥ê_∥ − ê_zê_z) + i sign(Δz) M]
//! scaled by −1/(2k²). Both carry an additional −δ(z−z′)ê_zê_z/k² contact
//! term that is never evaluated pointwise here; it matters only inside
//! z-integrated signal expressions, where it is carried analytically.
//!
//! All Weyl integrals are reduced to a radial quadrature with the angular
//! factor computed by a refined periodic trapezoid rule (exponentially
//! convergent for these smooth integrands), avoiding Bessel-function edge
//! cases. Mixed-representation kernels at fixed k_∥ are exposed for the
//! projector identity tests of the decomposition.

use crate::materials::{IndexModel, MaterialError, ThzIndex};
use crate::numerics::{
    integrate_1d, integrate_1d_to_inf, NumericsError, QuadratureSpec, Sample,
};
use num_complex::Complex64;
use std::ops::{Add, Sub};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GreensError {
    #[error("quadrature for {what} did not converge (relative error {rel_err:.2e})")]
    QuadratureFailure { what: &'static str, rel_err: f64 },
    #[error("passivity violated: Im k = {imag:e} < 0 at ω = {omega:e} rad/s")]
    BranchViolation { omega: f64, imag: f64 },
    #[error("full complex value requires out-of-plane separation (z ≠ z′); the in-plane imaginary part is available separately")]
    InPlaneFullValue,
    #[error("pointwise value at z = z′ requested; the δ(z−z′) term only exists inside an integral")]
    CoincidenceRequest,
    #[error("imaginary part at z = z′ requires a lossless medium (Im k·|Δr| sets a diverging contact term); got Im n = {im_n:e}")]
    LossyInPlane { im_n: f64 },
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// 3×3 complex tensor with the small amount of algebra the decomposition
/// identities need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor3(pub [[Complex64; 3]; 3]);

impl Tensor3 {
    pub const ZERO: Tensor3 = Tensor3([[Complex64::new(0.0, 0.0); 3]; 3]);

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut t = Tensor3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = f(i, j);
            }
        }
        t
    }

    pub fn xx(&self) -> Complex64 {
        self.0[0][0]
    }

    pub fn cscale(self, c: Complex64) -> Self {
        Tensor3::from_fn(|i, j| self.0[i][j] * c)
    }

    pub fn matmul(self, rhs: Self) -> Self {
        Tensor3::from_fn(|i, j| (0..3).map(|m| self.0[i][m] * rhs.0[m][j]).sum())
    }

    pub fn transpose(self) -> Self {
        Tensor3::from_fn(|i, j| self.0[j][i])
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

impl Default for Tensor3 {
    fn default() -> Self {
        Tensor3::ZERO
    }
}

impl Add for Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: Self) -> Self {
        Tensor3::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl Sub for Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: Self) -> Self {
        Tensor3::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl Sample for Tensor3 {
    fn scale(self, s: f64) -> Self {
        Tensor3::from_fn(|i, j| self.0[i][j] * s)
    }
    fn norm(self) -> f64 {
        self.max_abs()
    }
    fn is_finite(self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn outer(a: [Complex64; 3], b: [Complex64; 3]) -> Tensor3 {
    Tensor3::from_fn(|i, j| a[i] * b[j])
}

/// Homogeneous medium characterized by a complex refractive index.
#[derive(Clone, Debug)]
pub struct BulkMedium {
    pub index: ThzIndex,
}

impl BulkMedium {
    pub fn new(model: IndexModel) -> Self {
        BulkMedium {
            index: ThzIndex::new(model),
        }
    }

    pub fn from_thz_index(index: ThzIndex) -> Self {
        BulkMedium { index }
    }

    /// k(ω) = n(ω)·ω/c on the passive branch.
    pub fn wavenumber(&self, omega: f64) -> Result<Complex64, GreensError> {
        let n = self.index.index(omega)?;
        let k = n * omega / crate::constants::C;
        if k.im < 0.0 {
            return Err(GreensError::BranchViolation { omega, imag: k.im });
        }
        Ok(k)
    }

    fn is_lossless_at(&self, omega: f64) -> Result<bool, GreensError> {
        let k = self.wavenumber(omega)?;
        Ok(k.im <= 1e-13 * k.re.abs())
    }
}

/// One Weyl-decomposition sample: a transverse wavenumber with its
/// longitudinal complement and polarization triples.
#[derive(Clone, Copy, Debug)]
pub struct WeylKernelPoint {
    pub k: Complex64,
    pub k_par: f64,
    /// Unit vector of k_∥ (cos ψ, sin ψ).
    pub dir: [f64; 2],
    pub k_z: Complex64,
}

impl WeylKernelPoint {
    pub fn new(k: Complex64, k_par_vec: [f64; 2]) -> Self {
        let k_par = k_par_vec[0].hypot(k_par_vec[1]);
        let dir = if k_par > 0.0 {
            [k_par_vec[0] / k_par, k_par_vec[1] / k_par]
        } else {
            [1.0, 0.0]
        };
        Self::from_polar(k, k_par, dir)
    }

    pub fn from_angle(k: Complex64, k_par: f64, psi: f64) -> Self {
        Self::from_polar(k, k_par, [psi.cos(), psi.sin()])
    }

    fn from_polar(k: Complex64, k_par: f64, dir: [f64; 2]) -> Self {
        let mut k_z = (k * k - k_par * k_par).sqrt();
        if k_z.im < 0.0 {
            k_z = -k_z;
        }
        WeylKernelPoint { k, k_par, dir, k_z }
    }

    /// s-polarization unit vector; the ratio k_y/k_∥ is stored so the
    /// k_∥ → 0 limit stays regular.
    pub fn e_s(&self) -> [Complex64; 3] {
        let re = |x: f64| Complex64::new(x, 0.0);
        [re(self.dir[1]), re(-self.dir[0]), Complex64::new(0.0, 0.0)]
    }

    /// p-polarization vector; `up` selects the +k_z (z > z′) branch.
    pub fn e_p(&self, up: bool) -> [Complex64; 3] {
        let s = if up { -1.0 } else { 1.0 };
        [
            s * self.dir[0] * self.k_z / self.k,
            s * self.dir[1] * self.k_z / self.k,
            Complex64::new(self.k_par, 0.0) / self.k,
        ]
    }

    /// Σ_σ e_σ± e_σ± without conjugation (analytic continuation in lossy
    /// media, as the decomposition is stated).
    pub fn pol_sum(&self, up: bool) -> Tensor3 {
        let es = self.e_s();
        let ep = self.e_p(up);
        outer(es, es) + outer(ep, ep)
    }
}

/// Refined periodic trapezoid rule on [0, 2π]; exact sample reuse across
/// doublings, exponentially convergent for smooth periodic integrands.
fn periodic_angular<T: Sample>(
    f: impl Fn(f64) -> T,
    min_points: usize,
    rel_tol: f64,
) -> Result<T, GreensError> {
    let tau = std::f64::consts::TAU;
    let mut n = 16usize;
    while n < min_points {
        n *= 2;
    }
    let mut sum = (0..n)
        .map(|j| f(tau * j as f64 / n as f64))
        .fold(T::default(), Add::add);
    loop {
        let odd = (0..n)
            .map(|j| f(tau * (2 * j + 1) as f64 / (2 * n) as f64))
            .fold(T::default(), Add::add);
        let prev = sum.scale(tau / n as f64);
        sum = sum + odd;
        n *= 2;
        let cur = sum.scale(tau / n as f64);
        if (cur - prev).norm() <= rel_tol * cur.norm() + 1e-300 {
            return Ok(cur);
        }
        if n > (1 << 16) {
            return Err(GreensError::QuadratureFailure {
                what: "angular factor",
                rel_err: (cur - prev).norm() / cur.norm().max(f64::MIN_POSITIVE),
            });
        }
    }
}

fn angular_points(bessel_arg: f64) -> usize {
    // Trapezoid rules need slightly more than one point per unit of phase.
    ((1.6 * bessel_arg) as usize + 16).next_power_of_two()
}

struct Separation {
    rho: f64,
    alpha: f64,
    dz: f64,
}

fn separation(r: [f64; 3], rp: [f64; 3]) -> Separation {
    let dx = r[0] - rp[0];
    let dy = r[1] - rp[1];
    Separation {
        rho: dx.hypot(dy),
        alpha: dy.atan2(dx),
        dz: r[2] - rp[2],
    }
}

const ANGULAR_REL_TOL: f64 = 1e-9;
const RADIAL_REL_TOL: f64 = 1e-8;

fn check_converged<T: Sample>(
    q: crate::numerics::Quadrature<T>,
    what: &'static str,
) -> Result<T, GreensError> {
    if !q.converged {
        return Err(GreensError::QuadratureFailure {
            what,
            rel_err: q.error / q.value.norm().max(f64::MIN_POSITIVE),
        });
    }
    Ok(q.value)
}

/// Angular polarization-sum factor A(k_∥) = ∫dψ e^{ik_∥ρcos(ψ−α)} Σ e_σe_σ.
fn pol_angular(
    k: Complex64,
    k_par: f64,
    sep: &Separation,
) -> Result<Tensor3, GreensError> {
    let up = sep.dz >= 0.0;
    periodic_angular(
        |psi| {
            let pt = WeylKernelPoint::from_angle(k, k_par, psi);
            let phase = Complex64::new(0.0, k_par * sep.rho * (psi - sep.alpha).cos()).exp();
            pt.pol_sum(up).cscale(phase)
        },
        angular_points(k_par * sep.rho),
        ANGULAR_REL_TOL,
    )
}

/// Scalar xx-component of the same angular factor, for the imaginary-part
/// path where the rest of the tensor is not needed.
fn pol_angular_xx(
    k: Complex64,
    k_par: f64,
    k_z: Complex64,
    sep: &Separation,
) -> Result<Complex64, GreensError> {
    let kz2_over_k2 = k_z * k_z / (k * k);
    periodic_angular(
        |psi| {
            let (s, c) = psi.sin_cos();
            let phase = Complex64::new(0.0, k_par * sep.rho * (psi - sep.alpha).cos()).exp();
            phase * (s * s + c * c * kz2_over_k2)
        },
        angular_points(k_par * sep.rho),
        ANGULAR_REL_TOL,
    )
}

/// Regular part of the bulk tensor for z ≠ z′, as the Weyl quadrature.
pub fn bulk_green_tensor(
    medium: &BulkMedium,
    r: [f64; 3],
    r_prime: [f64; 3],
    omega: f64,
) -> Result<Tensor3, GreensError> {
    let sep = separation(r, r_prime);
    if sep.dz == 0.0 {
        return Err(GreensError::InPlaneFullValue);
    }
    let k = medium.wavenumber(omega)?;
    let dz = sep.dz.abs();
    let spec = QuadratureSpec::with_rel_tol(RADIAL_REL_TOL);

    let total = if medium.is_lossless_at(omega)? {
        let kr = k.re;
        // Propagating sector, substituting u = k_z so the 1/k_z weight and
        // the branch-point singularity cancel against k_∥ dk_∥ = −k_z dk_z.
        let prop = check_converged(
            integrate_1d(
                |u: f64| {
                    let k_par = (kr * kr - u * u).max(0.0).sqrt();
                    let a = pol_angular(k, k_par, &sep).unwrap_or_else(|_| {
                        Tensor3::from_fn(|_, _| Complex64::new(f64::NAN, 0.0))
                    });
                    a.cscale(Complex64::new(0.0, u * dz).exp())
                },
                0.0,
                kr,
                &spec,
            )?,
            "propagating radial sector",
        )?;
        // Evanescent sector with κ = |k_z|: dk_∥ k_∥/k_z = dκ/i.
        let scale = 1.0 / dz;
        let evan = check_converged(
            integrate_1d_to_inf(
                |v: f64| {
                    let kappa = v * scale;
                    let k_par = kr.hypot(kappa);
                    let a = pol_angular(k, k_par, &sep).unwrap_or_else(|_| {
                        Tensor3::from_fn(|_, _| Complex64::new(f64::NAN, 0.0))
                    });
                    a.cscale(Complex64::new(0.0, -(-kappa * dz).exp() * scale))
                },
                0.0,
                &spec,
            )?,
            "evanescent radial sector",
        )?;
        prop + evan
    } else {
        // Lossy medium: k_z never vanishes on the real k_∥ axis; integrate
        // it directly with an explicit split around the branch-point
        // neighborhood |k_∥| = Re k.
        let kr = k.re;
        let radial = |k_par: f64| -> Tensor3 {
            let pt = WeylKernelPoint::from_polar(k, k_par, [1.0, 0.0]);
            let a = pol_angular(k, k_par, &sep)
                .unwrap_or_else(|_| Tensor3::from_fn(|_, _| Complex64::new(f64::NAN, 0.0)));
            a.cscale((Complex64::new(0.0, dz) * pt.k_z).exp() * k_par / pt.k_z)
        };
        let lo = check_converged(
            integrate_1d(radial, 0.0, 0.95 * kr, &spec)?,
            "radial sector below the branch point",
        )?;
        let near = check_converged(
            integrate_1d(radial, 0.95 * kr, 1.05 * kr, &spec)?,
            "radial sector at the branch point",
        )?;
        let scale = 1.0 / dz;
        let tail = check_converged(
            integrate_1d_to_inf(
                |v: f64| radial(1.05 * kr + v * scale).scale(scale),
                0.0,
                &spec,
            )?,
            "radial tail",
        )?;
        lo + near + tail
    };
    Ok(total.cscale(Complex64::new(0.0, 1.0 / (8.0 * std::f64::consts::PI.powi(2)))))
}

/// xx-component of the bulk tensor; requires z ≠ z′ (see
/// [`bulk_green_xx_im`] for the in-plane imaginary part).
pub fn bulk_green_xx(
    medium: &BulkMedium,
    r: [f64; 3],
    r_prime: [f64; 3],
    omega: f64,
) -> Result<Complex64, GreensError> {
    Ok(bulk_green_tensor(medium, r, r_prime, omega)?.xx())
}

/// Im G_xx at any separation, including coincidence. In the plane z = z′
/// the evanescent sector of a lossless medium is purely real, so only the
/// propagating sector contributes; a lossy medium has no finite in-plane
/// value (the contact term diverges) and is rejected.
pub fn bulk_green_xx_im(
    medium: &BulkMedium,
    r: [f64; 3],
    r_prime: [f64; 3],
    omega: f64,
) -> Result<f64, GreensError> {
    let sep = separation(r, r_prime);
    if sep.dz != 0.0 {
        return Ok(bulk_green_xx(medium, r, r_prime, omega)?.im);
    }
    if !medium.is_lossless_at(omega)? {
        let n = medium.index.index(omega)?;
        return Err(GreensError::LossyInPlane { im_n: n.im });
    }
    let k = medium.wavenumber(omega)?;
    let kr = k.re;
    let spec = QuadratureSpec::with_rel_tol(RADIAL_REL_TOL);
    let prop = check_converged(
        integrate_1d(
            |u: f64| {
                let k_par = (kr * kr - u * u).max(0.0).sqrt();
                let k_z = Complex64::new(u, 0.0);
                pol_angular_xx(k, k_par, k_z, &sep)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0))
            },
            0.0,
            kr,
            &spec,
        )?,
        "in-plane propagating sector",
    )?;
    Ok((Complex64::new(0.0, 1.0 / (8.0 * std::f64::consts::PI.powi(2))) * prop).im)
}

/// Regular part of the longitudinal tensor (z ≠ z′).
pub fn longitudinal_green(
    medium: &BulkMedium,
    r: [f64; 3],
    r_prime: [f64; 3],
    omega: f64,
) -> Result<Tensor3, GreensError> {
    let sep = separation(r, r_prime);
    if sep.dz == 0.0 {
        return Err(GreensError::CoincidenceRequest);
    }
    let k = medium.wavenumber(omega)?;
    let dz = sep.dz.abs();
    let sign = sep.dz.signum();
    let spec = QuadratureSpec::with_rel_tol(RADIAL_REL_TOL);
    let scale = 1.0 / dz;
    let radial = check_converged(
        integrate_1d_to_inf(
            |v: f64| {
                let k_par = v * scale;
                let ang = periodic_angular(
                    |psi| {
                        let (s, c) = psi.sin_cos();
                        let phase =
                            Complex64::new(0.0, k_par * sep.rho * (psi - sep.alpha).cos()).exp();
                        // k_∥(ê_∥ê_∥ − ê_zê_z) + i sign(Δz) M, with the
                        // common factor k_∥ pulled out of both terms.
                        let re = |x: f64| Complex64::new(x, 0.0);
                        let im = |x: f64| Complex64::new(0.0, x * sign);
                        Tensor3([
                            [re(c * c), re(c * s), im(c)],
                            [re(c * s), re(s * s), im(s)],
                            [im(c), im(s), re(-1.0)],
                        ])
                        .cscale(phase)
                    },
                    angular_points(k_par * sep.rho),
                    ANGULAR_REL_TOL,
                )
                .unwrap_or_else(|_| Tensor3::from_fn(|_, _| Complex64::new(f64::NAN, 0.0)));
                ang.scale(k_par * k_par * (-k_par * dz).exp() * scale)
            },
            0.0,
            &spec,
        )?,
        "longitudinal radial integral",
    )?;
    Ok(radial.cscale(-1.0 / (8.0 * std::f64::consts::PI.powi(2) * k * k)))
}

/// Transverse part ^⊥G = G − ^∥G (z ≠ z′).
pub fn transverse_green(
    medium: &BulkMedium,
    r: [f64; 3],
    r_prime: [f64; 3],
    omega: f64,
) -> Result<Tensor3, GreensError> {
    Ok(bulk_green_tensor(medium, r, r_prime, omega)?
        - longitudinal_green(medium, r, r_prime, omega)?)
}

/// Closed-form homogeneous dyadic Green's function component
/// G_xx(R) = e^{ikR}/(4πR) [(1 + (ikR−1)/(kR)²) + (3 − 3ikR − (kR)²)/(kR)² R̂_x²].
///
/// Exact for any complex k and R ≠ 0; the independent cross-check for the
/// Weyl quadrature and the fast path for correlation maps.
pub fn closed_form_green_xx(k: Complex64, dr: [f64; 3]) -> Complex64 {
    let r = (dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2]).sqrt();
    let rx2 = (dr[0] / r) * (dr[0] / r);
    let ikr = Complex64::new(0.0, 1.0) * k * r;
    let kr2 = (k * r) * (k * r);
    let scalar = 1.0 + (ikr - 1.0) / kr2;
    let direction = (3.0 - 3.0 * ikr - kr2) / kr2;
    ikr.exp() / (4.0 * std::f64::consts::PI * r) * (scalar + direction * rx2)
}

// ---------------------------------------------------------------------------
// Mixed-representation kernels at fixed k_∥ (regular parts; the shared
// −δ(ζ)ê_zê_z/k² contact terms are stated in each function's contract).
// ---------------------------------------------------------------------------

/// Regular part of G(k_∥, ζ): (i/2k_z) Σ_σ e_σ±e_σ± e^{ik_z|ζ|}, the ± branch
/// set by the sign of ζ. Add −δ(ζ)ê_zê_z/k² to recover the full kernel.
pub fn full_kernel(k: Complex64, k_par_vec: [f64; 2], zeta: f64) -> Tensor3 {
    let pt = WeylKernelPoint::new(k, k_par_vec);
    let phase = (Complex64::new(0.0, zeta.abs()) * pt.k_z).exp();
    pt.pol_sum(zeta >= 0.0)
        .cscale(Complex64::new(0.0, 0.5) / pt.k_z * phase)
}

/// Regular part of ^∥G(k_∥, ζ):
/// −e^{−k_∥|ζ|}/(2k²) [k_∥(ê_∥ê_∥ − ê_zê_z) + i sign(ζ) M],
/// with M carrying the (x,z)/(y,z) couplings. Same contact term as above.
pub fn longitudinal_kernel(k: Complex64, k_par_vec: [f64; 2], zeta: f64) -> Tensor3 {
    let k_par = k_par_vec[0].hypot(k_par_vec[1]);
    let (kx, ky) = (k_par_vec[0], k_par_vec[1]);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let s = if zeta == 0.0 { 0.0 } else { zeta.signum() };
    let par = if k_par > 0.0 {
        Tensor3([
            [re(kx * kx / k_par), re(kx * ky / k_par), im(s * kx)],
            [re(kx * ky / k_par), re(ky * ky / k_par), im(s * ky)],
            [im(s * kx), im(s * ky), re(-k_par)],
        ])
    } else {
        Tensor3::ZERO
    };
    par.cscale(-(-k_par * zeta.abs()).exp() / (2.0 * k * k))
}

/// Transverse mixed kernel ^⊥G(k_∥, ζ); the contact terms cancel in the
/// difference, so this is the complete kernel.
pub fn transverse_kernel(k: Complex64, k_par_vec: [f64; 2], zeta: f64) -> Tensor3 {
    full_kernel(k, k_par_vec, zeta) - longitudinal_kernel(k, k_par_vec, zeta)
}

/// Regular part of the longitudinal δ-projector at fixed k_∥,
/// P^∥(k_∥, u) = δ(u)ê_zê_z + Q(u): this returns Q, from the contour
/// integral of k k/(k_∥² + k_z²) over k_z.
pub fn longitudinal_projector_kernel(k_par_vec: [f64; 2], u: f64) -> Tensor3 {
    let k_par = k_par_vec[0].hypot(k_par_vec[1]);
    let (kx, ky) = (k_par_vec[0], k_par_vec[1]);
    let decay = (-k_par * u.abs()).exp();
    let s = if u == 0.0 { 0.0 } else { u.signum() };
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    if k_par == 0.0 {
        return Tensor3::ZERO;
    }
    Tensor3([
        [
            re(kx * kx / (2.0 * k_par) * decay),
            re(kx * ky / (2.0 * k_par) * decay),
            im(0.5 * s * kx * decay),
        ],
        [
            re(kx * ky / (2.0 * k_par) * decay),
            re(ky * ky / (2.0 * k_par) * decay),
            im(0.5 * s * ky * decay),
        ],
        [
            im(0.5 * s * kx * decay),
            im(0.5 * s * ky * decay),
            re(-k_par / 2.0 * decay),
        ],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{omega_from_thz, C};
    use crate::materials::PhononResonanceModel;
    use approx::assert_relative_eq;

    fn fixed_medium(n: f64) -> BulkMedium {
        BulkMedium::new(IndexModel::Fixed(Complex64::new(n, 0.0)))
    }

    fn phonon_medium(absorption: bool) -> BulkMedium {
        BulkMedium::new(IndexModel::Phonon(PhononResonanceModel::znte(absorption)))
    }

    #[test]
    fn coincidence_imaginary_part_is_k_over_6pi() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = 2.5 * omega / C;
        let r = [0.0, 0.0, 0.0];
        let got = bulk_green_xx_im(&medium, r, r, omega).unwrap();
        assert_relative_eq!(got, k / (6.0 * std::f64::consts::PI), max_relative = 1e-6);
    }

    #[test]
    fn coincidence_identity_holds_for_dispersive_lossless_media() {
        let medium = phonon_medium(false);
        for f in [0.5, 2.0, 4.5, 20.0] {
            let omega = omega_from_thz(f);
            let n = medium.index.index(omega).unwrap().re;
            let r = [0.0, 0.0, 0.0];
            let got = bulk_green_xx_im(&medium, r, r, omega).unwrap();
            assert_relative_eq!(
                got,
                n * omega / (6.0 * std::f64::consts::PI * C),
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn shrinking_separation_approaches_the_coincidence_value() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = 2.5 * omega / C;
        let target = k / (6.0 * std::f64::consts::PI);
        let mut errs = Vec::new();
        for frac in [0.3, 0.1, 0.03] {
            let dz = frac / k;
            let g = bulk_green_xx(&medium, [0.0, 0.0, dz], [0.0; 3], omega).unwrap();
            errs.push((g.im - target).abs() / target);
        }
        assert!(errs[2] < 1e-3, "closest separation off by {:.2e}", errs[2]);
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    }

    #[test]
    fn lateral_separation_matches_closed_form_imaginary_part() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = 2.5 * omega / C;
        let rho = 5.0 / k;
        // Two in-plane directions: along x (direction-dependent term on)
        // and along y.
        for dr in [[rho, 0.0, 0.0], [0.0, rho, 0.0]] {
            let got = bulk_green_xx_im(&medium, dr, [0.0; 3], omega).unwrap();
            let want = closed_form_green_xx(Complex64::new(k, 0.0), dr).im;
            assert_relative_eq!(got, want, max_relative = 1e-4);
        }
    }

    #[test]
    fn off_plane_full_value_matches_closed_form() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = 2.5 * omega / C;
        let dr = [1.0 / k, 0.4 / k, 2.0 / k];
        let got = bulk_green_xx(&medium, dr, [0.0; 3], omega).unwrap();
        let want = closed_form_green_xx(Complex64::new(k, 0.0), dr);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-6);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-6);
    }

    #[test]
    fn absorbing_medium_matches_closed_form() {
        let medium = phonon_medium(true);
        let omega = omega_from_thz(3.0);
        let k = medium.wavenumber(omega).unwrap();
        let dr = [0.5 / k.re, 0.0, 3.0 / k.re];
        let got = bulk_green_xx(&medium, dr, [0.0; 3], omega).unwrap();
        let want = closed_form_green_xx(k, dr);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-5);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-5);
    }

    #[test]
    fn reciprocity_under_argument_exchange() {
        let medium = phonon_medium(true);
        let omega = omega_from_thz(2.0);
        let k = medium.wavenumber(omega).unwrap().re;
        let r = [0.3 / k, -0.2 / k, 1.0 / k];
        let rp = [-0.5 / k, 0.1 / k, -0.4 / k];
        let fwd = bulk_green_xx(&medium, r, rp, omega).unwrap();
        let bwd = bulk_green_xx(&medium, rp, r, omega).unwrap();
        assert_relative_eq!(fwd.re, bwd.re, max_relative = 1e-10);
        assert_relative_eq!(fwd.im, bwd.im, max_relative = 1e-10);
    }

    #[test]
    fn in_plane_full_value_is_rejected() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        assert!(matches!(
            bulk_green_xx(&medium, [1e-5, 0.0, 0.0], [0.0; 3], omega),
            Err(GreensError::InPlaneFullValue)
        ));
        // In-plane imaginary part in a lossy medium has no finite value.
        let lossy = phonon_medium(true);
        assert!(matches!(
            bulk_green_xx_im(&lossy, [1e-5, 0.0, 0.0], [0.0; 3], omega_from_thz(3.0)),
            Err(GreensError::LossyInPlane { .. })
        ));
    }

    #[test]
    fn longitudinal_tensor_is_symmetric_both_ways() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = medium.wavenumber(omega).unwrap().re;
        let r = [0.4 / k, 0.7 / k, 0.9 / k];
        let rp = [-0.1 / k, 0.0, 0.2 / k];
        let g = longitudinal_green(&medium, r, rp, omega).unwrap();
        let swapped = longitudinal_green(&medium, rp, r, omega).unwrap();
        let scale = g.max_abs();
        assert!((g - g.transpose()).max_abs() < 1e-10 * scale);
        assert!((g - swapped).max_abs() < 1e-10 * scale);
        assert!(matches!(
            longitudinal_green(&medium, [0.0, 1.0 / k, 0.5 / k], [0.0, 0.0, 0.5 / k], omega),
            Err(GreensError::CoincidenceRequest)
        ));
    }

    #[test]
    fn longitudinal_tensor_scales_as_inverse_k_squared() {
        let medium = fixed_medium(2.5);
        let (w1, w2) = (omega_from_thz(1.0), omega_from_thz(2.7));
        let k1 = medium.wavenumber(w1).unwrap();
        let k2 = medium.wavenumber(w2).unwrap();
        let r = [2e-5, 1e-5, 3e-5];
        let a = longitudinal_green(&medium, r, [0.0; 3], w1)
            .unwrap()
            .cscale(k1 * k1);
        let b = longitudinal_green(&medium, r, [0.0; 3], w2)
            .unwrap()
            .cscale(k2 * k2);
        assert!((a - b).max_abs() <= 1e-12 * a.max_abs());
    }

    #[test]
    fn longitudinal_tensor_matches_cartesian_quadrature() {
        // Brute-force oracle: the electrostatic bracket written out from
        // scratch and integrated over a Cartesian (k_x, k_y) rectangle,
        // validating the radial-angular reduction as a whole.
        let medium = fixed_medium(2.0);
        let omega = omega_from_thz(1.0);
        let k = medium.wavenumber(omega).unwrap();
        let dr = [0.8e-5, 0.5e-5, 2e-5];
        let got = longitudinal_green(&medium, dr, [0.0; 3], omega).unwrap();

        let cut = 40.0 / dr[2];
        let spec = QuadratureSpec::with_rel_tol(1e-7);
        let oracle = crate::numerics::integrate_2d_nested(
            |kx: f64, ky: f64| {
                let k_par = kx.hypot(ky);
                if k_par == 0.0 {
                    return Tensor3::ZERO;
                }
                let phase = Complex64::new(0.0, kx * dr[0] + ky * dr[1]).exp();
                let re = |x: f64| Complex64::new(x, 0.0);
                let im = |x: f64| Complex64::new(0.0, x);
                let bracket = Tensor3([
                    [re(kx * kx / k_par), re(kx * ky / k_par), im(kx)],
                    [re(kx * ky / k_par), re(ky * ky / k_par), im(ky)],
                    [im(kx), im(ky), re(-k_par)],
                ]);
                bracket.cscale(phase * (-k_par * dr[2]).exp())
            },
            -cut,
            cut,
            |_| (-cut, cut),
            &spec,
            &spec,
        )
        .unwrap()
        .value
        .cscale(-1.0 / (8.0 * std::f64::consts::PI.powi(2) * k * k));
        assert!(
            (got - oracle).max_abs() < 1e-4 * got.max_abs(),
            "radial vs cartesian mismatch: {:.3e} vs {:.3e}",
            got.max_abs(),
            oracle.max_abs()
        );
    }

    #[test]
    fn decomposition_parts_sum_to_the_full_tensor() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = medium.wavenumber(omega).unwrap().re;
        let r = [0.3 / k, 0.0, 1.2 / k];
        let full = bulk_green_tensor(&medium, r, [0.0; 3], omega).unwrap();
        let par = longitudinal_green(&medium, r, [0.0; 3], omega).unwrap();
        let perp = transverse_green(&medium, r, [0.0; 3], omega).unwrap();
        assert!(((par + perp) - full).max_abs() <= 1e-12 * full.max_abs());
    }

    #[test]
    fn lossless_longitudinal_part_is_real() {
        let medium = fixed_medium(2.5);
        let omega = omega_from_thz(1.0);
        let k = medium.wavenumber(omega).unwrap().re;
        let g = longitudinal_green(&medium, [0.5 / k, 0.3 / k, 1.0 / k], [0.0; 3], omega).unwrap();
        let im_max = g
            .0
            .iter()
            .flatten()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max);
        assert!(im_max <= 1e-10 * g.max_abs());
    }

    #[test]
    fn longitudinal_imaginary_part_tracks_absorption() {
        let omega = omega_from_thz(5.0);
        let base = PhononResonanceModel::znte(true);
        let k_scale = |s: f64| {
            BulkMedium::from_thz_index(ThzIndex::with_absorption_scale(
                IndexModel::Phonon(base),
                s,
            ))
        };
        let k = k_scale(1.0).wavenumber(omega).unwrap().re;
        let dr = [0.2 / k, 0.0, 0.8 / k];
        let im_at = |s: f64| {
            longitudinal_green(&k_scale(s), dr, [0.0; 3], omega)
                .unwrap()
                .xx()
                .im
        };
        let full = im_at(1e-2);
        let tenth = im_at(1e-3);
        assert!(full.abs() > 0.0);
        // Im ^∥G enters only through Im(1/k²), linear in Im n when small.
        assert_relative_eq!(full / tenth, 10.0, max_relative = 5e-2);
    }

    #[test]
    fn weyl_point_invariants() {
        let k = Complex64::new(1.3e6, 2.0e3);
        for (kx, ky) in [(0.5e6, 0.2e6), (1.4e6, -0.3e6), (0.0, 0.9e6)] {
            let pt = WeylKernelPoint::new(k, [kx, ky]);
            let k_par = kx.hypot(ky);
            let closure = pt.k_z * pt.k_z + k_par * k_par - k * k;
            assert!(closure.norm() <= 1e-12 * (k * k).norm());
            assert!(pt.k_z.im >= 0.0);
            let es = pt.e_s();
            let es_norm: Complex64 = es.iter().map(|c| c * c).sum();
            assert_relative_eq!(es_norm.re, 1.0, max_relative = 1e-14);
            // e_p·e_p = 1 without conjugation, the stated normalization.
            let ep = pt.e_p(true);
            let ep_norm: Complex64 = ep.iter().map(|c| c * c).sum();
            assert_relative_eq!(ep_norm.re, 1.0, max_relative = 1e-12);
            assert!(ep_norm.im.abs() < 1e-12);
        }
    }

    #[test]
    fn positivity_of_the_fluctuation_kernel() {
        let medium = phonon_medium(false);
        let r = [0.0; 3];
        for f in [0.1, 1.0, 3.0, 5.5, 7.0, 30.0, 100.0] {
            let omega = omega_from_thz(f);
            let im = bulk_green_xx_im(&medium, r, r, omega).unwrap();
            assert!(im >= 0.0, "Im G_xx < 0 at {f} THz: {im:e}");
        }
    }

    // ------------------------------------------------------------------
    // Projector identities in the mixed representation: convolutions over
    // the longitudinal coordinate at fixed k_∥.
    // ------------------------------------------------------------------

    /// ∫du P^∥(k_∥,u)·K(ζ−u) for a δ-free kernel K, splitting at the
    /// integrable kinks u = 0 and u = ζ.
    fn project(
        k_par_vec: [f64; 2],
        zeta: f64,
        kernel: impl Fn(f64) -> Tensor3 + Copy,
    ) -> Tensor3 {
        let k_par = k_par_vec[0].hypot(k_par_vec[1]);
        let spec = QuadratureSpec::with_rel_tol(1e-10);
        let conv = |u: f64| longitudinal_projector_kernel(k_par_vec, u).matmul(kernel(zeta - u));
        let mut splits = vec![0.0, zeta];
        splits.sort_by(f64::total_cmp);
        let scale = 1.0 / k_par;
        let left = integrate_1d_to_inf(|v| conv(splits[0] - v * scale).scale(scale), 0.0, &spec)
            .unwrap()
            .value;
        let mid = integrate_1d(conv, splits[0], splits[1], &spec).unwrap().value;
        let right = integrate_1d_to_inf(|v| conv(splits[1] + v * scale).scale(scale), 0.0, &spec)
            .unwrap()
            .value;
        // δ(u)ê_zê_z picks out the z-row of the kernel at u = 0.
        let ezez = Tensor3::from_fn(|i, j| {
            Complex64::new(if i == 2 && j == 2 { 1.0 } else { 0.0 }, 0.0)
        });
        ezez.matmul(kernel(zeta)) + left + mid + right
    }

    #[test]
    fn projector_is_idempotent_on_the_longitudinal_part() {
        let k = Complex64::new(1.1, 0.0);
        let k_par_vec = [0.6, 0.3];
        let zeta = 0.8;
        let target = longitudinal_kernel(k, k_par_vec, zeta);
        // Convolving with the regular part of ^∥G and adding the contact
        // term's image: P^∥ * (−δ ê_zê_z/k²) contributes Q(ζ)·(−ê_zê_z/k²).
        let regular = project(k_par_vec, zeta, |z| longitudinal_kernel(k, k_par_vec, z));
        let ezez = Tensor3::from_fn(|i, j| {
            Complex64::new(if i == 2 && j == 2 { 1.0 } else { 0.0 }, 0.0)
        });
        let contact = longitudinal_projector_kernel(k_par_vec, zeta)
            .matmul(ezez)
            .cscale(-1.0 / (k * k));
        let got = regular + contact;
        assert!(
            (got - target).max_abs() < 1e-6 * target.max_abs(),
            "idempotence violated: {:.3e} vs {:.3e}",
            (got - target).max_abs(),
            target.max_abs()
        );
    }

    #[test]
    fn projector_annihilates_the_transverse_part() {
        let k = Complex64::new(1.1, 0.0);
        let k_par_vec = [0.6, 0.3];
        let zeta = 0.8;
        let got = project(k_par_vec, zeta, |z| transverse_kernel(k, k_par_vec, z));
        let scale = transverse_kernel(k, k_par_vec, zeta).max_abs();
        assert!(
            got.max_abs() < 1e-6 * scale,
            "transverse projection nonzero: {:.3e} (scale {:.3e})",
            got.max_abs(),
            scale
        );
    }
}
