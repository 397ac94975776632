//! One-dimensional momentum integrands for every detector scenario.
//!
//! Each constructor returns a [`SpectralKernelSet`] whose integrands carry all
//! prefactors, so `L = int_0^inf L(k) dk` and likewise for `M`. The closed
//! forms are used exactly as printed in the reference derivation; where an
//! independent check disagrees with them the kernels are still the printed
//! ones and the oracle comparison runs in report mode.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use core::f64::consts::PI;

use num_complex::Complex64;

#[cfg(feature = "std")]
use crate::contour::MContour;
use crate::error::{HarvestError, Result};
use crate::model::{CouplingModel, DetectorConfig, EulerAngles, HydrogenState, PairGeometry, SmearingSpec, SwitchingProfile};
use crate::oracle::{OracleOptions, PairIntegrand, Placement, Profile, Which};
use crate::quadrature::{composite_gauss_legendre, integrate_semi_infinite, QuadratureResult};
use crate::specfun::{hydrogen_radial, one_minus_erf_i_damped, sbj, AngularQuantum, RadialConvention};
use crate::state::TwoDetectorState;

pub type RealKernel = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexKernel = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Which kernel family produced a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioTag {
    Scalar,
    QScalarIsotropic,
    QScalarL2,
    GravityGaussian,
    GravityL2,
    GeneralRadial { l: u32 },
    Hydrogen320,
}

impl ScenarioTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioTag::Scalar => "scalar",
            ScenarioTag::QScalarIsotropic => "qscalar",
            ScenarioTag::QScalarL2 => "qscalar-l2",
            ScenarioTag::GravityGaussian => "gravity-gaussian",
            ScenarioTag::GravityL2 => "gravity-l2",
            ScenarioTag::GeneralRadial { l: 0 } => "general-radial-l0",
            ScenarioTag::GeneralRadial { l: 1 } => "general-radial-l1",
            ScenarioTag::GeneralRadial { .. } => "general-radial-l2",
            ScenarioTag::Hydrogen320 => "hydrogen-320",
        }
    }
}

/// The `L` and `M` integrands of one scenario.
///
/// The stored closures are per unit coupling; the accessors apply
/// `lambda_A^2`, `lambda_B^2` and `lambda_A lambda_B`.
#[derive(Clone)]
pub struct SpectralKernelSet {
    l: RealKernel,
    m: ComplexKernel,
    l_cross: Option<ComplexKernel>,
    lambda_a: f64,
    lambda_b: f64,
    pub scenario_tag: ScenarioTag,
    pub prefactor_units: &'static str,
    /// Length on which the `M` integrand is damped in `k`.
    pub damping_scale: f64,
    /// Damping length of the `L` and `L_AB` integrands. Both carry
    /// `|chi~|^2`, so this is at least the switching width.
    pub l_damping_scale: f64,
    /// Length setting the oscillation frequency in `k`.
    pub oscillation_scale: f64,
    #[cfg(feature = "std")]
    m_contour: Option<MContour>,
}

impl core::fmt::Debug for SpectralKernelSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SpectralKernelSet")
            .field("scenario_tag", &self.scenario_tag)
            .field("damping_scale", &self.damping_scale)
            .field("oscillation_scale", &self.oscillation_scale)
            .finish_non_exhaustive()
    }
}

/// Integrated kernels of one set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegrals {
    /// `L_AA`; `L_BB` follows by the coupling ratio.
    pub l: QuadratureResult,
    pub m: QuadratureResult,
    pub l_cross: Option<QuadratureResult>,
    lambda_ratio_sq: f64,
}

impl KernelIntegrals {
    pub fn state(&self) -> TwoDetectorState {
        let l_aa = self.l.value.re;
        let l_ab = self.l_cross.map(|r| r.value).unwrap_or_default();
        TwoDetectorState { l_aa, l_bb: l_aa * self.lambda_ratio_sq, l_ab, l_ba: l_ab.conj(), m: self.m.value }
    }
}

impl SpectralKernelSet {
    /// `L_AA` integrand.
    pub fn l_integrand(&self, k: f64) -> f64 {
        self.lambda_a * self.lambda_a * (self.l)(k)
    }

    pub fn l_bb_integrand(&self, k: f64) -> f64 {
        self.lambda_b * self.lambda_b * (self.l)(k)
    }

    pub fn m_integrand(&self, k: f64) -> Complex64 {
        (self.m)(k) * (self.lambda_a * self.lambda_b)
    }

    /// `L_AB` integrand, when the scenario provides one.
    pub fn l_cross_integrand(&self, k: f64) -> Option<Complex64> {
        self.l_cross.as_ref().map(|f| f(k) * (self.lambda_a * self.lambda_b))
    }

    pub fn has_cross_terms(&self) -> bool {
        self.l_cross.is_some()
    }

    pub fn integrate_l(&self, rel_tol: f64) -> Result<QuadratureResult> {
        integrate_semi_infinite(|k| Complex64::new(self.l_integrand(k), 0.0), self.l_damping_scale, 0.0, rel_tol)
    }

    /// `M`. Printed kernels with a separated pair are integrated partly off
    /// the real axis (see [`Self::has_contour_form`]); the rest on the real axis.
    pub fn integrate_m(&self, rel_tol: f64) -> Result<QuadratureResult> {
        #[cfg(feature = "std")]
        if let Some(c) = &self.m_contour {
            return c.integrate(|k| self.m_integrand(k), self.lambda_a * self.lambda_b, rel_tol);
        }
        self.integrate_m_real_axis(rel_tol)
    }

    /// `M` by real-axis quadrature only. Loses accuracy when the smearing
    /// transform decays slowly, since the integrand then cancels heavily.
    pub fn integrate_m_real_axis(&self, rel_tol: f64) -> Result<QuadratureResult> {
        integrate_semi_infinite(|k| self.m_integrand(k), self.damping_scale, self.oscillation_scale, rel_tol)
    }

    /// Whether `M` has an analytic continuation used by [`Self::integrate_m`].
    pub fn has_contour_form(&self) -> bool {
        #[cfg(feature = "std")]
        return self.m_contour.is_some();
        #[cfg(not(feature = "std"))]
        false
    }

    /// The continued `M` integrand at complex `k`, when available.
    #[cfg(feature = "std")]
    pub fn m_integrand_complex(&self, k: Complex64) -> Option<Complex64> {
        self.m_contour.as_ref().map(|c| c.integrand(k) * (self.lambda_a * self.lambda_b))
    }

    pub fn integrate_l_cross(&self, rel_tol: f64) -> Result<Option<QuadratureResult>> {
        match &self.l_cross {
            None => Ok(None),
            Some(_) => integrate_semi_infinite(
                |k| self.l_cross_integrand(k).unwrap_or_default(),
                self.l_damping_scale,
                self.oscillation_scale,
                rel_tol,
            )
            .map(Some),
        }
    }

    /// `L`, `M` and, if available, `L_AB`.
    pub fn integrate(&self, rel_tol: f64, with_cross: bool) -> Result<KernelIntegrals> {
        let l = self.integrate_l(rel_tol)?;
        let m = self.integrate_m(rel_tol)?;
        let l_cross = if with_cross { self.integrate_l_cross(rel_tol)? } else { None };
        let ratio = if self.lambda_a == 0.0 { 0.0 } else { { let r = self.lambda_b / self.lambda_a; r * r } };
        Ok(KernelIntegrals { l, m, l_cross, lambda_ratio_sq: ratio })
    }
}

// ---------------------------------------------------------------------------

fn unsupported(msg: impl Into<alloc::string::String>) -> HarvestError {
    HarvestError::UnsupportedScenario(msg.into())
}

fn check_pair(a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<(f64, SwitchingProfile)> {
    a.validate()?;
    b.validate()?;
    PairGeometry::new(geo.separation, geo.euler)?;
    if a.gap != b.gap {
        return Err(unsupported(format!("detectors must share one gap ({} vs {})", a.gap, b.gap)));
    }
    if a.switching != b.switching {
        return Err(unsupported("detectors must share one switching profile"));
    }
    if a.smearing != b.smearing {
        return Err(unsupported("the reduced kernels assume identical smearings"));
    }
    Ok((a.gap, a.switching))
}

fn gaussian_sigma(s: &SmearingSpec) -> Option<f64> {
    match *s {
        SmearingSpec::GaussianIsotropic { sigma } => Some(sigma),
        _ => None,
    }
}

fn harmonic_20_sigma(s: &SmearingSpec) -> Option<f64> {
    match *s {
        SmearingSpec::GaussianHarmonic { sigma, q } if q.l == 2 && q.m == 0 => Some(sigma),
        _ => None,
    }
}

/// `e^{-T^2(k^2+Omega^2)} (1 - erf(i k T))`, the printed `Q` without `T^2/2`.
fn q_form(k: f64, omega: f64, t: f64) -> Complex64 {
    one_minus_erf_i_damped(k * t, t * t * (k * k + omega * omega))
}

/// `e^{-T^2 (k + Omega)^2}`, `|chi~|^2` without `T^2`.
fn chi_form(k: f64, omega: f64, t: f64) -> f64 {
    libm::exp(-t * t * (k + omega) * (k + omega))
}

/// `j0(x) = sin(x)/x` with the removable point handled.
fn sinc(x: f64) -> f64 {
    sbj(0, x)
}

/// Assembles a set from `L(k) = c_l chi(k) a(k)` and
/// `M(k) = c_m Q(k) b(k)`, with `L_AB(k) = -c_m chi(k) b(k)`.
///
/// The cross term follows from `M` by replacing both time-ordered summands
/// `2 Q` with `|chi~|^2` for parity-even real smearing transforms.
#[allow(clippy::too_many_arguments)]
fn assemble(
    tag: ScenarioTag,
    a: &DetectorConfig,
    b: &DetectorConfig,
    omega: f64,
    sw: SwitchingProfile,
    damping: f64,
    c_l: f64,
    l_radial: impl Fn(f64) -> f64 + Send + Sync + 'static,
    c_m: f64,
    m_radial: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> SpectralKernelSet {
    let t = sw.t;
    let m_radial = Arc::new(m_radial);
    let mr = m_radial.clone();
    let l: RealKernel = Arc::new(move |k: f64| if k <= 0.0 { 0.0 } else { c_l * chi_form(k, omega, t) * l_radial(k) });
    let m: ComplexKernel = Arc::new(move |k: f64| if k <= 0.0 { Complex64::default() } else { q_form(k, omega, t) * (c_m * mr(k)) });
    let l_cross: ComplexKernel =
        Arc::new(move |k: f64| if k <= 0.0 { Complex64::default() } else { Complex64::new(-c_m * chi_form(k, omega, t) * m_radial(k), 0.0) });
    SpectralKernelSet {
        l,
        m,
        l_cross: Some(l_cross),
        lambda_a: a.lambda,
        lambda_b: b.lambda,
        scenario_tag: tag,
        prefactor_units: "natural units with T^-1 for k; integrands per dk, coupling included",
        damping_scale: damping.min(t),
        l_damping_scale: damping.max(t),
        oscillation_scale: 0.0,
        #[cfg(feature = "std")]
        m_contour: None,
    }
}

fn with_oscillation(mut s: SpectralKernelSet, l: f64, t: f64) -> SpectralKernelSet {
    s.oscillation_scale = l.max(t);
    s
}

/// `(c0 j0(x) + c2 j2(x)) / x^p` with `p = 2` when `inv_x2`, else `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BesselMix {
    pub c0: f64,
    pub c2: f64,
    pub inv_x2: bool,
}

impl BesselMix {
    pub const SINC: Self = Self { c0: 1.0, c2: 0.0, inv_x2: false };
    pub const L2: Self = Self { c0: 7.0, c2: 10.0, inv_x2: false };
}

/// Attaches the analytic form `M(k) = c_m q(k) shape(k) mix(kL)` when the
/// pair is separated. `shape` must agree with the real-axis closure.
#[cfg_attr(not(feature = "std"), allow(unused_variables, unused_mut))]
fn with_contour(
    mut s: SpectralKernelSet,
    c_m: f64,
    shape: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    mix: BesselMix,
    omega: f64,
    sw: SwitchingProfile,
    sep: f64,
) -> SpectralKernelSet {
    #[cfg(feature = "std")]
    if sep > 0.0 {
        s.m_contour = Some(MContour { c_m, shape: Arc::new(shape), mix, sep, omega, t: sw.t });
    }
    s
}

/// Linear scalar coupling, isotropic Gaussian smearings.
pub fn scalar_kernels(a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<SpectralKernelSet> {
    let (omega, sw) = check_pair(a, b, geo)?;
    let sigma = gaussian_sigma(&a.smearing).ok_or_else(|| unsupported("scalar kernels need isotropic Gaussian smearings"))?;
    let (t, sep) = (sw.t, geo.separation);
    let c = t * t / (4.0 * PI * PI);
    let set = assemble(
        ScenarioTag::Scalar,
        a,
        b,
        omega,
        sw,
        sigma,
        c,
        move |k| k * libm::exp(-k * k * sigma * sigma),
        -c,
        move |k| k * libm::exp(-k * k * sigma * sigma) * sinc(k * sep),
    );
    let shape = move |k: Complex64| k * (-k * k * (sigma * sigma)).exp();
    Ok(with_contour(with_oscillation(set, sep, t), -c, shape, BesselMix::SINC, omega, sw, sep))
}

/// Scalar coupled through `d_t^2 phi` with `|x|^2`-weighted smearings:
/// isotropic Gaussians or Gaussians times `Y_20`.
pub fn qscalar_kernels(a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<SpectralKernelSet> {
    let (omega, sw) = check_pair(a, b, geo)?;
    let (t, sep) = (sw.t, geo.separation);
    if let Some(sigma) = gaussian_sigma(&a.smearing) {
        let s2 = sigma * sigma;
        let c = t * t * s2 * s2 / (16.0 * PI * PI);
        let shape = move |k: f64| {
            let p = k * k * s2 - 3.0;
            libm::pow(k, 5.0) * libm::exp(-k * k * s2) * p * p
        };
        let set = assemble(ScenarioTag::QScalarIsotropic, a, b, omega, sw, sigma, c, shape, -c, move |k| shape(k) * sinc(k * sep));
        let cshape = move |k: Complex64| {
            let p = k * k * s2 - 3.0;
            k.powi(5) * (-k * k * s2).exp() * p * p
        };
        return Ok(with_contour(with_oscillation(set, sep, t), -c, cshape, BesselMix::SINC, omega, sw, sep));
    }
    if let Some(sigma) = harmonic_20_sigma(&a.smearing) {
        let s2 = sigma * sigma;
        let s8 = s2 * s2 * s2 * s2;
        let th = geo.euler.theta;
        let c_l = t * t * s8 / (256.0 * PI * PI * PI);
        // printed with a positive sign, unlike every other non-local term
        let c_m = t * t * s8 / (7168.0 * PI * PI * PI) * (1.0 + 3.0 * libm::cos(2.0 * th));
        let base = move |k: f64| libm::pow(k, 9.0) * libm::exp(-k * k * s2);
        let set = assemble(ScenarioTag::QScalarL2, a, b, omega, sw, sigma, c_l, base, c_m, move |k| {
            base(k) * (7.0 * sbj(0, k * sep) - 10.0 * sbj(2, k * sep))
        });
        let cshape = move |k: Complex64| k.powi(9) * (-k * k * s2).exp();
        let mix = BesselMix { c0: 7.0, c2: -10.0, inv_x2: false };
        return Ok(with_contour(with_oscillation(set, sep, t), c_m, cshape, mix, omega, sw, sep));
    }
    Err(unsupported("quadrupole-scalar kernels exist for isotropic Gaussians and the (2,0) harmonic only"))
}

/// Gravity with isotropic Gaussian quadrupole smearings, as printed.
pub fn gravity_gaussian_kernels(a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<SpectralKernelSet> {
    let (omega, sw) = check_pair(a, b, geo)?;
    let sigma = gaussian_sigma(&a.smearing).ok_or_else(|| unsupported("gravity Gaussian kernels need isotropic Gaussian smearings"))?;
    let (t, sep) = (sw.t, geo.separation);
    if sep == 0.0 {
        return Err(HarvestError::SingularGeometry("the isotropic gravity kernel carries 1/L^5".into()));
    }
    let s2 = sigma * sigma;
    let s8 = s2 * s2 * s2 * s2;
    let c_l = t * t * s8 / (30.0 * PI * PI);
    let c_m = -t * t * s8 / (2.0 * PI * PI);
    let set = assemble(
        ScenarioTag::GravityGaussian,
        a,
        b,
        omega,
        sw,
        sigma,
        c_l,
        move |k| libm::pow(k, 9.0) * libm::exp(-k * k * s2),
        c_m,
        // k^4 [3kL cos kL + (k^2L^2 - 3) sin kL] / L^5 = -k^9 j2(kL)/(kL)^2
        move |k| -libm::pow(k, 9.0) * libm::exp(-k * k * s2) * j2_over_x2(k * sep),
    );
    let cshape = move |k: Complex64| -k.powi(9) * (-k * k * s2).exp();
    let mix = BesselMix { c0: 0.0, c2: 1.0, inv_x2: true };
    Ok(with_contour(with_oscillation(set, sep, t), c_m, cshape, mix, omega, sw, sep))
}

/// `j2(x) / x^2`, finite at the origin.
fn j2_over_x2(x: f64) -> f64 {
    if libm::fabs(x) < 1e-3 {
        let x2 = x * x;
        return 1.0 / 15.0 - x2 / 210.0 + x2 * x2 / 7560.0;
    }
    sbj(2, x) / (x * x)
}

/// Gravity with Gaussian `Y_20` smearings; B's axis tilted by the Euler angle `theta`.
pub fn gravity_l2_kernels(a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<SpectralKernelSet> {
    let (omega, sw) = check_pair(a, b, geo)?;
    let sigma = harmonic_20_sigma(&a.smearing).ok_or_else(|| match a.smearing {
        SmearingSpec::GaussianHarmonic { q, .. } => {
            unsupported(format!("gravity l=2 kernels need the (2,0) harmonic, got ({},{}); use general_radial_kernels", q.l, q.m))
        }
        _ => unsupported("gravity l=2 kernels need Gaussian harmonic smearings"),
    })?;
    let (t, sep) = (sw.t, geo.separation);
    let s2 = sigma * sigma;
    let s4 = s2 * s2;
    let pi4 = PI * PI * PI * PI;
    let c_l = 3.0 * t * t * s4 / (78400.0 * pi4);
    let c_m = -3.0 * t * t * s4 / (2_195_200.0 * pi4) * (1.0 + 3.0 * libm::cos(2.0 * geo.euler.theta));
    let shape = move |k: f64| {
        let p = 7.0 + k * k * s2;
        libm::pow(k, 5.0) * libm::exp(-k * k * s2) * p * p
    };
    let set = assemble(ScenarioTag::GravityL2, a, b, omega, sw, sigma, c_l, shape, c_m, move |k| {
        shape(k) * (7.0 * sbj(0, k * sep) + 10.0 * sbj(2, k * sep))
    });
    let cshape = move |k: Complex64| {
        let p = k * k * s2 + 7.0;
        k.powi(5) * (-k * k * s2).exp() * p * p
    };
    Ok(with_contour(with_oscillation(set, sep, t), c_m, cshape, BesselMix::L2, omega, sw, sep))
}

/// Hydrogen 1s -> 3d(m=0) transition, as printed, with `sigma` read as `a0`.
pub fn hydrogen_320_kernels(a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<SpectralKernelSet> {
    let (omega, sw) = check_pair(a, b, geo)?;
    let a0 = match a.smearing {
        SmearingSpec::HydrogenTransition { ground, excited, a0, convention } => {
            if ground != (HydrogenState { n: 1, l: 0, m: 0 }) || excited != (HydrogenState { n: 3, l: 2, m: 0 }) {
                return Err(unsupported("the closed hydrogen kernel covers 100 -> 320 only; use general_radial_kernels"));
            }
            if convention != RadialConvention::Standard {
                return Err(unsupported("the closed hydrogen kernel assumes the standard radial functions"));
            }
            a0
        }
        _ => return Err(unsupported("hydrogen kernels need a hydrogen-transition smearing")),
    };
    let (t, sep) = (sw.t, geo.separation);
    let s2 = a0 * a0;
    let s4 = s2 * s2;
    let c_l = 214_990_848.0 * t * t * s4 / (245.0 * PI * PI);
    let c_m = -53_747_712.0 * t * t * s4 / (1715.0 * PI * PI) * (1.0 + 3.0 * libm::cos(2.0 * geo.euler.theta));
    let shape = move |k: f64| {
        let x = k * k * s2;
        let num = 729.0 * x * x - 2016.0 * x - 1792.0;
        libm::pow(k, 5.0) * num * num / libm::pow(9.0 * x + 16.0, 12.0)
    };
    let set = assemble(ScenarioTag::Hydrogen320, a, b, omega, sw, a0, c_l, shape, c_m, move |k| {
        shape(k) * (7.0 * sbj(0, k * sep) + 10.0 * sbj(2, k * sep))
    });
    // The poles at k = +-4i/(3 a0) lie outside the sector swept by the rays.
    let cshape = move |k: Complex64| {
        let x = k * k * s2;
        let num = x * x * 729.0 - x * 2016.0 - 1792.0;
        k.powi(5) * num * num / (x * 9.0 + 16.0).powi(12)
    };
    Ok(with_contour(with_oscillation(set, sep, t), c_m, cshape, BesselMix::L2, omega, sw, sep))
}

// ---------------------------------------------------------------------------
// General radial products

/// Product `R_e(r) R_g(r)` of ground and excited radial functions.
#[derive(Clone)]
pub struct RadialProduct {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Radius beyond which the product is negligible.
    pub r_max: f64,
    /// Length on which it varies.
    pub r_scale: f64,
}

impl core::fmt::Debug for RadialProduct {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RadialProduct").field("r_max", &self.r_max).field("r_scale", &self.r_scale).finish_non_exhaustive()
    }
}

impl RadialProduct {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, r_max: f64, r_scale: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_scale > 0.0 && r_max.is_finite() && r_scale.is_finite()) {
            return Err(HarvestError::Domain(format!("radial extent must be positive (r_max {r_max}, r_scale {r_scale})")));
        }
        Ok(Self { f: Arc::new(f), r_max, r_scale })
    }

    /// The normalised isotropic Gaussian, the radial part of every Gaussian smearing.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let norm = libm::pow(2.0 * PI * sigma * sigma, -1.5);
        Self::new(move |r| norm * libm::exp(-0.5 * r * r / (sigma * sigma)), 10.0 * sigma, sigma)
    }

    /// `R_10 R_nl` with standard hydrogen radial functions.
    pub fn hydrogen(n: u32, l: u32, a0: f64) -> Result<Self> {
        hydrogen_radial(n, l, 0.0, a0)?;
        Self::new(
            move |r| hydrogen_radial(1, 0, r, a0).unwrap_or(0.0) * hydrogen_radial(n, l, r, a0).unwrap_or(0.0),
            45.0 * a0 / (1.0 + 1.0 / n as f64),
            a0,
        )
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    /// `W(k) = int_0^inf x^4 R(x) (7 j0(kx) + 10 j2(kx)) dx`.
    pub fn w_transform(&self, k: f64) -> f64 {
        let mut width = 0.5 * self.r_scale;
        if k > 0.0 {
            width = width.min(PI / (2.0 * k));
        }
        let panels = libm::ceil(self.r_max / width).max(1.0) as usize;
        let (xs, ws) = composite_gauss_legendre(0.0, self.r_max, panels, 16);
        xs.iter()
            .zip(&ws)
            .map(|(x, w)| {
                let x2 = x * x;
                w * x2 * x2 * self.eval(*x) * (7.0 * sbj(0, k * x) + 10.0 * sbj(2, k * x))
            })
            .sum()
    }
}

/// Gravity kernels for a ground `l = 0` state and an excited `(l_e, m_e)`
/// state with an arbitrary radial product.
///
/// `(2, 0)` uses the reduced radial transform `W(k)`. Other supported states
/// go through the direct angular quadrature; for `l_e = 1` the non-local term
/// vanishes by parity and is returned as zero, and for `l_e = 0` every term
/// vanishes under the TT projection.
pub fn general_radial_kernels(
    rprod: RadialProduct,
    excited: AngularQuantum,
    a: &DetectorConfig,
    b: &DetectorConfig,
    geo: &PairGeometry,
) -> Result<SpectralKernelSet> {
    a.validate()?;
    b.validate()?;
    PairGeometry::new(geo.separation, geo.euler)?;
    if a.gap != b.gap || a.switching != b.switching {
        return Err(unsupported("detectors must share gap and switching"));
    }
    AngularQuantum::new(excited.l, excited.m)?;
    if excited.l > 2 {
        return Err(unsupported(format!("excited l = {} is outside the supported range 0..=2", excited.l)));
    }
    let (omega, sw) = (a.gap, a.switching);
    let (t, sep) = (sw.t, geo.separation);
    if excited.l == 2 && excited.m == 0 {
        let c_l = t * t / (14700.0 * PI * PI);
        let d00 = 0.25 * (1.0 + 3.0 * libm::cos(2.0 * geo.euler.theta));
        // both time-ordered summands, Q = (T^2/2) q_form
        let c_m = -2.0 * d00 * (t * t / 2.0) / (102_900.0 * PI * PI);
        let (rl, rm) = (rprod.clone(), rprod.clone());
        let set = assemble(
            ScenarioTag::GeneralRadial { l: 2 },
            a,
            b,
            omega,
            sw,
            rprod.r_scale,
            c_l,
            move |k| {
                let w = rl.w_transform(k);
                libm::pow(k, 5.0) * w * w
            },
            c_m,
            move |k| {
                let w = rm.w_transform(k);
                libm::pow(k, 5.0) * w * w * (7.0 * sbj(0, k * sep) + 10.0 * sbj(2, k * sep))
            },
        );
        return Ok(with_oscillation(set, sep, t));
    }
    if excited.l == 0 {
        // x_i x_j times an isotropic profile transforms to A(k) delta_ij + B(k) k_i k_j,
        // which the TT projector removes: every gravity kernel vanishes identically.
        let zero: ComplexKernel = Arc::new(|_| Complex64::default());
        return Ok(SpectralKernelSet {
            l: Arc::new(|_| 0.0),
            m: zero.clone(),
            l_cross: Some(zero),
            lambda_a: a.lambda,
            lambda_b: b.lambda,
            scenario_tag: ScenarioTag::GeneralRadial { l: 0 },
            prefactor_units: "natural units with T^-1 for k; integrands per dk, coupling included",
            damping_scale: rprod.r_scale.min(t),
            l_damping_scale: rprod.r_scale.max(t),
            oscillation_scale: sep.max(t),
            #[cfg(feature = "std")]
            m_contour: None,
        });
    }
    let profile = Profile::radial_product(rprod.f.clone(), rprod.r_max, rprod.r_scale, excited);
    let pa = Placement { profile: profile.clone(), orientation: EulerAngles::default(), position: [0.0; 3], lambda: 1.0 };
    let pb = Placement { profile, orientation: geo.euler, position: [0.0, 0.0, sep], lambda: 1.0 };
    let pair = Arc::new(PairIntegrand::from_placements(
        CouplingModel::GravityQuadrupole,
        pa,
        pb,
        omega,
        sw,
        OracleOptions::default(),
    )
    .snapping_zeros());
    let (p1, p2, p3) = (pair.clone(), pair.clone(), pair);
    let l: RealKernel = Arc::new(move |k| p1.l_at(Which::AA, k).re.max(0.0));
    let m: ComplexKernel = if excited.l == 1 { Arc::new(|_| Complex64::default()) } else { Arc::new(move |k| p2.m_at(k)) };
    let l_cross: Option<ComplexKernel> = Some(Arc::new(move |k| p3.l_at(Which::AB, k)) as ComplexKernel);
    Ok(SpectralKernelSet {
        l,
        m,
        l_cross,
        lambda_a: a.lambda,
        lambda_b: b.lambda,
        scenario_tag: ScenarioTag::GeneralRadial { l: excited.l },
        prefactor_units: "natural units with T^-1 for k; integrands per dk, coupling included",
        damping_scale: rprod.r_scale.min(t),
        l_damping_scale: rprod.r_scale.max(t),
        oscillation_scale: sep.max(t),
        #[cfg(feature = "std")]
        m_contour: None,
    })
}

/// Builds the matching kernel set for a model and smearing family.
pub fn kernels_for(model: CouplingModel, a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry) -> Result<SpectralKernelSet> {
    let route: Box<dyn Fn() -> Result<SpectralKernelSet>> = match (model, a.smearing) {
        (CouplingModel::ScalarLinear, _) => Box::new(|| scalar_kernels(a, b, geo)),
        (CouplingModel::ScalarQuadrupole, _) => Box::new(|| qscalar_kernels(a, b, geo)),
        (CouplingModel::GravityQuadrupole, SmearingSpec::GaussianIsotropic { .. }) => Box::new(|| gravity_gaussian_kernels(a, b, geo)),
        (CouplingModel::GravityQuadrupole, SmearingSpec::GaussianHarmonic { sigma, q }) => {
            if q.l == 2 && q.m == 0 {
                Box::new(|| gravity_l2_kernels(a, b, geo))
            } else {
                Box::new(move || general_radial_kernels(RadialProduct::gaussian(sigma)?, q, a, b, geo))
            }
        }
        (CouplingModel::GravityQuadrupole, SmearingSpec::HydrogenTransition { ground, excited, a0, .. }) => {
            if ground.n == 1 && excited.n == 3 && excited.l == 2 && excited.m == 0 {
                Box::new(|| hydrogen_320_kernels(a, b, geo))
            } else if ground.n == 1 {
                Box::new(move || general_radial_kernels(RadialProduct::hydrogen(excited.n, excited.l, a0)?, excited.angular(), a, b, geo))
            } else {
                Box::new(|| Err(unsupported("only transitions out of the 1s state are supported")))
            }
        }
    };
    route()
}
