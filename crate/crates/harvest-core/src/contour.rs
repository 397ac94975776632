//! Complex-plane evaluation of the non-local `M` integrals.
//!
//! On the real axis the time-ordering factor `1 - erf(i k T)` decays only like
//! `1/k`, so a slowly decaying smearing transform makes `int M(k) dk` cancel by
//! many orders of magnitude. Past `k0 = pi/L` the Bessel factor is split into
//! `e^{+ikL}` and `e^{-ikL}` parts, and each part is integrated along a ray
//! at `+-45` degrees where it decays exponentially. The closing arcs vanish
//! because every smearing shape used here is analytic and bounded in that
//! sector.

use alloc::sync::Arc;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

use crate::error::Result;
use crate::kernels::BesselMix;
use crate::quadrature::{integrate_interval, integrate_semi_infinite, QuadratureResult};

pub(crate) type Shape = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

impl BesselMix {
    /// `(A, B)` with the mix equal to `A(x) sin x + B(x) cos x`.
    fn sin_cos(&self, x: Complex64) -> (Complex64, Complex64) {
        let r = x.inv();
        let r2 = r * r;
        let mut a = r * self.c0 + (r2 * r * 3.0 - r) * self.c2;
        let mut b = r2 * (-3.0 * self.c2);
        if self.inv_x2 {
            a *= r2;
            b *= r2;
        }
        (a, b)
    }
}

/// Analytic form of `M(k) = c_m q(k) shape(k) mix(kL)`.
#[derive(Clone)]
pub(crate) struct MContour {
    pub c_m: f64,
    pub shape: Shape,
    pub mix: BesselMix,
    pub sep: f64,
    pub omega: f64,
    pub t: f64,
}

impl core::fmt::Debug for MContour {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MContour").field("mix", &self.mix).field("sep", &self.sep).finish_non_exhaustive()
    }
}

impl MContour {
    /// `e^{-T^2(k^2 + Omega^2)} (1 - erf(i k T))`, continued off the real axis.
    pub fn q(&self, k: Complex64) -> Complex64 {
        let g = self.t * self.t * self.omega * self.omega;
        let z = -k * self.t;
        if z.im >= 0.0 {
            z.w() * libm::exp(-g)
        } else {
            // w(z) = 2 e^{-z^2} - w(-z), keeping the damping inside the exponent
            (-(z * z) - g).exp() * 2.0 - (-z).w() * libm::exp(-g)
        }
    }

    /// The full integrand at complex `k` (for comparison with the real-axis form).
    pub fn integrand(&self, k: Complex64) -> Complex64 {
        let x = k * self.sep;
        let (a, b) = self.mix.sin_cos(x);
        self.q(k) * (self.shape)(k) * (a * x.sin() + b * x.cos()) * self.c_m
    }

    fn branch(&self, k: Complex64, up: bool) -> Complex64 {
        let x = k * self.sep;
        let (a, b) = self.mix.sin_cos(x);
        let i = Complex64::i();
        // sin x = (e^{ix} - e^{-ix}) / 2i, cos x = (e^{ix} + e^{-ix}) / 2
        let (coef, phase) = if up { (a / (i * 2.0) + b * 0.5, (i * x).exp()) } else { (-a / (i * 2.0) + b * 0.5, (-i * x).exp()) };
        self.q(k) * (self.shape)(k) * coef * phase * self.c_m
    }

    /// `int_0^inf M(k) dk` times `scale`, with `m_real` the real-axis integrand.
    pub fn integrate(&self, m_real: impl Fn(f64) -> Complex64, scale: f64, rel_tol: f64) -> Result<QuadratureResult> {
        let k0 = PI / self.sep;
        let tol = rel_tol / 3.0;
        let near = integrate_interval(&m_real, 0.0, k0, k0 / 4.0, tol)?;
        let decay = self.sep * FRAC_1_SQRT_2;
        let osc = self.sep.max(self.t);
        let mut parts = [near, near, near];
        for (slot, up) in parts[1..].iter_mut().zip([true, false]) {
            let dir = Complex64::from_polar(1.0, if up { PI / 4.0 } else { -PI / 4.0 });
            *slot = integrate_semi_infinite(|s| self.branch(Complex64::new(k0, 0.0) + dir * s, up) * dir * scale, decay, osc, tol)?;
        }
        let value = parts.iter().map(|p| p.value).sum();
        Ok(QuadratureResult {
            value,
            abs_error_estimate: parts.iter().map(|p| p.abs_error_estimate).sum(),
            panels_used: parts.iter().map(|p| p.panels_used).sum(),
            truncation_k: k0,
        })
    }
}
