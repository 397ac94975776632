//! Detector, switching and geometry data plus the closed-form switching and
//! smearing transforms.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HarvestError, Result};
use crate::specfun::{one_minus_erf_i_damped, AngularQuantum, RadialConvention};

/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035_999_084;

/// Electron mass in Planck units.
pub const ELECTRON_MASS_PLANCK: f64 = 4.2e-23;

/// Hydrogen-atom mass in Planck units (proton plus electron, about 1.674e-27 kg).
pub const HYDROGEN_MASS_PLANCK: f64 = 7.69e-20;

/// Gaussian switching `chi(t) = (2 pi)^{-1/2} e^{-t^2 / 2T^2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingProfile {
    pub t: f64,
}

impl SwitchingProfile {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(HarvestError::Domain(format!("switching width must be positive, got {t}")));
        }
        Ok(Self { t })
    }
}

impl Default for SwitchingProfile {
    fn default() -> Self {
        Self { t: 1.0 }
    }
}

/// Bound-state quantum numbers `(n, l, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HydrogenState {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl HydrogenState {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n == 0 || l >= n || m.unsigned_abs() > l {
            return Err(HarvestError::Domain(format!("invalid hydrogen state ({n},{l},{m})")));
        }
        Ok(Self { n, l, m })
    }

    pub fn angular(&self) -> AngularQuantum {
        AngularQuantum { l: self.l, m: self.m }
    }
}

/// Spatial profile of a detector, centred on the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmearingSpec {
    /// `(2 pi sigma^2)^{-3/2} e^{-r^2/2 sigma^2}`.
    GaussianIsotropic { sigma: f64 },
    /// The isotropic Gaussian times `Y_lm` of the excited state (ground state `l = m = 0`).
    GaussianHarmonic { sigma: f64, q: AngularQuantum },
    /// `R_e(r) R_g(r) Y_e Y_g^*` for a hydrogen transition ground -> excited.
    HydrogenTransition {
        ground: HydrogenState,
        excited: HydrogenState,
        a0: f64,
        convention: RadialConvention,
    },
}

impl SmearingSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SmearingSpec::GaussianIsotropic { sigma } => positive("sigma", sigma),
            SmearingSpec::GaussianHarmonic { sigma, q } => {
                positive("sigma", sigma)?;
                AngularQuantum::new(q.l, q.m).map(|_| ())
            }
            SmearingSpec::HydrogenTransition { ground, excited, a0, .. } => {
                positive("a0", a0)?;
                HydrogenState::new(ground.n, ground.l, ground.m)?;
                HydrogenState::new(excited.n, excited.l, excited.m)?;
                Ok(())
            }
        }
    }

    /// Characteristic radius: `sigma` for Gaussians, `a0` for hydrogen.
    pub fn size(&self) -> f64 {
        match *self {
            SmearingSpec::GaussianIsotropic { sigma } | SmearingSpec::GaussianHarmonic { sigma, .. } => sigma,
            SmearingSpec::HydrogenTransition { a0, .. } => a0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HarvestError::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// One detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub lambda: f64,
    pub gap: f64,
    pub smearing: SmearingSpec,
    pub switching: SwitchingProfile,
}

impl DetectorConfig {
    pub fn new(lambda: f64, gap: f64, smearing: SmearingSpec, switching: SwitchingProfile) -> Result<Self> {
        let d = Self { lambda, gap, smearing, switching };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(HarvestError::Domain(format!("coupling must be >= 0, got {}", self.lambda)));
        }
        if !(self.gap >= 0.0) || !self.gap.is_finite() {
            return Err(HarvestError::Domain(format!("gap must be >= 0, got {}", self.gap)));
        }
        SwitchingProfile::new(self.switching.t)?;
        self.smearing.validate()
    }
}

/// Euler angles `(psi, theta, phi)` in the z-y-z convention.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub psi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl EulerAngles {
    pub fn new(psi: f64, theta: f64, phi: f64) -> Self {
        Self { psi, theta, phi }
    }

    /// Angles of the inverse rotation.
    pub fn inverse(&self) -> Self {
        Self { psi: -self.phi, theta: -self.theta, phi: -self.psi }
    }

    /// Active rotation matrix `R_z(psi) R_y(theta) R_z(phi)`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let rz = |a: f64| {
            let (s, c) = (libm::sin(a), libm::cos(a));
            [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
        };
        let (s, c) = (libm::sin(self.theta), libm::cos(self.theta));
        let ry = [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]];
        mat_mul(&mat_mul(&rz(self.psi), &ry), &rz(self.phi))
    }
}

pub(crate) fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Separation and relative orientation of the pair.
///
/// Detector B sits at `L z_A`; the Euler angles rotate B's angular-momentum
/// axis relative to A's.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairGeometry {
    pub separation: f64,
    pub euler: EulerAngles,
}

impl PairGeometry {
    pub fn new(separation: f64, euler: EulerAngles) -> Result<Self> {
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(HarvestError::Domain(format!("separation must be >= 0, got {separation}")));
        }
        if !(euler.psi.is_finite() && euler.theta.is_finite() && euler.phi.is_finite()) {
            return Err(HarvestError::Domain("Euler angles must be finite".into()));
        }
        Ok(Self { separation, euler })
    }

    pub fn aligned(separation: f64) -> Result<Self> {
        Self::new(separation, EulerAngles::default())
    }
}

/// Which field the detectors couple to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingModel {
    ScalarLinear,
    ScalarQuadrupole,
    GravityQuadrupole,
}

/// `|chi~(omega)|^2 = T^2 e^{-T^2 omega^2}`.
pub fn chi_tilde_sq(omega: f64, sw: SwitchingProfile) -> f64 {
    let t = sw.t;
    t * t * libm::exp(-t * t * omega * omega)
}

/// `Q(k, Omega) = (T^2/2) e^{-T^2 (k^2 + Omega^2)} (1 - erf(i k T))`.
pub fn q_factor(k: f64, omega: f64, sw: SwitchingProfile) -> Complex64 {
    let t = sw.t;
    0.5 * t * t * one_minus_erf_i_damped(k * t, t * t * (k * k + omega * omega))
}

/// Fourier transform of the unit-normalised isotropic Gaussian.
pub fn gaussian_ft(sigma: f64, k: f64) -> f64 {
    libm::exp(-0.5 * k * k * sigma * sigma)
}

/// Fourier transform of `x^i x^j` times the isotropic Gaussian:
/// `(sigma^2 delta_ij - sigma^4 k_i k_j) e^{-k^2 sigma^2 / 2}`.
pub fn quadrupole_ft_tensor(sigma: f64, kvec: [f64; 3]) -> [[Complex64; 3]; 3] {
    let s2 = sigma * sigma;
    let k2: f64 = kvec.iter().map(|c| c * c).sum();
    let g = libm::exp(-0.5 * k2 * s2);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let d = if i == j { s2 } else { 0.0 };
            out[i][j] = Complex64::new((d - s2 * s2 * kvec[i] * kvec[j]) * g, 0.0);
        }
    }
    out
}

/// Multiply a transform by the shift phase `e^{i k.L}` of a detector at `lvec`.
pub fn shifted(t: [[Complex64; 3]; 3], kvec: [f64; 3], lvec: [f64; 3]) -> [[Complex64; 3]; 3] {
    let ph = kvec[0] * lvec[0] + kvec[1] * lvec[1] + kvec[2] * lvec[2];
    let z = Complex64::new(libm::cos(ph), libm::sin(ph));
    t.map(|row| row.map(|v| v * z))
}

/// `lambda = sqrt(pi/2) m / m_p`.
pub fn coupling_from_mass(mass_in_planck_units: f64) -> f64 {
    libm::sqrt(PI / 2.0) * mass_in_planck_units
}

/// Bohr radius convention used for the hydrogen sweeps: `a0 = alpha / (2 Omega)`.
pub fn bohr_radius_for_gap(gap: f64) -> f64 {
    FINE_STRUCTURE / (2.0 * gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_gap_rejected() {
        let s = SmearingSpec::GaussianIsotropic { sigma: 0.2 };
        assert!(DetectorConfig::new(1.0, -1.0, s, SwitchingProfile::default()).is_err());
        assert!(DetectorConfig::new(1.0, 1.0, s, SwitchingProfile::default()).is_ok());
    }

    #[test]
    fn inverse_rotation() {
        let e = EulerAngles::new(0.3, 1.1, -0.7);
        let p = mat_mul(&e.matrix(), &e.inverse().matrix());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p[i][j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn q_at_zero_momentum() {
        let sw = SwitchingProfile::new(1.3).unwrap();
        let q = q_factor(0.0, 2.0, sw);
        assert!((q.re - 0.5 * 1.69 * libm::exp(-1.69 * 4.0)).abs() < 1e-16);
        assert_eq!(q.im, 0.0);
    }
}
