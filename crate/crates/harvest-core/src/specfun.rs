//! Special functions used by the kernels and oracles.
//!
//! Everything here is implemented directly on top of `libm` so that the
//! crate stays `no_std`. Angular-momentum algebra uses exact integer
//! factorials; only the final square roots are taken in floating point.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HarvestError, Result};

/// Highest spherical-Bessel order supported.
pub const BESSEL_L_CAP: u32 = 16;
/// Highest angular momentum supported by `spherical_harmonic`, `wigner_3j`
/// and `wigner_d`.
pub const ANGULAR_L_CAP: u32 = 8;

const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// Orbital and magnetic quantum numbers with `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularQuantum {
    pub l: u32,
    pub m: i32,
}

impl AngularQuantum {
    pub fn new(l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(HarvestError::Domain(format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
        }
        Ok(Self { l, m })
    }
}

// ---------------------------------------------------------------------------
// Exact factorials

const FACT_CAP: usize = 34;

const fn factorial_table() -> [u128; FACT_CAP + 1] {
    let mut t = [1u128; FACT_CAP + 1];
    let mut i = 1;
    while i <= FACT_CAP {
        t[i] = t[i - 1] * i as u128;
        i += 1;
    }
    t
}

static FACTORIALS: [u128; FACT_CAP + 1] = factorial_table();

/// `n!` as an exact integer; `n <= 34`.
pub fn factorial_exact(n: u32) -> u128 {
    FACTORIALS[n as usize]
}

fn fact_f64(n: i64) -> f64 {
    FACTORIALS[n as usize] as f64
}

// ---------------------------------------------------------------------------
// Spherical Bessel functions

/// Spherical Bessel function of the first kind `j_l(x)`.
///
/// Below `|x| = max(0.5, l/2)` the power series is summed; above it the value
/// comes from upward recurrence off the closed forms when `|x| > l`, and from
/// normalised downward (Miller) recurrence otherwise.
pub fn spherical_bessel_j(l: u32, x: f64) -> Result<f64> {
    if l > BESSEL_L_CAP {
        return Err(HarvestError::UnsupportedOrder { l, cap: BESSEL_L_CAP });
    }
    if !x.is_finite() {
        return Err(HarvestError::Domain(format!("non-finite argument {x}")));
    }
    let sign = if x < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let switch = if (l as f64) / 2.0 > 0.5 { l as f64 / 2.0 } else { 0.5 };
    let v = if ax < switch {
        bessel_series(l, ax)
    } else if ax > l as f64 {
        bessel_upward(l, ax)
    } else {
        bessel_miller(l, ax)
    };
    Ok(sign * v)
}

/// Same as [`spherical_bessel_j`] for orders known to be in range.
pub(crate) fn sbj(l: u32, x: f64) -> f64 {
    spherical_bessel_j(l, x).expect("order within cap")
}

fn bessel_series(l: u32, x: f64) -> f64 {
    // x^l / (2l+1)!! * sum_n (-x^2/2)^n / (n! (2l+3)(2l+5)...(2l+2n+1))
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= x / (2 * k + 1) as f64;
    }
    let z = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= z / (n as f64 * (2 * l + 2 * n + 1) as f64);
        sum += term;
        if libm::fabs(term) <= 1e-17 * libm::fabs(sum) || n > 200 {
            break;
        }
    }
    lead * sum
}

fn bessel_upward(l: u32, x: f64) -> f64 {
    let (s, c) = (libm::sin(x), libm::cos(x));
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let mut jm = j0;
    let mut j = s / (x * x) - c / x;
    for n in 1..l {
        let next = (2 * n + 1) as f64 / x * j - jm;
        jm = j;
        j = next;
    }
    j
}

fn bessel_miller(l: u32, x: f64) -> f64 {
    let start = l as usize + 24 + libm::ceil(x) as usize;
    let mut jp = 0.0;
    let mut j = 1e-250;
    let mut at_l = 0.0;
    let mut j1_rec = 0.0;
    for n in (1..=start).rev() {
        let jm = (2 * n + 1) as f64 / x * j - jp;
        jp = j;
        j = jm;
        // j now holds index n-1
        if n - 1 == l as usize {
            at_l = j;
        }
        if n - 1 == 1 {
            j1_rec = j;
        }
        if libm::fabs(j) > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            at_l *= 1e-250;
            j1_rec *= 1e-250;
        }
    }
    let (s, c) = (libm::sin(x), libm::cos(x));
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    if libm::fabs(j0) >= libm::fabs(j1) {
        at_l * (j0 / j)
    } else {
        at_l * (j1 / j1_rec)
    }
}

// ---------------------------------------------------------------------------
// Dawson function and the damped (1 - erf(ix))

/// Dawson function `D(x) = e^{-x^2} int_0^x e^{t^2} dt`.
pub fn dawson(x: f64) -> f64 {
    let ax = libm::fabs(x);
    let v = if ax < 0.5 { dawson_series(ax) } else { dawson_rybicki(ax) };
    if x < 0.0 { -v } else { v }
}

fn dawson_series(x: f64) -> f64 {
    // sum_n (-1)^n 2^n x^{2n+1} / (2n+1)!!
    let z = -2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        term *= z / (2 * n + 1) as f64;
        sum += term;
        if libm::fabs(term) < 1e-18 * libm::fabs(sum) {
            break;
        }
    }
    sum
}

fn dawson_rybicki(x: f64) -> f64 {
    // D(x) = lim_{h->0} pi^{-1/2} sum_{n odd} e^{-(x-nh)^2} / n.
    // The sampling error is of order exp(-pi^2/(4h^2)), about 1e-17 at h = 1/4.
    const H: f64 = 0.25;
    const REACH: i64 = 14;
    let centre = libm::round(x / H) as i64;
    let n0 = if centre % 2 == 0 { centre + 1 } else { centre };
    let mut sum = 0.0;
    for j in -REACH..=REACH {
        let n = n0 + 2 * j;
        let d = x - n as f64 * H;
        sum += libm::exp(-d * d) / n as f64;
    }
    sum / libm::sqrt(PI)
}

/// `e^{-g} (1 - erf(i x))` without ever forming `erfi(x)` or `e^{x^2}` alone.
///
/// `erf(ix) = i erfi(x)` and `erfi(x) = (2/sqrt(pi)) e^{x^2} D(x)`, so the
/// imaginary part is `-(2/sqrt(pi)) e^{x^2 - g} D(x)` with the exponent
/// combined first.
pub fn one_minus_erf_i_damped(x: f64, g: f64) -> Complex64 {
    let re = libm::exp(-g);
    let im = -FRAC_2_SQRT_PI * libm::exp(x * x - g) * dawson(x);
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Legendre functions and spherical harmonics

/// Associated Legendre function `P_l^m(x)` for `m >= 0`, including the
/// Condon-Shortley phase `(-1)^m`.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = libm::sqrt(((1.0 - x) * (1.0 + x)).max(0.0));
    let mut pmm = 1.0;
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= -odd * s;
        odd += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let p = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pm2) / (ll - m) as f64;
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

/// Legendre polynomial `P_l(x)`.
pub fn legendre(l: u32, x: f64) -> f64 {
    assoc_legendre(l, 0, x)
}

/// Orthonormal spherical harmonic with the Condon-Shortley phase.
///
/// Negative `m` is built from `Y_{l,-m} = (-1)^m conj(Y_{l,m})`, so that
/// symmetry holds bit for bit.
pub fn spherical_harmonic(q: AngularQuantum, theta: f64, phi: f64) -> Result<Complex64> {
    if q.m.unsigned_abs() > q.l {
        return Err(HarvestError::Domain(format!("|m| > l in Y_{{{},{}}}", q.l, q.m)));
    }
    if q.l > ANGULAR_L_CAP {
        return Err(HarvestError::UnsupportedOrder { l: q.l, cap: ANGULAR_L_CAP });
    }
    Ok(ylm_unchecked(q.l, q.m, theta, phi))
}

pub(crate) fn ylm_unchecked(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs();
    let norm = libm::sqrt(
        (2 * l + 1) as f64 / (4.0 * PI) * fact_f64((l - am) as i64) / fact_f64((l + am) as i64),
    );
    let p = assoc_legendre(l, am, libm::cos(theta));
    let (s, c) = (libm::sin(am as f64 * phi), libm::cos(am as f64 * phi));
    let y = Complex64::new(norm * p * c, norm * p * s);
    if m >= 0 {
        y
    } else if am % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

// ---------------------------------------------------------------------------
// Wigner 3j and D

#[derive(Clone, Copy)]
struct Rational {
    n: i128,
    d: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    fn add(self, other: Rational) -> Rational {
        let g = gcd(self.d, other.d);
        let d = self.d / g * other.d;
        let n = self.n * (other.d / g) + other.n * (self.d / g);
        let h = gcd(n, d).max(1);
        Rational { n: n / h, d: d / h }
    }
}

/// Wigner 3j symbol by the Racah formula.
///
/// The alternating sum is accumulated as an exact rational, so selection-rule
/// cancellations come out as exact zeros.
///
/// # Panics
/// When any `l_i` exceeds [`ANGULAR_L_CAP`].
pub fn wigner_3j(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
    assert!(
        l1.max(l2).max(l3) <= ANGULAR_L_CAP,
        "wigner_3j supports l <= {ANGULAR_L_CAP}"
    );
    let (j1, j2, j3) = (l1 as i64, l2 as i64, l3 as i64);
    let (m1, m2, m3) = (m1 as i64, m2 as i64, m3 as i64);
    if m1 + m2 + m3 != 0 || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    let tmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let tmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = Rational { n: 0, d: 1 };
    for t in tmin..=tmax {
        let den = FACTORIALS[t as usize]
            * FACTORIALS[(j3 - j2 + t + m1) as usize]
            * FACTORIALS[(j3 - j1 + t - m2) as usize]
            * FACTORIALS[(j1 + j2 - j3 - t) as usize]
            * FACTORIALS[(j1 - t - m1) as usize]
            * FACTORIALS[(j2 - t + m2) as usize];
        let sgn = if t % 2 == 0 { 1 } else { -1 };
        sum = sum.add(Rational { n: sgn, d: den as i128 });
    }
    if sum.n == 0 {
        return 0.0;
    }
    let triangle = fact_f64(j1 + j2 - j3) * fact_f64(j1 - j2 + j3) * fact_f64(-j1 + j2 + j3)
        / fact_f64(j1 + j2 + j3 + 1);
    let moments = fact_f64(j1 + m1)
        * fact_f64(j1 - m1)
        * fact_f64(j2 + m2)
        * fact_f64(j2 - m2)
        * fact_f64(j3 + m3)
        * fact_f64(j3 - m3);
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * libm::sqrt(triangle * moments) * (sum.n as f64 / sum.d as f64)
}

/// Wigner small-d matrix element `d^l_{mu,m}(beta)`.
pub fn wigner_small_d(l: u32, mu: i32, m: i32, beta: f64) -> Result<f64> {
    if l > ANGULAR_L_CAP {
        return Err(HarvestError::UnsupportedOrder { l, cap: ANGULAR_L_CAP });
    }
    if mu.unsigned_abs() > l || m.unsigned_abs() > l {
        return Err(HarvestError::Domain(format!("indices ({mu},{m}) out of range for l = {l}")));
    }
    let (j, mp, m) = (l as i64, mu as i64, m as i64);
    let (c, s) = (libm::cos(beta / 2.0), libm::sin(beta / 2.0));
    let pref = libm::sqrt(fact_f64(j + m) * fact_f64(j - m) * fact_f64(j + mp) * fact_f64(j - mp));
    let smin = 0.max(m - mp);
    let smax = (j + m).min(j - mp);
    let mut sum = 0.0;
    for k in smin..=smax {
        let den = fact_f64(j + m - k) * fact_f64(k) * fact_f64(mp - m + k) * fact_f64(j - mp - k);
        let sgn = if (mp - m + k) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sgn * libm::pow(c, (2 * j + m - mp - 2 * k) as f64)
            * libm::pow(s, (mp - m + 2 * k) as f64)
            / den;
    }
    Ok(pref * sum)
}

/// Wigner D function `D^l_{mu,m}(psi, theta, phi) = e^{-i mu psi} d^l_{mu,m}(theta) e^{-i m phi}`.
pub fn wigner_d(l: u32, mu: i32, m: i32, psi: f64, theta: f64, phi: f64) -> Result<Complex64> {
    let d = wigner_small_d(l, mu, m, theta)?;
    let arg = -(mu as f64) * psi - (m as f64) * phi;
    Ok(Complex64::new(d * libm::cos(arg), d * libm::sin(arg)))
}

// ---------------------------------------------------------------------------
// Laguerre polynomials and hydrogen radial functions

/// Generalised Laguerre polynomial `L_n^{(alpha)}(x)`.
pub fn assoc_laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lm = 1.0;
    let mut l = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm) / (k + 1.0);
        lm = l;
        l = next;
    }
    l
}

/// Which radial function formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialConvention {
    /// Normalised bound states: `e^{-r/(n a0)}` and Laguerre argument `2r/(n a0)`.
    #[default]
    Standard,
    /// The variant with `e^{-r/(2 a0)}` and Laguerre argument `r/a0` for
    /// every `n`. Only normalised for `n = 2`; kept for comparison.
    Printed,
}

/// Hydrogen radial function `R_nl(r)` in units of `a0^{-3/2}`.
pub fn hydrogen_radial(n: u32, l: u32, r: f64, a0: f64) -> Result<f64> {
    hydrogen_radial_with(n, l, r, a0, RadialConvention::Standard)
}

pub fn hydrogen_radial_with(n: u32, l: u32, r: f64, a0: f64, conv: RadialConvention) -> Result<f64> {
    if n == 0 || l >= n {
        return Err(HarvestError::Domain(format!("invalid hydrogen state n = {n}, l = {l}")));
    }
    if !(a0 > 0.0) || r < 0.0 {
        return Err(HarvestError::Domain(format!("need r >= 0 and a0 > 0, got r = {r}, a0 = {a0}")));
    }
    let nf = n as f64;
    let norm = libm::pow(2.0 / (nf * a0), 1.5)
        * libm::sqrt(fact_f64((n - l - 1) as i64) / (2.0 * nf * fact_f64((n + l) as i64)));
    let k = n - l - 1;
    let alpha = (2 * l + 1) as f64;
    Ok(match conv {
        RadialConvention::Standard => {
            let rho = 2.0 * r / (nf * a0);
            norm * libm::exp(-rho / 2.0) * libm::pow(rho, l as f64) * assoc_laguerre(k, alpha, rho)
        }
        RadialConvention::Printed => {
            let rho = r / a0;
            norm * libm::exp(-r / (2.0 * a0)) * libm::pow(rho, l as f64) * assoc_laguerre(k, alpha, rho)
        }
    })
}
