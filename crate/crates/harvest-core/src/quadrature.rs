//! Semi-infinite adaptive quadrature for damped oscillatory integrands and
//! a product rule on the sphere.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HarvestError, Result};

/// Adaptive bisections allowed beyond the initial partition.
pub const PANEL_CAP: usize = 1 << 16;

/// Absolute error floor below which an integral counts as converged.
pub const ABS_FLOOR: f64 = 1e-300;

/// Relative rounding noise of one Gauss-Kronrod panel, in units of `int |f|`.
pub const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

// Convergence floor of the summed error; above the sum of panel floors so
// that a fully noise-limited partition counts as converged.
const ROUNDOFF_TARGET: f64 = 4.0 * ROUNDOFF;

const MAX_EXTENSIONS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
    pub truncation_k: f64,
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    // largest |f| seen on the panel's Kronrod nodes
    peak: f64,
    // Kronrod estimate of the integral of |f|
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // worst error first; ties broken by position so the order is total
        self.err.total_cmp(&other.err).then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[14] = f(c);
    for j in 0..7 {
        let dx = h * XGK[j];
        fv[2 * j] = f(c - dx);
        fv[2 * j + 1] = f(c + dx);
    }
    let w = |i: usize| if i == 14 { WGK[7] } else { WGK[i / 2] };
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = fv[14] * WG[3];
    let mut peak = 0.0f64;
    let mut abs = 0.0;
    for (i, v) in fv.iter().enumerate() {
        kron += v * w(i);
        abs += v.norm() * w(i);
        peak = peak.max(v.norm());
        if i < 14 && (i / 2) % 2 == 1 {
            gauss += v * WG[i / 4];
        }
    }
    let mean = kron * 0.5;
    let asc: f64 = fv.iter().enumerate().map(|(i, v)| (v - mean).norm() * w(i)).sum::<f64>() * h;
    // QUADPACK scaling of the raw Gauss-Kronrod difference, floored at rounding level.
    let mut err = ((kron - gauss) * h).norm();
    if asc != 0.0 && err != 0.0 {
        err = asc * libm::pow(200.0 * err / asc, 1.5).min(1.0);
    }
    err = err.max(ROUNDOFF * abs * h);
    Panel { a, b, value: kron * h, err, peak, abs: abs * h }
}

fn total(panels: &[Panel]) -> (Complex64, f64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut e = 0.0;
    for p in panels {
        v += p.value;
        e += p.err;
    }
    (v, e)
}

/// Error target: `rel_tol |value|`, but never below the rounding noise of
/// summing an integrand whose absolute integral is `abs`.
fn target(rel_tol: f64, value: Complex64, abs: f64) -> f64 {
    (rel_tol * value.norm()).max(ROUNDOFF_TARGET * abs).max(ABS_FLOOR)
}

/// `int_0^inf f(k) dk` for an integrand with an envelope that decays on the
/// scale `1/damping_scale` and oscillates with frequency up to
/// `oscillation_scale`.
///
/// The range is truncated at `sqrt(ln(1/eps)) / damping_scale` plus the
/// location of the envelope peak, `eps = rel_tol * 1e-4`, and extended until
/// `|f(k_max)| k_max <= eps |value|`. The initial panels span at most
/// one period `2 pi / max(oscillation_scale, damping_scale)`; panels are then bisected
/// worst-first until the summed Gauss-Kronrod error meets `rel_tol`, or
/// until it reaches a rounding floor proportional to `int |f|` when cancellation
/// makes `rel_tol` unreachable in double precision.
pub fn integrate_semi_infinite<F>(f: F, damping_scale: f64, oscillation_scale: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(damping_scale > 0.0) || !damping_scale.is_finite() {
        return Err(HarvestError::Domain(format!("damping scale must be positive, got {damping_scale}")));
    }
    if !(oscillation_scale >= 0.0) || !oscillation_scale.is_finite() {
        return Err(HarvestError::Domain(format!("oscillation scale must be >= 0, got {oscillation_scale}")));
    }
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(HarvestError::Domain(format!("relative tolerance must lie in (0, 1e-3], got {rel_tol}")));
    }
    let eps_tail = rel_tol * 1e-4;
    let base = libm::sqrt(libm::log(1.0 / eps_tail)) / damping_scale;
    let k_peak = envelope_peak(&f, base);
    let width = 2.0 * PI / oscillation_scale.max(damping_scale);

    let mut k_max = base + k_peak;
    let mut panels: Vec<Panel> = Vec::new();
    let mut covered = 0.0;
    let mut refinements = 0usize;
    for _ in 0..MAX_EXTENSIONS {
        add_panels(&f, &mut panels, covered, k_max, width);
        covered = k_max;
        refine(&f, &mut panels, rel_tol, &mut refinements)?;
        let (value, err) = total(&panels);
        let abs: f64 = panels.iter().map(|p| p.abs).sum();
        let edge = tail_envelope(&panels, k_max, width);
        if edge * k_max <= (eps_tail * value.norm()).max(ROUNDOFF_TARGET * abs) || edge == 0.0 {
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let (value, _) = total(&panels);
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: err,
                panels_used: panels.len(),
                truncation_k: k_max,
            });
        }
        k_max *= 1.5;
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let (value, err) = total(&panels);
    Err(HarvestError::Convergence {
        partial: QuadratureResult { value, abs_error_estimate: err, panels_used: panels.len(), truncation_k: covered },
    })
}

/// Real-valued convenience wrapper.
pub fn integrate_semi_infinite_real<F>(f: F, damping_scale: f64, oscillation_scale: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_semi_infinite(|k| Complex64::new(f(k), 0.0), damping_scale, oscillation_scale, rel_tol)
}

/// `int_a^b f(k) dk` by adaptive Gauss-Kronrod from an even partition with
/// panels no wider than `width`.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, width: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite() && b >= a) {
        return Err(HarvestError::Domain(format!("interval [{a}, {b}] is not a finite ordered range")));
    }
    if !(width > 0.0) {
        return Err(HarvestError::Domain(format!("panel width must be positive, got {width}")));
    }
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(HarvestError::Domain(format!("relative tolerance must lie in (0, 1e-3], got {rel_tol}")));
    }
    let mut panels = Vec::new();
    if b > a {
        add_panels(&f, &mut panels, a, b, width);
        let mut used = 0;
        refine(&f, &mut panels, rel_tol, &mut used)?;
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let (value, err) = total(&panels);
    Ok(QuadratureResult { value, abs_error_estimate: err, panels_used: panels.len(), truncation_k: b })
}

fn envelope_peak<F: Fn(f64) -> Complex64>(f: &F, base: f64) -> f64 {
    const SAMPLES: usize = 512;
    let mut best = (0.0, 0.0);
    for j in 1..=SAMPLES {
        let k = base * j as f64 / SAMPLES as f64;
        let v = f(k).norm();
        if v > best.1 {
            best = (k, v);
        }
    }
    best.0
}

fn add_panels<F: Fn(f64) -> Complex64>(f: &F, panels: &mut Vec<Panel>, from: f64, to: f64, width: f64) {
    let n = libm::ceil((to - from) / width).max(1.0) as usize;
    let h = (to - from) / n as f64;
    panels.reserve(n);
    for i in 0..n {
        let a = from + h * i as f64;
        let b = if i + 1 == n { to } else { from + h * (i + 1) as f64 };
        panels.push(gk15(f, a, b));
    }
}

fn refine<F: Fn(f64) -> Complex64>(f: &F, panels: &mut Vec<Panel>, rel_tol: f64, used: &mut usize) -> Result<()> {
    let (mut value, mut err) = total(panels);
    let mut abs: f64 = panels.iter().map(|p| p.abs).sum();
    if err <= target(rel_tol, value, abs) {
        return Ok(());
    }
    let mut heap: BinaryHeap<Panel> = panels.drain(..).collect();
    while err > target(rel_tol, value, abs) {
        if *used >= PANEL_CAP {
            let mut all: Vec<Panel> = heap.into_vec();
            all.sort_by(|p, q| p.a.total_cmp(&q.a));
            let (v, e) = total(&all);
            let k = all.last().map(|p| p.b).unwrap_or(0.0);
            return Err(HarvestError::Convergence {
                partial: QuadratureResult { value: v, abs_error_estimate: e, panels_used: all.len(), truncation_k: k },
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        *used += 1;
    }
    panels.extend(heap.into_vec());
    Ok(())
}

fn tail_envelope(panels: &[Panel], k_max: f64, width: f64) -> f64 {
    let from = k_max - 2.0 * width;
    panels.iter().filter(|p| p.b > from).map(|p| p.peak).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Gauss-Legendre and the sphere

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    if n == 1 {
        return (alloc::vec![0.0], alloc::vec![2.0]);
    }
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let derivative = |z: f64| {
        let (p, pm) = legendre_pair(n, z);
        (p, n as f64 * (z * p - pm) / (z * z - 1.0))
    };
    for i in 0..n.div_ceil(2) {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = derivative(z);
            let dz = p / dp;
            z -= dz;
            if libm::fabs(dz) < 1e-16 {
                break;
            }
        }
        let (_, dp) = derivative(z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

// (P_n(z), P_{n-1}(z))
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// One node of a sphere rule.
#[derive(Debug, Clone, Copy)]
pub struct SphereNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
    pub dir: [f64; 3],
}

/// Product rule: Gauss-Legendre in `cos(theta)` times uniform in `phi`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<SphereNode>,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereRule {
    /// Exact for spherical-harmonic content up to degree `order`.
    pub fn new(order: usize) -> Self {
        Self::with_counts(order / 2 + 1, order + 1)
    }

    pub fn with_counts(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let dphi = 2.0 * PI / n_phi as f64;
        for (xi, wi) in x.iter().zip(&w) {
            let theta = libm::acos(*xi);
            let st = libm::sqrt((1.0 - xi * xi).max(0.0));
            for j in 0..n_phi {
                let phi = dphi * j as f64;
                nodes.push(SphereNode {
                    theta,
                    phi,
                    weight: wi * dphi,
                    dir: [st * libm::cos(phi), st * libm::sin(phi), *xi],
                });
            }
        }
        Self { nodes, n_theta, n_phi }
    }

    pub fn integrate<G: FnMut(&SphereNode) -> Complex64>(&self, mut g: G) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for node in &self.nodes {
            acc += g(node) * node.weight;
        }
        acc
    }
}

/// `int dOmega g(theta, phi)` with a rule exact up to degree `order`.
///
/// # Panics
/// When `order < 4`.
pub fn sphere_quadrature<G: Fn(f64, f64) -> Complex64>(g: G, order: usize) -> Complex64 {
    assert!(order >= 4, "sphere rule order must be at least 4");
    SphereRule::new(order).integrate(|n| g(n.theta, n.phi))
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels of
/// `n` nodes each; returns (nodes, weights).
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * n);
    let mut ws = Vec::with_capacity(panels * n);
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            xs.push(c + 0.5 * h * xi);
            ws.push(0.5 * h * wi);
        }
    }
    (xs, ws)
}
