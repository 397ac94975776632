//! Brute-force reference computations.
//!
//! These evaluate the full three-dimensional momentum integrals directly:
//! smearing transforms come from a multipole expansion with numerically
//! computed radial transforms and angular coefficients, the graviton sum runs
//! through the explicit transverse-traceless projector, and the angular
//! integral over the wave vector is done on a product rule. Nothing here uses
//! the reduced one-dimensional kernels, which is the point. They are slow.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{HarvestError, Result};
use crate::model::{
    chi_tilde_sq, q_factor, CouplingModel, DetectorConfig, EulerAngles, PairGeometry, SmearingSpec, SwitchingProfile,
};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, SphereRule};
use crate::specfun::{hydrogen_radial_with, sbj, ylm_unchecked, AngularQuantum};

type Mat3 = [[f64; 3]; 3];
type CMat3 = [[Complex64; 3]; 3];

const CZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn czero3() -> CMat3 {
    [[CZERO; 3]; 3]
}

// ---------------------------------------------------------------------------
// Polarization tensors and the TT projector

/// Graviton polarization data for the direction `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub khat: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub big_e1: Mat3,
    pub big_e2: Mat3,
}

pub fn polarization_basis(alpha: f64, beta: f64) -> PolarizationBasis {
    let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
    let (sb, cb) = (libm::sin(beta), libm::cos(beta));
    let khat = [sa * cb, sa * sb, ca];
    let e1 = [ca * cb, ca * sb, -sa];
    let e2 = [-sb, cb, 0.0];
    let mut big_e1 = [[0.0; 3]; 3];
    let mut big_e2 = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            big_e1[i][j] = (e1[i] * e1[j] - e2[i] * e2[j]) / SQRT_2;
            big_e2[i][j] = (e1[i] * e2[j] + e2[i] * e1[j]) / SQRT_2;
        }
    }
    PolarizationBasis { khat, e1, e2, big_e1, big_e2 }
}

/// Rank-4 tensor indexed `[i][j][k][l]`.
pub type Rank4 = [[[[f64; 3]; 3]; 3]; 3];

fn transverse(khat: [f64; 3]) -> Mat3 {
    let mut pi = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            pi[i][j] = if i == j { 1.0 } else { 0.0 } - khat[i] * khat[j];
        }
    }
    pi
}

/// `P_ijkl = (Pi_ik Pi_jl + Pi_il Pi_jk - Pi_ij Pi_kl) / 2` with `Pi = delta - k k`.
pub fn tt_projector(khat: [f64; 3]) -> Result<Rank4> {
    let n = libm::sqrt(khat.iter().map(|c| c * c).sum());
    if libm::fabs(n - 1.0) > 1e-12 {
        return Err(HarvestError::Domain(format!("direction is not a unit vector (|k| = {n})")));
    }
    let pi = transverse(khat);
    let mut p = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    p[i][j][k][l] = 0.5 * (pi[i][k] * pi[j][l] + pi[i][l] * pi[j][k] - pi[i][j] * pi[k][l]);
                }
            }
        }
    }
    Ok(p)
}

/// `P_ijkl F_ij G_kl` for symmetric `F`, `G`, as `tr(Pi F Pi G) - tr(Pi F) tr(Pi G) / 2`.
pub fn tt_contract(khat: [f64; 3], f: &CMat3, g: &CMat3) -> Complex64 {
    let pi = transverse(khat);
    let pf = mul_rc(&pi, f);
    let pg = mul_rc(&pi, g);
    let mut tr_pfpg = CZERO;
    let mut tr_pf = CZERO;
    let mut tr_pg = CZERO;
    for i in 0..3 {
        tr_pf += pf[i][i];
        tr_pg += pg[i][i];
        for j in 0..3 {
            tr_pfpg += pf[i][j] * pg[j][i];
        }
    }
    tr_pfpg - 0.5 * tr_pf * tr_pg
}

fn mul_rc(a: &Mat3, b: &CMat3) -> CMat3 {
    let mut c = czero3();
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = CZERO;
            for k in 0..3 {
                acc += b[k][j] * a[i][k];
            }
            c[i][j] = acc;
        }
    }
    c
}

// ---------------------------------------------------------------------------
// Smearing profiles

/// Angular dependence of a smearing in the detector's own frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angular {
    Isotropic,
    /// `scale * Y_q`.
    Harmonic { q: AngularQuantum, scale: f64 },
    /// `Y_excited * conj(Y_ground)`.
    Transition { excited: AngularQuantum, ground: AngularQuantum },
}

impl Angular {
    fn degree(&self) -> u32 {
        match *self {
            Angular::Isotropic => 0,
            Angular::Harmonic { q, .. } => q.l,
            Angular::Transition { excited, ground } => excited.l + ground.l,
        }
    }

    fn value(&self, dir: [f64; 3]) -> Complex64 {
        let theta = libm::acos(dir[2].clamp(-1.0, 1.0));
        let phi = libm::atan2(dir[1], dir[0]);
        match *self {
            Angular::Isotropic => Complex64::new(1.0, 0.0),
            Angular::Harmonic { q, scale } => ylm_unchecked(q.l, q.m, theta, phi) * scale,
            Angular::Transition { excited, ground } => {
                ylm_unchecked(excited.l, excited.m, theta, phi) * ylm_unchecked(ground.l, ground.m, theta, phi).conj()
            }
        }
    }
}

/// Detector-centred smearing `g(r) Phi(x_hat)`.
#[derive(Clone)]
pub struct Profile {
    radial: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Radius beyond which `g` is negligible.
    pub r_max: f64,
    /// Length on which `g` varies.
    pub r_scale: f64,
    pub angular: Angular,
}

impl core::fmt::Debug for Profile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Profile").field("r_max", &self.r_max).field("r_scale", &self.r_scale).field("angular", &self.angular).finish()
    }
}

impl Profile {
    pub fn new(radial: Arc<dyn Fn(f64) -> f64 + Send + Sync>, r_max: f64, r_scale: f64, angular: Angular) -> Self {
        Self { radial, r_max, r_scale, angular }
    }

    pub fn from_smearing(s: &SmearingSpec) -> Result<Self> {
        s.validate()?;
        Ok(match *s {
            SmearingSpec::GaussianIsotropic { sigma } => Self::gaussian(sigma, Angular::Isotropic),
            SmearingSpec::GaussianHarmonic { sigma, q } => Self::gaussian(sigma, Angular::Harmonic { q, scale: 1.0 }),
            SmearingSpec::HydrogenTransition { ground, excited, a0, convention } => {
                let (ng, lg, ne, le) = (ground.n, ground.l, excited.n, excited.l);
                let radial = move |r: f64| {
                    hydrogen_radial_with(ne, le, r, a0, convention).unwrap_or(0.0)
                        * hydrogen_radial_with(ng, lg, r, a0, convention).unwrap_or(0.0)
                };
                // the product decays like e^{-r (1/n_g + 1/n_e) / a0}
                let rate = 1.0 / ng as f64 + 1.0 / ne as f64;
                Self::new(Arc::new(radial), 45.0 * a0 / rate, a0, Angular::Transition {
                    excited: excited.angular(),
                    ground: ground.angular(),
                })
            }
        })
    }

    fn gaussian(sigma: f64, angular: Angular) -> Self {
        let norm = libm::pow(2.0 * PI * sigma * sigma, -1.5);
        let radial = move |r: f64| norm * libm::exp(-0.5 * r * r / (sigma * sigma));
        Self::new(Arc::new(radial), 10.0 * sigma, sigma, angular)
    }

    /// `R(r) Y_q Y_00^*` for a radial product `R`.
    pub fn radial_product(radial: Arc<dyn Fn(f64) -> f64 + Send + Sync>, r_max: f64, r_scale: f64, q: AngularQuantum) -> Self {
        Self::new(radial, r_max, r_scale, Angular::Harmonic { q, scale: 1.0 / libm::sqrt(4.0 * PI) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    Plain,
    RadiusSq,
    Tensor,
}

impl Weight {
    fn of(model: CouplingModel) -> Self {
        match model {
            CouplingModel::ScalarLinear => Weight::Plain,
            CouplingModel::ScalarQuadrupole => Weight::RadiusSq,
            CouplingModel::GravityQuadrupole => Weight::Tensor,
        }
    }

    fn radial_power(self) -> i32 {
        match self {
            Weight::Plain => 2,
            Weight::RadiusSq | Weight::Tensor => 4,
        }
    }
}

struct Term {
    l: u32,
    m: i32,
    coeff: CMat3,
}

/// Multipole form of `F~(k) = int d^3x w(x) g(r) Phi(R^{-1} x_hat) e^{i k.x}`:
/// `sum_LM 4 pi i^L conj(Y_LM(k_hat)) rho_L(k) C_LM`.
struct Transform {
    profile: Profile,
    weight: Weight,
    terms: Vec<Term>,
}

impl Transform {
    fn build(profile: Profile, rot: EulerAngles, weight: Weight, order: usize) -> Self {
        let rule = SphereRule::new(order);
        let r = rot.matrix();
        let lmax = (profile.angular.degree() + if weight == Weight::Plain { 0 } else { 2 }).min(8);
        let vals: Vec<Complex64> = rule
            .nodes
            .iter()
            .map(|n| {
                // R^{-1} x = R^T x
                let d = n.dir;
                let body = [
                    r[0][0] * d[0] + r[1][0] * d[1] + r[2][0] * d[2],
                    r[0][1] * d[0] + r[1][1] * d[1] + r[2][1] * d[2],
                    r[0][2] * d[0] + r[1][2] * d[1] + r[2][2] * d[2],
                ];
                profile.angular.value(body)
            })
            .collect();
        let mut terms = Vec::new();
        let mut biggest = 0.0f64;
        for l in 0..=lmax {
            for m in -(l as i32)..=(l as i32) {
                let mut c = czero3();
                for (node, v) in rule.nodes.iter().zip(&vals) {
                    let y = ylm_unchecked(l, m, node.theta, node.phi) * *v * node.weight;
                    match weight {
                        Weight::Plain | Weight::RadiusSq => c[0][0] += y,
                        Weight::Tensor => {
                            for i in 0..3 {
                                for j in 0..3 {
                                    c[i][j] += y * (node.dir[i] * node.dir[j]);
                                }
                            }
                        }
                    }
                }
                let size = c.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
                biggest = biggest.max(size);
                terms.push(Term { l, m, coeff: c });
            }
        }
        terms.retain(|t| t.coeff.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max) > 1e-14 * biggest);
        Self { profile, weight, terms }
    }

    fn degrees(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.terms.iter().map(|t| t.l).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    /// `rho_L(k) = int_0^r_max r^p g(r) j_L(k r) dr` for every degree present.
    fn radial_transforms(&self, k: f64, ls: &[u32]) -> [f64; 9] {
        let p = self.weight.radial_power();
        let rmax = self.profile.r_max;
        let mut width = 0.5 * self.profile.r_scale;
        if k > 0.0 {
            width = width.min(PI / (2.0 * k));
        }
        let panels = libm::ceil(rmax / width).max(1.0) as usize;
        let (xs, ws) = composite_gauss_legendre(0.0, rmax, panels, 12);
        let mut out = [0.0; 9];
        for (x, w) in xs.iter().zip(&ws) {
            let g = (self.profile.radial)(*x) * libm::pow(*x, p as f64) * w;
            for &l in ls {
                out[l as usize] += g * sbj(l, k * x);
            }
        }
        out
    }

    /// `(F~(k n), F~(-k n))` at a direction whose harmonics are `ylm[(L, M)]`.
    fn eval(&self, ylm: &YlmCache, rho: &[f64; 9]) -> (CMat3, CMat3) {
        let mut plus = czero3();
        let mut minus = czero3();
        for t in &self.terms {
            let il = i_pow(t.l);
            let f = il * ylm.get(t.l, t.m).conj() * (4.0 * PI * rho[t.l as usize]);
            let fm = if t.l % 2 == 0 { f } else { -f };
            let dims = if self.weight == Weight::Tensor { 3 } else { 1 };
            for i in 0..dims {
                for j in 0..dims {
                    plus[i][j] += f * t.coeff[i][j];
                    minus[i][j] += fm * t.coeff[i][j];
                }
            }
        }
        (plus, minus)
    }
}

fn i_pow(l: u32) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Harmonics at one node, factored as `Y_LM(theta, 0) e^{i M phi}`.
struct YlmCache<'a> {
    polar: &'a [f64],
    azimuthal: &'a [Complex64],
    lmax: i32,
}

impl YlmCache<'_> {
    fn get(&self, l: u32, m: i32) -> Complex64 {
        self.azimuthal[(m + self.lmax) as usize] * self.polar[(l * l) as usize + (m + l as i32) as usize]
    }
}

/// A sphere rule with the polar and azimuthal harmonic factors stored per
/// polar ring and per meridian.
struct Tabulated {
    rule: SphereRule,
    lmax: u32,
    polar: Vec<f64>,
    azimuthal: Vec<Complex64>,
}

impl Tabulated {
    fn new(rule: SphereRule, lmax: u32) -> Self {
        let stride = ((lmax + 1) * (lmax + 1)) as usize;
        let mut polar = Vec::with_capacity(stride * rule.n_theta);
        for ring in 0..rule.n_theta {
            let theta = rule.nodes[ring * rule.n_phi].theta;
            for l in 0..=lmax {
                for m in -(l as i32)..=(l as i32) {
                    polar.push(ylm_unchecked(l, m, theta, 0.0).re);
                }
            }
        }
        let width = 2 * lmax as usize + 1;
        let mut azimuthal = Vec::with_capacity(width * rule.n_phi);
        for j in 0..rule.n_phi {
            let phi = rule.nodes[j].phi;
            for m in -(lmax as i32)..=(lmax as i32) {
                let a = m as f64 * phi;
                azimuthal.push(Complex64::new(libm::cos(a), libm::sin(a)));
            }
        }
        Self { rule, lmax, polar, azimuthal }
    }

    fn at(&self, i: usize) -> YlmCache<'_> {
        let stride = ((self.lmax + 1) * (self.lmax + 1)) as usize;
        let width = 2 * self.lmax as usize + 1;
        let (ring, j) = (i / self.rule.n_phi, i % self.rule.n_phi);
        YlmCache {
            polar: &self.polar[ring * stride..(ring + 1) * stride],
            azimuthal: &self.azimuthal[j * width..(j + 1) * width],
            lmax: self.lmax as i32,
        }
    }
}

// ---------------------------------------------------------------------------
// Pair integrands

/// Accuracy knobs for the oracle integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Target relative accuracy of the radial (|k|) integral.
    pub rel_tol: f64,
    /// Degree of exactness of the sphere rules for bilinears without a phase.
    pub sphere_order: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, sphere_order: 24 }
    }
}

/// Which excitation-probability element to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    AA,
    BB,
    AB,
    BA,
}

/// One detector placed in A's frame.
#[derive(Debug, Clone)]
pub struct Placement {
    pub profile: Profile,
    pub orientation: EulerAngles,
    pub position: [f64; 3],
    pub lambda: f64,
}

/// |k|-resolved integrands of the full momentum integrals, angular part done.
pub struct PairIntegrand {
    model: CouplingModel,
    a: Transform,
    b: Transform,
    pos_a: [f64; 3],
    pos_b: [f64; 3],
    lam_a: f64,
    lam_b: f64,
    gap: f64,
    switching: SwitchingProfile,
    opts: OracleOptions,
    lmax: u32,
    /// Beyond this `|k|` both smearing transforms are below `1e-12` of their peak.
    k_cut: f64,
    plain: Tabulated,
    /// Phase-resolving rules, ascending in size.
    phased: Vec<Tabulated>,
    snap: bool,
}

/// Largest polar node count kept in the precomputed rule ladder.
const MAX_TABULATED_THETA: usize = 4000;

impl PairIntegrand {
    /// Detector A at the origin, B at `L z_A` rotated by the pair's Euler angles.
    pub fn new(model: CouplingModel, a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry, opts: OracleOptions) -> Result<Self> {
        a.validate()?;
        b.validate()?;
        check_identical(a, b)?;
        let pa = Placement { profile: Profile::from_smearing(&a.smearing)?, orientation: EulerAngles::default(), position: [0.0; 3], lambda: a.lambda };
        let pb = Placement {
            profile: Profile::from_smearing(&b.smearing)?,
            orientation: geo.euler,
            position: [0.0, 0.0, geo.separation],
            lambda: b.lambda,
        };
        Ok(Self::from_placements(model, pa, pb, a.gap, a.switching, opts))
    }

    pub fn from_placements(model: CouplingModel, a: Placement, b: Placement, gap: f64, switching: SwitchingProfile, opts: OracleOptions) -> Self {
        let w = Weight::of(model);
        let ta = Transform::build(a.profile, a.orientation, w, opts.sphere_order);
        let tb = Transform::build(b.profile, b.orientation, w, opts.sphere_order);
        let lmax = ta.terms.iter().chain(&tb.terms).map(|t| t.l).max().unwrap_or(0);
        let k_cut = transform_cutoff(&ta).max(transform_cutoff(&tb));
        let plain = Tabulated::new(SphereRule::new(opts.sphere_order), lmax);
        let mut out = Self {
            model,
            a: ta,
            b: tb,
            pos_a: a.position,
            pos_b: b.position,
            lam_a: a.lambda,
            lam_b: b.lambda,
            gap,
            switching,
            opts,
            lmax,
            k_cut,
            plain,
            phased: Vec::new(),
            snap: false,
        };
        let (need, _) = out.counts(k_cut);
        let mut n_theta = out.plain.rule.n_theta;
        loop {
            let n_phi = out.phi_count(n_theta);
            out.phased.push(Tabulated::new(SphereRule::with_counts(n_theta, n_phi), lmax));
            if n_theta >= need.min(MAX_TABULATED_THETA) {
                break;
            }
            n_theta = (n_theta + n_theta / 5).max(n_theta + 4);
        }
        out
    }

    /// Report angular integrals that cancel to rounding (below `1e-12` of the
    /// summed magnitudes) as exact zeros.
    pub fn snapping_zeros(mut self) -> Self {
        self.snap = true;
        self
    }

    fn snapped(&self, v: Complex64, scale: f64) -> Complex64 {
        if self.snap && v.norm() <= 1e-12 * scale {
            CZERO
        } else {
            v
        }
    }

    /// Upper end of the `|k|` range that carries any weight.
    pub fn k_cut(&self) -> f64 {
        self.k_cut
    }

    fn weight(&self, k: f64) -> f64 {
        match self.model {
            CouplingModel::ScalarLinear => 1.0 / (2.0 * k),
            CouplingModel::ScalarQuadrupole | CouplingModel::GravityQuadrupole => k * k * k / 8.0,
        }
    }

    fn contract(&self, khat: [f64; 3], f: &CMat3, g: &CMat3) -> Complex64 {
        match self.model {
            CouplingModel::GravityQuadrupole => tt_contract(khat, f, g),
            _ => f[0][0] * g[0][0],
        }
    }

    fn separation(&self) -> [f64; 3] {
        [self.pos_b[0] - self.pos_a[0], self.pos_b[1] - self.pos_a[1], self.pos_b[2] - self.pos_a[2]]
    }

    fn has_perpendicular_offset(&self) -> bool {
        let d = self.separation();
        d[0] != 0.0 || d[1] != 0.0
    }

    fn phi_count(&self, n_theta: usize) -> usize {
        let base = self.plain.rule.n_phi;
        if self.has_perpendicular_offset() {
            base.max(2 * n_theta)
        } else {
            base
        }
    }

    /// Polar and azimuthal node counts that resolve `e^{i k.(x_B - x_A)}`.
    fn counts(&self, k: f64) -> (usize, usize) {
        let d = self.separation();
        let kl = k * libm::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        let perp = k * libm::sqrt(d[0] * d[0] + d[1] * d[1]);
        let n_theta = self.plain.rule.n_theta.max(libm::ceil(0.75 * kl + 20.0) as usize);
        let n_phi = if perp > 0.0 { self.plain.rule.n_phi.max(libm::ceil(1.5 * perp + 40.0) as usize) } else { self.plain.rule.n_phi };
        (n_theta, n_phi)
    }

    fn with_rule<R>(&self, k: f64, phased: bool, f: impl FnOnce(&Tabulated) -> R) -> R {
        if !phased {
            return f(&self.plain);
        }
        let (nt, np) = self.counts(k);
        match self.phased.iter().find(|t| t.rule.n_theta >= nt && t.rule.n_phi >= np) {
            Some(t) => f(t),
            None => f(&Tabulated::new(SphereRule::with_counts(nt, np), self.lmax)),
        }
    }

    fn radial_pair(&self, k: f64) -> ([f64; 9], [f64; 9]) {
        (self.a.radial_transforms(k, &self.a.degrees()), self.b.radial_transforms(k, &self.b.degrees()))
    }

    fn phase(pos: [f64; 3], kvec: [f64; 3]) -> Complex64 {
        let ph = pos[0] * kvec[0] + pos[1] * kvec[1] + pos[2] * kvec[2];
        Complex64::new(libm::cos(ph), libm::sin(ph))
    }

    /// Angular-integrated integrand of `L_IJ` at `|k| = k`, prefactors included.
    pub fn l_at(&self, which: Which, k: f64) -> Complex64 {
        if k <= 0.0 {
            return CZERO;
        }
        let phased = matches!(which, Which::AB | Which::BA);
        let (ra, rb) = self.radial_pair(k);
        let acc = self.with_rule(k, phased, |tab| {
            let mut acc = CZERO;
            let mut scale = 0.0;
            for (i, node) in tab.rule.nodes.iter().enumerate() {
                let y = tab.at(i);
                let kvec = node.dir.map(|c| c * k);
                let (mut fa, _) = self.a.eval(&y, &ra);
                let (mut fb, _) = self.b.eval(&y, &rb);
                scale3(&mut fa, Self::phase(self.pos_a, kvec));
                scale3(&mut fb, Self::phase(self.pos_b, kvec));
                let (f, g) = match which {
                    Which::AA => (&fa, &fa),
                    Which::BB => (&fb, &fb),
                    Which::AB => (&fa, &fb),
                    Which::BA => (&fb, &fa),
                };
                let gc = conj3(g);
                acc += self.contract(node.dir, f, &gc) * node.weight;
                scale += norm3(f) * norm3(g) * node.weight;
            }
            self.snapped(acc, scale)
        });
        let lam = match which {
            Which::AA => self.lam_a * self.lam_a,
            Which::BB => self.lam_b * self.lam_b,
            _ => self.lam_a * self.lam_b,
        };
        let chi = chi_tilde_sq(self.gap + k, self.switching);
        acc * (lam * chi * self.weight(k) * k * k / (8.0 * PI * PI * PI))
    }

    /// The two summands of the `M` integrand at `|k| = k`:
    /// `(F_A(-k) F_B(k), F_B(-k) F_A(k))`, each with all prefactors.
    pub fn m_terms_at(&self, k: f64) -> (Complex64, Complex64) {
        if k <= 0.0 {
            return (CZERO, CZERO);
        }
        let (ra, rb) = self.radial_pair(k);
        let (first, second) = self.with_rule(k, true, |tab| {
            let mut first = CZERO;
            let mut second = CZERO;
            let mut scale = 0.0;
            for (i, node) in tab.rule.nodes.iter().enumerate() {
                let y = tab.at(i);
                let kvec = node.dir.map(|c| c * k);
                let (mut fa, mut fam) = self.a.eval(&y, &ra);
                let (mut fb, mut fbm) = self.b.eval(&y, &rb);
                let pa = Self::phase(self.pos_a, kvec);
                let pb = Self::phase(self.pos_b, kvec);
                scale3(&mut fa, pa);
                scale3(&mut fam, pa.conj());
                scale3(&mut fb, pb);
                scale3(&mut fbm, pb.conj());
                first += self.contract(node.dir, &fam, &fb) * node.weight;
                second += self.contract(node.dir, &fbm, &fa) * node.weight;
                scale += norm3(&fa) * norm3(&fb) * node.weight;
            }
            (self.snapped(first, scale), self.snapped(second, scale))
        });
        let q = q_factor(k, self.gap, self.switching);
        let pre = -q * (self.lam_a * self.lam_b * self.weight(k) * k * k / (8.0 * PI * PI * PI));
        (first * pre, second * pre)
    }

    pub fn m_at(&self, k: f64) -> Complex64 {
        let (a, b) = self.m_terms_at(k);
        a + b
    }

    /// Spacing of the |k| panels: resolves the separation phase, the switching
    /// envelope and the smearing structure.
    fn k_panel(&self) -> f64 {
        let d = self.separation();
        let l = libm::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        let mut h = 0.5 / self.switching.t;
        h = h.min(0.25 / self.a.profile.r_scale.max(self.b.profile.r_scale));
        if l > 0.0 {
            h = h.min(PI / l);
        }
        h
    }

    /// `int_0^inf dk f(k)` on Gauss-Legendre panels, stopping once three
    /// consecutive panels each bound below `rel_tol * 1e-3` of the total or
    /// at the transform cutoff, whichever comes first.
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<OracleValue> {
        let h = self.k_panel();
        let digits = -libm::log10(self.opts.rel_tol).max(1.0);
        let n = 8 + libm::ceil(digits / 2.0) as usize;
        let (x, w) = gauss_legendre(n);
        let eps = self.opts.rel_tol * 1e-3;
        let mut total = CZERO;
        let mut quiet = 0;
        let mut panel = 0usize;
        let max_panels = 200_000;
        while panel < max_panels {
            let a = h * panel as f64;
            let mut part = CZERO;
            let mut env = 0.0f64;
            for (xi, wi) in x.iter().zip(&w) {
                let k = a + 0.5 * h * (xi + 1.0);
                let v = f(k);
                env = env.max(v.norm());
                part += v * (0.5 * h * wi);
            }
            total += part;
            panel += 1;
            if a + h >= self.k_cut {
                return Ok(OracleValue { value: total, k_max: a + h, panels: panel });
            }
            if env * h <= eps * total.norm() || env == 0.0 && panel > 8 {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(OracleValue { value: total, k_max: h * panel as f64, panels: panel });
                }
            } else {
                quiet = 0;
            }
        }
        Err(HarvestError::Numeric(format!("oracle |k| integral did not settle within {max_panels} panels")))
    }
}

fn scale3(m: &mut CMat3, z: Complex64) {
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v *= z;
        }
    }
}

fn norm3(m: &CMat3) -> f64 {
    libm::sqrt(m.iter().flatten().map(|v| v.norm_sqr()).sum())
}

fn conj3(m: &CMat3) -> CMat3 {
    m.map(|row| row.map(|v| v.conj()))
}

/// First `|k|` past the peak where every radial transform of `t` stays below
/// `1e-12` of its largest value for four consecutive samples.
///
/// Numerically computed transforms flatten out at a noise floor instead of
/// decaying, so the momentum integrals stop here rather than rely on a
/// relative tail test alone. Sampling is geometric beyond `1/r_scale`.
fn transform_cutoff(t: &Transform) -> f64 {
    let ls = t.degrees();
    let unit = 1.0 / t.profile.r_scale;
    let mut peak = 0.0f64;
    let mut below = 0;
    let mut k = 0.0;
    loop {
        let rho = t.radial_transforms(k, &ls);
        let size = ls.iter().map(|&l| libm::fabs(rho[l as usize])).fold(0.0, f64::max);
        peak = peak.max(size);
        if size <= 1e-12 * peak && k > unit {
            below += 1;
            if below >= 4 {
                return k;
            }
        } else {
            below = 0;
        }
        if k >= 400.0 * unit {
            return k;
        }
        k = if k < unit { k + 0.25 * unit } else { k * 1.1 };
    }
}

fn check_identical(a: &DetectorConfig, b: &DetectorConfig) -> Result<()> {
    if a.gap != b.gap {
        return Err(HarvestError::UnsupportedScenario("detectors must share the same gap".into()));
    }
    if a.switching != b.switching {
        return Err(HarvestError::UnsupportedScenario("detectors must share the same switching".into()));
    }
    Ok(())
}

/// Result of an oracle integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub k_max: f64,
    pub panels: usize,
}

/// Full momentum-space `L_IJ`.
pub fn l_momentum_oracle(
    model: CouplingModel,
    a: &DetectorConfig,
    b: &DetectorConfig,
    geo: &PairGeometry,
    which: Which,
    opts: OracleOptions,
) -> Result<Complex64> {
    let p = PairIntegrand::new(model, a, b, geo, opts)?;
    Ok(p.integrate(|k| p.l_at(which, k))?.value)
}

/// Full momentum-space `M`, both summands evaluated in A's frame.
pub fn m_momentum_oracle(model: CouplingModel, a: &DetectorConfig, b: &DetectorConfig, geo: &PairGeometry, opts: OracleOptions) -> Result<Complex64> {
    let p = PairIntegrand::new(model, a, b, geo, opts)?;
    Ok(p.integrate(|k| p.m_at(k))?.value)
}

/// `M` with the second summand obtained from the relabelled pair: B placed at
/// the origin with its own axes, A at `R^{-1}(-L z)` with Euler angles
/// `(-phi, -theta, -psi)`.
pub fn m_momentum_oracle_relabelled(
    model: CouplingModel,
    a: &DetectorConfig,
    b: &DetectorConfig,
    geo: &PairGeometry,
    opts: OracleOptions,
) -> Result<Complex64> {
    let direct = PairIntegrand::new(model, a, b, geo, opts)?;
    let first = direct.integrate(|k| direct.m_terms_at(k).0)?.value;
    let r = geo.euler.matrix();
    let l = [0.0, 0.0, -geo.separation];
    // R^{-1} = R^T
    let pos = [
        r[0][0] * l[0] + r[1][0] * l[1] + r[2][0] * l[2],
        r[0][1] * l[0] + r[1][1] * l[1] + r[2][1] * l[2],
        r[0][2] * l[0] + r[1][2] * l[1] + r[2][2] * l[2],
    ];
    let pb = Placement { profile: Profile::from_smearing(&b.smearing)?, orientation: EulerAngles::default(), position: [0.0; 3], lambda: b.lambda };
    let pa = Placement { profile: Profile::from_smearing(&a.smearing)?, orientation: geo.euler.inverse(), position: pos, lambda: a.lambda };
    let relabelled = PairIntegrand::from_placements(model, pb, pa, a.gap, a.switching, opts);
    let second = relabelled.integrate(|k| relabelled.m_terms_at(k).0)?.value;
    Ok(first + second)
}

// ---------------------------------------------------------------------------
// Time-domain Q

/// `Q(k, Omega)` from the time-ordered double integral by a product rule in
/// `s = (t + t')/2` and `u = t - t' >= 0`.
pub fn q_time_oracle(k: f64, omega: f64, sw: SwitchingProfile) -> Complex64 {
    let t = sw.t;
    // chi(t) chi(t') = e^{-s^2/T^2} e^{-u^2/4T^2} / (2 pi); phase 2 Omega s - k u
    let s_max = 6.5 * t;
    let u_max = 13.0 * t;
    let panels = |len: f64, freq: f64| libm::ceil(len * (freq + 1.0 / t) / 1.5).max(8.0) as usize;
    let (sx, sw_) = composite_gauss_legendre(-s_max, s_max, panels(2.0 * s_max, 2.0 * omega), 20);
    let (ux, uw) = composite_gauss_legendre(0.0, u_max, panels(u_max, k), 20);
    let mut acc = CZERO;
    for (u, wu) in ux.iter().zip(&uw) {
        let env_u = libm::exp(-u * u / (4.0 * t * t)) * wu;
        let mut inner = CZERO;
        for (s, ws) in sx.iter().zip(&sw_) {
            let ph = 2.0 * omega * s - k * u;
            inner += Complex64::new(libm::cos(ph), libm::sin(ph)) * (libm::exp(-s * s / (t * t)) * ws);
        }
        acc += inner * env_u;
    }
    acc / (2.0 * PI)
}
