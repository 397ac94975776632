//! Acceptance report: one PASS/FAIL line per criterion, with indented details.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails when the set of failing criteria differs from `KNOWN_FAILURES`
//! (a regression, or a fix that should be recorded).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use harvest::presets::{Shape, PRESETS};
use harvest::scenario::{Params, Scenario};
use harvest::sweep::{run_sweep, Axis, SweepSpec, SweepTable};
use harvest_core::kernels::{general_radial_kernels, gravity_gaussian_kernels, gravity_l2_kernels, scalar_kernels, RadialProduct};
use harvest_core::model::{q_factor, CouplingModel, DetectorConfig, EulerAngles, PairGeometry, SmearingSpec, SwitchingProfile};
use harvest_core::oracle::{
    l_momentum_oracle, m_momentum_oracle, polarization_basis, q_time_oracle, tt_projector, OracleOptions, Which,
};
use harvest_core::specfun::{wigner_3j, wigner_d, AngularQuantum};
use harvest_core::state::{negativity, negativity_oracle, TwoDetectorState};
use harvest_core::Complex64;

/// Criteria that fail for documented reasons.
const KNOWN_FAILURES: &[u32] = &[3, 5, 6, 8];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, summary: String::new(), details: Vec::new() }
    }

    /// Records a sub-check; any failing sub-check fails the criterion.
    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }

    fn budget(&mut self, elapsed: Duration, limit_s: f64) {
        self.check(elapsed.as_secs_f64() < limit_s, format!("runtime {:.1} s (limit {limit_s:.0} s)", elapsed.as_secs_f64()));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn sw() -> SwitchingProfile {
    SwitchingProfile::new(1.0).unwrap()
}

fn gaussian(sigma: f64, gap: f64) -> DetectorConfig {
    DetectorConfig::new(1.0, gap, SmearingSpec::GaussianIsotropic { sigma }, sw()).unwrap()
}

fn harmonic(sigma: f64, gap: f64, l: u32) -> DetectorConfig {
    DetectorConfig::new(1.0, gap, SmearingSpec::GaussianHarmonic { sigma, q: AngularQuantum::new(l, 0).unwrap() }, sw()).unwrap()
}

// ---------------------------------------------------------------------------

fn scalar_consistency() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let opts = OracleOptions { rel_tol: 1e-10, ..OracleOptions::default() };
    let mut worst = 0.0f64;
    for (sigma, gap, sep) in [(0.2, 4.7, 4.0), (0.2, 4.7, 8.0), (0.5, 2.0, 6.0)] {
        let d = gaussian(sigma, gap);
        let geo = PairGeometry::aligned(sep).unwrap();
        let k = scalar_kernels(&d, &d, &geo).unwrap().integrate(1e-10, false).unwrap();
        let l = l_momentum_oracle(CouplingModel::ScalarLinear, &d, &d, &geo, Which::AA, opts).unwrap();
        let m = m_momentum_oracle(CouplingModel::ScalarLinear, &d, &d, &geo, opts).unwrap();
        let (dl, dm) = (rel(k.l.value.re, l.re), (k.m.value - m).norm() / m.norm());
        worst = worst.max(dl).max(dm);
        o.check(dl <= 1e-6 && dm <= 1e-6, format!("(sigma {sigma}, gap {gap}, L {sep}): dL {dl:.2e}, dM {dm:.2e}"));
    }
    o.budget(start.elapsed(), 60.0);
    o.summary = format!("scalar kernels vs momentum oracle, worst relative deviation {worst:.2e} (tol 1e-6)");
    o
}

fn q_closed_form() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..=10 {
        for j in 0..=10 {
            let (k, w) = (0.5 * i as f64, 0.5 * j as f64);
            worst = worst.max((q_factor(k, w, sw()) - q_time_oracle(k, w, sw())).norm());
        }
    }
    o.check(worst <= 1e-8, format!("121 grid points, worst absolute error {worst:.2e}"));
    o.budget(start.elapsed(), 60.0);
    o.summary = format!("Q closed form vs time-domain integral, worst {worst:.2e} (tol 1e-8)");
    o
}

fn gravity_l2_equivalence() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (sigma, gap, sep, theta) in [(0.2, 4.7, 8.0, 0.0), (0.2, 6.0, 6.0, 0.9), (0.35, 2.0, 4.0, 2.2)] {
        let d = harmonic(sigma, gap, 2);
        let geo = PairGeometry::new(sep, EulerAngles::new(0.0, theta, 0.0)).unwrap();
        let printed = gravity_l2_kernels(&d, &d, &geo).unwrap();
        let general =
            general_radial_kernels(RadialProduct::gaussian(sigma).unwrap(), AngularQuantum::new(2, 0).unwrap(), &d, &d, &geo).unwrap();
        // k sigma from 0.01 to 5
        for i in 0..200 {
            let k = 0.01 * 500f64.powf(i as f64 / 199.0) / sigma;
            worst = worst.max(rel(general.l_integrand(k), printed.l_integrand(k)));
            let m = printed.m_integrand(k);
            worst = worst.max((general.m_integrand(k) - m).norm() / m.norm().max(f64::MIN_POSITIVE));
        }
    }
    o.check(worst <= 1e-10, format!("printed vs general radial (Gaussian), pointwise worst {worst:.2e} (tol 1e-10)"));
    for (sigma, gap, sep) in [(0.2, 4.7, 8.0), (0.2, 3.0, 6.0), (0.3, 2.0, 5.0)] {
        let d = harmonic(sigma, gap, 2);
        let geo = PairGeometry::aligned(sep).unwrap();
        let k = gravity_l2_kernels(&d, &d, &geo).unwrap().integrate(1e-10, false).unwrap();
        let model = CouplingModel::GravityQuadrupole;
        let l = l_momentum_oracle(model, &d, &d, &geo, Which::AA, OracleOptions::default()).unwrap();
        let m = m_momentum_oracle(model, &d, &d, &geo, OracleOptions::default()).unwrap();
        let (dl, dm) = (rel(k.l.value.re, l.re), (k.m.value - m).norm() / m.norm());
        o.check(
            dl <= 1e-4 && dm <= 1e-4,
            format!(
                "(sigma {sigma}, gap {gap}, L {sep}) vs momentum oracle: L {:.4e} / {:.4e} (ratio {:.4}), M {:.4e} / {:.4e} (ratio {:.4})",
                l.re,
                k.l.value.re,
                l.re / k.l.value.re,
                m.norm(),
                k.m.value.norm(),
                (m / k.m.value).re
            ),
        );
    }
    o.note("the oracle L exceeds the printed one by 4 pi and the oracle M carries j4(kL) content absent from the printed kernel".into());
    o.budget(start.elapsed(), 300.0);
    o.summary = "gravity l=2: printed == general radial pointwise; vs momentum oracle (tol 1e-4)".into();
    o
}

fn selection_rule() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let model = CouplingModel::GravityQuadrupole;
    for (sigma, gap, sep) in [(0.2, 4.7, 8.0), (0.3, 2.0, 4.0)] {
        let geo = PairGeometry::aligned(sep).unwrap();
        let (d1, d2) = (harmonic(sigma, gap, 1), harmonic(sigma, gap, 2));
        let m1 = m_momentum_oracle(model, &d1, &d1, &geo, OracleOptions::default()).unwrap();
        let m2 = m_momentum_oracle(model, &d2, &d2, &geo, OracleOptions::default()).unwrap();
        let r = m1.norm() / m2.norm();
        o.check(r <= 1e-10, format!("(sigma {sigma}, gap {gap}, L {sep}): |M(l_e=1)| = {:.2e}, |M(l_e=2)| = {:.2e}, ratio {r:.2e}", m1.norm(), m2.norm()));
    }
    o.note(format!("runtime {:.1} s", start.elapsed().as_secs_f64()));
    o.summary = "l_g=0 -> l_e=1 non-local term vanishes (tol 1e-10 of l_e=2)".into();
    o
}

fn peak(table: &SweepTable) -> (f64, f64) {
    table.rows.iter().map(|r| (r.negativity, r.params["omega"])).fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a })
}

fn within(value: f64, target: f64, factor: f64) -> bool {
    value >= target / factor && value <= target * factor
}

fn order_of_magnitude() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    const SEP: f64 = 8.0;
    let gap = |sc: Scenario, from: f64| {
        let spec = SweepSpec {
            scenario: sc,
            fixed: params(&[("sep", SEP)]),
            axis: Some(Axis::linear("omega", from, 15.0, ((15.0 - from) / 0.01).round() as usize + 1)),
            overlays: vec![],
            rel_tol: 1e-8,
            audit: false,
        };
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.flagged(), 0, "{} rows flagged", sc.id());
        peak(&t)
    };
    let (gg, gg_at) = gap(Scenario::GravityGaussian, 0.0);
    let (l2, l2_at) = gap(Scenario::GravityL2, 0.0);
    let (sc, sc_at) = gap(Scenario::Scalar, 0.0);
    let (qs, qs_at) = gap(Scenario::QScalar, 0.0);
    // a0 = alpha / (2 Omega) diverges at zero gap
    let (hy, hy_at) = gap(Scenario::Hydrogen320, 0.05);
    o.note(format!("reference separation L = {SEP}, sigma = 0.2, Omega step 0.01, peaks at Omega = {gg_at:.2}, {l2_at:.2}, {sc_at:.2}, {qs_at:.2}, {hy_at:.2}"));
    o.check(within(gg, 1e-18, 10.0), format!("isotropic gravity peak {gg:.3e}, expected ~1e-18 within x10"));
    o.check(within(l2 / gg, 1e2, 10.0), format!("l=2 gravity / isotropic gravity = {:.3e}, expected ~1e2 within x10", l2 / gg));
    o.check(within(sc / gg, 1e10, 30.0), format!("scalar / isotropic gravity = {:.3e}, expected ~1e10 within x30", sc / gg));
    o.check(within(qs / gg, 1e5, 30.0), format!("quadrupole scalar / isotropic gravity = {:.3e}, expected ~1e5 within x30", qs / gg));
    o.check(within(hy, 1e-27, 10.0), format!("hydrogen 100->320 peak {hy:.3e}, expected ~1e-27 within x10"));
    o.note("no separation in {4,6,8,10} puts the isotropic gravity peak within x10 of 1e-18 (2.8e-11, 4.4e-15, 9.1e-22, 8.4e-31)".into());
    o.budget(start.elapsed(), 600.0);
    o.summary = "order-of-magnitude peaks and ratios".into();
    o
}

type Curves = BTreeMap<u64, Vec<(f64, f64)>>;

/// Curves keyed by the overlay value (as bits), sorted along the axis.
fn curves(table: &SweepTable, axis: &str, overlay: &str) -> Curves {
    let mut out: Curves = BTreeMap::new();
    for r in &table.rows {
        out.entry(r.params[overlay].to_bits()).or_default().push((r.params[axis], r.negativity));
    }
    for c in out.values_mut() {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn curve_max(c: &[(f64, f64)]) -> f64 {
    c.iter().map(|p| p.1).fold(0.0, f64::max)
}

/// Zero below a positive threshold, then one maximum with monotone flanks.
fn threshold_and_single_peak(c: &[(f64, f64)]) -> Result<(f64, f64), String> {
    let first = c.iter().position(|p| p.1 > 0.0).ok_or("identically zero")?;
    if first == 0 {
        return Err(format!("already positive at {}", c[0].0));
    }
    let top = curve_max(c);
    let at: Vec<usize> = (0..c.len()).filter(|&i| c[i].1 == top).collect();
    if at.len() != 1 {
        return Err(format!("maximum attained {} times", at.len()));
    }
    let (rise, fall) = (&c[first..=at[0]], &c[at[0]..]);
    if !rise.windows(2).all(|w| w[0].1 <= w[1].1) || !fall.windows(2).all(|w| w[0].1 >= w[1].1) {
        return Err("not unimodal".into());
    }
    Ok((c[first].0, c[at[0]].0))
}

fn decreasing_with_separation(o: &mut Outcome, id: &str, cs: &Curves) {
    let maxima: Vec<(f64, f64)> = cs.iter().map(|(k, c)| (f64::from_bits(*k), curve_max(c))).collect();
    let ok = maxima.windows(2).all(|w| w[1].1 < w[0].1);
    let list: Vec<String> = maxima.iter().map(|(l, m)| format!("L={l}: {m:.2e}")).collect();
    o.check(ok, format!("{id}: maximum decreases with L ({})", list.join(", ")));
}

fn curve_shapes() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for p in PRESETS {
        let spec = p.spec();
        let table = run_sweep(&spec).unwrap();
        if table.flagged() > 0 {
            o.check(false, format!("{}: {} rows flagged", p.id, table.flagged()));
        }
        match p.shape {
            Shape::GapWithSeparations | Shape::GapWithWidths => {
                let overlay = if p.shape == Shape::GapWithWidths { "sigma" } else { "sep" };
                let cs = curves(&table, "omega", overlay);
                for (k, c) in &cs {
                    let v = f64::from_bits(*k);
                    match threshold_and_single_peak(c) {
                        Ok((thr, at)) => o.check(true, format!("{} {overlay}={v}: threshold {thr:.2}, single peak at {at:.2}", p.id)),
                        Err(e) => o.check(false, format!("{} {overlay}={v}: {e}", p.id)),
                    }
                }
                if overlay == "sep" {
                    decreasing_with_separation(&mut o, p.id, &cs);
                }
            }
            Shape::Width => {
                let cs = curves(&table, "sigma", "sep");
                let required = spec.scenario != Scenario::Scalar;
                for (k, c) in &cs {
                    let ok = c.windows(2).all(|w| w[1].1 > w[0].1);
                    let line = format!("{} sep={}: strictly increasing in sigma", p.id, f64::from_bits(*k));
                    if required {
                        o.check(ok, line);
                    } else {
                        o.note(format!("{line}: {ok} (not required for the linear scalar)"));
                    }
                }
                decreasing_with_separation(&mut o, p.id, &cs);
            }
            Shape::Angle => decreasing_with_separation(&mut o, p.id, &curves(&table, "theta", "sep")),
        }
    }
    o.note("hydrogen 100->200 and 100->300 vanish identically: an isotropic excited state is removed by the TT projection".into());
    o.note(format!("runtime {:.1} s", start.elapsed().as_secs_f64()));
    o.summary = format!("curve shapes on all {} presets", PRESETS.len());
    o
}

fn angle_dependence() -> Outcome {
    let mut o = Outcome::new();
    let d = harmonic(0.2, 6.0, 2);
    let base = gravity_l2_kernels(&d, &d, &PairGeometry::aligned(6.0).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=36 {
        let theta = PI * i as f64 / 36.0;
        let tilted = gravity_l2_kernels(&d, &d, &PairGeometry::new(6.0, EulerAngles::new(0.4, theta, -1.1)).unwrap()).unwrap();
        let f = (1.0 + 3.0 * (2.0 * theta).cos()) / 4.0;
        for j in 0..50 {
            let k = 0.05 * 600f64.powf(j as f64 / 49.0);
            let m0 = base.m_integrand(k);
            worst = worst.max((tilted.m_integrand(k) - m0 * f).norm() / m0.norm());
        }
    }
    o.check(worst <= 1e-12, format!("M(theta)/M(0) = (1+3cos 2theta)/4, pointwise worst {worst:.2e} (tol 1e-12)"));
    for p in PRESETS.iter().filter(|p| p.shape == Shape::Angle) {
        let table = run_sweep(&p.spec()).unwrap();
        for (k, c) in curves(&table, "theta", "sep") {
            let top = curve_max(&c);
            let n = c.len();
            let asym = (0..n).map(|i| (c[i].1 - c[n - 1 - i].1).abs()).fold(0.0, f64::max) / top;
            let ends = rel(c[0].1, top).max(rel(c[n - 1].1, top));
            o.check(
                asym <= 1e-9 && ends <= 1e-12 && top > 0.0,
                format!("{} sep={}: asymmetry about pi/2 {asym:.1e}, maxima at 0 and pi (deviation {ends:.1e})", p.id, f64::from_bits(k)),
            );
        }
    }
    o.summary = "angle dependence of the l=2 kernels and curves".into();
    o
}

/// Exact Racah 3j over 128-bit rationals: returns (sign, numerator, denominator) of the square.
fn racah_3j(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    fn f(n: i64) -> i128 {
        (1..=n as i128).product()
    }
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    if m1 + m2 + m3 != 0 || m1.abs() > l1 || m2.abs() > l2 || m3.abs() > l3 || l3 > l1 + l2 || l3 < (l1 - l2).abs() {
        return 0.0;
    }
    let (mut n, mut d) = (0i128, 1i128);
    for t in 0..=(l1 + l2 + l3) {
        let a = [t, l3 - l2 + t + m1, l3 - l1 + t - m2, l1 + l2 - l3 - t, l1 - t - m1, l2 - t + m2];
        if a.iter().any(|&x| x < 0) {
            continue;
        }
        let td: i128 = a.iter().map(|&x| f(x)).product();
        let sgn = if t % 2 == 0 { 1 } else { -1 };
        n = n * td + sgn * d;
        d *= td;
        let g = gcd(n, d).max(1);
        n /= g;
        d /= g;
    }
    if n == 0 {
        return 0.0;
    }
    let tri = (f(l1 + l2 - l3) * f(l1 - l2 + l3) * f(-l1 + l2 + l3)) as f64 / f(l1 + l2 + l3 + 1) as f64;
    let mom: f64 = [l1 + m1, l1 - m1, l2 + m2, l2 - m2, l3 + m3, l3 - m3].iter().map(|&x| f(x) as f64).product();
    let phase = if (l1 - l2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * (tri * mom).sqrt() * (n as f64 / d as f64)
}

fn zyz(m: [[f64; 3]; 3]) -> EulerAngles {
    EulerAngles::new(m[1][2].atan2(m[0][2]), m[2][2].clamp(-1.0, 1.0).acos(), m[2][1].atan2(-m[2][0]))
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn d_matrix(l: u32, e: &EulerAngles) -> Vec<Vec<Complex64>> {
    let r = -(l as i32)..=l as i32;
    r.clone().map(|mu| r.clone().map(|m| wigner_d(l, mu, m, e.psi, e.theta, e.phi).unwrap()).collect()).collect()
}

fn algebra() -> Outcome {
    let mut o = Outcome::new();
    // projector identities on a direction grid
    let mut worst = 0.0f64;
    let mut worst_complete = 0.0f64;
    for i in 0..12 {
        for j in 0..12 {
            let (alpha, beta) = (PI * (i as f64 + 0.5) / 12.0, 2.0 * PI * j as f64 / 12.0);
            let b = polarization_basis(alpha, beta);
            let (n, p) = (b.khat, tt_projector(b.khat).unwrap());
            for a in 0..3 {
                for c in 0..3 {
                    worst = worst.max((0..3).map(|k| p[a][c][k][k]).sum::<f64>().abs());
                    for k in 0..3 {
                        worst = worst.max((0..3).map(|l| p[a][c][k][l] * n[l]).sum::<f64>().abs());
                        for l in 0..3 {
                            let sq: f64 = (0..9).map(|x| p[a][c][x / 3][x % 3] * p[x / 3][x % 3][k][l]).sum();
                            worst = worst.max((sq - p[a][c][k][l]).abs());
                            let comp = b.big_e1[a][c] * b.big_e1[k][l] + b.big_e2[a][c] * b.big_e2[k][l];
                            worst_complete = worst_complete.max((comp - p[a][c][k][l]).abs());
                        }
                    }
                }
            }
        }
    }
    o.check(worst <= 1e-13, format!("projector traceless, transverse, idempotent: worst {worst:.1e}"));
    o.check(worst_complete <= 1e-13, format!("projector equals the polarization-tensor completeness sum: worst {worst_complete:.1e}"));
    // 3j
    let (mut worst_racah, mut worst_orth) = (0.0f64, 0.0f64);
    for l1 in 0..=4i64 {
        for l2 in 0..=4i64 {
            for l3 in 0..=4i64 {
                for m1 in -l1..=l1 {
                    for m2 in -l2..=l2 {
                        let g = wigner_3j(l1 as u32, l2 as u32, l3 as u32, m1 as i32, m2 as i32, (-m1 - m2) as i32);
                        worst_racah = worst_racah.max((g - racah_3j(l1, l2, l3, m1, m2, -m1 - m2)).abs());
                    }
                }
                if l3 >= (l1 - l2).abs() && l3 <= l1 + l2 {
                    for m3 in -l3..=l3 {
                        let s: f64 = (-l1..=l1)
                            .map(|m1| wigner_3j(l1 as u32, l2 as u32, l3 as u32, m1 as i32, (-m1 - m3) as i32, m3 as i32).powi(2))
                            .sum();
                        worst_orth = worst_orth.max((s * (2 * l3 + 1) as f64 - 1.0).abs());
                    }
                }
            }
        }
    }
    o.check(worst_racah <= 1e-12, format!("3j equals the exact Racah oracle for l <= 4: worst {worst_racah:.1e}"));
    o.check(worst_orth <= 1e-12, format!("3j orthogonality for l <= 4: worst {worst_orth:.1e}"));
    // Wigner D
    let (mut worst_u, mut worst_c) = (0.0f64, 0.0f64);
    let angles: Vec<EulerAngles> = (0..6).map(|i| EulerAngles::new(0.7 * i as f64 - 2.0, 0.3 + 0.45 * i as f64, 1.9 - 0.8 * i as f64)).collect();
    for l in 0..=4u32 {
        for a in &angles {
            let d = d_matrix(l, a);
            let n = d.len();
            for i in 0..n {
                for j in 0..n {
                    let s: Complex64 = (0..n).map(|k| d[i][k] * d[j][k].conj()).sum();
                    worst_u = worst_u.max((s - if i == j { 1.0 } else { 0.0 }).norm());
                }
            }
            for b in &angles {
                let db = d_matrix(l, b);
                let dp = d_matrix(l, &zyz(mat_mul(&a.matrix(), &b.matrix())));
                for i in 0..n {
                    for j in 0..n {
                        let s: Complex64 = (0..n).map(|k| d[i][k] * db[k][j]).sum();
                        worst_c = worst_c.max((s - dp[i][j]).norm());
                    }
                }
            }
        }
    }
    o.check(worst_u <= 1e-12, format!("Wigner D unitarity: worst {worst_u:.1e}"));
    o.check(worst_c <= 1e-12, format!("Wigner D composition D(R1 R2) = D(R1) D(R2): worst {worst_c:.1e}"));
    // negativity
    let (mut worst_sym, mut worst_asym) = (0.0f64, 0.0f64);
    for i in 1..=20 {
        let l = 1e-7 * i as f64;
        let m = Complex64::from_polar(3e-6, 0.3 * i as f64);
        let s = TwoDetectorState::symmetric(l, m);
        worst_sym = worst_sym.max(rel(negativity(&s), negativity_oracle(&s).unwrap()));
        let a = TwoDetectorState { l_aa: 2.0 * l, l_bb: 0.5 * l, m, ..Default::default() };
        worst_asym = worst_asym.max(rel(negativity(&a), negativity_oracle(&a).unwrap()));
    }
    o.check(worst_sym <= 1e-6, format!("negativity closed form vs eigen oracle, L_AA = L_BB: worst relative {worst_sym:.1e}"));
    o.check(
        worst_asym <= 1e-6,
        format!("negativity closed form vs eigen oracle, L_AA != L_BB: worst relative {worst_asym:.1e}"),
    );
    o.note("the closed form subtracts (L_AA - L_BB)^2/4 under the root; the partial transpose adds it".into());
    o.summary = "algebraic suites".into();
    o
}

fn isotropic_audit() -> Outcome {
    let mut o = Outcome::new();
    let d = gaussian(0.2, 4.7);
    let geo = PairGeometry::aligned(8.0).unwrap();
    let k = gravity_gaussian_kernels(&d, &d, &geo).unwrap().integrate(1e-10, false).unwrap();
    let model = CouplingModel::GravityQuadrupole;
    let oracle = |tol: f64| {
        let opts = OracleOptions { rel_tol: tol, ..OracleOptions::default() };
        (l_momentum_oracle(model, &d, &d, &geo, Which::AA, opts).unwrap(), m_momentum_oracle(model, &d, &d, &geo, opts).unwrap())
    };
    let (l1, m1) = oracle(1e-8);
    let (l2, m2) = oracle(5e-9);
    o.note(format!("(sigma 0.2, gap 4.7, L 8)            normative        oracle            ratio oracle/normative"));
    o.note(format!("L_AA                                {:<16.6e} {:<17.6e} {:.3e}", k.l.value.re, l1.re, l1.re / k.l.value.re));
    o.note(format!("|M|                                 {:<16.6e} {:<17.6e} {:.3e}", k.m.value.norm(), m1.norm(), m1.norm() / k.m.value.norm()));
    // Stable: relative change or absolute change both tiny against the normative scale.
    let dl = (l1 - l2).norm();
    let dm = (m1 - m2).norm();
    let stable_l = dl <= 1e-6 * l1.norm() || dl <= 1e-9 * k.l.value.norm();
    let stable_m = dm <= 1e-6 * m1.norm() || dm <= 1e-9 * k.m.value.norm();
    o.check(stable_l && stable_m && k.l.value.re.is_finite(), format!("oracle under tolerance halving: dL {dl:.1e}, dM {dm:.1e}"));
    o.note("agreement is not required; the oracle is identically zero analytically".into());
    o.summary = "isotropic gravity audit report produced".into();
    o
}

fn main() {
    let suite: [(u32, fn() -> Outcome); 9] = [
        (1, scalar_consistency),
        (2, q_closed_form),
        (3, gravity_l2_equivalence),
        (4, selection_rule),
        (5, order_of_magnitude),
        (6, curve_shapes),
        (7, angle_dependence),
        (8, algebra),
        (9, isotropic_audit),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = Vec::new();
    let mut ran = Vec::new();
    for (id, f) in suite {
        if filter.is_some_and(|n| n != id) {
            continue;
        }
        let start = Instant::now();
        let out = f();
        println!("{} criterion {id}: {} [{:.1} s]", if out.pass { "PASS" } else { "FAIL" }, out.summary, start.elapsed().as_secs_f64());
        for d in &out.details {
            println!("    {d}");
        }
        ran.push(id);
        if !out.pass {
            failed.push(id);
        }
    }
    let expected: Vec<u32> = KNOWN_FAILURES.iter().copied().filter(|id| ran.contains(id)).collect();
    println!("acceptance: {} of {} criteria pass; failing {:?}, documented {:?}", ran.len() - failed.len(), ran.len(), failed, expected);
    if failed != expected {
        eprintln!("acceptance: failing set differs from the documented known failures");
        std::process::exit(1);
    }
}
