//! Fast invariant suite behind `harvest selftest`.

use std::time::Instant;

use harvest_core::kernels::{gravity_l2_kernels, scalar_kernels};
use harvest_core::model::{q_factor, DetectorConfig, EulerAngles, PairGeometry, SmearingSpec, SwitchingProfile};
use harvest_core::oracle::{l_momentum_oracle, m_momentum_oracle, q_time_oracle, tt_projector, OracleOptions, Which};
use harvest_core::specfun::{spherical_bessel_j, wigner_3j, wigner_d, AngularQuantum};
use harvest_core::state::{negativity, negativity_oracle, TwoDetectorState};
use harvest_core::Complex64;

use crate::scenario::Scenario;
use crate::sweep::row_negativity;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check { name, passed: worst <= tol, detail: format!("worst {worst:.3e} (tol {tol:.0e})") }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> Check {
    Check { name, passed: false, detail: e.to_string() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn bessel() -> Check {
    let a = spherical_bessel_j(1, 1.0).unwrap_or(f64::NAN);
    let b = spherical_bessel_j(0, 0.0).unwrap_or(f64::NAN);
    check("bessel reference values", (a - 0.301_168_678_939_756_8).abs().max((b - 1.0).abs()), 1e-14)
}

fn q_closed_form() -> Check {
    let sw = match SwitchingProfile::new(1.0) {
        Ok(s) => s,
        Err(e) => return failed("Q closed form vs time integral", e),
    };
    let mut worst = 0.0f64;
    for &(k, w) in &[(0.0, 0.0), (0.5, 1.0), (2.0, 3.5), (5.0, 5.0)] {
        worst = worst.max((q_factor(k, w, sw) - q_time_oracle(k, w, sw)).norm());
    }
    check("Q closed form vs time integral", worst, 1e-8)
}

fn projector() -> Check {
    let n = [0.36, -0.48, 0.8];
    let p = match tt_projector(n) {
        Ok(p) => p,
        Err(e) => return failed("TT projector identities", e),
    };
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let trace: f64 = (0..3).map(|k| p[i][j][k][k]).sum();
            worst = worst.max(trace.abs());
            for k in 0..3 {
                let t: f64 = (0..3).map(|l| p[i][j][k][l] * n[l]).sum();
                worst = worst.max(t.abs());
                for l in 0..3 {
                    let mut sq = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            sq += p[i][j][a][b] * p[a][b][k][l];
                        }
                    }
                    worst = worst.max((sq - p[i][j][k][l]).abs());
                }
            }
        }
    }
    check("TT projector identities", worst, 1e-13)
}

fn three_j() -> Check {
    // sum over m1, m2 of (2 l3 + 1) (l1 l2 l3; m1 m2 m3)^2 = 1
    let mut worst = 0.0f64;
    for l1 in 0..=2u32 {
        for l2 in 0..=2u32 {
            for l3 in l1.abs_diff(l2)..=l1 + l2 {
                for m3 in -(l3 as i32)..=l3 as i32 {
                    let mut s = 0.0;
                    for m1 in -(l1 as i32)..=l1 as i32 {
                        let m2 = -m1 - m3;
                        if m2.unsigned_abs() <= l2 {
                            s += wigner_3j(l1, l2, l3, m1, m2, m3).powi(2);
                        }
                    }
                    worst = worst.max((s * (2 * l3 + 1) as f64 - 1.0).abs());
                }
            }
        }
    }
    check("3j orthogonality", worst, 1e-12)
}

fn wigner_unitarity() -> Check {
    let (psi, theta, phi) = (0.3, 1.1, -0.7);
    let mut worst = 0.0f64;
    for mu in -2..=2 {
        for nu in -2..=2 {
            let mut s = Complex64::new(0.0, 0.0);
            for m in -2..=2 {
                let a = wigner_d(2, mu, m, psi, theta, phi);
                let b = wigner_d(2, nu, m, psi, theta, phi);
                match (a, b) {
                    (Ok(a), Ok(b)) => s += a * b.conj(),
                    (Err(e), _) | (_, Err(e)) => return failed("Wigner D unitarity", e),
                }
            }
            let target = if mu == nu { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    check("Wigner D unitarity", worst, 1e-12)
}

fn negativity_forms() -> Check {
    let s = TwoDetectorState::symmetric(1e-6, Complex64::new(3e-6, 1e-6));
    match negativity_oracle(&s) {
        Ok(o) => check("negativity closed form vs eigenvalues", rel(negativity(&s), o), 1e-6),
        Err(e) => failed("negativity closed form vs eigenvalues", e),
    }
}

fn row_consistency() -> Check {
    let (l, m) = (2e-5, 5e-5);
    let s = TwoDetectorState::symmetric(l, Complex64::new(0.0, m));
    check("row negativity from magnitudes", (row_negativity(l, l, m) - negativity(&s)).abs(), 0.0)
}

fn scalar_oracle() -> Check {
    const NAME: &str = "scalar kernels vs momentum oracle";
    let run = || -> harvest_core::Result<f64> {
        let sw = SwitchingProfile::new(1.0)?;
        let d = DetectorConfig::new(1.0, 4.7, SmearingSpec::GaussianIsotropic { sigma: 0.2 }, sw)?;
        let geo = PairGeometry::aligned(4.0)?;
        let ints = scalar_kernels(&d, &d, &geo)?.integrate(1e-10, false)?;
        let opts = OracleOptions { rel_tol: 1e-10, ..OracleOptions::default() };
        let st = harvest_core::model::CouplingModel::ScalarLinear;
        let l = l_momentum_oracle(st, &d, &d, &geo, Which::AA, opts)?;
        let m = m_momentum_oracle(st, &d, &d, &geo, opts)?;
        Ok(rel(ints.l.value.re, l.re).max((ints.m.value - m).norm() / m.norm()))
    };
    match run() {
        Ok(w) => check(NAME, w, 1e-6),
        Err(e) => failed(NAME, e),
    }
}

fn angle_ratio() -> Check {
    const NAME: &str = "l=2 gravity: M(theta)/M(0) = (1+3cos 2theta)/4";
    let run = || -> harvest_core::Result<f64> {
        let sw = SwitchingProfile::new(1.0)?;
        let sm = SmearingSpec::GaussianHarmonic { sigma: 0.2, q: AngularQuantum::new(2, 0)? };
        let d = DetectorConfig::new(1.0, 6.0, sm, sw)?;
        let base = gravity_l2_kernels(&d, &d, &PairGeometry::aligned(6.0)?)?;
        let mut worst = 0.0f64;
        for &theta in &[0.4, 1.0, core::f64::consts::FRAC_PI_2, 2.5] {
            let k = gravity_l2_kernels(&d, &d, &PairGeometry::new(6.0, EulerAngles::new(0.2, theta, -0.1))?)?;
            let f = (1.0 + 3.0 * (2.0 * theta).cos()) / 4.0;
            for &kk in &[0.5, 3.0, 9.0, 20.0] {
                let m0 = base.m_integrand(kk);
                worst = worst.max((k.m_integrand(kk) - m0 * f).norm() / m0.norm());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => check(NAME, w, 1e-12),
        Err(e) => failed(NAME, e),
    }
}

fn l_nonnegative() -> Check {
    const NAME: &str = "L integrands non-negative on a log grid";
    let mut worst = 0.0f64;
    for sc in [Scenario::Scalar, Scenario::QScalar, Scenario::QScalarL2, Scenario::GravityGaussian, Scenario::GravityL2, Scenario::Hydrogen320] {
        let point = sc.resolve(&Default::default()).and_then(|p| sc.point(&p));
        let kern = match point.map(|p| p.kernels()) {
            Ok(Ok(k)) => k,
            Ok(Err(e)) => return failed(NAME, e),
            Err(e) => return failed(NAME, e),
        };
        for i in 0..100 {
            let k = 1e-3 * (1e5f64).powf(i as f64 / 99.0);
            let v = kern.l_integrand(k);
            if !v.is_finite() {
                return failed(NAME, format!("{}: non-finite at k = {k}", sc.id()));
            }
            worst = worst.max(-v);
        }
    }
    check(NAME, worst, 0.0)
}

/// Runs every check.
pub fn run() -> Vec<Check> {
    let suite: [fn() -> Check; 10] = [
        bessel,
        q_closed_form,
        projector,
        three_j,
        wigner_unitarity,
        negativity_forms,
        row_consistency,
        scalar_oracle,
        angle_ratio,
        l_nonnegative,
    ];
    suite.iter().map(|f| f()).collect()
}

/// Prints one line per check and returns whether all passed.
pub fn report(out: &mut impl std::io::Write) -> std::io::Result<bool> {
    let start = Instant::now();
    let checks = run();
    for c in &checks {
        writeln!(out, "{} {:<48} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    let ok = checks.iter().all(|c| c.passed);
    writeln!(
        out,
        "{} of {} checks passed in {:.1} s",
        checks.iter().filter(|c| c.passed).count(),
        checks.len(),
        start.elapsed().as_secs_f64()
    )?;
    Ok(ok)
}
