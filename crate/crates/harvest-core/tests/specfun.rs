//! Special functions against frozen high-precision values and exact oracles.

use harvest_core::model::EulerAngles;
use harvest_core::quadrature::SphereRule;
use harvest_core::specfun::*;
use harvest_core::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1e-300)
}

// (l, x, j_l(x)) from 40-digit arithmetic.
const BESSEL: &[(u32, f64, f64)] = &[
    (0, 0.1, 0.998_334_166_468_281_52),
    (1, 1.0, 0.301_168_678_939_756_79),
    (2, 0.5, 0.016_371_106_607_993_413),
    (2, 7.3, -0.139_555_739_934_390_31),
    (3, 0.001, 9.523_808_994_709_007_3e-12),
    (5, 2.0, 0.002_635_169_770_244_117_3),
    (8, 30.0, -0.007_043_910_554_892_530_4),
    (10, 0.7, 2.032_690_813_658_624_4e-12),
    (16, 5.0, 1.679_939_975_740_199e-8),
    (4, 100.0, -0.004_179_461_836_615_098_6),
    (1, 40.0, 0.017_139_147_266_606_139),
];

#[test]
fn bessel_reference_values() {
    for &(l, x, want) in BESSEL {
        let got = spherical_bessel_j(l, x).unwrap();
        assert!(close(got, want, 1e-12), "j_{l}({x}) = {got}, want {want}");
    }
}

#[test]
fn dawson_reference_values() {
    let table = [
        (0.1, 0.099_335_992_397_852_867),
        (0.49, 0.418_609_675_749_603_43),
        (0.5, 0.424_436_383_502_022_3),
        (1.0, 0.538_079_506_912_768_42),
        (2.5, 0.223_083_722_167_435_48),
        (10.0, 0.050_253_847_187_598_528),
        (50.0, 0.010_002_001_201_201_683),
    ];
    for (x, want) in table {
        assert!(close(dawson(x), want, 1e-14), "D({x}) = {}", dawson(x));
        assert_eq!(dawson(-x), -dawson(x));
    }
    // erfi(1) = (2/sqrt(pi)) e D(1)
    let erfi1 = core::f64::consts::FRAC_2_SQRT_PI * 1f64.exp() * dawson(1.0);
    assert!(close(erfi1, 1.650_425_758_797_542_9, 1e-14), "{erfi1}");
}

#[test]
fn damped_time_ordering_factor() {
    let table = [
        (0.0, 0.0, 1.0, 0.0),
        (1.0, 1.5, 0.223_130_160_148_429_83, -0.368_259_763_873_589_56),
        (3.0, 9.0, 0.000_123_409_804_086_679_55, -0.201_157_317_037_600_39),
        (6.0, 40.0, 4.248_354_255_291_589e-18, -0.001_747_242_514_832_457_6),
    ];
    for (x, g, re, im) in table {
        let v = one_minus_erf_i_damped(x, g);
        assert!(close(v.re, re, 1e-14) && (v.im - im).abs() <= 1e-14 * im.abs().max(1.0), "({x}, {g}): {v}");
    }
}

#[test]
fn spherical_harmonic_reference_values() {
    let table = [
        (2, 0, 0.7, 0.0, 0.238_105_087_487_468_73, 0.0),
        (2, 1, 0.7, 0.3, -0.363_652_472_588_464_56, -0.112_490_892_031_781_95),
        (3, -2, 1.2, -0.4, 0.224_130_276_631_020_11, 0.230_773_174_621_662_5),
        (4, 3, 2.0, 1.0, -0.387_691_911_585_517_86, 0.055_264_141_774_374_12),
    ];
    for (l, m, th, ph, re, im) in table {
        let y = spherical_harmonic(AngularQuantum::new(l, m).unwrap(), th, ph).unwrap();
        assert!((y - Complex64::new(re, im)).norm() < 1e-14, "Y_{l}{m}: {y}");
    }
}

#[test]
fn spherical_harmonics_orthonormal() {
    let rule = SphereRule::new(12);
    let mut qs = Vec::new();
    for l in 0..=4u32 {
        for m in -(l as i32)..=l as i32 {
            qs.push(AngularQuantum::new(l, m).unwrap());
        }
    }
    for &a in &qs {
        for &b in &qs {
            let s = rule.integrate(|n| {
                spherical_harmonic(a, n.theta, n.phi).unwrap() * spherical_harmonic(b, n.theta, n.phi).unwrap().conj()
            });
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((s - want).norm() < 1e-12, "<{a:?}|{b:?}> = {s}");
        }
    }
}

#[test]
fn hydrogen_radial_reference_values() {
    let table = [
        (1, 0, 0.5, 1.213_061_319_425_266_8),
        (2, 0, 1.0, 0.214_440_971_240_176_7),
        (3, 2, 4.0, 0.038_025_507_460_685_004),
        (3, 0, 2.0, -0.007_319_049_676_050_104),
        (4, 1, 7.0, -0.013_495_525_091_693_744),
    ];
    for (n, l, r, want) in table {
        let got = hydrogen_radial(n, l, r, 1.0).unwrap();
        assert!(close(got, want, 1e-13), "R_{n}{l}({r}) = {got}");
    }
}

#[test]
fn hydrogen_radial_orthonormal() {
    let (x, w) = harvest_core::quadrature::composite_gauss_legendre(0.0, 250.0, 250, 20);
    for l in 0..3u32 {
        for n1 in l + 1..=4 {
            for n2 in l + 1..=4 {
                let s: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&r, &w)| w * r * r * hydrogen_radial(n1, l, r, 1.0).unwrap() * hydrogen_radial(n2, l, r, 1.0).unwrap())
                    .sum();
                let want = if n1 == n2 { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12, "<{n1}{l}|{n2}{l}> = {s}");
            }
        }
    }
}

fn big_fact(n: i64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

/// Exact squared 3j symbol with its sign, from the Racah formula over big rationals.
fn racah_3j_squared(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> (i32, BigRational) {
    let zero = BigRational::from_integer(BigInt::from(0));
    if m1 + m2 + m3 != 0 || m1.abs() > l1 || m2.abs() > l2 || m3.abs() > l3 || l3 > l1 + l2 || l3 < (l1 - l2).abs() {
        return (0, zero);
    }
    let mut sum = zero.clone();
    for t in 0..=(l1 + l2 + l3) {
        let args = [t, l3 - l2 + t + m1, l3 - l1 + t - m2, l1 + l2 - l3 - t, l1 - t - m1, l2 - t + m2];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let den = args.iter().fold(BigInt::from(1), |acc, &a| acc * big_fact(a));
        let term = BigRational::new(BigInt::from(if t % 2 == 0 { 1 } else { -1 }), den);
        sum += term;
    }
    if sum == zero {
        return (0, zero);
    }
    let tri = BigRational::new(
        big_fact(l1 + l2 - l3) * big_fact(l1 - l2 + l3) * big_fact(-l1 + l2 + l3),
        big_fact(l1 + l2 + l3 + 1),
    );
    let mom = [l1 + m1, l1 - m1, l2 + m2, l2 - m2, l3 + m3, l3 - m3].iter().fold(BigInt::from(1), |acc, &a| acc * big_fact(a));
    let phase = if (l1 - l2 - m3).rem_euclid(2) == 0 { 1 } else { -1 };
    let sign = if sum > zero { phase } else { -phase };
    (sign, tri * BigRational::from_integer(mom) * sum.clone() * sum)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap();
    let d: f64 = r.denom().to_string().parse().unwrap();
    n / d
}

#[test]
fn three_j_matches_exact_racah_for_l_up_to_4() {
    let mut checked = 0;
    for l1 in 0..=4i64 {
        for l2 in 0..=4i64 {
            for l3 in 0..=4i64 {
                for m1 in -l1..=l1 {
                    for m2 in -l2..=l2 {
                        let m3 = -m1 - m2;
                        let (sign, sq) = racah_3j_squared(l1, l2, l3, m1, m2, m3);
                        let want = sign as f64 * rational_to_f64(&sq).sqrt();
                        let got = wigner_3j(l1 as u32, l2 as u32, l3 as u32, m1 as i32, m2 as i32, m3 as i32);
                        assert!((got - want).abs() <= 1e-12, "({l1} {l2} {l3}; {m1} {m2} {m3}): {got} vs {want}");
                        if sign == 0 {
                            assert_eq!(got, 0.0);
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
    // spot values: -sqrt(70)/35, sqrt(6)/6, 2 sqrt(5005)/1001
    assert!((wigner_3j(2, 2, 2, 0, 0, 0) + 70f64.sqrt() / 35.0).abs() < 1e-15);
    assert!((wigner_3j(1, 1, 1, 1, -1, 0) - 6f64.sqrt() / 6.0).abs() < 1e-15);
    assert!((wigner_3j(4, 4, 4, 2, -1, -1) - 2.0 * 5005f64.sqrt() / 1001.0).abs() < 1e-15);
}

#[test]
fn three_j_orthogonality() {
    for l1 in 0..=4u32 {
        for l2 in 0..=4u32 {
            for l3 in l1.abs_diff(l2)..=(l1 + l2).min(8) {
                for l3p in l1.abs_diff(l2)..=(l1 + l2).min(8) {
                    for m3 in -(l3.min(l3p) as i32)..=l3.min(l3p) as i32 {
                        let mut s = 0.0;
                        for m1 in -(l1 as i32)..=l1 as i32 {
                            let m2 = -m1 - m3;
                            if m2.unsigned_abs() <= l2 {
                                s += wigner_3j(l1, l2, l3, m1, m2, m3) * wigner_3j(l1, l2, l3p, m1, m2, m3);
                            }
                        }
                        let want = if l3 == l3p { 1.0 / (2 * l3 + 1) as f64 } else { 0.0 };
                        assert!((s - want).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

fn d_matrix(l: u32, e: EulerAngles) -> Vec<Vec<Complex64>> {
    let r = -(l as i32)..=l as i32;
    r.clone().map(|mu| r.clone().map(|m| wigner_d(l, mu, m, e.psi, e.theta, e.phi).unwrap()).collect()).collect()
}

fn mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn zyz_angles(m: [[f64; 3]; 3]) -> EulerAngles {
    EulerAngles::new(m[1][2].atan2(m[0][2]), m[2][2].clamp(-1.0, 1.0).acos(), m[2][1].atan2(-m[2][0]))
}

fn angles() -> impl Strategy<Value = EulerAngles> {
    (-3.1..3.1f64, 0.05..3.09f64, -3.1..3.1f64).prop_map(|(a, b, c)| EulerAngles::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wigner_d_unitary(e in angles(), l in 0u32..=4) {
        let d = d_matrix(l, e);
        let n = d.len();
        for i in 0..n {
            for j in 0..n {
                let s: Complex64 = (0..n).map(|k| d[i][k] * d[j][k].conj()).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((s - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wigner_d_composes_like_rotations(a in angles(), b in angles(), l in 1u32..=4) {
        let prod = zyz_angles(mul(&a.matrix(), &b.matrix()));
        let (da, db, dp) = (d_matrix(l, a), d_matrix(l, b), d_matrix(l, prod));
        let n = da.len();
        for i in 0..n {
            for j in 0..n {
                let s: Complex64 = (0..n).map(|k| da[i][k] * db[k][j]).sum();
                prop_assert!((s - dp[i][j]).norm() < 1e-11, "l={} ({},{}): {} vs {}", l, i, j, s, dp[i][j]);
            }
        }
    }

    #[test]
    fn wigner_d_inverse_is_adjoint(e in angles(), l in 0u32..=4) {
        let (d, di) = (d_matrix(l, e), d_matrix(l, e.inverse()));
        let n = d.len();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((di[i][j] - d[j][i].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spherical_harmonic_conjugation(l in 0u32..=8, m in 0i32..=8, th in 0.0..3.14f64, ph in -3.14..3.14f64) {
        prop_assume!(m as u32 <= l);
        let y = spherical_harmonic(AngularQuantum::new(l, m).unwrap(), th, ph).unwrap();
        let yn = spherical_harmonic(AngularQuantum::new(l, -m).unwrap(), th, ph).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(yn, y.conj() * sign);
    }

    #[test]
    fn bessel_recurrence(l in 1u32..=14, x in 0.5..60.0f64) {
        // j_{l-1} + j_{l+1} = (2l+1)/x j_l
        let lhs = spherical_bessel_j(l - 1, x).unwrap() + spherical_bessel_j(l + 1, x).unwrap();
        let rhs = (2 * l + 1) as f64 / x * spherical_bessel_j(l, x).unwrap();
        let scale = spherical_bessel_j(l - 1, x).unwrap().abs().max(spherical_bessel_j(l + 1, x).unwrap().abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn bessel_bounded(l in 0u32..=16, x in 0.0..200.0f64) {
        prop_assert!(spherical_bessel_j(l, x).unwrap().abs() <= 1.0);
    }
}
