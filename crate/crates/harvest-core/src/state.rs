//! Joint detector state to second order in the coupling, and its negativity.

use num_complex::Complex64;

use crate::error::{HarvestError, Result};

/// Matrix elements of the final two-detector state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoDetectorState {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_ab: Complex64,
    pub l_ba: Complex64,
    pub m: Complex64,
}

impl TwoDetectorState {
    /// Identical detectors with no cross terms.
    pub fn symmetric(l: f64, m: Complex64) -> Self {
        Self { l_aa: l, l_bb: l, m, ..Default::default() }
    }

    /// The same state with the detector labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { l_aa: self.l_bb, l_bb: self.l_aa, l_ab: self.l_ba, l_ba: self.l_ab, m: self.m }
    }

    /// `L_AA + L_BB <= 1`, below which the perturbative state is meaningful.
    pub fn is_perturbative(&self) -> bool {
        self.l_aa + self.l_bb <= 1.0
    }
}

/// A 4x4 density matrix in the basis `{gg, ge, eg, ee}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub rho: [[Complex64; 4]; 4],
    /// Set when `L_AA + L_BB > 1`.
    pub perturbativity_warning: bool,
}

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.rho[i][i]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.rho[i][j] - self.rho[j][i].conj()).norm() <= tol))
    }

    /// Partial transpose on detector B: `rho_{(a b),(a' b')} -> rho_{(a b'),(a' b)}`.
    pub fn partial_transpose_b(&self) -> [[Complex64; 4]; 4] {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for ap in 0..2 {
                    for bp in 0..2 {
                        out[2 * a + bp][2 * ap + b] = self.rho[2 * a + b][2 * ap + bp];
                    }
                }
            }
        }
        out
    }
}

pub fn assemble_density_matrix(s: &TwoDetectorState) -> DensityMatrix {
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let rho = [
        [r(1.0 - s.l_aa - s.l_bb), z, z, s.m.conj()],
        [z, r(s.l_bb), s.l_ba, z],
        [z, s.l_ab, r(s.l_aa), z],
        [s.m, z, z, z],
    ];
    DensityMatrix { rho, perturbativity_warning: !s.is_perturbative() }
}

/// `max(0, sqrt(|M|^2 - (L_AA - L_BB)^2 / 4) - (L_AA + L_BB) / 2)`.
///
/// A negative square-root argument is clamped to zero, which gives `N = 0`.
/// For equal excitation probabilities this is `max(0, |M| - L)`.
pub fn negativity(s: &TwoDetectorState) -> f64 {
    let d = s.l_aa - s.l_bb;
    let arg = s.m.norm_sqr() - 0.25 * d * d;
    if arg <= 0.0 {
        return 0.0;
    }
    (libm::sqrt(arg) - 0.5 * (s.l_aa + s.l_bb)).max(0.0)
}

/// Minus the sum of the negative eigenvalues of the partial transpose.
pub fn negativity_oracle(s: &TwoDetectorState) -> Result<f64> {
    let pt = assemble_density_matrix(s).partial_transpose_b();
    let eig = hermitian_eigenvalues(&pt)?;
    Ok(-eig.iter().filter(|v| **v < 0.0).sum::<f64>())
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending.
///
/// `A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`, whose
/// spectrum is that of the original with every eigenvalue doubled, and
/// diagonalised by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(h: &[[Complex64; 4]; 4]) -> Result<[f64; 4]> {
    let scale = h.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let hermitian = (0..4).all(|i| (0..4).all(|j| (h[i][j] - h[j][i].conj()).norm() <= 1e-12 * scale));
    if !hermitian {
        return Err(HarvestError::Numeric("matrix is not Hermitian".into()));
    }
    let mut a = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = h[i][j].re;
            a[i + 4][j + 4] = h[i][j].re;
            a[i][j + 4] = -h[i][j].im;
            a[i + 4][j] = h[i][j].im;
        }
    }
    let norm_sq: f64 = a.iter().flatten().map(|v| v * v).sum();
    // Rotations leave off-diagonal residue of order eps |A|, so aim just above it.
    let tol = (4.0 * f64::EPSILON) * (4.0 * f64::EPSILON) * norm_sq;
    let mut converged = false;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j {
                    off += v * v;
                }
            }
        }
        if off <= tol || off < 1e-300 {
            converged = true;
            break;
        }
        for p in 0..8 {
            for q in (p + 1)..8 {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..8 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..8 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    if !converged {
        return Err(HarvestError::Numeric("Jacobi iteration did not converge".into()));
    }
    let mut d: [f64; 8] = core::array::from_fn(|i| a[i][i]);
    d.sort_by(f64::total_cmp);
    Ok([d[0], d[2], d[4], d[6]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_state_is_ground() {
        let rho = assemble_density_matrix(&TwoDetectorState::default());
        assert_eq!(rho.rho[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(rho.trace(), Complex64::new(1.0, 0.0));
        assert_eq!(negativity_oracle(&TwoDetectorState::default()).unwrap(), 0.0);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, v) in [3.0, -1.0, 0.5, 2.0].iter().enumerate() {
            h[i][i] = Complex64::new(*v, 0.0);
        }
        assert_eq!(hermitian_eigenvalues(&h).unwrap(), [-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn perturbativity_flag() {
        let s = TwoDetectorState::symmetric(0.6, Complex64::new(0.1, 0.0));
        assert!(assemble_density_matrix(&s).perturbativity_warning);
    }
}
