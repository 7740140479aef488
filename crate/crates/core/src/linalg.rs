//! Fixed-size complex linear algebra for one- and two-qubit objects.
//!
//! Everything here works on stack-allocated 2×2 / 4×4 arrays. Two-qubit
//! amplitudes use the computational order |00⟩, |01⟩, |10⟩, |11⟩ with qubit A
//! as the most significant index.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::CartanParams;
use crate::measures::lambda_vector;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// Dense 4×4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat2 {
    pub const fn zeros() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn new(rows: [[C64; 2]; 2]) -> Self {
        Mat2(rows)
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Mat2(rows.map(|r| r.map(|x| c(x, 0.0))))
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn frobenius_distance(&self, other: &Mat2) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += (self.0[i][j] - other.0[i][j]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// ‖M†M − I‖_F
    pub fn unitarity_residual(&self) -> f64 {
        (self.dagger() * *self).frobenius_distance(&Mat2::identity())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl Mat4 {
    pub const fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Mat4::zeros();
        for k in 0..4 {
            m.0[k][k] = ONE;
        }
        m
    }

    pub fn new(rows: [[C64; 4]; 4]) -> Self {
        Mat4(rows)
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        Mat4(rows.map(|r| r.map(|x| c(x, 0.0))))
    }

    pub fn diagonal(d: [C64; 4]) -> Self {
        let mut m = Mat4::zeros();
        for k in 0..4 {
            m.0[k][k] = d[k];
        }
        m
    }

    pub fn from_columns(cols: [[C64; 4]; 4]) -> Self {
        let mut m = Mat4::zeros();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..4 {
                m.0[i][j] = col[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> [C64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    pub fn dagger(&self) -> Self {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Mat4(self.0.map(|r| r.map(|x| x.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat4(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.0[i];
            *o = r[0] * v[0] + r[1] * v[1] + r[2] * v[2] + r[3] * v[3];
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Mat4) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += (self.0[i][j] - other.0[i][j]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// ‖M†M − I‖_F
    pub fn unitarity_residual(&self) -> f64 {
        (self.dagger() * *self).frobenius_distance(&Mat4::identity())
    }

    /// ‖M − M†‖_F
    pub fn hermiticity_residual(&self) -> f64 {
        self.frobenius_distance(&self.dagger())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.0;
        let mut det = ONE;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
                .unwrap();
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            for row in col + 1..4 {
                let factor = a[row][col] / p;
                for k in col..4 {
                    let v = a[col][k];
                    a[row][k] -= factor * v;
                }
            }
        }
        det
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        &self * &rhs
    }
}

impl Mul<&Mat4> for &Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

/// Kronecker product `a ⊗ b`, with `a` acting on qubit A.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Kronecker product of two single-qubit vectors.
pub fn kron_vec(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

pub fn inner(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64; 4]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalized two-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState4([C64; 4]);

impl PureState4 {
    pub const NORM_TOL: f64 = 1e-12;

    /// Accepts amplitudes whose norm is already 1 within `NORM_TOL`.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let n = norm(&amps);
        if (n - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NonNormalizedState { norm: n });
        }
        Ok(PureState4(amps))
    }

    /// Rescales arbitrary nonzero amplitudes onto the unit sphere.
    pub fn normalized(amps: [C64; 4]) -> Result<Self> {
        let n = norm(&amps);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NonNormalizedState { norm: n });
        }
        Ok(PureState4(amps.map(|a| a / n)))
    }

    pub(crate) fn from_unit_unchecked(amps: [C64; 4]) -> Self {
        PureState4(amps)
    }

    /// Computational basis state |k⟩, k in 0..4.
    pub fn basis(k: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[k] = ONE;
        PureState4(amps)
    }

    pub fn product(a: &[C64; 2], b: &[C64; 2]) -> Result<Self> {
        Self::normalized(kron_vec(a, b))
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn inner(&self, other: &PureState4) -> C64 {
        inner(&self.0, &other.0)
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }

    pub fn evolve(&self, u: &Mat4) -> PureState4 {
        PureState4(u.apply(&self.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMat2(pub [[C64; 2]; 2]);

impl DensityMat2 {
    pub fn trace(&self) -> f64 {
        self.0[0][0].re + self.0[1][1].re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.0;
        ((m[0][0].im).powi(2)
            + (m[1][1].im).powi(2)
            + 2.0 * (m[0][1] - m[1][0].conj()).norm_sqr())
        .sqrt()
    }
}

/// Partial trace of a two-qubit operator, keeping `keep`.
pub fn partial_trace(rho: &Mat4, keep: Subsystem) -> Result<DensityMat2> {
    let dev = rho.hermiticity_residual();
    if !(dev <= 1e-8) {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    let r = &rho.0;
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            *o = match keep {
                Subsystem::A => r[2 * i][2 * j] + r[2 * i + 1][2 * j + 1],
                Subsystem::B => r[i][j] + r[2 + i][2 + j],
            };
        }
    }
    Ok(DensityMat2(out))
}

/// Reduced state of a pure state, computed directly from the amplitudes.
pub fn reduced_density(psi: &PureState4, keep: Subsystem) -> DensityMat2 {
    let a = psi.amplitudes();
    // amplitude matrix m[i][k] = a[2i + k]
    match keep {
        Subsystem::A => {
            let r00 = a[0].norm_sqr() + a[1].norm_sqr();
            let r11 = a[2].norm_sqr() + a[3].norm_sqr();
            let r01 = a[0] * a[2].conj() + a[1] * a[3].conj();
            DensityMat2([[c(r00, 0.0), r01], [r01.conj(), c(r11, 0.0)]])
        }
        Subsystem::B => {
            let r00 = a[0].norm_sqr() + a[2].norm_sqr();
            let r11 = a[1].norm_sqr() + a[3].norm_sqr();
            let r01 = a[0] * a[1].conj() + a[2] * a[3].conj();
            DensityMat2([[c(r00, 0.0), r01], [r01.conj(), c(r11, 0.0)]])
        }
    }
}

/// Closed-form eigenvalues of a 2×2 Hermitian matrix, descending and
/// clamped to [0, 1].
pub fn herm_eigvals2(m: &DensityMat2) -> (f64, f64) {
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    let b = m.0[0][1];
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = (half * half + b.norm_sqr()).sqrt();
    ((mean + disc).clamp(0.0, 1.0), (mean - disc).clamp(0.0, 1.0))
}

/// Phase-optimal Frobenius distance min_γ ‖a − e^{iγ} b‖ and the optimal γ.
pub fn phase_distance(a: &Mat4, b: &Mat4) -> (f64, f64) {
    let overlap = (&b.dagger() * a).trace();
    let gamma = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    let rotated = b.scale(C64::from_polar(1.0, gamma));
    (a.frobenius_distance(&rotated), gamma)
}

/// U_d = exp(−i(αx σx⊗σx + αy σy⊗σy + αz σz⊗σz)).
///
/// The three generators commute and are simultaneously diagonal in the Bell
/// basis: Φ+ ↦ λ1, Φ− ↦ λ2, Ψ− ↦ λ3, Ψ+ ↦ λ4 with eigenvalue e^{−iλk}.
pub fn cartan_exp(alpha: &CartanParams) -> Mat4 {
    let lam = lambda_vector(alpha).0;
    let e = lam.map(|l| C64::from_polar(1.0, -l));
    let half = c(0.5, 0.0);
    let mut u = Mat4::zeros();
    let phi_sum = (e[0] + e[1]) * half;
    let phi_diff = (e[0] - e[1]) * half;
    let psi_sum = (e[3] + e[2]) * half;
    let psi_diff = (e[3] - e[2]) * half;
    u.0[0][0] = phi_sum;
    u.0[3][3] = phi_sum;
    u.0[0][3] = phi_diff;
    u.0[3][0] = phi_diff;
    u.0[1][1] = psi_sum;
    u.0[2][2] = psi_sum;
    u.0[1][2] = psi_diff;
    u.0[2][1] = psi_diff;
    u
}

/// Eigen-decomposition of a real symmetric 4×4 matrix by cyclic Jacobi
/// rotations. Returns eigenvalues and the orthogonal matrix whose columns
/// are the eigenvectors.
pub fn sym_eigen4(m: &[[f64; 4]; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = *m;
    let mut v = [[0.0; 4]; 4];
    for (k, row) in v.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    for _sweep in 0..64 {
        let off: f64 = (0..4)
            .flat_map(|p| (p + 1..4).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>();
        if off <= 1e-32 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = cs * vp - sn * vq;
                    row[q] = sn * vp + cs * vq;
                }
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2], a[3][3]], v)
}

/// Householder QR of a 4×4 complex matrix: returns (Q, R) with Q unitary and
/// R upper triangular.
pub fn qr4(m: &Mat4) -> (Mat4, Mat4) {
    let mut r = *m;
    let mut q = Mat4::identity();
    for k in 0..3 {
        let alpha_norm: f64 = (k..4).map(|i| r.0[i][k].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = r.0[k][k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let mut v = [ZERO; 4];
        for i in k..4 {
            v[i] = r.0[i][k];
        }
        v[k] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // R ← (I − 2vv†/v†v) R
        for j in 0..4 {
            let s: C64 = (k..4).map(|i| v[i].conj() * r.0[i][j]).sum::<C64>() * (2.0 / vnorm2);
            for i in k..4 {
                r.0[i][j] -= v[i] * s;
            }
        }
        // Q ← Q (I − 2vv†/v†v)
        for i in 0..4 {
            let s: C64 = (k..4).map(|j| q.0[i][j] * v[j]).sum::<C64>() * (2.0 / vnorm2);
            for j in k..4 {
                q.0[i][j] -= s * v[j].conj();
            }
        }
    }
    for i in 1..4 {
        for j in 0..i {
            r.0[i][j] = ZERO;
        }
    }
    (q, r)
}
