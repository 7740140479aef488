//! Canonical (KAK) decomposition of two-qubit unitaries via the magic basis.
//!
//! In the magic basis local gates SU(2)⊗SU(2) become real orthogonal and the
//! Cartan kernel becomes diagonal, so U = K1·U_d·K2 reduces to the
//! diagonalization of the complex-symmetric matrix UᵀU there.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::{CartanParams, RngState, Unitary4};
use crate::error::{Error, Result};
use crate::linalg::{c, cartan_exp, kron, sym_eigen4, Mat2, Mat4, C64, ZERO};

const MAX_ATTEMPTS: usize = 8;
const ACCEPT_RESIDUAL: f64 = 1e-10;
const FAIL_RESIDUAL: f64 = 1e-8;
const OFFDIAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakDecomposition {
    pub ua: Mat2,
    pub ub: Mat2,
    pub va: Mat2,
    pub vb: Mat2,
    pub alpha: CartanParams,
    pub global_phase: f64,
}

impl KakDecomposition {
    /// e^{iγ}(ua⊗ub)·U_d(α)·(va⊗vb)
    pub fn reconstruct(&self) -> Mat4 {
        let left = kron(&self.ua, &self.ub);
        let right = kron(&self.va, &self.vb);
        (&(&left * &cartan_exp(&self.alpha)) * &right).scale(C64::from_polar(1.0, self.global_phase))
    }

    pub fn residual(&self, u: &Unitary4) -> f64 {
        self.reconstruct().frobenius_distance(u.matrix())
    }
}

/// Columns: Φ1 = (|00⟩+|11⟩)/√2, Φ2 = −i(|00⟩−|11⟩)/√2, Φ3 = (|01⟩−|10⟩)/√2,
/// Φ4 = −i(|01⟩+|10⟩)/√2. Column k carries the kernel eigenphase λ_k.
pub(crate) fn magic_basis() -> Mat4 {
    let r = c(FRAC_1_SQRT_2, 0.0);
    let mi = c(0.0, -FRAC_1_SQRT_2);
    Mat4([
        [r, mi, ZERO, ZERO],
        [ZERO, ZERO, r, mi],
        [ZERO, ZERO, -r, mi],
        [r, -mi, ZERO, ZERO],
    ])
}

/// Splits a product matrix K = a⊗b (up to phase) into SU(2) factors.
fn split_local(k: &Mat4) -> (Mat2, Mat2) {
    let mut best = (0, 0, -1.0);
    for kk in 0..2 {
        for ll in 0..2 {
            let w: f64 = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| k.0[2 * i + kk][2 * j + ll].norm_sqr())
                .sum();
            if w > best.2 {
                best = (kk, ll, w);
            }
        }
    }
    let (kk, ll, _) = best;
    let block = Mat2(std::array::from_fn(|i| std::array::from_fn(|j| k.0[2 * i + kk][2 * j + ll])));
    let a = block.scale(block.det().sqrt().inv());
    let mut b = Mat2::zeros();
    for p in 0..2 {
        for q in 0..2 {
            let mut acc = ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    acc += a.0[i][j].conj() * k.0[2 * i + p][2 * j + q];
                }
            }
            b.0[p][q] = acc * 0.5;
        }
    }
    let b = b.scale(b.det().sqrt().inv());
    (a, b)
}

fn attempt(u: &Unitary4, up: &Mat4, mq: &Mat4, magic: &Mat4, t: f64) -> Option<KakDecomposition> {
    let (sa, sb) = t.sin_cos();
    let mut real = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            real[i][j] = sb * mq.0[i][j].re + sa * mq.0[i][j].im;
        }
    }
    let (_, mut p) = sym_eigen4(&real);
    let mut p4 = Mat4::from_real(p);
    if p4.det().re < 0.0 {
        for row in p.iter_mut() {
            row[3] = -row[3];
        }
        p4 = Mat4::from_real(p);
    }
    let d2 = &(&p4.transpose() * mq) * &p4;
    let off: f64 = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| d2.0[i][j].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if off > OFFDIAG_TOL {
        return None;
    }
    let mut d: [C64; 4] = std::array::from_fn(|k| C64::from_polar(1.0, 0.5 * d2.0[k][k].arg()));
    let mut o1 = &(up * &p4) * &Mat4::diagonal(d.map(|x| x.inv()));
    if o1.det().re < 0.0 {
        d[0] = -d[0];
        for row in o1.0.iter_mut() {
            row[0] = -row[0];
        }
    }
    let k1 = &(magic * &o1) * &magic.dagger();
    let k2 = &(magic * &p4.transpose()) * &magic.dagger();
    let (ua, ub) = split_local(&k1);
    let (va, vb) = split_local(&k2);

    // d_k = e^{iγ} e^{−iλ_k}, Σλ_k = 0
    let phi = d.map(|x| -x.arg());
    let shift = -phi.iter().sum::<f64>() / 4.0;
    let lam = phi.map(|x| x + shift);
    let alpha = CartanParams::new(
        0.5 * (lam[0] + lam[3]),
        0.5 * (lam[1] + lam[3]),
        0.5 * (lam[0] + lam[1]),
    )
    .canonical();

    let mut kak = KakDecomposition { ua, ub, va, vb, alpha, global_phase: 0.0 };
    let base = kak.reconstruct();
    let overlap = (&base.dagger() * u.matrix()).trace();
    kak.global_phase = overlap.arg();
    Some(kak)
}

/// Decomposes `u` as e^{iγ}(ua⊗ub)·U_d(α)·(va⊗vb) with α in [0, π)³.
pub fn kak_decompose(u: &Unitary4) -> Result<KakDecomposition> {
    let det = u.matrix().det();
    let su = u.matrix().scale(C64::from_polar(1.0, -det.arg() / 4.0));
    let magic = magic_basis();
    let up = &(&magic.dagger() * &su) * &magic;
    let mq = &up.transpose() * &up;

    let mut rng = RngState::new(0x6b61_6b00);
    let mut best: Option<(f64, KakDecomposition)> = None;
    for k in 0..MAX_ATTEMPTS {
        let t = if k == 0 { 0.5667 } else { rng.uniform_in(0.0, std::f64::consts::PI) };
        let Some(kak) = attempt(u, &up, &mq, &magic, t) else { continue };
        let residual = kak.residual(u);
        if residual < ACCEPT_RESIDUAL {
            return Ok(kak);
        }
        if best.as_ref().map_or(true, |(r, _)| residual < *r) {
            best = Some((residual, kak));
        }
    }
    match best {
        Some((r, kak)) if r <= FAIL_RESIDUAL => Ok(kak),
        Some((r, _)) => Err(Error::DecompositionFailed { residual: r }),
        None => Err(Error::DecompositionFailed { residual: f64::INFINITY }),
    }
}
