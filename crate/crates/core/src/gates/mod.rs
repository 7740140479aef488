//! Two-qubit gate construction: SU(2) locals, the Cartan form
//! U = (U_A ⊗ U_B) U_d (V_A ⊗ V_B), named gates, Haar sampling and KAK.

mod haar;
mod kak;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, cartan_exp, kron, Mat2, Mat4, C64, ONE, ZERO};

pub use haar::{haar_sample, RngState};
pub use kak::{kak_decompose, KakDecomposition};

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

/// Euler-type angles of an SU(2) element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SU2Params {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl SU2Params {
    /// Wraps the angles into θ ∈ [0, π], φ ∈ [0, 2π), ψ ∈ [0, 4π) without
    /// changing the matrix `su2` produces.
    pub fn new(theta: f64, phi: f64, psi: f64) -> Self {
        // θ → θ + 2π flips the sign of W, as does ψ → ψ + 2π
        let theta_turns = (theta / TWO_PI).floor();
        let mut theta = theta - theta_turns * TWO_PI;
        let mut phi = phi;
        let mut psi = psi + theta_turns * TWO_PI;
        if theta >= TWO_PI {
            theta = 0.0;
            psi += TWO_PI;
        }
        if theta > PI {
            // W(2π−θ, φ+π, ψ+π) = W(θ, φ, ψ)
            theta = TWO_PI - theta;
            phi += PI;
            psi += PI;
        }
        // each 2π in φ flips the sign of W; an equal shift in ψ flips it back
        let turns = (phi / TWO_PI).floor();
        phi -= turns * TWO_PI;
        psi += turns * TWO_PI;
        psi = psi.rem_euclid(FOUR_PI);
        if phi >= TWO_PI {
            phi = 0.0;
            psi = (psi + TWO_PI).rem_euclid(FOUR_PI);
        }
        if psi >= FOUR_PI {
            psi = 0.0;
        }
        SU2Params { theta, phi, psi }
    }

    pub fn identity() -> Self {
        SU2Params { theta: 0.0, phi: 0.0, psi: 0.0 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta, self.phi, self.psi]
    }
}

/// The SU(2) matrix
/// [[cos(θ/2)e^{i(ψ+φ)/2}, sin(θ/2)e^{−i(ψ−φ)/2}], [−sin(θ/2)e^{i(ψ−φ)/2}, cos(θ/2)e^{−i(ψ+φ)/2}]].
pub fn su2(p: &SU2Params) -> Mat2 {
    let (s, co) = (0.5 * p.theta).sin_cos();
    let sum = 0.5 * (p.psi + p.phi);
    let diff = 0.5 * (p.psi - p.phi);
    Mat2([
        [C64::from_polar(co, sum), C64::from_polar(s, -diff)],
        [C64::from_polar(-s, diff), C64::from_polar(co, -sum)],
    ])
}

/// Coefficients of the Cartan kernel exp(−i Σ α_k σ_k⊗σ_k).
///
/// Any finite triple is accepted; `canonical` reduces each component into
/// [0, π), which changes the kernel by a global sign only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanParams {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl CartanParams {
    pub const fn new(ax: f64, ay: f64, az: f64) -> Self {
        CartanParams { ax, ay, az }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.ax, self.ay, self.az]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    pub fn canonical(self) -> Self {
        let wrap = |x: f64| {
            let r = x.rem_euclid(PI);
            if r >= PI {
                0.0
            } else {
                r
            }
        };
        Self::new(wrap(self.ax), wrap(self.ay), wrap(self.az))
    }
}

/// A 4×4 unitary matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unitary4(Mat4);

impl Unitary4 {
    pub const UNITARITY_TOL: f64 = 1e-10;

    pub fn new(m: Mat4) -> Result<Self> {
        Self::with_tolerance(m, Self::UNITARITY_TOL)
    }

    pub fn with_tolerance(m: Mat4, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonUnitaryInput { residual: f64::NAN });
        }
        let residual = m.unitarity_residual();
        if residual > tol {
            return Err(Error::NonUnitaryInput { residual });
        }
        Ok(Unitary4(m))
    }

    pub(crate) fn from_mat_unchecked(m: Mat4) -> Self {
        Unitary4(m)
    }

    pub fn identity() -> Self {
        Unitary4(Mat4::identity())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn dagger(&self) -> Self {
        Unitary4(self.0.dagger())
    }

    pub fn then(&self, next: &Unitary4) -> Self {
        Unitary4(&next.0 * &self.0)
    }

    pub fn local(a: &Mat2, b: &Mat2) -> Self {
        Unitary4(kron(a, b))
    }
}

impl std::ops::Mul for Unitary4 {
    type Output = Unitary4;
    fn mul(self, rhs: Unitary4) -> Unitary4 {
        Unitary4(&self.0 * &rhs.0)
    }
}

/// All local and kernel parameters of the Cartan form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanForm {
    pub ua: SU2Params,
    pub ub: SU2Params,
    pub alpha: CartanParams,
    pub va: SU2Params,
    pub vb: SU2Params,
}

impl CartanForm {
    pub fn kernel_only(alpha: CartanParams) -> Self {
        let id = SU2Params::identity();
        CartanForm { ua: id, ub: id, alpha, va: id, vb: id }
    }

    pub fn unitary(&self) -> Unitary4 {
        compose_cartan(&self.ua, &self.ub, &self.va, &self.vb, &self.alpha)
    }
}

/// (su2(ua) ⊗ su2(ub)) · U_d(alpha) · (su2(va) ⊗ su2(vb))
pub fn compose_cartan(
    ua: &SU2Params,
    ub: &SU2Params,
    va: &SU2Params,
    vb: &SU2Params,
    alpha: &CartanParams,
) -> Unitary4 {
    let left = kron(&su2(ua), &su2(ub));
    let right = kron(&su2(va), &su2(vb));
    let kernel = cartan_exp(alpha);
    Unitary4(&(&left * &kernel) * &right)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedGate {
    Cnot,
    Cz,
    Swap,
    SqrtSwap,
    Yx,
    Hh,
    Hi,
}

impl NamedGate {
    pub const ALL: [NamedGate; 7] = [
        NamedGate::Cnot,
        NamedGate::Cz,
        NamedGate::Swap,
        NamedGate::SqrtSwap,
        NamedGate::Yx,
        NamedGate::Hh,
        NamedGate::Hi,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NamedGate::Cnot => "CNOT",
            NamedGate::Cz => "CZ",
            NamedGate::Swap => "SWAP",
            NamedGate::SqrtSwap => "sqrt(SWAP)",
            NamedGate::Yx => "YX",
            NamedGate::Hh => "H⊗H",
            NamedGate::Hi => "H⊗I",
        }
    }

    pub fn unitary(self) -> Unitary4 {
        named_gate(self)
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NamedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|ch| !matches!(ch, '_' | '-' | ' ' | '(' | ')'))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "cnot" | "cx" => NamedGate::Cnot,
            "cz" => NamedGate::Cz,
            "swap" => NamedGate::Swap,
            "sqrtswap" | "rootswap" => NamedGate::SqrtSwap,
            "yx" => NamedGate::Yx,
            "hh" => NamedGate::Hh,
            "hi" => NamedGate::Hi,
            _ => return Err(Error::UnknownGate(s.to_string())),
        })
    }
}

pub fn pauli_x() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> Mat2 {
    Mat2([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]])
}

pub fn pauli_z() -> Mat2 {
    Mat2::from_real([[1.0, 0.0], [0.0, -1.0]])
}

pub fn hadamard() -> Mat2 {
    Mat2::from_real([[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]])
}

fn controlled(target: &Mat2) -> Mat4 {
    let mut m = Mat4::identity();
    for i in 0..2 {
        for j in 0..2 {
            m.0[2 + i][2 + j] = target.0[i][j];
        }
    }
    m
}

pub fn named_gate(gate: NamedGate) -> Unitary4 {
    let m = match gate {
        NamedGate::Cnot => controlled(&pauli_x()),
        NamedGate::Cz => controlled(&pauli_z()),
        NamedGate::Swap => Mat4::from_real([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]),
        NamedGate::SqrtSwap => {
            let p = c(0.5, 0.5);
            let m = c(0.5, -0.5);
            Mat4([
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, p, m, ZERO],
                [ZERO, m, p, ZERO],
                [ZERO, ZERO, ZERO, ONE],
            ])
        }
        NamedGate::Yx => kron(&pauli_y(), &pauli_x()),
        NamedGate::Hh => kron(&hadamard(), &hadamard()),
        NamedGate::Hi => kron(&hadamard(), &Mat2::identity()),
    };
    Unitary4(m)
}
