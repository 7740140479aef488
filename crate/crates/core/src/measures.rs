//! Entanglement and coherence quantifiers for pure two-qubit states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::CartanParams;
use crate::linalg::{herm_eigvals2, inner, reduced_density, Mat4, PureState4, Subsystem, C64, ONE, ZERO};

/// Eigenvalues below this are treated as exactly zero in entropies.
pub const EIGEN_FLOOR: f64 = 1e-15;

/// Binary entropy in bits, with H(0) = H(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    shannon_term(p) + shannon_term(1.0 - p)
}

#[inline]
fn shannon_term(p: f64) -> f64 {
    if p <= EIGEN_FLOOR {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy (bits) of a probability vector; entries are clamped to
/// [0, 1] first.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| shannon_term(p.clamp(0.0, 1.0))).sum()
}

pub fn von_neumann_entropy(eigs: (f64, f64)) -> f64 {
    shannon_entropy(&[eigs.0, eigs.1])
}

/// Local von Neumann entropy of a pure two-qubit state, in ebits.
pub fn ent_entropy(psi: &PureState4) -> f64 {
    von_neumann_entropy(herm_eigvals2(&reduced_density(psi, Subsystem::A)))
}

/// Squared Schmidt coefficients, descending.
pub fn schmidt_weights(psi: &PureState4) -> (f64, f64) {
    herm_eigvals2(&reduced_density(psi, Subsystem::A))
}

/// Vidal monotone E₂: the smaller squared Schmidt coefficient.
pub fn vidal_e2(psi: &PureState4) -> f64 {
    schmidt_weights(psi).1.min(0.5)
}

/// Local product-basis parameters of |η⟩ = cos(θ/2)|0⟩ + e^{iφ}sin(θ/2)|1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBasisParams {
    pub theta: f64,
    pub phi: f64,
}

impl ProductBasisParams {
    pub fn new(theta: f64, phi: f64) -> Self {
        ProductBasisParams { theta, phi }
    }

    /// Maps arbitrary angles to θ ∈ [0, π], φ ∈ [0, 2π) describing the same
    /// basis states up to phases.
    pub fn canonical(self) -> Self {
        let tau = std::f64::consts::TAU;
        let mut theta = self.theta.rem_euclid(tau);
        let mut phi = self.phi;
        if theta > std::f64::consts::PI {
            theta = tau - theta;
            phi += std::f64::consts::PI;
        }
        let mut phi = phi.rem_euclid(tau);
        if phi >= tau {
            phi = 0.0;
        }
        ProductBasisParams { theta, phi }
    }

    /// (|η⟩, |η⊥⟩)
    pub fn eta_pair(&self) -> ([C64; 2], [C64; 2]) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let eta = [C64::new(c, 0.0), C64::from_polar(s, self.phi)];
        let perp = [C64::from_polar(-s, -self.phi), C64::new(c, 0.0)];
        (eta, perp)
    }
}

/// Orthonormal basis of the two-qubit space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Basis4([[C64; 4]; 4]);

impl Basis4 {
    pub const ORTHONORMALITY_TOL: f64 = 1e-8;

    pub fn new(elements: [PureState4; 4]) -> Result<Self> {
        Self::from_vectors(elements.map(|e| *e.amplitudes()))
    }

    pub fn from_vectors(v: [[C64; 4]; 4]) -> Result<Self> {
        let mut dev = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { ONE } else { ZERO };
                dev = dev.max((inner(&v[i], &v[j]) - target).norm());
            }
        }
        if !(dev <= Self::ORTHONORMALITY_TOL) {
            return Err(Error::NonOrthonormalBasis { deviation: dev });
        }
        Ok(Basis4(v))
    }

    pub fn computational() -> Self {
        Basis4(std::array::from_fn(|k| *PureState4::basis(k).amplitudes()))
    }

    /// {|00⟩, |01⟩, |1η⟩, |1η⊥⟩}
    pub fn product(b: &ProductBasisParams) -> Self {
        let (eta, perp) = b.eta_pair();
        Basis4([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, eta[0], eta[1]],
            [ZERO, ZERO, perp[0], perp[1]],
        ])
    }

    /// Columns of a unitary as basis elements, W|00⟩ … W|11⟩.
    pub fn from_unitary(w: &Mat4) -> Result<Self> {
        Self::from_vectors(std::array::from_fn(|k| w.column(k)))
    }

    pub fn element(&self, k: usize) -> PureState4 {
        PureState4::from_unit_unchecked(self.0[k])
    }

    pub fn vectors(&self) -> &[[C64; 4]; 4] {
        &self.0
    }

    /// Coordinates ⟨b_k|ψ⟩.
    pub fn coordinates(&self, psi: &[C64; 4]) -> [C64; 4] {
        std::array::from_fn(|k| inner(&self.0[k], psi))
    }
}

/// Relative entropy of coherence (bits) of ψ in `basis`.
pub fn rel_ent_coherence(psi: &PureState4, basis: &Basis4) -> f64 {
    coherence_of_coordinates(&basis.coordinates(psi.amplitudes()))
}

/// l1-norm coherence of ψ in `basis`: Σ_{i≠j} |ρ_ij| = (Σ|c_i|)² − 1.
pub fn l1_coherence(psi: &PureState4, basis: &Basis4) -> f64 {
    l1_of_coordinates(&basis.coordinates(psi.amplitudes()))
}

pub(crate) fn coherence_of_coordinates(coords: &[C64; 4]) -> f64 {
    shannon_entropy(&coords.map(|x| x.norm_sqr()))
}

pub(crate) fn l1_of_coordinates(coords: &[C64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                acc += coords[i].norm() * coords[j].norm();
            }
        }
    }
    acc
}

/// Kernel eigenphase combinations λ1..λ4.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaVector(pub [f64; 4]);

pub fn lambda_vector(alpha: &CartanParams) -> LambdaVector {
    let (x, y, z) = (alpha.ax, alpha.ay, alpha.az);
    LambdaVector([x - y + z, -x + y + z, -x - y - z, x + y - z])
}

/// max_{k,l} |sin(λ_k − λ_l)|
pub fn concurrence_bar(alpha: &CartanParams) -> f64 {
    let l = lambda_vector(alpha).0;
    let mut best = 0.0f64;
    for k in 0..4 {
        for m in k + 1..4 {
            best = best.max((l[k] - l[m]).sin().abs());
        }
    }
    best.min(1.0)
}

/// H((1 + √(1 − C̄²))/2)
pub fn ent_from_concurrence(cbar: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&cbar) {
        return Err(Error::DomainError { value: cbar, domain: "[0, 1]" });
    }
    let cbar = cbar.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - cbar * cbar).max(0.0).sqrt())))
}
