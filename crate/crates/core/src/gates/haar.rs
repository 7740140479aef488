use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Unitary4;
use crate::linalg::{c, qr4, Mat4, C64};

const DEGENERATE_PIVOT: f64 = 1e-14;

/// Deterministic random stream. Independent streams are addressed by
/// `(seed, stream)`; the same pair always yields the same sequence.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
    degenerate_draws: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngState { seed, stream, rng, spare_normal: None, degenerate_draws: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of Ginibre draws rejected for a near-singular R factor.
    pub fn degenerate_draws(&self) -> u64 {
        self.degenerate_draws
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 − U lies in (0, 1], so the log is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, co) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare_normal = Some(r * s);
        r * co
    }
}

/// Haar-random 4×4 unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved onto Q.
pub fn haar_sample(rng: &mut RngState) -> Unitary4 {
    loop {
        let mut z = Mat4::zeros();
        for row in z.0.iter_mut() {
            for x in row.iter_mut() {
                let re = rng.normal();
                let im = rng.normal();
                *x = c(re, im);
            }
        }
        let (q, r) = qr4(&z);
        if (0..4).any(|k| r.0[k][k].norm() < DEGENERATE_PIVOT) {
            rng.degenerate_draws += 1;
            continue;
        }
        let phases: [C64; 4] = std::array::from_fn(|k| r.0[k][k] / r.0[k][k].norm());
        let mut u = q;
        for row in u.0.iter_mut() {
            for (j, x) in row.iter_mut().enumerate() {
                *x *= phases[j];
            }
        }
        return Unitary4::from_mat_unchecked(u);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_unitary() {
        let mut rng = RngState::new(7);
        for _ in 0..10_000 {
            let u = haar_sample(&mut rng);
            assert!(u.matrix().unitarity_residual() < 1e-11);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = RngState::new(42);
        let mut b = RngState::new(42);
        for _ in 0..100 {
            let ua = haar_sample(&mut a);
            let ub = haar_sample(&mut b);
            assert_eq!(ua, ub);
        }
        let mut other = RngState::with_stream(42, 1);
        assert_ne!(haar_sample(&mut other), haar_sample(&mut RngState::new(42)));
    }

    #[test]
    fn normal_moments() {
        let mut rng = RngState::new(3);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }
}
