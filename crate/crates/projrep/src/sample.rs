//! Seeded pseudo-random operators. Each stream is keyed by a name so that
//! checks draw independent, order-insensitive samples from one seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lab::{side, Lab, Op};

pub struct Sampler {
    rng: ChaCha8Rng,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

impl Sampler {
    pub fn new(seed: u64, stream: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a(stream));
        Sampler { rng }
    }

    pub fn gaussian(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    /// Complex Gaussian entries scaled so the operator norm is O(1).
    pub fn matrix(&mut self, level: u32) -> Op {
        let n = side(level);
        let scale = 1.0 / (n as f64).sqrt();
        DMatrix::from_fn(n, n, |_, _| self.gaussian() * scale)
    }

    pub fn hermitian(&mut self, level: u32) -> Op {
        let g = self.matrix(level);
        (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
    }

    /// Haar-distributed unitary via QR with the phases of `R`'s diagonal removed.
    pub fn unitary(&mut self, level: u32) -> Op {
        let qr = self.matrix(level).qr();
        let (q, r) = (qr.q(), qr.r());
        let n = q.ncols();
        let phases = DMatrix::from_fn(n, n, |i, j| {
            if i != j {
                Complex64::new(0.0, 0.0)
            } else {
                let d = r[(i, i)];
                if d.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { d / d.norm() }
            }
        });
        q * phases
    }

    /// Orthogonal projection of the given rank onto a random subspace.
    pub fn projection_of_rank(&mut self, level: u32, rank: usize) -> Op {
        let w = self.unitary(level);
        let cols = w.columns(0, rank);
        cols * cols.adjoint()
    }

    /// Orthogonal projection of uniformly random rank.
    pub fn projection(&mut self, level: u32) -> Op {
        let rank = self.index(side(level) + 1);
        self.projection_of_rank(level, rank)
    }

    /// `(X, P, Q)` with `X*X = P` and `XX* = Q`.
    pub fn partial_isometry(&mut self, level: u32) -> (Op, Op, Op) {
        let p = self.projection(level);
        let w = self.unitary(level);
        let x = &w * &p;
        let q = &x * x.adjoint();
        (x, p, q)
    }

    /// `Σ_t x_t V_t` over `t ∈ Sⁿ`: an element of the algebra generated by the twisted translations.
    pub fn span(&mut self, lab: &Lab, level: u32) -> Op {
        let scale = 1.0 / (side(level) as f64).sqrt();
        Lab::elements(level).iter().fold(DMatrix::zeros(side(level), side(level)), |acc, t| {
            acc + lab.v(t) * (self.gaussian() * scale)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{projection_residual, residual, unitary_residual};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = Sampler::new(3, "x").matrix(1);
        assert_eq!(a, Sampler::new(3, "x").matrix(1));
        assert_ne!(a, Sampler::new(3, "y").matrix(1));
        assert_ne!(a, Sampler::new(4, "x").matrix(1));
    }

    #[test]
    fn samples_have_their_structure() {
        let mut s = Sampler::new(1, "structure");
        for level in 0..=2 {
            assert!(unitary_residual(&s.unitary(level)) < 1e-12);
            assert!(projection_residual(&s.projection(level)) < 1e-12);
            let h = s.hermitian(level);
            assert!(residual(&h, &h.adjoint()) == 0.0);
            let (x, p, q) = s.partial_isometry(level);
            assert!(residual(&(x.adjoint() * &x), &p) < 1e-12);
            assert!(residual(&(&x * x.adjoint()), &q) < 1e-12);
        }
    }
}
