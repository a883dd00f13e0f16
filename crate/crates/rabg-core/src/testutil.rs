//! Shared helpers for in-crate tests: seeded random matrices and states.

use alloc::vec::Vec;

use crate::linalg::{C64, ComplexMatrix};
use crate::measure::CounterRng;
use crate::states::{DensityMatrix, RegisterLayout};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Random Hermitian matrix with entries of modulus O(1).
pub fn random_hermitian(dim: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m.set(i, i, re(2.0 * rng.next_f64() - 1.0));
        for j in (i + 1)..dim {
            let z = C64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

/// Random unitary from a product of complex Givens rotations.
pub fn random_unitary(dim: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(dim);
    for p in 0..dim {
        for q in (p + 1)..dim {
            let theta = core::f64::consts::PI * rng.next_f64();
            let phi = 2.0 * core::f64::consts::PI * rng.next_f64();
            let (c, s) = (libm::cos(theta), libm::sin(theta));
            let e = C64::new(libm::cos(phi), libm::sin(phi));
            let mut g = ComplexMatrix::identity(dim);
            g.set(p, p, re(c));
            g.set(p, q, e.conj() * s);
            g.set(q, p, e * (-s));
            g.set(q, q, re(c));
            u = u.matmul(&g).unwrap();
        }
    }
    u
}

/// Random full-rank density matrix on the given layout.
pub fn random_density(layout: RegisterLayout, rng: &mut CounterRng) -> DensityMatrix {
    let dim = layout.dim();
    // G G† / Tr is positive with unit trace by construction.
    let mut g = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(
                i,
                j,
                C64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0),
            );
        }
    }
    let p = g.matmul(&g.dagger()).unwrap();
    let t = p.trace().re;
    DensityMatrix::new(layout, p.scale_re(1.0 / t)).unwrap()
}

/// Random normalized pure-state amplitude vector.
pub fn random_amplitudes(dim: usize, rng: &mut CounterRng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
        .collect();
    let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    for z in &mut v {
        *z /= norm;
    }
    v
}
