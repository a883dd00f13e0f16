//! Dense complex linear algebra for matrices of dimension at most 8.
//!
//! Row-major storage, no sparsity; every operation is a pure function.
//! Hermitian eigenvalues come from a cyclic Jacobi iteration with complex
//! rotations, which is robust and dependency-free at these sizes.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

use crate::{Error, EIG_OFFDIAG_TOL, HERMITICITY_TOL};

pub type C64 = Complex<f64>;

/// Sweep cap for the Jacobi iteration.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; `entries.len()` must be `dim * dim`
    /// and every entry finite.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self, Error> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::OutOfRange("matrix entries must be finite"));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// |i⟩⟨j| in a `dim`-dimensional space.
    pub fn basis_outer(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.set(i, j, C64::new(1.0, 0.0));
        m
    }

    /// Outer product |v⟩⟨w| of two equal-length amplitude vectors.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        debug_assert_eq!(v.len(), w.len());
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * w[j].conj());
            }
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, C64::new(d, 0.0));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.entries[i * self.dim + j] = z;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, Error> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max)
    }

    /// Max entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Tensor (Kronecker) product; the second factor indexes the fast axis.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i1 in 0..da {
        for j1 in 0..da {
            let av = a.get(i1, j1);
            if av.re == 0.0 && av.im == 0.0 {
                continue;
            }
            for i2 in 0..db {
                for j2 in 0..db {
                    out.set(i1 * db + i2, j1 * db + j2, av * b.get(i2, j2));
                }
            }
        }
    }
    out
}

/// Max entrywise modulus of `a - b`.
pub fn max_abs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, Error> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.entries
        .iter()
        .zip(b.entries.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0_f64, f64::max))
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
}

impl HermitianSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is nonempty")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi with complex rotations.
///
/// Fails with [`Error::NotHermitian`] if the input deviates from its
/// conjugate transpose by more than [`HERMITICITY_TOL`], and with
/// [`Error::NoConvergence`] if the sweep cap is hit.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<HermitianSpectrum, Error> {
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim();
    // Symmetrize to kill rounding-level asymmetry before iterating.
    let mut a = m.add(&m.dagger())?.scale_re(0.5);

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if offdiag_norm(&a) < EIG_OFFDIAG_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    if !converged && offdiag_norm(&a) >= EIG_OFFDIAG_TOL {
        return Err(Error::NoConvergence);
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    eigenvalues.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    Ok(HermitianSpectrum { eigenvalues })
}

/// Frobenius norm of the off-diagonal part.
fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// Annihilates the (p, q) entry of a Hermitian matrix with a complex
/// Givens rotation, updating rows and columns p and q in place.
fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let w = a.get(p, q);
    let r = w.norm();
    if r < 1e-300 {
        return;
    }
    let phase = w / C64::new(r, 0.0);
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;

    // tan(2θ) = 2r / (app - aqq); stable tangent computation.
    let tau = (app - aqq) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;

    let n = a.dim();
    // Column update: col_p' = c·col_p + s·conj(phase)·col_q,
    //                col_q' = -s·phase·col_p + c·col_q.
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c + aiq * phase.conj() * s);
        a.set(i, q, aip * phase * (-s) + aiq * c);
    }
    // Row update with the conjugate-transposed rotation.
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c + aqj * phase * s);
        a.set(q, j, apj * phase.conj() * (-s) + aqj * c);
    }
    // Force the annihilated pair to exact zero.
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
}

/// Pauli matrices; index 1 = x, 2 = y, 3 = z.
pub fn pauli(i: usize) -> ComplexMatrix {
    let (o, l) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let entries = match i {
        1 => vec![l, o, o, l],
        2 => vec![l, C64::new(0.0, -1.0), C64::new(0.0, 1.0), l],
        3 => vec![o, l, l, -o],
        _ => panic!("Pauli index must be 1, 2 or 3"),
    };
    ComplexMatrix::new(2, entries).expect("static entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CounterRng;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(kron(&i2, &i2), i4);
    }

    #[test]
    fn kron_sign_pattern_of_zz() {
        let zz = kron(&pauli(3), &pauli(3));
        let expected = ComplexMatrix::from_diag(&[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn kron_basis_projectors() {
        let p0 = ComplexMatrix::basis_outer(2, 0, 0);
        let p1 = ComplexMatrix::basis_outer(2, 1, 1);
        let got = kron(&p0, &p1);
        assert_eq!(got, ComplexMatrix::basis_outer(4, 1, 1));
    }

    #[test]
    fn matmul_pauli_squares_to_identity() {
        for i in 1..=3 {
            let sq = pauli(i).matmul(&pauli(i)).unwrap();
            assert!(max_abs_distance(&sq, &ComplexMatrix::identity(2)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn dagger_is_involution() {
        let m = ComplexMatrix::new(
            2,
            vec![re(1.0), C64::new(2.0, 3.0), C64::new(-1.0, 0.5), re(4.0)],
        )
        .unwrap();
        assert_eq!(m.dagger().dagger(), m);
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(ComplexMatrix::identity(8).trace(), re(8.0));
    }

    #[test]
    fn distance_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(max_abs_distance(&i2, &i2).unwrap(), 0.0);
        assert_eq!(max_abs_distance(&i2, &ComplexMatrix::zeros(2)).unwrap(), 1.0);
        let a = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[0.0, 1.0]);
        assert_eq!(max_abs_distance(&a, &b).unwrap(), 1.0);
        assert!(max_abs_distance(&i2, &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn eigenvalues_of_pauli_x() {
        let spec = hermitian_eigenvalues(&pauli(1)).unwrap();
        assert!((spec.eigenvalues()[0] - 1.0).abs() < 1e-13);
        assert!((spec.eigenvalues()[1] + 1.0).abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        // Complex off-diagonal entries exercise the rotation phase.
        let spec = hermitian_eigenvalues(&pauli(2)).unwrap();
        assert!((spec.eigenvalues()[0] - 1.0).abs() < 1e-13);
        assert!((spec.eigenvalues()[1] + 1.0).abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_of_diagonal_input() {
        let m = ComplexMatrix::from_diag(&[0.25, 0.25, 0.25, 0.25]);
        let spec = hermitian_eigenvalues(&m).unwrap();
        for &v in spec.eigenvalues() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::new(2, vec![re(0.0), re(1.0), re(0.0), re(0.0)]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian(_))
        ));
    }

    use crate::testutil::{random_hermitian, random_unitary};

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = CounterRng::new(0x11aa);
        for trial in 0..1000 {
            let dim = 2 + (trial % 7);
            let m = random_hermitian(dim, &mut rng);
            let spec = hermitian_eigenvalues(&m).unwrap();
            let sum: f64 = spec.eigenvalues().iter().sum();
            assert!(
                (sum - m.trace().re).abs() < 1e-10,
                "dim {dim}: sum {sum} vs trace {}",
                m.trace().re
            );
        }
    }

    #[test]
    fn spectrum_invariant_under_unitary_conjugation() {
        let mut rng = CounterRng::new(0x22bb);
        for _ in 0..25 {
            let m = random_hermitian(8, &mut rng);
            let u = random_unitary(8, &mut rng);
            let conj = u.matmul(&m).unwrap().matmul(&u.dagger()).unwrap();
            let s1 = hermitian_eigenvalues(&m).unwrap();
            let s2 = hermitian_eigenvalues(&conj).unwrap();
            for (a, b) in s1.eigenvalues().iter().zip(s2.eigenvalues()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kron_associative_on_integer_entries() {
        let mut rng = CounterRng::new(0x33cc);
        for _ in 0..50 {
            let mk = |rng: &mut CounterRng, d: usize| {
                let entries = (0..d * d)
                    .map(|_| re((rng.next_f64() * 7.0) as i64 as f64 - 3.0))
                    .collect();
                ComplexMatrix::new(d, entries).unwrap()
            };
            let a = mk(&mut rng, 2);
            let b = mk(&mut rng, 2);
            let c = mk(&mut rng, 2);
            assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
        }
    }
}
