//! CHSH nonlocality of two-qubit states via the Horodecki criterion:
//! the maximal value is 2√(u₁+u₂) for the two largest eigenvalues of
//! U = TᵀT, with T the Pauli correlation matrix.

use alloc::vec::Vec;

use crate::linalg::{hermitian_eigenvalues, kron, pauli, C64, ComplexMatrix};
use crate::states::{DensityMatrix, RegisterLayout};
use crate::Error;

/// 3×3 real correlation matrix T_ij = Tr[ρ (σ_i ⊗ σ_j)], indices x,y,z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    pub t: [[f64; 3]; 3],
}

/// Output of the Horodecki maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellResult {
    /// M(ρ) = u₁ + u₂.
    pub m_value: f64,
    /// 2√M, the maximal CHSH expectation.
    pub bell_value: f64,
    /// Eigenvalues of U = TᵀT, descending.
    pub u: [f64; 3],
}

fn require_ab(rho: &DensityMatrix) -> Result<(), Error> {
    if *rho.layout() != RegisterLayout::ab() {
        return Err(Error::LayoutMismatch);
    }
    Ok(())
}

/// Pauli correlation matrix of a two-qubit state.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix, Error> {
    require_ab(rho)?;
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let obs = kron(&pauli(i + 1), &pauli(j + 1));
            t[i][j] = obs.matmul(rho.matrix())?.trace().re;
        }
    }
    Ok(CorrelationMatrix { t })
}

/// Maximal CHSH value of a two-qubit state.
pub fn max_chsh(rho: &DensityMatrix) -> Result<BellResult, Error> {
    let corr = correlation_matrix(rho)?;
    max_chsh_of_t(&corr)
}

/// Horodecki value computed from an already-known correlation matrix.
pub fn max_chsh_of_t(corr: &CorrelationMatrix) -> Result<BellResult, Error> {
    let t = &corr.t;
    // U = TᵀT as a complex Hermitian 3×3 for the shared eigensolver.
    let mut u_mat = ComplexMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += t[k][i] * t[k][j];
            }
            u_mat.set(i, j, C64::new(s, 0.0));
        }
    }
    let eigs = hermitian_eigenvalues(&u_mat)?;
    let v: Vec<f64> = eigs.eigenvalues().to_vec();
    let m_value = v[0] + v[1];
    Ok(BellResult {
        m_value,
        bell_value: 2.0 * libm::sqrt(m_value.max(0.0)),
        u: [v[0], v[1], v[2]],
    })
}

fn check_unit(v: &[f64; 3]) -> Result<(), Error> {
    let n = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector);
    }
    Ok(())
}

/// CHSH expectation E(a,b) + E(a′,b) + E(a,b′) − E(a′,b′) for measurement
/// directions given as unit Bloch vectors, with E(x,y) = xᵀ T y.
pub fn chsh_value(
    rho: &DensityMatrix,
    a: &[f64; 3],
    a_prime: &[f64; 3],
    b: &[f64; 3],
    b_prime: &[f64; 3],
) -> Result<f64, Error> {
    for v in [a, a_prime, b, b_prime] {
        check_unit(v)?;
    }
    let corr = correlation_matrix(rho)?;
    let e = |x: &[f64; 3], y: &[f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += x[i] * corr.t[i][j] * y[j];
            }
        }
        s
    };
    Ok(e(a, b) + e(a_prime, b) + e(a, b_prime) - e(a_prime, b_prime))
}
