//! Kraus-operator channels: pin maps, composition, probabilistic mixtures,
//! Choi matrices and entanglement-breaking certification via PPT.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{
    hermitian_eigenvalues, kron, C64, ComplexMatrix,
};
use crate::states::{partial_transpose_first, DensityMatrix, Subsystem};
use crate::{Error, PSD_CLAMP};

/// Completeness tolerance for sum K†K = I.
const CPTP_TOL: f64 = 1e-10;

/// A CPTP map given by a finite Kraus list. Identically-zero operators are
/// kept in the list (mirroring how composed channels are indexed) but
/// skipped when the channel is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates the CPTP completeness relation before accepting the list.
    pub fn new(in_dim: usize, out_dim: usize, kraus_ops: Vec<ComplexMatrix>) -> Result<Self, Error> {
        if kraus_ops.is_empty() || in_dim != out_dim {
            // Square channels only: every channel in the game maps a
            // register onto itself.
            return Err(Error::DimensionMismatch {
                expected: in_dim,
                found: out_dim,
            });
        }
        for k in &kraus_ops {
            if k.dim() != in_dim {
                return Err(Error::DimensionMismatch {
                    expected: in_dim,
                    found: k.dim(),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(in_dim);
        for k in &kraus_ops {
            sum = sum.add(&k.dagger().matmul(k)?)?;
        }
        let defect = sum.sub(&ComplexMatrix::identity(in_dim))?.max_abs();
        if defect > CPTP_TOL {
            return Err(Error::OutOfRange("Kraus operators violate completeness"));
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus_ops,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// The identity channel on a `dim`-dimensional system.
    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus_ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Raw action sum_i K_i m K_i† on an arbitrary matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix, Error> {
        if m.dim() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: m.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.out_dim);
        for k in &self.kraus_ops {
            if k.max_abs() == 0.0 {
                continue;
            }
            out = out.add(&k.matmul(m)?.matmul(&k.dagger())?)?;
        }
        Ok(out)
    }

    /// Applies the channel to a state, either on the full register (when
    /// dimensions match) or on a single labeled qubit extended by identity
    /// elsewhere.
    pub fn apply(&self, rho: &DensityMatrix, on: Subsystem) -> Result<DensityMatrix, Error> {
        if self.in_dim == rho.dim() {
            let out = self.apply_matrix(rho.matrix())?;
            return DensityMatrix::new(rho.layout().clone(), out);
        }
        if self.in_dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: self.in_dim,
            });
        }
        let pos = rho.layout().position(on).ok_or(Error::BadSubsystem)?;
        let n = rho.layout().qubits();
        let lifted_ops: Vec<ComplexMatrix> = self
            .kraus_ops
            .iter()
            .map(|k| {
                let mut full = ComplexMatrix::identity(1);
                for p in 0..n {
                    let factor = if p == pos {
                        k.clone()
                    } else {
                        ComplexMatrix::identity(2)
                    };
                    full = kron(&full, &factor);
                }
                full
            })
            .collect();
        let lifted = KrausChannel::new(rho.dim(), rho.dim(), lifted_ops)?;
        let out = lifted.apply_matrix(rho.matrix())?;
        DensityMatrix::new(rho.layout().clone(), out)
    }
}

/// Constant channel sending every qubit state to |t⟩⟨t|.
pub fn pin_map(target: u8) -> KrausChannel {
    let t = usize::from(target & 1);
    let ops = vec![
        ComplexMatrix::basis_outer(2, t, 0),
        ComplexMatrix::basis_outer(2, t, 1),
    ];
    KrausChannel::new(2, 2, ops).expect("pin map is CPTP")
}

/// Channel composition outer ∘ inner with the flat pairwise Kraus list.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel, Error> {
    if inner.out_dim() != outer.in_dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.in_dim(),
            found: inner.out_dim(),
        });
    }
    let mut ops = Vec::with_capacity(outer.kraus_ops().len() * inner.kraus_ops().len());
    for o in outer.kraus_ops() {
        for i in inner.kraus_ops() {
            ops.push(o.matmul(i)?);
        }
    }
    KrausChannel::new(inner.in_dim(), outer.out_dim(), ops)
}

/// Probabilistic mixture of channels with Kraus set {sqrt(w_j) K_i^(j)}.
pub fn mixture(weights: &[f64], channels: &[KrausChannel]) -> Result<KrausChannel, Error> {
    if weights.len() != channels.len() || weights.is_empty() {
        return Err(Error::BadWeights);
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::BadWeights);
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights);
    }
    let (din, dout) = (channels[0].in_dim(), channels[0].out_dim());
    let mut ops = Vec::new();
    for (w, ch) in weights.iter().zip(channels) {
        if ch.in_dim() != din || ch.out_dim() != dout {
            return Err(Error::DimensionMismatch {
                expected: din,
                found: ch.in_dim(),
            });
        }
        let root = libm::sqrt(*w);
        for k in ch.kraus_ops() {
            ops.push(k.scale_re(root));
        }
    }
    KrausChannel::new(din, dout, ops)
}

/// Unnormalized Choi matrix, trace = in_dim.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    in_dim: usize,
    out_dim: usize,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }
}

/// Partial-transpose verdict on a Choi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PptFlag {
    /// Negative partial transpose: the channel is not entanglement-breaking.
    Npt,
    /// Positive partial transpose: for qubit-to-qubit channels this
    /// certifies that the channel is entanglement-breaking.
    Ppt,
}

/// Choi matrix sum_{ij} |i⟩⟨j| ⊗ ch(|i⟩⟨j|).
pub fn choi(ch: &KrausChannel) -> Result<ChoiMatrix, Error> {
    let din = ch.in_dim();
    let dout = ch.out_dim();
    let mut matrix = ComplexMatrix::zeros(din * dout);
    for i in 0..din {
        for j in 0..din {
            let basis = ComplexMatrix::basis_outer(din, i, j);
            let image = ch.apply_matrix(&basis)?;
            let block = kron(&ComplexMatrix::basis_outer(din, i, j), &image);
            matrix = matrix.add(&block)?;
        }
    }
    Ok(ChoiMatrix {
        matrix,
        in_dim: din,
        out_dim: dout,
    })
}

/// PPT flag of a Choi matrix (partial transpose over the input factor).
pub fn choi_ppt_flag(c: &ChoiMatrix) -> Result<PptFlag, Error> {
    let pt = partial_transpose_first(c.matrix(), c.in_dim(), c.out_dim())?;
    let min = hermitian_eigenvalues(&pt)?.min();
    Ok(if min >= PSD_CLAMP {
        PptFlag::Ppt
    } else {
        PptFlag::Npt
    })
}

/// Convenience: plus-state projector |+⟩⟨+|.
pub fn plus_projector() -> ComplexMatrix {
    let h = C64::new(0.5, 0.0);
    ComplexMatrix::new(2, vec![h, h, h, h]).expect("static entries")
}
