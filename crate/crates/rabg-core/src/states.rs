//! States on a fixed control/Alice/Bob qubit register: generalized GHZ and W
//! states, generalized Bell states, partial trace and partial transpose.
//!
//! Basis convention: subsystems are ordered most-significant first, so on
//! the (C, A, B) layout the computational index of |cab⟩ is 4c + 2a + b,
//! and on (A, B) the index of |ab⟩ is 2a + b.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{hermitian_eigenvalues, C64, ComplexMatrix, HermitianSpectrum};
use crate::{Error, HERMITICITY_TOL, PSD_CLAMP};

/// Subsystem label; each subsystem is one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    C,
    A,
    B,
}

/// Ordered, distinct subsystem labels; position 0 is the most significant
/// qubit of the computational index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    labels: Vec<Subsystem>,
}

impl RegisterLayout {
    pub fn new(labels: Vec<Subsystem>) -> Result<Self, Error> {
        if labels.is_empty() || labels.len() > 3 {
            return Err(Error::BadSubsystem);
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::BadSubsystem);
            }
        }
        Ok(Self { labels })
    }

    /// The full (C, A, B) register.
    pub fn cab() -> Self {
        Self {
            labels: vec![Subsystem::C, Subsystem::A, Subsystem::B],
        }
    }

    /// The two-qubit (A, B) register.
    pub fn ab() -> Self {
        Self {
            labels: vec![Subsystem::A, Subsystem::B],
        }
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn position(&self, label: Subsystem) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }
}

/// Sign of a superposition branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Generalized Bell-state family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellFamily {
    /// sqrt(α)|00⟩ ± sqrt(1-α)|11⟩
    Phi,
    /// sqrt(α)|01⟩ ± sqrt(1-α)|10⟩
    Psi,
}

/// Normalized pure state on a register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amplitudes: Vec<C64>) -> Result<Self, Error> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: amplitudes.len(),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (libm::sqrt(norm_sq) - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange("pure state must have unit norm"));
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = ComplexMatrix::outer(&self.amplitudes, &self.amplitudes);
        DensityMatrix::new(self.layout.clone(), m).expect("projector of a unit vector")
    }
}

/// Positive, unit-trace state tagged with its register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: RegisterLayout,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (within the
    /// clamping tolerance) before accepting the matrix.
    pub fn new(layout: RegisterLayout, matrix: ComplexMatrix) -> Result<Self, Error> {
        if matrix.dim() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: matrix.dim(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        if (matrix.trace().re - 1.0).abs() > 1e-10 {
            return Err(Error::OutOfRange("density matrix trace must be 1"));
        }
        let spectrum = hermitian_eigenvalues(&matrix)?;
        if spectrum.min() < PSD_CLAMP {
            return Err(Error::OutOfRange("density matrix must be positive"));
        }
        Ok(Self { layout, matrix })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> HermitianSpectrum {
        hermitian_eigenvalues(&self.matrix).expect("validated Hermitian")
    }

    /// Reduced state on `keep` (a nonempty strict subset of the layout),
    /// preserving the original label order.
    pub fn partial_trace(&self, keep: &[Subsystem]) -> Result<DensityMatrix, Error> {
        let n = self.layout.qubits();
        let kept: Vec<usize> = self
            .layout
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| keep.contains(l))
            .map(|(pos, _)| pos)
            .collect();
        if kept.is_empty() || kept.len() == n || kept.len() != keep.len() {
            return Err(Error::BadSubsystem);
        }
        let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();

        let out_labels: Vec<Subsystem> = kept.iter().map(|&p| self.layout.labels()[p]).collect();
        let out_layout = RegisterLayout::new(out_labels)?;
        let out_dim = out_layout.dim();
        let mut out = ComplexMatrix::zeros(out_dim);

        // Bit at register position p has significance n-1-p.
        let bit = |idx: usize, p: usize| (idx >> (n - 1 - p)) & 1;
        let dim = self.dim();
        for row in 0..dim {
            for col in 0..dim {
                if traced.iter().any(|&p| bit(row, p) != bit(col, p)) {
                    continue;
                }
                let mut i_out = 0usize;
                let mut j_out = 0usize;
                for (slot, &p) in kept.iter().enumerate() {
                    let shift = kept.len() - 1 - slot;
                    i_out |= bit(row, p) << shift;
                    j_out |= bit(col, p) << shift;
                }
                let v = out.get(i_out, j_out) + self.matrix.get(row, col);
                out.set(i_out, j_out, v);
            }
        }
        DensityMatrix::new(out_layout, out)
    }

    /// Partial transpose on one qubit of a two-qubit state; the result is
    /// Hermitian but in general not positive.
    pub fn partial_transpose(&self, on: Subsystem) -> Result<ComplexMatrix, Error> {
        if self.layout.qubits() != 2 {
            return Err(Error::LayoutMismatch);
        }
        let pos = self.layout.position(on).ok_or(Error::BadSubsystem)?;
        if pos == 0 {
            partial_transpose_first(&self.matrix, 2, 2)
        } else {
            Ok(transpose_second(&self.matrix, 2, 2))
        }
    }

    /// Minimum eigenvalue of the partial transpose on A.
    pub fn min_pt_eigenvalue(&self) -> Result<f64, Error> {
        let pt = self.partial_transpose(Subsystem::A)?;
        Ok(hermitian_eigenvalues(&pt)?.min())
    }

    /// Full eigenvalue spectrum of the partial transpose on A, descending.
    pub fn pt_spectrum(&self) -> Result<Vec<f64>, Error> {
        let pt = self.partial_transpose(Subsystem::A)?;
        Ok(hermitian_eigenvalues(&pt)?.eigenvalues().to_vec())
    }

    /// PPT separability verdict for a two-qubit state, where the criterion
    /// is necessary and sufficient.
    pub fn is_separable_ppt(&self) -> Result<bool, Error> {
        Ok(self.min_pt_eigenvalue()? >= PSD_CLAMP)
    }
}

/// Transpose the first tensor factor of a (da*db)-dimensional matrix.
pub fn partial_transpose_first(
    m: &ComplexMatrix,
    da: usize,
    db: usize,
) -> Result<ComplexMatrix, Error> {
    if m.dim() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: m.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(m.dim());
    for i1 in 0..da {
        for j1 in 0..da {
            for i2 in 0..db {
                for j2 in 0..db {
                    out.set(j1 * db + i2, i1 * db + j2, m.get(i1 * db + i2, j1 * db + j2));
                }
            }
        }
    }
    Ok(out)
}

fn transpose_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.dim());
    for i1 in 0..da {
        for j1 in 0..da {
            for i2 in 0..db {
                for j2 in 0..db {
                    out.set(i1 * db + j2, j1 * db + i2, m.get(i1 * db + i2, j1 * db + j2));
                }
            }
        }
    }
    out
}

fn check_alpha(alpha: f64) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::OutOfRange("alpha must lie in [0, 1]"));
    }
    Ok(())
}

/// sqrt(α)|000⟩ ± sqrt(1-α)|111⟩ on the (C, A, B) layout.
pub fn ghz_alpha(alpha: f64, sign: Sign) -> Result<PureState, Error> {
    check_alpha(alpha)?;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0] = C64::new(libm::sqrt(alpha), 0.0);
    amps[7] = C64::new(sign.factor() * libm::sqrt(1.0 - alpha), 0.0);
    PureState::new(RegisterLayout::cab(), amps)
}

/// (|001⟩ + |010⟩ + |100⟩)/sqrt(3) on the (C, A, B) layout.
pub fn w_state() -> PureState {
    let a = C64::new(1.0 / libm::sqrt(3.0), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[1] = a;
    amps[2] = a;
    amps[4] = a;
    PureState::new(RegisterLayout::cab(), amps).expect("unit norm by construction")
}

/// Generalized two-qubit Bell state on the (A, B) layout.
pub fn bell_alpha(family: BellFamily, sign: Sign, alpha: f64) -> Result<PureState, Error> {
    check_alpha(alpha)?;
    let hi = C64::new(libm::sqrt(alpha), 0.0);
    let lo = C64::new(sign.factor() * libm::sqrt(1.0 - alpha), 0.0);
    let z = C64::new(0.0, 0.0);
    let amps = match family {
        BellFamily::Phi => vec![hi, z, z, lo],
        BellFamily::Psi => vec![z, hi, lo, z],
    };
    PureState::new(RegisterLayout::ab(), amps)
}
