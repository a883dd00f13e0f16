//! Two-outcome unsharp measurement of the control qubit in the |±⟩ basis,
//! with the selective (square-root) state update, plus the deterministic
//! counter RNG used for sampled runs.

use alloc::vec;

use crate::linalg::{kron, C64, ComplexMatrix};
use crate::states::{DensityMatrix, RegisterLayout};
use crate::Error;

/// Branch probabilities below this mark a branch degenerate (no post-state).
pub const DEGENERATE_PROB: f64 = 1e-14;

fn check_lambda(lambda: f64) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(Error::OutOfRange("sharpness must lie in [0, 1]"));
    }
    Ok(())
}

/// |±⟩⟨±| projectors.
fn pm_projectors() -> (ComplexMatrix, ComplexMatrix) {
    let h = C64::new(0.5, 0.0);
    let plus = ComplexMatrix::new(2, vec![h, h, h, h]).expect("static entries");
    let minus = ComplexMatrix::new(2, vec![h, -h, -h, h]).expect("static entries");
    (plus, minus)
}

/// Unsharp two-outcome POVM in the |±⟩ basis with sharpness λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnsharpPovm {
    sharpness: f64,
}

impl UnsharpPovm {
    pub fn new(sharpness: f64) -> Result<Self, Error> {
        check_lambda(sharpness)?;
        Ok(Self { sharpness })
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// POVM elements E_± = ((1±λ)/2)|+⟩⟨+| + ((1∓λ)/2)|−⟩⟨−|.
    pub fn elements(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (pp, pm) = pm_projectors();
        let l = self.sharpness;
        let e_plus = pp.scale_re((1.0 + l) / 2.0).add(&pm.scale_re((1.0 - l) / 2.0));
        let e_minus = pp.scale_re((1.0 - l) / 2.0).add(&pm.scale_re((1.0 + l) / 2.0));
        (e_plus.expect("same dim"), e_minus.expect("same dim"))
    }

    /// Hermitian square roots M_± of the POVM elements; the selective
    /// update operators.
    pub fn sqrt_elements(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (pp, pm) = pm_projectors();
        let l = self.sharpness;
        let rp = libm::sqrt((1.0 + l) / 2.0);
        let rm = libm::sqrt((1.0 - l) / 2.0);
        let m_plus = pp.scale_re(rp).add(&pm.scale_re(rm));
        let m_minus = pp.scale_re(rm).add(&pm.scale_re(rp));
        (m_plus.expect("same dim"), m_minus.expect("same dim"))
    }
}

/// Free-function spellings of the POVM constructors.
pub fn povm_elements(lambda: f64) -> Result<(ComplexMatrix, ComplexMatrix), Error> {
    Ok(UnsharpPovm::new(lambda)?.elements())
}

pub fn sqrt_elements(lambda: f64) -> Result<(ComplexMatrix, ComplexMatrix), Error> {
    Ok(UnsharpPovm::new(lambda)?.sqrt_elements())
}

/// Measurement outcome label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

/// One branch of a selective measurement. `post_state` is `None` when the
/// branch probability fell below [`DEGENERATE_PROB`] and no normalized
/// post-state exists.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub outcome: Outcome,
    pub probability: f64,
    pub post_state: Option<DensityMatrix>,
}

impl MeasurementBranch {
    pub fn is_degenerate(&self) -> bool {
        self.post_state.is_none()
    }
}

/// Measures the control qubit of a (C,A,B) state with the unsharp POVM and
/// returns both selective branches (+ first).
pub fn measure_control(
    rho: &DensityMatrix,
    lambda: f64,
) -> Result<(MeasurementBranch, MeasurementBranch), Error> {
    if *rho.layout() != RegisterLayout::cab() {
        return Err(Error::LayoutMismatch);
    }
    let povm = UnsharpPovm::new(lambda)?;
    let (m_plus, m_minus) = povm.sqrt_elements();
    let id_ab = ComplexMatrix::identity(4);
    let branch = |outcome, m: &ComplexMatrix| -> Result<MeasurementBranch, Error> {
        let lift = kron(m, &id_ab);
        // M is Hermitian, so MρM† = MρM and p = Tr[ρ E] = Tr[MρM].
        let updated = lift.matmul(rho.matrix())?.matmul(&lift)?;
        let probability = updated.trace().re;
        let post_state = if probability < DEGENERATE_PROB {
            None
        } else {
            Some(DensityMatrix::new(
                rho.layout().clone(),
                updated.scale_re(1.0 / probability),
            )?)
        };
        Ok(MeasurementBranch {
            outcome,
            probability,
            post_state,
        })
    };
    Ok((
        branch(Outcome::Plus, &m_plus)?,
        branch(Outcome::Minus, &m_minus)?,
    ))
}

/// Counter-based deterministic generator: a 64-bit counter pushed through a
/// splitmix64-style mixer. The sequence depends only on the seed, never on
/// platform or call pattern, so transcripts are bit-reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        let mut z = self
            .key
            .wrapping_add(self.counter.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Selects the + branch iff the next uniform draw is below p_+.
pub fn sample_outcome<'a>(
    plus: &'a MeasurementBranch,
    minus: &'a MeasurementBranch,
    rng: &mut CounterRng,
) -> &'a MeasurementBranch {
    if rng.next_f64() < plus.probability {
        plus
    } else {
        minus
    }
}
