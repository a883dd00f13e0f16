//! Quantum SWITCH of two qubit channels, as a Kraus channel on the
//! control ⊗ target pair (and its identity extension over A).
//!
//! Convention: control |0⟩ routes the target through F then E, control |1⟩
//! through E then F, i.e. S_ij = |0⟩⟨0|_C ⊗ E_iF_j + |1⟩⟨1|_C ⊗ F_jE_i.
//! (The opposite labeling is just a relabeling of the control basis and
//! changes nothing downstream.)

use alloc::vec::Vec;

use crate::channel::KrausChannel;
use crate::linalg::{kron, ComplexMatrix};
use crate::states::{DensityMatrix, PureState, RegisterLayout};
use crate::Error;

/// The SWITCH of two qubit channels: `base` acts on C⊗B (dim 4), `extended`
/// on C⊗A⊗B (dim 8) with identity on A.
#[derive(Debug, Clone)]
pub struct SwitchChannel {
    base: KrausChannel,
    extended: KrausChannel,
}

impl SwitchChannel {
    /// Assembles a SWITCH from explicit base (dim 4) and extended (dim 8)
    /// channels; used by fault-injection tests.
    pub fn from_parts(base: KrausChannel, extended: KrausChannel) -> Self {
        Self { base, extended }
    }

    pub fn base(&self) -> &KrausChannel {
        &self.base
    }

    pub fn extended(&self) -> &KrausChannel {
        &self.extended
    }
}

/// Builds the SWITCH of two qubit channels. The Kraus list enumerates all
/// |E|·|F| pairs (i, j), including identically-zero combinations.
pub fn build_switch(e: &KrausChannel, f: &KrausChannel) -> Result<SwitchChannel, Error> {
    if e.in_dim() != 2 || f.in_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: if e.in_dim() != 2 { e.in_dim() } else { f.in_dim() },
        });
    }
    let p0 = ComplexMatrix::basis_outer(2, 0, 0);
    let p1 = ComplexMatrix::basis_outer(2, 1, 1);
    let id_a = ComplexMatrix::identity(2);
    let mut base_ops = Vec::new();
    let mut ext_ops = Vec::new();
    for ei in e.kraus_ops() {
        for fj in f.kraus_ops() {
            let ef = ei.matmul(fj)?;
            let fe = fj.matmul(ei)?;
            let s = kron(&p0, &ef).add(&kron(&p1, &fe))?;
            base_ops.push(s.clone());
            let lifted = kron(&p0, &kron(&id_a, &ef)).add(&kron(&p1, &kron(&id_a, &fe)))?;
            ext_ops.push(lifted);
        }
    }
    Ok(SwitchChannel {
        base: KrausChannel::new(4, 4, base_ops)?,
        extended: KrausChannel::new(8, 8, ext_ops)?,
    })
}

/// SWITCH of the two pin maps E = pin(0), F = pin(1) used by the game.
pub fn pin_switch() -> SwitchChannel {
    build_switch(&crate::channel::pin_map(0), &crate::channel::pin_map(1))
        .expect("pin maps are qubit channels")
}

/// Applies the extended SWITCH to a (C,A,B) state.
pub fn apply_switch(sw: &SwitchChannel, rho: &DensityMatrix) -> Result<DensityMatrix, Error> {
    if *rho.layout() != RegisterLayout::cab() {
        return Err(Error::LayoutMismatch);
    }
    let out = sw.extended().apply_matrix(rho.matrix())?;
    DensityMatrix::new(rho.layout().clone(), out)
}

/// True iff |ψ⟩⟨ψ| is a fixed point of the SWITCH within 1e-12.
pub fn dfs_check(sw: &SwitchChannel, psi: &PureState) -> bool {
    if *psi.layout() != RegisterLayout::cab() {
        return false;
    }
    let rho = psi.to_density();
    match apply_switch(sw, &rho) {
        Ok(out) => {
            crate::linalg::max_abs_distance(out.matrix(), rho.matrix())
                .map(|d| d < 1e-12)
                .unwrap_or(false)
        }
        Err(_) => false,
    }
}
