//! Closed-form round-k states and Bell values, evaluated directly from the
//! sharpness schedule without touching the density-matrix simulation. The
//! game engine cross-checks its simulated states against these formulas.
//!
//! With R(k) = Π_{i≤k} √(1−λ_i²) and S(k) = Π_{i≤k} (1+√(1−λ_i²))/2
//! (R(0) = S(0) = 1), the pre-measurement round-k state is
//!
//!   [(1+R)/4 + S/2] |GHZ_α+⟩⟨·| + [(1+R)/4 − S/2] |GHZ_α−⟩⟨·|
//!   + [(1−R)/4] (2(1−α)|010⟩⟨010| + 2α|101⟩⟨101|),   R,S at k−1,
//!
//! and the post-measurement AB state is Bell-diagonal with correlation
//! matrix diag(±2√(α(1−α))Sλ_k, ∓2√(α(1−α))Sλ_k, R).

use alloc::vec::Vec;

use crate::bell::CorrelationMatrix;
use crate::linalg::ComplexMatrix;
use crate::measure::Outcome;
use crate::states::{bell_alpha, ghz_alpha, BellFamily, DensityMatrix, RegisterLayout, Sign};
use crate::Error;

/// A game configuration: the initial-state parameter α and the ordered
/// sharpness sequence λ_1..λ_k.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    alpha: f64,
    lambdas: Vec<f64>,
}

impl Schedule {
    pub fn new(alpha: f64, lambdas: Vec<f64>) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::OutOfRange("alpha must lie in [0, 1]"));
        }
        if lambdas.is_empty() {
            return Err(Error::OutOfRange("schedule needs at least one round"));
        }
        for &l in &lambdas {
            if !(0.0..=1.0).contains(&l) || !l.is_finite() {
                return Err(Error::OutOfRange("sharpness must lie in [0, 1]"));
            }
        }
        Ok(Self { alpha, lambdas })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn rounds(&self) -> usize {
        self.lambdas.len()
    }
}

/// Running products R(0..k), S(0..k) for a schedule prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormContext {
    r: Vec<f64>,
    s: Vec<f64>,
}

impl ClosedFormContext {
    pub fn new(lambdas: &[f64]) -> Self {
        let mut r = Vec::with_capacity(lambdas.len() + 1);
        let mut s = Vec::with_capacity(lambdas.len() + 1);
        r.push(1.0);
        s.push(1.0);
        for &l in lambdas {
            let root = libm::sqrt((1.0 - l * l).max(0.0));
            r.push(r.last().unwrap() * root);
            s.push(s.last().unwrap() * (1.0 + root) / 2.0);
        }
        Self { r, s }
    }

    /// R(k); panics if k exceeds the schedule length.
    pub fn r(&self, k: usize) -> f64 {
        self.r[k]
    }

    /// S(k).
    pub fn s(&self, k: usize) -> f64 {
        self.s[k]
    }
}

/// Geometric schedule λ_m = q^{−(k−m)}, ending projectively at λ_k = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricScheduleSpec {
    pub k: usize,
    pub q: f64,
}

impl GeometricScheduleSpec {
    pub fn new(k: usize, q: f64) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::BadRound);
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::OutOfRange("geometric parameter q must exceed 1"));
        }
        Ok(Self { k, q })
    }

    pub fn lambdas(&self) -> Vec<f64> {
        (1..=self.k)
            .map(|m| libm::pow(self.q, -((self.k - m) as f64)))
            .collect()
    }
}

fn check_round_pre(sched: &Schedule, k: usize) -> Result<(), Error> {
    // Pre-measurement state at round k only consumes λ_1..λ_{k−1}.
    if k == 0 || k > sched.rounds() + 1 {
        return Err(Error::BadRound);
    }
    Ok(())
}

fn check_round(sched: &Schedule, k: usize) -> Result<(), Error> {
    if k == 0 || k > sched.rounds() {
        return Err(Error::BadRound);
    }
    Ok(())
}

/// Pre-measurement tripartite state at round k.
pub fn rho_cab_k(sched: &Schedule, k: usize) -> Result<DensityMatrix, Error> {
    check_round_pre(sched, k)?;
    let ctx = ClosedFormContext::new(&sched.lambdas()[..k - 1]);
    let (r, s) = (ctx.r(k - 1), ctx.s(k - 1));
    let alpha = sched.alpha();

    let ghz_p = ghz_alpha(alpha, Sign::Plus)?.to_density();
    let ghz_m = ghz_alpha(alpha, Sign::Minus)?.to_density();
    let w_plus = (1.0 + r) / 4.0 + s / 2.0;
    let w_minus = (1.0 + r) / 4.0 - s / 2.0;
    let w_pin = (1.0 - r) / 4.0;

    let mut m = ghz_p.matrix().scale_re(w_plus);
    m = m.add(&ghz_m.matrix().scale_re(w_minus))?;
    m = m.add(&ComplexMatrix::basis_outer(8, 2, 2).scale_re(w_pin * 2.0 * (1.0 - alpha)))?;
    m = m.add(&ComplexMatrix::basis_outer(8, 5, 5).scale_re(w_pin * 2.0 * alpha))?;
    DensityMatrix::new(RegisterLayout::cab(), m)
}

/// Post-measurement AB state at round k for the given outcome.
pub fn rho_ab_k_post(sched: &Schedule, k: usize, outcome: Outcome) -> Result<DensityMatrix, Error> {
    check_round(sched, k)?;
    let ctx = ClosedFormContext::new(&sched.lambdas()[..k - 1]);
    let (r, s) = (ctx.r(k - 1), ctx.s(k - 1));
    let alpha = sched.alpha();
    let lk = sched.lambdas()[k - 1];
    let (up, down) = match outcome {
        Outcome::Plus => ((1.0 + lk) / 2.0, (1.0 - lk) / 2.0),
        Outcome::Minus => ((1.0 - lk) / 2.0, (1.0 + lk) / 2.0),
    };
    let w1 = (1.0 + r) / 4.0 + s / 2.0;
    let w2 = (1.0 + r) / 4.0 - s / 2.0;
    let w3 = (1.0 - r) / 4.0;

    let phi_p = bell_alpha(BellFamily::Phi, Sign::Plus, alpha)?.to_density();
    let phi_m = bell_alpha(BellFamily::Phi, Sign::Minus, alpha)?.to_density();
    let psi_p = bell_alpha(BellFamily::Psi, Sign::Plus, alpha)?.to_density();
    let psi_m = bell_alpha(BellFamily::Psi, Sign::Minus, alpha)?.to_density();

    let mut m = phi_p.matrix().scale_re(w1 * up + w2 * down);
    m = m.add(&phi_m.matrix().scale_re(w1 * down + w2 * up))?;
    m = m.add(&psi_p.matrix().scale_re(w3))?;
    m = m.add(&psi_m.matrix().scale_re(w3))?;
    DensityMatrix::new(RegisterLayout::ab(), m)
}

/// Correlation matrix of the round-k post-measurement AB state:
/// diag(±2√(α(1−α))Sλ_k, ∓2√(α(1−α))Sλ_k, R).
pub fn t_matrix_k(sched: &Schedule, k: usize, outcome: Outcome) -> Result<CorrelationMatrix, Error> {
    check_round(sched, k)?;
    let ctx = ClosedFormContext::new(&sched.lambdas()[..k - 1]);
    let (r, s) = (ctx.r(k - 1), ctx.s(k - 1));
    let alpha = sched.alpha();
    let lk = sched.lambdas()[k - 1];
    let c = 2.0 * libm::sqrt(alpha * (1.0 - alpha)) * s * lk;
    let sign = match outcome {
        Outcome::Plus => 1.0,
        Outcome::Minus => -1.0,
    };
    let mut t = [[0.0; 3]; 3];
    t[0][0] = sign * c;
    t[1][1] = -sign * c;
    t[2][2] = r;
    Ok(CorrelationMatrix { t })
}

/// Maximal Bell value after round k, identical for both outcomes. With
/// a = 4α(1−α)S(k−1)²λ_k² the piecewise two-branch maximum collapses to
/// the single expression 2√(a + max(a, R(k−1)²)).
pub fn bell_k(sched: &Schedule, k: usize) -> Result<f64, Error> {
    check_round(sched, k)?;
    let ctx = ClosedFormContext::new(&sched.lambdas()[..k - 1]);
    let (r, s) = (ctx.r(k - 1), ctx.s(k - 1));
    let alpha = sched.alpha();
    let lk = sched.lambdas()[k - 1];
    let a = 4.0 * alpha * (1.0 - alpha) * s * s * lk * lk;
    Ok(2.0 * libm::sqrt(a + a.max(r * r)))
}

/// Bell value at round m of the geometric schedule truncated at m.
pub fn geometric_bell(spec: &GeometricScheduleSpec, alpha: f64, m: usize) -> Result<f64, Error> {
    if m == 0 || m > spec.k {
        return Err(Error::BadRound);
    }
    let sched = Schedule::new(alpha, spec.lambdas())?;
    bell_k(&sched, m)
}

/// Smallest q for which every interior round of the geometric schedule is
/// guaranteed to clear the classical bound: q ≥ √(2/(α(1−α))).
pub fn geometric_guarantee_q(alpha: f64) -> Result<f64, Error> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::OutOfRange("alpha must lie strictly inside (0, 1)"));
    }
    Ok(libm::sqrt(2.0 / (alpha * (1.0 - alpha))))
}

/// Pre-measurement tripartite state at round k for the W-state start:
/// ⅓(|000⟩⟨000| + |101⟩⟨101|) + (1+R)/6 |010⟩⟨010| + (1−R)/6 |111⟩⟨111|.
pub fn wstate_rho_cab_k(lambdas: &[f64], k: usize) -> Result<DensityMatrix, Error> {
    if k == 0 || k > lambdas.len() + 1 {
        return Err(Error::BadRound);
    }
    let ctx = ClosedFormContext::new(&lambdas[..k - 1]);
    let r = ctx.r(k - 1);
    let mut m = ComplexMatrix::basis_outer(8, 0, 0).scale_re(1.0 / 3.0);
    m = m.add(&ComplexMatrix::basis_outer(8, 5, 5).scale_re(1.0 / 3.0))?;
    m = m.add(&ComplexMatrix::basis_outer(8, 2, 2).scale_re((1.0 + r) / 6.0))?;
    m = m.add(&ComplexMatrix::basis_outer(8, 7, 7).scale_re((1.0 - r) / 6.0))?;
    DensityMatrix::new(RegisterLayout::cab(), m)
}

/// AB marginal of the W-state protocol at round k (outcome-independent):
/// ⅓(|00⟩⟨00| + |01⟩⟨01|) + (1+R)/6 |10⟩⟨10| + (1−R)/6 |11⟩⟨11|.
pub fn wstate_rho_ab_k(lambdas: &[f64], k: usize) -> Result<DensityMatrix, Error> {
    if k == 0 || k > lambdas.len() + 1 {
        return Err(Error::BadRound);
    }
    let ctx = ClosedFormContext::new(&lambdas[..k - 1]);
    let r = ctx.r(k - 1);
    let d = [1.0 / 3.0, 1.0 / 3.0, (1.0 + r) / 6.0, (1.0 - r) / 6.0];
    DensityMatrix::new(RegisterLayout::ab(), ComplexMatrix::from_diag(&d))
}

/// Bell value of the W-state AB marginal: 2R(k−1)/3, never above 2/3.
pub fn wstate_bell_k(lambdas: &[f64], k: usize) -> Result<f64, Error> {
    if k == 0 || k > lambdas.len() + 1 {
        return Err(Error::BadRound);
    }
    let ctx = ClosedFormContext::new(&lambdas[..k - 1]);
    Ok(2.0 * ctx.r(k - 1) / 3.0)
}
