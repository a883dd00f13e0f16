//! The full protocol loop: SWITCH, unsharp control measurement, Bell
//! evaluation, and oracle cross-checking, plus the minimal-sharpness
//! search and the maximum-round-count computation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bell::max_chsh;
use crate::linalg::{kron, max_abs_distance, C64, ComplexMatrix};
use crate::measure::{measure_control, sample_outcome, CounterRng, Outcome};
use crate::oracle::{bell_k, wstate_bell_k, GeometricScheduleSpec, Schedule};
use crate::qswitch::{apply_switch, pin_switch, SwitchChannel};
use crate::states::{
    bell_alpha, ghz_alpha, w_state, BellFamily, DensityMatrix, PureState, RegisterLayout, Sign,
    Subsystem,
};
use crate::Error;

/// Simulated bell values must match the closed form this tightly on GHZ
/// and W runs; larger gaps indicate an implementation bug.
pub const ORACLE_TOL: f64 = 1e-9;

/// Initial tripartite state of a game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// √α|000⟩ + √(1−α)|111⟩, the intended protocol start.
    Ghz { alpha: f64 },
    /// The W state (|001⟩+|010⟩+|100⟩)/√3.
    W,
    /// |+⟩_C ⊗ |Φ+_α⟩: a coherent control that is useless to the players.
    CoherentControl { alpha: f64 },
}

/// Outcome-selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Follow the + branch; assert the − branch gives the same Bell value.
    Deterministic,
    /// Draw outcomes from the measured probabilities with the seeded RNG.
    Sampled { seed: u64 },
}

/// Full configuration of one game run.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub initial_state: InitialState,
    pub lambdas: Vec<f64>,
    pub mode: Mode,
    /// Violation threshold 2 + δ used in reporting; defaults to 2.01.
    pub b_min: f64,
}

impl GameConfig {
    pub fn new(initial_state: InitialState, lambdas: Vec<f64>) -> Result<Self, Error> {
        let cfg = Self {
            initial_state,
            lambdas,
            mode: Mode::Deterministic,
            b_min: 2.01,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_b_min(mut self, b_min: f64) -> Result<Self, Error> {
        self.b_min = b_min;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), Error> {
        if self.lambdas.is_empty() {
            return Err(Error::OutOfRange("schedule needs at least one round"));
        }
        for &l in &self.lambdas {
            if !(0.0..=1.0).contains(&l) || !l.is_finite() {
                return Err(Error::OutOfRange("sharpness must lie in [0, 1]"));
            }
        }
        if let InitialState::Ghz { alpha } | InitialState::CoherentControl { alpha } =
            self.initial_state
        {
            if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
                return Err(Error::OutOfRange("alpha must lie in [0, 1]"));
            }
        }
        let max = 2.0 * libm::sqrt(2.0);
        if !(2.0..=max + 1e-12).contains(&self.b_min) {
            return Err(Error::BadThreshold);
        }
        Ok(())
    }

    /// Game from a geometric schedule (λ_m = q^{−(k−m)}).
    pub fn geometric(alpha: f64, spec: &GeometricScheduleSpec) -> Result<Self, Error> {
        Self::new(InitialState::Ghz { alpha }, spec.lambdas())
    }
}

/// Outcome actually recorded for a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordedOutcome {
    Plus,
    Minus,
    /// Deterministic mode: both branches verified equivalent.
    Both,
}

/// Everything measured in one round.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub k: usize,
    pub lambda: f64,
    pub post_switch_state: DensityMatrix,
    pub outcome: RecordedOutcome,
    pub outcome_probability: f64,
    pub post_measurement_ab: DensityMatrix,
    pub bell_value: f64,
    /// Closed-form prediction; absent for the coherent-control start.
    pub oracle_bell_value: Option<f64>,
    pub discrepancy: Option<f64>,
}

/// One full protocol execution.
#[derive(Debug, Clone)]
pub struct GameTranscript {
    pub config: GameConfig,
    pub rounds: Vec<RoundRecord>,
    pub warnings: Vec<String>,
}

impl GameTranscript {
    /// Rounds whose Bell value clears the configured threshold.
    pub fn violating_rounds(&self) -> usize {
        self.rounds
            .iter()
            .take_while(|r| r.bell_value >= self.config.b_min - 1e-12)
            .count()
    }
}

fn initial_density(init: InitialState) -> Result<DensityMatrix, Error> {
    match init {
        InitialState::Ghz { alpha } => Ok(ghz_alpha(alpha, Sign::Plus)?.to_density()),
        InitialState::W => Ok(w_state().to_density()),
        InitialState::CoherentControl { alpha } => {
            let phi = bell_alpha(BellFamily::Phi, Sign::Plus, alpha)?;
            let sq = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut amps = vec![C64::new(0.0, 0.0); 8];
            for (i, &a) in phi.amplitudes().iter().enumerate() {
                amps[i] = a * sq;
                amps[i + 4] = a * sq;
            }
            Ok(PureState::new(RegisterLayout::cab(), amps)?.to_density())
        }
    }
}

fn oracle_bell(init: InitialState, lambdas: &[f64], k: usize) -> Result<Option<f64>, Error> {
    match init {
        InitialState::Ghz { alpha } => {
            let sched = Schedule::new(alpha, lambdas.to_vec())?;
            Ok(Some(bell_k(&sched, k)?))
        }
        InitialState::W => Ok(Some(wstate_bell_k(lambdas, k)?)),
        InitialState::CoherentControl { .. } => Ok(None),
    }
}

/// Runs the protocol with the standard pin-map SWITCH.
pub fn run_protocol(cfg: &GameConfig) -> Result<GameTranscript, Error> {
    run_protocol_with_switch(cfg, &pin_switch())
}

/// Runs the protocol against an arbitrary SWITCH channel. Exists so tests
/// can inject a corrupted channel and watch the oracle cross-check fire.
pub fn run_protocol_with_switch(
    cfg: &GameConfig,
    sw: &SwitchChannel,
) -> Result<GameTranscript, Error> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if matches!(cfg.initial_state, InitialState::CoherentControl { .. }) && cfg.lambdas.len() > 1 {
        warnings.push(String::from(
            "coherent-control games gain nothing after round 1; running the full schedule anyway",
        ));
    }
    let mut rng = match cfg.mode {
        Mode::Sampled { seed } => Some(CounterRng::new(seed)),
        Mode::Deterministic => None,
    };
    let mut state = initial_density(cfg.initial_state)?;
    let mut rounds = Vec::with_capacity(cfg.lambdas.len());

    for (idx, &lambda) in cfg.lambdas.iter().enumerate() {
        let k = idx + 1;
        let post_switch = apply_switch(sw, &state)?;
        let (plus, minus) = measure_control(&post_switch, lambda)?;

        let ab_of = |branch: &crate::measure::MeasurementBranch| -> Result<Option<DensityMatrix>, Error> {
            match &branch.post_state {
                Some(s) => Ok(Some(s.partial_trace(&[Subsystem::A, Subsystem::B])?)),
                None => Ok(None),
            }
        };
        let ab_plus = ab_of(&plus)?;
        let ab_minus = ab_of(&minus)?;

        let (outcome, probability, followed_ab, next_state) = match (&mut rng, cfg.mode) {
            (None, _) => {
                // Deterministic mode follows +, but both branches must
                // yield the same Bell value when both exist.
                let ab = ab_plus.clone().ok_or(Error::OutOfRange(
                    "degenerate + branch in deterministic mode",
                ))?;
                if let Some(ab_m) = &ab_minus {
                    let b_p = max_chsh(&ab)?.bell_value;
                    let b_m = max_chsh(ab_m)?.bell_value;
                    if (b_p - b_m).abs() > 1e-10
                        && !matches!(cfg.initial_state, InitialState::CoherentControl { .. })
                    {
                        return Err(Error::OracleMismatch {
                            round: k,
                            discrepancy: (b_p - b_m).abs(),
                        });
                    }
                }
                let next = plus.post_state.clone().expect("checked above");
                (RecordedOutcome::Both, plus.probability, ab, next)
            }
            (Some(rng), _) => {
                let chosen = sample_outcome(&plus, &minus, rng);
                let ab = match chosen.outcome {
                    Outcome::Plus => ab_plus.clone(),
                    Outcome::Minus => ab_minus.clone(),
                }
                .ok_or(Error::OutOfRange("sampled a degenerate branch"))?;
                let outcome = match chosen.outcome {
                    Outcome::Plus => RecordedOutcome::Plus,
                    Outcome::Minus => RecordedOutcome::Minus,
                };
                let next = chosen.post_state.clone().expect("non-degenerate branch");
                (outcome, chosen.probability, ab, next)
            }
        };

        let bell_value = max_chsh(&followed_ab)?.bell_value;
        let oracle_bell_value = oracle_bell(cfg.initial_state, &cfg.lambdas, k)?;
        let discrepancy = oracle_bell_value.map(|o| (bell_value - o).abs());
        if let Some(d) = discrepancy {
            if d > ORACLE_TOL {
                return Err(Error::OracleMismatch {
                    round: k,
                    discrepancy: d,
                });
            }
        }

        rounds.push(RoundRecord {
            k,
            lambda,
            post_switch_state: post_switch,
            outcome,
            outcome_probability: probability,
            post_measurement_ab: followed_ab,
            bell_value,
            oracle_bell_value,
            discrepancy,
        });
        state = next_state;
    }

    Ok(GameTranscript {
        config: cfg.clone(),
        rounds,
        warnings,
    })
}

/// Per-α result of the coherent-control check.
#[derive(Debug, Clone)]
pub struct Lemma1Point {
    pub alpha: f64,
    pub branch_probability: f64,
    /// Eigenvalues of the partial transpose of the post-selected AB state,
    /// descending.
    pub pt_spectrum: Vec<f64>,
    pub min_pt_eigenvalue: f64,
    pub bell_value: f64,
    pub separable: bool,
}

/// For each α: prepare |+⟩_C ⊗ |Φ+_α⟩, run it through the SWITCH, project
/// the control onto |±⟩, and certify the surviving AB state is separable
/// (PPT) and below the classical CHSH bound. Both projections give the
/// same AB state up to a sign pattern with identical spectrum; the +
/// branch is reported.
pub fn lemma1_check(alpha_grid: &[f64]) -> Result<Vec<Lemma1Point>, Error> {
    let sw = pin_switch();
    let mut points = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let init = initial_density(InitialState::CoherentControl { alpha })?;
        let post = apply_switch(&sw, &init)?;
        let (plus, _minus) = measure_control(&post, 1.0)?;
        let ab = plus
            .post_state
            .as_ref()
            .expect("branch probabilities are 1/2")
            .partial_trace(&[Subsystem::A, Subsystem::B])?;
        let pt_spectrum = ab.pt_spectrum()?;
        let min_pt = *pt_spectrum.last().expect("two-qubit spectrum");
        points.push(Lemma1Point {
            alpha,
            branch_probability: plus.probability,
            min_pt_eigenvalue: min_pt,
            bell_value: max_chsh(&ab)?.bell_value,
            separable: min_pt >= crate::PSD_CLAMP,
            pt_spectrum,
        });
    }
    Ok(points)
}

fn check_threshold(b_min: f64) -> Result<(), Error> {
    let max = 2.0 * libm::sqrt(2.0);
    if !(b_min > 2.0 && b_min <= max + 1e-12) {
        return Err(Error::BadThreshold);
    }
    Ok(())
}

/// Smallest λ ∈ (0,1] whose appended round still reaches `b_min`, or
/// `None` when even a projective round cannot. Bisection exploits that the
/// round value grows monotonically in the final sharpness.
pub fn minimal_lambda(alpha: f64, prefix: &[f64], b_min: f64) -> Result<Option<f64>, Error> {
    check_threshold(b_min)?;
    let k = prefix.len() + 1;
    let value = |l: f64| -> Result<f64, Error> {
        let mut lambdas = prefix.to_vec();
        lambdas.push(l);
        bell_k(&Schedule::new(alpha, lambdas)?, k)
    };
    if value(1.0)? < b_min {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = (lo + hi) / 2.0;
        if value(mid)? >= b_min {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Result of the maximum-round-count search.
#[derive(Debug, Clone, PartialEq)]
pub struct NmaxResult {
    pub b_min: f64,
    pub alpha: f64,
    pub n_max: usize,
    pub chosen_lambdas: Vec<f64>,
    pub per_round_bell: Vec<f64>,
}

/// Safety cap on the greedy extension; thresholds near 2 diverge in round
/// count, and the CLI surfaces the cap rather than spinning forever.
pub const NMAX_ROUND_CAP: usize = 4096;

/// Greedily extends the schedule with the minimal feasible sharpness until
/// no λ ∈ (0,1] can reach `b_min`. Greedy is optimal here: the round value
/// decreases in every earlier sharpness, so spending as little as possible
/// each round maximizes what later rounds can achieve.
pub fn compute_nmax(b_min: f64, alpha: f64) -> Result<NmaxResult, Error> {
    check_threshold(b_min)?;
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::OutOfRange("alpha must lie strictly inside (0, 1)"));
    }
    let mut chosen = Vec::new();
    let mut bells = Vec::new();
    while chosen.len() < NMAX_ROUND_CAP {
        match minimal_lambda(alpha, &chosen, b_min)? {
            Some(l) => {
                chosen.push(l);
                let k = chosen.len();
                bells.push(bell_k(&Schedule::new(alpha, chosen.clone())?, k)?);
            }
            None => break,
        }
    }
    Ok(NmaxResult {
        b_min,
        alpha,
        n_max: chosen.len(),
        chosen_lambdas: chosen,
        per_round_bell: bells,
    })
}

/// Simulated-vs-closed-form report of the projective-interior-round rule:
/// once any round before the last is projective, every later round stays
/// at or below the classical bound.
#[derive(Debug, Clone)]
pub struct ProjectiveRoundReport {
    pub first_projective_round: usize,
    pub per_round_bell: Vec<f64>,
    pub later_rounds_classical: bool,
}

pub fn projective_round_check(alpha: f64, lambdas: &[f64]) -> Result<ProjectiveRoundReport, Error> {
    let m = lambdas
        .iter()
        .position(|&l| l >= 1.0)
        .ok_or(Error::OutOfRange("schedule has no projective round"))?
        + 1;
    if m == lambdas.len() {
        // A projective *final* round is the intended protocol ending and
        // proves nothing; require an interior one.
        return Err(Error::OutOfRange("projective round must be interior"));
    }
    let cfg = GameConfig::new(InitialState::Ghz { alpha }, lambdas.to_vec())?;
    let transcript = run_protocol(&cfg)?;
    let per_round_bell: Vec<f64> = transcript.rounds.iter().map(|r| r.bell_value).collect();
    let later_rounds_classical = per_round_bell[m..].iter().all(|&b| b <= 2.0 + 1e-12);
    Ok(ProjectiveRoundReport {
        first_projective_round: m,
        per_round_bell,
        later_rounds_classical,
    })
}

/// One named check in a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed discrepancy (meaning depends on the check).
    pub worst: f64,
}

/// Batch validation report; deterministic for fixed inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub k_cap: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Follows an explicit outcome path through the protocol and returns the
/// pre-measurement tripartite state of the final round.
fn simulate_path(
    alpha: f64,
    lambdas: &[f64],
    path: &[Outcome],
) -> Result<DensityMatrix, Error> {
    let sw = pin_switch();
    let mut state = ghz_alpha(alpha, Sign::Plus)?.to_density();
    for (idx, &outcome) in path.iter().enumerate() {
        let pre = apply_switch(&sw, &state)?;
        let (plus, minus) = measure_control(&pre, lambdas[idx])?;
        let chosen = match outcome {
            Outcome::Plus => plus,
            Outcome::Minus => minus,
        };
        state = chosen
            .post_state
            .ok_or(Error::OutOfRange("degenerate branch on path"))?;
    }
    apply_switch(&sw, &state)
}

/// Runs the full cross-validation sweep: simulation vs closed form on
/// random schedules, outcome-path independence, the geometric-schedule
/// guarantee, the W-state ceiling, and the coherent-control check.
pub fn verify_theorems(k_cap: usize, trials: usize, seed: u64) -> Result<VerifyReport, Error> {
    if k_cap > 10 {
        return Err(Error::OutOfRange("k_cap must not exceed 10"));
    }
    let mut rng = CounterRng::new(seed);
    let mut checks = Vec::new();

    // 1. Random schedules: simulated round-k states and Bell values match
    //    the closed forms.
    {
        let mut worst = 0.0_f64;
        let sw = pin_switch();
        for _ in 0..trials {
            let alpha = 0.1 + 0.8 * rng.next_f64();
            let rounds = 1 + (rng.next_u64() as usize) % k_cap.max(1);
            let lambdas: Vec<f64> = (0..rounds).map(|_| rng.next_f64()).collect();
            let sched = Schedule::new(alpha, lambdas.clone())?;
            let mut state = ghz_alpha(alpha, Sign::Plus)?.to_density();
            for k in 1..=rounds {
                let pre = apply_switch(&sw, &state)?;
                let cf = crate::oracle::rho_cab_k(&sched, k)?;
                worst = worst.max(max_abs_distance(pre.matrix(), cf.matrix())?);
                let (plus, _) = measure_control(&pre, lambdas[k - 1])?;
                let ab = plus
                    .post_state
                    .as_ref()
                    .expect("protocol branches are balanced")
                    .partial_trace(&[Subsystem::A, Subsystem::B])?;
                let sim_bell = max_chsh(&ab)?.bell_value;
                worst = worst.max((sim_bell - bell_k(&sched, k)?).abs());
                state = plus.post_state.clone().expect("checked");
            }
        }
        checks.push(CheckResult {
            name: "closed-form states and Bell values match simulation",
            passed: worst <= 1e-9,
            worst,
        });
    }

    // 2. Outcome-path independence of the pre-measurement state, all
    //    2^(k−1) paths for k ≤ min(k_cap, 5).
    {
        let mut worst = 0.0_f64;
        let k = k_cap.min(5).max(1);
        let alpha = 0.35;
        let lambdas: Vec<f64> = (0..k).map(|_| 0.2 + 0.6 * rng.next_f64()).collect();
        let sched = Schedule::new(alpha, lambdas.clone())?;
        let reference = crate::oracle::rho_cab_k(&sched, k)?;
        let paths = 1usize << (k - 1);
        for bits in 0..paths {
            let path: Vec<Outcome> = (0..k - 1)
                .map(|i| {
                    if bits >> i & 1 == 1 {
                        Outcome::Minus
                    } else {
                        Outcome::Plus
                    }
                })
                .collect();
            let pre = simulate_path(alpha, &lambdas, &path)?;
            worst = worst.max(max_abs_distance(pre.matrix(), reference.matrix())?);
        }
        checks.push(CheckResult {
            name: "pre-measurement state is outcome-path independent",
            passed: worst <= 1e-10,
            worst,
        });
    }

    // 3. Geometric schedules at the guaranteed q clear the classical bound
    //    in every round.
    {
        let mut worst_margin = f64::INFINITY;
        for step in 1..=9 {
            let alpha = step as f64 / 10.0;
            let q = crate::oracle::geometric_guarantee_q(alpha)?;
            for k in 1..=k_cap.max(1) {
                let spec = GeometricScheduleSpec::new(k, q)?;
                for m in 1..=k {
                    let b = crate::oracle::geometric_bell(&spec, alpha, m)?;
                    worst_margin = worst_margin.min(b - 2.0);
                }
            }
        }
        checks.push(CheckResult {
            name: "geometric schedules keep every round above the classical bound",
            passed: worst_margin > 0.0,
            worst: worst_margin,
        });
    }

    // 4. W-state ceiling 2/3 and separability, simulated and closed form.
    {
        let mut worst = 0.0_f64;
        let mut separable = true;
        for _ in 0..trials.min(40) {
            let rounds = 1 + (rng.next_u64() as usize) % k_cap.max(1);
            let lambdas: Vec<f64> = (0..rounds).map(|_| rng.next_f64()).collect();
            let cfg = GameConfig::new(InitialState::W, lambdas.clone())?;
            let transcript = run_protocol(&cfg)?;
            for r in &transcript.rounds {
                worst = worst.max(r.bell_value - 2.0 / 3.0);
                separable &= r.post_measurement_ab.is_separable_ppt()?;
            }
        }
        checks.push(CheckResult {
            name: "W-state games stay separable and below 2/3",
            passed: worst <= 1e-12 && separable,
            worst,
        });
    }

    // 5. Coherent control never helps: PPT and classical on an α grid.
    {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let points = lemma1_check(&grid)?;
        let mut worst = 0.0_f64;
        let mut ok = true;
        for p in &points {
            ok &= p.separable && p.bell_value <= 2.0 + 1e-9;
            worst = worst.max(p.bell_value - 2.0);
        }
        checks.push(CheckResult {
            name: "coherent control yields separable, classical AB states",
            passed: ok,
            worst,
        });
    }

    Ok(VerifyReport {
        k_cap,
        trials,
        seed,
        checks,
    })
}

/// A deliberately wrong SWITCH (control never decoheres the pins) used by
/// negative-control tests to prove the oracle cross-check can fail.
pub fn corrupted_switch() -> SwitchChannel {
    // Swap the roles of the two pin channels relative to the control,
    // which breaks the GHZ fixed-point property.
    let sw = pin_switch();
    let hadamard = {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::new(
            2,
            vec![
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(-h, 0.0),
            ],
        )
        .expect("static entries")
    };
    let lift = kron(&hadamard, &ComplexMatrix::identity(4));
    let ops: Vec<ComplexMatrix> = sw
        .extended()
        .kraus_ops()
        .iter()
        .map(|k| lift.matmul(k).expect("dims match"))
        .collect();
    let base_lift = kron(&hadamard, &ComplexMatrix::identity(2));
    let base_ops: Vec<ComplexMatrix> = sw
        .base()
        .kraus_ops()
        .iter()
        .map(|k| base_lift.matmul(k).expect("dims match"))
        .collect();
    crate::qswitch::SwitchChannel::from_parts(
        crate::channel::KrausChannel::new(4, 4, base_ops).expect("unitary post-processing is CPTP"),
        crate::channel::KrausChannel::new(8, 8, ops).expect("unitary post-processing is CPTP"),
    )
}
