//! End-to-end acceptance checks. Each criterion prints a single PASS/FAIL
//! line; the test fails if any criterion does. Every expected value here is
//! computed independently of the library's own closed-form module wherever
//! a closed form is being validated.

use std::process::Command;

use rabg_core::bell::max_chsh;
use rabg_core::game::{
    compute_nmax, lemma1_check, run_protocol, run_protocol_with_switch, GameConfig, InitialState,
    Mode,
};
use rabg_core::linalg::{max_abs_distance, ComplexMatrix};
use rabg_core::measure::{measure_control, CounterRng, Outcome};
use rabg_core::oracle::{
    geometric_bell, rho_cab_k, wstate_rho_ab_k, GeometricScheduleSpec, Schedule,
};
use rabg_core::qswitch::{apply_switch, pin_switch};
use rabg_core::states::{ghz_alpha, DensityMatrix, RegisterLayout, Sign, Subsystem};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn ghz_run(alpha: f64, lambdas: &[f64]) -> Result<Vec<(f64, DensityMatrix)>, String> {
    let cfg = GameConfig::new(InitialState::Ghz { alpha }, lambdas.to_vec())
        .map_err(|e| format!("config: {e}"))?;
    let t = run_protocol(&cfg).map_err(|e| format!("run: {e}"))?;
    Ok(t.rounds
        .into_iter()
        .map(|r| (r.bell_value, r.post_measurement_ab))
        .collect())
}

/// Criterion 1: the first-round value is 2*sqrt(1 + 4a(1-a)l^2).
fn c1_round1_law() -> Result<(), String> {
    for ai in 1..=9 {
        let alpha = ai as f64 / 10.0;
        for li in 0..=10 {
            let l = li as f64 / 10.0;
            let sim = ghz_run(alpha, &[l])?[0].0;
            let expected = 2.0 * (1.0 + 4.0 * alpha * (1.0 - alpha) * l * l).sqrt();
            if (sim - expected).abs() > 1e-9 {
                return Err(format!(
                    "alpha={alpha} lambda={l}: sim {sim} vs law {expected}"
                ));
            }
        }
    }
    Ok(())
}

/// Criterion 2: the second-round value follows the piecewise law with the
/// branch switch at sqrt(a(1-a))[1+sqrt(1-l1^2)]l2 = sqrt(1-l1^2).
fn c2_round2_piecewise_law() -> Result<(), String> {
    for ai in 1..=9 {
        let alpha = ai as f64 / 10.0;
        for l1i in 0..=10 {
            let l1 = l1i as f64 / 10.0;
            for l2i in 0..=10 {
                let l2 = l2i as f64 / 10.0;
                let sim = ghz_run(alpha, &[l1, l2])?[1].0;
                let root = (1.0 - l1 * l1).sqrt();
                let g = (alpha * (1.0 - alpha)).sqrt() * (1.0 + root) * l2;
                let expected = if g >= root {
                    2.0 * SQRT2 * g
                } else {
                    2.0 * (g * g + root * root).sqrt()
                };
                if (sim - expected).abs() > 1e-9 {
                    return Err(format!(
                        "alpha={alpha} l=({l1},{l2}): sim {sim} vs law {expected}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Criterion 3: simulated round-k states match the closed form within
/// 1e-10 for 200 random schedules, over every outcome path.
fn c3_closed_form_states_all_paths() -> Result<(), String> {
    let sw = pin_switch();
    let mut rng = CounterRng::new(0xACC3);
    for trial in 0..200 {
        let alpha = 0.1 + 0.8 * rng.next_f64();
        let k = 1 + (rng.next_u64() as usize) % 8;
        let lambdas: Vec<f64> = (0..k).map(|_| rng.next_f64()).collect();
        let sched =
            Schedule::new(alpha, lambdas.clone()).map_err(|e| format!("schedule: {e}"))?;
        let reference = rho_cab_k(&sched, k).map_err(|e| format!("oracle: {e}"))?;
        for bits in 0..(1usize << (k - 1)) {
            let mut state = ghz_alpha(alpha, Sign::Plus)
                .map_err(|e| format!("ghz: {e}"))?
                .to_density();
            let mut pre = apply_switch(&sw, &state).map_err(|e| format!("switch: {e}"))?;
            for step in 0..k - 1 {
                let (plus, minus) =
                    measure_control(&pre, lambdas[step]).map_err(|e| format!("measure: {e}"))?;
                let branch = if bits >> step & 1 == 1 { minus } else { plus };
                state = branch.post_state.ok_or("degenerate branch")?;
                pre = apply_switch(&sw, &state).map_err(|e| format!("switch: {e}"))?;
            }
            let d = max_abs_distance(pre.matrix(), reference.matrix())
                .map_err(|e| format!("distance: {e}"))?;
            if d > 1e-10 {
                return Err(format!(
                    "trial {trial} path {bits:b}: state distance {d:e}"
                ));
            }
        }
    }
    Ok(())
}

/// Criterion 4: geometric schedules at q = sqrt(2/(a(1-a))) keep every
/// round strictly above the classical bound.
fn c4_geometric_guarantee() -> Result<(), String> {
    for ai in 1..=9 {
        let alpha = ai as f64 / 10.0;
        let q = (2.0 / (alpha * (1.0 - alpha))).sqrt();
        for k in 1..=8 {
            let spec = GeometricScheduleSpec::new(k, q).map_err(|e| format!("spec: {e}"))?;
            for m in 1..=k {
                let b = geometric_bell(&spec, alpha, m).map_err(|e| format!("bell: {e}"))?;
                if b <= 2.0 + 1e-12 {
                    return Err(format!("alpha={alpha} k={k} m={m}: bell {b}"));
                }
            }
        }
    }
    Ok(())
}

/// Criterion 5: the final geometric round is near-maximal,
/// within [2*sqrt(2) - 1/(sqrt(2)q^2) - 5/q^4, 2*sqrt(2)].
fn c5_near_maximal() -> Result<(), String> {
    for &q in &[5.0, 10.0, 20.0] {
        let spec = GeometricScheduleSpec::new(5, q).map_err(|e| format!("spec: {e}"))?;
        let b = geometric_bell(&spec, 0.5, 5).map_err(|e| format!("bell: {e}"))?;
        let lower = 2.0 * SQRT2 - 1.0 / (SQRT2 * q * q) - 5.0 / q.powi(4);
        if !(lower..=2.0 * SQRT2).contains(&b) {
            return Err(format!("q={q}: bell {b} outside [{lower}, 2*sqrt(2)]"));
        }
        for m in 1..5 {
            let bm = geometric_bell(&spec, 0.5, m).map_err(|e| format!("bell: {e}"))?;
            if bm <= 2.0 {
                return Err(format!("q={q} m={m}: bell {bm} not above 2"));
            }
        }
    }
    Ok(())
}

/// Criterion 6: coherent control gives PPT-separable, classical AB states
/// with normalized partial-transpose spectrum {1, 0, a, 1-a}/2.
fn c6_coherent_control() -> Result<(), String> {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let points = lemma1_check(&grid).map_err(|e| format!("check: {e}"))?;
    for p in &points {
        if p.min_pt_eigenvalue < -1e-12 {
            return Err(format!("alpha={}: min PT {:e}", p.alpha, p.min_pt_eigenvalue));
        }
        if p.bell_value > 2.0 + 1e-9 {
            return Err(format!("alpha={}: bell {}", p.alpha, p.bell_value));
        }
        let mut expected = [0.5, 0.0, p.alpha / 2.0, (1.0 - p.alpha) / 2.0];
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in p.pt_spectrum.iter().zip(expected) {
            if (got - want).abs() > 1e-10 {
                return Err(format!(
                    "alpha={}: PT spectrum {:?} vs {:?}",
                    p.alpha, p.pt_spectrum, expected
                ));
            }
        }
    }
    Ok(())
}

/// Criterion 7: an interior projective round caps every later round at
/// sqrt(2), in both simulation and the closed form with R = 0.
fn c7_interior_projective_round() -> Result<(), String> {
    let mut rng = CounterRng::new(0xACC7);
    let mut schedules: Vec<(f64, Vec<f64>)> = vec![
        (0.5, vec![1.0, 1.0]),
        (0.5, vec![0.5, 1.0, 0.9]),
        (0.3, vec![1.0, 0.3, 0.8]),
    ];
    for _ in 0..10 {
        let alpha = 0.1 + 0.8 * rng.next_f64();
        let m = (rng.next_u64() as usize) % 3;
        let mut lambdas: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
        lambdas[m] = 1.0;
        schedules.push((alpha, lambdas));
    }
    for (alpha, lambdas) in schedules {
        let m = lambdas.iter().position(|&l| l >= 1.0).unwrap() + 1;
        let sim = ghz_run(alpha, &lambdas)?;
        let sched =
            Schedule::new(alpha, lambdas.clone()).map_err(|e| format!("schedule: {e}"))?;
        for k in m + 1..=lambdas.len() {
            let (bell_sim, _) = &sim[k - 1];
            if *bell_sim > SQRT2 + 1e-9 {
                return Err(format!("alpha={alpha} k={k}: simulated bell {bell_sim}"));
            }
            let cf = rabg_core::oracle::bell_k(&sched, k).map_err(|e| format!("bell: {e}"))?;
            if cf > SQRT2 + 1e-9 {
                return Err(format!("alpha={alpha} k={k}: closed-form bell {cf}"));
            }
        }
    }
    Ok(())
}

/// Criterion 8: W-state runs match the closed-form AB states, stay PPT,
/// and never exceed 2/3.
fn c8_w_state() -> Result<(), String> {
    let mut rng = CounterRng::new(0xACC8);
    for _ in 0..20 {
        let k = 1 + (rng.next_u64() as usize) % 6;
        let lambdas: Vec<f64> = (0..k).map(|_| rng.next_f64()).collect();
        let cfg = GameConfig::new(InitialState::W, lambdas.clone())
            .map_err(|e| format!("config: {e}"))?;
        let t = run_protocol(&cfg).map_err(|e| format!("run: {e}"))?;
        for r in &t.rounds {
            let cf = wstate_rho_ab_k(&lambdas, r.k).map_err(|e| format!("oracle: {e}"))?;
            let d = max_abs_distance(r.post_measurement_ab.matrix(), cf.matrix())
                .map_err(|e| format!("distance: {e}"))?;
            if d > 1e-10 {
                return Err(format!("round {}: AB state distance {d:e}", r.k));
            }
            if !r
                .post_measurement_ab
                .is_separable_ppt()
                .map_err(|e| format!("ppt: {e}"))?
            {
                return Err(format!("round {}: not PPT", r.k));
            }
            if r.bell_value > 2.0 / 3.0 + 1e-9 {
                return Err(format!("round {}: bell {}", r.k, r.bell_value));
            }
        }
    }
    Ok(())
}

/// Criterion 9: n_max is non-increasing in the threshold, ordered in
/// alpha, and hits the hand-traced spot values.
fn c9_nmax_shape() -> Result<(), String> {
    let spot1 = compute_nmax(2.8, 0.5).map_err(|e| format!("nmax: {e}"))?;
    if spot1.n_max != 1 {
        return Err(format!("n_max(2.8, 0.5) = {}, expected 1", spot1.n_max));
    }
    let spot3 = compute_nmax(2.2, 0.5).map_err(|e| format!("nmax: {e}"))?;
    if spot3.n_max != 3 {
        return Err(format!("n_max(2.2, 0.5) = {}, expected 3", spot3.n_max));
    }
    for &alpha in &[0.1, 0.3, 0.5] {
        let mut last = usize::MAX;
        for &b in &[2.05, 2.1, 2.2, 2.4, 2.6, 2.8] {
            let n = compute_nmax(b, alpha).map_err(|e| format!("nmax: {e}"))?.n_max;
            if n > last {
                return Err(format!("n_max not monotone at b={b} alpha={alpha}"));
            }
            last = n;
        }
    }
    for &b in &[2.05, 2.2, 2.5] {
        let n01 = compute_nmax(b, 0.1).map_err(|e| format!("nmax: {e}"))?.n_max;
        let n03 = compute_nmax(b, 0.3).map_err(|e| format!("nmax: {e}"))?.n_max;
        let n05 = compute_nmax(b, 0.5).map_err(|e| format!("nmax: {e}"))?.n_max;
        if !(n05 >= n03 && n03 >= n01) {
            return Err(format!("alpha ordering broken at b={b}: {n01},{n03},{n05}"));
        }
    }
    Ok(())
}

/// Criterion 10: structural invariants — CPTP channels, validated states,
/// a firing oracle cross-check, and byte-reproducible CLI output.
fn c10_structural() -> Result<(), String> {
    // CPTP closure of every channel constructor used by the game.
    let sw = pin_switch();
    for (ops, dim) in [
        (sw.base().kraus_ops(), 4usize),
        (sw.extended().kraus_ops(), 8usize),
    ] {
        let mut sum = ComplexMatrix::zeros(dim);
        for k in ops {
            sum = sum
                .add(&k.dagger().matmul(k).map_err(|e| format!("{e}"))?)
                .map_err(|e| format!("{e}"))?;
        }
        let defect = sum
            .sub(&ComplexMatrix::identity(dim))
            .map_err(|e| format!("{e}"))?
            .max_abs();
        if defect > 1e-10 {
            return Err(format!("dim-{dim} Kraus completeness defect {defect:e}"));
        }
    }

    // Evolved states revalidate (Hermitian, unit trace, PSD) at every step;
    // run a deep schedule to exercise it.
    let lambdas: Vec<f64> = (0..8).map(|i| 0.1 + 0.1 * i as f64).collect();
    for (_, ab) in ghz_run(0.3, &lambdas)? {
        DensityMatrix::new(RegisterLayout::ab(), ab.matrix().clone())
            .map_err(|e| format!("revalidation failed: {e}"))?;
        ab.partial_trace(&[Subsystem::A])
            .map_err(|e| format!("{e}"))?;
    }

    // The oracle cross-check is live: a corrupted SWITCH must be caught.
    let cfg = GameConfig::new(InitialState::Ghz { alpha: 0.5 }, vec![0.6, 0.8])
        .map_err(|e| format!("{e}"))?;
    match run_protocol_with_switch(&cfg, &rabg_core::game::corrupted_switch()) {
        Err(rabg_core::Error::OracleMismatch { .. }) => {}
        other => return Err(format!("corrupted switch not caught: {other:?}")),
    }

    // CLI byte-reproducibility under a fixed seed.
    let bin = env!("CARGO_BIN_EXE_rabg");
    let args = [
        "run", "--alpha", "0.5", "--lambdas", "0.4,0.7,1.0", "--mode", "sampled", "--seed", "7",
    ];
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(bin)
            .args(args)
            .env_remove("RABG_SEED")
            .output()
            .map_err(|e| format!("spawn: {e}"))?;
        if !out.status.success() {
            return Err(format!(
                "cli failed: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        Ok(out.stdout)
    };
    let first = run(&args)?;
    let second = run(&args)?;
    if first != second {
        return Err("sampled CLI output not byte-identical across reruns".into());
    }
    let verify = run(&["verify", "--kcap", "4", "--trials", "40", "--seed", "42"])?;
    let verify2 = run(&["verify", "--kcap", "4", "--trials", "40", "--seed", "42"])?;
    if verify != verify2 {
        return Err("verify output not byte-identical across reruns".into());
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Result<(), String>); 10] = [
        ("criterion 01: round-1 Bell law", c1_round1_law),
        ("criterion 02: round-2 piecewise law", c2_round2_piecewise_law),
        (
            "criterion 03: closed-form states over all outcome paths",
            c3_closed_form_states_all_paths,
        ),
        ("criterion 04: geometric-schedule guarantee", c4_geometric_guarantee),
        ("criterion 05: near-maximal final round", c5_near_maximal),
        ("criterion 06: coherent control is useless", c6_coherent_control),
        (
            "criterion 07: interior projective round is fatal",
            c7_interior_projective_round,
        ),
        ("criterion 08: W-state ceiling", c8_w_state),
        ("criterion 09: n_max landscape", c9_nmax_shape),
        ("criterion 10: structural invariants", c10_structural),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failures += 1;
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
