// Copyright 2026 The qba developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (visible under `--nocapture`).
//!
//! Analytic identities are checked at 1e-12; the protocol-level criteria are
//! statistical over 500 seeded rounds at N = 256 and the optimal observable.

use std::time::Instant;

use num_complex::Complex64;
use qba::adversary::Scenario;
use qba::engine::{Party, ProtocolConfig, ProtocolOutcome, run_protocol};
use qba::hardy::{
    HardyModel, ObservablePair, Setting, check_hardy_conditions, optimal_alpha, q_max_analytic,
    q_max_search, q_value,
};
use qba::qcore::{LocalBasis, Outcome, PureState, apply, collapse, fidelity, project_out, tensor};
use qba::stats::{Z_99, derive_seed, wilson_contains};
use qba::verify::{Action, ReadValue};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ANALYTIC_TOL: f64 = 1e-12;
const TRIALS: u32 = 500;
const N: usize = 256;

fn optimal_model() -> HardyModel {
    let pair = ObservablePair::from_alpha_real(optimal_alpha()).unwrap();
    HardyModel::build(pair, pair).unwrap()
}

fn symmetric_root_half_model() -> HardyModel {
    let pair = ObservablePair::from_alpha_real(std::f64::consts::FRAC_1_SQRT_2).unwrap();
    HardyModel::build(pair, pair).unwrap()
}

fn mc_config(scenario: Scenario, trial: u32, master_seed: u64) -> ProtocolConfig {
    let mut config = ProtocolConfig::new(scenario);
    config.n = N;
    config.message_bit = 1;
    config.seed = derive_seed(master_seed, trial as u64);
    config
}

fn run_trials(
    scenario: Scenario,
    master_seed: u64,
    mut inspect: impl FnMut(&ProtocolOutcome),
) -> std::time::Duration {
    let start = Instant::now();
    for trial in 0..TRIALS {
        let outcome = run_protocol(&mc_config(scenario, trial, master_seed)).unwrap();
        inspect(&outcome);
    }
    start.elapsed()
}

#[test]
fn acceptance_01_hardy_construction_random_pairs() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_zero = 0.0f64;
    let mut worst_q = 0.0f64;
    for _ in 0..50 {
        let p1 = ObservablePair::random(&mut rng);
        let p2 = ObservablePair::random(&mut rng);
        let model = HardyModel::build(p1, p2).unwrap();
        let table = model.probability_table(model.psi_h()).unwrap();
        let check = check_hardy_conditions(&table, ANALYTIC_TOL);
        assert!(check.pass, "Hardy conditions failed for {p1:?}, {p2:?}");
        for residual in check.zero_residuals {
            worst_zero = worst_zero.max(residual);
        }
        worst_q = worst_q.max((model.q() - q_value(&p1, &p2)).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst_zero <= ANALYTIC_TOL);
    assert!(worst_q <= ANALYTIC_TOL);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "acceptance 01 hardy construction: PASS (50 pairs, worst zero {worst_zero:.2e}, worst q gap {worst_q:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_02_q_maximum() {
    let start = Instant::now();
    let (alpha_opt, q_max) = q_max_search();
    let q_gap = (q_max - q_max_analytic()).abs();
    let alpha_gap = (alpha_opt * alpha_opt - (5.0f64.sqrt() - 1.0) / 2.0).abs();
    let elapsed = start.elapsed();
    assert!(q_gap < 1e-9, "q_max off by {q_gap:.3e}");
    assert!(alpha_gap < 1e-6, "alpha_opt^2 off by {alpha_gap:.3e}");
    assert!(elapsed.as_secs_f64() < 1.0);
    println!(
        "acceptance 02 q maximum: PASS (q_max = {q_max:.10}, alpha_opt^2 gap {alpha_gap:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_03_conversion_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut models = vec![optimal_model(), symmetric_root_half_model()];
    for _ in 0..5 {
        models.push(
            HardyModel::build(
                ObservablePair::random(&mut rng),
                ObservablePair::random(&mut rng),
            )
            .unwrap(),
        );
    }
    let mut worst_fidelity_gap = 0.0f64;
    let mut worst_prob_gap = 0.0f64;
    let mut worst_unitarity = 0.0f64;
    for model in &models {
        let input = tensor(&PureState::basis_state(1, 0), &PureState::bell_phi_plus()).unwrap();
        let converted = apply(model.conversion_unitary(), &[0, 1], &input).unwrap();
        let (kept, p_keep) =
            project_out(&[Complex64::ONE, Complex64::ZERO], &[0], &converted).unwrap();
        let (dropped, p_drop) =
            project_out(&[Complex64::ZERO, Complex64::ONE], &[0], &converted).unwrap();
        worst_prob_gap = worst_prob_gap.max((p_keep - 0.5).abs()).max((p_drop - 0.5).abs());
        worst_fidelity_gap = worst_fidelity_gap
            .max(1.0 - fidelity(&kept, model.psi_h()).unwrap())
            .max(1.0 - fidelity(&dropped, model.psi_prime()).unwrap());
        worst_unitarity = worst_unitarity.max(model.conversion_unitary().unitarity_deviation());
    }
    assert!(worst_fidelity_gap <= ANALYTIC_TOL);
    assert!(worst_prob_gap <= ANALYTIC_TOL);
    assert!(worst_unitarity <= ANALYTIC_TOL);
    println!(
        "acceptance 03 conversion identity: PASS ({} models, fidelity gap {worst_fidelity_gap:.2e}, branch prob gap {worst_prob_gap:.2e}, unitarity {worst_unitarity:.2e})",
        models.len()
    );
}

#[test]
fn acceptance_04_swap_identities() {
    let two_copies = tensor(&PureState::bell_phi_plus(), &PureState::bell_phi_plus()).unwrap();
    let mut worst_prob_gap = 0.0f64;
    let mut worst_fidelity_gap = 0.0f64;
    for model in [optimal_model(), symmetric_root_half_model()] {
        let cases = [
            (model.swap_projector().clone(), model.psi_h().clone()),
            {
                let (cheat, chi) = model.cheat_projector();
                (cheat.clone(), chi.clone())
            },
        ];
        for (projector, kept) in cases {
            let (_, click_prob) = collapse(&projector, &[0, 2], &two_copies).unwrap();
            worst_prob_gap = worst_prob_gap.max((click_prob - 0.25).abs());
            let bra: Vec<Complex64> = kept.amplitudes().iter().map(|a| a.conj()).collect();
            let (remote, p2) = project_out(&bra, &[0, 2], &two_copies).unwrap();
            worst_prob_gap = worst_prob_gap.max((p2 - 0.25).abs());
            worst_fidelity_gap = worst_fidelity_gap.max(1.0 - fidelity(&remote, &kept).unwrap());
        }
    }
    assert!(worst_prob_gap <= ANALYTIC_TOL);
    assert!(worst_fidelity_gap <= ANALYTIC_TOL);
    println!(
        "acceptance 04 swap identities: PASS (click prob gap {worst_prob_gap:.2e}, remote fidelity gap {worst_fidelity_gap:.2e})"
    );
}

#[test]
fn acceptance_05_chi_relabelling() {
    let mut worst = 0.0f64;
    for model in [optimal_model(), symmetric_root_half_model()] {
        let psi_table = model.probability_table(model.psi_h()).unwrap();
        let chi_table = model.probability_table(model.chi()).unwrap();
        for (s1, s2, o1, o2, p_chi) in chi_table.rows() {
            worst = worst.max((p_chi - psi_table.get(s1, s2.flipped(), o1, o2)).abs());
        }
    }
    let model = symmetric_root_half_model();
    let chi_table = model.probability_table(model.chi()).unwrap();
    let dd_mm = chi_table.get(Setting::D, Setting::D, Outcome::Minus, Outcome::Minus);
    let uu_pp = chi_table.get(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus);
    assert!(worst <= ANALYTIC_TOL);
    assert!((dd_mm - 1.0 / 6.0).abs() <= ANALYTIC_TOL);
    assert!(uu_pp <= ANALYTIC_TOL);
    println!(
        "acceptance 05 chi relabelling: PASS (worst entry gap {worst:.2e}, P(-,-|D,D) = {dd_mm:.10}, P(+,+|U,U) = {uu_pp:.2e})"
    );
}

#[test]
fn acceptance_06_honest_end_to_end() {
    let mut clean = 0u32;
    let mut false_accusations = 0u32;
    let elapsed = run_trials(Scenario::Honest, 0xACC6, |outcome| {
        let readings_correct = outcome
            .readings
            .iter()
            .all(|entry| entry.reading.value == ReadValue::One);
        let verdicts = [&outcome.verdicts.a, &outcome.verdicts.b];
        let no_traitor = verdicts.iter().all(|v| v.traitor.is_none());
        let acted = verdicts.iter().all(|v| v.action == Action::Act(1));
        if readings_correct && no_traitor && acted {
            clean += 1;
        }
        if verdicts.iter().any(|v| v.traitor.is_some()) {
            false_accusations += 1;
        }
    });
    assert!(
        clean as f64 >= 0.99 * TRIALS as f64,
        "only {clean}/{TRIALS} clean rounds"
    );
    assert_eq!(false_accusations, 0, "loyal parties were accused");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "acceptance 06 honest end-to-end: PASS ({clean}/{TRIALS} clean, {false_accusations} false accusations, {elapsed:?})"
    );
}

#[test]
fn acceptance_07_basis_flip_attack() {
    let mut readable = 0u32;
    let mut flipped = 0u32;
    let mut named_a = 0u32;
    let elapsed = run_trials(Scenario::ABasisFlip, 0xACC7, |outcome| {
        // B's raw reading of the order carried by A's sub-protocol.
        let reading = outcome.reading(Party::B, Party::A);
        if reading.value.is_readable() {
            readable += 1;
            // The true order is 1; the attack flips it to 0.
            if reading.value == ReadValue::Zero {
                flipped += 1;
            }
        }
        if outcome.verdicts.b.traitor == Some(Party::A) {
            named_a += 1;
        }
    });
    assert!(readable > 0);
    assert!(
        flipped as f64 >= 0.95 * readable as f64,
        "flipped {flipped}/{readable}"
    );
    assert!(
        named_a as f64 >= 0.99 * TRIALS as f64,
        "B named A in only {named_a}/{TRIALS}"
    );
    println!(
        "acceptance 07 basis-flip attack: PASS (flipped {flipped}/{readable} readable, named {named_a}/{TRIALS}, {elapsed:?})"
    );
}

#[test]
fn acceptance_08_commander_equivocation() {
    let mut mixed_ok = 0u32;
    let elapsed_mixed = run_trials(Scenario::CMixed, 0xACC8, |outcome| {
        let unreadable = !outcome.reading(Party::A, Party::A).value.is_readable()
            && !outcome.reading(Party::B, Party::A).value.is_readable();
        let named_c = outcome.verdicts.a.traitor == Some(Party::C)
            && outcome.verdicts.b.traitor == Some(Party::C);
        if unreadable || named_c {
            mixed_ok += 1;
        }
    });
    assert!(
        mixed_ok as f64 >= 0.99 * TRIALS as f64,
        "mixed-settings detection {mixed_ok}/{TRIALS}"
    );

    let mut two_faced_ok = 0u32;
    let elapsed_two_faced = run_trials(Scenario::CTwoFaced, 0xACC9, |outcome| {
        if outcome.verdicts.a.traitor == Some(Party::C)
            && outcome.verdicts.b.traitor == Some(Party::C)
        {
            two_faced_ok += 1;
        }
    });
    assert!(
        two_faced_ok as f64 >= 0.99 * TRIALS as f64,
        "two-faced detection {two_faced_ok}/{TRIALS}"
    );
    println!(
        "acceptance 08 commander equivocation: PASS (mixed {mixed_ok}/{TRIALS} in {elapsed_mixed:?}, two-faced {two_faced_ok}/{TRIALS} in {elapsed_two_faced:?})"
    );
}

#[test]
fn acceptance_09_fake_links_and_classical_liar() {
    let cases = [
        (Scenario::AFakeLinks, 0xACCA_u64),
        (Scenario::BFakeLinks, 0xACCB),
        (Scenario::ALiar, 0xACCC),
        (Scenario::BLiar, 0xACCD),
    ];
    let mut summary = String::new();
    for (scenario, master_seed) in cases {
        let traitor = scenario.traitor().unwrap();
        let loyal = traitor.peer();
        let mut named = 0u32;
        let elapsed = run_trials(scenario, master_seed, |outcome| {
            let verdict = match loyal {
                Party::A => &outcome.verdicts.a,
                _ => &outcome.verdicts.b,
            };
            if verdict.traitor == Some(traitor) {
                named += 1;
            }
        });
        assert!(
            named as f64 >= 0.99 * TRIALS as f64,
            "{scenario}: named {named}/{TRIALS}"
        );
        summary.push_str(&format!("{scenario} {named}/{TRIALS} in {elapsed:?}; "));
    }
    println!("acceptance 09 fake links and classical liar: PASS ({summary})");
}

#[test]
fn acceptance_10_sampling_calibration() {
    let model = optimal_model();
    let calibrate = |seed: u64| -> (bool, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = LocalBasis::computational();
        let samples = 100_000u64;
        let mut hits = 0u64;
        for _ in 0..samples {
            let (o1, post, _) = measure(&model, 0, &basis, &mut rng);
            let (o2, _, _) = measure_state(&post, 1, &basis, &mut rng);
            if o1 == Outcome::Plus && o2 == Outcome::Plus {
                hits += 1;
            }
        }
        (wilson_contains(model.q(), hits, samples, Z_99), hits)
    };
    // Statistical criterion with one allowed rerun on an independent seed.
    let (ok, hits) = calibrate(2026);
    let (ok, hits) = if ok { (ok, hits) } else { calibrate(2027) };
    assert!(ok, "empirical q {hits}/100000 outside the Wilson 99% interval");
    println!(
        "acceptance 10 sampling calibration: PASS ({hits}/100000 hits vs q = {:.7})",
        model.q()
    );
}

fn measure(
    model: &HardyModel,
    subsystem: usize,
    basis: &LocalBasis,
    rng: &mut ChaCha8Rng,
) -> (Outcome, PureState, f64) {
    qba::qcore::measure_local(model.psi_h(), subsystem, basis, rng).unwrap()
}

fn measure_state(
    state: &PureState,
    subsystem: usize,
    basis: &LocalBasis,
    rng: &mut ChaCha8Rng,
) -> (Outcome, PureState, f64) {
    qba::qcore::measure_local(state, subsystem, basis, rng).unwrap()
}
