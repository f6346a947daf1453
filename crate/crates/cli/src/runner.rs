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

//! Seeded Monte Carlo orchestration and report assembly.
//!
//! Per-trial seeds derive from the batch seed by counter, so any trial can
//! be reproduced in isolation; sweep cells derive their batch seeds the same
//! way from the master seed. Reports carry per-trial rows plus aggregates
//! recomputable from the rows, and serialize byte-identically for equal
//! configurations.

use serde::{Deserialize, Serialize};

use qba::adversary::Scenario;
use qba::engine::{Party, ProtocolOutcome, Transcript, run_protocol};
use qba::hardy::{ObservablePair, q_value};
use qba::stats::{Z_99, derive_seed, wilson_interval};
use qba::verify::{Action, ReadValue, TestOutcome};

use crate::CliError;
use crate::config::RunConfig;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

fn reading_label(value: ReadValue) -> String {
    match value {
        ReadValue::Zero => "0".into(),
        ReadValue::One => "1".into(),
        ReadValue::Unreadable(reason) => format!(
            "unreadable:{}",
            match reason {
                qba::verify::UnreadableReason::BothFalsified => "both_falsified",
                qba::verify::UnreadableReason::InsufficientEvidence => "insufficient_evidence",
                qba::verify::UnreadableReason::NoRuns => "no_runs",
            }
        ),
    }
}

fn action_label(action: Action) -> String {
    match action {
        Action::Act(bit) => bit.to_string(),
        Action::Abstain => "abstain".into(),
    }
}

fn traitor_label(traitor: Option<Party>) -> String {
    match traitor {
        None => "none".into(),
        Some(party) => party.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub action: String,
    pub traitor: String,
    pub peer_link_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub actor: Party,
    pub distributor: Party,
    pub population: String,
    pub outcome: String,
}

/// One protocol round, compacted for the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u32,
    pub seed: u64,
    pub a_m_cb: String,
    pub a_m_ca: String,
    pub b_m_cb: String,
    pub b_m_ca: String,
    pub verdict_a: VerdictRow,
    pub verdict_b: VerdictRow,
    pub reports: Vec<ReportRow>,
    /// `(+,+|U,U)` events and `(U,U)` runs pooled over actor A's reports.
    pub q_events: u64,
    pub q_runs: u64,
    pub loyal_readable: bool,
    pub agreement: bool,
    pub correct_action: bool,
    pub traitor_named: bool,
    pub false_accusation: bool,
}

/// Aggregates over the per-trial rows (all recomputable from them).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: u32,
    pub expected_traitor: String,
    /// Every loyal lieutenant decoded both orders.
    pub readability_rate: f64,
    /// Loyal lieutenants saw equal orders whenever both were readable.
    pub agreement_rate: f64,
    pub correct_action_rate: f64,
    /// Every loyal lieutenant named the actual traitor.
    pub detection_power: f64,
    pub false_accusation_rate: f64,
    pub no_traitor_rate: f64,
    pub q_events: u64,
    pub q_runs: u64,
    pub q_hat: Option<f64>,
    pub q_wilson_99: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub q_analytic: f64,
    pub trials: Vec<TrialRow>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Per-trial CSV summary.
    pub fn to_csv(&self) -> String {
        let mut csv = String::from(
            "trial,seed,a_m_cb,a_m_ca,b_m_cb,b_m_ca,verdict_a_action,verdict_a_traitor,\
             verdict_b_action,verdict_b_traitor,loyal_readable,agreement,correct_action,\
             traitor_named,false_accusation\n",
        );
        for row in &self.trials {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.trial,
                row.seed,
                row.a_m_cb,
                row.a_m_ca,
                row.b_m_cb,
                row.b_m_ca,
                row.verdict_a.action,
                row.verdict_a.traitor,
                row.verdict_b.action,
                row.verdict_b.traitor,
                row.loyal_readable,
                row.agreement,
                row.correct_action,
                row.traitor_named,
                row.false_accusation,
            ));
        }
        csv
    }
}

fn trial_row(trial: u32, seed: u64, scenario: Scenario, message_bit: u8, outcome: &ProtocolOutcome) -> TrialRow {
    let traitor = scenario.traitor();
    let loyal: Vec<Party> = Party::DISTRIBUTORS
        .into_iter()
        .filter(|&p| Some(p) != traitor)
        .collect();

    let verdict_of = |party: Party| match party {
        Party::A => &outcome.verdicts.a,
        _ => &outcome.verdicts.b,
    };
    let verdict_row = |party: Party| {
        let v = verdict_of(party);
        VerdictRow {
            action: action_label(v.action),
            traitor: traitor_label(v.traitor),
            peer_link_fault: v.evidence.peer_link_fault,
        }
    };

    let loyal_readable = loyal.iter().all(|&reader| {
        Party::DISTRIBUTORS
            .into_iter()
            .all(|dist| outcome.reading(reader, dist).value.is_readable())
    });
    let agreement = loyal.iter().all(|&reader| {
        let own = outcome.reading(reader, Party::A).value.bit();
        let other = outcome.reading(reader, Party::B).value.bit();
        match (own, other) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        }
    });
    let expected_action = match traitor {
        Some(Party::C) => Action::Act(0),
        _ => Action::Act(message_bit),
    };
    let correct_action = loyal
        .iter()
        .all(|&party| verdict_of(party).action == expected_action);
    let traitor_named = traitor
        .map(|t| loyal.iter().all(|&party| verdict_of(party).traitor == Some(t)))
        .unwrap_or(false);
    let false_accusation = loyal.iter().any(|&party| {
        verdict_of(party)
            .traitor
            .map(|named| Some(named) != traitor)
            .unwrap_or(false)
    });

    let mut q_events = 0u64;
    let mut q_runs = 0u64;
    let mut reports = Vec::new();
    for actor_reports in &outcome.reports {
        for entry in &actor_reports.entries {
            if actor_reports.actor == Party::A {
                q_events += entry.report.q_events as u64;
                q_runs += entry.report.n_uu as u64;
            }
            reports.push(ReportRow {
                actor: actor_reports.actor,
                distributor: entry.distributor,
                population: format!("{:?}", entry.population),
                outcome: match entry.report.outcome {
                    TestOutcome::Pass => "pass".into(),
                    TestOutcome::Fail => "fail".into(),
                    TestOutcome::Inconclusive => "inconclusive".into(),
                },
            });
        }
    }

    TrialRow {
        trial,
        seed,
        a_m_cb: reading_label(outcome.reading(Party::A, Party::A).value),
        a_m_ca: reading_label(outcome.reading(Party::A, Party::B).value),
        b_m_cb: reading_label(outcome.reading(Party::B, Party::A).value),
        b_m_ca: reading_label(outcome.reading(Party::B, Party::B).value),
        verdict_a: verdict_row(Party::A),
        verdict_b: verdict_row(Party::B),
        reports,
        q_events,
        q_runs,
        loyal_readable,
        agreement,
        correct_action,
        traitor_named,
        false_accusation,
    }
}

fn aggregate(rows: &[TrialRow], scenario: Scenario) -> Aggregate {
    let trials = rows.len() as u32;
    let rate = |count: usize| count as f64 / trials.max(1) as f64;
    let q_events: u64 = rows.iter().map(|r| r.q_events).sum();
    let q_runs: u64 = rows.iter().map(|r| r.q_runs).sum();
    Aggregate {
        trials,
        expected_traitor: traitor_label(scenario.traitor()),
        readability_rate: rate(rows.iter().filter(|r| r.loyal_readable).count()),
        agreement_rate: rate(rows.iter().filter(|r| r.agreement).count()),
        correct_action_rate: rate(rows.iter().filter(|r| r.correct_action).count()),
        detection_power: rate(rows.iter().filter(|r| r.traitor_named).count()),
        false_accusation_rate: rate(rows.iter().filter(|r| r.false_accusation).count()),
        no_traitor_rate: rate(
            rows.iter()
                .filter(|r| r.verdict_a.traitor == "none" && r.verdict_b.traitor == "none")
                .count(),
        ),
        q_events,
        q_runs,
        q_hat: (q_runs > 0).then(|| q_events as f64 / q_runs as f64),
        q_wilson_99: (q_runs > 0).then(|| wilson_interval(q_events, q_runs, Z_99)),
    }
}

/// Run one Monte Carlo batch. Returns the report and the first trial's
/// transcript for optional streaming to disk.
pub fn execute_run(config: &RunConfig) -> Result<(RunReport, Transcript), CliError> {
    config.validate()?;
    let scenario = config.scenario()?;
    let mut rows = Vec::with_capacity(config.trials as usize);
    let mut first_transcript = None;
    for trial in 0..config.trials {
        let seed = derive_seed(config.seed, trial as u64);
        let outcome = run_protocol(&config.protocol_config(seed)?).map_err(CliError::internal)?;
        if trial == 0 {
            first_transcript = Some(outcome.transcript.clone());
        }
        rows.push(trial_row(trial, seed, scenario, config.message_bit, &outcome));
    }
    let aggregate = aggregate(&rows, scenario);
    let pair = ObservablePair::from_alpha_real(config.alpha).map_err(CliError::config)?;
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        q_analytic: q_value(&pair, &pair),
        trials: rows,
        aggregate,
    };
    Ok((report, first_transcript.expect("at least one trial")))
}

/// One sweep cell: a full batch at derived seed.
#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub n: usize,
    pub alpha: f64,
    pub scenario: String,
    pub trials: u32,
    pub cell_seed: u64,
    pub q_analytic: f64,
    pub readability_rate: f64,
    pub agreement_rate: f64,
    pub correct_action_rate: f64,
    pub detection_power: f64,
    pub false_accusation_rate: f64,
    pub q_hat: Option<f64>,
}

pub const SWEEP_CSV_HEADER: &str = "n,alpha,scenario,trials,cell_seed,q_analytic,\
    readability_rate,agreement_rate,correct_action_rate,detection_power,\
    false_accusation_rate,q_hat";

/// Run the full grid; cell seeds derive from the master seed by counter in
/// row-major (n, alpha, scenario) order.
pub fn execute_sweep(
    base: &RunConfig,
    ns: &[usize],
    alphas: &[f64],
    scenarios: &[String],
    master_seed: u64,
) -> Result<Vec<SweepCell>, CliError> {
    if ns.is_empty() || alphas.is_empty() || scenarios.is_empty() {
        return Err(CliError::Config("empty sweep grid".into()));
    }
    let mut cells = Vec::new();
    let mut index = 0u64;
    for &n in ns {
        for &alpha in alphas {
            for scenario in scenarios {
                let cell_seed = derive_seed(master_seed, index);
                index += 1;
                let mut config = base.clone();
                config.n = n;
                config.alpha = alpha;
                config.scenario = scenario.clone();
                config.seed = cell_seed;
                let (report, _) = execute_run(&config)?;
                cells.push(SweepCell {
                    n,
                    alpha,
                    scenario: scenario.clone(),
                    trials: config.trials,
                    cell_seed,
                    q_analytic: report.q_analytic,
                    readability_rate: report.aggregate.readability_rate,
                    agreement_rate: report.aggregate.agreement_rate,
                    correct_action_rate: report.aggregate.correct_action_rate,
                    detection_power: report.aggregate.detection_power,
                    false_accusation_rate: report.aggregate.false_accusation_rate,
                    q_hat: report.aggregate.q_hat,
                });
            }
        }
    }
    Ok(cells)
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for cell in cells {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            cell.n,
            cell.alpha,
            cell.scenario,
            cell.trials,
            cell.cell_seed,
            cell.q_analytic,
            cell.readability_rate,
            cell.agreement_rate,
            cell.correct_action_rate,
            cell.detection_power,
            cell.false_accusation_rate,
            cell.q_hat.map(|q| q.to_string()).unwrap_or_default(),
        ));
    }
    csv
}
