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

//! Statistical inference from a party's view: reading the commander's
//! orders, pairwise Hardy tests, and the final verdicts.
//!
//! Everything in this module is a pure function of one [`PartyView`], so a
//! verdict can be recomputed bit-for-bit from a serialized view.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::engine::{Party, PartyView, SlotId, SlotKind};
use crate::hardy::{Setting, forbidden_event};
use crate::qcore::Outcome;
use crate::stats::{Z_99, wilson_interval};
use crate::{Error, Result};

/// Expected `(+,+|U,U)` events below this make the positivity guard inert,
/// so sparse but honest data is never failed for bad luck.
const Q_GUARD_EXPECTED: f64 = 10.0;

/// The decoded value of one transmitted order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReadValue {
    Zero,
    One,
    Unreadable(UnreadableReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnreadableReason {
    /// Both setting hypotheses accumulated forbidden events.
    BothFalsified,
    /// Neither hypothesis could be falsified with the required confidence.
    InsufficientEvidence,
    /// No linked message runs were available at all.
    NoRuns,
}

impl ReadValue {
    pub fn bit(self) -> Option<u8> {
        match self {
            ReadValue::Zero => Some(0),
            ReadValue::One => Some(1),
            ReadValue::Unreadable(_) => None,
        }
    }

    pub fn is_readable(self) -> bool {
        !matches!(self, ReadValue::Unreadable(_))
    }
}

/// One decoded order with its supporting evidence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MessageReading {
    pub value: ReadValue,
    /// Forbidden events counted against the hypothesis "commander measured U".
    pub violations_u: usize,
    /// Same for "commander measured D".
    pub violations_d: usize,
    pub runs_used: usize,
}

/// Decode the order carried by `distributor`'s sub-protocol from the
/// reader's linked message runs.
///
/// For every hypothesis on the commander's uniform message setting the
/// reader counts joint events that the Hardy conditions forbid. A value is
/// decoded only when exactly one hypothesis survives with zero violations
/// and the other is falsified at least `k_min` times.
pub fn read_message(view: &PartyView, distributor: Party) -> MessageReading {
    let mut violations = [0usize; 2];
    let mut runs_used = 0;
    if let Some(lists) = view.lists_for(distributor) {
        let message_runs: BTreeSet<SlotId> = lists.message_runs.iter().copied().collect();
        for (mine, c_slot) in reader_commander_pairs(view, distributor) {
            if !message_runs.contains(&c_slot) {
                continue;
            }
            let Some(own) = view.own_slot(mine) else {
                continue;
            };
            let (Some(my_setting), Some(my_outcome)) = (own.setting, own.outcome) else {
                continue;
            };
            let Some(c_outcome) = view.announced(c_slot, Party::C) else {
                continue;
            };
            runs_used += 1;
            for (index, hypothesis) in Setting::ALL.into_iter().enumerate() {
                if forbidden_event(my_setting, hypothesis, my_outcome, c_outcome) {
                    violations[index] += 1;
                }
            }
        }
    }
    let [violations_u, violations_d] = violations;
    let k_min = view.params.k_min;
    let value = if runs_used == 0 {
        ReadValue::Unreadable(UnreadableReason::NoRuns)
    } else {
        match (violations_u == 0, violations_d == 0) {
            (true, true) => ReadValue::Unreadable(UnreadableReason::InsufficientEvidence),
            (false, false) => ReadValue::Unreadable(UnreadableReason::BothFalsified),
            (true, false) if violations_d >= k_min => ReadValue::Zero,
            (false, true) if violations_u >= k_min => ReadValue::One,
            _ => ReadValue::Unreadable(UnreadableReason::InsufficientEvidence),
        }
    };
    MessageReading {
        value,
        violations_u,
        violations_d,
        runs_used,
    }
}

/// The reader's `(own_slot, commander_slot)` pairs for one sub-protocol:
/// direct runs for the distributor itself, published swap links otherwise.
fn reader_commander_pairs(view: &PartyView, distributor: Party) -> Vec<(SlotId, SlotId)> {
    if view.role == distributor {
        let Some(knowledge) = &view.distribution else {
            return Vec::new();
        };
        knowledge
            .kinds
            .iter()
            .filter(|&&(_, kind)| kind == SlotKind::DirectToC)
            .map(|&(slot, _)| (slot, slot))
            .collect()
    } else {
        let Some(links) = view.links_for(distributor) else {
            return Vec::new();
        };
        let own: BTreeSet<SlotId> = view.own_slots.iter().map(|s| s.slot).collect();
        links
            .swapped
            .iter()
            .copied()
            .filter(|(peer_slot, _)| own.contains(peer_slot))
            .collect()
    }
}

/// One test run with both settings and both outcomes known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointRun {
    pub s1: Setting,
    pub o1: Outcome,
    pub s2: Setting,
    pub o2: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOutcome {
    Pass,
    Fail,
    Inconclusive,
}

/// Counts and decision of one pairwise Hardy test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub outcome: TestOutcome,
    pub runs_used: usize,
    pub n_uu: usize,
    pub n_ud: usize,
    pub n_du: usize,
    pub n_dd: usize,
    /// `(-,-)` events under `(D,D)`.
    pub violations_dd: usize,
    /// `(+,+)` events under `(D,U)`.
    pub violations_du: usize,
    /// `(+,+)` events under `(U,D)`.
    pub violations_ud: usize,
    /// `(+,+)` events under `(U,U)`, the Hardy probability cell.
    pub q_events: usize,
    pub q_hat: Option<f64>,
    pub q_interval: Option<(f64, f64)>,
}

/// Test joint data against the Hardy conditions.
///
/// Zero-condition violations are tolerated up to `epsilon` times the count
/// of the respective setting pair (`epsilon = 0` in the noiseless default:
/// one forbidden event fails). The positivity condition requires at least
/// one `(+,+|U,U)` event once `q_expected` predicts a comfortable number of
/// them. Fewer than `min_runs` runs are inconclusive.
pub fn hardy_test(
    runs: &[JointRun],
    epsilon: f64,
    min_runs: usize,
    q_expected: f64,
) -> HardyReport {
    let mut counts = [[0usize; 2]; 2];
    let mut violations = [0usize; 3];
    let mut q_events = 0usize;
    for run in runs {
        let si = |s: Setting| usize::from(s == Setting::D);
        counts[si(run.s1)][si(run.s2)] += 1;
        if forbidden_event(run.s1, run.s2, run.o1, run.o2) {
            match (run.s1, run.s2) {
                (Setting::D, Setting::D) => violations[0] += 1,
                (Setting::D, Setting::U) => violations[1] += 1,
                (Setting::U, Setting::D) => violations[2] += 1,
                (Setting::U, Setting::U) => unreachable!("no forbidden (U,U) event"),
            }
        }
        if run.s1 == Setting::U
            && run.s2 == Setting::U
            && run.o1 == Outcome::Plus
            && run.o2 == Outcome::Plus
        {
            q_events += 1;
        }
    }
    let [n_uu, n_ud, n_du, n_dd] = [counts[0][0], counts[0][1], counts[1][0], counts[1][1]];
    let (q_hat, q_interval) = if n_uu > 0 {
        (
            Some(q_events as f64 / n_uu as f64),
            Some(wilson_interval(q_events as u64, n_uu as u64, Z_99)),
        )
    } else {
        (None, None)
    };
    let outcome = if runs.len() < min_runs {
        TestOutcome::Inconclusive
    } else {
        let zeros_ok = violations[0] as f64 <= epsilon * n_dd as f64
            && violations[1] as f64 <= epsilon * n_du as f64
            && violations[2] as f64 <= epsilon * n_ud as f64;
        let q_ok = (q_expected * n_uu as f64) < Q_GUARD_EXPECTED || q_events >= 1;
        if zeros_ok && q_ok {
            TestOutcome::Pass
        } else {
            TestOutcome::Fail
        }
    };
    HardyReport {
        outcome,
        runs_used: runs.len(),
        n_uu,
        n_ud,
        n_du,
        n_dd,
        violations_dd: violations[0],
        violations_du: violations[1],
        violations_ud: violations[2],
        q_events,
        q_hat,
        q_interval,
    }
}

/// The three pair populations of one sub-protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Distributor-peer direct pairs.
    DirectPeer,
    /// Distributor-commander direct pairs.
    DirectC,
    /// Swapped peer-commander pairs.
    Swapped,
}

impl Population {
    pub const ALL: [Population; 3] = [
        Population::DirectPeer,
        Population::DirectC,
        Population::Swapped,
    ];

    pub fn involves_commander(self) -> bool {
        !matches!(self, Population::DirectPeer)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub distributor: Party,
    pub population: Population,
    pub report: HardyReport,
}

/// All six pairwise Hardy reports visible to the view's owner.
///
/// Test runs use the commander's disclosed settings; message runs reuse the
/// inferred uniform setting when the message was readable and are skipped
/// otherwise. Link structure comes from the owner's private knowledge for
/// its own sub-protocol and from the published links for the peer's.
pub fn pairwise_reports(view: &PartyView) -> Vec<ReportEntry> {
    let mut entries = Vec::new();
    for distributor in Party::DISTRIBUTORS {
        let peer = distributor.peer();
        let inferred = read_message(view, distributor)
            .value
            .bit()
            .map(Setting::for_bit);
        let (message_runs, test_runs) = match view.lists_for(distributor) {
            Some(lists) => (
                lists.message_runs.iter().copied().collect::<BTreeSet<_>>(),
                lists.test_runs.iter().copied().collect::<BTreeSet<_>>(),
            ),
            None => Default::default(),
        };
        let (direct, swapped) = link_structure(view, distributor);

        let setting_of = |slot: SlotId, party: Party| -> Option<Setting> {
            if party == view.role {
                view.own_slot(slot).and_then(|s| s.setting)
            } else {
                view.disclosed_setting(slot, party)
            }
        };
        let outcome_of = |slot: SlotId, party: Party| -> Option<Outcome> {
            if party == view.role {
                view.own_slot(slot).and_then(|s| s.outcome)
            } else {
                view.announced(slot, party)
            }
        };
        let c_setting = |slot: SlotId| -> Option<Setting> {
            if test_runs.contains(&slot) {
                setting_of(slot, Party::C)
            } else if message_runs.contains(&slot) {
                inferred
            } else {
                None
            }
        };

        for population in Population::ALL {
            let mut runs = Vec::new();
            match population {
                Population::DirectPeer => {
                    for &(slot, holder) in direct.iter().filter(|(_, h)| *h == peer) {
                        runs.extend((|| {
                            Some(JointRun {
                                s1: setting_of(slot, distributor)?,
                                o1: outcome_of(slot, distributor)?,
                                s2: setting_of(slot, holder)?,
                                o2: outcome_of(slot, holder)?,
                            })
                        })());
                    }
                }
                Population::DirectC => {
                    for &(slot, _) in direct.iter().filter(|(_, h)| *h == Party::C) {
                        runs.extend((|| {
                            Some(JointRun {
                                s1: setting_of(slot, distributor)?,
                                o1: outcome_of(slot, distributor)?,
                                s2: c_setting(slot)?,
                                o2: outcome_of(slot, Party::C)?,
                            })
                        })());
                    }
                }
                Population::Swapped => {
                    for &(peer_slot, c_slot) in &swapped {
                        runs.extend((|| {
                            Some(JointRun {
                                s1: setting_of(peer_slot, peer)?,
                                o1: outcome_of(peer_slot, peer)?,
                                s2: c_setting(c_slot)?,
                                o2: outcome_of(c_slot, Party::C)?,
                            })
                        })());
                    }
                }
            }
            entries.push(ReportEntry {
                distributor,
                population,
                report: hardy_test(
                    &runs,
                    view.params.epsilon,
                    view.params.min_runs,
                    view.params.q,
                ),
            });
        }
    }
    entries
}

/// Direct runs and swap links of one sub-protocol as the view's owner knows
/// them: ground truth for the distributor itself, published data otherwise.
fn link_structure(
    view: &PartyView,
    distributor: Party,
) -> (Vec<(SlotId, Party)>, Vec<(SlotId, SlotId)>) {
    if view.role == distributor {
        if let Some(knowledge) = &view.distribution {
            let direct = knowledge
                .kinds
                .iter()
                .filter_map(|&(slot, kind)| match kind {
                    SlotKind::DirectToPeer => Some((slot, distributor.peer())),
                    SlotKind::DirectToC => Some((slot, Party::C)),
                    _ => None,
                })
                .collect();
            return (direct, knowledge.true_links.clone());
        }
        return Default::default();
    }
    match view.links_for(distributor) {
        Some(links) => (links.direct.clone(), links.swapped.clone()),
        None => Default::default(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Act(u8),
    Abstain,
}

/// Supporting evidence behind a verdict. `m_own` is the order addressed to
/// the actor (read through the peer's sub-protocol); `m_peer` the order
/// addressed to the peer (read through the actor's own).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub m_own: ReadValue,
    pub m_peer: ReadValue,
    pub failed_reports: Vec<(Party, Population)>,
    pub inconclusive_reports: Vec<(Party, Population)>,
    pub confirmation_mismatch: bool,
    /// The accusation rests on the classical confirmation alone, so a faulty
    /// classical link is an alternative explanation.
    pub peer_link_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub actor: Party,
    pub action: Action,
    pub traitor: Option<Party>,
    pub evidence: Evidence,
}

/// Decide action and traitor for one lieutenant from its view alone.
///
/// Decision order: inconclusive data aborts; a failing report from the
/// peer's distribution convicts the peer (act on the own-distribution
/// reading); failing reports from the own distribution convict whoever all
/// of them involve; readable but unequal orders or an unreadable order
/// convict the commander (fall back to action 0); a contradicting classical
/// confirmation convicts the peer subject to a possible link fault; and a
/// clean round acts on the common order with no traitor.
pub fn verdict(view: &PartyView) -> Result<Verdict> {
    let actor = view.role;
    if actor == Party::C {
        return Err(Error::Config {
            reason: "the commander issues no verdict".into(),
        });
    }
    let peer = actor.peer();
    let m_own = read_message(view, peer);
    let m_peer = read_message(view, actor);
    let reports = pairwise_reports(view);

    let collect = |outcome: TestOutcome| -> Vec<(Party, Population)> {
        reports
            .iter()
            .filter(|e| e.report.outcome == outcome)
            .map(|e| (e.distributor, e.population))
            .collect()
    };
    let failed_reports = collect(TestOutcome::Fail);
    let inconclusive_reports = collect(TestOutcome::Inconclusive);
    let peer_failed = failed_reports.iter().any(|&(d, _)| d == peer);
    let own_failed = failed_reports.iter().any(|&(d, _)| d == actor);

    let peer_claim = view
        .confirmations
        .iter()
        .find(|c| c.from == peer)
        .and_then(|c| c.bit);
    let confirmation_mismatch = match (peer_claim, m_peer.value.bit()) {
        (Some(claimed), Some(read)) => claimed != read,
        _ => false,
    };

    let mut evidence = Evidence {
        m_own: m_own.value,
        m_peer: m_peer.value,
        failed_reports: failed_reports.clone(),
        inconclusive_reports,
        confirmation_mismatch,
        peer_link_fault: false,
    };

    let (action, traitor) = if !evidence.inconclusive_reports.is_empty() {
        (Action::Abstain, None)
    } else if peer_failed {
        (Action::Act(m_peer.value.bit().unwrap_or(0)), Some(peer))
    } else if own_failed {
        // Reachable only through lied announcements; attribute by who the
        // failing populations involve under the single-traitor assumption.
        let commander_only = failed_reports
            .iter()
            .filter(|&&(d, _)| d == actor)
            .all(|&(_, p)| p.involves_commander());
        if commander_only {
            (Action::Act(0), Some(Party::C))
        } else {
            (Action::Act(m_own.value.bit().unwrap_or(0)), Some(peer))
        }
    } else if let (Some(own_bit), Some(peer_bit)) = (m_own.value.bit(), m_peer.value.bit()) {
        if own_bit != peer_bit {
            (Action::Act(0), Some(Party::C))
        } else if confirmation_mismatch {
            evidence.peer_link_fault = true;
            (Action::Act(own_bit), Some(peer))
        } else {
            (Action::Act(own_bit), None)
        }
    } else {
        // At least one order unreadable while every Hardy test passed: the
        // commander mixed its message settings.
        (Action::Act(0), Some(Party::C))
    };

    Ok(Verdict {
        actor,
        action,
        traitor,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_test_counts_runs_by_setting_pair() {
        let runs: Vec<JointRun> = (0..20)
            .map(|i| JointRun {
                s1: if i % 2 == 0 { Setting::U } else { Setting::D },
                o1: Outcome::Plus,
                s2: if i % 4 < 2 { Setting::U } else { Setting::D },
                o2: if i % 2 == 0 { Outcome::Plus } else { Outcome::Minus },
            })
            .collect();
        let report = hardy_test(&runs, 0.0, 16, 0.09);
        assert_eq!(report.runs_used, 20);
        assert_eq!(report.n_uu + report.n_ud + report.n_du + report.n_dd, 20);
        let expected_ud = runs
            .iter()
            .filter(|r| {
                r.s1 == Setting::U
                    && r.s2 == Setting::D
                    && r.o1 == Outcome::Plus
                    && r.o2 == Outcome::Plus
            })
            .count();
        assert_eq!(report.violations_ud, expected_ud);
    }

    #[test]
    fn epsilon_zero_fails_on_a_single_violation() {
        let mut runs = vec![
            JointRun {
                s1: Setting::U,
                o1: Outcome::Plus,
                s2: Setting::U,
                o2: Outcome::Plus,
            };
            20
        ];
        runs.push(JointRun {
            s1: Setting::D,
            o1: Outcome::Minus,
            s2: Setting::D,
            o2: Outcome::Minus,
        });
        let report = hardy_test(&runs, 0.0, 16, 0.09);
        assert_eq!(report.outcome, TestOutcome::Fail);
        assert_eq!(report.violations_dd, 1);
    }

    #[test]
    fn below_min_runs_is_inconclusive() {
        let runs = vec![
            JointRun {
                s1: Setting::U,
                o1: Outcome::Plus,
                s2: Setting::U,
                o2: Outcome::Minus,
            };
            3
        ];
        let report = hardy_test(&runs, 0.0, 16, 0.09);
        assert_eq!(report.outcome, TestOutcome::Inconclusive);
    }

    #[test]
    fn q_guard_requires_events_only_when_expected() {
        // 100 (U,U) runs without a single (+,+) at q = 0.2: expected 20, fail.
        let runs = vec![
            JointRun {
                s1: Setting::U,
                o1: Outcome::Plus,
                s2: Setting::U,
                o2: Outcome::Minus,
            };
            100
        ];
        assert_eq!(hardy_test(&runs, 0.0, 16, 0.2).outcome, TestOutcome::Fail);
        // Same data at q = 0.05: expected 5 < 10, the guard stays inert.
        assert_eq!(hardy_test(&runs, 0.0, 16, 0.05).outcome, TestOutcome::Pass);
    }
}
