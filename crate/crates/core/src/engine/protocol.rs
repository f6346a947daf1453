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

//! The protocol state machine.
//!
//! One round consists of two symmetric sub-protocols (distributor `A`
//! carrying the order for `B`, distributor `B` carrying the order for `A`),
//! executed through strictly ordered phases: distribution with
//! post-selection, setting choice, the announcement phase (results only, in
//! random per-run order, with phony results on consumed swap halves), list
//! disclosure, link revelation, setting disclosure for verification, and
//! classical confirmations. Calling a phase out of order is a protocol
//! abort. A full round is a pure function of its configuration, seed
//! included.

use rand::Rng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ledger::{RunLedger, distribute};
use super::transcript::{AuditRecord, Event, TRANSCRIPT_SCHEMA_VERSION, Transcript};
use super::types::{Designation, Party, Phase, SlotId};
use super::view::{CommanderPlan, PartyView, VerifyParams, derive_view};
use crate::adversary::{Scenario, StrategySet};
use crate::hardy::{HardyModel, ObservablePair, Setting, q_value};
use crate::qcore::{Outcome, measure_local};
use crate::verify::{MessageReading, ReportEntry, Verdict, pairwise_reports, read_message, verdict};
use crate::{Error, Result};

/// Full configuration of one protocol round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// The resource parameter N; each distributor shares 6N copies with
    /// each neighbour.
    pub n: usize,
    /// Real observable overlap `<u|d>`, identical for all parties.
    pub alpha: f64,
    /// The commander's order.
    pub message_bit: u8,
    /// Fraction of commander slots measured in the message basis.
    pub message_fraction: f64,
    /// Bit-flip probability of the classical confirmation channel.
    pub flip_prob: f64,
    /// Tolerated violation fraction in Hardy tests.
    pub epsilon: f64,
    /// Violations needed to falsify a message-basis hypothesis.
    pub k_min: usize,
    /// Minimum runs for a conclusive Hardy test.
    pub min_runs: usize,
    pub seed: u64,
    pub scenario: Scenario,
    /// Fraction of swaps tampered by a basis-flipping distributor
    /// (exploration knob; the named scenarios use 1.0).
    pub chi_fraction: f64,
}

impl ProtocolConfig {
    pub fn new(scenario: Scenario) -> Self {
        ProtocolConfig {
            n: 256,
            alpha: crate::hardy::optimal_alpha(),
            message_bit: 0,
            message_fraction: 0.75,
            flip_prob: 0.0,
            epsilon: 0.0,
            k_min: 1,
            min_runs: 16,
            seed: 0,
            scenario,
            chi_fraction: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::Config {
                reason: format!("n = {} below the statistical minimum of 8", self.n),
            });
        }
        if self.message_bit > 1 {
            return Err(Error::Config {
                reason: format!("message bit {} is not 0 or 1", self.message_bit),
            });
        }
        if !(self.message_fraction > 0.0 && self.message_fraction < 1.0) {
            return Err(Error::InvalidFraction {
                value: self.message_fraction,
            });
        }
        for (value, what) in [
            (self.flip_prob, "flip_prob"),
            (self.epsilon, "epsilon"),
            (self.chi_fraction, "chi_fraction"),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { value, what });
            }
        }
        if self.k_min == 0 || self.min_runs == 0 {
            return Err(Error::Config {
                reason: "k_min and min_runs must be at least 1".into(),
            });
        }
        ObservablePair::from_alpha_real(self.alpha)?;
        Ok(())
    }

    fn verify_params(&self, model: &HardyModel) -> VerifyParams {
        VerifyParams {
            alpha: self.alpha,
            q: model.q(),
            epsilon: self.epsilon,
            k_min: self.k_min,
            min_runs: self.min_runs,
            message_fraction: self.message_fraction,
        }
    }
}

/// A per-slot setting choice with the commander's designation when present.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingChoice {
    pub slot: SlotId,
    pub designation: Option<Designation>,
    pub setting: Setting,
}

/// Honest default settings for one party's surviving slots.
///
/// Lieutenants draw independent uniform test settings. The commander draws
/// a message/test designation per slot (message with probability
/// `message_fraction`), measures message slots in the basis encoding
/// `message_bit` and test slots uniformly. `message_bit` must be present
/// exactly for the commander.
pub fn choose_settings(
    view: &PartyView,
    message_bit: Option<u8>,
    message_fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<SettingChoice>> {
    if !(message_fraction > 0.0 && message_fraction < 1.0) {
        return Err(Error::InvalidFraction {
            value: message_fraction,
        });
    }
    if (view.role == Party::C) != message_bit.is_some() {
        return Err(Error::Config {
            reason: "message_bit must be supplied for the commander and only for it".into(),
        });
    }
    let uniform = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            Setting::U
        } else {
            Setting::D
        }
    };
    let mut choices = Vec::new();
    for slot in view.own_slots.iter().filter(|s| !s.discarded) {
        let choice = match message_bit {
            Some(bit) => {
                if rng.random_bool(message_fraction) {
                    SettingChoice {
                        slot: slot.slot,
                        designation: Some(Designation::Message),
                        setting: Setting::for_bit(bit),
                    }
                } else {
                    SettingChoice {
                        slot: slot.slot,
                        designation: Some(Designation::Test),
                        setting: uniform(rng),
                    }
                }
            }
            None => SettingChoice {
                slot: slot.slot,
                designation: None,
                setting: uniform(rng),
            },
        };
        choices.push(choice);
    }
    Ok(choices)
}

/// Final views of all three parties, kept as plain fields so serialization
/// is stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyViews {
    pub a: PartyView,
    pub b: PartyView,
    pub c: PartyView,
}

impl PartyViews {
    pub fn get(&self, party: Party) -> &PartyView {
        match party {
            Party::A => &self.a,
            Party::B => &self.b,
            Party::C => &self.c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadingEntry {
    pub reader: Party,
    pub distributor: Party,
    pub reading: MessageReading,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActorReports {
    pub actor: Party,
    pub entries: Vec<ReportEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub a: Verdict,
    pub b: Verdict,
}

/// Everything one completed round produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub transcript: Transcript,
    pub views: PartyViews,
    pub readings: Vec<ReadingEntry>,
    pub reports: Vec<ActorReports>,
    pub verdicts: Verdicts,
}

impl ProtocolOutcome {
    pub fn reading(&self, reader: Party, distributor: Party) -> &MessageReading {
        &self
            .readings
            .iter()
            .find(|r| r.reader == reader && r.distributor == distributor)
            .expect("all four readings are computed")
            .reading
    }
}

/// One protocol round, driven phase by phase.
pub struct ProtocolInstance {
    config: ProtocolConfig,
    model: HardyModel,
    params: VerifyParams,
    strategies: StrategySet,
    rng: ChaCha8Rng,
    phase: Phase,
    ledgers: Vec<RunLedger>,
    plan: Option<CommanderPlan>,
    transcript: Transcript,
    readings: Vec<ReadingEntry>,
}

impl ProtocolInstance {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        let strategies = config.scenario.strategies(config.chi_fraction);
        Self::with_strategies(config, strategies)
    }

    /// Custom strategy assignment; the door for experimental (e.g.
    /// multi-traitor) setups that the named scenarios do not cover.
    pub fn with_strategies(config: ProtocolConfig, strategies: StrategySet) -> Result<Self> {
        config.validate()?;
        let pair = ObservablePair::from_alpha_real(config.alpha)?;
        let model = HardyModel::build(pair, pair)?;
        debug_assert!((model.q() - q_value(&pair, &pair)).abs() < 1e-12);
        let params = config.verify_params(&model);
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let transcript = Transcript {
            events: vec![Event::Meta {
                schema_version: TRANSCRIPT_SCHEMA_VERSION,
                n: config.n,
                alpha: config.alpha,
                message_fraction: config.message_fraction,
                flip_prob: config.flip_prob,
                epsilon: config.epsilon,
                k_min: config.k_min,
                min_runs: config.min_runs,
                seed: config.seed,
                scenario: config.scenario.name().to_string(),
            }],
            audit: AuditRecord {
                message_bit: Some(config.message_bit),
                ..AuditRecord::default()
            },
        };
        Ok(ProtocolInstance {
            config,
            model,
            params,
            strategies,
            rng,
            phase: Phase::Configured,
            ledgers: Vec::new(),
            plan: None,
            transcript,
            readings: Vec::new(),
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn model(&self) -> &HardyModel {
        &self.model
    }

    pub fn ledgers(&self) -> &[RunLedger] {
        &self.ledgers
    }

    pub fn ledgers_mut(&mut self) -> &mut [RunLedger] {
        &mut self.ledgers
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// Derive `party`'s view at the current phase.
    pub fn view(&self, party: Party) -> PartyView {
        derive_view(
            party,
            self.params,
            &self.ledgers,
            self.plan.as_ref(),
            &self.transcript,
            self.phase,
        )
    }

    fn expect_phase(&self, wanted: Phase, action: &'static str) -> Result<()> {
        if self.phase != wanted {
            return Err(Error::PhaseOrder {
                action,
                phase: self.phase.name(),
            });
        }
        Ok(())
    }

    /// S1 for both distributors: conversion, swapping, discard lists.
    pub fn distribute_resources(&mut self) -> Result<()> {
        self.expect_phase(Phase::Configured, "distribute resources")?;
        let n = self.config.n;
        for (index, distributor) in Party::DISTRIBUTORS.into_iter().enumerate() {
            let dist_view = self.view(distributor);
            let strategy = self.strategies.get(distributor);
            let mut tamper = |swap_index: usize, rng: &mut ChaCha8Rng| {
                strategy.swap_choice(&dist_view, swap_index, rng)
            };
            let ledger = distribute(
                distributor,
                n,
                index * 12 * n,
                &self.model,
                &mut tamper,
                &mut self.rng,
            )?;
            self.transcript.events.push(Event::Discards {
                distributor,
                r3: ledger.r3.clone(),
            });
            for pair in ledger.hardy_pairs.iter().filter(|p| p.swapped) {
                self.transcript
                    .audit
                    .true_links
                    .push((distributor, pair.slots.0, pair.slots.1));
                if pair.tampered {
                    self.transcript
                        .audit
                        .tampered_swaps
                        .push((distributor, pair.slots.0, pair.slots.1));
                }
            }
            self.ledgers.push(ledger);
        }
        self.phase = Phase::Distributed;
        Ok(())
    }

    /// S2 entry: every party fixes a setting per surviving slot; the
    /// commander also fixes its message/test plan.
    pub fn choose_all_settings(&mut self) -> Result<()> {
        self.expect_phase(Phase::Distributed, "choose settings")?;
        for party in [Party::A, Party::B, Party::C] {
            let view = self.view(party);
            let message_bit = (party == Party::C).then_some(self.config.message_bit);
            let defaults = choose_settings(
                &view,
                message_bit,
                self.config.message_fraction,
                &mut self.rng,
            )?;
            if party == Party::C {
                self.plan = Some(CommanderPlan {
                    message_bit: self.config.message_bit,
                    designations: defaults
                        .iter()
                        .map(|c| (c.slot, c.designation.expect("commander slots are designated")))
                        .collect(),
                });
            }
            let strategy = self.strategies.get(party);
            for choice in defaults {
                let ledger = self.ledger_index(choice.slot);
                let distributor = self.ledgers[ledger].distributor;
                let setting = strategy.choose_setting(
                    &view,
                    choice.slot,
                    distributor,
                    choice.designation,
                    choice.setting,
                    &mut self.rng,
                );
                let rec = self.ledgers[ledger].slot_mut(choice.slot);
                if rec.holder == party {
                    rec.holder_setting = Some(setting);
                } else {
                    debug_assert_eq!(rec.distributor, party);
                    rec.dist_setting = Some(setting);
                }
            }
        }
        self.phase = Phase::SettingsChosen;
        Ok(())
    }

    fn ledger_index(&self, slot: SlotId) -> usize {
        self.ledgers
            .iter()
            .position(|l| l.contains(slot))
            .expect("slot belongs to a ledger")
    }

    /// S2 proper: runs processed in random global order; within each run the
    /// holders announce in random order, the distributor announcing phony
    /// outcomes for its consumed swap halves.
    pub fn measurement_phase(&mut self) -> Result<()> {
        self.expect_phase(Phase::SettingsChosen, "announce outcomes")?;
        let views = PartyViews {
            a: self.view(Party::A),
            b: self.view(Party::B),
            c: self.view(Party::C),
        };
        let mut order: Vec<SlotId> = self
            .ledgers
            .iter()
            .flat_map(|l| l.survivors().collect::<Vec<_>>())
            .collect();
        order.shuffle(&mut self.rng);

        for slot in order {
            let ledger = self.ledger_index(slot);
            let (distributor, holder, kind) = {
                let rec = self.ledgers[ledger].slot(slot);
                (rec.distributor, rec.holder, rec.kind)
            };
            let distributor_first = self.rng.random_bool(0.5);
            let sequence = if distributor_first {
                [distributor, holder]
            } else {
                [holder, distributor]
            };
            for (position, party) in sequence.into_iter().enumerate() {
                let outcome = if party == holder || kind.is_direct() {
                    self.measure(ledger, slot, party)?
                } else {
                    // Consumed swap half: phony result, uniform at random.
                    self.transcript.audit.phony.push((slot, party));
                    if self.rng.random_bool(0.5) {
                        Outcome::Plus
                    } else {
                        Outcome::Minus
                    }
                };
                let announced = self.strategies.get(party).announced_outcome(
                    views.get(party),
                    slot,
                    outcome,
                    &mut self.rng,
                );
                self.transcript.events.push(Event::Announcement {
                    slot,
                    party,
                    outcome: announced,
                    position: position as u8,
                });
            }
        }
        self.phase = Phase::Announced;
        Ok(())
    }

    fn measure(&mut self, ledger: usize, slot: SlotId, party: Party) -> Result<Outcome> {
        let pair_index = self.ledgers[ledger]
            .slot(slot)
            .pair_index
            .expect("surviving slots carry a pair");
        let side = {
            let pair = &self.ledgers[ledger].hardy_pairs[pair_index];
            if pair.parties.0 == party { 0 } else { 1 }
        };
        let rec = self.ledgers[ledger].slot(slot);
        let setting = if rec.holder == party {
            rec.holder_setting
        } else {
            rec.dist_setting
        }
        .expect("settings chosen before measurement");
        let basis = self.model.basis(side, setting);
        let pair = &mut self.ledgers[ledger].hardy_pairs[pair_index];
        let (outcome, post, _) = measure_local(&pair.state, side, &basis, &mut self.rng)?;
        pair.state = post;
        let rec = self.ledgers[ledger].slot_mut(slot);
        if rec.holder == party {
            rec.holder_outcome = Some(outcome);
        } else {
            rec.dist_outcome = Some(outcome);
        }
        Ok(outcome)
    }

    /// S2 end and S3: the commander's lists, then each distributor's link
    /// publication. Rejected unless every announcement is already public.
    pub fn disclose_lists_and_links(&mut self) -> Result<()> {
        self.expect_phase(Phase::Announced, "reveal lists and links")?;
        let plan = self.plan.as_ref().expect("plan fixed at setting choice");
        for ledger in &self.ledgers {
            let mut message_runs = Vec::new();
            let mut test_runs = Vec::new();
            for &(slot, designation) in &plan.designations {
                if !ledger.contains(slot) {
                    continue;
                }
                match designation {
                    Designation::Message => message_runs.push(slot),
                    Designation::Test => test_runs.push(slot),
                }
            }
            self.transcript.events.push(Event::Lists {
                distributor: ledger.distributor,
                message_runs,
                test_runs,
            });
        }
        self.phase = Phase::ListsDisclosed;

        for index in 0..self.ledgers.len() {
            let distributor = self.ledgers[index].distributor;
            let view = self.view(distributor);
            let true_links = self.ledgers[index].true_swap_links();
            let published = self.strategies.get(distributor).publish_links(
                &view,
                &true_links,
                &mut self.rng,
            );
            validate_link_structure(&true_links, &published)?;
            for &(peer_slot, c_slot) in &published {
                self.ledgers[index].slot_mut(peer_slot).linked_slot = Some(c_slot);
                self.ledgers[index].slot_mut(c_slot).linked_slot = Some(peer_slot);
            }
            self.transcript.events.push(Event::Links {
                distributor,
                direct: self.ledgers[index].direct_runs(),
                swapped: published,
            });
        }
        self.phase = Phase::LinksRevealed;
        Ok(())
    }

    /// S4 support: settings disclosed for verification. Lieutenants reveal
    /// all of theirs, the commander only the test-run ones.
    pub fn disclose_settings(&mut self) -> Result<()> {
        self.expect_phase(Phase::LinksRevealed, "disclose settings")?;
        for party in [Party::A, Party::B, Party::C] {
            let mut settings: Vec<(SlotId, Setting)> = Vec::new();
            for ledger in &self.ledgers {
                for rec in &ledger.slots {
                    if rec.holder == party {
                        if let Some(setting) = rec.holder_setting {
                            if party != Party::C || self.is_test_slot(rec.slot_id) {
                                settings.push((rec.slot_id, setting));
                            }
                        }
                    }
                    if rec.distributor == party {
                        if let Some(setting) = rec.dist_setting {
                            settings.push((rec.slot_id, setting));
                        }
                    }
                }
            }
            settings.sort_by_key(|&(slot, _)| slot);
            self.transcript.events.push(Event::Settings { party, settings });
        }
        self.phase = Phase::SettingsDisclosed;
        Ok(())
    }

    fn is_test_slot(&self, slot: SlotId) -> bool {
        self.plan
            .as_ref()
            .map(|plan| {
                plan.designations
                    .binary_search_by_key(&slot, |&(s, _)| s)
                    .map(|i| plan.designations[i].1 == Designation::Test)
                    .unwrap_or(false)
            })
            .unwrap_or(false)
    }

    /// Readings plus the classical confirmation exchange between the
    /// lieutenants, including the optional bit-flip channel.
    pub fn exchange_confirmations(&mut self) -> Result<()> {
        self.expect_phase(Phase::SettingsDisclosed, "exchange confirmations")?;
        let views = PartyViews {
            a: self.view(Party::A),
            b: self.view(Party::B),
            c: self.view(Party::C),
        };
        for reader in Party::DISTRIBUTORS {
            for distributor in Party::DISTRIBUTORS {
                self.readings.push(ReadingEntry {
                    reader,
                    distributor,
                    reading: read_message(views.get(reader), distributor),
                });
            }
        }
        for sender in Party::DISTRIBUTORS {
            let receiver = sender.peer();
            // The sender claims the order addressed to it, which travelled
            // through the peer's sub-protocol.
            let honest = self
                .readings
                .iter()
                .find(|r| r.reader == sender && r.distributor == receiver)
                .and_then(|r| r.reading.value.bit());
            let claimed = self.strategies.get(sender).confirmation_bit(
                views.get(sender),
                honest,
                &mut self.rng,
            );
            self.transcript
                .audit
                .claimed_confirmations
                .push((sender, receiver, claimed));
            let delivered = claimed.map(|bit| {
                if self.rng.random_bool(self.config.flip_prob) {
                    1 - bit
                } else {
                    bit
                }
            });
            self.transcript.events.push(Event::Confirmation {
                from: sender,
                to: receiver,
                bit: delivered,
            });
        }
        self.phase = Phase::Confirmed;
        Ok(())
    }

    /// Final views, pairwise Hardy reports and both lieutenants' verdicts.
    pub fn finalize(mut self) -> Result<ProtocolOutcome> {
        self.expect_phase(Phase::Confirmed, "finalize")?;
        self.phase = Phase::Complete;
        let views = PartyViews {
            a: self.view(Party::A),
            b: self.view(Party::B),
            c: self.view(Party::C),
        };
        let reports = Party::DISTRIBUTORS
            .into_iter()
            .map(|actor| ActorReports {
                actor,
                entries: pairwise_reports(views.get(actor)),
            })
            .collect();
        let verdicts = Verdicts {
            a: verdict(&views.a)?,
            b: verdict(&views.b)?,
        };
        Ok(ProtocolOutcome {
            transcript: self.transcript,
            views,
            readings: self.readings,
            reports,
            verdicts,
        })
    }
}

fn validate_link_structure(
    true_links: &[(SlotId, SlotId)],
    published: &[(SlotId, SlotId)],
) -> Result<()> {
    let mut expected: (Vec<SlotId>, Vec<SlotId>) = true_links.iter().copied().unzip();
    let mut got: (Vec<SlotId>, Vec<SlotId>) = published.iter().copied().unzip();
    expected.0.sort_unstable();
    expected.1.sort_unstable();
    got.0.sort_unstable();
    got.1.sort_unstable();
    if expected != got {
        return Err(Error::Config {
            reason: "published links must pair the true slot sets".into(),
        });
    }
    Ok(())
}

/// Run one full round: S1 through S5 plus verification and verdicts.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolOutcome> {
    let instance = ProtocolInstance::new(config.clone())?;
    drive(instance)
}

/// Same, with a caller-supplied strategy assignment.
pub fn run_protocol_with(
    config: &ProtocolConfig,
    strategies: StrategySet,
) -> Result<ProtocolOutcome> {
    let instance = ProtocolInstance::with_strategies(config.clone(), strategies)?;
    drive(instance)
}

fn drive(mut instance: ProtocolInstance) -> Result<ProtocolOutcome> {
    instance.distribute_resources()?;
    instance.choose_all_settings()?;
    instance.measurement_phase()?;
    instance.disclose_lists_and_links()?;
    instance.disclose_settings()?;
    instance.exchange_confirmations()?;
    instance.finalize()
}
