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

//! Per-party knowledge extraction.
//!
//! [`PartyView`] is the single channel through which strategies and the
//! verification layer see a protocol round. It is derived from the ground
//! truth by [`derive_view`], which copies exactly what the party has
//! legitimately learned by the given phase: its own slots and measurement
//! records, the public transcript events, and (only for a distributor)
//! the slot kinds and true links of its own sub-protocol. Non-distributor
//! views carry no linkage information before revelation; the test suite
//! checks they stay byte-identical when the hidden pairing is relabelled.

use serde::{Deserialize, Serialize};

use super::ledger::RunLedger;
use super::transcript::{Event, Transcript};
use super::types::{Designation, Party, Phase, SlotId, SlotKind};
use crate::hardy::Setting;
use crate::qcore::Outcome;

/// Public protocol parameters every party knows; sufficient to recompute
/// readings, reports and verdicts from a view alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub alpha: f64,
    /// Analytic nonzero Hardy probability for this alpha.
    pub q: f64,
    pub epsilon: f64,
    pub k_min: usize,
    pub min_runs: usize,
    pub message_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OwnSlotView {
    pub slot: SlotId,
    /// Which sub-protocol (distributor) the slot belongs to.
    pub distributor: Party,
    pub discarded: bool,
    pub setting: Option<Setting>,
    pub outcome: Option<Outcome>,
}

/// What only the distributor of a sub-protocol knows before revelation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributorKnowledge {
    pub kinds: Vec<(SlotId, SlotKind)>,
    /// True swap links `(peer_slot, commander_slot)`.
    pub true_links: Vec<(SlotId, SlotId)>,
    pub r1: Vec<SlotId>,
    pub r2: Vec<SlotId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscardsView {
    pub distributor: Party,
    pub r3: Vec<SlotId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnouncementView {
    pub slot: SlotId,
    pub party: Party,
    pub outcome: Outcome,
    pub position: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListsView {
    pub distributor: Party,
    pub message_runs: Vec<SlotId>,
    pub test_runs: Vec<SlotId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinksView {
    pub distributor: Party,
    pub direct: Vec<(SlotId, Party)>,
    pub swapped: Vec<(SlotId, SlotId)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingsView {
    pub party: Party,
    pub settings: Vec<(SlotId, Setting)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfirmationView {
    pub from: Party,
    pub bit: Option<u8>,
}

/// Everything one party legitimately knows at a given phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyView {
    pub role: Party,
    pub phase: Phase,
    pub params: VerifyParams,
    pub own_slots: Vec<OwnSlotView>,
    /// Commander only: the order bit and the per-slot plan.
    pub message_bit: Option<u8>,
    pub designations: Vec<(SlotId, Designation)>,
    /// Distributors only: private knowledge about their own sub-protocol.
    pub distribution: Option<DistributorKnowledge>,
    pub discards: Vec<DiscardsView>,
    pub announcements: Vec<AnnouncementView>,
    pub lists: Vec<ListsView>,
    pub links: Vec<LinksView>,
    pub disclosed_settings: Vec<SettingsView>,
    pub confirmations: Vec<ConfirmationView>,
}

impl PartyView {
    pub fn lists_for(&self, distributor: Party) -> Option<&ListsView> {
        self.lists.iter().find(|l| l.distributor == distributor)
    }

    pub fn links_for(&self, distributor: Party) -> Option<&LinksView> {
        self.links.iter().find(|l| l.distributor == distributor)
    }

    pub fn own_slot(&self, slot: SlotId) -> Option<&OwnSlotView> {
        self.own_slots.iter().find(|s| s.slot == slot)
    }

    /// The announced outcome of `party` for `slot`, if any.
    pub fn announced(&self, slot: SlotId, party: Party) -> Option<Outcome> {
        self.announcements
            .iter()
            .find(|a| a.slot == slot && a.party == party)
            .map(|a| a.outcome)
    }

    /// Disclosed setting of another party for one slot.
    pub fn disclosed_setting(&self, slot: SlotId, party: Party) -> Option<Setting> {
        self.disclosed_settings
            .iter()
            .filter(|s| s.party == party)
            .flat_map(|s| s.settings.iter())
            .find(|(id, _)| *id == slot)
            .map(|(_, setting)| *setting)
    }
}

/// The commander's private plan for one round.
#[derive(Clone, Debug, Default)]
pub struct CommanderPlan {
    pub message_bit: u8,
    /// `(slot, designation)` for every surviving commander slot, ascending.
    pub designations: Vec<(SlotId, Designation)>,
}

/// Extract `party`'s view of the round at `phase`.
///
/// Pure function of the ground truth; the engine calls it at phase
/// boundaries and strategies receive nothing else.
pub fn derive_view(
    party: Party,
    params: VerifyParams,
    ledgers: &[RunLedger],
    plan: Option<&CommanderPlan>,
    transcript: &Transcript,
    phase: Phase,
) -> PartyView {
    let mut view = PartyView {
        role: party,
        phase,
        params,
        own_slots: Vec::new(),
        message_bit: None,
        designations: Vec::new(),
        distribution: None,
        discards: Vec::new(),
        announcements: Vec::new(),
        lists: Vec::new(),
        links: Vec::new(),
        disclosed_settings: Vec::new(),
        confirmations: Vec::new(),
    };
    if phase < Phase::Distributed {
        return view;
    }

    // Own qubits: the holder side of received runs plus, for a distributor,
    // its own halves of direct runs. Settings and outcomes appear only once
    // the respective phases have happened.
    for ledger in ledgers {
        for rec in &ledger.slots {
            if rec.holder == party {
                view.own_slots.push(OwnSlotView {
                    slot: rec.slot_id,
                    distributor: rec.distributor,
                    discarded: rec.kind == SlotKind::Discarded,
                    setting: rec.holder_setting.filter(|_| phase >= Phase::SettingsChosen),
                    outcome: rec.holder_outcome.filter(|_| phase >= Phase::Announced),
                });
            }
            if rec.distributor == party && rec.kind.is_direct() {
                view.own_slots.push(OwnSlotView {
                    slot: rec.slot_id,
                    distributor: rec.distributor,
                    discarded: false,
                    setting: rec.dist_setting.filter(|_| phase >= Phase::SettingsChosen),
                    outcome: rec.dist_outcome.filter(|_| phase >= Phase::Announced),
                });
            }
        }
        if ledger.distributor == party {
            view.distribution = Some(DistributorKnowledge {
                kinds: ledger
                    .slots
                    .iter()
                    .map(|s| (s.slot_id, s.kind))
                    .collect(),
                true_links: ledger.true_swap_links(),
                r1: ledger.r1.clone(),
                r2: ledger.r2.clone(),
            });
        }
    }
    view.own_slots.sort_by_key(|s| s.slot);

    if party == Party::C && phase >= Phase::SettingsChosen {
        if let Some(plan) = plan {
            view.message_bit = Some(plan.message_bit);
            view.designations = plan.designations.clone();
        }
    }

    for event in &transcript.events {
        match event {
            Event::Meta { .. } => {}
            Event::Discards { distributor, r3 } => view.discards.push(DiscardsView {
                distributor: *distributor,
                r3: r3.clone(),
            }),
            Event::Announcement {
                slot,
                party: announcer,
                outcome,
                position,
            } => view.announcements.push(AnnouncementView {
                slot: *slot,
                party: *announcer,
                outcome: *outcome,
                position: *position,
            }),
            Event::Lists {
                distributor,
                message_runs,
                test_runs,
            } => view.lists.push(ListsView {
                distributor: *distributor,
                message_runs: message_runs.clone(),
                test_runs: test_runs.clone(),
            }),
            Event::Links {
                distributor,
                direct,
                swapped,
            } => view.links.push(LinksView {
                distributor: *distributor,
                direct: direct.clone(),
                swapped: swapped.clone(),
            }),
            Event::Settings {
                party: discloser,
                settings,
            } => view.disclosed_settings.push(SettingsView {
                party: *discloser,
                settings: settings.clone(),
            }),
            Event::Confirmation { from, to, bit } => {
                if *to == party {
                    view.confirmations.push(ConfirmationView {
                        from: *from,
                        bit: *bit,
                    });
                }
            }
        }
    }
    view
}
