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

//! Re-verification of a stored transcript.
//!
//! The lieutenants' views are reconstructed from the public record (their
//! own outcomes equal their announcements, their settings were disclosed),
//! plus the audit appendix for distributor-private knowledge where present.
//! Readings and verdicts are then recomputed exactly as during the live
//! round, so honest rounds replay bit-for-bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::protocol::{ReadingEntry, Verdicts};
use super::transcript::{Event, Transcript};
use super::types::{Party, Phase, SlotId, SlotKind};
use super::view::{
    AnnouncementView, ConfirmationView, DiscardsView, DistributorKnowledge, LinksView, ListsView,
    OwnSlotView, PartyView, SettingsView, VerifyParams,
};
use crate::hardy::{HardyModel, ObservablePair};
use crate::verify::{read_message, verdict};
use crate::{Error, Result};

/// What a replayed transcript yields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplaySummary {
    pub scenario: String,
    pub seed: u64,
    pub readings: Vec<ReadingEntry>,
    pub verdicts: Verdicts,
}

/// Recompute readings and verdicts from a stored transcript.
pub fn replay_transcript(transcript: &Transcript) -> Result<ReplaySummary> {
    transcript.check_ordering()?;
    let Some(Event::Meta {
        n,
        alpha,
        message_fraction,
        epsilon,
        k_min,
        min_runs,
        seed,
        scenario,
        ..
    }) = transcript.meta()
    else {
        return Err(Error::Replay {
            reason: "transcript lacks a meta record".into(),
        });
    };
    let pair = ObservablePair::from_alpha_real(*alpha)?;
    let model = HardyModel::build(pair, pair)?;
    let params = VerifyParams {
        alpha: *alpha,
        q: model.q(),
        epsilon: *epsilon,
        k_min: *k_min,
        min_runs: *min_runs,
        message_fraction: *message_fraction,
    };

    let view_a = reconstruct_view(Party::A, params, *n, transcript);
    let view_b = reconstruct_view(Party::B, params, *n, transcript);

    let mut readings = Vec::new();
    for (reader, view) in [(Party::A, &view_a), (Party::B, &view_b)] {
        for distributor in Party::DISTRIBUTORS {
            readings.push(ReadingEntry {
                reader,
                distributor,
                reading: read_message(view, distributor),
            });
        }
    }
    let verdicts = Verdicts {
        a: verdict(&view_a)?,
        b: verdict(&view_b)?,
    };
    Ok(ReplaySummary {
        scenario: scenario.clone(),
        seed: *seed,
        readings,
        verdicts,
    })
}

/// Rebuild one lieutenant's final view from the public record.
fn reconstruct_view(party: Party, params: VerifyParams, n: usize, transcript: &Transcript) -> PartyView {
    let sub_of = |slot: SlotId| -> Party {
        if slot < 12 * n { Party::A } else { Party::B }
    };
    let mut own: BTreeMap<SlotId, OwnSlotView> = BTreeMap::new();
    let mut view = PartyView {
        role: party,
        phase: Phase::Confirmed,
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
            } => {
                view.announcements.push(AnnouncementView {
                    slot: *slot,
                    party: *announcer,
                    outcome: *outcome,
                    position: *position,
                });
                if *announcer == party {
                    own.entry(*slot)
                        .or_insert_with(|| OwnSlotView {
                            slot: *slot,
                            distributor: sub_of(*slot),
                            discarded: false,
                            setting: None,
                            outcome: None,
                        })
                        .outcome = Some(*outcome);
                }
            }
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
            } => {
                view.disclosed_settings.push(SettingsView {
                    party: *discloser,
                    settings: settings.clone(),
                });
                if *discloser == party {
                    for &(slot, setting) in settings {
                        own.entry(slot)
                            .or_insert_with(|| OwnSlotView {
                                slot,
                                distributor: sub_of(slot),
                                discarded: false,
                                setting: None,
                                outcome: None,
                            })
                            .setting = Some(setting);
                    }
                }
            }
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

    // A distributor's own announcements include phony values on consumed
    // swap halves; drop those pseudo-slots where the audit identifies them.
    for &(slot, phony_party) in &transcript.audit.phony {
        if phony_party == party {
            own.remove(&slot);
        }
    }
    view.own_slots = own.into_values().collect();

    // Distributor-private knowledge: direct kinds from the published link
    // map (truthful in every modelled attack), true swap links from the
    // audit appendix when present, the published ones otherwise.
    if let Some(links) = view.links.iter().find(|l| l.distributor == party) {
        let mut kinds: Vec<(SlotId, SlotKind)> = links
            .direct
            .iter()
            .map(|&(slot, holder)| {
                let kind = if holder == Party::C {
                    SlotKind::DirectToC
                } else {
                    SlotKind::DirectToPeer
                };
                (slot, kind)
            })
            .collect();
        for &(peer_slot, c_slot) in &links.swapped {
            kinds.push((peer_slot, SlotKind::SwapHalf));
            kinds.push((c_slot, SlotKind::SwapHalf));
        }
        kinds.sort_by_key(|&(slot, _)| slot);
        let audited: Vec<(SlotId, SlotId)> = transcript
            .audit
            .true_links
            .iter()
            .filter(|&&(d, _, _)| d == party)
            .map(|&(_, a, b)| (a, b))
            .collect();
        let true_links = if audited.is_empty() {
            links.swapped.clone()
        } else {
            audited
        };
        view.distribution = Some(DistributorKnowledge {
            kinds,
            true_links,
            r1: Vec::new(),
            r2: Vec::new(),
        });
    }
    view
}
