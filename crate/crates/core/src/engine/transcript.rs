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

//! The public record of one protocol round plus a private audit appendix.
//!
//! Events are ordered exactly as they happened and serialize to a
//! line-delimited stream (one JSON record per line, stable field order) for
//! storage and replay. The audit appendix holds what no party other than its
//! owner saw during the round (phony-announcement flags, true swap links,
//! pre-channel confirmation claims) and is consumed only by tests, replay
//! and reporting.

use serde::{Deserialize, Serialize};

use super::types::{Party, SlotId};
use crate::hardy::Setting;
use crate::qcore::Outcome;
use crate::{Error, Result};

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    /// First line of every stream: enough configuration to re-verify it.
    Meta {
        schema_version: u32,
        n: usize,
        alpha: f64,
        message_fraction: f64,
        flip_prob: f64,
        epsilon: f64,
        k_min: usize,
        min_runs: usize,
        seed: u64,
        scenario: String,
    },
    /// Discard list published at the end of one distributor's preparation.
    Discards { distributor: Party, r3: Vec<SlotId> },
    /// One announced outcome; `position` is the announcer's place in the
    /// run's random announcement order.
    Announcement {
        slot: SlotId,
        party: Party,
        outcome: Outcome,
        position: u8,
    },
    /// The commander's message-run and test-run lists for one sub-protocol.
    Lists {
        distributor: Party,
        message_runs: Vec<SlotId>,
        test_runs: Vec<SlotId>,
    },
    /// The correlation links published by one distributor.
    Links {
        distributor: Party,
        direct: Vec<(SlotId, Party)>,
        swapped: Vec<(SlotId, SlotId)>,
    },
    /// Measurement settings disclosed for verification.
    Settings {
        party: Party,
        settings: Vec<(SlotId, Setting)>,
    },
    /// A classical confirmation as delivered (after the bit-flip channel).
    Confirmation {
        from: Party,
        to: Party,
        bit: Option<u8>,
    },
}

/// Private per-round record, never part of any party's view.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    /// Slots for which the named party announced a phony outcome.
    pub phony: Vec<(SlotId, Party)>,
    /// True swap links per distributor.
    pub true_links: Vec<(Party, SlotId, SlotId)>,
    /// Swap measurements that used the cheat projector.
    pub tampered_swaps: Vec<(Party, SlotId, SlotId)>,
    /// Confirmation bits as claimed by the sender, before the channel.
    pub claimed_confirmations: Vec<(Party, Party, Option<u8>)>,
    /// The commander's order (inputs, for reporting only).
    pub message_bit: Option<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub audit: AuditRecord,
}

impl Transcript {
    /// Line-delimited serialization: every event on its own line, the audit
    /// appendix last.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("events serialize"));
            out.push('\n');
        }
        out.push_str(
            &serde_json::to_string(&AuditLine {
                line_type: "audit".to_string(),
                audit: self.audit.clone(),
            })
            .expect("audit serializes"),
        );
        out.push('\n');
        out
    }

    pub fn from_jsonl(input: &str) -> Result<Transcript> {
        let mut events = Vec::new();
        let mut audit = AuditRecord::default();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Ok(parsed) = serde_json::from_str::<AuditLine>(line) {
                if parsed.line_type == "audit" {
                    audit = parsed.audit;
                    continue;
                }
            }
            let event: Event = serde_json::from_str(line).map_err(|e| Error::Replay {
                reason: format!("line {}: {e}", lineno + 1),
            })?;
            events.push(event);
        }
        if events.is_empty() {
            return Err(Error::Replay {
                reason: "empty transcript".into(),
            });
        }
        Ok(Transcript { events, audit })
    }

    pub fn meta(&self) -> Option<&Event> {
        self.events
            .iter()
            .find(|e| matches!(e, Event::Meta { .. }))
    }

    /// Check the mandatory phase ordering of the stored events.
    pub fn check_ordering(&self) -> Result<()> {
        let rank = |e: &Event| -> u8 {
            match e {
                Event::Meta { .. } => 0,
                Event::Discards { .. } => 1,
                Event::Announcement { .. } => 2,
                Event::Lists { .. } => 3,
                Event::Links { .. } => 4,
                Event::Settings { .. } => 5,
                Event::Confirmation { .. } => 6,
            }
        };
        let mut last = 0;
        for event in &self.events {
            let r = rank(event);
            if r < last {
                return Err(Error::Replay {
                    reason: format!("event out of order: rank {r} after rank {last}"),
                });
            }
            last = r;
        }
        Ok(())
    }
}

/// Serialization wrapper so the audit appendix shares the event line format.
#[derive(Serialize, Deserialize)]
struct AuditLine {
    #[serde(rename = "type")]
    line_type: String,
    #[serde(flatten)]
    audit: AuditRecord,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        Transcript {
            events: vec![
                Event::Meta {
                    schema_version: TRANSCRIPT_SCHEMA_VERSION,
                    n: 8,
                    alpha: 0.7,
                    message_fraction: 0.75,
                    flip_prob: 0.0,
                    epsilon: 0.0,
                    k_min: 1,
                    min_runs: 16,
                    seed: 1,
                    scenario: "honest".into(),
                },
                Event::Discards {
                    distributor: Party::A,
                    r3: vec![1, 4],
                },
                Event::Announcement {
                    slot: 0,
                    party: Party::A,
                    outcome: Outcome::Plus,
                    position: 0,
                },
                Event::Lists {
                    distributor: Party::A,
                    message_runs: vec![7],
                    test_runs: vec![9],
                },
                Event::Links {
                    distributor: Party::A,
                    direct: vec![(0, Party::B)],
                    swapped: vec![(2, 9)],
                },
                Event::Settings {
                    party: Party::A,
                    settings: vec![(0, Setting::U)],
                },
                Event::Confirmation {
                    from: Party::A,
                    to: Party::B,
                    bit: Some(1),
                },
            ],
            audit: AuditRecord {
                phony: vec![(2, Party::A)],
                true_links: vec![(Party::A, 2, 9)],
                tampered_swaps: vec![],
                claimed_confirmations: vec![(Party::A, Party::B, Some(1))],
                message_bit: Some(1),
            },
        }
    }

    #[test]
    fn jsonl_round_trips() {
        let t = sample();
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), t.events.len() + 1);
        let back = Transcript::from_jsonl(&text).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn ordering_check_accepts_valid_and_rejects_shuffled() {
        let t = sample();
        t.check_ordering().unwrap();
        let mut bad = t.clone();
        bad.events.swap(2, 4);
        assert!(bad.check_ordering().is_err());
    }
}
