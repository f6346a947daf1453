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

use serde::{Deserialize, Serialize};

/// The three generals. `C` commands; `A` and `B` are the lieutenants who
/// also distribute the entangled resources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    /// The two resource distributors, in protocol order.
    pub const DISTRIBUTORS: [Party; 2] = [Party::A, Party::B];

    /// The other lieutenant. Only meaningful for `A` and `B`.
    pub fn peer(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
            Party::C => panic!("the commander has no peer lieutenant"),
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
            Party::C => "C",
        })
    }
}

/// Global identifier of one distributed entangled copy (one run).
pub type SlotId = usize;

/// What became of a distributed copy, from the distributor's standpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotKind {
    /// Ancilla conversion succeeded; distributor and the peer lieutenant
    /// share a Hardy pair inside this run.
    DirectToPeer,
    /// Same, shared with the commander.
    DirectToC,
    /// The distributor's qubit was consumed by a swap measurement; the
    /// surviving half belongs to a cross pair with another run.
    SwapHalf,
    /// Post-selection failed; the run is on a discard list.
    Discarded,
}

impl SlotKind {
    pub fn is_direct(self) -> bool {
        matches!(self, SlotKind::DirectToPeer | SlotKind::DirectToC)
    }
}

/// The commander's private per-slot plan: message-basis slot or test slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Designation {
    Message,
    Test,
}

/// Protocol phases in their mandatory order. Outcomes are announced before
/// lists, lists before links, links before setting disclosure; the public
/// interface rejects any other ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Configured,
    Distributed,
    SettingsChosen,
    Announced,
    ListsDisclosed,
    LinksRevealed,
    SettingsDisclosed,
    Confirmed,
    Complete,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Configured => "configured",
            Phase::Distributed => "distributed",
            Phase::SettingsChosen => "settings-chosen",
            Phase::Announced => "announced",
            Phase::ListsDisclosed => "lists-disclosed",
            Phase::LinksRevealed => "links-revealed",
            Phase::SettingsDisclosed => "settings-disclosed",
            Phase::Confirmed => "confirmed",
            Phase::Complete => "complete",
        }
    }
}

/// Distribution-time choice for one swap measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapChoice {
    /// The honest projector onto the conjugated Hardy state.
    Genuine,
    /// The basis-flipping cheat projector onto the conjugated `chi`.
    BasisFlip,
}
