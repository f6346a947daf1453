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

//! Pluggable party strategies: the honest baseline and the known cheating
//! behaviours.
//!
//! A strategy decides only at its legitimate decision points (the swap
//! projector and link publication for a distributor, setting choice, its own
//! announced values, and the classical confirmation bit) and sees nothing
//! but the owning party's [`PartyView`]. Every hook defaults to honest.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Designation, Party, PartyView, SlotId, SwapChoice};
use crate::hardy::Setting;
use crate::qcore::Outcome;
use crate::{Error, Result};

/// Decision hooks available to one party. Defaults are the honest protocol.
pub trait Strategy {
    /// Distributor only: projector choice for one swap measurement.
    fn swap_choice(
        &self,
        _view: &PartyView,
        _swap_index: usize,
        _rng: &mut ChaCha8Rng,
    ) -> SwapChoice {
        SwapChoice::Genuine
    }

    /// Distributor only: the link map to publish in place of the truth.
    fn publish_links(
        &self,
        _view: &PartyView,
        true_links: &[(SlotId, SlotId)],
        _rng: &mut ChaCha8Rng,
    ) -> Vec<(SlotId, SlotId)> {
        true_links.to_vec()
    }

    /// Measurement setting for one own slot; `sub` names the sub-protocol
    /// (distributor) the slot belongs to, `designation` is the commander's
    /// own plan entry when the owner is the commander.
    fn choose_setting(
        &self,
        _view: &PartyView,
        _slot: SlotId,
        _sub: Party,
        _designation: Option<Designation>,
        default: Setting,
        _rng: &mut ChaCha8Rng,
    ) -> Setting {
        default
    }

    /// The value announced for one own slot (honest: the measured outcome).
    fn announced_outcome(
        &self,
        _view: &PartyView,
        _slot: SlotId,
        measured: Outcome,
        _rng: &mut ChaCha8Rng,
    ) -> Outcome {
        measured
    }

    /// The classical confirmation bit sent to the peer lieutenant.
    fn confirmation_bit(
        &self,
        _view: &PartyView,
        honest: Option<u8>,
        _rng: &mut ChaCha8Rng,
    ) -> Option<u8> {
        honest
    }
}

/// Fully honest behaviour.
pub struct HonestStrategy;

impl Strategy for HonestStrategy {}

/// The honest baseline for any seat.
pub fn honest() -> Box<dyn Strategy> {
    Box::new(HonestStrategy)
}

/// How a traitorous commander equivocates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheatMode {
    /// Randomize the message-slot settings inside distributor A's
    /// sub-protocol, destroying that message's readability.
    MixedSettings,
    /// Consistent but different orders: `U` throughout A's sub-protocol,
    /// `D` throughout B's.
    TwoFaced,
}

struct CommanderTraitor {
    mode: CheatMode,
}

impl Strategy for CommanderTraitor {
    fn choose_setting(
        &self,
        _view: &PartyView,
        _slot: SlotId,
        sub: Party,
        designation: Option<Designation>,
        default: Setting,
        rng: &mut ChaCha8Rng,
    ) -> Setting {
        match self.mode {
            CheatMode::MixedSettings => {
                if sub == Party::A && designation == Some(Designation::Message) {
                    if rng.random_bool(0.5) {
                        Setting::U
                    } else {
                        Setting::D
                    }
                } else {
                    default
                }
            }
            CheatMode::TwoFaced => {
                if sub == Party::A {
                    Setting::U
                } else {
                    Setting::D
                }
            }
        }
    }
}

/// A commander sending inconsistent messages.
pub fn traitor_c(mode: CheatMode) -> Box<dyn Strategy> {
    Box::new(CommanderTraitor { mode })
}

struct BasisFlipDistributor {
    fraction: f64,
}

impl Strategy for BasisFlipDistributor {
    fn swap_choice(
        &self,
        _view: &PartyView,
        _swap_index: usize,
        rng: &mut ChaCha8Rng,
    ) -> SwapChoice {
        if rng.random_bool(self.fraction) {
            SwapChoice::BasisFlip
        } else {
            SwapChoice::Genuine
        }
    }
}

/// A distributor substituting the basis-flipped `chi` for the Hardy state in
/// the given fraction of its swap measurements (the named scenarios use 1).
pub fn traitor_distributor_basis_flip(fraction: f64) -> Box<dyn Strategy> {
    Box::new(BasisFlipDistributor { fraction })
}

struct FakeLinksDistributor;

impl Strategy for FakeLinksDistributor {
    fn publish_links(
        &self,
        _view: &PartyView,
        true_links: &[(SlotId, SlotId)],
        rng: &mut ChaCha8Rng,
    ) -> Vec<(SlotId, SlotId)> {
        let mut published = true_links.to_vec();
        // Sattolo's algorithm on the commander-side slots: a uniform cyclic
        // permutation, so no published link is true.
        for i in (1..published.len()).rev() {
            let j = rng.random_range(0..i);
            let tmp = published[i].1;
            published[i].1 = published[j].1;
            published[j].1 = tmp;
        }
        published
    }
}

/// A distributor publishing a derangement of its true swap links.
pub fn traitor_distributor_fake_links() -> Box<dyn Strategy> {
    Box::new(FakeLinksDistributor)
}

struct ClassicalLiar;

impl Strategy for ClassicalLiar {
    fn confirmation_bit(
        &self,
        _view: &PartyView,
        honest: Option<u8>,
        _rng: &mut ChaCha8Rng,
    ) -> Option<u8> {
        honest.map(|bit| 1 - bit)
    }
}

/// A lieutenant lying in the classical confirmation only.
pub fn traitor_classical_liar() -> Box<dyn Strategy> {
    Box::new(ClassicalLiar)
}

/// One strategy per seat.
pub struct StrategySet {
    pub a: Box<dyn Strategy>,
    pub b: Box<dyn Strategy>,
    pub c: Box<dyn Strategy>,
}

impl StrategySet {
    pub fn all_honest() -> Self {
        StrategySet {
            a: honest(),
            b: honest(),
            c: honest(),
        }
    }

    pub fn get(&self, party: Party) -> &dyn Strategy {
        match party {
            Party::A => self.a.as_ref(),
            Party::B => self.b.as_ref(),
            Party::C => self.c.as_ref(),
        }
    }
}

/// The named scenarios addressable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Honest,
    CMixed,
    CTwoFaced,
    ABasisFlip,
    BBasisFlip,
    AFakeLinks,
    BFakeLinks,
    ALiar,
    BLiar,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Honest,
        Scenario::CMixed,
        Scenario::CTwoFaced,
        Scenario::ABasisFlip,
        Scenario::BBasisFlip,
        Scenario::AFakeLinks,
        Scenario::BFakeLinks,
        Scenario::ALiar,
        Scenario::BLiar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Honest => "honest",
            Scenario::CMixed => "c_mixed",
            Scenario::CTwoFaced => "c_two_faced",
            Scenario::ABasisFlip => "a_basis_flip",
            Scenario::BBasisFlip => "b_basis_flip",
            Scenario::AFakeLinks => "a_fake_links",
            Scenario::BFakeLinks => "b_fake_links",
            Scenario::ALiar => "a_liar",
            Scenario::BLiar => "b_liar",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownScenario { name: name.into() })
    }

    /// The seat occupied by the traitor, if any.
    pub fn traitor(self) -> Option<Party> {
        match self {
            Scenario::Honest => None,
            Scenario::CMixed | Scenario::CTwoFaced => Some(Party::C),
            Scenario::ABasisFlip | Scenario::AFakeLinks | Scenario::ALiar => Some(Party::A),
            Scenario::BBasisFlip | Scenario::BFakeLinks | Scenario::BLiar => Some(Party::B),
        }
    }

    /// Assemble the per-seat strategies; `chi_fraction` only affects the
    /// basis-flip scenarios.
    pub fn strategies(self, chi_fraction: f64) -> StrategySet {
        let mut set = StrategySet::all_honest();
        match self {
            Scenario::Honest => {}
            Scenario::CMixed => set.c = traitor_c(CheatMode::MixedSettings),
            Scenario::CTwoFaced => set.c = traitor_c(CheatMode::TwoFaced),
            Scenario::ABasisFlip => set.a = traitor_distributor_basis_flip(chi_fraction),
            Scenario::BBasisFlip => set.b = traitor_distributor_basis_flip(chi_fraction),
            Scenario::AFakeLinks => set.a = traitor_distributor_fake_links(),
            Scenario::BFakeLinks => set.b = traitor_distributor_fake_links(),
            Scenario::ALiar => set.a = traitor_classical_liar(),
            Scenario::BLiar => set.b = traitor_classical_liar(),
        }
        set
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::from_name(s)
    }
}
