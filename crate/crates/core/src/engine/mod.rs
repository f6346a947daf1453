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

//! Protocol state machine: distribution with post-selection, the
//! announcement phase with its ordering rules, list and link disclosure,
//! and classical confirmations, all while keeping each party's knowledge
//! separated.

mod ledger;
mod protocol;
mod replay;
mod transcript;
mod types;
mod view;

pub use ledger::{HardyPair, RunLedger, SlotRecord, distribute, rotate_hidden_links};
pub use protocol::{
    ActorReports, PartyViews, ProtocolConfig, ProtocolInstance, ProtocolOutcome, ReadingEntry,
    SettingChoice, Verdicts, choose_settings, run_protocol, run_protocol_with,
};
pub use replay::{ReplaySummary, replay_transcript};
pub use transcript::{AuditRecord, Event, TRANSCRIPT_SCHEMA_VERSION, Transcript};
pub use types::{Designation, Party, Phase, SlotId, SlotKind, SwapChoice};
pub use view::{
    AnnouncementView, CommanderPlan, ConfirmationView, DiscardsView, DistributorKnowledge,
    LinksView, ListsView, OwnSlotView, PartyView, SettingsView, VerifyParams, derive_view,
};
