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

//! Quantum Byzantine agreement between three generals, simulated end to end.
//!
//! A commanding general `C` sends one order bit to lieutenants `A` and `B`
//! through measurement-setting statistics on shared Hardy-type entangled
//! pairs. The lieutenants distribute the pairs themselves (partly through
//! entanglement swapping), so every transmission doubles as a nonlocality
//! test: a party that lies about states, links or classical confirmations
//! either leaves the messages unreadable or exposes itself.
//!
//! The crate is organised in five layers:
//!
//! * [`qcore`]: a dense pure-state engine for up to five two-level systems,
//! * [`hardy`]: Hardy states, observables, conversion and swap projectors,
//! * [`engine`]: the protocol state machine with per-party views,
//! * [`adversary`]: pluggable honest and traitorous strategies,
//! * [`verify`]: message reading, Hardy tests and verdicts.
//!
//! [`stats`] carries the small amount of shared statistics (Wilson score
//! intervals, seed derivation).

pub mod adversary;
pub mod engine;
mod error;
pub mod hardy;
pub mod qcore;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
