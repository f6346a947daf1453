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

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state of {requested} subsystems exceeds the supported maximum of {max}")]
    DimensionOverflow { requested: usize, max: usize },

    #[error("state vector of length {len} is not a power-of-two dimension for {n} subsystems")]
    InvalidDimension { len: usize, n: usize },

    #[error("state norm {norm} too far from 1 to renormalize")]
    NotNormalized { norm: f64 },

    #[error("operator acts on {arity} subsystems but {targets} targets were given")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("target subsystem {index} out of range for a {n}-subsystem state")]
    SubsystemOutOfRange { index: usize, n: usize },

    #[error("target subsystems must be distinct")]
    DuplicateTarget,

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not a projector (deviation {deviation:.3e})")]
    NotProjector { deviation: f64 },

    #[error("operator flagged {flagged} required here")]
    WrongOperatorKind { flagged: &'static str },

    #[error("projection probability {probability:.3e} below threshold: impossible branch")]
    ImpossibleBranch { probability: f64 },

    #[error("basis vectors are not an orthonormal pair (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("linearly dependent input to Gram-Schmidt (pivot norm {pivot:.3e})")]
    DegenerateInput { pivot: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid observable pair: {reason}")]
    InvalidObservable { reason: String },

    #[error("message fraction {value} outside the open interval (0, 1)")]
    InvalidFraction { value: f64 },

    #[error("probability {value} outside [0, 1] for {what}")]
    InvalidProbability { value: f64, what: &'static str },

    #[error("configuration error: {reason}")]
    Config { reason: String },

    #[error("protocol phase violation: {action} attempted during {phase}")]
    PhaseOrder { action: &'static str, phase: &'static str },

    #[error("unknown scenario `{name}`")]
    UnknownScenario { name: String },

    #[error("transcript replay error: {reason}")]
    Replay { reason: String },
}
