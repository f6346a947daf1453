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

//! Minimal pure-state quantum engine for up to five two-level subsystems.
//!
//! States are dense complex vectors over the computational product basis.
//! Subsystem `0` is the slowest-varying (most significant) index of the
//! Kronecker layout, so for two qubits the amplitudes are ordered
//! `|uu>, |u u_perp>, |u_perp u>, |u_perp u_perp>`. Everything is immutable
//! after construction; the only functions consuming randomness are the
//! sampling ones, and those mutate nothing but the caller's rng.

mod basis;
mod gram_schmidt;
mod operator;
mod state;

pub use basis::LocalBasis;
pub use gram_schmidt::gram_schmidt;
pub use operator::{LinearOperator, OperatorKind};
pub use state::{Outcome, PureState, apply, collapse, fidelity, measure_local, project_out, tensor};

/// Unit-norm and orthonormality tolerance for all analytic checks.
pub const NORM_TOL: f64 = 1e-12;
/// Pivot-norm threshold below which Gram-Schmidt input counts as dependent.
pub const PIVOT_TOL: f64 = 1e-10;
/// Probability threshold separating a genuinely impossible branch from rounding.
pub const BRANCH_TOL: f64 = 1e-14;
/// Hard cap on the number of two-level subsystems (dimension 32).
pub const MAX_SUBSYSTEMS: usize = 5;
