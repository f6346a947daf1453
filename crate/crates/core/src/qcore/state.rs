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

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BRANCH_TOL, LinearOperator, LocalBasis, MAX_SUBSYSTEMS, OperatorKind};
use crate::{Error, Result};

/// A dichotomic measurement outcome, eigenvalue +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+",
            Outcome::Minus => "-",
        })
    }
}

/// Normalized pure state of `n` two-level subsystems (`1 <= n <= 5`).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Build a state from raw amplitudes. Small norm drift (up to 1e-6) is
    /// renormalized away; anything larger is rejected.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_SUBSYSTEMS {
            return Err(Error::DimensionOverflow {
                requested: n,
                max: MAX_SUBSYSTEMS,
            });
        }
        if amps.len() != 1 << n {
            return Err(Error::InvalidDimension { len: amps.len(), n });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized {
                norm: norm_sqr.sqrt(),
            });
        }
        let mut state = PureState { n, amps };
        state.renormalize();
        Ok(state)
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(n: usize, index: usize) -> Self {
        assert!(n >= 1 && n <= MAX_SUBSYSTEMS && index < (1 << n));
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[index] = Complex64::ONE;
        PureState { n, amps }
    }

    /// Single qubit `c0|u> + c1|u_perp>`.
    pub fn qubit(c0: Complex64, c1: Complex64) -> Result<Self> {
        PureState::new(1, vec![c0, c1])
    }

    /// The maximally entangled pair `(|uu> + |u_perp u_perp>)/sqrt(2)`.
    pub fn bell_phi_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState {
            n: 2,
            amps: vec![h, Complex64::ZERO, Complex64::ZERO, h],
        }
    }

    pub fn subsystems(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
    }

    /// Bit mask of `subsystem` in the index layout (subsystem 0 is the MSB).
    fn mask(&self, subsystem: usize) -> usize {
        1 << (self.n - 1 - subsystem)
    }
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::SubsystemOutOfRange { index: t, n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget);
        }
    }
    Ok(())
}

/// Kronecker product; `a`'s subsystems come before (more significant than) `b`'s.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let n = a.n + b.n;
    if n > MAX_SUBSYSTEMS {
        return Err(Error::DimensionOverflow {
            requested: n,
            max: MAX_SUBSYSTEMS,
        });
    }
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    let mut out = PureState { n, amps };
    out.renormalize();
    Ok(out)
}

/// Per-target bit masks and the scatter offsets of operator row indices.
///
/// `targets[j]` carries the operator's subsystem `j`, so operator index bit
/// `k-1-j` maps onto state index bit `n-1-targets[j]`.
fn target_offsets(targets: &[usize], n: usize) -> (usize, Vec<usize>) {
    let k = targets.len();
    let masks: Vec<usize> = targets.iter().map(|&t| 1 << (n - 1 - t)).collect();
    let union: usize = masks.iter().fold(0, |acc, m| acc | m);
    let offsets = (0..1usize << k)
        .map(|r| {
            masks
                .iter()
                .enumerate()
                .filter(|(j, _)| (r >> (k - 1 - j)) & 1 == 1)
                .fold(0, |acc, (_, m)| acc | m)
        })
        .collect();
    (union, offsets)
}

fn apply_raw(op: &LinearOperator, targets: &[usize], s: &PureState) -> Result<Vec<Complex64>> {
    if op.arity() != targets.len() {
        return Err(Error::ArityMismatch {
            arity: op.arity(),
            targets: targets.len(),
        });
    }
    check_targets(targets, s.n)?;
    let dk = op.dim();
    let (union, offsets) = target_offsets(targets, s.n);
    let mut out = vec![Complex64::ZERO; s.dim()];
    for base in 0..s.dim() {
        if base & union != 0 {
            continue;
        }
        for row in 0..dk {
            let mut acc = Complex64::ZERO;
            for col in 0..dk {
                acc += op.element(row, col) * s.amps[base | offsets[col]];
            }
            out[base | offsets[row]] = acc;
        }
    }
    Ok(out)
}

/// Apply a unitary on the listed subsystems, identity elsewhere.
///
/// Projectors do not go through here: measurement collapse is [`collapse`].
pub fn apply(op: &LinearOperator, targets: &[usize], s: &PureState) -> Result<PureState> {
    if op.kind() != OperatorKind::Unitary {
        return Err(Error::WrongOperatorKind { flagged: "unitary" });
    }
    let amps = apply_raw(op, targets, s)?;
    let mut out = PureState { n: s.n, amps };
    out.renormalize();
    Ok(out)
}

/// Project with `proj` on the listed subsystems and renormalize.
///
/// Returns the collapsed state together with the branch probability
/// `<s|P|s>`. A probability below [`BRANCH_TOL`] signals an impossible
/// branch and no state is returned.
pub fn collapse(
    proj: &LinearOperator,
    targets: &[usize],
    s: &PureState,
) -> Result<(PureState, f64)> {
    if proj.kind() != OperatorKind::Projector {
        return Err(Error::WrongOperatorKind {
            flagged: "projector",
        });
    }
    let amps = apply_raw(proj, targets, s)?;
    let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if probability < BRANCH_TOL {
        return Err(Error::ImpossibleBranch { probability });
    }
    let scale = probability.sqrt();
    let amps = amps.into_iter().map(|a| a / scale).collect();
    Ok((PureState { n: s.n, amps }, probability))
}

/// Project the listed subsystems onto the fixed vector `bra` and drop them.
///
/// For a state that factorizes as `|bra>_targets (x) |w>_rest` this recovers
/// exactly `|w>`; in general it returns the normalized partial inner product
/// together with its probability. Remaining subsystems keep their relative
/// order.
pub fn project_out(
    bra: &[Complex64],
    targets: &[usize],
    s: &PureState,
) -> Result<(PureState, f64)> {
    let k = targets.len();
    if bra.len() != 1 << k {
        return Err(Error::ArityMismatch {
            arity: bra.len().trailing_zeros() as usize,
            targets: k,
        });
    }
    if k >= s.n {
        return Err(Error::SubsystemOutOfRange {
            index: s.n,
            n: s.n,
        });
    }
    check_targets(targets, s.n)?;
    let (union, offsets) = target_offsets(targets, s.n);

    // Remaining subsystems, in order, and their masks.
    let rest: Vec<usize> = (0..s.n).filter(|t| !targets.contains(t)).collect();
    let m = rest.len();
    let rest_masks: Vec<usize> = rest.iter().map(|&t| 1 << (s.n - 1 - t)).collect();

    let mut out = vec![Complex64::ZERO; 1 << m];
    for (ri, amp) in out.iter_mut().enumerate() {
        let base = rest_masks
            .iter()
            .enumerate()
            .filter(|(j, _)| (ri >> (m - 1 - j)) & 1 == 1)
            .fold(0, |acc, (_, mask)| acc | mask);
        debug_assert_eq!(base & union, 0);
        let mut acc = Complex64::ZERO;
        for (r, off) in offsets.iter().enumerate() {
            acc += bra[r].conj() * s.amps[base | off];
        }
        *amp = acc;
    }
    let probability: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if probability < BRANCH_TOL {
        return Err(Error::ImpossibleBranch { probability });
    }
    let scale = probability.sqrt();
    let amps = out.into_iter().map(|a| a / scale).collect();
    Ok((PureState { n: m, amps }, probability))
}

/// Born-rule measurement of one subsystem in a local basis.
///
/// The outcome is sampled from the supplied rng; the returned state is the
/// full-dimension collapsed and renormalized state, and the probability is
/// that of the sampled outcome. Identical rng streams give identical outcome
/// sequences.
pub fn measure_local<R: Rng + ?Sized>(
    s: &PureState,
    subsystem: usize,
    basis: &LocalBasis,
    rng: &mut R,
) -> Result<(Outcome, PureState, f64)> {
    if subsystem >= s.n {
        return Err(Error::SubsystemOutOfRange {
            index: subsystem,
            n: s.n,
        });
    }
    let mask = s.mask(subsystem);
    let overlap = |e: &[Complex64; 2]| -> Vec<Complex64> {
        let mut w = Vec::with_capacity(s.dim() / 2);
        for base in 0..s.dim() {
            if base & mask != 0 {
                continue;
            }
            w.push(e[0].conj() * s.amps[base] + e[1].conj() * s.amps[base | mask]);
        }
        w
    };
    let w_plus = overlap(basis.plus());
    let p_plus: f64 = w_plus.iter().map(|a| a.norm_sqr()).sum();
    let outcome = if rng.random::<f64>() < p_plus {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    let (eigvec, w, probability) = match outcome {
        Outcome::Plus => (basis.plus(), w_plus, p_plus),
        Outcome::Minus => {
            let w_minus = overlap(basis.minus());
            let p: f64 = w_minus.iter().map(|a| a.norm_sqr()).sum();
            (basis.minus(), w_minus, p)
        }
    };
    // Reassemble the full-dimension state |e><e| s / sqrt(p).
    let scale = probability.sqrt();
    let mut amps = vec![Complex64::ZERO; s.dim()];
    let mut wi = 0;
    for base in 0..s.dim() {
        if base & mask != 0 {
            continue;
        }
        amps[base] = eigvec[0] * w[wi] / scale;
        amps[base | mask] = eigvec[1] * w[wi] / scale;
        wi += 1;
    }
    Ok((outcome, PureState { n: s.n, amps }, probability))
}

/// Squared overlap `|<a|b>|^2`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}
