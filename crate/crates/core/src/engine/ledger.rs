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

//! Resource distribution with post-selection: the ground truth one
//! distributor's sub-protocol produces.
//!
//! Out of `12N` maximally entangled copies (`6N` per neighbour), `2N + 2N`
//! randomly chosen ones go through the ancilla conversion (success 1/2) and
//! the remaining `4N + 4N` are paired up for entanglement swapping (click
//! 1/4). Failures land on the discard lists `R1`/`R2`; `R3 = R1 u R2` is
//! published. Surviving runs carry Hardy pairs; the true cross-run links are
//! recorded here and stay private to the distributor until revelation.

use num_complex::Complex64;
use rand::Rng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::types::{Party, SlotId, SlotKind, SwapChoice};
use crate::hardy::{HardyModel, Setting};
use crate::qcore::{Outcome, PureState, apply, project_out, tensor};
use crate::{Error, Result};

/// Per-distributed-copy bookkeeping.
#[derive(Clone, Debug)]
pub struct SlotRecord {
    pub slot_id: SlotId,
    /// Index of the run within its distributor's sub-protocol.
    pub run_id: usize,
    pub distributor: Party,
    pub holder: Party,
    pub kind: SlotKind,
    /// The distributor's qubit was used up by a swap measurement.
    pub consumed: bool,
    /// Published link partner; filled at link revelation (possibly faked).
    pub linked_slot: Option<SlotId>,
    /// Ground-truth pair index; distributor-private knowledge.
    pub pair_index: Option<usize>,
    pub holder_setting: Option<Setting>,
    pub holder_outcome: Option<Outcome>,
    /// The distributor's own half of a direct run.
    pub dist_setting: Option<Setting>,
    pub dist_outcome: Option<Outcome>,
}

/// One surviving Hardy pair: which two slots carry it, who holds each
/// subsystem, and its evolving two-qubit state. For direct pairs both slots
/// coincide (the original copy); for swapped pairs subsystem 0 is the peer
/// lieutenant's half and subsystem 1 the commander's.
#[derive(Clone, Debug)]
pub struct HardyPair {
    pub index: usize,
    pub slots: (SlotId, SlotId),
    pub parties: (Party, Party),
    pub swapped: bool,
    /// Swap used the cheat projector (audit only).
    pub tampered: bool,
    pub state: PureState,
}

/// Ground truth of one distributor's sub-protocol.
#[derive(Clone, Debug)]
pub struct RunLedger {
    pub distributor: Party,
    pub n: usize,
    /// Global slot id of this ledger's run 0.
    pub base: SlotId,
    pub slots: Vec<SlotRecord>,
    pub r1: Vec<SlotId>,
    pub r2: Vec<SlotId>,
    pub r3: Vec<SlotId>,
    pub hardy_pairs: Vec<HardyPair>,
}

impl RunLedger {
    pub fn slot(&self, id: SlotId) -> &SlotRecord {
        &self.slots[id - self.base]
    }

    pub fn slot_mut(&mut self, id: SlotId) -> &mut SlotRecord {
        &mut self.slots[id - self.base]
    }

    pub fn contains(&self, id: SlotId) -> bool {
        id >= self.base && id < self.base + self.slots.len()
    }

    /// Surviving (non-discarded) slot ids in ascending order.
    pub fn survivors(&self) -> impl Iterator<Item = SlotId> + '_ {
        self.slots
            .iter()
            .filter(|s| s.kind != SlotKind::Discarded)
            .map(|s| s.slot_id)
    }

    /// True swap links as `(peer_slot, commander_slot)` in creation order.
    pub fn true_swap_links(&self) -> Vec<(SlotId, SlotId)> {
        self.hardy_pairs
            .iter()
            .filter(|p| p.swapped)
            .map(|p| p.slots)
            .collect()
    }

    /// Direct surviving runs as `(slot, holder)`.
    pub fn direct_runs(&self) -> Vec<(SlotId, Party)> {
        self.slots
            .iter()
            .filter(|s| s.kind.is_direct())
            .map(|s| (s.slot_id, s.holder))
            .collect()
    }
}

/// Run one distributor's resource distribution.
///
/// `tamper` picks the swap projector per pair-of-copies (honest strategies
/// always answer [`SwapChoice::Genuine`]). Randomness for selection,
/// post-selection sampling and tampering all comes from `rng`.
pub fn distribute(
    distributor: Party,
    n: usize,
    base: SlotId,
    model: &HardyModel,
    tamper: &mut dyn FnMut(usize, &mut ChaCha8Rng) -> SwapChoice,
    rng: &mut ChaCha8Rng,
) -> Result<RunLedger> {
    if n < 8 {
        return Err(Error::Config {
            reason: format!("n = {n} too small for the statistical phases (minimum 8)"),
        });
    }
    let peer = distributor.peer();
    let total = 12 * n;
    let mut slots: Vec<SlotRecord> = (0..total)
        .map(|run_id| SlotRecord {
            slot_id: base + run_id,
            run_id,
            distributor,
            holder: if run_id < 6 * n { peer } else { Party::C },
            kind: SlotKind::Discarded,
            consumed: false,
            linked_slot: None,
            pair_index: None,
            holder_setting: None,
            holder_outcome: None,
            dist_setting: None,
            dist_outcome: None,
        })
        .collect();

    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    let mut hardy_pairs = Vec::new();

    // Random split of each neighbour's 6N runs: 2N conversions, 4N swap halves.
    let split = |lo: usize, rng: &mut ChaCha8Rng| -> (Vec<usize>, Vec<usize>) {
        let mut runs: Vec<usize> = (lo..lo + 6 * n).collect();
        runs.shuffle(rng);
        let swap = runs.split_off(2 * n);
        (runs, swap)
    };
    let (conv_peer, swap_peer) = split(0, rng);
    let (conv_c, swap_c) = split(6 * n, rng);

    // S1a: ancilla conversion on 2N + 2N randomly selected copies.
    let ancilla_u = [Complex64::ONE, Complex64::ZERO];
    for (runs, direct_kind) in [
        (conv_peer, SlotKind::DirectToPeer),
        (conv_c, SlotKind::DirectToC),
    ] {
        for run in runs {
            let input = tensor(&PureState::basis_state(1, 0), &PureState::bell_phi_plus())?;
            let converted = apply(model.conversion_unitary(), &[0, 1], &input)?;
            let (pair_state, p_success) = project_out(&ancilla_u, &[0], &converted)?;
            if rng.random::<f64>() < p_success {
                let rec = &mut slots[run];
                rec.kind = direct_kind;
                rec.pair_index = Some(hardy_pairs.len());
                hardy_pairs.push(HardyPair {
                    index: hardy_pairs.len(),
                    slots: (base + run, base + run),
                    parties: (distributor, rec.holder),
                    swapped: false,
                    tampered: false,
                    state: pair_state,
                });
            } else {
                r1.push(base + run);
            }
        }
    }

    // S1b: entanglement swapping on the remaining 4N pairs-of-copies. The
    // distributor's halves sit at subsystems (0, 2); a click leaves the
    // remote qubits (peer, C) in the kept state.
    let two_copies = tensor(&PureState::bell_phi_plus(), &PureState::bell_phi_plus())?;
    let psi_star: Vec<Complex64> = model
        .psi_h()
        .amplitudes()
        .iter()
        .map(|a| a.conj())
        .collect();
    let chi_star: Vec<Complex64> = model
        .chi()
        .amplitudes()
        .iter()
        .map(|a| a.conj())
        .collect();
    for (swap_index, (&run_peer, &run_c)) in swap_peer.iter().zip(&swap_c).enumerate() {
        let choice = tamper(swap_index, rng);
        let bra = match choice {
            SwapChoice::Genuine => &psi_star,
            SwapChoice::BasisFlip => &chi_star,
        };
        let (remote, p_click) = project_out(bra, &[0, 2], &two_copies)?;
        if rng.random::<f64>() < p_click {
            let index = hardy_pairs.len();
            hardy_pairs.push(HardyPair {
                index,
                slots: (base + run_peer, base + run_c),
                parties: (peer, Party::C),
                swapped: true,
                tampered: choice == SwapChoice::BasisFlip,
                state: remote,
            });
            for run in [run_peer, run_c] {
                let rec = &mut slots[run];
                rec.kind = SlotKind::SwapHalf;
                rec.consumed = true;
                rec.pair_index = Some(index);
            }
        } else {
            r2.push(base + run_peer);
            r2.push(base + run_c);
        }
    }

    let mut r3: Vec<SlotId> = r1.iter().chain(&r2).copied().collect();
    r3.sort_unstable();

    Ok(RunLedger {
        distributor,
        n,
        base,
        slots,
        r1,
        r2,
        r3,
        hardy_pairs,
    })
}

/// Test support: relabel the hidden swap pairing by rotating which
/// commander slot each peer slot is paired with.
///
/// For an honest pre-measurement ledger every swapped pair carries the same
/// state, so the relabelled ledger is physically indistinguishable; the
/// knowledge-separation tests use this to check that non-distributor views
/// carry no linkage information.
pub fn rotate_hidden_links(ledger: &mut RunLedger) {
    let swapped: Vec<usize> = (0..ledger.hardy_pairs.len())
        .filter(|&i| ledger.hardy_pairs[i].swapped)
        .collect();
    if swapped.len() < 2 {
        return;
    }
    let c_slots: Vec<SlotId> = swapped
        .iter()
        .map(|&i| ledger.hardy_pairs[i].slots.1)
        .collect();
    for (k, &i) in swapped.iter().enumerate() {
        let new_c = c_slots[(k + 1) % c_slots.len()];
        ledger.hardy_pairs[i].slots.1 = new_c;
        ledger.slot_mut(new_c).pair_index = Some(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::ObservablePair;
    use crate::qcore::fidelity;
    use crate::stats::{Z_99, wilson_contains};
    use rand::SeedableRng;

    fn model() -> HardyModel {
        let pair = ObservablePair::from_alpha_real(crate::hardy::optimal_alpha()).unwrap();
        HardyModel::build(pair, pair).unwrap()
    }

    fn honest(
        _: usize,
        _: &mut ChaCha8Rng,
    ) -> SwapChoice {
        SwapChoice::Genuine
    }

    #[test]
    fn n_below_minimum_is_a_configuration_error() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [0, 1, 7] {
            assert!(matches!(
                distribute(Party::A, n, 0, &m, &mut honest, &mut rng),
                Err(Error::Config { .. })
            ));
        }
    }

    #[test]
    fn survivor_counts_match_the_post_selection_rates() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 200;
        let ledger = distribute(Party::A, n, 0, &m, &mut honest, &mut rng).unwrap();

        let direct_peer = ledger
            .slots
            .iter()
            .filter(|s| s.kind == SlotKind::DirectToPeer)
            .count();
        let direct_c = ledger
            .slots
            .iter()
            .filter(|s| s.kind == SlotKind::DirectToC)
            .count();
        let swapped_pairs = ledger.hardy_pairs.iter().filter(|p| p.swapped).count();

        // Conversion successes out of 2N at rate 1/2, per neighbour.
        assert!(wilson_contains(0.5, direct_peer as u64, (2 * n) as u64, Z_99));
        assert!(wilson_contains(0.5, direct_c as u64, (2 * n) as u64, Z_99));
        // Swap clicks out of 4N at rate 1/4.
        assert!(wilson_contains(
            0.25,
            swapped_pairs as u64,
            (4 * n) as u64,
            Z_99
        ));
    }

    #[test]
    fn slot_conservation_holds() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ledger = distribute(Party::B, 64, 100, &m, &mut honest, &mut rng).unwrap();
        let direct = ledger.slots.iter().filter(|s| s.kind.is_direct()).count();
        let swap_halves = ledger
            .slots
            .iter()
            .filter(|s| s.kind == SlotKind::SwapHalf)
            .count();
        let discarded = ledger
            .slots
            .iter()
            .filter(|s| s.kind == SlotKind::Discarded)
            .count();
        assert_eq!(direct + swap_halves + discarded, 12 * 64);
        assert_eq!(discarded, ledger.r3.len());
        assert_eq!(ledger.r1.len() + ledger.r2.len(), ledger.r3.len());
        assert_eq!(swap_halves, 2 * ledger.hardy_pairs.iter().filter(|p| p.swapped).count());

        // Holders: peer in the first half of runs, commander in the second.
        assert!(ledger.slots[..6 * 64].iter().all(|s| s.holder == Party::A));
        assert!(ledger.slots[6 * 64..].iter().all(|s| s.holder == Party::C));
    }

    #[test]
    fn honest_pairs_hold_the_hardy_state() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ledger = distribute(Party::A, 16, 0, &m, &mut honest, &mut rng).unwrap();
        for pair in &ledger.hardy_pairs {
            assert!(fidelity(&pair.state, m.psi_h()).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn tampered_swaps_hold_chi_between_peer_and_commander() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut always_flip =
            |_: usize, _: &mut ChaCha8Rng| SwapChoice::BasisFlip;
        let ledger = distribute(Party::A, 16, 0, &m, &mut always_flip, &mut rng).unwrap();
        let swapped: Vec<_> = ledger.hardy_pairs.iter().filter(|p| p.swapped).collect();
        assert!(!swapped.is_empty());
        for pair in swapped {
            assert!(pair.tampered);
            assert_eq!(pair.parties, (Party::B, Party::C));
            assert!(fidelity(&pair.state, m.chi()).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn distribution_is_deterministic_per_seed() {
        let m = model();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ledger = distribute(Party::A, 32, 0, &m, &mut honest, &mut rng).unwrap();
            (ledger.r3.clone(), ledger.true_swap_links())
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }
}
