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

//! Wilson score intervals for binomial proportions and the seed-derivation
//! scheme used to split one master seed into independent per-trial seeds.

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
///
/// Returns `(0, 1)` for zero trials, which never contradicts anything.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Whether the hypothesised probability `p` is consistent with the observed
/// count at the given quantile.
pub fn wilson_contains(p: f64, successes: u64, trials: u64, z: f64) -> bool {
    let (lo, hi) = wilson_interval(successes, trials, z);
    p >= lo && p <= hi
}

/// SplitMix64-style seed derivation: independent, reproducible streams from
/// one master seed and a counter. Single-step, so `derive_seed(m, i)` can be
/// recomputed anywhere without shared state.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_tightens_with_trials() {
        let (lo1, hi1) = wilson_interval(50, 100, Z_99);
        let (lo2, hi2) = wilson_interval(5000, 10000, Z_99);
        assert!(hi2 - lo2 < hi1 - lo1);
        assert!(lo1 < 0.5 && 0.5 < hi1);
        assert!(lo2 < 0.5 && 0.5 < hi2);
    }

    #[test]
    fn interval_handles_extremes() {
        let (lo, hi) = wilson_interval(0, 100, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(100, 100, Z_99);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.9);
    }

    #[test]
    fn contains_accepts_the_true_rate_most_of_the_time() {
        // Deterministic sanity point, not a statistical claim.
        assert!(wilson_contains(0.25, 250, 1000, Z_99));
        assert!(!wilson_contains(0.25, 400, 1000, Z_99));
    }

    #[test]
    fn derived_seeds_differ_and_are_stable() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(7, 0));
        assert_ne!(derive_seed(8, 0), a);
    }
}
