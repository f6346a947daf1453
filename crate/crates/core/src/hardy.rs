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

//! Hardy-state construction and everything the protocol derives from one
//! observable choice.
//!
//! Each party measures one of two dichotomic observables, `U` or `D`. With
//! `|d> = alpha|u> + beta|u_perp>` per party, there is a unique two-qubit
//! pure state satisfying the Hardy conditions
//!
//! ```text
//! P(-,-|D,D) = 0,  P(+,+|D,U) = 0,  P(+,+|U,D) = 0,  P(+,+|U,U) = q > 0,
//! ```
//!
//! found by Gram-Schmidt orthogonalization against the three product states
//! carrying the zero probabilities. [`HardyModel`] packages that state with
//! its `U`-basis coefficients, the value of `q`, the ancilla conversion
//! unitary that turns a maximally entangled pair into a Hardy pair, the swap
//! projector used for entanglement swapping, and the basis-flipped cheating
//! state `chi` with its projector.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qcore::{
    LinearOperator, LocalBasis, Outcome, PureState, gram_schmidt, NORM_TOL, PIVOT_TOL,
};
use crate::{Error, Result};

/// Measurement setting label; `U` encodes message bit 0, `D` bit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    U,
    D,
}

impl Setting {
    pub fn flipped(self) -> Self {
        match self {
            Setting::U => Setting::D,
            Setting::D => Setting::U,
        }
    }

    /// The message basis that encodes `bit`.
    pub fn for_bit(bit: u8) -> Self {
        if bit == 0 { Setting::U } else { Setting::D }
    }

    pub fn bit(self) -> u8 {
        match self {
            Setting::U => 0,
            Setting::D => 1,
        }
    }

    pub const ALL: [Setting; 2] = [Setting::U, Setting::D];

    fn index(self) -> usize {
        match self {
            Setting::U => 0,
            Setting::D => 1,
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Setting::U => "U",
            Setting::D => "D",
        })
    }
}

/// Margin keeping `|alpha|` strictly inside the open interval (0, 1).
const ALPHA_MARGIN: f64 = 1e-9;

/// One party's observable choice, recorded as the overlaps
/// `alpha = <u|d>` and `beta = <u_perp|d>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservablePair {
    alpha: Complex64,
    beta: Complex64,
}

impl ObservablePair {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidObservable {
                reason: format!("|alpha|^2 + |beta|^2 = {norm} differs from 1"),
            });
        }
        let mag = alpha.norm();
        if mag <= ALPHA_MARGIN || mag >= 1.0 - ALPHA_MARGIN {
            return Err(Error::InvalidObservable {
                reason: format!("|alpha| = {mag} is at the open-interval boundary"),
            });
        }
        Ok(ObservablePair { alpha, beta })
    }

    /// Real observable with `alpha = a`, `beta = sqrt(1 - a^2)`.
    pub fn from_alpha_real(a: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a) {
            return Err(Error::InvalidObservable {
                reason: format!("real alpha {a} outside (0, 1)"),
            });
        }
        ObservablePair::new(
            Complex64::new(a, 0.0),
            Complex64::new((1.0 - a * a).sqrt(), 0.0),
        )
    }

    /// A uniformly sampled valid pair with magnitude kept away from the
    /// boundaries; used by randomized checks.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mag_sqr = 0.05 + 0.90 * rng.random::<f64>();
        let mag = mag_sqr.sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let alpha = Complex64::from_polar(mag, theta);
        let beta = Complex64::from_polar((1.0 - mag_sqr).sqrt(), phi);
        ObservablePair::new(alpha, beta).expect("sampled inside the valid region")
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Whether both overlaps are real (the protocol-default case).
    pub fn is_real(&self) -> bool {
        self.alpha.im == 0.0 && self.beta.im == 0.0
    }

    /// `|d>` in the `U` basis.
    pub fn d_plus(&self) -> [Complex64; 2] {
        [self.alpha, self.beta]
    }

    /// `|d_perp>` in the `U` basis.
    pub fn d_minus(&self) -> [Complex64; 2] {
        [self.beta.conj(), -self.alpha.conj()]
    }

    /// The eigenbasis of the `D` observable.
    pub fn d_basis(&self) -> LocalBasis {
        LocalBasis::new(self.d_plus(), self.d_minus()).expect("the d basis is orthonormal")
    }

    /// The eigenbasis of `setting` for this party.
    pub fn basis(&self, setting: Setting) -> LocalBasis {
        match setting {
            Setting::U => LocalBasis::computational(),
            Setting::D => self.d_basis(),
        }
    }
}

/// Joint outcome probabilities for every setting pair, indexed as
/// `[setting1][setting2][outcome1][outcome2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    entries: [[[[f64; 2]; 2]; 2]; 2],
}

fn outcome_index(o: Outcome) -> usize {
    match o {
        Outcome::Plus => 0,
        Outcome::Minus => 1,
    }
}

impl ProbabilityTable {
    pub fn get(&self, s1: Setting, s2: Setting, o1: Outcome, o2: Outcome) -> f64 {
        self.entries[s1.index()][s2.index()][outcome_index(o1)][outcome_index(o2)]
    }

    /// Sum of the four outcome probabilities for one setting pair.
    pub fn setting_sum(&self, s1: Setting, s2: Setting) -> f64 {
        self.entries[s1.index()][s2.index()]
            .iter()
            .flatten()
            .sum()
    }

    /// Rows in stable order: settings (U,U), (U,D), (D,U), (D,D), outcomes
    /// (+,+), (+,-), (-,+), (-,-) within each.
    pub fn rows(&self) -> Vec<(Setting, Setting, Outcome, Outcome, f64)> {
        let mut out = Vec::with_capacity(16);
        for s1 in Setting::ALL {
            for s2 in Setting::ALL {
                for o1 in [Outcome::Plus, Outcome::Minus] {
                    for o2 in [Outcome::Plus, Outcome::Minus] {
                        out.push((s1, s2, o1, o2, self.get(s1, s2, o1, o2)));
                    }
                }
            }
        }
        out
    }

    /// CSV export: header plus the 16 rows of [`ProbabilityTable::rows`].
    pub fn to_csv(&self) -> String {
        let mut csv = String::from("setting1,setting2,outcome1,outcome2,probability\n");
        for (s1, s2, o1, o2, p) in self.rows() {
            csv.push_str(&format!("{s1},{s2},{o1},{o2},{p}\n"));
        }
        csv
    }
}

/// Result of checking a table against the four Hardy conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardyCheck {
    pub pass: bool,
    /// Residuals of the three zero conditions, in the order
    /// `(-,-|D,D)`, `(+,+|D,U)`, `(+,+|U,D)`.
    pub zero_residuals: [f64; 3],
    /// The `(+,+|U,U)` entry that must stay strictly positive.
    pub q_entry: f64,
}

/// Everything derived from one observable choice per party.
#[derive(Clone, Debug)]
pub struct HardyModel {
    pair1: ObservablePair,
    pair2: ObservablePair,
    psi_h: PureState,
    phis: [PureState; 4],
    x00: Complex64,
    x01: Complex64,
    x10: Complex64,
    x11: Complex64,
    q: f64,
    conversion_u: LinearOperator,
    psi_prime: PureState,
    swap_m: LinearOperator,
    cheat_m: LinearOperator,
    chi: PureState,
}

impl HardyModel {
    /// Build the model for one pair of observable choices.
    ///
    /// The Hardy state is produced by Gram-Schmidt orthogonalization of the
    /// four product states associated with the Hardy conditions; its global
    /// phase is fixed so that the `<uu|` amplitude is real and positive.
    pub fn build(pair1: ObservablePair, pair2: ObservablePair) -> Result<Self> {
        let u = [Complex64::ONE, Complex64::ZERO];
        let product = |a: &[Complex64; 2], b: &[Complex64; 2]| -> Vec<Complex64> {
            vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
        };
        let phi_vecs = [
            product(&pair1.d_minus(), &pair2.d_minus()),
            product(&u, &pair2.d_plus()),
            product(&pair1.d_plus(), &u),
            product(&u, &u),
        ];
        let ortho = gram_schmidt(&phi_vecs)?;
        let mut psi = ortho[3].clone();
        // Phase convention: real positive <uu| amplitude.
        let a0 = psi[0];
        if a0.norm() <= PIVOT_TOL {
            return Err(Error::InvalidObservable {
                reason: "vanishing <uu| amplitude in the Hardy state".into(),
            });
        }
        let phase = a0 / a0.norm();
        for a in &mut psi {
            *a /= phase;
        }
        let (x00, x01, x10, x11) = (psi[0], psi[1], psi[2], psi[3]);
        let q = x00.norm_sqr();
        let psi_h = PureState::new(2, psi)?;

        let conversion_u = build_conversion_unitary(x00, x01, x10, x11)?;
        let psi_prime = PureState::new(
            2,
            vec![x01.conj(), -x00.conj(), x11.conj(), -x10.conj()],
        )?;

        let psi_conj: Vec<Complex64> = psi_h.amplitudes().iter().map(|a| a.conj()).collect();
        let swap_m = LinearOperator::rank1_projector(&psi_conj)?;

        // chi relabels party 2 from the U basis to the D basis.
        let d = pair2.d_plus();
        let d_perp = pair2.d_minus();
        let chi_amps = vec![
            x00 * d[0] + x01 * d_perp[0],
            x00 * d[1] + x01 * d_perp[1],
            x10 * d[0] + x11 * d_perp[0],
            x10 * d[1] + x11 * d_perp[1],
        ];
        let chi = PureState::new(2, chi_amps)?;
        let chi_conj: Vec<Complex64> = chi.amplitudes().iter().map(|a| a.conj()).collect();
        let cheat_m = LinearOperator::rank1_projector(&chi_conj)?;

        let phis = phi_vecs.map(|v| PureState::new(2, v).expect("product states are normalized"));

        Ok(HardyModel {
            pair1,
            pair2,
            psi_h,
            phis,
            x00,
            x01,
            x10,
            x11,
            q,
            conversion_u,
            psi_prime,
            swap_m,
            cheat_m,
            chi,
        })
    }

    pub fn pair1(&self) -> &ObservablePair {
        &self.pair1
    }

    pub fn pair2(&self) -> &ObservablePair {
        &self.pair2
    }

    /// The shared Hardy state.
    pub fn psi_h(&self) -> &PureState {
        &self.psi_h
    }

    /// The product states the construction orthogonalizes against;
    /// `phi(3) = |uu>` carries the positive probability.
    pub fn phi(&self, i: usize) -> &PureState {
        &self.phis[i]
    }

    pub fn x00(&self) -> Complex64 {
        self.x00
    }

    pub fn x01(&self) -> Complex64 {
        self.x01
    }

    pub fn x10(&self) -> Complex64 {
        self.x10
    }

    pub fn x11(&self) -> Complex64 {
        self.x11
    }

    /// The nonzero Hardy probability `P(+,+|U,U)`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Two-qubit unitary converting `|u>_a |Phi+>` into the two-branch state
    /// whose `|u>_a` branch is the Hardy pair.
    pub fn conversion_unitary(&self) -> &LinearOperator {
        &self.conversion_u
    }

    /// The discarded `|u_perp>_a` conversion branch.
    pub fn psi_prime(&self) -> &PureState {
        &self.psi_prime
    }

    /// Swap projector onto the conjugated Hardy state.
    pub fn swap_projector(&self) -> &LinearOperator {
        &self.swap_m
    }

    /// Cheating projector onto the conjugated `chi`, and `chi` itself.
    pub fn cheat_projector(&self) -> (&LinearOperator, &PureState) {
        (&self.cheat_m, &self.chi)
    }

    pub fn chi(&self) -> &PureState {
        &self.chi
    }

    /// Eigenbasis of `setting` for party 1 or 2 (0-indexed subsystem).
    pub fn basis(&self, party_subsystem: usize, setting: Setting) -> LocalBasis {
        match party_subsystem {
            0 => self.pair1.basis(setting),
            1 => self.pair2.basis(setting),
            other => panic!("two-qubit model has no subsystem {other}"),
        }
    }

    /// Exact Born probabilities of a two-qubit state under this model's
    /// observables.
    pub fn probability_table(&self, state: &PureState) -> Result<ProbabilityTable> {
        probability_table(state, &self.pair1, &self.pair2)
    }
}

/// Conversion unitary from the Hardy coefficients: the images of `|uu>` and
/// `|u u_perp>` are fixed by the branch identity, the remaining two columns
/// are an orthonormal completion computed by Gram-Schmidt.
fn build_conversion_unitary(
    x00: Complex64,
    x01: Complex64,
    x10: Complex64,
    x11: Complex64,
) -> Result<LinearOperator> {
    let col0 = vec![x00, x10, x01.conj(), x11.conj()];
    let col1 = vec![x01, x11, -x00.conj(), -x10.conj()];
    let mut columns = vec![col0, col1];
    for candidate in 0..4 {
        if columns.len() == 4 {
            break;
        }
        let mut trial: Vec<Vec<Complex64>> = columns.clone();
        let mut e = vec![Complex64::ZERO; 4];
        e[candidate] = Complex64::ONE;
        trial.push(e);
        if let Ok(ortho) = gram_schmidt(&trial) {
            columns.push(ortho[columns.len()].clone());
        }
    }
    debug_assert_eq!(columns.len(), 4);
    let mut matrix = vec![Complex64::ZERO; 16];
    for (c, col) in columns.iter().enumerate() {
        for r in 0..4 {
            matrix[r * 4 + c] = col[r];
        }
    }
    LinearOperator::unitary(2, matrix)
}

/// Closed form of the nonzero Hardy probability,
/// `|a1 a2|^2 |b1 b2|^2 / (1 - |a1 a2|^2)`.
pub fn q_value(pair1: &ObservablePair, pair2: &ObservablePair) -> f64 {
    let a = pair1.alpha.norm_sqr() * pair2.alpha.norm_sqr();
    let b = pair1.beta.norm_sqr() * pair2.beta.norm_sqr();
    a * b / (1.0 - a)
}

/// Maximize `q` over real symmetric observables (`alpha1 = alpha2 = alpha`).
///
/// Returns `(alpha_opt, q_max)`. The function is unimodal on (0, 1), so a
/// ternary search converges to machine precision.
pub fn q_max_search() -> (f64, f64) {
    let q_of = |a: f64| {
        let pair = ObservablePair::from_alpha_real(a).expect("interior alpha");
        q_value(&pair, &pair)
    };
    let (mut lo, mut hi) = (0.01f64, 0.99f64);
    while hi - lo > 1e-12 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if q_of(m1) < q_of(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let alpha_opt = 0.5 * (lo + hi);
    (alpha_opt, q_of(alpha_opt))
}

/// The analytic maximizer `|alpha| = sqrt((sqrt(5) - 1)/2)`.
pub fn optimal_alpha() -> f64 {
    ((5.0f64.sqrt() - 1.0) / 2.0).sqrt()
}

/// The analytic maximum `(5 sqrt(5) - 11)/2`.
pub fn q_max_analytic() -> f64 {
    (5.0 * 5.0f64.sqrt() - 11.0) / 2.0
}

/// Exact Born probabilities of `state` for all four setting pairs.
pub fn probability_table(
    state: &PureState,
    pair1: &ObservablePair,
    pair2: &ObservablePair,
) -> Result<ProbabilityTable> {
    if state.subsystems() != 2 {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: 4,
        });
    }
    let mut entries = [[[[0.0f64; 2]; 2]; 2]; 2];
    for s1 in Setting::ALL {
        let b1 = pair1.basis(s1);
        for s2 in Setting::ALL {
            let b2 = pair2.basis(s2);
            for (i1, o1) in [Outcome::Plus, Outcome::Minus].into_iter().enumerate() {
                let e1 = b1.eigenvector(o1);
                for (i2, o2) in [Outcome::Plus, Outcome::Minus].into_iter().enumerate() {
                    let e2 = b2.eigenvector(o2);
                    let mut amp = Complex64::ZERO;
                    for k in 0..2 {
                        for l in 0..2 {
                            amp += (e1[k] * e2[l]).conj() * state.amplitude(2 * k + l);
                        }
                    }
                    entries[s1.index()][s2.index()][i1][i2] = amp.norm_sqr();
                }
            }
        }
    }
    Ok(ProbabilityTable { entries })
}

/// Check the four Hardy conditions: the three zero probabilities must not
/// exceed `tol` and the `(+,+|U,U)` entry must exceed it.
pub fn check_hardy_conditions(table: &ProbabilityTable, tol: f64) -> HardyCheck {
    let zero_residuals = [
        table.get(Setting::D, Setting::D, Outcome::Minus, Outcome::Minus),
        table.get(Setting::D, Setting::U, Outcome::Plus, Outcome::Plus),
        table.get(Setting::U, Setting::D, Outcome::Plus, Outcome::Plus),
    ];
    let q_entry = table.get(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus);
    HardyCheck {
        pass: zero_residuals.iter().all(|&r| r <= tol) && q_entry > tol,
        zero_residuals,
        q_entry,
    }
}

/// The forbidden (probability-zero) joint events, keyed by setting pair.
/// Returns true when `(o1, o2)` under `(s1, s2)` contradicts the Hardy
/// conditions.
pub fn forbidden_event(s1: Setting, s2: Setting, o1: Outcome, o2: Outcome) -> bool {
    match (s1, s2) {
        (Setting::D, Setting::D) => o1 == Outcome::Minus && o2 == Outcome::Minus,
        (Setting::D, Setting::U) | (Setting::U, Setting::D) => {
            o1 == Outcome::Plus && o2 == Outcome::Plus
        }
        (Setting::U, Setting::U) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply, collapse, fidelity, project_out, tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SYMMETRIC_X00: f64 = 0.288_675_134_594_812_87; // 1/(2 sqrt(3))
    const SYMMETRIC_X11: f64 = -0.866_025_403_784_438_6; // -sqrt(3)/2

    fn symmetric_model() -> HardyModel {
        let pair = ObservablePair::from_alpha_real(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        HardyModel::build(pair, pair).unwrap()
    }

    fn optimal_model() -> HardyModel {
        let pair = ObservablePair::from_alpha_real(optimal_alpha()).unwrap();
        HardyModel::build(pair, pair).unwrap()
    }

    #[test]
    fn boundary_alpha_rejected() {
        assert!(ObservablePair::from_alpha_real(0.0).is_err());
        assert!(ObservablePair::from_alpha_real(1.0 - 1e-12).is_err());
        assert!(ObservablePair::new(Complex64::ONE, Complex64::ZERO).is_err());
        let bad_norm = ObservablePair::new(Complex64::new(0.8, 0.0), Complex64::new(0.8, 0.0));
        assert!(bad_norm.is_err());
    }

    #[test]
    fn symmetric_coefficients_match_closed_form() {
        let m = symmetric_model();
        assert!((m.x00() - Complex64::new(SYMMETRIC_X00, 0.0)).norm() < NORM_TOL);
        assert!((m.x01() - Complex64::new(-SYMMETRIC_X00, 0.0)).norm() < NORM_TOL);
        assert!((m.x10() - m.x01()).norm() < NORM_TOL);
        assert!((m.x11() - Complex64::new(SYMMETRIC_X11, 0.0)).norm() < NORM_TOL);
        let norm = m.x00().norm_sqr() + 2.0 * m.x01().norm_sqr() + m.x11().norm_sqr();
        assert!((norm - 1.0).abs() < NORM_TOL);
    }

    /// The coefficient formulas for general complex observables, checked
    /// against the Gram-Schmidt construction.
    #[test]
    fn printed_coefficients_hold_for_complex_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let pair = ObservablePair::random(&mut rng);
            let m = HardyModel::build(pair, pair).unwrap();
            let (a, b) = (pair.alpha(), pair.beta());
            let root = (1.0 - a.norm_sqr() * a.norm_sqr()).sqrt();
            let x00 = (a.norm() * b.norm()).powi(2) / root;
            let x01 = -a.conj() * b * a.norm_sqr() / root;
            let x11 = -a.conj() * a.conj() * b * b * root / (a.norm() * b.norm()).powi(2);
            assert!((m.x00() - Complex64::new(x00, 0.0)).norm() < 1e-11);
            assert!((m.x01() - x01).norm() < 1e-11);
            assert!((m.x11() - x11).norm() < 1e-11);
        }
    }

    #[test]
    fn q_matches_closed_form_and_overlap() {
        let m = symmetric_model();
        assert!((m.q() - 1.0 / 12.0).abs() < NORM_TOL);
        assert!((q_value(m.pair1(), m.pair2()) - 1.0 / 12.0).abs() < NORM_TOL);

        let m = optimal_model();
        assert!((m.q() - q_max_analytic()).abs() < NORM_TOL);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p1 = ObservablePair::random(&mut rng);
            let p2 = ObservablePair::random(&mut rng);
            let m = HardyModel::build(p1, p2).unwrap();
            let overlap = m.psi_h().amplitude(0).norm_sqr();
            assert!((overlap - q_value(&p1, &p2)).abs() < NORM_TOL);
            assert!((m.q() - q_value(&p1, &p2)).abs() < NORM_TOL);
        }
    }

    #[test]
    fn psi_h_is_orthogonal_to_the_zero_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let m = HardyModel::build(
                ObservablePair::random(&mut rng),
                ObservablePair::random(&mut rng),
            )
            .unwrap();
            for i in 0..3 {
                assert!(fidelity(m.phi(i), m.psi_h()).unwrap() < NORM_TOL);
            }
            assert!((fidelity(m.phi(3), m.psi_h()).unwrap() - m.q()).abs() < NORM_TOL);
        }
    }

    #[test]
    fn q_max_search_finds_the_analytic_maximum() {
        let (alpha_opt, q_max) = q_max_search();
        assert!((q_max - q_max_analytic()).abs() < 1e-9);
        assert!((alpha_opt * alpha_opt - (5.0f64.sqrt() - 1.0) / 2.0).abs() < 1e-6);
        // Interior maximum: nearby points are strictly below.
        for da in [-0.05, 0.05] {
            let pair = ObservablePair::from_alpha_real(alpha_opt + da).unwrap();
            assert!(q_value(&pair, &pair) < q_max);
        }
    }

    #[test]
    fn conversion_identity_holds() {
        for m in [symmetric_model(), optimal_model()] {
            let input = tensor(&PureState::basis_state(1, 0), &PureState::bell_phi_plus()).unwrap();
            let out = apply(m.conversion_unitary(), &[0, 1], &input).unwrap();

            let u = [Complex64::ONE, Complex64::ZERO];
            let (branch_u, p_u) = project_out(&u, &[0], &out).unwrap();
            assert!((p_u - 0.5).abs() < NORM_TOL);
            assert!(fidelity(&branch_u, m.psi_h()).unwrap() > 1.0 - NORM_TOL);

            let u_perp = [Complex64::ZERO, Complex64::ONE];
            let (branch_perp, p_perp) = project_out(&u_perp, &[0], &out).unwrap();
            assert!((p_perp - 0.5).abs() < NORM_TOL);
            assert!(fidelity(&branch_perp, m.psi_prime()).unwrap() > 1.0 - NORM_TOL);

            // Whole two-branch state, not just its marginals.
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut expected = vec![Complex64::ZERO; 8];
            for i in 0..4 {
                expected[i] = h * m.psi_h().amplitude(i);
                expected[4 + i] = h * m.psi_prime().amplitude(i);
            }
            let expected = PureState::new(3, expected).unwrap();
            assert!(fidelity(&out, &expected).unwrap() > 1.0 - NORM_TOL);

            assert!(m.conversion_unitary().unitarity_deviation() < NORM_TOL);
        }
    }

    #[test]
    fn ancilla_collapse_probability_is_half() {
        let m = symmetric_model();
        let input = tensor(&PureState::basis_state(1, 0), &PureState::bell_phi_plus()).unwrap();
        let out = apply(m.conversion_unitary(), &[0, 1], &input).unwrap();
        let proj = LinearOperator::rank1_projector(&[Complex64::ONE, Complex64::ZERO]).unwrap();
        let (_, p) = collapse(&proj, &[0], &out).unwrap();
        assert!((p - 0.5).abs() < NORM_TOL);
    }

    fn swap_identity_case(proj: &LinearOperator, kept: &PureState) {
        let two_pairs = tensor(&PureState::bell_phi_plus(), &PureState::bell_phi_plus()).unwrap();
        // Qubits (0, 2) are the distributor's halves of the two pairs.
        let (collapsed, p) = collapse(proj, &[0, 2], &two_pairs).unwrap();
        assert!((p - 0.25).abs() < NORM_TOL);

        // The collapsed state factorizes as kept* on (0,2) x kept on (1,3).
        let kept_conj: Vec<Complex64> = kept.amplitudes().iter().map(|a| a.conj()).collect();
        let mut expected = vec![Complex64::ZERO; 16];
        for i0 in 0..2 {
            for i1 in 0..2 {
                for i2 in 0..2 {
                    for i3 in 0..2 {
                        expected[8 * i0 + 4 * i1 + 2 * i2 + i3] =
                            kept_conj[2 * i0 + i2] * kept.amplitude(2 * i1 + i3);
                    }
                }
            }
        }
        let expected = PureState::new(4, expected).unwrap();
        assert!(fidelity(&collapsed, &expected).unwrap() > 1.0 - NORM_TOL);

        // Remote qubits (1, 3) end up in the kept state exactly.
        let (remote, p2) = project_out(&kept_conj, &[0, 2], &two_pairs).unwrap();
        assert!((p2 - 0.25).abs() < NORM_TOL);
        assert!(fidelity(&remote, kept).unwrap() > 1.0 - NORM_TOL);
    }

    #[test]
    fn swap_identities_hold_for_m_and_m_prime() {
        for m in [symmetric_model(), optimal_model()] {
            swap_identity_case(m.swap_projector(), m.psi_h());
            let (cheat, chi) = m.cheat_projector();
            swap_identity_case(cheat, chi);
            assert!((m.swap_projector().trace_re() - 1.0).abs() < NORM_TOL);
            assert!((cheat.trace_re() - 1.0).abs() < NORM_TOL);
        }
    }

    /// The printed component expansion of the conjugated cheating state.
    #[test]
    fn chi_conjugate_matches_component_formula() {
        let m = symmetric_model();
        let (a, b) = (m.pair2().alpha(), m.pair2().beta());
        let (x00, x01, x11) = (m.x00(), m.x01(), m.x11());
        let d_conj = [a.conj(), b.conj()];
        let d_perp_conj = [b, -a];
        let mut printed = vec![Complex64::ZERO; 4];
        for l in 0..2 {
            printed[l] += x00.conj() * d_conj[l] + x01.conj() * d_perp_conj[l];
            printed[2 + l] += x01.conj() * d_conj[l] + x11.conj() * d_perp_conj[l];
        }
        for (i, amp) in printed.iter().enumerate() {
            assert!((m.chi().amplitude(i).conj() - amp).norm() < NORM_TOL);
        }
    }

    #[test]
    fn chi_table_is_the_setting_flipped_hardy_table() {
        let m = symmetric_model();
        let psi_table = m.probability_table(m.psi_h()).unwrap();
        let chi_table = m.probability_table(m.chi()).unwrap();
        for (s1, s2, o1, o2, p_chi) in chi_table.rows() {
            let p_psi = psi_table.get(s1, s2.flipped(), o1, o2);
            assert!(
                (p_chi - p_psi).abs() < NORM_TOL,
                "mismatch at {s1}{s2}{o1}{o2}: {p_chi} vs {p_psi}"
            );
        }
        let p_dd_mm = chi_table.get(Setting::D, Setting::D, Outcome::Minus, Outcome::Minus);
        assert!((p_dd_mm - 1.0 / 6.0).abs() < NORM_TOL);
        let p_uu_pp = chi_table.get(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus);
        assert!(p_uu_pp < NORM_TOL);
    }

    #[test]
    fn table_zeros_match_the_hardy_conditions() {
        let m = symmetric_model();
        let table = m.probability_table(m.psi_h()).unwrap();
        let zero_entries: Vec<_> = table
            .rows()
            .into_iter()
            .filter(|&(_, _, _, _, p)| p < NORM_TOL)
            .map(|(s1, s2, o1, o2, _)| (s1, s2, o1, o2))
            .collect();
        assert_eq!(
            zero_entries,
            vec![
                (Setting::U, Setting::D, Outcome::Plus, Outcome::Plus),
                (Setting::D, Setting::U, Outcome::Plus, Outcome::Plus),
                (Setting::D, Setting::D, Outcome::Minus, Outcome::Minus),
            ]
        );
        let q_entry = table.get(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus);
        assert!((q_entry - m.q()).abs() < NORM_TOL);
        let p_du_mm = table.get(Setting::D, Setting::U, Outcome::Minus, Outcome::Minus);
        assert!((p_du_mm - 1.0 / 6.0).abs() < NORM_TOL);
    }

    #[test]
    fn sampling_never_yields_the_forbidden_dd_outcome() {
        let m = symmetric_model();
        let d_basis = m.pair1().d_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        for _ in 0..500 {
            let (o1, collapsed, _) =
                crate::qcore::measure_local(m.psi_h(), 0, &d_basis, &mut rng).unwrap();
            let (o2, _, _) = crate::qcore::measure_local(&collapsed, 1, &d_basis, &mut rng).unwrap();
            assert!(
                !(o1 == Outcome::Minus && o2 == Outcome::Minus),
                "P(-,-|D,D) = 0 was violated by sampling"
            );
        }
    }

    #[test]
    fn table_rows_sum_to_one_per_setting_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let m = HardyModel::build(
            ObservablePair::random(&mut rng),
            ObservablePair::random(&mut rng),
        )
        .unwrap();
        for state in [m.psi_h(), m.chi(), m.psi_prime()] {
            let table = m.probability_table(state).unwrap();
            for s1 in Setting::ALL {
                for s2 in Setting::ALL {
                    assert!((table.setting_sum(s1, s2) - 1.0).abs() < NORM_TOL);
                }
            }
            assert!(table.rows().iter().all(|&(_, _, _, _, p)| p >= 0.0));
        }
    }

    #[test]
    fn hardy_check_classifies_states() {
        let m = symmetric_model();
        let tol = NORM_TOL;

        let check = check_hardy_conditions(&m.probability_table(m.psi_h()).unwrap(), tol);
        assert!(check.pass);
        assert!(check.zero_residuals.iter().all(|&r| r < tol));

        let check = check_hardy_conditions(&m.probability_table(m.chi()).unwrap(), tol);
        assert!(!check.pass);
        assert!(check.zero_residuals[0] > tol); // (-,-|D,D) violated

        let product = tensor(
            &PureState::basis_state(1, 0),
            &PureState::basis_state(1, 0),
        )
        .unwrap();
        let check = check_hardy_conditions(&m.probability_table(&product).unwrap(), tol);
        assert!(!check.pass);
    }

    #[test]
    fn csv_export_has_sixteen_stable_rows() {
        let m = symmetric_model();
        let csv = m.probability_table(m.psi_h()).unwrap().to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[0], "setting1,setting2,outcome1,outcome2,probability");
        assert!(lines[1].starts_with("U,U,+,+,"));
        assert!(lines[16].starts_with("D,D,-,-,"));
    }

    #[test]
    fn fifty_random_pairs_satisfy_construction_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        for _ in 0..50 {
            let p1 = ObservablePair::random(&mut rng);
            let p2 = ObservablePair::random(&mut rng);
            let m = HardyModel::build(p1, p2).unwrap();
            let table = m.probability_table(m.psi_h()).unwrap();
            let check = check_hardy_conditions(&table, NORM_TOL);
            assert!(check.pass);
            assert!((m.q() - q_value(&p1, &p2)).abs() < NORM_TOL);
        }
    }
}
