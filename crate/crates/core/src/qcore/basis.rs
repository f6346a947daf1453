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

use super::NORM_TOL;
use crate::{Error, Result};

/// Orthonormal eigenbasis of a dichotomic single-qubit observable; the
/// `plus` vector carries eigenvalue +1, `minus` carries -1.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBasis {
    plus: [Complex64; 2],
    minus: [Complex64; 2],
}

impl LocalBasis {
    pub fn new(plus: [Complex64; 2], minus: [Complex64; 2]) -> Result<Self> {
        let n_plus: f64 = plus.iter().map(|a| a.norm_sqr()).sum();
        let n_minus: f64 = minus.iter().map(|a| a.norm_sqr()).sum();
        let overlap = (plus[0].conj() * minus[0] + plus[1].conj() * minus[1]).norm();
        let deviation = (n_plus - 1.0)
            .abs()
            .max((n_minus - 1.0).abs())
            .max(overlap);
        if deviation > NORM_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(LocalBasis { plus, minus })
    }

    /// The computational basis `{|u>, |u_perp>}`.
    pub fn computational() -> Self {
        LocalBasis {
            plus: [Complex64::ONE, Complex64::ZERO],
            minus: [Complex64::ZERO, Complex64::ONE],
        }
    }

    pub fn plus(&self) -> &[Complex64; 2] {
        &self.plus
    }

    pub fn minus(&self) -> &[Complex64; 2] {
        &self.minus
    }

    pub fn eigenvector(&self, outcome: super::Outcome) -> &[Complex64; 2] {
        match outcome {
            super::Outcome::Plus => &self.plus,
            super::Outcome::Minus => &self.minus,
        }
    }
}
