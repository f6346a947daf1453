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

use super::PIVOT_TOL;
use crate::{Error, Result};

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalize `vectors` in order, preserving the spanned subspace.
///
/// Modified Gram-Schmidt with a second orthogonalization pass, so the output
/// is orthonormal to machine precision even for moderately skewed input. A
/// pivot norm at or below [`PIVOT_TOL`] signals linear dependence and fails
/// loudly instead of renormalizing noise.
pub fn gram_schmidt(vectors: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if let Some(first) = basis.first() {
            if first.len() != v.len() {
                return Err(Error::DimensionMismatch {
                    left: first.len(),
                    right: v.len(),
                });
            }
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let pivot = norm(&w);
        if pivot <= PIVOT_TOL {
            return Err(Error::DegenerateInput { pivot });
        }
        for wi in &mut w {
            *wi /= pivot;
        }
        basis.push(w);
    }
    Ok(basis)
}
