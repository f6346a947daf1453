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

use super::{NORM_TOL, gram_schmidt};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Projector,
}

/// Dense operator on `k` two-level subsystems, validated at construction
/// against its flag: `U^dag U = I` for unitaries, `P^2 = P = P^dag` for
/// projectors, both within [`NORM_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    arity: usize,
    dim: usize,
    kind: OperatorKind,
    matrix: Vec<Complex64>,
}

impl LinearOperator {
    pub fn unitary(arity: usize, matrix: Vec<Complex64>) -> Result<Self> {
        let op = Self::raw(arity, matrix, OperatorKind::Unitary)?;
        let deviation = op.unitarity_deviation();
        if deviation > NORM_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(op)
    }

    pub fn projector(arity: usize, matrix: Vec<Complex64>) -> Result<Self> {
        let op = Self::raw(arity, matrix, OperatorKind::Projector)?;
        let deviation = op.projector_deviation();
        if deviation > NORM_TOL {
            return Err(Error::NotProjector { deviation });
        }
        Ok(op)
    }

    /// Rank-one projector `|v><v|` onto a unit vector of dimension `2^k`.
    pub fn rank1_projector(ket: &[Complex64]) -> Result<Self> {
        let dim = ket.len();
        let mut matrix = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                matrix[r * dim + c] = ket[r] * ket[c].conj();
            }
        }
        Self::projector(dim.trailing_zeros() as usize, matrix)
    }

    pub fn identity(arity: usize) -> Self {
        let dim = 1usize << arity;
        let mut matrix = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = Complex64::ONE;
        }
        LinearOperator {
            arity,
            dim,
            kind: OperatorKind::Unitary,
            matrix,
        }
    }

    /// Haar-ish random unitary from Gram-Schmidt on random Gaussian-free
    /// columns; good enough for property tests.
    pub fn random_unitary<R: Rng + ?Sized>(arity: usize, rng: &mut R) -> Self {
        let dim = 1usize << arity;
        loop {
            let columns: Vec<Vec<Complex64>> = (0..dim)
                .map(|_| {
                    (0..dim)
                        .map(|_| {
                            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                        })
                        .collect()
                })
                .collect();
            if let Ok(ortho) = gram_schmidt(&columns) {
                let mut matrix = vec![Complex64::ZERO; dim * dim];
                for (c, col) in ortho.iter().enumerate() {
                    for r in 0..dim {
                        matrix[r * dim + c] = col[r];
                    }
                }
                return LinearOperator::unitary(arity, matrix)
                    .expect("orthonormal columns form a unitary");
            }
        }
    }

    /// Complement `I - P` of a projector.
    pub fn complement(&self) -> Result<Self> {
        if self.kind != OperatorKind::Projector {
            return Err(Error::WrongOperatorKind {
                flagged: "projector",
            });
        }
        let mut matrix = self.matrix.clone();
        for (i, entry) in matrix.iter_mut().enumerate() {
            *entry = -*entry;
            if i % self.dim == i / self.dim {
                *entry += Complex64::ONE;
            }
        }
        Self::projector(self.arity, matrix)
    }

    fn raw(arity: usize, matrix: Vec<Complex64>, kind: OperatorKind) -> Result<Self> {
        let dim = 1usize
            .checked_shl(arity as u32)
            .filter(|d| d * d == matrix.len())
            .ok_or(Error::InvalidDimension {
                len: matrix.len(),
                n: arity,
            })?;
        Ok(LinearOperator {
            arity,
            dim,
            kind,
            matrix,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    /// Max-entry deviation of `U^dag U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut acc = Complex64::ZERO;
                for k in 0..d {
                    acc += self.element(k, r).conj() * self.element(k, c);
                }
                let expected = if r == c { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }

    /// Max-entry deviation from `P^2 = P` and `P^dag = P`.
    pub fn projector_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut acc = Complex64::ZERO;
                for k in 0..d {
                    acc += self.element(r, k) * self.element(k, c);
                }
                worst = worst.max((acc - self.element(r, c)).norm());
                worst = worst.max((self.element(c, r).conj() - self.element(r, c)).norm());
            }
        }
        worst
    }

    /// Trace, real part (projector rank for exact projectors).
    pub fn trace_re(&self) -> f64 {
        (0..self.dim).map(|i| self.element(i, i).re).sum()
    }
}
