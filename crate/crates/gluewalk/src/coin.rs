//! Coin operators: the unitaries acting on the walker's internal space.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for the unitarity check C\u{2020}C = I.
pub const UNITARITY_TOL: f64 = 1e-12;

/// A k x k unitary acting on the coin space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    dim: usize,
    /// Row-major entries.
    entries: Vec<Complex64>,
}

impl CoinOperator {
    /// The Grover coin of dimension k: diagonal a = 2/k - 1, off-diagonal
    /// b = 2/k, i.e. (2/k)J - I. For k = 3 this is the coin used on the
    /// glued-trees graphs; for k = 2 it degenerates to the swap.
    pub fn grover(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::CoinDimensionTooSmall(dim));
        }
        let a = 2.0 / dim as f64 - 1.0;
        let b = 2.0 / dim as f64;
        let entries = (0..dim * dim)
            .map(|i| {
                let val = if i / dim == i % dim { a } else { b };
                Complex64::new(val, 0.0)
            })
            .collect();
        Ok(Self { dim, entries })
    }

    /// Wraps an arbitrary square matrix as a coin, rejecting non-unitary input.
    pub fn custom(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        let coin = Self { dim, entries };
        let defect = coin.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(Error::NonUnitaryCoin {
                max_deviation: defect,
            });
        }
        Ok(coin)
    }

    /// The 2x2 Hadamard coin used for walks on the line.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            dim: 2,
            entries: vec![
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        }
    }

    /// Identity coin of dimension k.
    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim * dim)
            .map(|i| {
                if i / dim == i % dim {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Row-major entries, length dim^2.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Max entrywise deviation of C\u{2020}C from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let k = self.dim;
        let mut max = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let mut sum = Complex64::new(0.0, 0.0);
                for m in 0..k {
                    sum += self.entry(m, i).conj() * self.entry(m, j);
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                max = max.max((sum - expected).norm());
            }
        }
        max
    }
}
