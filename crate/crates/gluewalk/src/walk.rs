//! Step evolution: coin, shift, and the Hadamard walk on the line.
//!
//! One step applies the coin to every vertex's coin block and then the shift
//! permutation, U = S (1 (x) C). The shift is never materialized as a matrix:
//! because the port map is an involution, S is a product of disjoint
//! transpositions and applying it means swapping paired entries (rows,
//! columns) in place.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coin::CoinOperator;
use crate::error::{Error, Result};
use crate::graph::PortLabeledGraph;
use crate::state::{InitialCondition, WalkState};

/// The shift permutation on the |v,c> basis, stored as index pairs.
#[derive(Debug, Clone)]
pub struct ShiftOperator {
    dim: usize,
    coin_dim: usize,
    perm: Vec<usize>,
    /// Transpositions (i, j) with i < j; fixed points (self loops) excluded.
    swap_pairs: Vec<(usize, usize)>,
}

/// Builds the shift for a validated graph: (v, c) maps to port_map(v, c).
pub fn shift_operator(graph: &PortLabeledGraph) -> ShiftOperator {
    let k = graph.degree();
    let dim = graph.num_vertices() * k;
    let mut perm = vec![0usize; dim];
    let mut swap_pairs = Vec::new();
    for v in 0..graph.num_vertices() {
        for c in 0..k {
            let (w, cc) = graph.port(v, c);
            let from = v * k + c;
            let to = w * k + cc;
            perm[from] = to;
            if from < to {
                swap_pairs.push((from, to));
            }
        }
    }
    ShiftOperator {
        dim,
        coin_dim: k,
        perm,
        swap_pairs,
    }
}

impl ShiftOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Image of basis index i = v * k + c under S.
    pub fn image(&self, index: usize) -> usize {
        self.perm[index]
    }

    /// Applies S to an amplitude vector in place.
    pub fn apply_to_vector(&self, psi: &mut [Complex64]) {
        for &(i, j) in &self.swap_pairs {
            psi.swap(i, j);
        }
    }

    /// Swaps paired rows of a row-major dim x dim matrix (left action of S).
    fn apply_to_rows(&self, data: &mut [Complex64]) {
        let n = self.dim;
        for &(i, j) in &self.swap_pairs {
            let (head, tail) = data.split_at_mut(j * n);
            head[i * n..(i + 1) * n].swap_with_slice(&mut tail[..n]);
        }
    }

    /// Swaps paired columns (right action of S), one row at a time.
    fn apply_to_cols(&self, data: &mut [Complex64]) {
        let n = self.dim;
        data.par_chunks_exact_mut(n).for_each(|row| {
            for &(i, j) in &self.swap_pairs {
                row.swap(i, j);
            }
        });
    }
}

fn check_dims(state: &WalkState, coin: &CoinOperator, shift: &ShiftOperator) -> Result<()> {
    if coin.dim() != state.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: state.coin_dim(),
            actual: coin.dim(),
        });
    }
    if shift.dim != state.dim() || shift.coin_dim != state.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: shift.dim,
        });
    }
    Ok(())
}

/// One step of the pure-state walk: psi <- S (1 (x) C) psi.
///
/// O(|V| k^2) for the coin blocks plus O(|V| k) for the permutation.
pub fn step_pure(state: &mut WalkState, coin: &CoinOperator, shift: &ShiftOperator) -> Result<()> {
    check_dims(state, coin, shift)?;
    let k = coin.dim();
    let psi = state.pure_mut()?;
    let mut tmp = vec![Complex64::new(0.0, 0.0); k];
    for block in psi.chunks_exact_mut(k) {
        for (c, t) in tmp.iter_mut().enumerate() {
            *t = (0..k).map(|cc| coin.entry(c, cc) * block[cc]).sum();
        }
        block.copy_from_slice(&tmp);
    }
    shift.apply_to_vector(psi);
    Ok(())
}

/// One step of the density-matrix walk: rho <- U rho U\u{2020}, U = S (1 (x) C).
///
/// Applied as structured row transforms then column transforms (coin blocks
/// followed by permutation swaps on each side), O(N^2 k) for N = |V| k.
/// Elementwise results do not depend on the rayon thread count.
pub fn step_density(state: &mut WalkState, coin: &CoinOperator, shift: &ShiftOperator) -> Result<()> {
    check_dims(state, coin, shift)?;
    let k = coin.dim();
    let n = state.dim();
    let rho = state.density_mut()?;
    let data = rho.data_mut();

    // Left coin: each k-row block becomes C times itself.
    data.par_chunks_exact_mut(k * n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); k],
        |tmp, block| {
            for j in 0..n {
                for (c, t) in tmp.iter_mut().enumerate() {
                    *t = (0..k).map(|cc| coin.entry(c, cc) * block[cc * n + j]).sum();
                }
                for (c, t) in tmp.iter().enumerate() {
                    block[c * n + j] = *t;
                }
            }
        },
    );
    shift.apply_to_rows(data);

    // Right coin: each k-column block becomes itself times C\u{2020}.
    data.par_chunks_exact_mut(n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); k],
        |tmp, row| {
            for block in row.chunks_exact_mut(k) {
                for (c, t) in tmp.iter_mut().enumerate() {
                    *t = (0..k)
                        .map(|cc| block[cc] * coin.entry(c, cc).conj())
                        .sum();
                }
                block.copy_from_slice(tmp);
            }
        },
    );
    shift.apply_to_cols(data);
    Ok(())
}

/// Pure Hadamard walk on the integer line.
///
/// The shift sends |p, 0> to |p - 1, 0> and |p, 1> to |p + 1, 1>. Returns the
/// position distribution after `steps` steps as a vector of length
/// 2 * steps + 1; entry i is the probability at signed offset i - steps from
/// the start position (positions -steps..=steps for a walk started at 0).
pub fn hadamard_line_walk(steps: usize, initial: &InitialCondition) -> Result<Vec<f64>> {
    let amps = &initial.coin_amplitudes;
    if amps.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: amps.len(),
        });
    }
    let width = 2 * steps + 1;
    let coin = CoinOperator::hadamard();
    // Center the start position: index steps <-> position start.
    let mut psi = vec![Complex64::new(0.0, 0.0); width * 2];
    psi[steps * 2] = amps[0];
    psi[steps * 2 + 1] = amps[1];
    let mut next = psi.clone();
    for _ in 0..steps {
        for block in psi.chunks_exact_mut(2) {
            let (a, b) = (block[0], block[1]);
            block[0] = coin.entry(0, 0) * a + coin.entry(0, 1) * b;
            block[1] = coin.entry(1, 0) * a + coin.entry(1, 1) * b;
        }
        for slot in next.iter_mut() {
            *slot = Complex64::new(0.0, 0.0);
        }
        for p in 0..width {
            if p > 0 {
                next[(p - 1) * 2] = psi[p * 2];
            }
            if p + 1 < width {
                next[(p + 1) * 2 + 1] = psi[p * 2 + 1];
            }
        }
        std::mem::swap(&mut psi, &mut next);
    }
    Ok(psi
        .chunks_exact(2)
        .map(|block| block[0].norm_sqr() + block[1].norm_sqr())
        .collect())
}
