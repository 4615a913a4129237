//! Walker states over the position (x) coin space.
//!
//! The joint Hilbert space is spanned by |v,c> with the fixed basis ordering
//! index(v, c) = v * k + c. A state is held either as a pure amplitude vector
//! or as a full density matrix; the latter is what decoherent evolution needs.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for norm / trace checks on states.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Outer product |psi><psi|.
    pub fn outer(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        Self { dim, data }
    }

    /// I / dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            m.set(i, i, p);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Max entrywise |rho_ij - conj(rho_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                max = max.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        max
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Where and with which coin amplitudes the walk starts.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub start_vertex: usize,
    pub coin_amplitudes: Vec<Complex64>,
}

impl InitialCondition {
    /// Requires the coin amplitudes to be normalized within 1e-10.
    pub fn new(start_vertex: usize, coin_amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = coin_amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > NORMALIZATION_TOL {
            return Err(Error::UnnormalizedInitialState { deviation });
        }
        Ok(Self {
            start_vertex,
            coin_amplitudes,
        })
    }

    /// Real symmetric coin state (alpha, beta, beta) with alpha = sqrt(1 - 2 beta^2),
    /// placed at the given start vertex. This is the family the coin optimizer
    /// searches over: alpha rides the root's self loop, beta the two child edges.
    pub fn symmetric_triple(start_vertex: usize, beta: f64) -> Result<Self> {
        let rest = 1.0 - 2.0 * beta * beta;
        if !(0.0..=1.0).contains(&rest) {
            return Err(Error::UnnormalizedInitialState {
                deviation: rest.abs(),
            });
        }
        let alpha = rest.sqrt();
        Self::new(
            start_vertex,
            vec![
                Complex64::new(alpha, 0.0),
                Complex64::new(beta, 0.0),
                Complex64::new(beta, 0.0),
            ],
        )
    }

    /// Default glued-trees start: vertex 0 with beta = 0.638.
    pub fn default_glued_trees() -> Self {
        Self::symmetric_triple(0, 0.638).expect("0.638 is a valid beta")
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_amplitudes.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum StateData {
    Pure(Vec<Complex64>),
    Density(ComplexMatrix),
}

/// A walker state over |v,c>, either pure or as a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    num_vertices: usize,
    coin_dim: usize,
    data: StateData,
}

impl WalkState {
    /// Pure state concentrated at the initial condition's start vertex.
    pub fn pure(num_vertices: usize, initial: &InitialCondition) -> Result<Self> {
        let psi = Self::initial_vector(num_vertices, initial)?;
        Ok(Self {
            num_vertices,
            coin_dim: initial.coin_dim(),
            data: StateData::Pure(psi),
        })
    }

    /// Density matrix |psi><psi| of the initial pure state.
    pub fn density(num_vertices: usize, initial: &InitialCondition) -> Result<Self> {
        let psi = Self::initial_vector(num_vertices, initial)?;
        Ok(Self {
            num_vertices,
            coin_dim: initial.coin_dim(),
            data: StateData::Density(ComplexMatrix::outer(&psi)),
        })
    }

    /// Wraps an existing density matrix; the dimension must equal
    /// num_vertices * coin_dim.
    pub fn from_density_matrix(
        num_vertices: usize,
        coin_dim: usize,
        rho: ComplexMatrix,
    ) -> Result<Self> {
        if rho.dim() != num_vertices * coin_dim {
            return Err(Error::DimensionMismatch {
                expected: num_vertices * coin_dim,
                actual: rho.dim(),
            });
        }
        Ok(Self {
            num_vertices,
            coin_dim,
            data: StateData::Density(rho),
        })
    }

    fn initial_vector(num_vertices: usize, initial: &InitialCondition) -> Result<Vec<Complex64>> {
        if initial.start_vertex >= num_vertices {
            return Err(Error::StartVertexOutOfRange {
                vertex: initial.start_vertex,
                num_vertices,
            });
        }
        let k = initial.coin_dim();
        let mut psi = vec![Complex64::new(0.0, 0.0); num_vertices * k];
        for (c, amp) in initial.coin_amplitudes.iter().enumerate() {
            psi[initial.start_vertex * k + c] = *amp;
        }
        Ok(psi)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Total Hilbert-space dimension |V| * k.
    pub fn dim(&self) -> usize {
        self.num_vertices * self.coin_dim
    }

    pub fn is_density(&self) -> bool {
        matches!(self.data, StateData::Density(_))
    }

    pub fn as_pure(&self) -> Option<&[Complex64]> {
        match &self.data {
            StateData::Pure(psi) => Some(psi),
            StateData::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&ComplexMatrix> {
        match &self.data {
            StateData::Pure(_) => None,
            StateData::Density(rho) => Some(rho),
        }
    }

    pub(crate) fn pure_mut(&mut self) -> Result<&mut Vec<Complex64>> {
        match &mut self.data {
            StateData::Pure(psi) => Ok(psi),
            StateData::Density(_) => Err(Error::PureRequired),
        }
    }

    pub(crate) fn density_mut(&mut self) -> Result<&mut ComplexMatrix> {
        match &mut self.data {
            StateData::Pure(_) => Err(Error::DensityRequired),
            StateData::Density(rho) => Ok(rho),
        }
    }

    /// Converts to the density representation (pure states become |psi><psi|).
    pub fn to_density(&self) -> Self {
        match &self.data {
            StateData::Pure(psi) => Self {
                num_vertices: self.num_vertices,
                coin_dim: self.coin_dim,
                data: StateData::Density(ComplexMatrix::outer(psi)),
            },
            StateData::Density(_) => self.clone(),
        }
    }

    /// ||psi||^2 for pure states, Re tr(rho) for density matrices.
    pub fn total_probability(&self) -> f64 {
        match &self.data {
            StateData::Pure(psi) => psi.iter().map(|a| a.norm_sqr()).sum(),
            StateData::Density(rho) => rho.trace().re,
        }
    }

    /// Per-vertex position distribution P(v) = sum_c <v,c|rho|v,c>.
    ///
    /// Entries are clamped to zero from below; rounding can leave diagonal
    /// values a hair negative (>= -1e-12 for valid states).
    pub fn measure_positions(&self) -> Vec<f64> {
        let k = self.coin_dim;
        let mut probs = vec![0.0f64; self.num_vertices];
        match &self.data {
            StateData::Pure(psi) => {
                for (i, amp) in psi.iter().enumerate() {
                    probs[i / k] += amp.norm_sqr();
                }
            }
            StateData::Density(rho) => {
                for v in 0..self.num_vertices {
                    for c in 0..k {
                        probs[v] += rho.get(v * k + c, v * k + c).re;
                    }
                }
            }
        }
        for p in &mut probs {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        probs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn initial_condition_rejects_unnormalized() {
        let amps = vec![Complex64::new(0.9, 0.0), Complex64::new(0.9, 0.0)];
        assert!(matches!(
            InitialCondition::new(0, amps),
            Err(Error::UnnormalizedInitialState { .. })
        ));
    }

    #[test]
    fn default_coin_is_normalized_with_expected_alpha() {
        let init = InitialCondition::default_glued_trees();
        let alpha = init.coin_amplitudes[0].re;
        assert!((alpha - (1.0 - 2.0 * 0.638f64 * 0.638).sqrt()).abs() < TOL);
        assert!((alpha - 0.431).abs() < 1e-3);
        let norm: f64 = init.coin_amplitudes.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < TOL);
    }

    #[test]
    fn measure_positions_of_initial_state_is_a_point_mass() {
        let init = InitialCondition::default_glued_trees();
        let state = WalkState::pure(10, &init).unwrap();
        let probs = state.measure_positions();
        assert!((probs[0] - 1.0).abs() < TOL);
        assert!(probs[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn uniform_superposition_measures_uniformly() {
        let v = 5;
        let k = 3;
        let amp = Complex64::new(1.0 / ((v * k) as f64).sqrt(), 0.0);
        let psi = vec![amp; v * k];
        let state = WalkState {
            num_vertices: v,
            coin_dim: k,
            data: StateData::Pure(psi),
        };
        for p in state.measure_positions() {
            assert!((p - 1.0 / v as f64).abs() < TOL);
        }
    }

    #[test]
    fn density_of_pure_state_agrees_with_pure_measurement() {
        let init = InitialCondition::symmetric_triple(2, 0.5).unwrap();
        let pure = WalkState::pure(4, &init).unwrap();
        let dense = WalkState::density(4, &init).unwrap();
        let a = pure.measure_positions();
        let b = dense.measure_positions();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < TOL);
        }
        assert!((dense.total_probability() - 1.0).abs() < TOL);
        assert!(dense.as_density().unwrap().hermiticity_defect() < TOL);
    }

    #[test]
    fn start_vertex_must_be_in_range() {
        let init = InitialCondition::default_glued_trees();
        let init = InitialCondition {
            start_vertex: 9,
            ..init
        };
        assert!(matches!(
            WalkState::pure(3, &init),
            Err(Error::StartVertexOutOfRange { vertex: 9, .. })
        ));
    }

    #[test]
    fn symmetric_triple_rejects_beta_above_limit() {
        assert!(InitialCondition::symmetric_triple(0, 0.8).is_err());
    }
}
