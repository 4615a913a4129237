//! Phase damping on the coin subsystem.
//!
//! The channel attenuates coin coherences: a density-matrix element with coin
//! indices (l, l') picks up the factor eta^((l - l')^2) while position indices
//! pass through untouched. Two routes are provided: the exact closed form used
//! in production, and a truncated Kraus operator sum kept for verification.
//! The Kraus operators
//!
//! ```text
//! E_k = sum_l (l sqrt(-2 ln eta))^k eta^(l^2) / sqrt(k!) * I_p (x) |l><l|_c
//! ```
//!
//! are diagonal in the coin basis, so the operator sum reduces to an
//! elementwise factor sum_k d_k(l) d_k(l') that converges to eta^((l - l')^2).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::WalkState;

/// Coin-space dephasing of strength eta in [0, 1].
///
/// eta = 1 is the identity map; eta = 0 erases every coin coherence. Under the
/// rate parameterization eta = exp(-gamma tau), the channel composes
/// multiplicatively: strength eta1 then eta2 equals strength eta1 * eta2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDampingChannel {
    eta: f64,
    coin_dim: usize,
}

impl PhaseDampingChannel {
    pub fn new(eta: f64, coin_dim: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::EtaOutOfRange(eta));
        }
        Ok(Self { eta, coin_dim })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// The rate-times-duration -ln(eta); infinite at eta = 0.
    pub fn gamma_tau(&self) -> f64 {
        -self.eta.ln()
    }

    fn check_state(&self, state: &WalkState) -> Result<()> {
        if state.coin_dim() != self.coin_dim {
            return Err(Error::DimensionMismatch {
                expected: self.coin_dim,
                actual: state.coin_dim(),
            });
        }
        Ok(())
    }

    /// Factor applied to a matrix element with coin indices (l, l').
    ///
    /// Integer powers keep eta = 0 well-defined: 0^0 = 1 on coin-diagonal
    /// elements, 0 elsewhere.
    #[inline]
    fn mask_factor(&self, l: usize, l2: usize) -> f64 {
        let d = l as i32 - l2 as i32;
        self.eta.powi(d * d)
    }

    /// Exact dephasing: multiplies each element by eta^((l - l')^2).
    ///
    /// Trace and Hermiticity are preserved exactly (coin-diagonal factors are
    /// exactly 1 and the mask is real-symmetric); the map is completely
    /// positive.
    pub fn apply_closed_form(&self, state: &mut WalkState) -> Result<()> {
        self.check_state(state)?;
        let k = self.coin_dim;
        let mask = self.mask_matrix();
        let n = state.dim();
        let rho = state.density_mut()?;
        rho.data_mut().par_chunks_exact_mut(n).enumerate().for_each(|(row, slice)| {
            let l = row % k;
            for (col, value) in slice.iter_mut().enumerate() {
                *value *= mask[l * k + col % k];
            }
        });
        Ok(())
    }

    /// Truncated Kraus sum: sum_{k < terms} E_k rho E_k\u{2020}.
    ///
    /// Undefined at eta = 0 where sqrt(-2 ln eta) diverges. Converges to the
    /// closed form as the term count grows; the spread of the underlying
    /// Poisson-like series grows as eta shrinks.
    pub fn apply_kraus_truncated(&self, state: &mut WalkState, terms: usize) -> Result<()> {
        let factors = self.kraus_factor_matrix(terms)?;
        self.check_state(state)?;
        let k = self.coin_dim;
        let n = state.dim();
        let rho = state.density_mut()?;
        rho.data_mut().par_chunks_exact_mut(n).enumerate().for_each(|(row, slice)| {
            let l = row % k;
            for (col, value) in slice.iter_mut().enumerate() {
                *value *= factors[l * k + col % k];
            }
        });
        Ok(())
    }

    /// Max entrywise deviation of sum_{k < terms} E_k\u{2020} E_k from the
    /// identity; nonincreasing in the term count.
    pub fn kraus_completeness_defect(&self, terms: usize) -> Result<f64> {
        let coeffs = self.kraus_coefficients(terms)?;
        let mut defect = 0.0f64;
        for l in 0..self.coin_dim {
            let sum: f64 = coeffs.iter().map(|d| d[l] * d[l]).sum();
            defect = defect.max((sum - 1.0).abs());
        }
        Ok(defect)
    }

    fn mask_matrix(&self) -> Vec<f64> {
        let k = self.coin_dim;
        (0..k * k)
            .map(|i| self.mask_factor(i / k, i % k))
            .collect()
    }

    /// d_k(l) = (l sqrt(-2 ln eta))^k eta^(l^2) / sqrt(k!), built by the
    /// stable recurrence d_k = d_{k-1} * l sqrt(-2 ln eta) / sqrt(k).
    fn kraus_coefficients(&self, terms: usize) -> Result<Vec<Vec<f64>>> {
        if self.eta == 0.0 {
            return Err(Error::KrausUndefinedAtZeroEta);
        }
        if terms == 0 {
            return Err(Error::KrausNoTerms(terms));
        }
        let k = self.coin_dim;
        let spread = (-2.0 * self.eta.ln()).sqrt();
        let mut coeffs = Vec::with_capacity(terms);
        let d0: Vec<f64> = (0..k).map(|l| self.eta.powi((l * l) as i32)).collect();
        coeffs.push(d0);
        for idx in 1..terms {
            let prev = &coeffs[idx - 1];
            let next: Vec<f64> = (0..k)
                .map(|l| prev[l] * (l as f64) * spread / (idx as f64).sqrt())
                .collect();
            coeffs.push(next);
        }
        Ok(coeffs)
    }

    /// Elementwise factor sum_{k < terms} d_k(l) d_k(l') of the truncated sum.
    fn kraus_factor_matrix(&self, terms: usize) -> Result<Vec<f64>> {
        let coeffs = self.kraus_coefficients(terms)?;
        let k = self.coin_dim;
        let mut factors = vec![0.0f64; k * k];
        for d in &coeffs {
            for l in 0..k {
                for l2 in 0..k {
                    factors[l * k + l2] += d[l] * d[l2];
                }
            }
        }
        Ok(factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ComplexMatrix, InitialCondition, WalkState};
    use num_complex::Complex64;

    fn test_state(num_vertices: usize) -> WalkState {
        let init = InitialCondition::default_glued_trees();
        WalkState::density(num_vertices, &init).unwrap()
    }

    #[test]
    fn eta_one_is_the_identity_map() {
        let channel = PhaseDampingChannel::new(1.0, 3).unwrap();
        let mut state = test_state(4);
        let before = state.clone();
        channel.apply_closed_form(&mut state).unwrap();
        assert_eq!(state, before);
        let mut state = before.clone();
        channel.apply_kraus_truncated(&mut state, 5).unwrap();
        assert!(
            state
                .as_density()
                .unwrap()
                .max_abs_diff(before.as_density().unwrap())
                < 1e-15
        );
    }

    #[test]
    fn mask_exponents_follow_coin_index_distance() {
        let eta = 0.7;
        let channel = PhaseDampingChannel::new(eta, 3).unwrap();
        let mut rho = ComplexMatrix::zeros(6);
        let z = Complex64::new(0.3, -0.4);
        rho.set(0, 1, z); // coin indices (0, 1)
        rho.set(0, 2, z); // coin indices (0, 2)
        rho.set(0, 4, z); // different vertices, coins (0, 1)
        let mut state = WalkState::from_density_matrix(2, 3, rho).unwrap();
        channel.apply_closed_form(&mut state).unwrap();
        let rho = state.as_density().unwrap();
        assert!((rho.get(0, 1) - z * eta).norm() < 1e-15);
        assert!((rho.get(0, 2) - z * eta.powi(4)).norm() < 1e-15);
        assert!((rho.get(0, 4) - z * eta).norm() < 1e-15);
    }

    #[test]
    fn eta_zero_erases_coin_coherence_and_keeps_diagonal_blocks() {
        let channel = PhaseDampingChannel::new(0.0, 3).unwrap();
        let mut rho = ComplexMatrix::zeros(6);
        let z = Complex64::new(0.25, 0.1);
        rho.set(0, 1, z); // coin off-diagonal: erased
        rho.set(0, 3, z); // position coherence with l = l' = 0: kept
        rho.set(1, 1, Complex64::new(0.5, 0.0));
        let mut state = WalkState::from_density_matrix(2, 3, rho).unwrap();
        channel.apply_closed_form(&mut state).unwrap();
        let rho = state.as_density().unwrap();
        assert_eq!(rho.get(0, 1), Complex64::new(0.0, 0.0));
        assert_eq!(rho.get(0, 3), z);
        assert_eq!(rho.get(1, 1), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn kraus_rejects_eta_zero_and_empty_truncation() {
        let channel = PhaseDampingChannel::new(0.0, 3).unwrap();
        let mut state = test_state(2);
        assert!(matches!(
            channel.apply_kraus_truncated(&mut state, 10),
            Err(Error::KrausUndefinedAtZeroEta)
        ));
        let channel = PhaseDampingChannel::new(0.9, 3).unwrap();
        assert!(matches!(
            channel.apply_kraus_truncated(&mut state, 0),
            Err(Error::KrausNoTerms(0))
        ));
    }

    #[test]
    fn construction_rejects_eta_outside_unit_interval() {
        assert!(matches!(
            PhaseDampingChannel::new(1.2, 3),
            Err(Error::EtaOutOfRange(_))
        ));
        assert!(matches!(
            PhaseDampingChannel::new(-0.1, 3),
            Err(Error::EtaOutOfRange(_))
        ));
    }

    #[test]
    fn completeness_defect_shrinks_with_terms() {
        let channel = PhaseDampingChannel::new(0.9, 3).unwrap();
        assert!(channel.kraus_completeness_defect(2).unwrap() > 0.0);
        assert!(channel.kraus_completeness_defect(40).unwrap() < 1e-10);
        let ideal = PhaseDampingChannel::new(1.0, 3).unwrap();
        assert_eq!(ideal.kraus_completeness_defect(1).unwrap(), 0.0);
    }

    #[test]
    fn trace_and_hermiticity_survive_the_closed_form() {
        let channel = PhaseDampingChannel::new(0.35, 3).unwrap();
        let mut state = test_state(5);
        let trace_before = state.total_probability();
        channel.apply_closed_form(&mut state).unwrap();
        assert_eq!(state.total_probability(), trace_before);
        assert_eq!(state.as_density().unwrap().hermiticity_defect(), 0.0);
    }

    #[test]
    fn closed_form_requires_density_representation() {
        let channel = PhaseDampingChannel::new(0.9, 3).unwrap();
        let init = InitialCondition::default_glued_trees();
        let mut state = WalkState::pure(4, &init).unwrap();
        assert!(matches!(
            channel.apply_closed_form(&mut state),
            Err(Error::DensityRequired)
        ));
    }
}
