//! Synthetic neural encoding.
//!
//! Neural activity is generated from the user's intended velocity through a
//! linear-Gaussian model `n = A·intent + c` with `c ~ N(0, sigma^2 I)`. The
//! noise scale is calibrated so that the per-neuron signal-to-noise ratio
//! over a reference intent distribution hits a target value.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::standard_normal;
use crate::scalar::{real, real_of_usize, Scalar};

/// How the entries of the encoding matrix are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Entries i.i.d. standard normal.
    Gaussian,
    /// Standard normal with negative entries set to zero, so each neuron
    /// encodes only a subset of the degrees of freedom.
    Rectified,
}

/// The true synthetic mapping from intention to neural activity.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderModel<T: Scalar> {
    a: DMatrix<T>,
    noise_sigma: T,
}

impl<T: Scalar> EncoderModel<T> {
    /// Builds a model from an explicit encoding matrix and noise std.
    pub fn new(a: DMatrix<T>, noise_sigma: T) -> Self {
        assert!(noise_sigma >= T::zero(), "noise_sigma must be nonnegative");
        Self { a, noise_sigma }
    }

    /// Draws a fresh encoding matrix with i.i.d. entries.
    pub fn sample<R: Rng + ?Sized>(
        rng: &mut R,
        n_neurons: usize,
        d_dof: usize,
        mode: SampleMode,
    ) -> Self {
        assert!(n_neurons >= 1 && d_dof >= 1);
        let a = DMatrix::from_fn(n_neurons, d_dof, |_, _| {
            let x: T = standard_normal(rng);
            match mode {
                SampleMode::Gaussian => x,
                SampleMode::Rectified => {
                    if x < T::zero() {
                        T::zero()
                    } else {
                        x
                    }
                }
            }
        });
        Self {
            a,
            noise_sigma: T::zero(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn noise_sigma(&self) -> T {
        self.noise_sigma
    }

    pub fn n_neurons(&self) -> usize {
        self.a.nrows()
    }

    pub fn d_dof(&self) -> usize {
        self.a.ncols()
    }

    /// Returns the model with `noise_sigma` set so that the mean over neurons
    /// of signal variance / noise variance equals `target_snr`.
    ///
    /// Signal variance per neuron is the population variance of `row_i · o`
    /// over the given intent samples.
    pub fn calibrate_snr(mut self, intent_samples: &[DVector<T>], target_snr: T) -> Result<Self> {
        assert!(target_snr > T::zero(), "target_snr must be positive");
        if intent_samples.is_empty() {
            return Err(Error::DegenerateCalibration);
        }
        let m = real_of_usize::<T>(intent_samples.len());
        let n = self.n_neurons();
        let mut mean = DVector::<T>::zeros(n);
        let mut mean_sq = DVector::<T>::zeros(n);
        for o in intent_samples {
            let s = &self.a * o;
            for i in 0..n {
                mean[i] += s[i];
                mean_sq[i] += s[i] * s[i];
            }
        }
        let mut var_sum = T::zero();
        for i in 0..n {
            let mu = mean[i] / m;
            var_sum += mean_sq[i] / m - mu * mu;
        }
        let mean_var = var_sum / real_of_usize::<T>(n);
        if mean_var <= T::zero() {
            return Err(Error::DegenerateCalibration);
        }
        self.noise_sigma = (mean_var / target_snr).sqrt();
        Ok(self)
    }

    /// Overrides the calibrated noise std (used by noise-free experiments).
    pub fn with_noise_sigma(mut self, noise_sigma: T) -> Self {
        assert!(noise_sigma >= T::zero());
        self.noise_sigma = noise_sigma;
        self
    }

    /// Emits one neural vector: `A·intent + c`, `c ~ N(0, sigma^2 I)`.
    pub fn emit<R: Rng + ?Sized>(&self, true_intent: &DVector<T>, rng: &mut R) -> DVector<T> {
        let mut n = &self.a * true_intent;
        if self.noise_sigma > T::zero() {
            for i in 0..n.len() {
                let c: T = standard_normal(rng);
                n[i] += self.noise_sigma * c;
            }
        }
        n
    }
}

/// Discrepancy between the intention oracle and the user's true intent.
#[derive(Debug, Clone, PartialEq)]
pub enum IntentMismatch<T: Scalar> {
    /// Oracle and intent coincide.
    None,
    /// Intent is a fixed linear transform of the oracle action.
    LinearOperator(DMatrix<T>),
    /// Intent is the oracle action plus a random vector of relative
    /// magnitude `rho` (1.0 means noise as large as the signal).
    AdditiveNoise(T),
}

impl<T: Scalar> IntentMismatch<T> {
    /// Checks shape and value constraints for a task with `d_dof` degrees of
    /// freedom.
    pub fn validate(&self, d_dof: usize) -> Result<()> {
        match self {
            IntentMismatch::None => Ok(()),
            IntentMismatch::LinearOperator(op) => {
                if op.nrows() != d_dof || op.ncols() != d_dof {
                    return Err(Error::InvalidConfig(format!(
                        "mismatch operator must be {d_dof}x{d_dof}, got {}x{}",
                        op.nrows(),
                        op.ncols()
                    )));
                }
                if op.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidConfig(
                        "mismatch operator has non-finite entries".into(),
                    ));
                }
                Ok(())
            }
            IntentMismatch::AdditiveNoise(rho) => {
                if *rho < T::zero() {
                    return Err(Error::InvalidConfig(
                        "mismatch noise fraction must be nonnegative".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Maps an oracle action to the user's true intent.
    pub fn apply<R: Rng + ?Sized>(&self, oracle_action: &DVector<T>, rng: &mut R) -> DVector<T> {
        match self {
            IntentMismatch::None => oracle_action.clone(),
            IntentMismatch::LinearOperator(op) => op * oracle_action,
            IntentMismatch::AdditiveNoise(rho) => {
                let u = random_unit_vector(oracle_action.len(), rng);
                oracle_action + u * (*rho * oracle_action.norm())
            }
        }
    }
}

/// Uniformly random unit vector, drawn by normalizing a standard-normal
/// vector. In one dimension this is plus or minus one with equal probability.
pub fn random_unit_vector<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<T> {
    let tiny = real::<T>(1e-12);
    loop {
        let v = DVector::from_fn(dim, |_, _| standard_normal::<T, R>(rng));
        let norm = v.norm();
        if norm > tiny {
            return v / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use approx::assert_relative_eq;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        stream(seed, 0, 0, 0, Purpose::EncoderInit)
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = EncoderModel::<f64>::sample(&mut rng(11), 10, 3, SampleMode::Gaussian);
        let b = EncoderModel::<f64>::sample(&mut rng(11), 10, 3, SampleMode::Gaussian);
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.matrix().shape(), (10, 3));
        assert_eq!(a.noise_sigma(), 0.0);
    }

    #[test]
    fn rectified_zero_fraction_near_half() {
        let m = EncoderModel::<f64>::sample(&mut rng(5), 75, 26, SampleMode::Rectified);
        assert!(m.matrix().iter().all(|&x| x >= 0.0));
        let zeros = m.matrix().iter().filter(|&&x| x == 0.0).count();
        let frac = zeros as f64 / (75.0 * 26.0);
        assert!((frac - 0.5).abs() < 0.05, "zero fraction {frac}");
    }

    #[test]
    fn one_by_one_is_a_single_normal_draw() {
        let m = EncoderModel::<f64>::sample(&mut rng(3), 1, 1, SampleMode::Gaussian);
        let direct: f64 = crate::rng::standard_normal(&mut rng(3));
        assert_eq!(m.matrix()[(0, 0)], direct);
    }

    #[test]
    fn calibration_matches_hand_computed_variance() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let samples = [
            DVector::from_row_slice(&[1.0]),
            DVector::from_row_slice(&[-1.0]),
        ];
        let m = EncoderModel::new(a.clone(), 0.0)
            .calibrate_snr(&samples, 1.0)
            .unwrap();
        assert_relative_eq!(m.noise_sigma(), 1.0, epsilon = 1e-12);

        let m4 = EncoderModel::new(a, 0.0).calibrate_snr(&samples, 4.0).unwrap();
        assert_relative_eq!(m4.noise_sigma(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn calibration_rejects_zero_signal() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let samples = vec![DVector::from_row_slice(&[0.0]); 4];
        let err = EncoderModel::new(a, 0.0)
            .calibrate_snr(&samples, 1.0)
            .unwrap_err();
        assert_eq!(err, Error::DegenerateCalibration);
    }

    #[test]
    fn noise_free_emission_is_exact() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let m = EncoderModel::new(a, 0.0);
        let o = DVector::from_row_slice(&[1.0, -1.0]);
        let n = m.emit(&o, &mut rng(1));
        assert_eq!(n, DVector::from_row_slice(&[-1.0, -1.0]));

        let scalar = EncoderModel::new(DMatrix::from_row_slice(1, 1, &[2.0]), 0.0);
        let out = scalar.emit(&DVector::from_row_slice(&[3.0]), &mut rng(1));
        assert_eq!(out[0], 6.0);
    }

    #[test]
    fn emission_noise_is_unbiased() {
        let m = EncoderModel::new(DMatrix::<f64>::zeros(3, 2), 1.0);
        let o = DVector::zeros(2);
        let mut r = rng(17);
        let mut mean = DVector::<f64>::zeros(3);
        let draws = 10_000;
        for _ in 0..draws {
            mean += m.emit(&o, &mut r);
        }
        mean /= draws as f64;
        for i in 0..3 {
            assert!(mean[i].abs() < 0.04, "neuron {i} mean {}", mean[i]);
        }
    }

    #[test]
    fn mismatch_none_and_zero_noise_are_identity() {
        let o = DVector::from_row_slice(&[0.3, -0.4]);
        let mut r = rng(9);
        assert_eq!(IntentMismatch::None.apply(&o, &mut r), o);
        assert_eq!(IntentMismatch::AdditiveNoise(0.0).apply(&o, &mut r), o);
    }

    #[test]
    fn full_noise_doubles_expected_squared_norm() {
        let o: DVector<f64> = DVector::from_row_slice(&[0.6, 0.8]);
        let spec = IntentMismatch::AdditiveNoise(1.0);
        let mut r = rng(23);
        let draws = 10_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            acc += spec.apply(&o, &mut r).norm_squared();
        }
        let mean = acc / draws as f64;
        let expected = 2.0 * o.norm_squared();
        assert!(
            (mean - expected).abs() / expected < 0.05,
            "mean {mean} expected {expected}"
        );
    }

    #[test]
    fn sign_flip_operator_preserves_norm_exactly() {
        let op = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -1.0, 1.0]));
        let spec = IntentMismatch::LinearOperator(op);
        let o = DVector::from_row_slice(&[0.1, 0.2, -0.7]);
        let out = spec.apply(&o, &mut rng(2));
        assert_eq!(out.norm(), o.norm());
    }

    #[test]
    fn unit_vector_in_one_dimension_is_a_sign() {
        let mut r = rng(31);
        for _ in 0..32 {
            let u = random_unit_vector::<f64, _>(1, &mut r);
            assert!(u[0] == 1.0 || u[0] == -1.0);
        }
    }
}
