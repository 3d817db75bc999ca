//! The learnable policy: a steady-state velocity Kalman filter.
//!
//! The decoder maps the current neural vector and effector state to the next
//! state through the affine recursion `v' = F_v·n + b_v + G_v·v`, with the
//! position integrating the previous velocity: `p' = p + dt·v`. Oracle-assist
//! blending mixes the decoder's action with the oracle action during early
//! training.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::rng::{standard_normal, uniform01};
use crate::scalar::Scalar;

/// Position and per-step velocity of the controlled effector.
///
/// For the cursor task `position` is cursor coordinates; for the arm it is
/// joint angles in radians and `velocity` is angular velocity per step.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectorState<T: Scalar> {
    pub position: DVector<T>,
    pub velocity: DVector<T>,
    pub dt: T,
}

impl<T: Scalar> EffectorState<T> {
    /// State at rest: the given position with zero velocity.
    pub fn at_rest(position: DVector<T>, dt: T) -> Self {
        let d = position.len();
        Self {
            position,
            velocity: DVector::zeros(d),
            dt,
        }
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }
}

/// The learnable policy blocks of the steady-state velocity Kalman filter.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams<T: Scalar> {
    pub f_v: DMatrix<T>,
    pub b_v: DVector<T>,
    pub g_v: DMatrix<T>,
}

impl<T: Scalar> DecoderParams<T> {
    /// The all-zero decoder: stable and maximally uninformed.
    pub fn zeros(d_dof: usize, n_neurons: usize) -> Self {
        Self {
            f_v: DMatrix::zeros(d_dof, n_neurons),
            b_v: DVector::zeros(d_dof),
            g_v: DMatrix::zeros(d_dof, d_dof),
        }
    }

    pub fn d_dof(&self) -> usize {
        self.f_v.nrows()
    }

    pub fn n_neurons(&self) -> usize {
        self.f_v.ncols()
    }

    /// Packs the blocks into the single weight matrix `W = [F_v | b_v | G_v]`
    /// acting on the covariate `[n; 1; v]`.
    pub fn to_weights(&self) -> DMatrix<T> {
        let d = self.d_dof();
        let n = self.n_neurons();
        let mut w = DMatrix::zeros(d, n + 1 + d);
        w.view_mut((0, 0), (d, n)).copy_from(&self.f_v);
        w.view_mut((0, n), (d, 1)).copy_from(&self.b_v);
        w.view_mut((0, n + 1), (d, d)).copy_from(&self.g_v);
        w
    }

    /// Splits a packed weight matrix back into the decoder blocks.
    pub fn from_weights(w: &DMatrix<T>, n_neurons: usize) -> Self {
        let d = w.nrows();
        assert_eq!(w.ncols(), n_neurons + 1 + d, "weight shape mismatch");
        Self {
            f_v: w.view((0, 0), (d, n_neurons)).into_owned(),
            b_v: w.view((0, n_neurons), (d, 1)).column(0).into_owned(),
            g_v: w.view((0, n_neurons + 1), (d, d)).into_owned(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.f_v.iter().all(|x| x.is_finite())
            && self.b_v.iter().all(|x| x.is_finite())
            && self.g_v.iter().all(|x| x.is_finite())
    }
}

/// The decoder's velocity output `F_v·n + b_v + G_v·v`.
pub fn decoded_velocity<T: Scalar>(
    params: &DecoderParams<T>,
    neural: &DVector<T>,
    state: &EffectorState<T>,
) -> DVector<T> {
    &params.f_v * neural + &params.b_v + &params.g_v * &state.velocity
}

/// Advances the state with a chosen next velocity.
///
/// Position integrates the previous velocity (explicit Euler). When joint
/// `limits` are supplied, the new position is clamped and the velocity of any
/// clamped joint zeroed.
pub fn integrate_step<T: Scalar>(
    state: &EffectorState<T>,
    next_velocity: DVector<T>,
    limits: Option<&[(T, T)]>,
) -> EffectorState<T> {
    let mut position = &state.position + &state.velocity * state.dt;
    let mut velocity = next_velocity;
    if let Some(limits) = limits {
        for i in 0..position.len() {
            let (lo, hi) = limits[i];
            if position[i] < lo {
                position[i] = lo;
                velocity[i] = T::zero();
            } else if position[i] > hi {
                position[i] = hi;
                velocity[i] = T::zero();
            }
        }
    }
    EffectorState {
        position,
        velocity,
        dt: state.dt,
    }
}

/// One unassisted decode step: `v' = F_v·n + b_v + G_v·v`, `p' = p + dt·v`.
pub fn decode_step<T: Scalar>(
    params: &DecoderParams<T>,
    neural: &DVector<T>,
    state: &EffectorState<T>,
) -> EffectorState<T> {
    let v = decoded_velocity(params, neural, state);
    integrate_step(state, v, None)
}

/// Decode step with joint-limit clamping, used by the arm task.
pub fn decode_step_clamped<T: Scalar>(
    params: &DecoderParams<T>,
    neural: &DVector<T>,
    state: &EffectorState<T>,
    limits: &[(T, T)],
) -> EffectorState<T> {
    let v = decoded_velocity(params, neural, state);
    integrate_step(state, v, Some(limits))
}

/// The covariate `z = [n; 1; v]` that the linear decoder acts on.
pub fn covariate<T: Scalar>(neural: &DVector<T>, state: &EffectorState<T>) -> DVector<T> {
    let n = neural.len();
    let d = state.velocity.len();
    let mut z = DVector::zeros(n + 1 + d);
    z.rows_mut(0, n).copy_from(neural);
    z[n] = T::one();
    z.rows_mut(n + 1, d).copy_from(&state.velocity);
    z
}

/// How oracle and decoder actions are combined during assisted reaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlendMode {
    /// Convex combination `beta·oracle + (1-beta)·decoder`.
    LinearMix,
    /// Whole-timestep choice: oracle with probability `beta`, else decoder.
    ProbabilisticMix,
}

/// Assist schedule: per-reach mixing weights plus exploration noise injected
/// while fully assisted.
#[derive(Debug, Clone, PartialEq)]
pub struct AssistSpec<T: Scalar> {
    betas: Vec<T>,
    pub mode: BlendMode,
    pub init_action_noise_sigma: T,
}

impl<T: Scalar> AssistSpec<T> {
    /// `betas` indexed by reach (1-based `k`); the last value repeats beyond
    /// the end of the sequence. Every beta must lie in `[0, 1]`.
    pub fn new(betas: Vec<T>, mode: BlendMode, init_action_noise_sigma: T) -> Self {
        assert!(!betas.is_empty(), "assist schedule must be nonempty");
        assert!(
            betas.iter().all(|b| *b >= T::zero() && *b <= T::one()),
            "every beta must lie in [0, 1]"
        );
        assert!(init_action_noise_sigma >= T::zero());
        Self {
            betas,
            mode,
            init_action_noise_sigma,
        }
    }

    /// The default schedule: one fully assisted reach, then none.
    pub fn first_reach_only(init_action_noise_sigma: T) -> Self {
        Self::new(
            vec![T::one(), T::zero()],
            BlendMode::LinearMix,
            init_action_noise_sigma,
        )
    }

    /// Mixing weight for reach `k` (1-based).
    pub fn beta(&self, k: usize) -> T {
        let idx = k.saturating_sub(1).min(self.betas.len() - 1);
        self.betas[idx]
    }
}

/// Combines the oracle and decoder actions for reach `k`.
///
/// With `beta = 1` and a positive `init_action_noise_sigma`, Gaussian noise
/// of that std is added per coordinate so the fully assisted action still
/// explores.
pub fn blend_action<T: Scalar, R: Rng + ?Sized>(
    assist: &AssistSpec<T>,
    k: usize,
    oracle_action: &DVector<T>,
    decoder_action: &DVector<T>,
    rng: &mut R,
) -> DVector<T> {
    let beta = assist.beta(k);
    let mut action = match assist.mode {
        BlendMode::LinearMix => oracle_action * beta + decoder_action * (T::one() - beta),
        BlendMode::ProbabilisticMix => {
            let u: T = uniform01(rng);
            if u < beta {
                oracle_action.clone()
            } else {
                decoder_action.clone()
            }
        }
    };
    if beta == T::one() && assist.init_action_noise_sigma > T::zero() {
        for i in 0..action.len() {
            let c: T = standard_normal(rng);
            action[i] += assist.init_action_noise_sigma * c;
        }
    }
    action
}
