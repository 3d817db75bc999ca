//! Intention oracles: models of the user's instantaneous goal-directed
//! movement, used as supervised labels during closed-loop training.
//!
//! The cursor oracle produces fixed-magnitude velocities pointing at the
//! goal. The arm oracle (see [`arm`]) runs one damped-least-squares step of
//! an optimal-control objective over all joint angles.

pub mod arm;

use nalgebra::{DVector, Vector3};
use rand::Rng;

use crate::decoder::EffectorState;
use crate::rng::uniform_in;
use crate::scalar::Scalar;

/// A reach goal: target position, acquisition threshold, and (for the arm
/// task) the two grasp contact points on the wand.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalSpec<T: Scalar> {
    /// Cursor goal position, or wand anchor position for the arm.
    pub target: Vector3<T>,
    /// Acquisition radius (cursor) or acquisition cost threshold (arm).
    pub epsilon: T,
    /// Grasp contact targets for the thumb and middle fingertips.
    pub wand_points: Option<(Vector3<T>, Vector3<T>)>,
}

impl<T: Scalar> GoalSpec<T> {
    pub fn cursor(target: Vector3<T>, epsilon: T) -> Self {
        assert!(epsilon > T::zero());
        Self {
            target,
            epsilon,
            wand_points: None,
        }
    }

    pub fn arm(target: Vector3<T>, epsilon: T, wand_points: (Vector3<T>, Vector3<T>)) -> Self {
        assert!(epsilon > T::zero());
        Self {
            target,
            epsilon,
            wand_points: Some(wand_points),
        }
    }
}

/// Axis-aligned box workspace for cursor goals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds<T: Scalar> {
    pub lo: Vector3<T>,
    pub hi: Vector3<T>,
}

impl<T: Scalar> BoxBounds<T> {
    /// Box `[-w, w]^3` centered at the origin.
    pub fn centered(half_width: T) -> Self {
        assert!(half_width >= T::zero());
        Self {
            lo: Vector3::from_element(-half_width),
            hi: Vector3::from_element(half_width),
        }
    }
}

/// Goal-directed cursor velocity: a vector toward the target of magnitude
/// `min(speed, distance/dt)`, or zero once within the acquisition radius.
pub fn cursor_oracle<T: Scalar>(
    state: &EffectorState<T>,
    goal: &GoalSpec<T>,
    speed: T,
) -> DVector<T> {
    assert_eq!(state.dim(), 3, "cursor task is three-dimensional");
    let p = Vector3::new(state.position[0], state.position[1], state.position[2]);
    let delta = goal.target - p;
    let dist = delta.norm();
    if dist <= goal.epsilon {
        return DVector::zeros(3);
    }
    let mag = speed.min(dist / state.dt);
    let dir = delta / dist;
    DVector::from_column_slice((dir * mag).as_slice())
}

/// Uniform cursor goal inside the workspace box.
pub fn sample_cursor_goal<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    bounds: &BoxBounds<T>,
    epsilon: T,
) -> GoalSpec<T> {
    let target = Vector3::new(
        uniform_in(rng, bounds.lo[0], bounds.hi[0]),
        uniform_in(rng, bounds.lo[1], bounds.hi[1]),
        uniform_in(rng, bounds.lo[2], bounds.hi[2]),
    );
    GoalSpec::cursor(target, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn cursor_state(p: [f64; 3]) -> EffectorState<f64> {
        EffectorState::at_rest(DVector::from_row_slice(&p), 1.0)
    }

    #[test]
    fn arrived_cursor_gets_zero_action() {
        let goal = GoalSpec::cursor(Vector3::new(0.2, 0.0, 0.0), 0.05);
        let o = cursor_oracle(&cursor_state([0.2, 0.0, 0.0]), &goal, 0.1);
        assert_eq!(o, DVector::zeros(3));
    }

    #[test]
    fn axis_aligned_unit_direction() {
        let goal = GoalSpec::cursor(Vector3::new(5.0, 0.0, 0.0), 0.05);
        let o = cursor_oracle(&cursor_state([0.0, 0.0, 0.0]), &goal, 1.0);
        assert_relative_eq!(o, DVector::from_row_slice(&[1.0, 0.0, 0.0]), epsilon = 1e-14);
    }

    #[test]
    fn near_goal_magnitude_clips_to_distance() {
        let goal = GoalSpec::cursor(Vector3::new(0.4, 0.0, 0.0), 0.05);
        let o = cursor_oracle(&cursor_state([0.0, 0.0, 0.0]), &goal, 1.0);
        assert_relative_eq!(o, DVector::from_row_slice(&[0.4, 0.0, 0.0]), epsilon = 1e-14);
    }

    #[test]
    fn magnitude_law_on_random_states() {
        let mut rng = stream(3, 0, 0, 0, Purpose::Goal);
        let bounds = BoxBounds::centered(1.0);
        for _ in 0..200 {
            let goal = sample_cursor_goal(&mut rng, &bounds, 0.05);
            let state = cursor_state([
                crate::rng::uniform_in(&mut rng, -1.0, 1.0),
                crate::rng::uniform_in(&mut rng, -1.0, 1.0),
                crate::rng::uniform_in(&mut rng, -1.0, 1.0),
            ]);
            let p = Vector3::new(state.position[0], state.position[1], state.position[2]);
            let dist = (goal.target - p).norm();
            let o = cursor_oracle(&state, &goal, 0.1);
            if dist > goal.epsilon {
                assert_relative_eq!(o.norm(), 0.1f64.min(dist), epsilon = 1e-12);
            } else {
                assert_eq!(o.norm(), 0.0);
            }
        }
    }

    #[test]
    fn goal_sampling_is_centered() {
        let mut rng = stream(11, 0, 0, 0, Purpose::Goal);
        let bounds = BoxBounds::centered(1.0);
        let mut mean = Vector3::zeros();
        let draws = 10_000;
        for _ in 0..draws {
            mean += sample_cursor_goal(&mut rng, &bounds, 0.05).target;
        }
        mean /= draws as f64;
        for i in 0..3 {
            assert!(mean[i].abs() < 0.04, "axis {i} mean {}", mean[i]);
        }
    }

    #[test]
    fn degenerate_box_always_yields_origin() {
        let mut rng = stream(12, 0, 0, 0, Purpose::Goal);
        let bounds = BoxBounds::centered(0.0);
        for _ in 0..16 {
            let g = sample_cursor_goal(&mut rng, &bounds, 0.05);
            assert_eq!(g.target, Vector3::zeros());
        }
    }
}
