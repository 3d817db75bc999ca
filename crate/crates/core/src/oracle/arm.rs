//! Kinematic arm: joint chain, forward kinematics, analytic Jacobians, the
//! two-phase reach/grasp objective, and the damped-least-squares oracle.
//!
//! The arm is a pure kinematic tree of revolute joints. The oracle stacks
//! the active objective terms' residuals and Jacobians and takes one damped
//! least-squares step `dq = J' (J J' + mu^2 I)^-1 r`, capped per joint and
//! backtracked so the objective cost never increases.

use nalgebra::{DMatrix, DVector, Rotation3, Unit, Vector3};
use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::GoalSpec;
use crate::rng::{standard_normal, uniform01};
use crate::scalar::{real, Scalar};

/// One revolute joint of the kinematic tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint<T: Scalar> {
    /// Parent joint index; `None` only for the root.
    pub parent: Option<usize>,
    /// Rotation axis in the local frame.
    pub axis: Unit<Vector3<T>>,
    /// Displacement from the parent frame origin to this joint, expressed in
    /// the parent frame.
    pub offset: Vector3<T>,
    /// Angle limits in radians.
    pub limits: (T, T),
}

/// Named attachment points used by the task objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerId {
    Wrist,
    ThumbTip,
    MiddleTip,
}

/// World positions of the three markers for one pose.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerPositions<T: Scalar> {
    pub wrist: Vector3<T>,
    pub thumb_tip: Vector3<T>,
    pub middle_tip: Vector3<T>,
}

impl<T: Scalar> MarkerPositions<T> {
    pub fn get(&self, id: MarkerId) -> Vector3<T> {
        match id {
            MarkerId::Wrist => self.wrist,
            MarkerId::ThumbTip => self.thumb_tip,
            MarkerId::MiddleTip => self.middle_tip,
        }
    }
}

/// Reach-then-grasp phase of the arm objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Reach,
    Grasp,
}

/// One squared-distance penalty between a marker and a target point.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveTerm<T: Scalar> {
    pub marker: MarkerId,
    pub target: Vector3<T>,
    pub weight: T,
}

/// The active objective for the current phase.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskObjective<T: Scalar> {
    pub phase: Phase,
    pub terms: Vec<ObjectiveTerm<T>>,
}

/// A kinematic arm: joints, marker attachments the objective can reference,
/// and the phase-switch radius `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmModel<T: Scalar> {
    joints: Vec<Joint<T>>,
    wrist: (usize, Vector3<T>),
    thumb_tip: (usize, Vector3<T>),
    middle_tip: (usize, Vector3<T>),
    delta: T,
}

impl<T: Scalar> ArmModel<T> {
    /// Builds a model, checking that the joint list forms a tree with a
    /// single root whose parents precede their children.
    pub fn new(
        joints: Vec<Joint<T>>,
        wrist: (usize, Vector3<T>),
        thumb_tip: (usize, Vector3<T>),
        middle_tip: (usize, Vector3<T>),
        delta: T,
    ) -> Result<Self> {
        if joints.is_empty() {
            return Err(Error::InvalidConfig("arm needs at least one joint".into()));
        }
        for (i, j) in joints.iter().enumerate() {
            match j.parent {
                None if i != 0 => {
                    return Err(Error::InvalidConfig(format!(
                        "joint {i} has no parent; only joint 0 may be the root"
                    )));
                }
                Some(p) if p >= i => {
                    return Err(Error::InvalidConfig(format!(
                        "joint {i} parent {p} must precede it"
                    )));
                }
                _ => {}
            }
            if j.limits.0 > j.limits.1 {
                return Err(Error::InvalidConfig(format!("joint {i} has inverted limits")));
            }
        }
        for (name, (idx, _)) in [
            ("wrist", &wrist),
            ("thumb_tip", &thumb_tip),
            ("middle_tip", &middle_tip),
        ] {
            if *idx >= joints.len() {
                return Err(Error::InvalidConfig(format!(
                    "marker {name} references joint {idx} out of range"
                )));
            }
        }
        if delta <= T::zero() {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        Ok(Self {
            joints,
            wrist,
            thumb_tip,
            middle_tip,
            delta,
        })
    }

    pub fn d_dof(&self) -> usize {
        self.joints.len()
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Same arm with a different phase-switch radius.
    pub fn with_delta(mut self, delta: T) -> Result<Self> {
        if delta <= T::zero() {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn joints(&self) -> &[Joint<T>] {
        &self.joints
    }

    pub fn limits(&self) -> Vec<(T, T)> {
        self.joints.iter().map(|j| j.limits).collect()
    }

    /// All joint angles zero.
    pub fn rest_pose(&self) -> DVector<T> {
        DVector::zeros(self.d_dof())
    }

    fn marker(&self, id: MarkerId) -> (usize, Vector3<T>) {
        match id {
            MarkerId::Wrist => self.wrist,
            MarkerId::ThumbTip => self.thumb_tip,
            MarkerId::MiddleTip => self.middle_tip,
        }
    }

    /// World frames (rotation, origin) of every joint for pose `q`,
    /// composed root to leaf.
    fn joint_frames(&self, q: &DVector<T>) -> Vec<(Rotation3<T>, Vector3<T>)> {
        assert_eq!(q.len(), self.d_dof());
        let mut frames = Vec::with_capacity(self.joints.len());
        for (i, joint) in self.joints.iter().enumerate() {
            let (parent_rot, parent_origin) = match joint.parent {
                Some(p) => frames[p],
                None => (Rotation3::identity(), Vector3::zeros()),
            };
            let origin = parent_rot * joint.offset + parent_origin;
            let rot = parent_rot * Rotation3::from_axis_angle(&joint.axis, q[i]);
            frames.push((rot, origin));
        }
        frames
    }

    /// World positions of the three markers.
    pub fn forward_kinematics(&self, q: &DVector<T>) -> MarkerPositions<T> {
        let frames = self.joint_frames(q);
        MarkerPositions {
            wrist: self.marker_position(&frames, MarkerId::Wrist),
            thumb_tip: self.marker_position(&frames, MarkerId::ThumbTip),
            middle_tip: self.marker_position(&frames, MarkerId::MiddleTip),
        }
    }

    fn marker_position(
        &self,
        frames: &[(Rotation3<T>, Vector3<T>)],
        id: MarkerId,
    ) -> Vector3<T> {
        let (joint, local) = self.marker(id);
        let (rot, origin) = frames[joint];
        rot * local + origin
    }

    /// Analytic 3 x d_dof Jacobian of one marker's world position.
    pub fn marker_jacobian(&self, q: &DVector<T>, id: MarkerId) -> DMatrix<T> {
        let frames = self.joint_frames(q);
        self.marker_jacobian_with_frames(&frames, id)
    }

    fn marker_jacobian_with_frames(
        &self,
        frames: &[(Rotation3<T>, Vector3<T>)],
        id: MarkerId,
    ) -> DMatrix<T> {
        let (marker_joint, _) = self.marker(id);
        let p = self.marker_position(frames, id);
        let mut jac = DMatrix::zeros(3, self.d_dof());
        let mut j = Some(marker_joint);
        while let Some(idx) = j {
            let (rot, origin) = frames[idx];
            let axis_world = rot * self.joints[idx].axis.into_inner();
            let col = axis_world.cross(&(p - origin));
            jac.view_mut((0, idx), (3, 1)).copy_from(&col);
            j = self.joints[idx].parent;
        }
        jac
    }

    /// Sum of all link and marker offset lengths; a Lipschitz constant for
    /// the forward kinematics with respect to the 1-norm on joint angles.
    pub fn total_chain_length(&self) -> T {
        let mut total = T::zero();
        for j in &self.joints {
            total += j.offset.norm();
        }
        for id in [MarkerId::Wrist, MarkerId::ThumbTip, MarkerId::MiddleTip] {
            total += self.marker(id).1.norm();
        }
        total
    }
}

/// Evaluates the phase and cost for pose `q` under a goal.
///
/// The phase is grasp iff the wrist is within `delta` of the wand anchor;
/// the cost is the weighted sum of squared marker-to-target distances over
/// the phase's terms.
pub fn arm_objective<T: Scalar>(
    arm: &ArmModel<T>,
    q: &DVector<T>,
    goal: &GoalSpec<T>,
) -> (T, TaskObjective<T>) {
    let markers = arm.forward_kinematics(q);
    let wrist_dist = (markers.wrist - goal.target).norm();
    let one = T::one();
    let objective = if wrist_dist <= arm.delta() {
        let (p1, p2) = goal.wand_points.unwrap_or((goal.target, goal.target));
        TaskObjective {
            phase: Phase::Grasp,
            terms: vec![
                ObjectiveTerm {
                    marker: MarkerId::ThumbTip,
                    target: p1,
                    weight: one,
                },
                ObjectiveTerm {
                    marker: MarkerId::MiddleTip,
                    target: p2,
                    weight: one,
                },
            ],
        }
    } else {
        TaskObjective {
            phase: Phase::Reach,
            terms: vec![ObjectiveTerm {
                marker: MarkerId::Wrist,
                target: goal.target,
                weight: one,
            }],
        }
    };
    let cost = objective_cost(arm, q, &objective);
    (cost, objective)
}

/// Cost of a fixed objective at pose `q`, without re-evaluating the phase.
pub fn objective_cost<T: Scalar>(
    arm: &ArmModel<T>,
    q: &DVector<T>,
    objective: &TaskObjective<T>,
) -> T {
    let markers = arm.forward_kinematics(q);
    let mut cost = T::zero();
    for term in &objective.terms {
        cost += term.weight * (markers.get(term.marker) - term.target).norm_squared();
    }
    cost
}

fn inf_norm<T: Scalar>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |m, &x| if x.abs() > m { x.abs() } else { m })
}

/// One damped-least-squares oracle step: the goal-directed angular velocity
/// `dq/dt` for pose `q`.
///
/// Returns zero once the cost is within the goal's acquisition threshold, or
/// when eight backtracking halvings cannot find a non-increasing step. The
/// backtracking judges candidates against the objective active at the call
/// pose; the phase is re-evaluated on the next call. (Judging against the
/// re-evaluated phase would make the reach-to-grasp boundary repelling: the
/// grasp cost right after entry exceeds the wrist cost just outside.)
pub fn arm_oracle<T: Scalar>(
    arm: &ArmModel<T>,
    q: &DVector<T>,
    goal: &GoalSpec<T>,
    max_step: T,
    mu: T,
    dt: T,
) -> Result<DVector<T>> {
    assert!(max_step > T::zero() && mu > T::zero());
    let d = arm.d_dof();
    let (cost, objective) = arm_objective(arm, q, goal);
    if cost <= goal.epsilon {
        return Ok(DVector::zeros(d));
    }

    let frames = arm.joint_frames(q);
    let markers_now = MarkerPositions {
        wrist: arm.marker_position(&frames, MarkerId::Wrist),
        thumb_tip: arm.marker_position(&frames, MarkerId::ThumbTip),
        middle_tip: arm.marker_position(&frames, MarkerId::MiddleTip),
    };
    let rows = 3 * objective.terms.len();
    let mut residual = DVector::<T>::zeros(rows);
    let mut jac = DMatrix::<T>::zeros(rows, d);
    for (t, term) in objective.terms.iter().enumerate() {
        let w = term.weight.sqrt();
        let r = (term.target - markers_now.get(term.marker)) * w;
        residual.rows_mut(3 * t, 3).copy_from(&r);
        let j = arm.marker_jacobian_with_frames(&frames, term.marker) * w;
        jac.view_mut((3 * t, 0), (3, d)).copy_from(&j);
    }
    if residual.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArmState);
    }

    // dq = J' (J J' + mu^2 I)^-1 r
    let mut gram = &jac * jac.transpose();
    for i in 0..rows {
        gram[(i, i)] += mu * mu;
    }
    let chol = nalgebra::Cholesky::new(gram).ok_or(Error::InvalidArmState)?;
    let y = chol.solve(&residual);
    let mut dq = jac.transpose() * y;

    let mag = inf_norm(&dq);
    if mag > max_step {
        dq *= max_step / mag;
    }

    let half = real::<T>(0.5);
    for _ in 0..=8 {
        let candidate = q + &dq;
        let new_cost = objective_cost(arm, &candidate, &objective);
        if new_cost <= cost {
            return Ok(dq / dt);
        }
        dq *= half;
    }
    Ok(DVector::zeros(d))
}

/// Parameters for arm goal placement: a spherical shell for the wand anchor,
/// contact-point offsets along the wand, and the oracle rollout used as the
/// reachability predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmGoalSampler<T: Scalar> {
    /// Anchor radius range, measured from the shoulder.
    pub shell: (T, T),
    /// Distances of the two grasp points from the anchor along the wand.
    pub wand_offsets: (T, T),
    /// Acquisition cost threshold (grasp-phase cost).
    pub epsilon: T,
    pub max_step: T,
    pub mu: T,
    pub dt: T,
    /// Rollout step budget for the reachability check.
    pub t_max: usize,
    pub max_attempts: usize,
}

impl<T: Scalar> ArmGoalSampler<T> {
    pub fn new(epsilon: T, max_step: T, mu: T, dt: T, t_max: usize) -> Self {
        Self {
            shell: (real(0.9), real(1.7)),
            wand_offsets: (real(0.30), real(0.42)),
            epsilon,
            max_step,
            mu,
            dt,
            t_max,
            max_attempts: 1000,
        }
    }
}

fn random_unit_vector3<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Vector3<T> {
    let tiny = real::<T>(1e-12);
    loop {
        let v: Vector3<T> = Vector3::new(
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        );
        let n = v.norm();
        if n > tiny {
            return v / n;
        }
    }
}

fn clamp_to_limits<T: Scalar>(q: &mut DVector<T>, limits: &[(T, T)]) {
    for i in 0..q.len() {
        let (lo, hi) = limits[i];
        if q[i] < lo {
            q[i] = lo;
        } else if q[i] > hi {
            q[i] = hi;
        }
    }
}

/// True if a pure-oracle rollout from rest acquires the goal within the
/// sampler's step budget.
pub fn oracle_rollout_reaches<T: Scalar>(
    arm: &ArmModel<T>,
    goal: &GoalSpec<T>,
    sampler: &ArmGoalSampler<T>,
) -> bool {
    let limits = arm.limits();
    let mut q = arm.rest_pose();
    for _ in 0..sampler.t_max {
        let (cost, _) = arm_objective(arm, &q, goal);
        if cost <= sampler.epsilon {
            return true;
        }
        let dq_dt = match arm_oracle(arm, &q, goal, sampler.max_step, sampler.mu, sampler.dt) {
            Ok(v) => v,
            Err(_) => return false,
        };
        if inf_norm(&dq_dt) == T::zero() {
            return false; // backtracking gave up; the rollout is stuck
        }
        q += dq_dt * sampler.dt;
        clamp_to_limits(&mut q, &limits);
    }
    let (cost, _) = arm_objective(arm, &q, goal);
    cost <= sampler.epsilon
}

/// One wand placement draw from the shell, with no reachability check.
/// Used for SNR calibration, where only the oracle's action distribution
/// matters.
pub fn sample_arm_goal_unchecked<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    sampler: &ArmGoalSampler<T>,
) -> GoalSpec<T> {
    let (r_lo, r_hi) = sampler.shell;
    let third = real::<T>(1.0 / 3.0);
    let dir = random_unit_vector3::<T, R>(rng);
    let u: T = uniform01(rng);
    let radius = (u * (r_hi.powi(3) - r_lo.powi(3)) + r_lo.powi(3)).powf(third);
    let anchor = dir * radius;
    let wand_axis = random_unit_vector3::<T, R>(rng);
    let points = (
        anchor + wand_axis * sampler.wand_offsets.0,
        anchor + wand_axis * sampler.wand_offsets.1,
    );
    GoalSpec::arm(anchor, sampler.epsilon, points)
}

/// Wand placement by rejection: anchors are drawn volumetrically uniform in
/// the shell and accepted only if the oracle rollout acquires them.
pub fn sample_arm_goal<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    arm: &ArmModel<T>,
    sampler: &ArmGoalSampler<T>,
) -> Result<GoalSpec<T>> {
    for _ in 0..sampler.max_attempts {
        let goal = sample_arm_goal_unchecked(rng, sampler);
        if oracle_rollout_reaches(arm, &goal, sampler) {
            return Ok(goal);
        }
    }
    Err(Error::UnreachableWorkspace)
}

/// The embedded 26-joint arm: shoulder(3), elbow(2), wrist(3), thumb(4),
/// index(4), middle(4), ring(3), pinky(3). Link lengths are in units of the
/// upper arm; the chain extends along +x at rest.
pub fn default_26dof<T: Scalar>() -> ArmModel<T> {
    let x = || Unit::new_normalize(Vector3::new(T::one(), T::zero(), T::zero()));
    let y = || Unit::new_normalize(Vector3::new(T::zero(), T::one(), T::zero()));
    let z = || Unit::new_normalize(Vector3::new(T::zero(), T::zero(), T::one()));
    let vec = |a: f64, b: f64, c: f64| Vector3::new(real::<T>(a), real::<T>(b), real::<T>(c));
    let lim = |r: f64| (real::<T>(-r), real::<T>(r));

    let mut joints: Vec<Joint<T>> = Vec::with_capacity(26);
    let add = |joints: &mut Vec<Joint<T>>,
                   parent: Option<usize>,
                   axis: Unit<Vector3<T>>,
                   offset: Vector3<T>,
                   r: f64| {
        joints.push(Joint {
            parent,
            axis,
            offset,
            limits: lim(r),
        });
    };

    // Shoulder (joints 0-2), spherical.
    add(&mut joints, None, x(), vec(0.0, 0.0, 0.0), 2.0);
    add(&mut joints, Some(0), y(), vec(0.0, 0.0, 0.0), 2.0);
    add(&mut joints, Some(1), z(), vec(0.0, 0.0, 0.0), 2.0);
    // Elbow (3-4): flexion at the end of the upper arm, then pronation.
    add(&mut joints, Some(2), z(), vec(1.0, 0.0, 0.0), 2.4);
    add(&mut joints, Some(3), x(), vec(0.0, 0.0, 0.0), 1.6);
    // Wrist (5-7) at the end of the forearm.
    add(&mut joints, Some(4), z(), vec(1.0, 0.0, 0.0), 1.6);
    add(&mut joints, Some(5), y(), vec(0.0, 0.0, 0.0), 1.6);
    add(&mut joints, Some(6), x(), vec(0.0, 0.0, 0.0), 1.6);
    // Thumb (8-11), attached mid-palm.
    add(&mut joints, Some(7), y(), vec(0.2, 0.0, 0.12), 1.5);
    add(&mut joints, Some(8), z(), vec(0.0, 0.0, 0.0), 1.5);
    add(&mut joints, Some(9), z(), vec(0.25, 0.0, 0.0), 1.5);
    add(&mut joints, Some(10), z(), vec(0.2, 0.0, 0.0), 1.5);
    // Index (12-15), middle (16-19), ring (20-22), pinky (23-25): an
    // abduction joint at the palm edge, then flexion joints.
    for (base_z, four_joints) in [(0.06, true), (0.0, true), (-0.06, false), (-0.12, false)] {
        let base = joints.len() - 1;
        add(&mut joints, Some(7), z(), vec(0.4, 0.0, base_z), 1.5);
        add(&mut joints, Some(base + 1), y(), vec(0.0, 0.0, 0.0), 1.5);
        add(&mut joints, Some(base + 2), y(), vec(0.25, 0.0, 0.0), 1.5);
        if four_joints {
            add(&mut joints, Some(base + 3), y(), vec(0.2, 0.0, 0.0), 1.5);
        }
    }

    let tip = vec(0.15, 0.0, 0.0);
    ArmModel::new(
        joints,
        (7, vec(0.0, 0.0, 0.0)),
        (11, tip),
        (19, tip),
        real(0.15),
    )
    .expect("embedded arm model is well-formed")
}

/// Parses a plain-text chain description.
///
/// One joint per line: `parent ax ay az ox oy oz min max`, with `parent`
/// `-1` for the root. Lines may be prefixed with the keyword `joint`.
/// Marker lines `marker <wrist|thumb_tip|middle_tip> <joint> <x> <y> <z>`
/// attach the named points, and `delta <value>` sets the phase-switch
/// radius. `#` starts a comment.
pub fn parse_chain_description<T: Scalar>(text: &str) -> Result<ArmModel<T>> {
    let mut joints: Vec<Joint<T>> = Vec::new();
    let mut wrist = None;
    let mut thumb_tip = None;
    let mut middle_tip = None;
    let mut delta: Option<T> = None;
    let bad = |line: usize, msg: &str| Error::InvalidConfig(format!("line {line}: {msg}"));

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "marker" => {
                if tokens.len() != 6 {
                    return Err(bad(lineno, "marker needs: marker <name> <joint> <x> <y> <z>"));
                }
                let joint: usize = tokens[2]
                    .parse()
                    .map_err(|_| bad(lineno, "bad marker joint index"))?;
                let mut coords = [0.0f64; 3];
                for (i, t) in tokens[3..6].iter().enumerate() {
                    coords[i] = t.parse().map_err(|_| bad(lineno, "bad marker coordinate"))?;
                }
                let m = Some((joint, Vector3::new(real(coords[0]), real(coords[1]), real(coords[2]))));
                match tokens[1] {
                    "wrist" => wrist = m,
                    "thumb_tip" => thumb_tip = m,
                    "middle_tip" => middle_tip = m,
                    other => return Err(bad(lineno, &format!("unknown marker name '{other}'"))),
                }
            }
            "delta" => {
                if tokens.len() != 2 {
                    return Err(bad(lineno, "delta needs one value"));
                }
                let v: f64 = tokens[1].parse().map_err(|_| bad(lineno, "bad delta value"))?;
                delta = Some(real(v));
            }
            _ => {
                if tokens[0] == "joint" {
                    tokens.remove(0);
                }
                if tokens.len() != 9 {
                    return Err(bad(
                        lineno,
                        "joint needs: [joint] <parent> <ax> <ay> <az> <ox> <oy> <oz> <min> <max>",
                    ));
                }
                let parent: i64 = tokens[0]
                    .parse()
                    .map_err(|_| bad(lineno, "bad parent index"))?;
                let mut nums = [0.0f64; 8];
                for (i, t) in tokens[1..9].iter().enumerate() {
                    nums[i] = t.parse().map_err(|_| bad(lineno, "bad joint number"))?;
                }
                let axis = Vector3::new(real::<T>(nums[0]), real(nums[1]), real(nums[2]));
                if axis.norm() <= real(1e-9) {
                    return Err(bad(lineno, "axis must be nonzero"));
                }
                joints.push(Joint {
                    parent: if parent < 0 { None } else { Some(parent as usize) },
                    axis: Unit::new_normalize(axis),
                    offset: Vector3::new(real(nums[3]), real(nums[4]), real(nums[5])),
                    limits: (real(nums[6]), real(nums[7])),
                });
            }
        }
    }

    let missing = |what: &str| Error::InvalidConfig(format!("chain description missing {what}"));
    ArmModel::new(
        joints,
        wrist.ok_or_else(|| missing("marker wrist"))?,
        thumb_tip.ok_or_else(|| missing("marker thumb_tip"))?,
        middle_tip.ok_or_else(|| missing("marker middle_tip"))?,
        delta.ok_or_else(|| missing("delta"))?,
    )
}

/// Loads a chain description from a file.
pub fn load_chain_file<T: Scalar>(path: &std::path::Path) -> Result<ArmModel<T>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    parse_chain_description(&text)
}
