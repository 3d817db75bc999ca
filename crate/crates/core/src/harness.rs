//! The closed-loop experiment: goal sampling, per-step
//! simulate/decode/aggregate, per-reach updates, independent repeats, and
//! the analyses built on top (encoder recovery, mismatch sweeps).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::decoder::{
    blend_action, covariate, decoded_velocity, integrate_step, AssistSpec, BlendMode,
    DecoderParams, EffectorState,
};
use crate::encoder::{EncoderModel, IntentMismatch, SampleMode};
use crate::error::{Error, Result};
use crate::learner::{
    self, AggregatedDataset, RegretReport, RlsState,
};
use crate::oracle::{
    arm::{self, ArmGoalSampler, ArmModel},
    cursor_oracle, sample_cursor_goal, BoxBounds, GoalSpec,
};
use crate::rng::{stream, Purpose};
use crate::scalar::{real, Scalar};

/// Which effector the experiment controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Cursor,
    Arm,
}

/// Decoder update rule selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateRuleKind {
    Ogd,
    Ma,
    Ftl,
    Rls,
}

impl UpdateRuleKind {
    pub fn name(self) -> &'static str {
        match self {
            UpdateRuleKind::Ogd => "ogd",
            UpdateRuleKind::Ma => "ma",
            UpdateRuleKind::Ftl => "ftl",
            UpdateRuleKind::Rls => "rls",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ogd" => Some(UpdateRuleKind::Ogd),
            "ma" => Some(UpdateRuleKind::Ma),
            "ftl" => Some(UpdateRuleKind::Ftl),
            "rls" => Some(UpdateRuleKind::Rls),
            _ => None,
        }
    }
}

/// Update rule with its knobs. One `reg` is shared by all rules: it is the
/// batch ridge coefficient for FTL/MA/RLS, and OGD applies `reg / K` per
/// update so the total regularization pressure matches.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRuleCfg {
    pub kind: UpdateRuleKind,
    /// OGD step-size scale; the step at reach `k` is `eta0 / sqrt(k)`.
    pub eta0: f64,
    /// Moving-average mixing weight.
    pub lambda: f64,
    /// Ridge coefficient on the packed weight matrix (bias column included).
    pub reg: f64,
    /// RLS only: absorb pairs (and refresh the decoder) every step instead
    /// of once per reach.
    pub rls_per_step: bool,
}

/// Intention-mismatch selection, in plain-config form.
#[derive(Debug, Clone, PartialEq)]
pub enum MismatchCfg {
    None,
    /// Row-major `d_dof x d_dof` operator.
    LinearOperator(Vec<f64>),
    AdditiveNoise(f64),
}

impl MismatchCfg {
    fn build<T: Scalar>(&self, d_dof: usize) -> Result<IntentMismatch<T>> {
        let m = match self {
            MismatchCfg::None => IntentMismatch::None,
            MismatchCfg::LinearOperator(values) => {
                if values.len() != d_dof * d_dof {
                    return Err(Error::InvalidConfig(format!(
                        "mismatch operator needs {} entries, got {}",
                        d_dof * d_dof,
                        values.len()
                    )));
                }
                let vals: Vec<T> = values.iter().map(|&v| real(v)).collect();
                IntentMismatch::LinearOperator(DMatrix::from_row_slice(d_dof, d_dof, &vals))
            }
            MismatchCfg::AdditiveNoise(rho) => IntentMismatch::AdditiveNoise(real(*rho)),
        };
        m.validate(d_dof)?;
        Ok(m)
    }
}

/// Oracle knobs: cursor speed, and the arm solver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCfg {
    /// Cursor oracle speed, workspace half-widths per step.
    pub speed: f64,
    /// Damped-least-squares damping.
    pub mu: f64,
    /// Per-joint cap on one oracle step, radians.
    pub max_step: f64,
    /// Reach-to-grasp phase switch radius.
    pub delta: f64,
    /// Acquisition threshold: cursor distance, or arm objective cost.
    pub epsilon: f64,
}

/// Assist schedule in plain-config form.
#[derive(Debug, Clone, PartialEq)]
pub struct AssistCfg {
    /// Per-reach mixing weights; the last value repeats.
    pub betas: Vec<f64>,
    pub mode: BlendMode,
    /// Noise std injected into fully assisted actions; `None` derives
    /// 0.1 x the oracle speed scale.
    pub init_action_noise_sigma: Option<f64>,
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub n_neurons: usize,
    pub d_dof: usize,
    /// Number of reaches per repeat.
    pub k_reaches: usize,
    /// Step cap per reach.
    pub t_max: usize,
    pub n_repeats: usize,
    pub base_seed: u64,
    pub update: UpdateRuleCfg,
    pub assist: AssistCfg,
    /// Target per-neuron signal-to-noise ratio.
    pub snr: f64,
    /// Bypass SNR calibration with an explicit noise std.
    pub noise_sigma_override: Option<f64>,
    pub mismatch: MismatchCfg,
    pub oracle: OracleCfg,
    /// Start each reach from the previous reach's end state instead of rest.
    pub continue_from_end: bool,
    pub encoder_mode: SampleMode,
    /// Record encoder-recovery correlations after every reach.
    pub collect_correlation: bool,
    /// Record full per-step traces.
    pub collect_traces: bool,
    /// Cursor workspace half-width.
    pub workspace_half_width: f64,
    /// Arm geometry file; the embedded 26-DOF model when absent.
    pub arm_chain_file: Option<std::path::PathBuf>,
    /// Intent draws used by SNR calibration.
    pub calibration_samples: usize,
    pub dt: f64,
}

impl ExperimentConfig {
    /// Cursor defaults: 10 neurons, 3 DOF, 50 reaches of up to 200 steps,
    /// 100 repeats, SNR 1.
    pub fn cursor_default() -> Self {
        let n_neurons = 10;
        let d_dof = 3;
        Self {
            task: Task::Cursor,
            n_neurons,
            d_dof,
            k_reaches: 50,
            t_max: 200,
            n_repeats: 100,
            base_seed: 42,
            update: UpdateRuleCfg {
                kind: UpdateRuleKind::Ftl,
                eta0: 1e-3,
                lambda: 0.9,
                reg: 1e-3 * (n_neurons + 1 + d_dof) as f64,
                rls_per_step: false,
            },
            assist: AssistCfg {
                betas: vec![1.0, 0.0],
                mode: BlendMode::LinearMix,
                init_action_noise_sigma: None,
            },
            snr: 1.0,
            noise_sigma_override: None,
            mismatch: MismatchCfg::None,
            oracle: OracleCfg {
                speed: 0.1,
                mu: 0.1,
                max_step: 0.05,
                delta: 0.15,
                epsilon: 0.05,
            },
            continue_from_end: false,
            encoder_mode: SampleMode::Gaussian,
            collect_correlation: false,
            collect_traces: false,
            workspace_half_width: 1.0,
            arm_chain_file: None,
            calibration_samples: 1000,
            dt: 1.0,
        }
    }

    /// Arm defaults: 75 neurons, 26 DOF, 40 reaches of up to 150 steps,
    /// 50 repeats, rectified encoder, correlation analysis on.
    pub fn arm_default() -> Self {
        let n_neurons = 75;
        let d_dof = 26;
        Self {
            task: Task::Arm,
            n_neurons,
            d_dof,
            k_reaches: 40,
            t_max: 150,
            n_repeats: 50,
            base_seed: 42,
            update: UpdateRuleCfg {
                kind: UpdateRuleKind::Ftl,
                eta0: 1e-4,
                lambda: 0.9,
                reg: 1e-3 * (n_neurons + 1 + d_dof) as f64,
                rls_per_step: false,
            },
            assist: AssistCfg {
                betas: vec![1.0, 0.0],
                mode: BlendMode::LinearMix,
                init_action_noise_sigma: None,
            },
            snr: 1.0,
            noise_sigma_override: None,
            mismatch: MismatchCfg::None,
            oracle: OracleCfg {
                speed: 0.1,
                mu: 0.1,
                max_step: 0.05,
                delta: 0.15,
                epsilon: 0.01,
            },
            continue_from_end: false,
            encoder_mode: SampleMode::Rectified,
            collect_correlation: true,
            collect_traces: false,
            workspace_half_width: 1.0,
            arm_chain_file: None,
            calibration_samples: 1000,
            dt: 1.0,
        }
    }

    /// Covariate and action dimensions `(p, d)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n_neurons + 1 + self.d_dof, self.d_dof)
    }

    /// Noise injected into fully assisted actions.
    pub fn init_action_noise(&self) -> f64 {
        self.assist.init_action_noise_sigma.unwrap_or(
            0.1 * match self.task {
                Task::Cursor => self.oracle.speed,
                Task::Arm => self.oracle.max_step,
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_neurons < 1 || self.d_dof < 1 {
            return bad("n_neurons and d_dof must be at least 1".into());
        }
        if self.k_reaches < 1 || self.t_max < 1 || self.n_repeats < 1 {
            return bad("K, T_max and n_repeats must be at least 1".into());
        }
        if self.task == Task::Cursor && self.d_dof != 3 {
            return bad(format!("cursor task needs d_dof = 3, got {}", self.d_dof));
        }
        if self.snr <= 0.0 && self.noise_sigma_override.is_none() {
            return bad(format!("snr must be positive, got {}", self.snr));
        }
        if let Some(sigma) = self.noise_sigma_override {
            if sigma < 0.0 {
                return bad(format!("noise_sigma must be nonnegative, got {sigma}"));
            }
        }
        if self.assist.betas.is_empty() {
            return bad("assist beta schedule must be nonempty".into());
        }
        if self.assist.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return bad("every beta must lie in [0, 1]".into());
        }
        if let Some(s) = self.assist.init_action_noise_sigma {
            if s < 0.0 {
                return bad("init_action_noise must be nonnegative".into());
            }
        }
        if self.update.reg < 0.0 {
            return bad(format!("reg must be nonnegative, got {}", self.update.reg));
        }
        if self.update.kind == UpdateRuleKind::Rls && self.update.reg <= 0.0 {
            return bad("rls requires positive reg".into());
        }
        if self.update.kind == UpdateRuleKind::Ogd && self.update.eta0 <= 0.0 {
            return bad(format!("eta0 must be positive, got {}", self.update.eta0));
        }
        if !(0.0..=1.0).contains(&self.update.lambda) {
            return bad(format!("lambda must lie in [0, 1], got {}", self.update.lambda));
        }
        if self.oracle.speed <= 0.0
            || self.oracle.mu <= 0.0
            || self.oracle.max_step <= 0.0
            || self.oracle.delta <= 0.0
            || self.oracle.epsilon <= 0.0
        {
            return bad("oracle knobs (speed, mu, max_step, delta, epsilon) must be positive".into());
        }
        if self.workspace_half_width < 0.0 {
            return bad("workspace half-width must be nonnegative".into());
        }
        if self.calibration_samples < 1 {
            return bad("calibration_samples must be at least 1".into());
        }
        if self.dt <= 0.0 {
            return bad("dt must be positive".into());
        }
        self.mismatch.build::<f64>(self.d_dof)?;
        Ok(())
    }
}

/// Per-reach outcome metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachMetrics<T: Scalar> {
    pub repeat: usize,
    pub k: usize,
    /// Sum over steps of squared decoded-velocity error against the
    /// noise-free oracle.
    pub sse: T,
    pub mse: T,
    pub steps: usize,
    pub acquired: bool,
    pub running_regret: T,
    pub gamma_k: T,
}

/// One encoder-recovery correlation value.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow<T: Scalar> {
    pub repeat: usize,
    pub k: usize,
    pub dof: usize,
    /// Pearson correlation across neurons, or `None` when undefined
    /// (a constant column).
    pub r: Option<T>,
}

/// One per-step trace record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T: Scalar> {
    pub repeat: usize,
    pub k: usize,
    pub t: usize,
    pub position: Vec<T>,
    pub velocity: Vec<T>,
    pub oracle: Vec<T>,
    pub decoded: Vec<T>,
}

/// A repeat that could not complete, with the offending error.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatFailure {
    pub repeat: usize,
    pub message: String,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult<T: Scalar> {
    pub metrics: Vec<ReachMetrics<T>>,
    /// Final regret report per completed repeat.
    pub regrets: Vec<(usize, RegretReport<T>)>,
    pub correlations: Vec<CorrelationRow<T>>,
    pub traces: Vec<TraceRow<T>>,
    pub failures: Vec<RepeatFailure>,
}

impl<T: Scalar> ExperimentResult<T> {
    pub fn all_finite(&self) -> bool {
        self.metrics.iter().all(|m| m.sse.is_finite() && m.mse.is_finite())
    }
}

/// Task-level immutable context shared by all repeats.
enum TaskContext<T: Scalar> {
    Cursor {
        bounds: BoxBounds<T>,
    },
    Arm {
        model: ArmModel<T>,
        sampler: ArmGoalSampler<T>,
    },
}

impl<T: Scalar> TaskContext<T> {
    fn build(cfg: &ExperimentConfig) -> Result<Self> {
        match cfg.task {
            Task::Cursor => Ok(TaskContext::Cursor {
                bounds: BoxBounds::centered(real(cfg.workspace_half_width)),
            }),
            Task::Arm => {
                let mut model = match &cfg.arm_chain_file {
                    Some(path) => arm::load_chain_file(path)?,
                    None => arm::default_26dof(),
                };
                if model.d_dof() != cfg.d_dof {
                    return Err(Error::InvalidConfig(format!(
                        "arm model has {} joints but config says d_dof = {}",
                        model.d_dof(),
                        cfg.d_dof
                    )));
                }
                let delta: T = real(cfg.oracle.delta);
                if delta != model.delta() {
                    model = model.with_delta(delta)?;
                }
                let mut sampler = ArmGoalSampler::new(
                    real(cfg.oracle.epsilon),
                    real(cfg.oracle.max_step),
                    real(cfg.oracle.mu),
                    real(cfg.dt),
                    cfg.t_max,
                );
                sampler.max_attempts = 1000;
                Ok(TaskContext::Arm { model, sampler })
            }
        }
    }

    fn rest_state(&self, cfg: &ExperimentConfig) -> EffectorState<T> {
        let dt = real(cfg.dt);
        match self {
            TaskContext::Cursor { .. } => EffectorState::at_rest(DVector::zeros(3), dt),
            TaskContext::Arm { model, .. } => EffectorState::at_rest(model.rest_pose(), dt),
        }
    }

    fn limits(&self) -> Option<Vec<(T, T)>> {
        match self {
            TaskContext::Cursor { .. } => None,
            TaskContext::Arm { model, .. } => Some(model.limits()),
        }
    }

    fn sample_goal<R: rand::Rng + ?Sized>(
        &self,
        cfg: &ExperimentConfig,
        rng: &mut R,
    ) -> Result<GoalSpec<T>> {
        match self {
            TaskContext::Cursor { bounds } => {
                Ok(sample_cursor_goal(rng, bounds, real(cfg.oracle.epsilon)))
            }
            TaskContext::Arm { model, sampler } => arm::sample_arm_goal(rng, model, sampler),
        }
    }

    /// Oracle action for the current state.
    fn oracle_action(
        &self,
        cfg: &ExperimentConfig,
        state: &EffectorState<T>,
        goal: &GoalSpec<T>,
    ) -> Result<DVector<T>> {
        match self {
            TaskContext::Cursor { .. } => Ok(cursor_oracle(state, goal, real(cfg.oracle.speed))),
            TaskContext::Arm { model, .. } => arm::arm_oracle(
                model,
                &state.position,
                goal,
                real(cfg.oracle.max_step),
                real(cfg.oracle.mu),
                state.dt,
            ),
        }
    }

    /// Task distance: cursor-to-goal distance, or current-phase objective
    /// cost for the arm.
    fn distance(&self, state: &EffectorState<T>, goal: &GoalSpec<T>) -> T {
        match self {
            TaskContext::Cursor { .. } => {
                let p = nalgebra::Vector3::new(
                    state.position[0],
                    state.position[1],
                    state.position[2],
                );
                (goal.target - p).norm()
            }
            TaskContext::Arm { model, .. } => arm::arm_objective(model, &state.position, goal).0,
        }
    }
}

/// One reach's raw products before aggregation.
struct ReachOutcome<T: Scalar> {
    pairs: Vec<(DVector<T>, DVector<T>)>,
    sse: T,
    steps: usize,
    acquired: bool,
    final_state: EffectorState<T>,
    trace: Vec<TraceRow<T>>,
}

struct RepeatOutput<T: Scalar> {
    metrics: Vec<ReachMetrics<T>>,
    regret: RegretReport<T>,
    correlations: Vec<CorrelationRow<T>>,
    traces: Vec<TraceRow<T>>,
}

/// Runs the closed loop of a single reach.
#[allow(clippy::too_many_arguments)]
fn run_reach<T: Scalar>(
    cfg: &ExperimentConfig,
    ctx: &TaskContext<T>,
    encoder: &EncoderModel<T>,
    mismatch: &IntentMismatch<T>,
    assist: &AssistSpec<T>,
    params: &mut DecoderParams<T>,
    mut per_step_rls: Option<&mut RlsState<T>>,
    goal: &GoalSpec<T>,
    start: EffectorState<T>,
    repeat: usize,
    k: usize,
) -> Result<ReachOutcome<T>> {
    let limits = ctx.limits();
    let mut state = start;
    let mut pairs = Vec::new();
    let mut trace = Vec::new();
    let mut sse = T::zero();
    let mut t = 0usize;
    let mut acquired = ctx.distance(&state, goal) <= real(cfg.oracle.epsilon);

    while !acquired && t < cfg.t_max {
        let step_id = t as u64;
        let oracle_action = ctx.oracle_action(cfg, &state, goal)?;
        let intent = {
            let mut rng = stream(cfg.base_seed, repeat as u64, k as u64, step_id, Purpose::Mismatch);
            mismatch.apply(&oracle_action, &mut rng)
        };
        let neural = {
            let mut rng = stream(cfg.base_seed, repeat as u64, k as u64, step_id, Purpose::Emit);
            encoder.emit(&intent, &mut rng)
        };
        let decoded = decoded_velocity(params, &neural, &state);
        sse += (&decoded - &oracle_action).norm_squared();
        let executed = {
            let mut rng = stream(cfg.base_seed, repeat as u64, k as u64, step_id, Purpose::Assist);
            blend_action(assist, k, &oracle_action, &decoded, &mut rng)
        };
        let z = covariate(&neural, &state);

        if cfg.collect_traces {
            trace.push(TraceRow {
                repeat,
                k,
                t,
                position: state.position.iter().copied().collect(),
                velocity: state.velocity.iter().copied().collect(),
                oracle: oracle_action.iter().copied().collect(),
                decoded: decoded.iter().copied().collect(),
            });
        }

        state = integrate_step(&state, executed, limits.as_deref());
        pairs.push((z, oracle_action));

        if let Some(rls) = per_step_rls.as_deref_mut() {
            let (z, o) = pairs.last().unwrap();
            rls.absorb(z, o)?;
            *params = rls.params(cfg.n_neurons);
        }

        t += 1;
        acquired = ctx.distance(&state, goal) <= real(cfg.oracle.epsilon);
    }

    Ok(ReachOutcome {
        pairs,
        sse,
        steps: t,
        acquired,
        final_state: state,
        trace,
    })
}

/// Draws the SNR calibration intent set: one oracle action per uniformly
/// random goal, taken from the start pose.
fn calibration_intents<T: Scalar>(
    cfg: &ExperimentConfig,
    ctx: &TaskContext<T>,
    repeat: usize,
) -> Result<Vec<DVector<T>>> {
    let mut rng = stream(cfg.base_seed, repeat as u64, 0, 0, Purpose::Calibration);
    let rest = ctx.rest_state(cfg);
    let mut intents = Vec::with_capacity(cfg.calibration_samples);
    match ctx {
        TaskContext::Cursor { bounds } => {
            for _ in 0..cfg.calibration_samples {
                let goal = sample_cursor_goal(&mut rng, bounds, real(cfg.oracle.epsilon));
                intents.push(cursor_oracle(&rest, &goal, real(cfg.oracle.speed)));
            }
        }
        TaskContext::Arm { model, sampler } => {
            for _ in 0..cfg.calibration_samples {
                let goal = arm::sample_arm_goal_unchecked(&mut rng, sampler);
                intents.push(arm::arm_oracle(
                    model,
                    &rest.position,
                    &goal,
                    real(cfg.oracle.max_step),
                    real(cfg.oracle.mu),
                    rest.dt,
                )?);
            }
        }
    }
    Ok(intents)
}

fn build_encoder<T: Scalar>(
    cfg: &ExperimentConfig,
    ctx: &TaskContext<T>,
    repeat: usize,
    transform: Option<&DMatrix<T>>,
) -> Result<EncoderModel<T>> {
    let mut rng = stream(cfg.base_seed, repeat as u64, 0, 0, Purpose::EncoderInit);
    let mut model = EncoderModel::sample(&mut rng, cfg.n_neurons, cfg.d_dof, cfg.encoder_mode);
    if let Some(m) = transform {
        model = EncoderModel::new(model.matrix() * m, model.noise_sigma());
    }
    match cfg.noise_sigma_override {
        Some(sigma) => Ok(model.with_noise_sigma(real(sigma))),
        None => {
            let intents = calibration_intents(cfg, ctx, repeat)?;
            model.calibrate_snr(&intents, real(cfg.snr))
        }
    }
}

fn run_repeat<T: Scalar>(
    cfg: &ExperimentConfig,
    ctx: &TaskContext<T>,
    repeat: usize,
    encoder_transform: Option<&DMatrix<T>>,
) -> Result<RepeatOutput<T>> {
    let dims = cfg.dims();
    let encoder = build_encoder(cfg, ctx, repeat, encoder_transform)?;
    let mismatch = cfg.mismatch.build::<T>(cfg.d_dof)?;
    let assist = AssistSpec::new(
        cfg.assist.betas.iter().map(|&b| real(b)).collect(),
        cfg.assist.mode,
        real(cfg.init_action_noise()),
    );
    let reg: T = real(cfg.update.reg);

    let mut params = DecoderParams::<T>::zeros(cfg.d_dof, cfg.n_neurons);
    let mut rls = match cfg.update.kind {
        UpdateRuleKind::Rls => Some(RlsState::new(dims.0, dims.1, reg)?),
        _ => None,
    };
    let mut dataset = AggregatedDataset::new();
    let mut per_reach_losses: Vec<T> = Vec::with_capacity(cfg.k_reaches);
    let mut metrics = Vec::with_capacity(cfg.k_reaches);
    let mut correlations = Vec::new();
    let mut traces = Vec::new();
    let mut state = ctx.rest_state(cfg);

    for k in 1..=cfg.k_reaches {
        if !cfg.continue_from_end {
            state = ctx.rest_state(cfg);
        }
        let goal = {
            let mut rng = stream(cfg.base_seed, repeat as u64, k as u64, 0, Purpose::Goal);
            ctx.sample_goal(cfg, &mut rng)?
        };
        let per_step = if cfg.update.kind == UpdateRuleKind::Rls && cfg.update.rls_per_step {
            rls.as_mut()
        } else {
            None
        };
        let outcome = run_reach(
            cfg, ctx, &encoder, &mismatch, &assist, &mut params, per_step, &goal,
            state, repeat, k,
        )?;
        state = outcome.final_state;
        dataset.append_reach(outcome.pairs);
        per_reach_losses.push(outcome.sse);
        traces.extend(outcome.trace);

        // Per-reach decoder update (Alg. placement: after aggregation).
        match cfg.update.kind {
            UpdateRuleKind::Ogd => {
                let reg_per_update = reg / real(cfg.k_reaches as f64);
                params = learner::ogd_update(
                    &params,
                    real(cfg.update.eta0),
                    reg_per_update,
                    dataset.latest_reach(),
                    k,
                )?;
            }
            UpdateRuleKind::Ma => {
                params = learner::ma_update(
                    &params,
                    real(cfg.update.lambda),
                    reg,
                    dataset.latest_reach(),
                )?;
            }
            UpdateRuleKind::Ftl => {
                params = learner::ftl_update(&dataset, dims, reg)?;
            }
            UpdateRuleKind::Rls => {
                let rls_state = rls.as_mut().expect("rls state exists for rls rule");
                if !cfg.update.rls_per_step {
                    let (zs, os) = dataset.latest_reach();
                    if let Err(Error::RlsBreakdown) = rls_state.absorb_all(zs, os) {
                        *rls_state = RlsState::resolve_from(&dataset, dims, reg)?;
                    }
                }
                params = rls_state.params(cfg.n_neurons);
            }
        }

        let report = learner::regret(&per_reach_losses, &dataset, dims, reg)?;
        let steps = outcome.steps;
        metrics.push(ReachMetrics {
            repeat,
            k,
            sse: outcome.sse,
            mse: if steps > 0 {
                outcome.sse / real(steps as f64)
            } else {
                T::zero()
            },
            steps,
            acquired: outcome.acquired,
            running_regret: report.regret,
            gamma_k: report.gamma_k,
        });

        if cfg.collect_correlation {
            let rs = encoder_correlation(&dataset, encoder.matrix(), real(1e-6))?;
            for (dof, r) in rs.into_iter().enumerate() {
                correlations.push(CorrelationRow { repeat, k, dof, r });
            }
        }
    }

    let regret = learner::regret(&per_reach_losses, &dataset, dims, reg)?;
    Ok(RepeatOutput {
        metrics,
        regret,
        correlations,
        traces,
    })
}

/// Runs the full experiment: independent repeats (in parallel), each with a
/// fresh calibrated encoder and a zero-initialized decoder.
pub fn run_experiment<T: Scalar>(cfg: &ExperimentConfig) -> Result<ExperimentResult<T>>
where
    T: Send + Sync,
{
    run_experiment_with_encoder_transform(cfg, None)
}

/// [`run_experiment`] with a fixed post-sampling transform `A <- A·M` of
/// every repeat's encoding matrix. Used by the linear-operator mismatch
/// equivalence analysis.
pub fn run_experiment_with_encoder_transform<T: Scalar>(
    cfg: &ExperimentConfig,
    encoder_transform: Option<&DMatrix<T>>,
) -> Result<ExperimentResult<T>>
where
    T: Send + Sync,
{
    cfg.validate()?;
    let ctx = TaskContext::<T>::build(cfg)?;

    let outputs: Vec<(usize, Result<RepeatOutput<T>>)> = (0..cfg.n_repeats)
        .into_par_iter()
        .map(|repeat| (repeat, run_repeat(cfg, &ctx, repeat, encoder_transform)))
        .collect();

    let mut result = ExperimentResult {
        metrics: Vec::new(),
        regrets: Vec::new(),
        correlations: Vec::new(),
        traces: Vec::new(),
        failures: Vec::new(),
    };
    for (repeat, out) in outputs {
        match out {
            Ok(o) => {
                result.metrics.extend(o.metrics);
                result.regrets.push((repeat, o.regret));
                result.correlations.extend(o.correlations);
                result.traces.extend(o.traces);
            }
            Err(e) => result.failures.push(RepeatFailure {
                repeat,
                message: e.to_string(),
            }),
        }
    }
    Ok(result)
}

/// Estimates the encoding model from aggregated (oracle action, neural)
/// pairs by ridge regression, then reports the Pearson correlation of each
/// DOF column against the true encoding matrix, across neurons.
///
/// Returns one entry per DOF; `None` marks an undefined correlation
/// (constant column).
pub fn encoder_correlation<T: Scalar>(
    dataset: &AggregatedDataset<T>,
    true_a: &DMatrix<T>,
    reg_small: T,
) -> Result<Vec<Option<T>>> {
    let n = true_a.nrows();
    let d = true_a.ncols();
    if dataset.len() < 2 {
        return Err(Error::InvalidConfig(
            "encoder correlation needs at least 2 pairs".into(),
        ));
    }
    let (zs, os) = dataset.all_pairs();
    // Covariates are the oracle actions; targets the neural slices of z.
    let neurals: Vec<DVector<T>> = zs.iter().map(|z| z.rows(0, n).into_owned()).collect();
    let a_hat = learner::ridge_solve(os, &neurals, (d, n), reg_small)?;
    let mut out = Vec::with_capacity(d);
    for dof in 0..d {
        out.push(pearson(
            &a_hat.column(dof).into_owned(),
            &true_a.column(dof).into_owned(),
        ));
    }
    Ok(out)
}

/// Pearson correlation between two vectors; `None` if either is constant.
pub fn pearson<T: Scalar>(x: &DVector<T>, y: &DVector<T>) -> Option<T> {
    assert_eq!(x.len(), y.len());
    let n = real::<T>(x.len() as f64);
    let mx = x.sum() / n;
    let my = y.sum() / n;
    let mut sxx = T::zero();
    let mut syy = T::zero();
    let mut sxy = T::zero();
    for i in 0..x.len() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Runs the experiment once per additive-noise fraction, with shared base
/// seeds so the runs are directly comparable.
pub fn mismatch_sweep<T: Scalar>(
    cfg: &ExperimentConfig,
    noise_fractions: &[f64],
) -> Result<Vec<(f64, ExperimentResult<T>)>>
where
    T: Send + Sync,
{
    let mut out = Vec::with_capacity(noise_fractions.len());
    for &rho in noise_fractions {
        if rho < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise fraction must be nonnegative, got {rho}"
            )));
        }
        let mut c = cfg.clone();
        c.mismatch = MismatchCfg::AdditiveNoise(rho);
        out.push((rho, run_experiment::<T>(&c)?));
    }
    Ok(out)
}

/// Median of a slice (empty slice yields zero).
pub fn median<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let mut v: Vec<T> = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite metric values"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) * real(0.5)
    }
}

/// Mean and standard error of a slice.
pub fn mean_se<T: Scalar>(values: &[T]) -> (T, T) {
    if values.is_empty() {
        return (T::zero(), T::zero());
    }
    let n = real::<T>(values.len() as f64);
    let mean = values.iter().fold(T::zero(), |a, &b| a + b) / n;
    if values.len() < 2 {
        return (mean, T::zero());
    }
    let var = values
        .iter()
        .fold(T::zero(), |a, &b| a + (b - mean) * (b - mean))
        / (n - T::one());
    (mean, (var / n).sqrt())
}
