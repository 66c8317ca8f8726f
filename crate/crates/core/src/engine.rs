//! Noisy iterative updates `W_t = g(W_{t-1}) - η_t F(W_{t-1}, Z_t) + ξ_t`.
//!
//! Four variants are provided. SGLD and perturbed SGD act on `w ∈ R^d`;
//! noisy momentum and noisy Nesterov act on the stacked `(v, w) ∈ R^{2d}`,
//! velocity block first.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    clip_to_ball, uniform_in_ball, DataPoint, Dataset, LossModel, Sampler, Schedule, TaskSpec, Trajectory,
};
use crate::rng::{stream, Purpose};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Sgld,
    PerturbedSgd,
    NoisyMomentum,
    NoisyNesterov,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Sgld => "sgld",
            Variant::PerturbedSgd => "perturbed-sgd",
            Variant::NoisyMomentum => "noisy-momentum",
            Variant::NoisyNesterov => "noisy-nesterov",
        }
    }

    pub fn is_momentum(self) -> bool {
        matches!(self, Variant::NoisyMomentum | Variant::NoisyNesterov)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseModel {
    /// `ξ ~ N(0, σ² I)` on the whole state.
    GaussianIsotropic,
    /// `ξ = -η u` with `u` uniform in the unit ball.
    UniformBall,
}

/// The deterministic map `g`, the direction `F` and the noise law of one variant.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateRule {
    variant: Variant,
    loss: LossModel,
    cap: f64,
    dim: usize,
    gamma: f64,
}

impl UpdateRule {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Parameter dimension `d`.
    pub fn param_dim(&self) -> usize {
        self.dim
    }

    /// `d`, or `2d` for the stacked momentum state.
    pub fn state_dim(&self) -> usize {
        if self.variant.is_momentum() {
            2 * self.dim
        } else {
            self.dim
        }
    }

    /// Offset of the parameter block inside the state.
    pub fn param_offset(&self) -> usize {
        if self.variant.is_momentum() {
            self.dim
        } else {
            0
        }
    }

    /// Uniform bound on `||F||₂`: `L`, or `sqrt(2) L` for the momentum variants.
    pub fn direction_norm_cap(&self) -> f64 {
        if self.variant.is_momentum() {
            std::f64::consts::SQRT_2 * self.cap
        } else {
            self.cap
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        match self.variant {
            Variant::PerturbedSgd => NoiseModel::UniformBall,
            _ => NoiseModel::GaussianIsotropic,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn clipped_gradient(&self, w: &[f64], z: &DataPoint) -> Vec<f64> {
        let grad = self.loss.gradient(w, z);
        clip_to_ball(&grad, self.cap).expect("loss gradient must be finite")
    }

    /// The deterministic part `g(state)`.
    pub fn g(&self, state: &[f64]) -> Vec<f64> {
        if !self.variant.is_momentum() {
            return state.to_vec();
        }
        let (v, w) = state.split_at(self.dim);
        let mut out = Vec::with_capacity(2 * self.dim);
        out.extend(v.iter().map(|x| self.gamma * x));
        out.extend(w.iter().zip(v).map(|(wi, vi)| wi - self.gamma * vi));
        out
    }

    /// Point at which the gradient is taken.
    fn gradient_point(&self, state: &[f64]) -> Vec<f64> {
        match self.variant {
            Variant::NoisyMomentum => state[self.dim..].to_vec(),
            Variant::NoisyNesterov => {
                let (v, w) = state.split_at(self.dim);
                w.iter().zip(v).map(|(wi, vi)| wi - self.gamma * vi).collect()
            }
            _ => state.to_vec(),
        }
    }

    /// The direction `F(state, z)`, with the loss gradient clipped to norm `L`.
    ///
    /// For the momentum variants `F = (-c, c)` where `c` is the clipped
    /// gradient, so that `g - ηF` adds `+ηc` to the velocity and `-ηc` to
    /// the parameters.
    pub fn direction(&self, state: &[f64], z: &DataPoint) -> Vec<f64> {
        let c = self.clipped_gradient(&self.gradient_point(state), z);
        if self.variant.is_momentum() {
            let mut f: Vec<f64> = c.iter().map(|x| -x).collect();
            f.extend_from_slice(&c);
            f
        } else {
            c
        }
    }

    fn check_state(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.state_dim() {
            return Err(Error::InvalidArgument(format!(
                "state has dimension {} but the rule expects {}",
                state.len(),
                self.state_dim()
            )));
        }
        Ok(())
    }

    fn deterministic_part(&self, state: &[f64], eta: f64, z: &DataPoint) -> Vec<f64> {
        let f = self.direction(state, z);
        debug_assert!(
            eta * crate::model::vector::norm(&f) <= eta * self.direction_norm_cap() * (1.0 + 1e-12),
            "update exceeds its cap"
        );
        let mut next = self.g(state);
        next.iter_mut().zip(&f).for_each(|(s, fi)| *s -= eta * fi);
        next
    }

    /// One update with the noise switched off. Intended for testing the
    /// deterministic part; bound computations never accept zero noise.
    pub fn step_noiseless(&self, state: &[f64], eta: f64, z: &DataPoint) -> Result<Vec<f64>> {
        self.check_state(state)?;
        Ok(match self.variant {
            Variant::NoisyNesterov => self.nesterov(state, eta, z, &vec![0.0; self.dim], &vec![0.0; self.dim]),
            Variant::PerturbedSgd => self.perturbed(state, eta, z, &vec![0.0; self.dim]),
            _ => self.deterministic_part(state, eta, z),
        })
    }

    /// Nesterov update written exactly as displayed:
    /// `V' = γV + η c(W - γV) + ξ'`, `W' = W - V' + ξ'' + ξ'`.
    fn nesterov(&self, state: &[f64], eta: f64, z: &DataPoint, xi_v: &[f64], xi_w: &[f64]) -> Vec<f64> {
        let c = self.clipped_gradient(&self.gradient_point(state), z);
        let (v, w) = state.split_at(self.dim);
        let v_next: Vec<f64> = (0..self.dim)
            .map(|i| self.gamma * v[i] + eta * c[i] + xi_v[i])
            .collect();
        let w_next: Vec<f64> = (0..self.dim).map(|i| w[i] - v_next[i] + xi_w[i] + xi_v[i]).collect();
        let mut out = v_next;
        out.extend(w_next);
        out
    }

    /// Perturbed SGD written as displayed: `W' = W - η(c(W) + u)`.
    fn perturbed(&self, state: &[f64], eta: f64, z: &DataPoint, u: &[f64]) -> Vec<f64> {
        let c = self.clipped_gradient(state, z);
        state
            .iter()
            .zip(c.iter().zip(u))
            .map(|(w, (ci, ui))| w - eta * (ci + ui))
            .collect()
    }
}

/// One noisy update.
///
/// Gaussian variants draw exactly `state_dim` standard normals (velocity
/// block first); perturbed SGD draws `d + 1` variates for its ball sample.
pub fn step<R: Rng + ?Sized>(
    state: &[f64],
    rule: &UpdateRule,
    eta: f64,
    sigma: f64,
    z: &DataPoint,
    rng: &mut R,
) -> Result<Vec<f64>> {
    rule.check_state(state)?;
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stepsize must be finite and >= 0, got {eta}"
        )));
    }
    match rule.noise_model() {
        NoiseModel::UniformBall => {
            let u = uniform_in_ball(rule.dim, 1.0, rng);
            Ok(rule.perturbed(state, eta, z, &u))
        }
        NoiseModel::GaussianIsotropic => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "noise level must be positive, got {sigma}"
                )));
            }
            let xi: Vec<f64> = (0..rule.state_dim())
                .map(|_| {
                    let e: f64 = StandardNormal.sample(rng);
                    sigma * e
                })
                .collect();
            if rule.variant == Variant::NoisyNesterov {
                let (xi_v, xi_w) = xi.split_at(rule.dim);
                return Ok(rule.nesterov(state, eta, z, xi_v, xi_w));
            }
            let mut next = rule.deterministic_part(state, eta, z);
            next.iter_mut().zip(&xi).for_each(|(s, e)| *s += e);
            Ok(next)
        }
    }
}

/// SGLD: `g = id`, `F = clip(∇l, L)`, Gaussian noise.
pub fn make_sgld_rule(task: &TaskSpec) -> UpdateRule {
    UpdateRule {
        variant: Variant::Sgld,
        loss: task.loss.clone(),
        cap: task.l,
        dim: task.d,
        gamma: 0.0,
    }
}

/// Perturbed SGD with noise uniform in the unit ball; needs a constant stepsize.
pub fn make_perturbed_sgd_rule(task: &TaskSpec, schedule: &Schedule) -> Result<UpdateRule> {
    if !schedule.is_empty() && schedule.constant_eta().is_none() {
        return Err(Error::Config("perturbed SGD requires a constant stepsize".into()));
    }
    Ok(UpdateRule {
        variant: Variant::PerturbedSgd,
        loss: task.loss.clone(),
        cap: task.l,
        dim: task.d,
        gamma: 0.0,
    })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Config(format!(
            "momentum coefficient must lie in [0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// Noisy momentum on the stacked `(v, w)` state with `g = [[γ, 0], [-γ, 1]]`.
pub fn make_momentum_rule(task: &TaskSpec, gamma: f64) -> Result<UpdateRule> {
    check_gamma(gamma)?;
    Ok(UpdateRule {
        variant: Variant::NoisyMomentum,
        loss: task.loss.clone(),
        cap: task.l,
        dim: task.d,
        gamma,
    })
}

/// Noisy Nesterov: like momentum, with the gradient taken at `w - γv`.
pub fn make_nesterov_rule(task: &TaskSpec, gamma: f64) -> Result<UpdateRule> {
    check_gamma(gamma)?;
    Ok(UpdateRule {
        variant: Variant::NoisyNesterov,
        loss: task.loss.clone(),
        cap: task.l,
        dim: task.d,
        gamma,
    })
}

pub const DEFAULT_GAMMA: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmConfig {
    pub variant: Variant,
    /// Momentum coefficient, used by the momentum variants only.
    pub gamma: f64,
    pub schedule: Schedule,
    pub sampler: Sampler,
}

impl AlgorithmConfig {
    pub fn new(variant: Variant, schedule: Schedule, sampler: Sampler) -> Self {
        Self {
            variant,
            gamma: DEFAULT_GAMMA,
            schedule,
            sampler,
        }
    }

    pub fn sgld(schedule: Schedule) -> Self {
        Self::new(Variant::Sgld, schedule, Sampler::UniformIid)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn rule(&self, task: &TaskSpec) -> Result<UpdateRule> {
        match self.variant {
            Variant::Sgld => Ok(make_sgld_rule(task)),
            Variant::PerturbedSgd => make_perturbed_sgd_rule(task, &self.schedule),
            Variant::NoisyMomentum => make_momentum_rule(task, self.gamma),
            Variant::NoisyNesterov => make_nesterov_rule(task, self.gamma),
        }
    }
}

fn initial_state(task: &TaskSpec, rule: &UpdateRule) -> Vec<f64> {
    let mut s = vec![0.0; rule.param_offset()];
    s.extend_from_slice(&task.w0);
    s
}

/// Runs `T` steps from `w0` (with zero initial velocity for the momentum variants).
///
/// At each step the sample index is drawn first, from the sampling stream
/// and the index history only, then the update is applied with the noise
/// stream. The result is a pure function of the arguments.
pub fn run_trajectory(task: &TaskSpec, algo: &AlgorithmConfig, dataset: &Dataset, seed: u64) -> Result<Trajectory> {
    run_trajectory_with(task, algo, dataset, seed, |_, _| {})
}

/// [`run_trajectory`] with a hook that may overwrite the state after each step.
///
/// Used to check that sampling never reacts to the iterates.
pub fn run_trajectory_with<F>(
    task: &TaskSpec,
    algo: &AlgorithmConfig,
    dataset: &Dataset,
    seed: u64,
    mut intervene: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, &mut Vec<f64>),
{
    if dataset.len() != task.n {
        return Err(Error::InvalidArgument(format!(
            "dataset has {} points but the task expects n = {}",
            dataset.len(),
            task.n
        )));
    }
    let rule = algo.rule(task)?;
    let mut sampling = stream(seed, Purpose::Sampling);
    let mut noise = stream(seed, Purpose::Noise);
    let steps = algo.schedule.len();
    let mut iterates = Vec::with_capacity(steps + 1);
    let mut indices = Vec::with_capacity(steps);
    let mut state = initial_state(task, &rule);
    iterates.push(state.clone());
    for t in 1..=steps {
        let i = algo.sampler.draw(dataset, &indices, t, &mut sampling)?;
        indices.push(i);
        state = step(
            &state,
            &rule,
            algo.schedule.eta(t),
            algo.schedule.sigma(t),
            dataset.get(i),
            &mut noise,
        )?;
        intervene(t, &mut state);
        iterates.push(state.clone());
    }
    Ok(Trajectory {
        iterates,
        sample_indices: indices,
        seed,
        param_offset: rule.param_offset(),
    })
}
