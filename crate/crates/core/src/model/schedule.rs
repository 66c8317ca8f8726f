use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Constant,
    COverT,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// `σ_t = sqrt(η_t)`.
    SqrtEta,
    Constant,
    Custom,
}

/// Per-step stepsizes `η_t` and noise levels `σ_t`, `t = 1..=T`.
///
/// Zero stepsizes are allowed (such steps carry no information). Zero noise
/// is representable so that bound computations can report it as divergent.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    eta: Vec<f64>,
    sigma: Vec<f64>,
    step_kind: StepKind,
    noise_kind: NoiseKind,
    c: Option<f64>,
}

impl Schedule {
    pub fn from_steps(eta: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        Self::build(eta, sigma, StepKind::Custom, NoiseKind::Custom, None)
    }

    fn build(
        eta: Vec<f64>,
        sigma: Vec<f64>,
        step_kind: StepKind,
        noise_kind: NoiseKind,
        c: Option<f64>,
    ) -> Result<Self> {
        if eta.len() != sigma.len() {
            return Err(Error::Config(format!(
                "schedule has {} stepsizes but {} noise levels",
                eta.len(),
                sigma.len()
            )));
        }
        if let Some(t) = eta.iter().position(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(Error::Config(format!(
                "stepsize at t={} must be finite and >= 0",
                t + 1
            )));
        }
        if let Some(t) = sigma.iter().position(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::Config(format!(
                "noise level at t={} must be finite and >= 0",
                t + 1
            )));
        }
        Ok(Self {
            eta,
            sigma,
            step_kind,
            noise_kind,
            c,
        })
    }

    /// `η_t = eta`, `σ_t = sigma`.
    pub fn constant(eta: f64, sigma: f64, steps: usize) -> Result<Self> {
        Self::build(
            vec![eta; steps],
            vec![sigma; steps],
            StepKind::Constant,
            NoiseKind::Constant,
            Some(eta),
        )
    }

    /// `η_t = eta`, `σ_t = sqrt(eta)`.
    pub fn constant_sqrt_eta(eta: f64, steps: usize) -> Result<Self> {
        Self::build(
            vec![eta; steps],
            vec![eta.sqrt(); steps],
            StepKind::Constant,
            NoiseKind::SqrtEta,
            Some(eta),
        )
    }

    /// The usual SGLD practice: `η_t = c / t`, `σ_t = sqrt(η_t)`.
    pub fn sgld_practice(c: f64, steps: usize) -> Result<Self> {
        let eta: Vec<f64> = (1..=steps).map(|t| c / t as f64).collect();
        let sigma = eta.iter().map(|e| e.sqrt()).collect();
        Self::build(eta, sigma, StepKind::COverT, NoiseKind::SqrtEta, Some(c))
    }

    /// `η_t = c / t` with a constant noise level.
    pub fn c_over_t(c: f64, sigma: f64, steps: usize) -> Result<Self> {
        let eta = (1..=steps).map(|t| c / t as f64).collect();
        Self::build(eta, vec![sigma; steps], StepKind::COverT, NoiseKind::Constant, Some(c))
    }

    pub fn from_config(cfg: &ScheduleConfig) -> Result<Self> {
        if let (Some(e), Some(s)) = (&cfg.eta, &cfg.sigmas) {
            return Self::from_steps(e.clone(), s.clone());
        }
        let c = cfg.c.ok_or_else(|| Error::Config("schedule.c is required".into()))?;
        match (cfg.kind, cfg.sigma) {
            (StepKind::Constant, Some(s)) => Self::constant(c, s, cfg.steps),
            (StepKind::Constant, None) => Self::constant_sqrt_eta(c, cfg.steps),
            (StepKind::COverT, Some(s)) => Self::c_over_t(c, s, cfg.steps),
            (StepKind::COverT, None) => Self::sgld_practice(c, cfg.steps),
            (StepKind::Custom, _) => Err(Error::Config(
                "custom schedules need explicit eta and sigmas arrays".into(),
            )),
        }
    }

    pub fn to_config(&self) -> ScheduleConfig {
        match (self.step_kind, self.noise_kind) {
            (StepKind::Custom, _) | (_, NoiseKind::Custom) => ScheduleConfig {
                kind: StepKind::Custom,
                c: None,
                steps: self.len(),
                sigma: None,
                eta: Some(self.eta.clone()),
                sigmas: Some(self.sigma.clone()),
            },
            (kind, noise) => ScheduleConfig {
                kind,
                c: self.c,
                steps: self.len(),
                sigma: (noise == NoiseKind::Constant)
                    .then(|| self.sigma.first().copied())
                    .flatten(),
                eta: None,
                sigmas: None,
            },
        }
    }

    /// Number of steps `T`.
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// `η_t` for `1 <= t <= T`.
    pub fn eta(&self, t: usize) -> f64 {
        self.eta[t - 1]
    }

    /// `σ_t` for `1 <= t <= T`.
    pub fn sigma(&self, t: usize) -> f64 {
        self.sigma[t - 1]
    }

    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.eta.iter().copied().zip(self.sigma.iter().copied())
    }

    pub fn step_kind(&self) -> StepKind {
        self.step_kind
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.noise_kind
    }

    /// The schedule constant `c` for constant and `c/t` schedules.
    pub fn c(&self) -> Option<f64> {
        self.c
    }

    /// The common stepsize if every step uses the same one.
    pub fn constant_eta(&self) -> Option<f64> {
        let first = *self.eta.first()?;
        self.eta.iter().all(|e| *e == first).then_some(first)
    }

    pub fn constant_sigma(&self) -> Option<f64> {
        let first = *self.sigma.first()?;
        self.sigma.iter().all(|s| *s == first).then_some(first)
    }

    /// Runs `self` then `other`.
    pub fn concat(&self, other: &Schedule) -> Schedule {
        let mut eta = self.eta.clone();
        eta.extend_from_slice(&other.eta);
        let mut sigma = self.sigma.clone();
        sigma.extend_from_slice(&other.sigma);
        Schedule {
            eta,
            sigma,
            step_kind: StepKind::Custom,
            noise_kind: NoiseKind::Custom,
            c: None,
        }
    }

    /// Same schedule cut (or kept) at `steps` steps.
    pub fn truncated(&self, steps: usize) -> Schedule {
        let k = steps.min(self.len());
        Schedule {
            eta: self.eta[..k].to_vec(),
            sigma: self.sigma[..k].to_vec(),
            ..self.clone()
        }
    }
}

/// JSON form of a schedule: `kind` (`constant` | `c-over-t` | `custom`), `c`,
/// `T`, and optional constant noise `sigma` (absent means `σ_t = sqrt(η_t)`).
/// Custom schedules list `eta` and `sigmas` explicitly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: StepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(rename = "T")]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
}
