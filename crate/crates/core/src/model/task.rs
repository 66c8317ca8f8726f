use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::model::data::DataDistribution;
use crate::model::loss::{sub_gaussian_constant, LossModel};
use crate::model::vector::squared_distance;

/// A synthetic learning problem together with the constants the bounds need.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub distribution: DataDistribution,
    pub loss: LossModel,
    pub n: usize,
    pub d: usize,
    /// Sub-Gaussian constant of `l(w, Z)`.
    pub r: f64,
    /// Update-norm cap enforced by clipping.
    pub l: f64,
    /// Initialization radius, an upper bound on `||w0 - w*_S||`.
    pub g: f64,
    pub w0: Vec<f64>,
}

impl TaskSpec {
    /// Builds a task; `r = None` derives R from the loss range.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        distribution: DataDistribution,
        loss: LossModel,
        n: usize,
        r: Option<f64>,
        l: f64,
        g: f64,
        w0: Option<Vec<f64>>,
    ) -> Result<Self> {
        distribution.validate()?;
        loss.validate()?;
        let d = distribution.dim();
        let compatible = match (&distribution, &loss) {
            (_, LossModel::Constant { .. }) => true,
            (DataDistribution::GaussianMean { .. }, l) => !l.supervised(),
            (DataDistribution::LinearRegressionBoundedNoise { .. }, l) => matches!(l, LossModel::LeastSquares),
            (DataDistribution::LogisticPairs { .. }, l) => matches!(l, LossModel::Logistic),
        };
        if !compatible {
            return Err(Error::Config(format!(
                "loss '{}' cannot be used with distribution '{}'",
                loss.kind(),
                distribution.kind()
            )));
        }
        if n == 0 {
            return Err(Error::Config("task.n must be at least 1".into()));
        }
        let r = match r {
            Some(r) => r,
            None => sub_gaussian_constant(&loss)?,
        };
        for (name, v) in [("R", r), ("L", l), ("G", g)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "task.{name} must be positive and finite, got {v}"
                )));
            }
        }
        let w0 = w0.unwrap_or_else(|| vec![0.0; d]);
        if w0.len() != d {
            return Err(Error::Config(format!(
                "w0 has length {} but the task dimension is {d}",
                w0.len()
            )));
        }
        if w0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("w0 must be finite".into()));
        }
        Ok(Self {
            distribution,
            loss,
            n,
            d,
            r,
            l,
            g,
            w0,
        })
    }

    pub fn from_config(cfg: &TaskConfig) -> Result<Self> {
        let need = |v: &Option<Vec<f64>>, key: &str| {
            v.clone()
                .ok_or_else(|| Error::Config(format!("task.kind '{}' requires task.{key}", cfg.kind)))
        };
        let distribution = match cfg.kind.as_str() {
            "gaussian-mean" => DataDistribution::GaussianMean {
                mean: cfg.mean.clone().unwrap_or_else(|| vec![0.0; cfg.d]),
                scale: cfg.scale.unwrap_or(1.0),
            },
            "linear-regression-bounded-noise" => DataDistribution::LinearRegressionBoundedNoise {
                weights: need(&cfg.weights, "weights")?,
                noise_half_width: cfg.noise_half_width.unwrap_or(0.0),
            },
            "logistic-pairs" => DataDistribution::LogisticPairs {
                weights: need(&cfg.weights, "weights")?,
            },
            other => return Err(Error::Config(format!("unknown task.kind '{other}'"))),
        };
        if distribution.dim() != cfg.d {
            return Err(Error::Config(format!(
                "task.d = {} does not match the distribution parameters (dimension {})",
                cfg.d,
                distribution.dim()
            )));
        }
        Self::new(
            distribution,
            cfg.loss.clone(),
            cfg.n,
            cfg.r,
            cfg.l,
            cfg.g,
            cfg.w0.clone(),
        )
    }

    pub fn to_config(&self) -> TaskConfig {
        let mut cfg = TaskConfig {
            kind: self.distribution.kind().to_string(),
            n: self.n,
            d: self.d,
            r: Some(self.r),
            l: self.l,
            g: self.g,
            w0: Some(self.w0.clone()),
            loss: self.loss.clone(),
            mean: None,
            scale: None,
            weights: None,
            noise_half_width: None,
        };
        match &self.distribution {
            DataDistribution::GaussianMean { mean, scale } => {
                cfg.mean = Some(mean.clone());
                cfg.scale = Some(*scale);
            }
            DataDistribution::LinearRegressionBoundedNoise {
                weights,
                noise_half_width,
            } => {
                cfg.weights = Some(weights.clone());
                cfg.noise_half_width = Some(*noise_half_width);
            }
            DataDistribution::LogisticPairs { weights } => cfg.weights = Some(weights.clone()),
        }
        cfg
    }

    /// `L_μ(w)` in closed form, when one is available for this loss/distribution pair.
    pub fn population_risk_closed_form(&self, w: &[f64]) -> Option<f64> {
        match (&self.distribution, &self.loss) {
            (_, LossModel::Constant { value }) => Some(*value),
            (DataDistribution::GaussianMean { mean, scale }, LossModel::Squared) => {
                Some(squared_distance(w, mean) + self.d as f64 * scale * scale)
            }
            (DataDistribution::GaussianMean { mean, scale }, LossModel::TruncatedSquared { cap }) => {
                Some(truncated_squared_risk(squared_distance(w, mean), *scale, *cap, self.d))
            }
            (
                DataDistribution::LinearRegressionBoundedNoise {
                    weights,
                    noise_half_width,
                },
                LossModel::LeastSquares,
            ) => Some(0.5 * (squared_distance(w, weights) / 3.0 + noise_half_width * noise_half_width / 3.0)),
            _ => None,
        }
    }
}

/// `E[min(||w - Z||², cap)]` for `Z ~ N(m, s² I_d)` with `dist2 = ||w - m||²`.
///
/// `||w - Z||² / s²` is noncentral chi-square with `d` degrees of freedom and
/// noncentrality `λ = dist2 / s²`, i.e. a Poisson(λ/2) mixture of central
/// chi-squares with `d + 2k` degrees of freedom. For a central `χ²_ν`,
/// `E[min(X, a)] = ν P(χ²_{ν+2} <= a) + a P(χ²_ν > a)`.
fn truncated_squared_risk(dist2: f64, scale: f64, cap: f64, d: usize) -> f64 {
    if scale == 0.0 {
        return dist2.min(cap);
    }
    let s2 = scale * scale;
    let a = cap / s2;
    let half_lambda = 0.5 * dist2 / s2;
    let spread = 20.0 * half_lambda.sqrt() + 60.0;
    let k_min = (half_lambda - spread).max(0.0).floor() as usize;
    let k_max = (half_lambda + spread).ceil() as usize;
    let mut total = 0.0;
    for k in k_min..=k_max {
        let log_w = if half_lambda == 0.0 {
            if k == 0 {
                0.0
            } else {
                break;
            }
        } else {
            -half_lambda + k as f64 * half_lambda.ln() - ln_gamma(k as f64 + 1.0)
        };
        let weight = log_w.exp();
        if weight == 0.0 && k as f64 > half_lambda {
            break;
        }
        let nu = (d + 2 * k) as f64;
        let below = gamma_lr(0.5 * nu, 0.5 * a);
        if below < 1e-18 {
            // every remaining component sits almost surely above the cap
            let tail = if k == 0 { 1.0 } else { gamma_lr(k as f64, half_lambda) };
            total += a * tail;
            break;
        }
        let below_next = gamma_lr(0.5 * nu + 1.0, 0.5 * a);
        total += weight * (nu * below_next + a * (1.0 - below));
    }
    s2 * total
}

/// JSON form of a task. Keys: `kind`, `n`, `d`, `R`, `L`, `G`, `w0`, `loss`,
/// plus the distribution parameters for the chosen kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub kind: String,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<Vec<f64>>,
    pub loss: LossModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_half_width: Option<f64>,
}
