use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::data::DataPoint;
use crate::model::vector::{dot, squared_distance};

/// Per-instance loss `l(w, z)` together with its declared analytic properties.
///
/// The "location" losses (`squared`, `truncated-squared`, `huber`) compare `w`
/// with the feature vector directly; the supervised ones read the label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LossModel {
    /// `||w - z||²`.
    Squared,
    /// `min(||w - z||², cap)`; range `[0, cap]`.
    TruncatedSquared { cap: f64 },
    /// Huber penalty on `r = ||w - z||`: `r²` for `r <= delta`, `2 delta r - delta²` beyond.
    Huber { delta: f64 },
    /// `(y - <w, x>)² / 2`.
    LeastSquares,
    /// `ln(1 + exp(-y <w, x>))`, features assumed to lie in the unit ball.
    Logistic,
    /// `l ≡ value`.
    Constant { value: f64 },
}

impl LossModel {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Squared => "squared",
            Self::TruncatedSquared { .. } => "truncated-squared",
            Self::Huber { .. } => "huber",
            Self::LeastSquares => "least-squares",
            Self::Logistic => "logistic",
            Self::Constant { .. } => "constant",
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Self::TruncatedSquared { cap } if !(*cap > 0.0 && cap.is_finite()) => Err(Error::Config(format!(
                "truncated-squared cap must be positive, got {cap}"
            ))),
            Self::Huber { delta } if !(*delta > 0.0 && delta.is_finite()) => {
                Err(Error::Config(format!("huber delta must be positive, got {delta}")))
            }
            Self::Constant { value } if !value.is_finite() => Err(Error::Config("constant loss must be finite".into())),
            _ => Ok(()),
        }
    }

    /// Whether the loss needs labeled points.
    pub fn supervised(&self) -> bool {
        matches!(self, Self::LeastSquares | Self::Logistic)
    }

    pub fn value(&self, w: &[f64], z: &DataPoint) -> f64 {
        match self {
            Self::Squared => squared_distance(w, &z.features),
            Self::TruncatedSquared { cap } => squared_distance(w, &z.features).min(*cap),
            Self::Huber { delta } => {
                let r = squared_distance(w, &z.features).sqrt();
                if r <= *delta {
                    r * r
                } else {
                    2.0 * delta * r - delta * delta
                }
            }
            Self::LeastSquares => {
                let resid = label(z) - dot(w, &z.features);
                0.5 * resid * resid
            }
            Self::Logistic => softplus(-label(z) * dot(w, &z.features)),
            Self::Constant { value } => *value,
        }
    }

    pub fn gradient(&self, w: &[f64], z: &DataPoint) -> Vec<f64> {
        let diff = || w.iter().zip(&z.features).map(|(a, b)| a - b);
        match self {
            Self::Squared => diff().map(|x| 2.0 * x).collect(),
            Self::TruncatedSquared { cap } => {
                if squared_distance(w, &z.features) < *cap {
                    diff().map(|x| 2.0 * x).collect()
                } else {
                    vec![0.0; w.len()]
                }
            }
            Self::Huber { delta } => {
                let r = squared_distance(w, &z.features).sqrt();
                if r <= *delta {
                    diff().map(|x| 2.0 * x).collect()
                } else {
                    diff().map(|x| 2.0 * delta * x / r).collect()
                }
            }
            Self::LeastSquares => {
                let resid = label(z) - dot(w, &z.features);
                z.features.iter().map(|x| -resid * x).collect()
            }
            Self::Logistic => {
                let y = label(z);
                let s = sigmoid(-y * dot(w, &z.features));
                z.features.iter().map(|x| -y * x * s).collect()
            }
            Self::Constant { .. } => vec![0.0; w.len()],
        }
    }

    /// `[B_lo, B_hi]` such that every loss value lies in the interval.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::TruncatedSquared { cap } => (0.0, *cap),
            Self::Constant { value } => (*value, *value),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Uniform bound on `||∇_w l(w, z)||₂`; infinite when none exists.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::TruncatedSquared { cap } => 2.0 * cap.sqrt(),
            Self::Huber { delta } => 2.0 * delta,
            Self::Logistic => 1.0,
            Self::Constant { .. } => 0.0,
            Self::Squared | Self::LeastSquares => f64::INFINITY,
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Self::TruncatedSquared { .. })
    }
}

fn label(z: &DataPoint) -> f64 {
    z.label.expect("supervised loss evaluated on an unlabeled point")
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Hoeffding sub-Gaussian constant `(B_hi - B_lo) / 2` of a range-bounded loss.
pub fn sub_gaussian_constant(loss: &LossModel) -> Result<f64> {
    let (lo, hi) = loss.range();
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!(
            "loss '{}' has unbounded range; supply the sub-Gaussian constant R explicitly",
            loss.kind()
        )));
    }
    Ok((hi - lo) / 2.0)
}
