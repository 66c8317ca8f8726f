use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::vector::{dot, norm};

/// One training instance: a feature vector and, for supervised tasks, a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub features: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<f64>,
}

impl DataPoint {
    pub fn unlabeled(features: Vec<f64>) -> Self {
        Self { features, label: None }
    }

    pub fn labeled(features: Vec<f64>, label: f64) -> Self {
        Self {
            features,
            label: Some(label),
        }
    }

    fn is_finite(&self) -> bool {
        self.features.iter().all(|x| x.is_finite()) && self.label.is_none_or(f64::is_finite)
    }
}

/// An immutable training set of `n >= 1` points.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    points: Vec<DataPoint>,
}

impl Dataset {
    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("a dataset needs at least one point".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("data point {i} has non-finite entries")));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &DataPoint {
        &self.points[i]
    }
}

/// Synthetic data-generating distributions.
#[derive(Clone, Debug, PartialEq)]
pub enum DataDistribution {
    /// `z ~ N(mean, scale² I)`; `scale = 0` is a point mass at `mean`.
    GaussianMean { mean: Vec<f64>, scale: f64 },
    /// `x ~ U[-1, 1]^d`, `y = <weights, x> + U[-h, h]`.
    LinearRegressionBoundedNoise { weights: Vec<f64>, noise_half_width: f64 },
    /// `x` uniform in the unit ball, `y = ±1` with `P(y = 1 | x) = 1 / (1 + exp(-<weights, x>))`.
    LogisticPairs { weights: Vec<f64> },
}

impl DataDistribution {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::GaussianMean { .. } => "gaussian-mean",
            Self::LinearRegressionBoundedNoise { .. } => "linear-regression-bounded-noise",
            Self::LogisticPairs { .. } => "logistic-pairs",
        }
    }

    /// Parameter dimension the distribution is set up for.
    pub fn dim(&self) -> usize {
        match self {
            Self::GaussianMean { mean, .. } => mean.len(),
            Self::LinearRegressionBoundedNoise { weights, .. } | Self::LogisticPairs { weights } => weights.len(),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match self {
            Self::GaussianMean { mean, scale } => {
                if mean.is_empty() || mean.iter().any(|x| !x.is_finite()) {
                    return bad("gaussian-mean needs a finite, non-empty mean vector");
                }
                if !(*scale >= 0.0) || !scale.is_finite() {
                    return bad("gaussian-mean scale must be finite and >= 0");
                }
            }
            Self::LinearRegressionBoundedNoise {
                weights,
                noise_half_width,
            } => {
                if weights.is_empty() || weights.iter().any(|x| !x.is_finite()) {
                    return bad("regression needs a finite, non-empty weight vector");
                }
                if !(*noise_half_width >= 0.0) || !noise_half_width.is_finite() {
                    return bad("noise half-width must be finite and >= 0");
                }
            }
            Self::LogisticPairs { weights } => {
                if weights.is_empty() || weights.iter().any(|x| !x.is_finite()) {
                    return bad("logistic-pairs needs a finite, non-empty weight vector");
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DataPoint {
        match self {
            Self::GaussianMean { mean, scale } => DataPoint::unlabeled(
                mean.iter()
                    .map(|m| {
                        let e: f64 = StandardNormal.sample(rng);
                        m + scale * e
                    })
                    .collect(),
            ),
            Self::LinearRegressionBoundedNoise {
                weights,
                noise_half_width,
            } => {
                let x: Vec<f64> = weights.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
                let noise = if *noise_half_width > 0.0 {
                    rng.random_range(-noise_half_width..=*noise_half_width)
                } else {
                    0.0
                };
                let y = dot(weights, &x) + noise;
                DataPoint::labeled(x, y)
            }
            Self::LogisticPairs { weights } => {
                let x = uniform_in_ball(weights.len(), 1.0, rng);
                let p = 1.0 / (1.0 + (-dot(weights, &x)).exp());
                let y = if rng.random::<f64>() < p { 1.0 } else { -1.0 };
                DataPoint::labeled(x, y)
            }
        }
    }

    pub fn sample_dataset<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        Dataset::new((0..n).map(|_| self.sample(rng)).collect())
    }
}

/// Uniform draw from the `d`-dimensional ball of the given radius.
///
/// Direction from `d` standard normals, radius `radius * U^(1/d)`; always
/// consumes exactly `d + 1` variates.
pub fn uniform_in_ball<R: Rng + ?Sized>(d: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let u: f64 = rng.random();
    let n = norm(&dir);
    let r = radius * u.powf(1.0 / d as f64);
    if n == 0.0 {
        // probability zero; keep the variate count fixed anyway
        let mut v = vec![0.0; d];
        v[0] = r;
        return v;
    }
    dir.iter().map(|x| x * r / n).collect()
}
