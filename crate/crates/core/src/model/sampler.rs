//! Index samplers.
//!
//! A sampler picks the training point used at step `t`. Its only inputs are
//! the dataset, the indices it picked before, the step number and a random
//! generator: no parameter iterate is ever passed in, so the selected index
//! cannot depend on the trajectory.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::data::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    UniformIid,
    ShuffleWithoutReplacement,
    ImportanceWeighted,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sampler {
    UniformIid,
    /// A fresh uniformly random permutation every `n` steps.
    ShuffleWithoutReplacement,
    /// Independent draws with `P(i) = weights[i]`.
    ImportanceWeighted {
        weights: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

impl Sampler {
    pub fn importance(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("importance weights must be non-empty".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Config("importance weights must be strictly positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("importance weights sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(Sampler::ImportanceWeighted { weights, cumulative })
    }

    pub fn from_config(cfg: &SamplerConfig) -> Result<Self> {
        match cfg.kind {
            SamplerKind::UniformIid => Ok(Sampler::UniformIid),
            SamplerKind::ShuffleWithoutReplacement => Ok(Sampler::ShuffleWithoutReplacement),
            SamplerKind::ImportanceWeighted => match &cfg.weights {
                Some(w) => Sampler::importance(w.clone()),
                None => Err(Error::Config(
                    "importance-weighted sampler requires sampler.weights".into(),
                )),
            },
        }
    }

    pub fn to_config(&self) -> SamplerConfig {
        match self {
            Sampler::UniformIid => SamplerConfig {
                kind: SamplerKind::UniformIid,
                weights: None,
            },
            Sampler::ShuffleWithoutReplacement => SamplerConfig {
                kind: SamplerKind::ShuffleWithoutReplacement,
                weights: None,
            },
            Sampler::ImportanceWeighted { weights, .. } => SamplerConfig {
                kind: SamplerKind::ImportanceWeighted,
                weights: Some(weights.clone()),
            },
        }
    }

    /// Index used at step `t >= 1`; `history` holds the indices of steps `1..t`.
    pub fn draw<R: Rng + ?Sized>(&self, data: &Dataset, history: &[usize], t: usize, rng: &mut R) -> Result<usize> {
        let n = data.len();
        if t == 0 || history.len() != t - 1 {
            return Err(Error::InvalidArgument(format!(
                "step {t} needs a history of length {}, got {}",
                t.saturating_sub(1),
                history.len()
            )));
        }
        match self {
            Sampler::UniformIid => Ok(rng.random_range(0..n)),
            Sampler::ShuffleWithoutReplacement => {
                let epoch_start = ((t - 1) / n) * n;
                let mut used = vec![false; n];
                for &i in &history[epoch_start..] {
                    used[i] = true;
                }
                let remaining = n - (t - 1 - epoch_start);
                let k = rng.random_range(0..remaining);
                Ok(used
                    .iter()
                    .enumerate()
                    .filter(|(_, u)| !**u)
                    .nth(k)
                    .map(|(i, _)| i)
                    .expect("shuffle history is inconsistent"))
            }
            Sampler::ImportanceWeighted { cumulative, .. } => {
                if cumulative.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "{} importance weights for a dataset of {n} points",
                        cumulative.len()
                    )));
                }
                let u: f64 = rng.random();
                let i = cumulative.partition_point(|c| *c <= u);
                Ok(i.min(n - 1))
            }
        }
    }
}

/// Free-function form of [`Sampler::draw`].
pub fn sample_index<R: Rng + ?Sized>(
    sampler: &Sampler,
    data: &Dataset,
    history: &[usize],
    t: usize,
    rng: &mut R,
) -> Result<usize> {
    sampler.draw(data, history, t, rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::data::DataPoint;
    use crate::rng::{stream, Purpose};

    fn dataset(n: usize) -> Dataset {
        Dataset::new((0..n).map(|i| DataPoint::unlabeled(vec![i as f64])).collect()).unwrap()
    }

    fn run(sampler: &Sampler, data: &Dataset, steps: usize, seed: u64) -> Vec<usize> {
        let mut rng = stream(seed, Purpose::Sampling);
        let mut hist = Vec::new();
        for t in 1..=steps {
            let i = sampler.draw(data, &hist, t, &mut rng).unwrap();
            hist.push(i);
        }
        hist
    }

    #[test]
    fn singleton_dataset_always_zero() {
        let d = dataset(1);
        assert!(run(&Sampler::UniformIid, &d, 20, 1).iter().all(|&i| i == 0));
    }

    #[test]
    fn shuffle_epoch_is_a_permutation() {
        let d = dataset(3);
        let mut first = run(&Sampler::ShuffleWithoutReplacement, &d, 3, 9);
        first.sort_unstable();
        assert_eq!(first, vec![0, 1, 2]);
    }

    #[test]
    fn shuffle_visits_each_index_k_times() {
        for n in [1, 2, 5, 13] {
            let d = dataset(n);
            let k = 7;
            let idx = run(&Sampler::ShuffleWithoutReplacement, &d, n * k, n as u64);
            let mut counts = vec![0; n];
            idx.iter().for_each(|&i| counts[i] += 1);
            assert!(counts.iter().all(|&c| c == k), "{counts:?}");
            for epoch in idx.chunks(n) {
                let mut e = epoch.to_vec();
                e.sort_unstable();
                assert_eq!(e, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn importance_frequency_within_three_sigma() {
        let s = Sampler::importance(vec![0.9, 0.1]).unwrap();
        let d = dataset(2);
        let mut rng = stream(4, Purpose::Sampling);
        let draws = 100_000;
        let zeros = (0..draws)
            .filter(|_| s.draw(&d, &[], 1, &mut rng).unwrap() == 0)
            .count();
        let freq = zeros as f64 / draws as f64;
        assert!((0.897..=0.903).contains(&freq), "{freq}");
    }

    #[test]
    fn importance_config_errors() {
        let missing = SamplerConfig {
            kind: SamplerKind::ImportanceWeighted,
            weights: None,
        };
        assert!(matches!(Sampler::from_config(&missing), Err(Error::Config(_))));
        assert!(Sampler::importance(vec![0.5, 0.0, 0.5]).is_err());
        assert!(Sampler::importance(vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn history_length_is_checked() {
        let d = dataset(3);
        let mut rng = stream(4, Purpose::Sampling);
        assert!(Sampler::UniformIid.draw(&d, &[0], 1, &mut rng).is_err());
        assert!(Sampler::UniformIid.draw(&d, &[], 0, &mut rng).is_err());
    }

    #[test]
    fn uniform_draws_ignore_history_contents() {
        let d = dataset(6);
        let s = Sampler::UniformIid;
        let mut a = stream(8, Purpose::Sampling);
        let mut b = stream(8, Purpose::Sampling);
        for t in 1..50 {
            let h1 = vec![0; t - 1];
            let h2: Vec<usize> = (0..t - 1).map(|i| (i * 7) % 6).collect();
            assert_eq!(s.draw(&d, &h1, t, &mut a).unwrap(), s.draw(&d, &h2, t, &mut b).unwrap());
        }
    }
}
