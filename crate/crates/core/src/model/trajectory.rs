use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iterates `W_0..=W_T` of one run plus the index drawn at each step.
///
/// For the momentum variants the state is the stacked `(V, W)` vector; the
/// parameter block starts at `param_offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub iterates: Vec<Vec<f64>>,
    /// `sample_indices[t - 1]` is the index used at step `t`.
    pub sample_indices: Vec<usize>,
    pub seed: u64,
    pub param_offset: usize,
}

impl Trajectory {
    /// Number of steps `T`.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn state_dim(&self) -> usize {
        self.iterates[0].len()
    }

    /// Parameter block of iterate `t`.
    pub fn params(&self, t: usize) -> &[f64] {
        &self.iterates[t][self.param_offset..]
    }

    /// CSV with columns `t, s0, s1, ..., sample_index`; numbers carry 17
    /// significant digits and step 0 has an empty sample index.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.state_dim()).map(|i| format!("s{i}")));
        header.push("sample_index".into());
        w.write_record(&header)?;
        for (t, state) in self.iterates.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(state.iter().map(|x| fmt_f64(*x)));
            row.push(if t == 0 {
                String::new()
            } else {
                self.sample_indices[t - 1].to_string()
            });
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed 17-significant-digit rendering used by every table.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OutputFunction {
    LastIterate,
    /// `(1/T) Σ_{t=1..T} W_t`; `W_0` is not included.
    #[default]
    Mean,
    /// Average of the last `⌈alpha T⌉` iterates.
    SuffixAverage {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
}

fn default_alpha() -> f64 {
    0.5
}

impl OutputFunction {
    pub fn suffix(alpha: f64) -> Self {
        OutputFunction::SuffixAverage { alpha }
    }
}

/// Hypothesis returned by the algorithm: `f(W_1, ..., W_T)` on the parameter block.
pub fn apply_output(f: &OutputFunction, traj: &Trajectory) -> Result<Vec<f64>> {
    let steps = traj.steps();
    if steps == 0 {
        return Err(Error::InvalidArgument("output functions need at least one step".into()));
    }
    match *f {
        OutputFunction::LastIterate => Ok(traj.params(steps).to_vec()),
        OutputFunction::Mean => suffix_mean(traj, steps),
        OutputFunction::SuffixAverage { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::Config(format!(
                    "suffix fraction must lie in (0, 1], got {alpha}"
                )));
            }
            // guard against αT landing a rounding error above an integer
            let k = ((alpha * steps as f64) - 1e-9).ceil().clamp(1.0, steps as f64) as usize;
            suffix_mean(traj, k)
        }
    }
}

fn suffix_mean(traj: &Trajectory, k: usize) -> Result<Vec<f64>> {
    let steps = traj.steps();
    let dim = traj.params(0).len();
    let mut acc = vec![0.0; dim];
    for t in steps - k + 1..=steps {
        acc.iter_mut().zip(traj.params(t)).for_each(|(a, x)| *a += x);
    }
    acc.iter_mut().for_each(|a| *a /= k as f64);
    Ok(acc)
}
