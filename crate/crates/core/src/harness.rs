//! Monte-Carlo estimates of the generalization gap and optimization error,
//! and verdicts against closed-form bounds.

use std::io::Write;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{run_trajectory, AlgorithmConfig};
use crate::error::{Error, Result};
use crate::model::vector::{norm, squared_distance};
use crate::model::{apply_output, fmt_f64, Dataset, LossModel, OutputFunction, TaskSpec};
use crate::rng::{derive_seed, stream, Purpose};

/// Fresh samples per population-risk estimate when no closed form exists.
pub const DEFAULT_MC_SAMPLES: usize = 20_000;
pub const DEFAULT_REPS: usize = 500;

/// Summation by recursive halving; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = pairwise_sum(xs) / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (m - 1.0);
    (mean, (var / m).sqrt())
}

pub fn empirical_risk(w: &[f64], data: &Dataset, loss: &LossModel) -> f64 {
    let values: Vec<f64> = data.points().iter().map(|z| loss.value(w, z)).collect();
    pairwise_sum(&values) / data.len() as f64
}

/// `L_μ(w)` as `(value, stderr)`: exact when the task has a closed form
/// (stderr 0), otherwise an average over `mc_samples` fresh draws.
pub fn population_risk(w: &[f64], task: &TaskSpec, mc_samples: usize, seed: u64) -> (f64, f64) {
    if let Some(v) = task.population_risk_closed_form(w) {
        return (v, 0.0);
    }
    let mut rng = stream(seed, Purpose::Population);
    let values: Vec<f64> = (0..mc_samples.max(2))
        .map(|_| task.loss.value(w, &task.distribution.sample(&mut rng)))
        .collect();
    mean_and_stderr(&values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub mean_gap: f64,
    /// Sample standard deviation over `sqrt(replications)`.
    pub stderr: f64,
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_rep: Option<Vec<f64>>,
}

impl GapEstimate {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let (mean_gap, stderr) = mean_and_stderr(&samples);
        Self {
            mean_gap,
            stderr,
            replications: samples.len(),
            per_rep: Some(samples),
        }
    }

    pub fn without_samples(mut self) -> Self {
        self.per_rep = None;
        self
    }
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 replications, got {reps}"
        )));
    }
    Ok(())
}

fn draw_dataset(task: &TaskSpec, rep_seed: u64) -> Result<Dataset> {
    task.distribution
        .sample_dataset(task.n, &mut stream(rep_seed, Purpose::Data))
}

/// `f(W^(T))`, or `W_0` itself when the run has no steps.
pub fn output_or_initial(output: &OutputFunction, traj: &crate::model::Trajectory) -> Result<Vec<f64>> {
    if traj.steps() == 0 {
        return Ok(traj.params(0).to_vec());
    }
    apply_output(output, traj)
}

/// One replication of the gap experiment: `L_μ(W) - L_S(W)` for a fresh `S`.
pub fn gap_sample(
    task: &TaskSpec,
    algo: &AlgorithmConfig,
    output: &OutputFunction,
    rep_seed: u64,
    mc_samples: usize,
) -> Result<f64> {
    let data = draw_dataset(task, rep_seed)?;
    let traj = run_trajectory(task, algo, &data, rep_seed)?;
    let w = output_or_initial(output, &traj)?;
    let (pop, _) = population_risk(&w, task, mc_samples, rep_seed);
    Ok(pop - empirical_risk(&w, &data, &task.loss))
}

/// Mean and stderr of `L_μ(W) - L_S(W)` over `reps` independent datasets and runs.
///
/// Replications run in parallel on derived seeds and are reduced in
/// replication order, so reruns bit-match.
pub fn estimate_gap(
    task: &TaskSpec,
    algo: &AlgorithmConfig,
    output: &OutputFunction,
    reps: usize,
    seed: u64,
) -> Result<GapEstimate> {
    estimate_gap_with(task, algo, output, reps, seed, DEFAULT_MC_SAMPLES)
}

pub fn estimate_gap_with(
    task: &TaskSpec,
    algo: &AlgorithmConfig,
    output: &OutputFunction,
    reps: usize,
    seed: u64,
    mc_samples: usize,
) -> Result<GapEstimate> {
    check_reps(reps)?;
    let samples = (0..reps)
        .into_par_iter()
        .map(|r| gap_sample(task, algo, output, derive_seed(seed, r as u64), mc_samples))
        .collect::<Result<Vec<f64>>>()?;
    Ok(GapEstimate::from_samples(samples))
}

/// Fraction of replications whose single-draw gap `|L_μ(W) - L_S(W)|`
/// exceeds `alpha`, for comparison with a confidence level `beta`.
/// `None` when the per-replication samples were dropped.
pub fn exceedance_frequency(gap: &GapEstimate, alpha: f64) -> Option<f64> {
    let samples = gap.per_rep.as_ref()?;
    let hits = samples.iter().filter(|g| g.abs() > alpha).count();
    Some(hits as f64 / samples.len() as f64)
}

/// Gradient of the empirical risk.
pub fn empirical_gradient(w: &[f64], data: &Dataset, loss: &LossModel) -> Vec<f64> {
    let mut g = vec![0.0; w.len()];
    for z in data.points() {
        for (gi, x) in g.iter_mut().zip(loss.gradient(w, z)) {
            *gi += x;
        }
    }
    let n = data.len() as f64;
    g.iter_mut().for_each(|x| *x /= n);
    g
}

const SOLVER_MAX_ITERS: usize = 10_000;
const SOLVER_GRAD_TOL: f64 = 1e-11;

/// Steepest descent with an exact line search. The search bisects on the
/// sign of the directional derivative, which stays reliable long after
/// differences of `L_S` have drowned in rounding.
fn descent_minimizer(start: &[f64], data: &Dataset, loss: &LossModel) -> Result<Vec<f64>> {
    let mut w = start.to_vec();
    let mut bracket: f64 = 1.0;
    let slope = |w: &[f64], dir: &[f64], s: f64| -> f64 {
        let p: Vec<f64> = w.iter().zip(dir).map(|(a, b)| a - s * b).collect();
        -empirical_gradient(&p, data, loss)
            .iter()
            .zip(dir)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    };
    for _ in 0..SOLVER_MAX_ITERS {
        let g = empirical_gradient(&w, data, loss);
        let gn = norm(&g);
        if gn <= SOLVER_GRAD_TOL {
            return Ok(w);
        }
        let (mut lo, mut hi) = (0.0, bracket);
        let mut grow = 0;
        while slope(&w, &g, hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(Error::Numerical {
                    message: "empirical risk has no minimizer along the descent direction".into(),
                    diagnostics: format!("gradient norm {gn:e}"),
                });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(&w, &g, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        let next: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a - s * b).collect();
        if next == w {
            // the step no longer changes w in f64
            if gn <= 1e-6 {
                return Ok(w);
            }
            break;
        }
        bracket = (2.0 * s).max(1e-12);
        w = next;
    }
    Err(Error::Numerical {
        message: "empirical risk minimizer did not converge".into(),
        diagnostics: format!("gradient norm {:e}", norm(&empirical_gradient(&w, data, loss))),
    })
}

/// `w*_S = argmin_w L_S(w)` for a convex loss.
///
/// Closed forms for the squared and least-squares losses, backtracking
/// gradient descent from `start` otherwise.
pub fn empirical_minimizer(data: &Dataset, loss: &LossModel, start: &[f64]) -> Result<Vec<f64>> {
    if !loss.is_convex() {
        return Err(Error::Unsupported(format!(
            "no minimizer certificate for non-convex loss '{}'",
            loss.kind()
        )));
    }
    let d = start.len();
    let n = data.len();
    match loss {
        LossModel::Squared => {
            let mut m = vec![0.0; d];
            for z in data.points() {
                m.iter_mut().zip(&z.features).for_each(|(a, b)| *a += b);
            }
            Ok(m.into_iter().map(|x| x / n as f64).collect())
        }
        LossModel::LeastSquares => {
            let x = DMatrix::from_fn(n, d, |i, j| data.get(i).features[j]);
            let y = DVector::from_fn(n, |i, _| data.get(i).label.unwrap_or(0.0));
            let svd = x.svd(true, true);
            let w = svd.solve(&y, 1e-12).map_err(|e| Error::Numerical {
                message: "least-squares solve failed".into(),
                diagnostics: e.into(),
            })?;
            Ok(w.iter().copied().collect())
        }
        LossModel::Constant { .. } => Ok(start.to_vec()),
        _ => descent_minimizer(start, data, loss),
    }
}

/// One replication of the optimization-error experiment:
/// `L_S(mean iterate) - L_S(w*_S)`, together with `||w0 - w*_S||`.
pub fn opt_error_sample(task: &TaskSpec, algo: &AlgorithmConfig, rep_seed: u64) -> Result<(f64, f64)> {
    let data = draw_dataset(task, rep_seed)?;
    let w_star = empirical_minimizer(&data, &task.loss, &task.w0)?;
    let traj = run_trajectory(task, algo, &data, rep_seed)?;
    let w = apply_output(&OutputFunction::Mean, &traj)?;
    let excess = empirical_risk(&w, &data, &task.loss) - empirical_risk(&w_star, &data, &task.loss);
    Ok((excess, squared_distance(&task.w0, &w_star).sqrt()))
}

/// Mean over datasets of the averaged iterate's empirical suboptimality.
///
/// Warns when some `||w0 - w*_S||` exceeds the task's `G`, since the
/// optimization bound then does not apply as stated.
pub fn estimate_opt_error(task: &TaskSpec, algo: &AlgorithmConfig, reps: usize, seed: u64) -> Result<GapEstimate> {
    check_reps(reps)?;
    if !task.loss.is_convex() {
        return Err(Error::Unsupported(format!(
            "optimization error needs a convex loss, '{}' is not",
            task.loss.kind()
        )));
    }
    let pairs = (0..reps)
        .into_par_iter()
        .map(|r| opt_error_sample(task, algo, derive_seed(seed, r as u64)))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let worst = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    if worst > task.g {
        log::warn!("observed ||w0 - w*_S|| = {worst:.6} exceeds G = {}", task.g);
    }
    Ok(GapEstimate::from_samples(pairs.into_iter().map(|p| p.0).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub gap: GapEstimate,
    pub bound: f64,
    pub pass: bool,
    pub margin: f64,
    pub ci_pass: bool,
}

/// `pass` iff `|mean| <= bound`; `ci_pass` iff `|mean| - 2 stderr <= bound`.
pub fn compare(gap: GapEstimate, bound: f64) -> Verdict {
    let a = gap.mean_gap.abs();
    Verdict {
        pass: a <= bound,
        ci_pass: a - 2.0 * gap.stderr <= bound,
        margin: bound - a,
        bound,
        gap,
    }
}

/// Lowercase hex SHA-256 of the canonical JSON form (object keys sorted, no whitespace).
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    // serde_json::Value keeps object keys in a BTreeMap, which sorts them
    let canonical = serde_json::to_string(&serde_json::to_value(config)?)?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment_id: String,
    pub config_hash: String,
    pub gap_mean: f64,
    pub gap_stderr: f64,
    pub bound: f64,
    pub pass: bool,
    pub ci_pass: bool,
    pub runtime_s: f64,
}

impl ResultRecord {
    pub fn new(experiment_id: impl Into<String>, config_hash: String, verdict: &Verdict, started: Instant) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            config_hash,
            gap_mean: verdict.gap.mean_gap,
            gap_stderr: verdict.gap.stderr,
            bound: verdict.bound,
            pass: verdict.pass,
            ci_pass: verdict.ci_pass,
            runtime_s: started.elapsed().as_secs_f64(),
        }
    }
}

pub fn write_records_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "experiment_id",
        "config_hash",
        "gap_mean",
        "gap_stderr",
        "bound",
        "pass",
        "ci_pass",
        "runtime_s",
    ])?;
    for r in records {
        w.write_record([
            r.experiment_id.clone(),
            r.config_hash.clone(),
            fmt_f64(r.gap_mean),
            fmt_f64(r.gap_stderr),
            fmt_f64(r.bound),
            r.pass.to_string(),
            r.ci_pass.to_string(),
            fmt_f64(r.runtime_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataDistribution, DataPoint, Schedule};

    fn points(xs: &[f64]) -> Dataset {
        Dataset::new(xs.iter().map(|x| DataPoint::unlabeled(vec![*x])).collect()).unwrap()
    }

    fn gaussian_task(loss: LossModel, mean: Vec<f64>, scale: f64, n: usize) -> TaskSpec {
        TaskSpec::new(
            DataDistribution::GaussianMean { mean, scale },
            loss,
            n,
            Some(1.0),
            1.0,
            1.0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn empirical_risk_examples() {
        let s = points(&[0.0, 2.0, 5.0]);
        assert!((empirical_risk(&[1.0], &s, &LossModel::Constant { value: 0.7 }) - 0.7).abs() < 1e-15);
        // w at the sample mean of {0, 2}: each point is 1 away
        let two = points(&[0.0, 2.0]);
        assert_eq!(empirical_risk(&[1.0], &two, &LossModel::Squared), 1.0);
        assert!((empirical_risk(&[1.0], &s, &LossModel::Squared) - (1.0 + 1.0 + 16.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn population_risk_closed_form_and_mc_agree() {
        let task = gaussian_task(LossModel::Squared, vec![0.5, -0.5], 0.8, 5);
        let (v, se) = population_risk(&[0.5, -0.5], &task, 0, 0);
        assert!((v - 2.0 * 0.64).abs() < 1e-14 && se == 0.0);
        let huber = gaussian_task(LossModel::Huber { delta: 0.5 }, vec![0.5, -0.5], 0.8, 5);
        let sq = gaussian_task(LossModel::TruncatedSquared { cap: 1.0 }, vec![0.5, -0.5], 0.8, 5);
        let mut rng = stream(3, Purpose::Oracle);
        for k in 0..20 {
            let w: Vec<f64> = (0..2).map(|_| rand::Rng::random_range(&mut rng, -1.5..1.5)).collect();
            let exact = sq.population_risk_closed_form(&w).unwrap();
            // bypass the closed form by estimating through a task without one
            let mut rng2 = stream(k, Purpose::Population);
            let mc: Vec<f64> = (0..20_000)
                .map(|_| sq.loss.value(&w, &sq.distribution.sample(&mut rng2)))
                .collect();
            let (m, s) = mean_and_stderr(&mc);
            assert!((m - exact).abs() <= 4.0 * s, "{m} ± {s} vs {exact}");
            let (hv, hs) = population_risk(&w, &huber, 2_000, k);
            assert!(hv.is_finite() && hs > 0.0);
        }
        let point = gaussian_task(LossModel::Huber { delta: 0.5 }, vec![0.3], 0.0, 5);
        let (v, se) = population_risk(&[1.3], &point, 100, 1);
        assert!((v - 0.75).abs() < 1e-12 && se == 0.0);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn gap_is_deterministic_and_zero_without_steps() {
        let task = gaussian_task(LossModel::TruncatedSquared { cap: 1.0 }, vec![0.2, 0.1], 0.5, 20);
        let algo = AlgorithmConfig::sgld(Schedule::constant_sqrt_eta(0.05, 0).unwrap());
        let a = estimate_gap(&task, &algo, &OutputFunction::Mean, 300, 9).unwrap();
        let b = estimate_gap(&task, &algo, &OutputFunction::Mean, 300, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_gap.abs() <= 4.0 * a.stderr);
        assert!(estimate_gap(&task, &algo, &OutputFunction::Mean, 1, 9).is_err());
    }

    #[test]
    fn exceedance_counts_large_single_draw_gaps() {
        let g = GapEstimate::from_samples(vec![0.01, -0.2, 0.05, 0.3]);
        assert_eq!(exceedance_frequency(&g, 0.1), Some(0.5));
        assert_eq!(exceedance_frequency(&g, 1.0), Some(0.0));
        assert_eq!(exceedance_frequency(&g.without_samples(), 0.1), None);
    }

    #[test]
    fn minimizers() {
        let s = points(&[0.0, 1.0, 5.0]);
        assert_eq!(empirical_minimizer(&s, &LossModel::Squared, &[0.0]).unwrap(), vec![2.0]);
        let h = LossModel::Huber { delta: 0.5 };
        let w = empirical_minimizer(&s, &h, &[0.0]).unwrap();
        assert!(empirical_gradient(&w, &s, &h)[0].abs() < 1e-10);
        assert!(empirical_risk(&w, &s, &h) <= empirical_risk(&[w[0] + 1e-4], &s, &h));
        assert!(empirical_risk(&w, &s, &h) <= empirical_risk(&[w[0] - 1e-4], &s, &h));
        let ls = Dataset::new(vec![
            DataPoint::labeled(vec![1.0, 0.0], 2.0),
            DataPoint::labeled(vec![0.0, 1.0], -1.0),
            DataPoint::labeled(vec![1.0, 1.0], 1.0),
        ])
        .unwrap();
        let w = empirical_minimizer(&ls, &LossModel::LeastSquares, &[0.0, 0.0]).unwrap();
        assert!((w[0] - 2.0).abs() < 1e-12 && (w[1] + 1.0).abs() < 1e-12);
        assert!(matches!(
            empirical_minimizer(&s, &LossModel::TruncatedSquared { cap: 1.0 }, &[0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn opt_error_from_the_optimum_is_small() {
        // point mass at w0: w*_S = w0, only the noise moves the average
        let task = TaskSpec::new(
            DataDistribution::GaussianMean {
                mean: vec![0.0],
                scale: 0.0,
            },
            LossModel::Huber { delta: 0.5 },
            10,
            Some(1.0),
            1.0,
            1.0,
            None,
        )
        .unwrap();
        let algo = AlgorithmConfig::sgld(Schedule::constant(0.1, 1e-3, 400).unwrap());
        let est = estimate_opt_error(&task, &algo, 50, 4).unwrap();
        let bound = crate::bounds::opt_error_bound(1.0, 0.1, 400, 1.0, 1, 1e-3).unwrap();
        assert!(est.mean_gap >= -2.0 * est.stderr);
        assert!(est.mean_gap <= bound);
        let nonconvex = gaussian_task(LossModel::TruncatedSquared { cap: 1.0 }, vec![0.0], 1.0, 5);
        assert!(matches!(
            estimate_opt_error(&nonconvex, &algo, 5, 0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sgld_direction_is_unbiased_for_the_empirical_gradient() {
        let task = TaskSpec::new(
            DataDistribution::GaussianMean {
                mean: vec![0.3, -0.2],
                scale: 1.0,
            },
            LossModel::Squared,
            7,
            Some(1.0),
            1e6,
            1.0,
            None,
        )
        .unwrap();
        let data = task
            .distribution
            .sample_dataset(7, &mut stream(1, Purpose::Data))
            .unwrap();
        let rule = crate::engine::make_sgld_rule(&task);
        let w = [0.4, 0.1];
        let target = empirical_gradient(&w, &data, &task.loss);
        let mut rng = stream(2, Purpose::Sampling);
        let draws: Vec<Vec<f64>> = (0..100_000)
            .map(|_| {
                let i =
                    crate::model::sample_index(&crate::model::Sampler::UniformIid, &data, &[], 1, &mut rng).unwrap();
                rule.direction(&w, data.get(i))
            })
            .collect();
        for k in 0..2 {
            let col: Vec<f64> = draws.iter().map(|v| v[k]).collect();
            let (m, s) = mean_and_stderr(&col);
            assert!(
                (m - target[k]).abs() <= 4.0 * s,
                "coord {k}: {m} ± {s} vs {}",
                target[k]
            );
        }
    }

    #[test]
    fn verdict_examples() {
        let g = |m: f64| GapEstimate {
            mean_gap: m,
            stderr: 0.01,
            replications: 100,
            per_rep: None,
        };
        let v = compare(g(0.05), 0.1);
        assert!(v.pass && v.ci_pass && (v.margin - 0.05).abs() < 1e-15);
        // 0.12 - 2(0.01) sits on the boundary and rounds below 0.1
        let v = compare(g(0.12), 0.1);
        assert!(!v.pass && v.ci_pass);
        let v = compare(g(0.13), 0.1);
        assert!(!v.pass && !v.ci_pass);
        let v = compare(g(0.11), 0.1);
        assert!(!v.pass && v.ci_pass);
        let v = compare(g(-0.05), 0.1);
        assert!(v.pass);
    }

    #[test]
    fn config_hash_ignores_key_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":{"y":2,"x":[1,2]}}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{ "a": {"x": [1, 2], "y": 2}, "b": 1 }"#).unwrap();
        assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        assert_eq!(config_hash(&a).unwrap().len(), 64);
        let c: serde_json::Value = serde_json::from_str(r#"{"b":2,"a":{"y":2,"x":[1,2]}}"#).unwrap();
        assert_ne!(config_hash(&a).unwrap(), config_hash(&c).unwrap());
    }

    #[test]
    fn records_csv_layout() {
        let v = compare(
            GapEstimate {
                mean_gap: 0.5,
                stderr: 0.25,
                replications: 10,
                per_rep: None,
            },
            1.0,
        );
        let r = ResultRecord {
            runtime_s: 2.0,
            ..ResultRecord::new("x", "ab".into(), &v, Instant::now())
        };
        let mut buf = Vec::new();
        write_records_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment_id,config_hash,gap_mean,gap_stderr,bound,pass,ci_pass,runtime_s"
        );
        assert_eq!(
            lines.next().unwrap(),
            "x,ab,5.0000000000000000e-1,2.5000000000000000e-1,1.0000000000000000e0,true,true,2.0000000000000000e0"
        );
    }
}
