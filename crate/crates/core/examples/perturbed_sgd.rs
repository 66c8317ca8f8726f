//! Perturbed SGD with unit-ball noise: information budget, bound, and the
//! per-step displacement limit.

use infobudget::bounds::{gen_bound_from_mi, perturbed_sgd_mi_bound};
use infobudget::engine::{run_trajectory, AlgorithmConfig, Variant};
use infobudget::harness::{compare, estimate_gap};
use infobudget::model::vector::squared_distance;
use infobudget::model::{DataDistribution, LossModel, OutputFunction, Sampler, Schedule, TaskSpec};
use infobudget::rng::{stream, Purpose};

fn main() -> infobudget::Result<()> {
    let task = TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.2, -0.1],
            scale: 0.5,
        },
        LossModel::TruncatedSquared { cap: 1.0 },
        400,
        None,
        0.5,
        1.0,
        None,
    )?;
    let eta = 0.05;
    let schedule = Schedule::constant(eta, 0.0, 10)?; // σ is unused by this variant
    let mi = perturbed_sgd_mi_bound(schedule.len(), task.d, task.l);
    let bound = gen_bound_from_mi(task.r, task.n, mi);
    println!("I(S;W) <= {mi:.4} nats, gap bound {bound:.4}");

    let algo = AlgorithmConfig::new(Variant::PerturbedSgd, schedule, Sampler::UniformIid);
    let data = task
        .distribution
        .sample_dataset(task.n, &mut stream(3, Purpose::Data))?;
    let traj = run_trajectory(&task, &algo, &data, 3)?;
    let largest = (1..=traj.steps())
        .map(|t| squared_distance(traj.params(t), traj.params(t - 1)).sqrt())
        .fold(0.0, f64::max);
    println!("largest step {largest:.4}, limit η(L+1) = {:.4}", eta * (task.l + 1.0));

    let v = compare(estimate_gap(&task, &algo, &OutputFunction::LastIterate, 300, 4)?, bound);
    println!("gap {:.5} ± {:.5}, ci_pass {}", v.gap.mean_gap, v.gap.stderr, v.ci_pass);
    Ok(())
}
