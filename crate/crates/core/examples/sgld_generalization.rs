//! SGLD on a two-dimensional Gaussian-mean task: measured generalization
//! gap against the expectation bound, for a few noise levels.

use infobudget::bounds::gen_bound_expectation;
use infobudget::engine::AlgorithmConfig;
use infobudget::harness::{compare, estimate_gap};
use infobudget::model::{DataDistribution, LossModel, OutputFunction, Schedule, TaskSpec};

fn main() -> infobudget::Result<()> {
    let task = TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.0, 0.0],
            scale: 0.5,
        },
        LossModel::TruncatedSquared { cap: 1.0 },
        50,
        None, // R from the loss range
        1.0,
        1.0,
        None,
    )?;
    println!("R = {}", task.r);
    println!("{:>8} {:>10} {:>10} {:>10}  ci_pass", "sigma", "gap", "stderr", "bound");
    for sigma in [0.05, 0.1, 0.2236, 0.5] {
        let schedule = Schedule::constant(0.05, sigma, 200)?;
        let bound = gen_bound_expectation(task.r, task.n, &schedule, task.l)?;
        let gap = estimate_gap(&task, &AlgorithmConfig::sgld(schedule), &OutputFunction::Mean, 500, 1)?;
        let v = compare(gap, bound);
        println!(
            "{sigma:>8.4} {:>10.5} {:>10.5} {bound:>10.5}  {}",
            v.gap.mean_gap, v.gap.stderr, v.ci_pass
        );
    }
    Ok(())
}
