//! Noisy momentum and noisy Nesterov: the budget is twice that of SGLD and
//! the two variants share it.

use infobudget::bounds::{mi_budget, variant_gen_bound, variant_mi};
use infobudget::engine::{AlgorithmConfig, Variant};
use infobudget::harness::{compare, estimate_gap};
use infobudget::model::{DataDistribution, LossModel, OutputFunction, Sampler, Schedule, TaskSpec};

fn main() -> infobudget::Result<()> {
    let task = TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.0, 0.0, 0.0],
            scale: 0.5,
        },
        LossModel::TruncatedSquared { cap: 1.0 },
        100,
        None,
        1.0,
        1.0,
        None,
    )?;
    let schedule = Schedule::constant(0.02, 0.1, 150)?;
    let sgld = mi_budget(&schedule, task.d, task.l)?.total().log;
    for variant in [Variant::Sgld, Variant::NoisyMomentum, Variant::NoisyNesterov] {
        let mi = variant_mi(variant, &schedule, task.d, task.l)?.log;
        let bound = variant_gen_bound(variant, task.r, task.n, &schedule, task.d, task.l)?;
        let algo = AlgorithmConfig::new(variant, schedule.clone(), Sampler::UniformIid).with_gamma(0.9);
        let v = compare(estimate_gap(&task, &algo, &OutputFunction::Mean, 300, 5)?, bound);
        println!(
            "{:<15} MI {mi:>8.4} ({:.1}x SGLD)  bound {bound:.4}  gap {:.5} ± {:.5}",
            variant.name(),
            mi / sgld,
            v.gap.mean_gap,
            v.gap.stderr
        );
    }
    Ok(())
}
