//! Dumps one noisy Nesterov run as CSV (velocity block first).

use infobudget::engine::{run_trajectory, AlgorithmConfig, Variant};
use infobudget::model::{DataDistribution, LossModel, Sampler, Schedule, TaskSpec};
use infobudget::rng::{stream, Purpose};

fn main() -> infobudget::Result<()> {
    let task = TaskSpec::new(
        DataDistribution::LinearRegressionBoundedNoise {
            weights: vec![1.0, -0.5],
            noise_half_width: 0.1,
        },
        LossModel::LeastSquares,
        20,
        Some(1.0),
        1.0,
        1.0,
        None,
    )?;
    let data = task
        .distribution
        .sample_dataset(task.n, &mut stream(8, Purpose::Data))?;
    let algo = AlgorithmConfig::new(
        Variant::NoisyNesterov,
        Schedule::constant(0.1, 0.01, 25)?,
        Sampler::ShuffleWithoutReplacement,
    )
    .with_gamma(0.5);
    let traj = run_trajectory(&task, &algo, &data, 8)?;
    traj.write_csv(std::io::stdout().lock())
}
