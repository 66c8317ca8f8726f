//! Averaged SGLD on a convex task: optimization error against its bound,
//! and the step size / noise level that balance the excess-risk bound.

use infobudget::bounds::{excess_risk_bound, opt_error_bound, opt_error_optimal_eta};
use infobudget::engine::AlgorithmConfig;
use infobudget::harness::estimate_opt_error;
use infobudget::model::{DataDistribution, LossModel, Schedule, TaskSpec};

fn main() -> infobudget::Result<()> {
    // Huber with delta = L/2 has gradients of norm at most L
    let task = TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.5],
            scale: 0.1,
        },
        LossModel::Huber { delta: 0.5 },
        50,
        Some(1.0),
        1.0,
        1.0,
        Some(vec![0.0]),
    )?;
    let steps = 100;
    for (eta, sigma) in [(0.1, 0.1), (0.05, 0.05), (0.2, 0.02)] {
        let bound = opt_error_bound(task.g, eta, steps, task.l, task.d, sigma)?;
        let est = estimate_opt_error(
            &task,
            &AlgorithmConfig::sgld(Schedule::constant(eta, sigma, steps)?),
            200,
            6,
        )?;
        println!(
            "η = {eta:<5} σ = {sigma:<5} eps_opt {:.5} ± {:.5}  bound {bound:.4}",
            est.mean_gap, est.stderr
        );
    }
    let best = opt_error_optimal_eta(task.g, steps, task.l, task.d, 0.1);
    println!("best η at σ = 0.1: {best:.4}");

    let er = excess_risk_bound(task.g, task.l, steps, task.d, task.n, task.r)?;
    println!(
        "excess risk <= {:.4} at η* = {:.4}, σ* = {:.4}",
        er.bound, er.eta_star, er.sigma_star
    );
    Ok(())
}
