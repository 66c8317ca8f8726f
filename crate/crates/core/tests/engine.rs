use infobudget::engine::{
    make_momentum_rule, make_sgld_rule, run_trajectory, run_trajectory_with, step, AlgorithmConfig, Variant,
};
use infobudget::model::vector::norm;
use infobudget::model::{DataDistribution, DataPoint, Dataset, LossModel, Sampler, Schedule, TaskSpec};
use infobudget::rng::{stream, Purpose};
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

fn gaussian_task(d: usize, n: usize, l: f64, loss: LossModel) -> TaskSpec {
    TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.3; d],
            scale: 1.0,
        },
        loss,
        n,
        Some(1.0),
        l,
        1.0,
        Some(vec![1.0; d]),
    )
    .unwrap()
}

fn dataset(task: &TaskSpec, seed: u64) -> Dataset {
    task.distribution
        .sample_dataset(task.n, &mut stream(seed, Purpose::Data))
        .unwrap()
}

#[test]
fn no_steps_returns_the_start() {
    let task = gaussian_task(3, 5, 1.0, LossModel::Squared);
    let algo = AlgorithmConfig::sgld(Schedule::constant_sqrt_eta(0.1, 0).unwrap());
    let traj = run_trajectory(&task, &algo, &dataset(&task, 1), 4).unwrap();
    assert_eq!(traj.iterates, vec![vec![1.0; 3]]);
    assert!(traj.sample_indices.is_empty());
}

#[test]
fn trajectories_are_pure_functions_of_their_inputs() {
    let task = gaussian_task(2, 8, 1.0, LossModel::TruncatedSquared { cap: 1.0 });
    let data = dataset(&task, 2);
    for variant in [
        Variant::Sgld,
        Variant::PerturbedSgd,
        Variant::NoisyMomentum,
        Variant::NoisyNesterov,
    ] {
        let schedule = Schedule::constant(0.05, 0.2, 50).unwrap();
        let algo = AlgorithmConfig::new(variant, schedule, Sampler::ShuffleWithoutReplacement);
        let a = run_trajectory(&task, &algo, &data, 11).unwrap();
        let b = run_trajectory(&task, &algo, &data, 11).unwrap();
        let c = run_trajectory(&task, &algo, &data, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.iterates, c.iterates);
        assert_eq!(a.iterates.len(), 51);
        let dim = if variant.is_momentum() { 4 } else { 2 };
        assert!(a.iterates.iter().all(|s| s.len() == dim));
    }
}

#[test]
fn mean_over_seeds_tracks_gradient_descent() {
    // n = 1, quadratic loss, clipping inactive: E[W_t] follows the noiseless recursion
    let task = gaussian_task(2, 1, 1e6, LossModel::Squared);
    let data = Dataset::new(vec![DataPoint::unlabeled(vec![0.2, -0.4])]).unwrap();
    let (eta, sigma) = (0.1, 0.05);
    let algo = AlgorithmConfig::sgld(Schedule::constant(eta, sigma, 5).unwrap());
    let seeds = 10_000;
    let mut sums = vec![vec![0.0; 2]; 6];
    for s in 0..seeds {
        let traj = run_trajectory(&task, &algo, &data, s).unwrap();
        for (acc, w) in sums.iter_mut().zip(&traj.iterates) {
            acc.iter_mut().zip(w).for_each(|(a, x)| *a += x);
        }
    }
    let mut gd = [1.0, 1.0];
    for (t, sum) in sums.iter().enumerate().skip(1) {
        for (g, z) in gd.iter_mut().zip([0.2, -0.4]) {
            *g -= eta * 2.0 * (*g - z);
        }
        // Var W_t = σ² Σ_{k<t} (1 - 2η)^{2k}
        let var: f64 = (0..t).map(|k| (1.0 - 2.0 * eta).powi(2 * k as i32)).sum::<f64>() * sigma * sigma;
        let tol = 4.0 * (var / seeds as f64).sqrt();
        for k in 0..2 {
            let mean = sum[k] / seeds as f64;
            assert!((mean - gd[k]).abs() <= tol, "step {t} coord {k}: {mean} vs {}", gd[k]);
        }
    }
}

#[test]
fn practice_schedule_audit() {
    // replay the noise stream by hand and rebuild every iterate
    let task = gaussian_task(2, 6, 0.8, LossModel::Squared);
    let data = dataset(&task, 3);
    let c = 0.4;
    let schedule = Schedule::sgld_practice(c, 30).unwrap();
    let traj = run_trajectory(&task, &AlgorithmConfig::sgld(schedule), &data, 21).unwrap();
    let rule = make_sgld_rule(&task);
    let mut noise = stream(21, Purpose::Noise);
    let mut w = task.w0.clone();
    for t in 1..=30 {
        let eta = c / t as f64;
        let z = data.get(traj.sample_indices[t - 1]);
        let f = rule.direction(&w, z);
        assert!(norm(&f) <= 0.8 * (1.0 + 1e-12));
        w = w
            .iter()
            .zip(&f)
            .map(|(wi, fi)| {
                let e: f64 = StandardNormal.sample(&mut noise);
                wi - eta * fi + eta.sqrt() * e
            })
            .collect();
        for (a, b) in w.iter().zip(&traj.iterates[t]) {
            assert!((a - b).abs() <= 1e-12, "step {t}: {a} vs {b}");
        }
    }
}

#[test]
fn sampler_never_sees_the_iterates() {
    let task = gaussian_task(2, 7, 1.0, LossModel::Squared);
    let data = dataset(&task, 4);
    let samplers = [
        Sampler::UniformIid,
        Sampler::ShuffleWithoutReplacement,
        Sampler::importance(vec![0.1, 0.2, 0.05, 0.15, 0.2, 0.2, 0.1]).unwrap(),
    ];
    for sampler in samplers {
        for variant in [Variant::Sgld, Variant::NoisyMomentum, Variant::NoisyNesterov] {
            let algo = AlgorithmConfig::new(variant, Schedule::constant(0.1, 0.3, 60).unwrap(), sampler.clone());
            let clean = run_trajectory(&task, &algo, &data, 5).unwrap();
            let messed = run_trajectory_with(&task, &algo, &data, 5, |t, s| {
                if t % 7 == 3 {
                    s.iter_mut().for_each(|x| *x = 1e3 * (t as f64).sin());
                }
            })
            .unwrap();
            assert_eq!(clean.sample_indices, messed.sample_indices);
            assert_ne!(clean.iterates, messed.iterates);
        }
    }
}

#[test]
fn momentum_with_zero_gamma_matches_sgld_in_law() {
    // one step from V_0 = 0: W_1 ~ N(w0 - η c, σ²); KS test at 10^5 draws
    let task = gaussian_task(1, 1, 1.0, LossModel::Squared);
    let rule = make_momentum_rule(&task, 0.0).unwrap();
    let z = DataPoint::unlabeled(vec![0.3]);
    let (eta, sigma) = (0.2, 0.5);
    // gradient 2(1 - 0.3) = 1.4 clipped to 1
    let law = Normal::new(1.0 - eta * 1.0, sigma).unwrap();
    let mut rng = stream(6, Purpose::Noise);
    let m = 100_000;
    let mut draws: Vec<f64> = (0..m)
        .map(|_| step(&[0.0, 1.0], &rule, eta, sigma, &z, &mut rng).unwrap()[1])
        .collect();
    draws.sort_by(f64::total_cmp);
    let ks = draws
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = law.cdf(*x);
            (f - i as f64 / m as f64)
                .abs()
                .max(((i + 1) as f64 / m as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    // 0.1% critical value of the Kolmogorov distribution
    assert!(ks < 1.95 / (m as f64).sqrt(), "KS statistic {ks}");
}

#[test]
fn every_variant_respects_its_cap_along_long_runs() {
    let task = gaussian_task(3, 10, 0.7, LossModel::Huber { delta: 2.0 });
    let data = dataset(&task, 7);
    for variant in [
        Variant::Sgld,
        Variant::PerturbedSgd,
        Variant::NoisyMomentum,
        Variant::NoisyNesterov,
    ] {
        let algo = AlgorithmConfig::new(variant, Schedule::constant(0.3, 0.1, 500).unwrap(), Sampler::UniformIid);
        let rule = algo.rule(&task).unwrap();
        let traj = run_trajectory(&task, &algo, &data, 8).unwrap();
        for t in 0..traj.steps() {
            let z = data.get(traj.sample_indices[t]);
            assert!(norm(&rule.direction(&traj.iterates[t], z)) <= rule.direction_norm_cap() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn trajectory_csv_has_one_row_per_iterate() {
    let task = gaussian_task(2, 4, 1.0, LossModel::Squared);
    let algo = AlgorithmConfig::new(
        Variant::NoisyMomentum,
        Schedule::constant(0.1, 0.1, 3).unwrap(),
        Sampler::UniformIid,
    );
    let traj = run_trajectory(&task, &algo, &dataset(&task, 9), 10).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,s0,s1,s2,s3,sample_index");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].ends_with(','));
    let parsed: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(parsed, traj.iterates[1][2]);
}
