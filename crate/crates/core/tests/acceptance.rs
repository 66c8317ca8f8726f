//! End-to-end acceptance checks A1-A9. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use infobudget::bounds::{
    epoch_cap_mi_target, gen_bound_expectation, mi_budget, momentum_mi_bound, opt_error_bound, per_step_mi,
    perturbed_sgd_mi_bound, sgld_epoch_cap_log, sgld_practice_mi_after_epochs, variant_mi,
};
use infobudget::engine::{make_perturbed_sgd_rule, step, AlgorithmConfig, Variant};
use infobudget::harness::{compare, estimate_gap, estimate_opt_error};
use infobudget::mi_oracle::{oracle_sweep, symmetric_setup};
use infobudget::model::vector::{norm, squared_distance};
use infobudget::model::{DataDistribution, DataPoint, LossModel, OutputFunction, Schedule, TaskSpec};
use infobudget::rng::{stream, Purpose};
use rand::Rng;

const REPS: usize = 500;

struct Outcome {
    pass: bool,
    detail: String,
}

fn a1_task() -> TaskSpec {
    // truncated squared loss with cap 1 has range [0, 1], so R = 1/2
    TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.0, 0.0],
            scale: 0.5,
        },
        LossModel::TruncatedSquared { cap: 1.0 },
        50,
        None,
        1.0,
        1.0,
        None,
    )
    .unwrap()
}

fn a1_schedule() -> Schedule {
    Schedule::constant_sqrt_eta(0.05, 200).unwrap()
}

fn a1() -> Outcome {
    let task = a1_task();
    let schedule = a1_schedule();
    // independent recomputation: sqrt((R²/n) Σ η²L²/σ²) with σ² = η
    let expected = (0.25 / 50.0 * 200.0 * 0.05f64.powi(2) / 0.05).sqrt();
    let bound = gen_bound_expectation(task.r, task.n, &schedule, task.l).unwrap();
    let gap = estimate_gap(
        &task,
        &AlgorithmConfig::sgld(schedule),
        &OutputFunction::Mean,
        REPS,
        101,
    )
    .unwrap();
    let v = compare(gap, bound);
    Outcome {
        pass: v.ci_pass && (bound - expected).abs() <= 1e-12 * expected && task.r == 0.5,
        detail: format!("gap {:.5} ± {:.5}, bound {:.5}", v.gap.mean_gap, v.gap.stderr, bound),
    }
}

fn a2() -> Outcome {
    let rows = oracle_sweep(200, 202, 1e-9).unwrap();
    let violations = rows.iter().filter(|r| r.mi_oracle > r.mi_bound + 1e-6).count();
    let canonical = symmetric_setup().bound().unwrap();
    let half_ln2 = 0.5 * 2f64.ln();
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    Outcome {
        pass: rows.len() == 201
            && violations == 0
            && (canonical - 0.346574).abs() < 1e-6
            && (canonical - half_ln2).abs() < 1e-15,
        detail: format!(
            "{} setups, {violations} violations, min slack {min_slack:.3e}, canonical bound {canonical:.6}",
            rows.len()
        ),
    }
}

fn a3() -> Outcome {
    let mut rng = stream(303, Purpose::Oracle);
    let mut bad_order = 0;
    let mut worst_rel: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=50);
        let eta = 10f64.powf(rng.random_range(-4.0..1.0));
        let l = 10f64.powf(rng.random_range(-2.0..2.0));
        let sigma = 10f64.powf(rng.random_range(-3.0..1.0));
        let t = per_step_mi(d, eta, l, sigma).unwrap();
        if !(t.log <= t.mid && t.mid <= t.linear) {
            bad_order += 1;
        }
        let steps = rng.random_range(1..=50);
        let schedule = Schedule::constant(eta, sigma, steps).unwrap();
        let r = rng.random_range(0.1..5.0);
        let n = rng.random_range(1..=10_000);
        let gen = gen_bound_expectation(r, n, &schedule, l).unwrap();
        // linear tier summed by hand: Σ (d/2) η²L²/(dσ²)
        let linear = steps as f64 * 0.5 * (eta * l / sigma).powi(2);
        let rhs = 2.0 * r * r / n as f64 * linear;
        worst_rel = worst_rel.max((gen * gen - rhs).abs() / rhs);
    }
    Outcome {
        pass: bad_order == 0 && worst_rel <= 1e-12,
        detail: format!("{bad_order} ordering violations, worst identity error {worst_rel:.2e}"),
    }
}

fn a4() -> Outcome {
    let mut rng = stream(404, Purpose::Oracle);
    let mut worst: f64 = 0.0;
    let mut nesterov_mismatch = 0;
    for _ in 0..100 {
        let steps = rng.random_range(1..=100);
        let eta: Vec<f64> = (0..steps).map(|_| rng.random_range(0.0..1.0)).collect();
        let sigma: Vec<f64> = (0..steps).map(|_| rng.random_range(0.01..2.0)).collect();
        let d = rng.random_range(1..=20);
        let l = rng.random_range(0.1..5.0);
        let schedule = Schedule::from_steps(eta.clone(), sigma.clone()).unwrap();
        let sgld: f64 = eta
            .iter()
            .zip(&sigma)
            .map(|(e, s)| d as f64 / 2.0 * (1.0 + (e * l / s).powi(2) / d as f64).ln())
            .sum();
        let mom = momentum_mi_bound(&schedule, d, l).unwrap();
        if sgld > 0.0 {
            worst = worst.max((mom - 2.0 * sgld).abs() / (2.0 * sgld));
        }
        let a = variant_mi(Variant::NoisyMomentum, &schedule, d, l).unwrap();
        let b = variant_mi(Variant::NoisyNesterov, &schedule, d, l).unwrap();
        if a != b {
            nesterov_mismatch += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-12 && nesterov_mismatch == 0,
        detail: format!("worst doubling error {worst:.2e}, {nesterov_mismatch} Nesterov mismatches"),
    }
}

fn a5() -> Outcome {
    // Huber with delta = L/2: its gradient is the squared-loss gradient clipped to L
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
    )
    .unwrap();
    let schedule = Schedule::constant(0.1, 0.1, 100).unwrap();
    let bound = opt_error_bound(1.0, 0.1, 100, 1.0, 1, 0.1).unwrap();
    let est = estimate_opt_error(&task, &AlgorithmConfig::sgld(schedule), 200, 505).unwrap();
    Outcome {
        pass: (bound - 0.15).abs() < 1e-12
            && est.mean_gap <= 0.15 + 2.0 * est.stderr
            && est.mean_gap >= -2.0 * est.stderr,
        detail: format!("eps_opt {:.5} ± {:.5}, bound {bound:.5}", est.mean_gap, est.stderr),
    }
}

fn a6() -> Outcome {
    let (n, beta, c, l) = (10_000usize, 0.1, 0.01, 1.0);
    let ln_k = sgld_epoch_cap_log(n, beta, c, l).unwrap();
    // independent: ln K = 2(√n - 1)β ln(2/β)/(cL²) - ln n - 1
    let direct = 2.0 * (100.0 - 1.0) * beta * (2.0f64 / beta).ln() / (c * l * l) - (n as f64).ln() - 1.0;
    let chained = sgld_practice_mi_after_epochs(c, l, n, ln_k);
    let target = epoch_cap_mi_target(n, beta);
    let rel = (chained - target).abs() / target;
    Outcome {
        pass: ln_k.is_finite()
            && (ln_k - 5921.34).abs() <= 0.01
            && (ln_k - direct).abs() <= 1e-9 * direct
            && rel <= 1e-9,
        detail: format!("ln K_max {ln_k:.4}, chained MI error {rel:.2e}"),
    }
}

fn a7() -> Outcome {
    let mut rng = stream(707, Purpose::Oracle);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let steps = rng.random_range(1..=10_000);
        let d = rng.random_range(1..=100);
        let l: f64 = rng.random_range(0.01..10.0);
        let mut direct = 0.0;
        for _ in 0..steps {
            direct += d as f64 * (1.0 + l).ln();
        }
        let v = perturbed_sgd_mi_bound(steps, d, l);
        worst = worst.max((v - direct).abs() / direct);
        let schedule = Schedule::constant(0.3, 0.0, steps).unwrap();
        let from_variant = variant_mi(Variant::PerturbedSgd, &schedule, d, l).unwrap().log;
        worst = worst.max((from_variant - direct).abs() / direct);
    }

    let d = 3;
    let (eta, l) = (0.2, 1.5);
    let task = TaskSpec::new(
        DataDistribution::GaussianMean {
            mean: vec![0.0; d],
            scale: 2.0,
        },
        LossModel::Squared,
        20,
        Some(1.0),
        l,
        1.0,
        None,
    )
    .unwrap();
    let schedule = Schedule::constant(eta, 0.0, 1).unwrap();
    let rule = make_perturbed_sgd_rule(&task, &schedule).unwrap();
    let mut data_rng = stream(708, Purpose::Data);
    let mut noise = stream(708, Purpose::Noise);
    let mut w = vec![0.0; d];
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..10_000 {
        let z: DataPoint = task.distribution.sample(&mut data_rng);
        let next = step(&w, &rule, eta, 0.0, &z, &mut noise).unwrap();
        let moved = squared_distance(&next, &w).sqrt();
        max_ratio = max_ratio.max(moved / (eta * (l + 1.0)));
        if moved > eta * (l + 1.0) * (1.0 + 1e-12) {
            violations += 1;
        }
        w = next;
    }
    Outcome {
        pass: worst <= 1e-12 && violations == 0 && norm(&w).is_finite(),
        detail: format!("formula error {worst:.2e}, {violations} displacement violations, max ratio {max_ratio:.4}"),
    }
}

fn a8() -> Outcome {
    let task = a1_task();
    let schedule = a1_schedule();
    let bound = gen_bound_expectation(task.r, task.n, &schedule, task.l).unwrap();
    // the budget depends on the schedule alone, never on the output function
    let shared = mi_budget(&schedule, task.d, task.l).unwrap().total();
    let algo = AlgorithmConfig::sgld(schedule);
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, f) in [
        ("last", OutputFunction::LastIterate),
        ("mean", OutputFunction::Mean),
        ("suffix0.5", OutputFunction::suffix(0.5)),
    ] {
        let v = compare(estimate_gap(&task, &algo, &f, REPS, 808).unwrap(), bound);
        pass &= v.ci_pass;
        parts.push(format!("{name} {:.5}±{:.5}", v.gap.mean_gap, v.gap.stderr));
    }
    Outcome {
        pass: pass && shared.linear > 0.0,
        detail: format!("{}, bound {bound:.5}", parts.join(", ")),
    }
}

fn a9() -> Outcome {
    let task = a1_task();
    let none = AlgorithmConfig::sgld(Schedule::constant_sqrt_eta(0.05, 0).unwrap());
    let g0 = estimate_gap(&task, &none, &OutputFunction::Mean, REPS, 909).unwrap();
    let loud = AlgorithmConfig::sgld(Schedule::constant(0.05, 1e3 * 0.05 * task.l, 200).unwrap());
    let g1 = estimate_gap(&task, &loud, &OutputFunction::Mean, REPS, 910).unwrap();
    let ok = |g: &infobudget::harness::GapEstimate| g.mean_gap.abs() <= 4.0 * g.stderr;
    Outcome {
        pass: ok(&g0) && ok(&g1),
        detail: format!(
            "T=0 {:.5}±{:.5}, loud noise {:.2e}±{:.2e}",
            g0.mean_gap, g0.stderr, g1.mean_gap, g1.stderr
        ),
    }
}

fn main() -> ExitCode {
    type Check = (&'static str, &'static str, fn() -> Outcome);
    let checks: [Check; 9] = [
        ("A1", "SGLD gap within expectation bound", a1),
        ("A2", "one-step oracle below per-step bound", a2),
        ("A3", "information tier ordering", a3),
        ("A4", "momentum budget doubles SGLD", a4),
        ("A5", "SGLD optimization error", a5),
        ("A6", "epoch cap arithmetic", a6),
        ("A7", "perturbed SGD budget and displacement", a7),
        ("A8", "output-function independence", a8),
        ("A9", "degenerate independence", a9),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{id} {} {name}: {} ({:.2}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
