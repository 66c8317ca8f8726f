//! Sample size for a high-probability guarantee, and the number of epochs
//! the decaying SGLD schedule can afford before that guarantee lapses.

use infobudget::bounds::{
    epoch_cap_mi_target, high_prob_min_n, mi_budget, sgld_epoch_cap_log, sgld_practice_mi_after_epochs,
    EPOCH_CAP_SATURATION_LN,
};
use infobudget::model::Schedule;

fn main() -> infobudget::Result<()> {
    let (r, alpha, beta) = (0.5, 0.1, 0.1);
    let schedule = Schedule::sgld_practice(0.01, 5_000)?;
    let mi = mi_budget(&schedule, 5, 1.0)?.total().log;
    println!(
        "budget after 5000 steps: {mi:.4} nats; need n >= {}",
        high_prob_min_n(r, alpha, beta, mi)?
    );

    for n in [100, 1_000, 10_000, 100_000] {
        let ln_k = sgld_epoch_cap_log(n, beta, 0.01, 1.0)?;
        let chained = sgld_practice_mi_after_epochs(0.01, 1.0, n, ln_k);
        let note = if ln_k > EPOCH_CAP_SATURATION_LN {
            " (K overflows f64)"
        } else {
            ""
        };
        println!(
            "n = {n:>6}: ln K_max = {ln_k:>12.4}{note}; MI at K_max {chained:.4} vs target {:.4}",
            epoch_cap_mi_target(n, beta)
        );
    }
    Ok(())
}
