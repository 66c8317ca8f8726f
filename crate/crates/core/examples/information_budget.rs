//! Per-step and cumulative information budget of a decaying SGLD schedule,
//! in all three tiers.

use infobudget::bounds::{mi_budget, per_step_mi};
use infobudget::model::Schedule;

fn main() -> infobudget::Result<()> {
    let (d, l) = (10, 2.0);
    let schedule = Schedule::sgld_practice(0.5, 20)?;
    let ledger = mi_budget(&schedule, d, l)?;
    println!("{:>3} {:>9} {:>9} {:>9} {:>10}", "t", "log", "mid", "linear", "cum log");
    for (t, (step, cum)) in ledger.per_step.iter().zip(&ledger.cumulative).enumerate() {
        println!(
            "{:>3} {:>9.5} {:>9.5} {:>9.5} {:>10.5}",
            t + 1,
            step.log,
            step.mid,
            step.linear,
            cum.log
        );
    }
    let total = ledger.total();
    println!(
        "total: {:.4} nats = {:.4} bits",
        total.log,
        total.log / std::f64::consts::LN_2
    );

    // with σ = 0 the bound is infinite and the call reports it
    match per_step_mi(d, 0.1, l, 0.0) {
        Err(e) => println!("σ = 0: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
