//! Exact one-step mutual information next to the per-step bound.

use infobudget::mi_oracle::{one_step_mi, one_step_mi_mc, random_setup, symmetric_setup, OneStepSetup};
use infobudget::rng::{stream, Purpose};

fn main() -> infobudget::Result<()> {
    let s = symmetric_setup();
    let mi = one_step_mi(&s, 1e-10)?;
    println!(
        "drifts ±1, σ = 1: I = {:.6} nats, bound {:.6}, ln 2 = {:.6}",
        mi.value,
        s.bound()?,
        2f64.ln()
    );

    let mut rng = stream(42, Purpose::Oracle);
    println!(
        "{:>3} {:>7} {:>7} {:>7} {:>10} {:>10}",
        "n", "eta", "sigma", "L", "oracle", "bound"
    );
    for _ in 0..8 {
        let s = random_setup(&mut rng);
        let mi = one_step_mi(&s, 1e-9)?;
        println!(
            "{:>3} {:>7.3} {:>7.3} {:>7.3} {:>10.6} {:>10.6}",
            s.drifts.len(),
            s.eta,
            s.sigma,
            s.cap,
            mi.value,
            s.bound()?
        );
    }

    // two dimensions: Monte Carlo with the exact mixture density
    let s = OneStepSetup::new(
        vec![0.0, 0.0],
        vec![vec![0.5, 0.0], vec![-0.5, 0.0], vec![0.0, 0.5]],
        vec![0.5, 0.25, 0.25],
        0.4,
        1.0,
        0.5,
    )?;
    let mc = one_step_mi_mc(&s, 200_000, 7)?;
    println!("d = 2: I ≈ {:.5} ± {:.5}, bound {:.5}", mc.value, mc.stderr, s.bound()?);
    Ok(())
}
