//! Closed-form information budgets and the generalization, optimization and
//! excess-risk bounds derived from them. All information quantities are in
//! nats.

use serde::{Deserialize, Serialize};

use crate::engine::Variant;
use crate::error::{Error, Result};
use crate::model::{NoiseKind, Schedule, StepKind};

/// The three per-step tiers `(d/2) ln(1+x) <= (d/2) x/sqrt(1+x) <= (d/2) x`,
/// `x = η² L² / (d σ²)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MiTiers {
    pub log: f64,
    pub mid: f64,
    pub linear: f64,
}

impl std::ops::Add for MiTiers {
    type Output = MiTiers;
    fn add(self, o: MiTiers) -> MiTiers {
        MiTiers {
            log: self.log + o.log,
            mid: self.mid + o.mid,
            linear: self.linear + o.linear,
        }
    }
}

/// Bound on the information a single noisy step can carry about its sample.
pub fn per_step_mi(d: usize, eta: f64, l: f64, sigma: f64) -> Result<MiTiers> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(eta >= 0.0) || !(l >= 0.0) || !eta.is_finite() || !l.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite η >= 0 and L >= 0, got η={eta}, L={l}"
        )));
    }
    if sigma == 0.0 {
        return Err(Error::DivergentBound(
            "noise level σ = 0 makes the information bound infinite".into(),
        ));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise level must be positive, got {sigma}"
        )));
    }
    let half_d = d as f64 / 2.0;
    let x = (eta * l / sigma).powi(2) / d as f64;
    let log = half_d * x.ln_1p();
    let linear = half_d * x;
    // the exact values are ordered; rounding can swap log and mid when x is tiny
    let mid = (half_d * (x / (1.0 + x).sqrt())).max(log);
    Ok(MiTiers { log, mid, linear })
}

/// Per-step terms and running totals of the information budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiLedger {
    pub per_step: Vec<MiTiers>,
    pub cumulative: Vec<MiTiers>,
}

impl MiLedger {
    pub fn steps(&self) -> usize {
        self.per_step.len()
    }

    pub fn total(&self) -> MiTiers {
        self.cumulative.last().copied().unwrap_or_default()
    }
}

/// Sum of the per-step bounds over the schedule.
pub fn mi_budget(schedule: &Schedule, d: usize, l: f64) -> Result<MiLedger> {
    let per_step = schedule
        .steps()
        .map(|(eta, sigma)| per_step_mi(d, eta, l, sigma))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = MiTiers::default();
    let cumulative = per_step
        .iter()
        .map(|t| {
            acc = acc + *t;
            acc
        })
        .collect();
    Ok(MiLedger { per_step, cumulative })
}

/// `sqrt(2 R² I / n)`.
pub fn gen_bound_from_mi(r: f64, n: usize, mi: f64) -> f64 {
    (2.0 * r * r * mi / n as f64).sqrt()
}

fn snr_sum(schedule: &Schedule, l: f64) -> Result<f64> {
    let mut total = 0.0;
    for (eta, sigma) in schedule.steps() {
        if sigma == 0.0 {
            return Err(Error::DivergentBound(
                "noise level σ = 0 makes the bound infinite".into(),
            ));
        }
        total += (eta * l / sigma).powi(2);
    }
    Ok(total)
}

/// Expected generalization gap bound `sqrt((R²/n) Σ η_t² L² / σ_t²)`.
pub fn gen_bound_expectation(r: f64, n: usize, schedule: &Schedule, l: f64) -> Result<f64> {
    Ok((r * r / n as f64 * snr_sum(schedule, l)?).sqrt())
}

/// Closed-form upper estimate `(R L / sqrt(n)) sqrt(c ln T + c)` for the
/// `η_t = c/t`, `σ_t = sqrt(η_t)` schedule.
pub fn sgld_practice_gen_upper(r: f64, l: f64, n: usize, c: f64, steps: usize) -> f64 {
    r * l / (n as f64).sqrt() * (c * (steps as f64).ln() + c).sqrt()
}

fn hp_threshold(r: f64, alpha: f64, beta: f64, epsilon: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > 0.0 && beta <= 1.0) || !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need α > 0, 0 < β <= 1 and ε >= 0; got α={alpha}, β={beta}, ε={epsilon}"
        )));
    }
    Ok(8.0 * r * r / (alpha * alpha) * (epsilon / beta + (2.0 / beta).ln()))
}

/// Smallest `n` with `n > (8R²/α²)(ε/β + ln(2/β))`.
pub fn high_prob_min_n(r: f64, alpha: f64, beta: f64, epsilon: f64) -> Result<u64> {
    let x = hp_threshold(r, alpha, beta, epsilon)?;
    if !x.is_finite() || x >= u64::MAX as f64 {
        return Err(Error::Domain(format!("required sample size {x} is not representable")));
    }
    Ok(x.floor() as u64 + 1)
}

/// Whether `n` satisfies the strict sample-size condition of the high-probability bound.
pub fn high_prob_condition_holds(n: u64, r: f64, alpha: f64, beta: f64, epsilon: f64) -> Result<bool> {
    Ok(n as f64 > hp_threshold(r, alpha, beta, epsilon)?)
}

/// Sample size `64 R⁴ / α⁴ (ln(2/β))²` under which the SGLD epoch cap applies.
pub fn sgld_epoch_cap_min_n(r: f64, alpha: f64, beta: f64) -> f64 {
    64.0 * r.powi(4) / alpha.powi(4) * (2.0 / beta).ln().powi(2)
}

/// Values of `ln K_max` above this overflow when exponentiated.
pub const EPOCH_CAP_SATURATION_LN: f64 = 700.0;

/// `ln K_max` for SGLD run with `η_t = c/t`, `σ_t = sqrt(η_t)`, where
/// `K_max = (1/(n e)) (2/β)^{2(sqrt(n) - 1) β / (c L²)}`, evaluated in log space.
pub fn sgld_epoch_cap_log(n: usize, beta: f64, c: f64, l: f64) -> Result<f64> {
    let root = (n as f64).sqrt();
    if root <= 1.0 {
        return Err(Error::Domain(format!("epoch cap needs sqrt(n) > 1, got n = {n}")));
    }
    if !(beta > 0.0 && beta <= 1.0) || !(c > 0.0) || !(l > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < β <= 1, c > 0, L > 0; got β={beta}, c={c}, L={l}"
        )));
    }
    let exponent = 2.0 * (root - 1.0) * beta / (c * l * l);
    Ok(exponent * (2.0 / beta).ln() - (n as f64).ln() - 1.0)
}

/// `(c L² / 2) ln(e n K)` with `ln K` supplied: the SGLD practice budget after `K` epochs.
pub fn sgld_practice_mi_after_epochs(c: f64, l: f64, n: usize, ln_k: f64) -> f64 {
    0.5 * c * l * l * (1.0 + (n as f64).ln() + ln_k)
}

/// `(sqrt(n) - 1) β ln(2/β)`, the information level the epoch cap is tuned to.
pub fn epoch_cap_mi_target(n: usize, beta: f64) -> f64 {
    ((n as f64).sqrt() - 1.0) * beta * (2.0 / beta).ln()
}

/// Optimization error of the averaged SGLD iterate on a convex, `L`-Lipschitz loss:
/// `G²/(2ηT) + (η/2) L² + d σ²/(2η)`.
pub fn opt_error_bound(g: f64, eta: f64, steps: usize, l: f64, d: usize, sigma: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("stepsize must be positive, got {eta}")));
    }
    if steps == 0 {
        return Err(Error::Domain("optimization bound needs T >= 1".into()));
    }
    Ok(g * g / (2.0 * eta * steps as f64) + 0.5 * eta * l * l + d as f64 * sigma * sigma / (2.0 * eta))
}

/// Stepsize minimizing [`opt_error_bound`]: `sqrt((G²/T + d σ²) / L²)`.
pub fn opt_error_optimal_eta(g: f64, steps: usize, l: f64, d: usize, sigma: f64) -> f64 {
    ((g * g / steps as f64 + d as f64 * sigma * sigma) / (l * l)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcessRisk {
    pub bound: f64,
    pub eta_star: f64,
    pub sigma_star: f64,
    /// Optimization bound plus generalization term evaluated at `(η*, σ*)`.
    pub assembled: f64,
}

impl ExcessRisk {
    pub fn slack(&self) -> f64 {
        self.assembled - self.bound
    }
}

/// Excess-risk bound for convex SGLD at the prescribed operating point
/// `σ* = G / sqrt(d T)`, `η* = sqrt(G² / (T L (L/2 + R sqrt(d) T / (sqrt(n) G))))`.
pub fn excess_risk_bound(g: f64, l: f64, steps: usize, d: usize, n: usize, r: f64) -> Result<ExcessRisk> {
    if !(g > 0.0 && l > 0.0 && r > 0.0) || steps == 0 || d == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "excess-risk bound needs positive G, L, T, d, n, R".into(),
        ));
    }
    let (t, df, nf) = (steps as f64, d as f64, n as f64);
    let sigma_star = g / (df * t).sqrt();
    let eta_star = (g * g / (t * l * (l / 2.0 + r * df.sqrt() * t / (nf.sqrt() * g)))).sqrt();
    let bound = 2.0 * g * l * (1.0 / (2.0 * t) + df.sqrt() / nf.sqrt() * r / (g * l)).sqrt();
    let assembled = excess_risk_assembled(g, l, steps, d, n, r, eta_star, sigma_star)?;
    Ok(ExcessRisk {
        bound,
        eta_star,
        sigma_star,
        assembled,
    })
}

/// Unsimplified sum `G²/(2ηT) + ηL²/2 + dσ²/(2η) + (R sqrt(T)/sqrt(n)) (η L / σ)`.
#[allow(clippy::too_many_arguments)]
pub fn excess_risk_assembled(
    g: f64,
    l: f64,
    steps: usize,
    d: usize,
    n: usize,
    r: f64,
    eta: f64,
    sigma: f64,
) -> Result<f64> {
    let opt = opt_error_bound(g, eta, steps, l, d, sigma)?;
    Ok(opt + r * (steps as f64).sqrt() / (n as f64).sqrt() * eta * l / sigma)
}

/// `T d ln(1 + L)` for perturbed SGD with unit-ball noise.
pub fn perturbed_sgd_mi_bound(steps: usize, d: usize, l: f64) -> f64 {
    steps as f64 * d as f64 * l.ln_1p()
}

/// `Σ_t d ln(1 + η_t² L² / (d σ_t²))`: the stacked-state budget with
/// dimension `2d` and cap `sqrt(2) L`. Nesterov shares it.
pub fn momentum_mi_bound(schedule: &Schedule, d: usize, l: f64) -> Result<f64> {
    let mut total = 0.0;
    for (eta, sigma) in schedule.steps() {
        total += 2.0 * per_step_mi(d, eta, l, sigma)?.log;
    }
    Ok(total)
}

/// `sqrt((2R²/n) Σ η_t² L² / σ_t²)`, the momentum-variant expectation bound.
pub fn momentum_gen_bound(r: f64, n: usize, schedule: &Schedule, l: f64) -> Result<f64> {
    Ok((2.0 * r * r / n as f64 * snr_sum(schedule, l)?).sqrt())
}

/// Log-tier and linear-tier information budget of a variant.
pub fn variant_mi(variant: Variant, schedule: &Schedule, d: usize, l: f64) -> Result<MiTiers> {
    match variant {
        Variant::Sgld => Ok(mi_budget(schedule, d, l)?.total()),
        Variant::NoisyMomentum | Variant::NoisyNesterov => {
            let log = momentum_mi_bound(schedule, d, l)?;
            let lin = mi_budget(schedule, d, l)?.total();
            Ok(MiTiers {
                log,
                mid: 2.0 * lin.mid,
                linear: 2.0 * lin.linear,
            })
        }
        Variant::PerturbedSgd => {
            let v = perturbed_sgd_mi_bound(schedule.len(), d, l);
            Ok(MiTiers {
                log: v,
                mid: v,
                linear: v,
            })
        }
    }
}

/// Expected generalization gap bound matching the variant.
pub fn variant_gen_bound(variant: Variant, r: f64, n: usize, schedule: &Schedule, d: usize, l: f64) -> Result<f64> {
    match variant {
        Variant::Sgld => gen_bound_expectation(r, n, schedule, l),
        Variant::NoisyMomentum | Variant::NoisyNesterov => momentum_gen_bound(r, n, schedule, l),
        Variant::PerturbedSgd => Ok(gen_bound_from_mi(r, n, perturbed_sgd_mi_bound(schedule.len(), d, l))),
    }
}

/// Excess risk bound `|gen| + ε_opt`.
pub fn excess_risk_decomposition(gen_bound: f64, opt_bound: f64) -> Result<f64> {
    if !(gen_bound >= 0.0 && opt_bound >= 0.0) {
        return Err(Error::InvalidArgument("bounds must be nonnegative".into()));
    }
    Ok(gen_bound + opt_bound)
}

/// Every bound applicable to one configuration. Fields that do not apply
/// to the configuration are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub variant: Variant,
    pub mi_nats_log_tier: f64,
    pub mi_nats_linear_tier: f64,
    pub gen_expectation: f64,
    pub hp_alpha: f64,
    pub hp_beta: f64,
    pub hp_n_min: u64,
    pub epoch_cap_ln: Option<f64>,
    pub epoch_cap_saturated: Option<bool>,
    pub opt_error: Option<f64>,
    pub excess_risk: Option<f64>,
    pub eta_star: Option<f64>,
    pub sigma_star: Option<f64>,
}

/// Inputs to [`bound_report`].
#[derive(Clone, Debug)]
pub struct BoundInputs<'a> {
    pub variant: Variant,
    pub schedule: &'a Schedule,
    pub d: usize,
    pub n: usize,
    pub r: f64,
    pub l: f64,
    pub g: f64,
    pub convex: bool,
    pub hp_alpha: f64,
    pub hp_beta: f64,
}

pub fn bound_report(inp: &BoundInputs<'_>) -> Result<BoundReport> {
    let mi = variant_mi(inp.variant, inp.schedule, inp.d, inp.l)?;
    let gen = variant_gen_bound(inp.variant, inp.r, inp.n, inp.schedule, inp.d, inp.l)?;
    let hp_n_min = high_prob_min_n(inp.r, inp.hp_alpha, inp.hp_beta, mi.log)?;

    let sgld = inp.variant == Variant::Sgld;
    let practice = sgld
        && inp.schedule.step_kind() == StepKind::COverT
        && inp.schedule.noise_kind() == NoiseKind::SqrtEta
        && inp.n >= 4;
    let epoch_cap_ln = if practice {
        Some(sgld_epoch_cap_log(
            inp.n,
            inp.hp_beta,
            inp.schedule.c().unwrap_or(0.0),
            inp.l,
        )?)
    } else {
        None
    };

    let opt_error = match (inp.schedule.constant_eta(), inp.schedule.constant_sigma()) {
        (Some(eta), Some(sigma)) if sgld && inp.convex && eta > 0.0 => {
            Some(opt_error_bound(inp.g, eta, inp.schedule.len(), inp.l, inp.d, sigma)?)
        }
        _ => None,
    };
    let excess = if sgld && inp.convex && !inp.schedule.is_empty() {
        Some(excess_risk_bound(
            inp.g,
            inp.l,
            inp.schedule.len(),
            inp.d,
            inp.n,
            inp.r,
        )?)
    } else {
        None
    };

    Ok(BoundReport {
        variant: inp.variant,
        mi_nats_log_tier: mi.log,
        mi_nats_linear_tier: mi.linear,
        gen_expectation: gen,
        hp_alpha: inp.hp_alpha,
        hp_beta: inp.hp_beta,
        hp_n_min,
        epoch_cap_ln,
        epoch_cap_saturated: epoch_cap_ln.map(|v| v > EPOCH_CAP_SATURATION_LN),
        opt_error,
        excess_risk: excess.map(|e| e.bound),
        eta_star: excess.map(|e| e.eta_star),
        sigma_star: excess.map(|e| e.sigma_star),
    })
}
