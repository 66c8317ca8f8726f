//! Ground-truth mutual information for one noisy step.
//!
//! Given `W_{t-1} = w0`, the next iterate is the Gaussian mixture
//! `Σ_i p_i N(w0 - drift_i, σ² I)`, so
//! `I(W_t; Z_t | W_{t-1} = w0) = h(mixture) - h(N(0, σ² I))`.
//! In one dimension the mixture entropy is integrated numerically; in
//! higher dimension it is estimated by Monte Carlo with the exact density.

use std::f64::consts::{E, PI};
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bounds::per_step_mi;
use crate::error::{Error, Result};
use crate::model::fmt_f64;
use crate::model::vector::{norm, squared_distance};
use crate::rng::{stream, Purpose};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Integration reaches this many standard deviations past the extreme means.
const TAIL_SIGMAS: f64 = 12.0;
const DENSITY_FLOOR: f64 = 1e-300;
const MAX_DEPTH: u32 = 50;

/// `(d/2) ln(2 π e σ²)`.
pub fn gaussian_entropy(d: usize, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("Gaussian entropy needs σ > 0, got {sigma}")));
    }
    Ok(d as f64 / 2.0 * (2.0 * PI * E * sigma * sigma).ln())
}

/// Shannon entropy of a discrete distribution, in nats.
pub fn discrete_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|p| **p > 0.0).map(|p| -p * p.ln()).sum()
}

fn check_weights(weights: &[f64], components: usize) -> Result<()> {
    if weights.len() != components || weights.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {components} mixture components",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("mixture weights sum to {total}, not 1")));
    }
    Ok(())
}

/// `ln p(x)` for an isotropic Gaussian mixture, by log-sum-exp.
fn mixture_log_density(x: &[f64], means: &[Vec<f64>], log_weights: &[f64], sigma: f64) -> f64 {
    let d = x.len() as f64;
    let inv2s2 = 0.5 / (sigma * sigma);
    let mut best = f64::NEG_INFINITY;
    let terms: Vec<f64> = means
        .iter()
        .zip(log_weights)
        .map(|(m, lw)| {
            let v = lw - squared_distance(x, m) * inv2s2;
            best = best.max(v);
            v
        })
        .collect();
    if best == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|v| (v - best).exp()).sum();
    best + sum.ln() - 0.5 * d * (2.0 * PI * sigma * sigma).ln()
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

/// Adaptive Simpson quadrature with the Richardson correction
/// `(S₂ - S₁)/15`, started from `panels` equal sub-intervals.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, tol: f64) -> Result<f64> {
    let width = (b - a) / panels as f64;
    let mut stack: Vec<Panel> = (0..panels)
        .map(|i| {
            let pa = a + i as f64 * width;
            let pb = if i + 1 == panels { b } else { pa + width };
            let (fa, fm, fb) = (f(pa), f(0.5 * (pa + pb)), f(pb));
            Panel {
                a: pa,
                b: pb,
                fa,
                fm,
                fb,
                whole: (pb - pa) / 6.0 * (fa + 4.0 * fm + fb),
                tol: tol / panels as f64,
                depth: 0,
            }
        })
        .collect();
    let mut total = 0.0;
    let mut compensation = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let diff = left + right - p.whole;
        if diff.abs() <= 15.0 * p.tol {
            // Kahan summation keeps thousands of tiny panels from drifting
            let y = left + right + diff / 15.0 - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
        } else if p.depth >= MAX_DEPTH {
            return Err(Error::Numerical {
                message: "mixture entropy quadrature did not converge".into(),
                diagnostics: format!(
                    "panel [{}, {}], error estimate {:e}, target {:e}",
                    p.a,
                    p.b,
                    diff.abs() / 15.0,
                    p.tol
                ),
            });
        } else {
            let tol = 0.5 * p.tol;
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol,
                depth: p.depth + 1,
            });
        }
    }
    Ok(total)
}

/// Differential entropy of `Σ_i w_i N(μ_i, σ²)` on the line, by adaptive
/// quadrature of `-p ln p` to absolute tolerance `tol`.
pub fn mixture_entropy_1d(means: &[f64], weights: &[f64], sigma: f64, tol: f64) -> Result<f64> {
    check_weights(weights, means.len())?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("mixture entropy needs σ > 0, got {sigma}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let pts: Vec<Vec<f64>> = means.iter().map(|m| vec![*m]).collect();
    let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let lo = means.iter().cloned().fold(f64::INFINITY, f64::min) - TAIL_SIGMAS * sigma;
    let hi = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + TAIL_SIGMAS * sigma;
    let integrand = |x: f64| {
        let lp = mixture_log_density(&[x], &pts, &log_w, sigma);
        let p = lp.exp();
        if p < DENSITY_FLOOR {
            0.0
        } else {
            -p * lp
        }
    };
    // panels no wider than σ/2 so that no component can hide between nodes
    let panels = (((hi - lo) / (0.5 * sigma)).ceil() as usize).max(1);
    adaptive_simpson(integrand, lo, hi, panels, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiMethod {
    Quadrature1d,
    ExactDensityMc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    pub value: f64,
    /// Zero for quadrature.
    pub stderr: f64,
    pub method: MiMethod,
}

/// The law of one step from a fixed previous iterate: drifts `η F(w0, z_i)`
/// selected with probabilities `probs`, plus `N(0, σ² I)` noise.
#[derive(Clone, Debug, PartialEq)]
pub struct OneStepSetup {
    pub w0: Vec<f64>,
    pub drifts: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
    pub sigma: f64,
    pub eta: f64,
    pub cap: f64,
}

impl OneStepSetup {
    pub fn new(w0: Vec<f64>, drifts: Vec<Vec<f64>>, probs: Vec<f64>, sigma: f64, eta: f64, cap: f64) -> Result<Self> {
        check_weights(&probs, drifts.len())?;
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("one-step setup needs σ > 0, got {sigma}")));
        }
        if drifts.iter().any(|d| d.len() != w0.len()) {
            return Err(Error::InvalidArgument(
                "drift vectors must match the dimension of w0".into(),
            ));
        }
        let limit = eta * cap * (1.0 + 1e-12);
        if let Some(i) = drifts.iter().position(|d| norm(d) > limit) {
            return Err(Error::InvalidArgument(format!(
                "drift {i} exceeds the cap η L = {}",
                eta * cap
            )));
        }
        Ok(Self {
            w0,
            drifts,
            probs,
            sigma,
            eta,
            cap,
        })
    }

    pub fn dim(&self) -> usize {
        self.w0.len()
    }

    /// Means of the next-iterate mixture, `w0 - drift_i`.
    pub fn means(&self) -> Vec<Vec<f64>> {
        self.drifts
            .iter()
            .map(|d| self.w0.iter().zip(d).map(|(w, x)| w - x).collect())
            .collect()
    }

    /// The closed-form per-step bound for this setup.
    pub fn bound(&self) -> Result<f64> {
        Ok(per_step_mi(self.dim(), self.eta, self.cap, self.sigma)?.log)
    }
}

/// `I(W_t; Z_t | W_{t-1} = w0)` by one-dimensional quadrature.
pub fn one_step_mi(setup: &OneStepSetup, tol: f64) -> Result<MiEstimate> {
    if setup.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "quadrature oracle is one-dimensional; use the Monte-Carlo oracle for d = {}",
            setup.dim()
        )));
    }
    let means: Vec<f64> = setup.means().iter().map(|m| m[0]).collect();
    let h_mix = mixture_entropy_1d(&means, &setup.probs, setup.sigma, tol)?;
    let value = h_mix - gaussian_entropy(1, setup.sigma)?;
    Ok(MiEstimate {
        value,
        stderr: 0.0,
        method: MiMethod::Quadrature1d,
    })
}

/// Cross-entropy estimate `mean(-ln p(X))`, `X ~ p`, of an isotropic
/// Gaussian mixture's entropy. Unbiased because `p` is known exactly.
pub fn exact_density_mc_entropy(
    means: &[Vec<f64>],
    weights: &[f64],
    sigma: f64,
    samples: usize,
    seed: u64,
) -> Result<MiEstimate> {
    check_weights(weights, means.len())?;
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10^4 samples, got {samples}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("mixture entropy needs σ > 0, got {sigma}")));
    }
    let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    let mut rng = stream(seed, Purpose::Oracle);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut x = vec![0.0; means[0].len()];
    for _ in 0..samples {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cumulative.partition_point(|c| *c <= u).min(means.len() - 1);
        for (xi, mi) in x.iter_mut().zip(&means[k]) {
            let e: f64 = StandardNormal.sample(&mut rng);
            *xi = mi + sigma * e;
        }
        let v = -mixture_log_density(&x, means, &log_w, sigma);
        sum += v;
        sum_sq += v * v;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(MiEstimate {
        value: mean,
        stderr: (var / m).sqrt(),
        method: MiMethod::ExactDensityMc,
    })
}

/// One-step mutual information in any dimension via [`exact_density_mc_entropy`].
pub fn one_step_mi_mc(setup: &OneStepSetup, samples: usize, seed: u64) -> Result<MiEstimate> {
    let h = exact_density_mc_entropy(&setup.means(), &setup.probs, setup.sigma, samples, seed)?;
    Ok(MiEstimate {
        value: h.value - gaussian_entropy(setup.dim(), setup.sigma)?,
        ..h
    })
}

/// Random one-dimensional setup: `n ∈ 2..=5` points, `σ ∈ [0.05, 5]`,
/// drifts anywhere in `[-ηL, ηL]`, random sampling probabilities.
pub fn random_setup<R: Rng + ?Sized>(rng: &mut R) -> OneStepSetup {
    let n = rng.random_range(2..=5);
    let eta = rng.random_range(0.01..2.0);
    let cap = rng.random_range(0.1..3.0);
    let sigma = rng.random_range(0.05..=5.0);
    let drifts = (0..n).map(|_| vec![eta * rng.random_range(-cap..=cap)]).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let probs = raw.iter().map(|p| p / total).collect();
    let w0 = vec![rng.random_range(-1.0..1.0)];
    OneStepSetup::new(w0, drifts, probs, sigma, eta, cap).expect("random setup respects its own cap")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub setup_id: usize,
    pub eta: f64,
    pub sigma: f64,
    #[serde(rename = "L")]
    pub cap: f64,
    pub n: usize,
    pub mi_oracle: f64,
    pub mi_bound: f64,
    pub slack: f64,
}

pub fn oracle_row(setup_id: usize, setup: &OneStepSetup, tol: f64) -> Result<OracleRow> {
    let mi = one_step_mi(setup, tol)?.value;
    let bound = setup.bound()?;
    Ok(OracleRow {
        setup_id,
        eta: setup.eta,
        sigma: setup.sigma,
        cap: setup.cap,
        n: setup.drifts.len(),
        mi_oracle: mi,
        mi_bound: bound,
        slack: bound - mi,
    })
}

/// The canonical setup: drifts `±1` (η = L = σ = 1), uniform sampling.
pub fn symmetric_setup() -> OneStepSetup {
    OneStepSetup::new(vec![0.0], vec![vec![1.0], vec![-1.0]], vec![0.5, 0.5], 1.0, 1.0, 1.0).expect("valid")
}

/// Oracle against bound for the canonical setup followed by `count` random setups.
pub fn oracle_sweep(count: usize, seed: u64, tol: f64) -> Result<Vec<OracleRow>> {
    use rayon::prelude::*;
    let mut rng = stream(seed, Purpose::Oracle);
    let mut setups = vec![symmetric_setup()];
    setups.extend((0..count).map(|_| random_setup(&mut rng)));
    setups
        .par_iter()
        .enumerate()
        .map(|(i, s)| oracle_row(i, s, tol))
        .collect()
}

pub fn write_oracle_csv<W: Write>(rows: &[OracleRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["setup_id", "eta", "sigma", "L", "n", "mi_oracle", "mi_bound", "slack"])?;
    for r in rows {
        w.write_record([
            r.setup_id.to_string(),
            fmt_f64(r.eta),
            fmt_f64(r.sigma),
            fmt_f64(r.cap),
            r.n.to_string(),
            fmt_f64(r.mi_oracle),
            fmt_f64(r.mi_bound),
            fmt_f64(r.slack),
        ])?;
    }
    w.flush()?;
    Ok(())
}
