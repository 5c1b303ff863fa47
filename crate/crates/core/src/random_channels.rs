//! Random Pauli channels at fixed infidelity and the statistics of their
//! smallest generator rate.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::{channel_rates, PauliChannel, DEFAULT_LOG_TOL, DEFAULT_RATE_TOL, IMAG_TOL};
use crate::pauli::{dimension, PauliOp};
use crate::rng::{self, Domain};

/// Ensemble for the non-identity error probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Uniform on `{p_k >= 0, sum_{k>=1} p_k = r}` via normalized exponentials.
    Simplex,
    /// `p_k = r x_k / ((D-1)/2)` with `x_k ~ U(0,1)` i.i.d.; the sum only concentrates at `r`.
    IndependentUniform,
}

impl Sampler {
    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Simplex => "simplex",
            Sampler::IndependentUniform => "independent-uniform",
        }
    }
}

impl std::str::FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" => Ok(Sampler::Simplex),
            "independent-uniform" | "uniform" => Ok(Sampler::IndependentUniform),
            other => Err(Error::Parameter(format!("unknown sampler {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RandomChannelConfig {
    pub n: usize,
    /// Infidelity, in `(0, 1)`.
    pub r: f64,
    pub trials: usize,
    pub seed: u64,
    pub sampler: Sampler,
}

impl RandomChannelConfig {
    pub fn new(n: usize, r: f64, trials: usize, seed: u64, sampler: Sampler) -> Self {
        Self { n, r, trials, seed, sampler }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::Parameter(format!("infidelity r = {} outside (0, 1)", self.r)));
        }
        if self.n == 0 || self.n > 10 {
            return Err(Error::Parameter(format!("n = {} outside 1..=10", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be positive".into()));
        }
        Ok(())
    }
}

/// Draw trial `trial_index` of a configuration; identical inputs give identical channels.
pub fn sample_channel(cfg: &RandomChannelConfig, trial_index: u64) -> Result<PauliChannel> {
    cfg.validate()?;
    let d = dimension(cfg.n);
    let mut rng = rng::stream(cfg.seed, Domain::RandomChannel, trial_index);
    let mut probs = vec![0.0; d];
    match cfg.sampler {
        Sampler::Simplex => {
            let mut total = 0.0;
            for p in probs[1..].iter_mut() {
                let e: f64 = rng.sample(Exp1);
                *p = e;
                total += e;
            }
            for p in probs[1..].iter_mut() {
                *p *= cfg.r / total;
            }
        }
        Sampler::IndependentUniform => {
            let scale = cfg.r / ((d - 1) as f64 * 0.5);
            for p in probs[1..].iter_mut() {
                *p = scale * rng.random::<f64>();
            }
        }
    }
    probs[0] = 1.0 - probs[1..].iter().sum::<f64>();
    PauliChannel::new(cfg.n, probs)
}

/// Smallest non-identity rate of a channel, or a signal that the draw has
/// complex rates (some fidelity is not positive).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinRate {
    Real { rate: f64, pauli: PauliOp },
    Complex,
}

pub fn min_rate(ch: &PauliChannel) -> MinRate {
    let n = ch.num_qubits();
    let f = ch.fidelities();
    if f.values().iter().any(|v| v.re <= 0.0 || v.im.abs() > IMAG_TOL) {
        return MinRate::Complex;
    }
    let dense = match channel_rates(ch, DEFAULT_LOG_TOL) {
        Ok(d) => d,
        Err(_) => return MinRate::Complex,
    };
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in dense.iter().enumerate().skip(1) {
        let rate = if v.norm() < DEFAULT_RATE_TOL { 0.0 } else { v.re };
        if best.is_none_or(|(b, _)| rate < b) {
            best = Some((rate, i));
        }
    }
    let all_zero = dense.iter().skip(1).all(|v| v.norm() < DEFAULT_RATE_TOL);
    match best {
        Some((rate, i)) if !all_zero => {
            MinRate::Real { rate, pauli: PauliOp::from_index(i, n).expect("in range") }
        }
        _ => MinRate::Real { rate: 0.0, pauli: PauliOp::identity(n) },
    }
}

/// `Pr(lambda_min < 0) ~ 1 - exp(-D r / (4 (1 + r)))`.
pub fn analytic_prob_negative(n: usize, r: f64) -> f64 {
    let d = dimension(n) as f64;
    -(-d * r / (4.0 * (1.0 + r))).exp_m1()
}

/// Expected minimum rate `r/(2D^2-1) (4 - (D-4) r - 4 e^{-D} (r+1))`.
pub fn analytic_mean_min_rate(n: usize, r: f64) -> f64 {
    let d = dimension(n) as f64;
    r / (2.0 * d * d - 1.0) * (-((d - 4.0) * r) - 4.0 * (-d).exp() * (r + 1.0) + 4.0)
}

/// One line of a scan.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub r: f64,
    pub trials: usize,
    pub sampler: Sampler,
    pub p_neg_mc: f64,
    pub p_neg_stderr: f64,
    pub p_neg_analytic: f64,
    pub mean_min_mc: f64,
    pub mean_min_stderr: f64,
    pub mean_min_analytic: f64,
    /// Sample standard deviation of the minimum rate.
    pub min_rate_std: f64,
    pub complex_fraction: f64,
    pub seed: u64,
    /// No draw had real rates; Monte Carlo columns are NaN.
    pub flagged: bool,
}

impl ScanRow {
    pub const CSV_HEADER: [&'static str; 12] = [
        "n",
        "r",
        "trials",
        "sampler",
        "p_neg_mc",
        "p_neg_stderr",
        "p_neg_analytic",
        "mean_min_mc",
        "mean_min_stderr",
        "mean_min_analytic",
        "complex_fraction",
        "seed",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        use crate::io::fmt_float as f;
        vec![
            self.n.to_string(),
            f(self.r),
            self.trials.to_string(),
            self.sampler.name().to_string(),
            f(self.p_neg_mc),
            f(self.p_neg_stderr),
            f(self.p_neg_analytic),
            f(self.mean_min_mc),
            f(self.mean_min_stderr),
            f(self.mean_min_analytic),
            f(self.complex_fraction),
            self.seed.to_string(),
        ]
    }
}

/// Monte Carlo estimate for one configuration. Trials run in parallel; the
/// reduction walks them in trial order.
pub fn scan_one(cfg: &RandomChannelConfig) -> Result<ScanRow> {
    cfg.validate()?;
    let outcomes: Vec<MinRate> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| sample_channel(cfg, t).map(|ch| min_rate(&ch)))
        .collect::<Result<_>>()?;

    let reals: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| match o {
            MinRate::Real { rate, .. } => Some(*rate),
            MinRate::Complex => None,
        })
        .collect();
    let complex_fraction = (cfg.trials - reals.len()) as f64 / cfg.trials as f64;
    let usable = reals.len() as f64;
    let (p_neg, p_se, mean, mean_se, std) = if reals.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let p = reals.iter().filter(|&&v| v < 0.0).count() as f64 / usable;
        let mean = reals.iter().sum::<f64>() / usable;
        let var = if reals.len() > 1 {
            reals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (usable - 1.0)
        } else {
            0.0
        };
        (p, (p * (1.0 - p) / usable).sqrt(), mean, (var / usable).sqrt(), var.sqrt())
    };
    Ok(ScanRow {
        n: cfg.n,
        r: cfg.r,
        trials: cfg.trials,
        sampler: cfg.sampler,
        p_neg_mc: p_neg,
        p_neg_stderr: p_se,
        p_neg_analytic: analytic_prob_negative(cfg.n, cfg.r),
        mean_min_mc: mean,
        mean_min_stderr: mean_se,
        mean_min_analytic: analytic_mean_min_rate(cfg.n, cfg.r),
        min_rate_std: std,
        complex_fraction,
        seed: cfg.seed,
        flagged: reals.is_empty(),
    })
}

/// Rows in the order of `cfgs`.
pub fn scan(cfgs: &[RandomChannelConfig]) -> Result<Vec<ScanRow>> {
    cfgs.iter().map(scan_one).collect()
}
