//! Synthetic cycle benchmarking and local noise-model fitting.
//!
//! Observed per-layer fidelities of local Paulis are linked to local rates by
//! `M lambda = -log(f) / 2` with `M_{P,Q} = 1` when `P` and `Q` anticommute.
//! Three fits are provided: non-negative least squares, unconstrained
//! minimum-norm least squares, and a projection of the unconstrained model
//! onto the CPTP Pauli channels (`n <= 4`).

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{channel_to_generator, PauliChannel, PseudoLindblad, IMAG_TOL};
use crate::io::{GeneratorFile, FORMAT};
use crate::lsq::{min_norm_lstsq, nnls, project_simplex};
use crate::pauli::{dimension, PauliOp};
use crate::rng::{stream, Domain};
use crate::wht::fwht_real_in_place;

/// Largest register for synthetic benchmarking (every basis stores `2^n - 1` marginals).
pub const MAX_LEARNING_QUBITS: usize = 12;
/// Largest register for the CP projection, which works on all `4^n` Paulis.
pub const MAX_CP_QUBITS: usize = 4;
pub const DEFAULT_DEPTHS: [u32; 4] = [0, 2, 4, 8];
pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_SPAM_RANGE: (f64, f64) = (0.92, 0.99);

// ---------------------------------------------------------------------------
// Model basis

/// Weight-one Paulis plus weight-two Paulis on connected pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalBasis {
    pub n: usize,
    pub connectivity: Vec<(usize, usize)>,
    pub paulis: Vec<PauliOp>,
}

const LETTERS: [char; 3] = ['X', 'Y', 'Z'];

impl LocalBasis {
    pub fn new(n: usize, connectivity: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > crate::pauli::MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mut edges = BTreeSet::new();
        for &(a, b) in connectivity {
            if a >= n || b >= n || a == b {
                return Err(Error::Parameter(format!("bad edge ({a}, {b}) on {n} qubits")));
            }
            edges.insert((a.min(b), a.max(b)));
        }
        let mut set = BTreeSet::new();
        for q in 0..n {
            for l in LETTERS {
                set.insert(PauliOp::single(n, q, l)?);
            }
        }
        for &(a, b) in &edges {
            for la in LETTERS {
                for lb in LETTERS {
                    set.insert(PauliOp::single(n, a, la)?.product(&PauliOp::single(n, b, lb)?));
                }
            }
        }
        let mut paulis: Vec<PauliOp> = set.into_iter().collect();
        paulis.sort_by_key(|p| (p.support(), p.to_string()));
        Ok(Self { n, connectivity: edges.into_iter().collect(), paulis })
    }

    /// Open chain `0 - 1 - ... - (n-1)`.
    pub fn chain(n: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (1..n).map(|q| (q - 1, q)).collect();
        Self::new(n, &edges)
    }

    pub fn contains(&self, p: &PauliOp) -> bool {
        self.paulis.contains(p)
    }
}

// ---------------------------------------------------------------------------
// Design matrix

#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    pub rows: Vec<PauliOp>,
    pub cols: Vec<PauliOp>,
    pub matrix: DMatrix<f64>,
}

pub fn design_matrix(rows: &[PauliOp], cols: &[PauliOp]) -> DesignMatrix {
    let matrix = DMatrix::from_fn(rows.len(), cols.len(), |i, j| if rows[i].commutes_with(&cols[j]) { 0.0 } else { 1.0 });
    DesignMatrix { rows: rows.to_vec(), cols: cols.to_vec(), matrix }
}

// ---------------------------------------------------------------------------
// Measurement plan

fn greedy_coloring(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut color = vec![usize::MAX; n];
    for q in 0..n {
        let used: BTreeSet<usize> = edges
            .iter()
            .filter_map(|&(a, b)| if a == q { Some(b) } else if b == q { Some(a) } else { None })
            .map(|r| color[r])
            .collect();
        color[q] = (0..).find(|c| !used.contains(c)).expect("unbounded");
    }
    color
}

/// Full-weight measurement settings covering every basis Pauli.
///
/// With a proper 3-coloring `c` of the coupling graph, the nine settings
/// `b_q = (i + j c_q) mod 3` cover all letter pairs on every edge. Graphs
/// that the greedy coloring does not fit into three colors get a greedy
/// set cover instead.
pub fn measurement_plan(basis: &LocalBasis) -> Vec<PauliOp> {
    let n = basis.n;
    let color = greedy_coloring(n, &basis.connectivity);
    let build = |letters: &[usize]| -> PauliOp {
        letters
            .iter()
            .enumerate()
            .fold(PauliOp::identity(n), |acc, (q, &l)| acc.product(&PauliOp::single(n, q, LETTERS[l]).expect("in range")))
    };
    let mut out = Vec::new();
    if color.iter().all(|c| *c < 3) {
        for j in 0..3 {
            for i in 0..3 {
                let letters: Vec<usize> = color.iter().map(|c| (i + j * c) % 3).collect();
                let p = build(&letters);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        return out;
    }
    let mut partial: Vec<Vec<Option<usize>>> = Vec::new();
    for p in &basis.paulis {
        let need: Vec<(usize, usize)> =
            p.support().into_iter().map(|q| (q, LETTERS.iter().position(|l| *l == p.letter(q)).expect("letter"))).collect();
        let slot = partial.iter_mut().find(|s| need.iter().all(|&(q, l)| s[q].is_none_or(|x| x == l)));
        match slot {
            Some(s) => need.iter().for_each(|&(q, l)| s[q] = Some(l)),
            None => {
                let mut s = vec![None; n];
                need.iter().for_each(|&(q, l)| s[q] = Some(l));
                partial.push(s);
            }
        }
    }
    for s in partial {
        let letters: Vec<usize> = s.into_iter().map(|l| l.unwrap_or(0)).collect();
        out.push(build(&letters));
    }
    out
}

/// Non-identity Paulis whose outcome is a marginal of measuring `setting`.
pub fn marginals(setting: &PauliOp) -> Vec<PauliOp> {
    let n = setting.num_qubits();
    let support = setting.support();
    (1u64..1 << support.len())
        .map(|mask| {
            let (mut x, mut z) = (0u64, 0u64);
            for (k, &q) in support.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    x |= setting.x_bits() & (1 << q);
                    z |= setting.z_bits() & (1 << q);
                }
            }
            PauliOp::from_bits(n, x, z).expect("subset of a valid Pauli")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Synthetic data

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableCounts {
    pub pauli: PauliOp,
    /// `+1` outcomes per depth.
    pub plus: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub label: PauliOp,
    pub counts: Vec<ObservableCounts>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayDataset {
    pub format: String,
    pub n: usize,
    pub connectivity: Vec<(usize, usize)>,
    pub depths: Vec<u32>,
    /// Shots per basis per depth.
    pub shots: u64,
    pub seed: u64,
    /// SPAM scale used in generation; fitters never read it.
    pub spam: Vec<(PauliOp, f64)>,
    pub bases: Vec<BasisRecord>,
}

/// Decay of one Pauli: depth, mean of the `+-1` outcome, shot count.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub pauli: PauliOp,
    pub points: Vec<(u32, f64, u64)>,
}

impl DecayDataset {
    /// Curves pooled over every setting that measures the Pauli.
    pub fn curves(&self) -> Vec<DecayCurve> {
        let mut pooled: BTreeMap<PauliOp, (Vec<u64>, u64)> = BTreeMap::new();
        for b in &self.bases {
            for c in &b.counts {
                let e = pooled.entry(c.pauli).or_insert_with(|| (vec![0; self.depths.len()], 0));
                for (acc, v) in e.0.iter_mut().zip(&c.plus) {
                    *acc += v;
                }
                e.1 += self.shots;
            }
        }
        pooled
            .into_iter()
            .map(|(pauli, (plus, shots))| DecayCurve {
                pauli,
                points: self
                    .depths
                    .iter()
                    .zip(plus)
                    .map(|(&d, k)| (d, 2.0 * k as f64 / shots as f64 - 1.0, shots))
                    .collect(),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ds: Self = serde_json::from_str(s)?;
        if ds.format != FORMAT {
            return Err(Error::Format(ds.format));
        }
        Ok(ds)
    }
}

fn check_depths(depths: &[u32]) -> Result<()> {
    if depths.is_empty() || depths.iter().any(|d| d % 2 == 1) {
        return Err(Error::Parameter(format!("depths must be non-empty and even, got {depths:?}")));
    }
    Ok(())
}

/// Per-Pauli SPAM scale `a_P ~ U(spam_range)`, keyed by the Pauli index.
pub fn spam_scale(seed: u64, p: &PauliOp, range: (f64, f64)) -> f64 {
    let mut rng = stream(seed, Domain::Spam, p.index() as u64);
    if range.0 == range.1 {
        return range.0;
    }
    rng.random_range(range.0..range.1)
}

/// Synthetic benchmark of a real generator.
///
/// Every setting of [`measurement_plan`] records each of its marginal Paulis
/// at each depth as `Binomial(shots, (1 + a_P f_P^d) / 2)` `+1` outcomes.
pub fn simulate_benchmark(
    truth: &PseudoLindblad,
    basis: &LocalBasis,
    depths: &[u32],
    shots: u64,
    spam_range: (f64, f64),
    seed: u64,
) -> Result<DecayDataset> {
    let n = basis.n;
    if n > MAX_LEARNING_QUBITS {
        return Err(Error::SizeLimit { what: "synthetic benchmarking", max: MAX_LEARNING_QUBITS, n });
    }
    if truth.num_qubits() != n {
        return Err(Error::Dimension(format!("truth acts on {} qubits, basis on {n}", truth.num_qubits())));
    }
    if !truth.is_real(IMAG_TOL) {
        return Err(Error::Parameter("synthetic benchmarking needs real rates".into()));
    }
    check_depths(depths)?;
    if shots == 0 {
        return Err(Error::Parameter("shots must be positive".into()));
    }
    if !(0.0 < spam_range.0 && spam_range.0 <= spam_range.1 && spam_range.1 <= 1.0) {
        return Err(Error::Parameter(format!("SPAM range {spam_range:?} outside (0, 1]")));
    }
    let plan = measurement_plan(basis);
    let bases: Vec<BasisRecord> = plan
        .par_iter()
        .enumerate()
        .map(|(i, setting)| {
            let mut rng = stream(seed, Domain::Benchmark, i as u64);
            let counts = marginals(setting)
                .into_iter()
                .map(|p| {
                    let f = truth.fidelity(&p).re;
                    let a = spam_scale(seed, &p, spam_range);
                    let plus = depths
                        .iter()
                        .map(|&d| {
                            let prob = (0.5 * (1.0 + a * f.powi(d as i32))).clamp(0.0, 1.0);
                            Binomial::new(shots, prob).expect("valid probability").sample(&mut rng)
                        })
                        .collect();
                    ObservableCounts { pauli: p, plus }
                })
                .collect();
            BasisRecord { label: *setting, counts }
        })
        .collect();
    let mut spam: Vec<(PauliOp, f64)> = bases
        .iter()
        .flat_map(|b| b.counts.iter().map(|c| c.pauli))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|p| (p, spam_scale(seed, &p, spam_range)))
        .collect();
    spam.sort_by_key(|(p, _)| *p);
    Ok(DecayDataset {
        format: FORMAT.to_string(),
        n,
        connectivity: basis.connectivity.clone(),
        depths: depths.to_vec(),
        shots,
        seed,
        spam,
        bases,
    })
}

/// Noiseless curve `a f^d` (infinite shots).
pub fn exact_curve(pauli: PauliOp, f: f64, a: f64, depths: &[u32]) -> DecayCurve {
    DecayCurve { pauli, points: depths.iter().map(|&d| (d, a * f.powi(d as i32), u64::MAX)).collect() }
}

// ---------------------------------------------------------------------------
// Fidelity extraction

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub pauli: PauliOp,
    pub fidelity: f64,
    pub stderr: f64,
    /// Fitted SPAM intercept `a_P`.
    pub spam: f64,
}

/// Weighted fit of `log(mean) = log a + d log f`.
///
/// Depths with a non-positive mean are dropped; each remaining depth is
/// weighted by the inverse of the binomial variance of its log-mean.
pub fn extract_fidelity(curve: &DecayCurve) -> Result<FidelityEstimate> {
    let fail = |reason: &str| Error::Extraction { pauli: curve.pauli, reason: reason.to_string() };
    let pts: Vec<(f64, f64, f64)> = curve
        .points
        .iter()
        .filter(|(_, m, _)| *m > 0.0)
        .map(|&(d, m, shots)| {
            let s = shots as f64;
            let var = ((1.0 - m * m) / s).max(1.0 / (s * s)) / (m * m);
            (d as f64, m.ln(), 1.0 / var)
        })
        .collect();
    let distinct: BTreeSet<u64> = pts.iter().map(|p| p.0 as u64).collect();
    if distinct.len() < 2 {
        return Err(fail("fewer than two depths with a positive mean"));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let sx: f64 = pts.iter().map(|p| p.2 * p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.2 * p.1).sum();
    let mx = sx / sw;
    let my = sy / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fidelity = slope.exp();
    Ok(FidelityEstimate { pauli: curve.pauli, fidelity, stderr: fidelity / sxx.sqrt(), spam: intercept.exp() })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Extraction {
    pub estimates: BTreeMap<PauliOp, FidelityEstimate>,
    pub failures: Vec<(PauliOp, String)>,
}

pub fn extract_fidelities(ds: &DecayDataset) -> Extraction {
    let mut out = Extraction::default();
    for c in ds.curves() {
        match extract_fidelity(&c) {
            Ok(e) => {
                out.estimates.insert(c.pauli, e);
            }
            Err(e) => out.failures.push((c.pauli, e.to_string())),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Fits

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    NonNegative,
    Unconstrained,
    CpProjected,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::NonNegative, Strategy::Unconstrained, Strategy::CpProjected];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::NonNegative => "non-negative",
            Strategy::Unconstrained => "unconstrained",
            Strategy::CpProjected => "cp-projected",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown strategy {s:?}")))
    }
}

/// `-log(f) / 2`, the right-hand side of the local system.
pub fn rhs_from_fidelities(fidelities: &[f64]) -> DVector<f64> {
    DVector::from_iterator(fidelities.len(), fidelities.iter().map(|f| -0.5 * f.ln()))
}

fn rates_to_generator(n: usize, cols: &[PauliOp], x: &DVector<f64>) -> Result<PseudoLindblad> {
    PseudoLindblad::from_real_terms(n, cols.iter().copied().zip(x.iter().copied()))
}

pub fn fit_nonnegative(m: &DesignMatrix, rhs: &DVector<f64>) -> Result<PseudoLindblad> {
    let n = m.cols.first().or(m.rows.first()).map_or(1, |p| p.num_qubits());
    rates_to_generator(n, &m.cols, &nnls(&m.matrix, rhs))
}

/// Minimum-norm least squares; the flag is set when `M` lacks full column rank.
pub fn fit_unconstrained(m: &DesignMatrix, rhs: &DVector<f64>) -> Result<(PseudoLindblad, bool)> {
    let n = m.cols.first().or(m.rows.first()).map_or(1, |p| p.num_qubits());
    let sol = min_norm_lstsq(&m.matrix, rhs);
    Ok((rates_to_generator(n, &m.cols, &sol.x)?, sol.rank_deficient))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpFit {
    pub rates: PseudoLindblad,
    pub channel: PauliChannel,
    /// `||H p - f||^2` after each iteration, starting from the initial point.
    pub objective: Vec<f64>,
}

const CP_MAX_ITER: usize = 100_000;
const CP_REL_DECREASE: f64 = 1e-12;

/// Closest CPTP Pauli channel (in fidelity space) to the model `unconstrained`.
///
/// Projected gradient on `||H p - f||^2` over the probability simplex with
/// step `1/L`, `L = 2D`.
pub fn fit_cp(unconstrained: &PseudoLindblad) -> Result<CpFit> {
    let n = unconstrained.num_qubits();
    if n > MAX_CP_QUBITS {
        return Err(Error::SizeLimit { what: "CP projection", max: MAX_CP_QUBITS, n });
    }
    let d = dimension(n);
    let target: Vec<f64> = unconstrained.fidelities().real_parts();
    let objective_of = |p: &[f64]| -> (f64, Vec<f64>) {
        let mut hp = p.to_vec();
        fwht_real_in_place(&mut hp).expect("length 4^n");
        let resid: Vec<f64> = hp.iter().zip(&target).map(|(a, b)| a - b).collect();
        (resid.iter().map(|r| r * r).sum(), resid)
    };
    let mut p = vec![0.0; d];
    p[0] = 1.0;
    let (mut obj, mut resid) = objective_of(&p);
    let mut history = vec![obj];
    let step = 1.0 / (2.0 * d as f64);
    for _ in 0..CP_MAX_ITER {
        let mut grad = resid.clone();
        fwht_real_in_place(&mut grad).expect("length 4^n");
        let moved: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x - step * 2.0 * g).collect();
        let next = project_simplex(&moved);
        let (next_obj, next_resid) = objective_of(&next);
        if next_obj > obj {
            break;
        }
        let decrease = obj - next_obj;
        p = next;
        obj = next_obj;
        resid = next_resid;
        history.push(obj);
        if decrease <= CP_REL_DECREASE * obj.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let channel = PauliChannel::new(n, p)?;
    let rates = channel_to_generator(&channel)?;
    Ok(CpFit { rates, channel, objective: history })
}

// ---------------------------------------------------------------------------
// Validation

/// Model fidelity `exp(-2 sum_{k anticommuting} lambda_k)` raised to `power`.
pub fn model_fidelity(rates: &PseudoLindblad, p: &PauliOp, power: u32) -> f64 {
    (rates.log_fidelity(p) * power as f64).exp().re
}

/// Mean absolute error against `(Pauli, fidelity)` pairs.
pub fn holdout_validate(rates: &PseudoLindblad, holdout: &[(PauliOp, f64)], power: u32) -> f64 {
    if holdout.is_empty() {
        return 0.0;
    }
    holdout.iter().map(|(p, f)| (model_fidelity(rates, p, power) - f).abs()).sum::<f64>() / holdout.len() as f64
}

/// `|| -log f_model / 2 - rhs ||` over the training Paulis.
pub fn residual_norm(rates: &PseudoLindblad, rows: &[PauliOp], rhs: &DVector<f64>) -> f64 {
    rows.iter()
        .zip(rhs.iter())
        .map(|(p, b)| (-0.5 * rates.log_fidelity(p).re - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub strategy: Strategy,
    pub rates: PseudoLindblad,
    pub residual: f64,
    /// Against the measured holdout fidelities.
    pub holdout_mae: f64,
    /// Against the exact fidelities of the truth.
    pub holdout_mae_truth: f64,
    pub rank_deficient: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub strategy: Strategy,
    pub rates: GeneratorFile,
    pub residual: f64,
    pub holdout_mae: f64,
    pub holdout_mae_truth: f64,
    pub rank_deficient: bool,
}

impl From<&FitResult> for FitRecord {
    fn from(f: &FitResult) -> Self {
        Self {
            strategy: f.strategy,
            rates: GeneratorFile::from(&f.rates),
            residual: f.residual,
            holdout_mae: f.holdout_mae,
            holdout_mae_truth: f.holdout_mae_truth,
            rank_deficient: f.rank_deficient,
        }
    }
}

impl TryFrom<FitRecord> for FitResult {
    type Error = Error;

    fn try_from(r: FitRecord) -> Result<Self> {
        Ok(Self {
            strategy: r.strategy,
            rates: r.rates.try_into()?,
            residual: r.residual,
            holdout_mae: r.holdout_mae,
            holdout_mae_truth: r.holdout_mae_truth,
            rank_deficient: r.rank_deficient,
        })
    }
}

// ---------------------------------------------------------------------------
// Pipeline

/// Demonstration truth on an open chain.
///
/// Single-qubit rates `(X, Y, Z) = (0.010, 0.012, 0.020) (1 + 0.2 q)`; edge
/// `k` carries `XX = 0.015` when `k % 3 == 0`, `YY = 0.012` and
/// `ZZ = -0.004` when `k % 3 == 1`, and `XZ = 0.010` when `k % 3 == 2`.
pub fn builtin_truth(n: usize) -> Result<PseudoLindblad> {
    let mut terms = Vec::new();
    for q in 0..n {
        let s = 1.0 + 0.2 * q as f64;
        for (l, v) in LETTERS.iter().zip([0.010, 0.012, 0.020]) {
            terms.push((PauliOp::single(n, q, *l)?, v * s));
        }
    }
    let pair = |a: usize, la: char, lb: char| -> Result<PauliOp> {
        Ok(PauliOp::single(n, a, la)?.product(&PauliOp::single(n, a + 1, lb)?))
    };
    for k in 0..n.saturating_sub(1) {
        match k % 3 {
            0 => terms.push((pair(k, 'X', 'X')?, 0.015)),
            1 => {
                terms.push((pair(k, 'Y', 'Y')?, 0.012));
                terms.push((pair(k, 'Z', 'Z')?, -0.004));
            }
            _ => terms.push((pair(k, 'X', 'Z')?, 0.010)),
        }
    }
    PseudoLindblad::from_real_terms(n, terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub n: usize,
    pub connectivity: Vec<(usize, usize)>,
    pub depths: Vec<u32>,
    pub shots: u64,
    pub spam_range: (f64, f64),
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    /// Layer repetitions for holdout predictions.
    pub holdout_power: u32,
}

impl LearnConfig {
    pub fn chain(n: usize, seed: u64) -> Self {
        Self {
            n,
            connectivity: (1..n).map(|q| (q - 1, q)).collect(),
            depths: DEFAULT_DEPTHS.to_vec(),
            shots: DEFAULT_SHOTS,
            spam_range: DEFAULT_SPAM_RANGE,
            seed,
            strategies: Strategy::ALL.to_vec(),
            holdout_power: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnReport {
    pub basis: LocalBasis,
    pub dataset: DecayDataset,
    pub training: Vec<FidelityEstimate>,
    pub holdout: Vec<FidelityEstimate>,
    pub failures: Vec<(PauliOp, String)>,
    pub fits: Vec<FitResult>,
}

impl LearnReport {
    pub fn fit(&self, s: Strategy) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.strategy == s)
    }
}

/// Simulate, extract, fit every requested strategy and validate on the
/// nonlocal Paulis measured alongside the training set.
pub fn run_learning(truth: &PseudoLindblad, cfg: &LearnConfig) -> Result<LearnReport> {
    let basis = LocalBasis::new(cfg.n, &cfg.connectivity)?;
    if cfg.strategies.contains(&Strategy::CpProjected) && cfg.n > MAX_CP_QUBITS {
        return Err(Error::SizeLimit { what: "CP projection", max: MAX_CP_QUBITS, n: cfg.n });
    }
    let dataset = simulate_benchmark(truth, &basis, &cfg.depths, cfg.shots, cfg.spam_range, cfg.seed)?;
    let ext = extract_fidelities(&dataset);
    let (training, holdout): (Vec<FidelityEstimate>, Vec<FidelityEstimate>) =
        ext.estimates.values().partition(|e| basis.contains(&e.pauli));
    let rows: Vec<PauliOp> = training.iter().map(|e| e.pauli).collect();
    let m = design_matrix(&rows, &basis.paulis);
    let rhs = rhs_from_fidelities(&training.iter().map(|e| e.fidelity).collect::<Vec<_>>());
    let measured: Vec<(PauliOp, f64)> = holdout.iter().map(|e| (e.pauli, e.fidelity)).collect();
    let exact: Vec<(PauliOp, f64)> =
        holdout.iter().map(|e| (e.pauli, model_fidelity(truth, &e.pauli, cfg.holdout_power))).collect();
    let power = cfg.holdout_power;
    let mut cache: Option<(PseudoLindblad, bool)> = None;
    let mut unconstrained = || -> Result<(PseudoLindblad, bool)> {
        if cache.is_none() {
            cache = Some(fit_unconstrained(&m, &rhs)?);
        }
        Ok(cache.clone().expect("set above"))
    };
    let mut fits = Vec::new();
    for &s in &cfg.strategies {
        let (rates, rank_deficient) = match s {
            Strategy::NonNegative => (fit_nonnegative(&m, &rhs)?, false),
            Strategy::Unconstrained => unconstrained()?,
            Strategy::CpProjected => {
                let (u, flag) = unconstrained()?;
                (fit_cp(&u)?.rates, flag)
            }
        };
        fits.push(FitResult {
            strategy: s,
            residual: residual_norm(&rates, &rows, &rhs),
            holdout_mae: holdout_validate(&rates, &measured, power),
            holdout_mae_truth: holdout_validate(&rates, &exact, power),
            rates,
            rank_deficient,
        });
    }
    Ok(LearnReport { basis, dataset, training, holdout, failures: ext.failures, fits })
}
