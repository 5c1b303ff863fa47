//! Quasi-probabilistic implementation of `e^{alpha L}` for a pseudo-Lindblad
//! generator, sign/phase weighted estimation of Pauli observables, and the
//! PEA/PEC sampling overheads.
//!
//! Each rate gives one factor `E_k(rho) = w rho + (1 - w) P rho P` with
//! `w = (1 + e^{-2 lambda}) / 2`, written as
//! `gamma [q rho + e^{i phi} (1 - q) P rho P]` and sampled term by term.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generator::{PauliChannel, PseudoLindblad, IMAG_TOL};
use crate::pauli::PauliOp;
use crate::rng::{stream, Domain};

/// Shots per independent RNG stream.
pub const SHOT_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "kebab-case")]
pub enum Mode {
    /// Implement the channel itself.
    Inject,
    /// Implement the inverse (all rates negated).
    Invert,
    /// Implement the channel with rates scaled by `alpha`.
    Amplify(f64),
}

impl Mode {
    pub fn factor(&self) -> f64 {
        match *self {
            Mode::Inject => 1.0,
            Mode::Invert => -1.0,
            Mode::Amplify(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermCase {
    Probabilistic,
    SignFlip,
    ComplexPhase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiTerm {
    pub pauli: PauliOp,
    /// Effective rate after the mode is applied.
    pub lambda: Complex64,
    pub w: Complex64,
    pub q: f64,
    pub phi: f64,
    pub gamma: Complex64,
    pub case: TermCase,
}

impl QuasiTerm {
    pub fn new(pauli: PauliOp, lambda: Complex64) -> Self {
        let w = 0.5 * (1.0 + (-2.0 * lambda).exp());
        let one_minus = 1.0 - w;
        let case = if lambda.im.abs() > IMAG_TOL {
            TermCase::ComplexPhase
        } else if lambda.re >= 0.0 {
            TermCase::Probabilistic
        } else {
            TermCase::SignFlip
        };
        let (gamma, q, phi) = if w.norm() == 0.0 {
            // pure Pauli: q = 0 and the phase sits in gamma
            (one_minus, 0.0, 0.0)
        } else {
            let mass = w.norm() + one_minus.norm();
            let phi = if one_minus.norm() == 0.0 { 0.0 } else { (one_minus / w).arg() };
            (w / w.norm() * mass, w.norm() / mass, phi)
        };
        let (gamma, phi) = match case {
            // exact values for real rates
            TermCase::Probabilistic => (Complex64::new(1.0, 0.0), 0.0),
            TermCase::SignFlip => (Complex64::new(2.0 * w.re - 1.0, 0.0), PI),
            TermCase::ComplexPhase => (gamma, phi),
        };
        let q = match case {
            TermCase::Probabilistic => w.re,
            TermCase::SignFlip => w.re / (2.0 * w.re - 1.0),
            TermCase::ComplexPhase => q,
        };
        Self { pauli, lambda, w, q, phi, gamma, case }
    }

    /// `gamma e^{i phi}`, the weight factor when the Pauli is drawn.
    pub fn flip_factor(&self) -> Complex64 {
        self.gamma * Complex64::from_polar(1.0, self.phi)
    }

    /// Exact action on the fidelity of an observable.
    pub fn fidelity_factor(&self, observable: &PauliOp) -> Complex64 {
        if self.pauli.commutes_with(observable) {
            self.gamma * self.q + self.flip_factor() * (1.0 - self.q)
        } else {
            self.gamma * self.q - self.flip_factor() * (1.0 - self.q)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiProgram {
    pub n: usize,
    pub terms: Vec<QuasiTerm>,
    pub total_gamma: f64,
    pub mode: Mode,
    /// Deterministic Pauli applied on every shot (set by the `m pi/2` rewrite).
    pub frame: PauliOp,
}

impl QuasiProgram {
    fn from_terms(n: usize, terms: Vec<QuasiTerm>, mode: Mode, frame: PauliOp) -> Self {
        let total_gamma = terms.iter().map(|t| t.gamma.norm()).product();
        Self { n, terms, total_gamma, mode, frame }
    }

    /// Exact fidelity of `observable` under the implemented map.
    pub fn fidelity(&self, observable: &PauliOp) -> Complex64 {
        let frame = if self.frame.commutes_with(observable) { 1.0 } else { -1.0 };
        self.terms.iter().map(|t| t.fidelity_factor(observable)).product::<Complex64>() * frame
    }

    /// Split every term with `Im lambda = m pi/2` into a real-rate term and,
    /// for odd `m`, a deterministic Pauli folded into `frame`.
    pub fn factor_quarter_turns(&self, tol: f64) -> Self {
        let mut frame = self.frame;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.case != TermCase::ComplexPhase {
                    return *t;
                }
                let m = (t.lambda.im / (PI / 2.0)).round();
                if (t.lambda.im - m * PI / 2.0).abs() > tol {
                    return *t;
                }
                if (m as i64).rem_euclid(2) == 1 {
                    frame = frame.product(&t.pauli);
                }
                QuasiTerm::new(t.pauli, Complex64::new(t.lambda.re, 0.0))
            })
            .collect();
        Self::from_terms(self.n, terms, self.mode, frame)
    }
}

pub fn compile(g: &PseudoLindblad, mode: Mode) -> QuasiProgram {
    let s = mode.factor();
    let terms = g.terms().map(|(p, l)| QuasiTerm::new(*p, l * s)).collect();
    QuasiProgram::from_terms(g.num_qubits(), terms, mode, PauliOp::identity(g.num_qubits()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedShot {
    pub applied: Vec<PauliOp>,
    pub weight: Complex64,
}

impl WeightedShot {
    /// Net Pauli applied (phases dropped).
    pub fn net(&self, n: usize) -> PauliOp {
        self.applied.iter().fold(PauliOp::identity(n), |acc, p| acc.product(p))
    }
}

pub fn sample_shot<R: Rng + ?Sized>(prog: &QuasiProgram, rng: &mut R) -> WeightedShot {
    let mut applied = Vec::new();
    if !prog.frame.is_identity() {
        applied.push(prog.frame);
    }
    let mut weight = Complex64::new(1.0, 0.0);
    for t in &prog.terms {
        if rng.random::<f64>() < t.q {
            weight *= t.gamma;
        } else {
            weight *= t.flip_factor();
            applied.push(t.pauli);
        }
    }
    WeightedShot { applied, weight }
}

fn sample_net<R: Rng + ?Sized>(prog: &QuasiProgram, rng: &mut R) -> (PauliOp, Complex64) {
    let mut net = prog.frame;
    let mut weight = Complex64::new(1.0, 0.0);
    for t in &prog.terms {
        if rng.random::<f64>() < t.q {
            weight *= t.gamma;
        } else {
            weight *= t.flip_factor();
            net = net.product(&t.pauli);
        }
    }
    (net, weight)
}

/// Noise that acts after the program, folded in exactly.
#[derive(Clone, Copy, Debug)]
pub enum Background<'a> {
    None,
    Generator(&'a PseudoLindblad),
    Channel(&'a PauliChannel),
}

impl Background<'_> {
    pub fn fidelity(&self, p: &PauliOp) -> Complex64 {
        match self {
            Background::None => Complex64::new(1.0, 0.0),
            Background::Generator(g) => g.fidelity(p),
            Background::Channel(ch) => {
                let n = ch.num_qubits();
                let f: f64 = PauliOp::all(n)
                    .zip(ch.probs())
                    .map(|(q, pr)| if q.commutes_with(p) { *pr } else { -*pr })
                    .sum();
                Complex64::new(f, 0.0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub observable: PauliOp,
    pub mean: f64,
    pub imag: f64,
    pub stderr: f64,
    /// Target fidelity computed from the generator.
    pub exact: Complex64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    sum: Complex64,
    sum_sq_re: f64,
}

impl Moments {
    fn merge(a: Moments, b: Moments) -> Moments {
        Moments { count: a.count + b.count, sum: a.sum + b.sum, sum_sq_re: a.sum_sq_re + b.sum_sq_re }
    }
}

fn pairwise(mut v: Vec<Vec<Moments>>) -> Vec<Moments> {
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.into_iter().zip(b).map(|(x, y)| Moments::merge(x, y)).collect()),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap_or_default()
}

/// Fidelity of the mode's target map, from the generator.
pub fn target_fidelity(g: &PseudoLindblad, mode: Mode, observable: &PauliOp) -> Complex64 {
    (g.log_fidelity(observable) * mode.factor()).exp()
}

/// Weighted estimates of `<P>` for inputs in the +1 eigenstate of each `P`.
///
/// The result is independent of the thread count: every chunk of
/// [`SHOT_CHUNK`] shots has its own stream and chunks are merged in order.
pub fn estimate_expectations(
    g: &PseudoLindblad,
    prog: &QuasiProgram,
    background: Background<'_>,
    observables: &[PauliOp],
    shots: u64,
    seed: u64,
) -> Vec<Estimate> {
    let chunks = shots.div_ceil(SHOT_CHUNK as u64);
    let bg: Vec<Complex64> = observables.iter().map(|o| background.fidelity(o)).collect();
    let per_chunk: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, Domain::Shots, c);
            let len = (shots - c * SHOT_CHUNK as u64).min(SHOT_CHUNK as u64);
            let mut acc = vec![Moments::default(); observables.len()];
            for _ in 0..len {
                let (net, w) = sample_net(prog, &mut rng);
                for ((m, o), b) in acc.iter_mut().zip(observables).zip(&bg) {
                    let v = if net.commutes_with(o) { w } else { -w } * b;
                    m.count += 1;
                    m.sum += v;
                    m.sum_sq_re += v.re * v.re;
                }
            }
            acc
        })
        .collect();
    let totals = pairwise(per_chunk);
    observables
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let m = totals.get(i).copied().unwrap_or_default();
            let count = m.count.max(1) as f64;
            let mean = m.sum / count;
            let var = if m.count > 1 { (m.sum_sq_re - count * mean.re * mean.re).max(0.0) / (count - 1.0) } else { 0.0 };
            Estimate {
                observable: *o,
                mean: mean.re,
                imag: mean.im,
                stderr: (var / count).sqrt(),
                exact: target_fidelity(g, prog.mode, o) * bg[i],
            }
        })
        .collect()
}

/// `exp(-2 sum_{alpha lambda < 0} alpha lambda)`; complex generators fall back to the compiled `prod |gamma_k|`.
pub fn pea_overhead(g: &PseudoLindblad, alpha: f64) -> f64 {
    if !g.is_real(IMAG_TOL) {
        return compile(g, Mode::Amplify(alpha)).total_gamma;
    }
    let s: f64 = g.terms().map(|(_, l)| alpha * l.re).filter(|v| *v < 0.0).sum();
    (-2.0 * s).exp()
}

/// `exp(2 sum_{lambda > 0} lambda)`; complex generators fall back to the compiled inverse.
pub fn pec_overhead(g: &PseudoLindblad) -> f64 {
    if !g.is_real(IMAG_TOL) {
        return compile(g, Mode::Invert).total_gamma;
    }
    let s: f64 = g.terms().map(|(_, l)| l.re).filter(|v| *v > 0.0).sum();
    (2.0 * s).exp()
}
