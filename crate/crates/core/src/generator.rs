//! Pauli channels, their fidelity spectra, and Pauli pseudo-Lindblad
//! generators `L(rho) = sum_k lambda_k (P_k rho P_k - rho)` with rates that
//! may be negative or complex.
//!
//! The rates of a channel `p` are `lambda = H log(H p) / 4^n` with the
//! principal branch of the complex logarithm; the identity entry is implied
//! by trace preservation and never stored.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{dimension, PauliOp};
use crate::wht::{fwht_in_place, ifwht_in_place, SpectrumKind, SpectrumVector};

/// Tolerance on `sum_k p_k = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Default lower bound on probabilities for a channel to count as physical.
pub const DEFAULT_CP_TOL: f64 = 1e-10;
/// Rates below this magnitude are dropped from a generator.
pub const DEFAULT_RATE_TOL: f64 = 1e-14;
/// Fidelities below this magnitude have no usable logarithm.
pub const DEFAULT_LOG_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in a probability or a "real" rate.
pub const IMAG_TOL: f64 = 1e-12;

/// A Pauli channel `rho -> sum_k p_k P_k rho P_k` stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel {
    n: usize,
    probs: Vec<f64>,
}

impl PauliChannel {
    /// Validates length and normalization, not positivity.
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != dimension(n) {
            return Err(Error::Dimension(format!(
                "channel on {n} qubits needs {} probabilities, got {}",
                dimension(n),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidChannel("non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidChannel(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { n, probs })
    }

    pub fn identity(n: usize) -> Self {
        let mut probs = vec![0.0; dimension(n)];
        probs[0] = 1.0;
        Self { n, probs }
    }

    /// Channel from a probability spectrum whose imaginary parts are negligible.
    pub fn from_spectrum(v: &SpectrumVector) -> Result<Self> {
        let imag = v.max_imag();
        if imag > IMAG_TOL {
            return Err(Error::InvalidChannel(format!(
                "probabilities carry imaginary parts up to {imag:e}"
            )));
        }
        Self::new(v.num_qubits(), v.real_parts())
    }

    /// Explicit error probabilities; the identity takes the remainder.
    pub fn from_errors(n: usize, errors: &[(PauliOp, f64)]) -> Result<Self> {
        let mut probs = vec![0.0; dimension(n)];
        for (p, v) in errors {
            if p.num_qubits() != n {
                return Err(Error::Dimension(format!("{p} is not a {n}-qubit Pauli")));
            }
            probs[p.index()] += v;
        }
        probs[0] = 1.0 - probs[1..].iter().sum::<f64>();
        Self::new(n, probs)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, p: &PauliOp) -> f64 {
        self.probs[p.index()]
    }

    /// Total non-identity error probability `1 - p_0`.
    pub fn infidelity(&self) -> f64 {
        1.0 - self.probs[0]
    }

    pub fn spectrum(&self) -> SpectrumVector {
        SpectrumVector::from_real(self.n, &self.probs, SpectrumKind::Probabilities)
            .expect("length validated at construction")
    }

    /// Pauli fidelities `f = H p`.
    pub fn fidelities(&self) -> SpectrumVector {
        channel_to_fidelities(self)
    }

    pub fn is_cptp(&self, cp_tol: f64) -> bool {
        is_cptp(self, cp_tol)
    }

    pub fn max_abs_diff(&self, other: &PauliChannel) -> f64 {
        self.probs.iter().zip(&other.probs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Markovianity class of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MarkovClass {
    Markovian,
    NonMarkovianReal,
    ComplexRates,
}

impl std::fmt::Display for MarkovClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MarkovClass::Markovian => "Markovian",
            MarkovClass::NonMarkovianReal => "NonMarkovianReal",
            MarkovClass::ComplexRates => "ComplexRates",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: MarkovClass,
    /// Rates responsible for the class, most negative real part first.
    pub witnesses: Vec<(PauliOp, Complex64)>,
}

/// Sparse pseudo-Lindblad generator; identity never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoLindblad {
    n: usize,
    rates: BTreeMap<PauliOp, Complex64>,
}

impl PseudoLindblad {
    pub fn empty(n: usize) -> Self {
        Self { n, rates: BTreeMap::new() }
    }

    /// Sums duplicate Paulis and drops rates below [`DEFAULT_RATE_TOL`].
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliOp, Complex64)>,
    {
        let mut rates = BTreeMap::new();
        for (p, lambda) in terms {
            if p.num_qubits() != n {
                return Err(Error::Dimension(format!("{p} is not a {n}-qubit Pauli")));
            }
            if p.is_identity() {
                return Err(Error::IdentityRate);
            }
            *rates.entry(p).or_insert(Complex64::new(0.0, 0.0)) += lambda;
        }
        let mut g = Self { n, rates };
        g.normalize(DEFAULT_RATE_TOL);
        Ok(g)
    }

    pub fn from_real_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliOp, f64)>,
    {
        Self::from_terms(n, terms.into_iter().map(|(p, v)| (p, Complex64::new(v, 0.0))))
    }

    /// Convenience for tests and examples: `[("XI", 0.01), ...]`.
    pub fn from_labels(terms: &[(&str, f64)]) -> Result<Self> {
        let parsed: Vec<(PauliOp, f64)> = terms
            .iter()
            .map(|(l, v)| Ok((l.parse::<PauliOp>()?, *v)))
            .collect::<Result<_>>()?;
        let n = parsed
            .first()
            .map(|(p, _)| p.num_qubits())
            .ok_or_else(|| Error::Parameter("no terms given".into()))?;
        Self::from_real_terms(n, parsed)
    }

    /// Generator from a dense rate vector (entry 0 ignored).
    pub fn from_dense(n: usize, dense: &[Complex64]) -> Result<Self> {
        if dense.len() != dimension(n) {
            return Err(Error::Dimension("dense rate vector has wrong length".into()));
        }
        let terms = dense
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| (PauliOp::from_index(i, n).expect("in range"), v));
        Self::from_terms(n, terms)
    }

    pub fn normalize(&mut self, rate_tol: f64) {
        self.rates.retain(|p, v| !p.is_identity() && v.norm() >= rate_tol);
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn rate(&self, p: &PauliOp) -> Complex64 {
        self.rates.get(p).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliOp, &Complex64)> {
        self.rates.iter()
    }

    /// True when every rate has `|Im| <= tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.rates.values().all(|v| v.im.abs() <= tol)
    }

    /// Implied identity rate `-sum_k lambda_k`.
    pub fn identity_rate(&self) -> Complex64 {
        -self.rates.values().sum::<Complex64>()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(Complex64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        let mut g = Self { n: self.n, rates: self.rates.iter().map(|(p, v)| (*p, v * s)).collect() };
        g.normalize(DEFAULT_RATE_TOL);
        g
    }

    /// Sum of rate maps; valid because all terms commute.
    pub fn compose(&self, other: &PseudoLindblad) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot compose {}-qubit and {}-qubit generators",
                self.n, other.n
            )));
        }
        let mut rates = self.rates.clone();
        for (p, v) in &other.rates {
            *rates.entry(*p).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let mut g = Self { n: self.n, rates };
        g.normalize(DEFAULT_RATE_TOL);
        Ok(g)
    }

    pub fn invert(&self) -> Self {
        self.scale(-1.0)
    }

    /// `log f_P = -2 sum_{k anticommuting with P} lambda_k`, evaluated sparsely.
    pub fn log_fidelity(&self, p: &PauliOp) -> Complex64 {
        -2.0 * self
            .rates
            .iter()
            .filter(|(k, _)| !k.commutes_with(p))
            .map(|(_, v)| *v)
            .sum::<Complex64>()
    }

    pub fn fidelity(&self, p: &PauliOp) -> Complex64 {
        self.log_fidelity(p).exp()
    }

    /// Dense rate vector with the implied identity entry at index 0.
    pub fn dense_rates(&self) -> Vec<Complex64> {
        let mut dense = vec![Complex64::new(0.0, 0.0); dimension(self.n)];
        for (p, v) in &self.rates {
            dense[p.index()] = *v;
        }
        dense[0] = self.identity_rate();
        dense
    }

    /// Dense log-fidelities `H lambda` (identity entry included).
    pub fn log_fidelities(&self) -> SpectrumVector {
        let mut v = self.dense_rates();
        fwht_in_place(&mut v).expect("dense length is 4^n");
        SpectrumVector::new(self.n, v, SpectrumKind::LogFidelities).expect("length 4^n")
    }

    /// Dense fidelity spectrum `exp(H lambda)`.
    pub fn fidelities(&self) -> SpectrumVector {
        self.log_fidelities().map(SpectrumKind::Fidelities, |v| v.exp())
    }

    pub fn classify(&self, class_tol: f64) -> Classification {
        classify(self, class_tol)
    }
}

/// `f = H p`.
pub fn channel_to_fidelities(ch: &PauliChannel) -> SpectrumVector {
    crate::wht::walsh_hadamard(&ch.spectrum())
}

/// Principal-branch logarithm with `-0.0` imaginary parts folded to `+0.0`,
/// so a negative real fidelity always maps to `ln|f| + i pi`.
pub fn principal_ln(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    z.ln()
}

/// Dense rates `H log(f) / 4^n` for a fidelity spectrum, identity entry included.
pub fn rates_from_fidelities(f: &SpectrumVector, log_tol: f64) -> Result<Vec<Complex64>> {
    let mut logs = Vec::with_capacity(f.values().len());
    for (i, v) in f.values().iter().enumerate() {
        if v.norm() < log_tol {
            return Err(Error::SingularFidelity {
                pauli: PauliOp::from_index(i, f.num_qubits())?,
                value: v.norm(),
            });
        }
        logs.push(principal_ln(*v));
    }
    ifwht_in_place(&mut logs)?;
    Ok(logs)
}

/// Dense rate vector of a channel, identity entry included.
pub fn channel_rates(ch: &PauliChannel, log_tol: f64) -> Result<Vec<Complex64>> {
    rates_from_fidelities(&channel_to_fidelities(ch), log_tol)
}

/// Pseudo-Lindblad generator of a channel with the default tolerances.
pub fn channel_to_generator(ch: &PauliChannel) -> Result<PseudoLindblad> {
    channel_to_generator_with(ch, DEFAULT_LOG_TOL)
}

pub fn channel_to_generator_with(ch: &PauliChannel, log_tol: f64) -> Result<PseudoLindblad> {
    let dense = channel_rates(ch, log_tol)?;
    PseudoLindblad::from_dense(ch.num_qubits(), &dense)
}

/// Probability spectrum of `exp(L)`; complex in general.
pub fn generator_to_probabilities(g: &PseudoLindblad) -> SpectrumVector {
    let mut v = g.fidelities().into_values();
    ifwht_in_place(&mut v).expect("dense length is 4^n");
    SpectrumVector::new(g.num_qubits(), v, SpectrumKind::Probabilities).expect("length 4^n")
}

/// The channel `exp(L)`.
///
/// The result is not required to be physical: pseudo-generators scaled to
/// fractional times routinely produce negative probabilities, so callers
/// check [`PauliChannel::is_cptp`]. Fails only when the probabilities are
/// genuinely complex.
pub fn generator_to_channel(g: &PseudoLindblad) -> Result<PauliChannel> {
    PauliChannel::from_spectrum(&generator_to_probabilities(g))
}

/// Probability-simplex membership.
pub fn is_cptp(ch: &PauliChannel, cp_tol: f64) -> bool {
    let total: f64 = ch.probs.iter().sum();
    (total - 1.0).abs() <= NORMALIZATION_TOL && ch.probs.iter().all(|&p| p >= -cp_tol)
}

pub fn classify(g: &PseudoLindblad, class_tol: f64) -> Classification {
    let complex: Vec<(PauliOp, Complex64)> =
        g.terms().filter(|(_, v)| v.im.abs() > IMAG_TOL).map(|(p, v)| (*p, *v)).collect();
    let (class, mut witnesses) = if !complex.is_empty() {
        (MarkovClass::ComplexRates, complex)
    } else {
        let negative: Vec<_> =
            g.terms().filter(|(_, v)| v.re < -class_tol).map(|(p, v)| (*p, *v)).collect();
        if negative.is_empty() {
            (MarkovClass::Markovian, negative)
        } else {
            (MarkovClass::NonMarkovianReal, negative)
        }
    };
    witnesses.sort_by(|a, b| {
        a.1.re
            .total_cmp(&b.1.re)
            .then_with(|| b.1.im.abs().total_cmp(&a.1.im.abs()))
            .then_with(|| a.0.cmp(&b.0))
    });
    Classification { class, witnesses }
}
