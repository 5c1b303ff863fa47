use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use pauliblad::generator::DEFAULT_CP_TOL;
use pauliblad::io::{fmt_float, ModelFile, TermRecord, FORMAT};
use pauliblad::{channel_to_generator, generator_to_channel, MarkovClass, PauliOp};

use crate::Malformed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub min_re: f64,
    pub max_re: f64,
    pub min_abs: f64,
    pub negative: usize,
    pub max_imag: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format: String,
    pub n: usize,
    /// "channel" or "generator".
    pub input: String,
    pub fidelity_summary: SpectrumSummary,
    pub fidelities: Vec<TermRecord>,
    pub rates: Vec<TermRecord>,
    pub classification: MarkovClass,
    pub witnesses: Vec<TermRecord>,
    /// Smallest real part over all non-identity rates, absent ones counting as 0.
    pub lambda_min: f64,
    pub lambda_min_pauli: Option<PauliOp>,
    /// `None` when the channel of a generator has complex probabilities.
    pub cptp: Option<bool>,
    pub min_probability: Option<f64>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> u8 {
        match self.classification {
            MarkovClass::Markovian => 0,
            MarkovClass::NonMarkovianReal => 10,
            MarkovClass::ComplexRates => 11,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = &self.fidelity_summary;
        let _ = writeln!(s, "input: {} on {} qubit(s)", self.input, self.n);
        let _ = writeln!(
            s,
            "fidelities: min {} max {} min|f| {} negative {} max|im| {}",
            fmt_float(f.min_re),
            fmt_float(f.max_re),
            fmt_float(f.min_abs),
            f.negative,
            fmt_float(f.max_imag)
        );
        let _ = writeln!(s, "rates:");
        for t in &self.rates {
            let _ = writeln!(s, "  {} {} {}", t.pauli, fmt_float(t.re), fmt_float(t.im));
        }
        let _ = writeln!(s, "classification: {}", self.classification);
        let w: Vec<String> = self.witnesses.iter().map(|t| t.pauli.to_string()).collect();
        let _ = writeln!(s, "witnesses: {}", w.join(" "));
        match self.lambda_min_pauli {
            Some(p) => {
                let _ = writeln!(s, "lambda_min: {} ({p})", fmt_float(self.lambda_min));
            }
            None => {
                let _ = writeln!(s, "lambda_min: {}", fmt_float(self.lambda_min));
            }
        }
        let cptp = match self.cptp {
            Some(true) => "yes",
            Some(false) => "no",
            None => "no (complex probabilities)",
        };
        let _ = writeln!(s, "cptp: {cptp}");
        if let Some(p) = self.min_probability {
            let _ = writeln!(s, "min_probability: {}", fmt_float(p));
        }
        s
    }
}

pub fn analyze_file(path: &Path, class_tol: f64) -> Result<AnalysisReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Malformed(format!("{}: {e}", path.display())))?;
    let model = ModelFile::parse(&text).map_err(|e| Malformed(format!("{}: {e}", path.display())))?;
    analyze(&model, class_tol)
}

pub fn analyze(model: &ModelFile, class_tol: f64) -> Result<AnalysisReport> {
    let (input, g, channel) = match model {
        ModelFile::Channel(ch) => ("channel", channel_to_generator(ch)?, Some(ch.clone())),
        ModelFile::Generator(g) => ("generator", g.clone(), generator_to_channel(g).ok()),
    };
    let n = g.num_qubits();
    let fid = match &channel {
        Some(ch) if matches!(model, ModelFile::Channel(_)) => ch.fidelities(),
        _ => g.fidelities(),
    };
    let values = fid.values();
    let summary = SpectrumSummary {
        min_re: values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min),
        max_re: values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max),
        min_abs: values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min),
        negative: values.iter().filter(|v| v.re < 0.0).count(),
        max_imag: fid.max_imag(),
    };
    let record = |p: &PauliOp, v: &pauliblad::Complex64| TermRecord { pauli: *p, re: v.re, im: v.im };
    let fidelities = PauliOp::all(n).zip(values).map(|(p, v)| record(&p, v)).collect();
    let rates: Vec<TermRecord> = g.terms().map(|(p, v)| record(p, v)).collect();
    let class = g.classify(class_tol);
    let dense = g.dense_rates();
    let (lambda_min, lambda_min_pauli) = PauliOp::all(n)
        .zip(&dense)
        .skip(1)
        .map(|(p, v)| (v.re, Some(p)))
        .fold((f64::INFINITY, None), |a, b| if b.0 < a.0 { b } else { a });
    let lambda_min = if lambda_min.is_finite() { lambda_min } else { 0.0 };
    Ok(AnalysisReport {
        format: FORMAT.to_string(),
        n,
        input: input.to_string(),
        fidelity_summary: summary,
        fidelities,
        rates,
        classification: class.class,
        witnesses: class.witnesses.iter().map(|(p, v)| record(p, v)).collect(),
        lambda_min,
        lambda_min_pauli,
        cptp: channel.as_ref().map(|ch| ch.is_cptp(DEFAULT_CP_TOL)),
        min_probability: channel.as_ref().map(|ch| ch.probs().iter().copied().fold(f64::INFINITY, f64::min)),
    })
}
