//! Subcommand bodies. Each returns the process exit code.

use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pauliblad::io::{fmt_float, GeneratorFile, ModelFile, TermRecord, FORMAT};
use pauliblad::learning::{self, FitRecord, LearnConfig, Strategy, DEFAULT_SPAM_RANGE, MAX_CP_QUBITS};
use pauliblad::mitigation::{self, Background, Estimate, Mode, QuasiTerm};
use pauliblad::random_channels::{self, RandomChannelConfig, Sampler, ScanRow};
use pauliblad::twirl::{self, GateNoise, GateScanRow};
use pauliblad::{channel_to_generator, PauliOp, PseudoLindblad};

use crate::grid::parse_grid;
use crate::output::{csv_text, json_text, Format, Output};
use crate::{
    AnalyzeArgs, BackgroundArg, Cli, GateScanArgs, LearnArgs, Malformed, MitigateArgs, ModeArg, RandomScanArgs,
    Variant,
};

pub fn analyze(cli: &Cli, a: &AnalyzeArgs, out: &mut Output) -> Result<u8> {
    let report = crate::analyze::analyze_file(&a.file, a.class_tol)?;
    match cli.format {
        Some(Format::Json) => out.emit("analysis.json", &json_text(&report)?)?,
        Some(Format::Csv) => {
            let header: Vec<String> = ["pauli", "f_re", "f_im", "lambda_re", "lambda_im"].map(String::from).to_vec();
            let rows = report.fidelities.iter().map(|f| {
                let l = report.rates.iter().find(|r| r.pauli == f.pauli);
                vec![
                    f.pauli.to_string(),
                    fmt_float(f.re),
                    fmt_float(f.im),
                    fmt_float(l.map_or(0.0, |l| l.re)),
                    fmt_float(l.map_or(0.0, |l| l.im)),
                ]
            });
            out.emit("analysis.csv", &csv_text(&header, rows)?)?
        }
        None => out.emit("analysis.txt", &report.to_text())?,
    }
    Ok(report.exit_code())
}

pub fn random_scan(cli: &Cli, a: &RandomScanArgs, out: &mut Output) -> Result<u8> {
    let sampler = Sampler::from_str(&a.sampler)?;
    let rs = parse_grid(&a.r)?;
    let cfgs: Vec<RandomChannelConfig> = a
        .n
        .iter()
        .flat_map(|&n| rs.iter().map(move |&r| RandomChannelConfig::new(n, r, a.trials, cli.seed, sampler)))
        .collect();
    let rows = random_channels::scan(&cfgs)?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header: Vec<String> = ScanRow::CSV_HEADER.iter().map(|s| s.to_string()).collect();
            out.emit("random_scan.csv", &csv_text(&header, rows.iter().map(ScanRow::csv_record))?)?
        }
        Format::Json => out.emit("random_scan.json", &json_text(&rows)?)?,
    }
    Ok(0)
}

fn grid_or(spec: &Option<String>, default: &str) -> Result<Vec<f64>> {
    parse_grid(spec.as_deref().unwrap_or(default))
}

pub fn gate_points(a: &GateScanArgs) -> Result<Vec<GateNoise>> {
    let unused = |flags: &[(&str, bool)]| -> Result<()> {
        for (name, set) in flags {
            if *set {
                bail!("--{name} does not apply to this variant");
            }
        }
        Ok(())
    };
    Ok(match a.variant {
        Variant::Hadamard => {
            unused(&[("dx", a.dx.is_some()), ("dz", a.dz.is_some()), ("dkappa", a.dkappa.is_some())])?;
            let angles = match &a.p {
                Some(p) => parse_grid(p)?
                    .into_iter()
                    .map(|p| {
                        if !(0.0..=0.5).contains(&p) {
                            bail!("p = {p} outside [0, 1/2]");
                        }
                        Ok((2.0 * p).sqrt().asin())
                    })
                    .collect::<Result<_>>()?,
                None => grid_or(&a.omega_dt, "0:1.5:0.05")?,
            };
            angles.into_iter().map(|omega_dt| GateNoise::Hadamard { omega_dt }).collect()
        }
        Variant::Xpi => {
            unused(&[("omega-dt", a.omega_dt.is_some()), ("p", a.p.is_some()), ("dkappa", a.dkappa.is_some())])?;
            let dz = grid_or(&a.dz, "-0.05:0.05:0.01")?;
            grid_or(&a.dx, "-0.05:0.05:0.01")?
                .into_iter()
                .flat_map(|dx| dz.iter().map(move |&dz| GateNoise::XPi { dx, dz }))
                .collect()
        }
        Variant::ZzT1 => {
            unused(&[("omega-dt", a.omega_dt.is_some()), ("p", a.p.is_some()), ("dx", a.dx.is_some()), ("dz", a.dz.is_some())])?;
            grid_or(&a.dkappa, "0:1:0.05")?.into_iter().map(|dkappa| GateNoise::ZzT1 { dkappa }).collect()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub noise: GateNoise,
    pub fidelities: Vec<TermRecord>,
    /// Absent where a fidelity vanishes.
    pub rates: Option<Vec<TermRecord>>,
    pub classification: String,
}

impl From<&GateScanRow> for GateRecord {
    fn from(r: &GateScanRow) -> Self {
        let n = r.noise.num_qubits();
        Self {
            noise: r.noise,
            fidelities: PauliOp::all(n).zip(&r.fidelities).map(|(pauli, f)| TermRecord { pauli, re: *f, im: 0.0 }).collect(),
            rates: r.rates.as_ref().map(|rates| {
                PauliOp::all(n).skip(1).zip(rates).map(|(pauli, v)| TermRecord { pauli, re: v.re, im: v.im }).collect()
            }),
            classification: r.class.map_or("Singular".to_string(), |c| c.to_string()),
        }
    }
}

pub fn gate_scan(cli: &Cli, a: &GateScanArgs, out: &mut Output) -> Result<u8> {
    let points = gate_points(a)?;
    let rows = twirl::gate_scan(&points);
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header = GateScanRow::csv_header(&points[0]);
            out.emit("gate_scan.csv", &csv_text(&header, rows.iter().map(GateScanRow::csv_record))?)?
        }
        Format::Json => {
            let records: Vec<GateRecord> = rows.iter().map(GateRecord::from).collect();
            out.emit("gate_scan.json", &json_text(&records)?)?
        }
    }
    Ok(0)
}

fn load_generator(path: &std::path::Path) -> Result<PseudoLindblad> {
    let text = std::fs::read_to_string(path).map_err(|e| Malformed(format!("{}: {e}", path.display())))?;
    match ModelFile::parse(&text).map_err(|e| Malformed(format!("{}: {e}", path.display())))? {
        ModelFile::Generator(g) => Ok(g),
        ModelFile::Channel(ch) => Ok(channel_to_generator(&ch)?),
    }
}

fn parse_paulis(labels: &[String], n: usize) -> Result<Vec<PauliOp>> {
    labels
        .iter()
        .map(|l| {
            let p = PauliOp::from_str(l.trim())?;
            if p.num_qubits() != n {
                bail!("observable {l} has {} qubits, the model has {n}", p.num_qubits());
            }
            Ok(p)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub format: String,
    pub n: usize,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    pub total_gamma: f64,
    pub pec_overhead: f64,
    pub pea_overhead: Option<f64>,
    pub frame: PauliOp,
    pub terms: Vec<QuasiTerm>,
    pub estimates: Vec<Estimate>,
}

pub fn mitigation_report(cli: &Cli, a: &MitigateArgs) -> Result<MitigationReport> {
    let g = load_generator(&a.model)?;
    let n = g.num_qubits();
    let mode = match (a.mode, a.alpha) {
        (ModeArg::Amplify, Some(alpha)) => Mode::Amplify(alpha),
        (ModeArg::Amplify, None) => bail!("--mode amplify needs --alpha"),
        (_, Some(_)) => bail!("--alpha only applies to --mode amplify"),
        (ModeArg::Inject, None) => Mode::Inject,
        (ModeArg::Invert, None) => Mode::Invert,
    };
    let observables = match &a.observables {
        Some(labels) => parse_paulis(labels, n)?,
        None => PauliOp::all(n).filter(|p| (1..=2).contains(&p.weight())).collect(),
    };
    let mut prog = mitigation::compile(&g, mode);
    if a.factor_quarter_turns {
        prog = prog.factor_quarter_turns(1e-9);
    }
    let background = match a.background {
        BackgroundArg::None => Background::None,
        BackgroundArg::Exact => Background::Generator(&g),
    };
    let estimates = mitigation::estimate_expectations(&g, &prog, background, &observables, a.shots, cli.seed);
    Ok(MitigationReport {
        format: FORMAT.to_string(),
        n,
        mode,
        shots: a.shots,
        seed: cli.seed,
        total_gamma: prog.total_gamma,
        pec_overhead: mitigation::pec_overhead(&g),
        pea_overhead: match mode {
            Mode::Amplify(alpha) => Some(mitigation::pea_overhead(&g, alpha)),
            _ => None,
        },
        frame: prog.frame,
        terms: prog.terms,
        estimates,
    })
}

pub fn mitigate(cli: &Cli, a: &MitigateArgs, out: &mut Output) -> Result<u8> {
    let report = mitigation_report(cli, a)?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => out.emit("mitigate.json", &json_text(&report)?)?,
        Format::Csv => {
            let header: Vec<String> =
                ["observable", "mean", "imag", "stderr", "exact_re", "exact_im"].map(String::from).to_vec();
            let rows = report.estimates.iter().map(|e| {
                vec![
                    e.observable.to_string(),
                    fmt_float(e.mean),
                    fmt_float(e.imag),
                    fmt_float(e.stderr),
                    fmt_float(e.exact.re),
                    fmt_float(e.exact.im),
                ]
            });
            out.emit("mitigate.csv", &csv_text(&header, rows)?)?
        }
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub pauli: PauliOp,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnOutput {
    pub format: String,
    pub n: usize,
    pub connectivity: Vec<(usize, usize)>,
    pub depths: Vec<u32>,
    pub shots: u64,
    pub seed: u64,
    pub truth: GeneratorFile,
    pub training_paulis: usize,
    pub holdout_paulis: usize,
    pub failures: Vec<FailureRecord>,
    pub fits: Vec<FitRecord>,
    /// Strategies by increasing holdout MAE.
    pub mae_ordering: Vec<Strategy>,
}

fn parse_edges(spec: &str) -> Result<Vec<(usize, usize)>> {
    spec.split(',')
        .map(|e| {
            let (a, b) = e.trim().split_once('-').with_context(|| format!("edge {e:?} is not a-b"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

pub fn learn_config(cli: &Cli, a: &LearnArgs) -> Result<LearnConfig> {
    let strategies = match &a.strategies {
        Some(names) => names.iter().map(|s| Strategy::from_str(s.trim())).collect::<pauliblad::Result<Vec<_>>>()?,
        None => Strategy::ALL.into_iter().filter(|s| *s != Strategy::CpProjected || a.n <= MAX_CP_QUBITS).collect(),
    };
    let connectivity = match &a.edges {
        Some(e) => parse_edges(e)?,
        None => (1..a.n).map(|q| (q - 1, q)).collect(),
    };
    Ok(LearnConfig {
        n: a.n,
        connectivity,
        depths: a.depths.clone(),
        shots: a.shots,
        spam_range: DEFAULT_SPAM_RANGE,
        seed: cli.seed,
        strategies,
        holdout_power: a.holdout_power,
    })
}

pub fn learn_demo(cli: &Cli, a: &LearnArgs, out: &mut Output) -> Result<u8> {
    let truth = match a.truth.as_str() {
        "builtin" => learning::builtin_truth(a.n)?,
        path => load_generator(std::path::Path::new(path))?,
    };
    if truth.num_qubits() != a.n {
        bail!("truth acts on {} qubits, --n is {}", truth.num_qubits(), a.n);
    }
    let cfg = learn_config(cli, a)?;
    let report = learning::run_learning(&truth, &cfg)?;
    let mut order: Vec<&learning::FitResult> = report.fits.iter().collect();
    order.sort_by(|x, y| x.holdout_mae.total_cmp(&y.holdout_mae));
    let result = LearnOutput {
        format: FORMAT.to_string(),
        n: cfg.n,
        connectivity: cfg.connectivity.clone(),
        depths: cfg.depths.clone(),
        shots: cfg.shots,
        seed: cfg.seed,
        truth: GeneratorFile::from(&truth),
        training_paulis: report.training.len(),
        holdout_paulis: report.holdout.len(),
        failures: report.failures.iter().map(|(pauli, reason)| FailureRecord { pauli: *pauli, reason: reason.clone() }).collect(),
        fits: report.fits.iter().map(FitRecord::from).collect(),
        mae_ordering: order.iter().map(|f| f.strategy).collect(),
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => out.emit("learn.json", &json_text(&result)?)?,
        Format::Csv => {
            let header: Vec<String> =
                ["strategy", "residual", "holdout_mae", "holdout_mae_truth", "rank_deficient", "terms"]
                    .map(String::from)
                    .to_vec();
            let rows = report.fits.iter().map(|f| {
                vec![
                    f.strategy.name().to_string(),
                    fmt_float(f.residual),
                    fmt_float(f.holdout_mae),
                    fmt_float(f.holdout_mae_truth),
                    f.rank_deficient.to_string(),
                    f.rates.len().to_string(),
                ]
            });
            out.emit("learn.csv", &csv_text(&header, rows)?)?
        }
    }
    out.side_file("dataset.json", &(report.dataset.to_json() + "\n"))?;
    Ok(0)
}
