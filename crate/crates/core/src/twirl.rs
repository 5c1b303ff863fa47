//! Pauli-twirled noise of three gates: a Hadamard with a timing error, an
//! `X_pi` pulse with amplitude and off-axis errors, and a `ZZ_{pi/2}` gate
//! with amplitude damping on both qubits.
//!
//! Each gate is available in closed form and through a numerical route:
//! evolve the noisy gate, strip the ideal gate off (`E = G^{-1} o G~`, the
//! error acting first) and read the diagonal of the Pauli transfer matrix.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::{principal_ln, MarkovClass, PauliChannel, PseudoLindblad, DEFAULT_LOG_TOL};
use crate::linalg::{DenseOperator, Superoperator};
use crate::pauli::{dimension, PauliOp};
use crate::wht::{SpectrumKind, SpectrumVector};

const UNITARY_TOL: f64 = 1e-10;
const TP_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pauli(label: &str) -> PauliOp {
    label.parse().expect("static label")
}

fn ln(x: f64) -> Complex64 {
    principal_ln(c(x))
}

/// Where the extracted error channel sits relative to the ideal gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ErrorPlacement {
    /// `noisy = G o E`, so `E = G^{-1} o noisy`.
    #[default]
    BeforeGate,
    /// `noisy = E o G`, so `E = noisy o G^{-1}`.
    AfterGate,
}

/// Diagonal PTM of the error channel `G^{-1} o noisy` for an ideal unitary `G`.
pub fn twirl_fidelities(noisy: &Superoperator, ideal: &DenseOperator, n: usize) -> Result<SpectrumVector> {
    twirl_fidelities_at(noisy, ideal, n, ErrorPlacement::BeforeGate)
}

/// Diagonal PTM of the error channel for either placement.
///
/// The two placements differ by conjugation with `G`, which permutes Pauli
/// labels: `f_P(before) = f_{G P G^dag}(after)`.
pub fn twirl_fidelities_at(
    noisy: &Superoperator,
    ideal: &DenseOperator,
    n: usize,
    placement: ErrorPlacement,
) -> Result<SpectrumVector> {
    let d = 1usize << n;
    if ideal.dim() != d || noisy.matrix().dim() != d * d {
        return Err(Error::Dimension(format!(
            "expected a {d}-dimensional gate and a {}-dimensional superoperator",
            d * d
        )));
    }
    let defect = ideal.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let tp = noisy.trace_defect();
    if tp > TP_TOL {
        return Err(Error::NotTracePreserving(tp));
    }
    let undo = Superoperator::unitary(&ideal.adjoint());
    let error = match placement {
        ErrorPlacement::BeforeGate => noisy.compose(&undo),
        ErrorPlacement::AfterGate => undo.compose(noisy),
    };
    let values = PauliOp::all(n)
        .map(|p| {
            let op = DenseOperator::pauli(&p);
            let image = error.apply(&op);
            (&op * &image).trace() / d as f64
        })
        .collect();
    SpectrumVector::new(n, values, SpectrumKind::Fidelities)
}

/// Twirled error of a unitary gate implementation.
pub fn twirl_unitary(noisy: &DenseOperator, ideal: &DenseOperator, n: usize) -> Result<SpectrumVector> {
    twirl_fidelities(&Superoperator::unitary(noisy), ideal, n)
}

fn expi(h: &DenseOperator, t: f64) -> DenseOperator {
    h.scale(Complex64::new(0.0, -t)).exp()
}

fn op(label: &str) -> DenseOperator {
    DenseOperator::pauli(&pauli(label))
}

fn rates_from_pairs(n: usize, pairs: &[(&str, Complex64)]) -> Result<PseudoLindblad> {
    PseudoLindblad::from_terms(n, pairs.iter().map(|(l, v)| (pauli(l), *v)))
}

// ---------------------------------------------------------------------------
// Hadamard with timing error

/// Error probability `p = sin^2(Omega dt) / 2` of the twirled Hadamard.
pub fn hadamard_error_probability(omega_dt: f64) -> f64 {
    0.5 * omega_dt.sin().powi(2)
}

/// Closed-form channel `(1-2p) rho + p X rho X + p Z rho Z` and its rates.
///
/// For `p > 1/4` the rates are complex; `p = 1/4` has a zero fidelity.
pub fn hadamard_channel(p: f64) -> Result<(PauliChannel, PseudoLindblad)> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Parameter(format!("Hadamard error probability {p} outside [0, 1/2)")));
    }
    let ch = PauliChannel::from_errors(1, &[(pauli("X"), p), (pauli("Z"), p)])?;
    let f_y = 1.0 - 4.0 * p;
    if f_y.abs() < DEFAULT_LOG_TOL {
        return Err(Error::SingularFidelity { pauli: pauli("Y"), value: f_y.abs() });
    }
    let lx = -0.25 * ln(1.0 - 4.0 * p);
    let ly = -0.5 * ln(1.0 - 2.0 * p) + 0.25 * ln(1.0 - 4.0 * p);
    let g = rates_from_pairs(1, &[("X", lx), ("Y", ly), ("Z", lx)])?;
    Ok((ch, g))
}

/// Numerical route: `H1 = Omega (X + Z) / sqrt 2`, ideal at `Omega t = pi/2`, run for `t + dt`.
pub fn hadamard_numeric(omega: f64, dt: f64) -> Result<SpectrumVector> {
    if omega <= 0.0 {
        return Err(Error::Parameter("drive strength must be positive".into()));
    }
    let h1 = (&op("X") + &op("Z")).scale(c(omega * FRAC_1_SQRT_2));
    let t = FRAC_PI_2 / omega;
    twirl_unitary(&expi(&h1, t + dt), &expi(&h1, t), 1)
}

// ---------------------------------------------------------------------------
// X_pi with amplitude and off-axis error

/// Normalized rotation frequency `zeta = sqrt((1 + dx)^2 + dz^2)`.
pub fn xpi_zeta(dx: f64, dz: f64) -> f64 {
    ((1.0 + dx).powi(2) + dz * dz).sqrt()
}

/// Closed-form fidelities `(f_I, f_X, f_Y, f_Z)`.
pub fn xpi_fidelities(dx: f64, dz: f64) -> SpectrumVector {
    let zeta = xpi_zeta(dx, dz);
    let cz = (PI * zeta).cos();
    let a = (1.0 + dx).powi(2);
    let z2 = zeta * zeta;
    let f = [1.0, (a + cz * dz * dz) / z2, -cz, -(cz * a + dz * dz) / z2];
    SpectrumVector::from_real(1, &f, SpectrumKind::Fidelities).expect("length 4")
}

/// Closed-form fidelities and rates of the twirled `X_pi` error.
pub fn xpi_channel(dx: f64, dz: f64) -> Result<(SpectrumVector, PseudoLindblad)> {
    let f = xpi_fidelities(dx, dz);
    for (i, v) in f.values().iter().enumerate() {
        if v.norm() < DEFAULT_LOG_TOL {
            return Err(Error::SingularFidelity { pauli: PauliOp::from_index(i, 1)?, value: v.norm() });
        }
    }
    let zeta = xpi_zeta(dx, dz);
    let cz = (PI * zeta).cos();
    let a = (1.0 + dx).powi(2);
    let l_a = ln(a + cz * dz * dz);
    let l_b = ln(-cz);
    let l_c = ln(-cz * a - dz * dz);
    let l_z = ln(a + dz * dz);
    let lx = 0.25 * l_a - 0.25 * l_b - 0.25 * l_c;
    let ly = 0.25 * l_b - 0.25 * l_c - 0.25 * l_a + 0.5 * l_z;
    let lz = -0.25 * l_b + 0.25 * l_c - 0.25 * l_a;
    Ok((f, rates_from_pairs(1, &[("X", lx), ("Y", ly), ("Z", lz)])?))
}

/// Numerical route: `H = (1 + dx) X + dz Z` (units of `Omega`) for `t = pi/2`.
pub fn xpi_numeric(dx: f64, dz: f64) -> Result<SpectrumVector> {
    let h = &op("X").scale(c(1.0 + dx)) + &op("Z").scale(c(dz));
    let ideal = expi(&op("X"), FRAC_PI_2);
    twirl_unitary(&expi(&h, FRAC_PI_2), &ideal, 1)
}

// ---------------------------------------------------------------------------
// ZZ_{pi/2} with amplitude damping

const ZZ_GROUP_A: [&str; 4] = ["IX", "IY", "XI", "YI"];
const ZZ_GROUP_B: [&str; 6] = ["IZ", "XX", "XY", "YX", "YY", "ZI"];
const ZZ_GROUP_C: [&str; 4] = ["XZ", "YZ", "ZX", "ZY"];

/// Closed-form twirled fidelities as a function of `delta_kappa = kappa / 4J`.
pub fn zz_t1_fidelities(dk: f64) -> SpectrumVector {
    let e = (PI * dk).exp();
    let fa = (-1.5 * PI * dk).exp() * (e + 1.0) / (2.0 * (dk * dk + 1.0));
    let fb = (-PI * dk).exp();
    let fc = fa * (2.0 * dk * dk + 1.0);
    let fzz = (-2.0 * PI * dk).exp();
    let mut f = vec![0.0; 16];
    f[0] = 1.0;
    for l in ZZ_GROUP_A {
        f[pauli(l).index()] = fa;
    }
    for l in ZZ_GROUP_B {
        f[pauli(l).index()] = fb;
    }
    for l in ZZ_GROUP_C {
        f[pauli(l).index()] = fc;
    }
    f[pauli("ZZ").index()] = fzz;
    SpectrumVector::from_real(2, &f, SpectrumKind::Fidelities).expect("length 16")
}

/// Closed-form fidelities and rates; the six group-B rates vanish exactly.
pub fn zz_t1_channel(dk: f64) -> Result<(SpectrumVector, PseudoLindblad)> {
    if !(dk >= 0.0) {
        return Err(Error::Parameter(format!("damping ratio {dk} must be non-negative")));
    }
    let l2 = (2.0 * dk * dk + 1.0).ln();
    let la = c((PI * dk - l2) / 8.0);
    let lc = c((PI * dk + l2) / 8.0);
    let lzz = 0.25 * (4f64.ln() + PI * dk - 2.0 * (PI * dk).exp().ln_1p() + 2.0 * (dk * dk).ln_1p() - l2);
    let mut pairs: Vec<(&str, Complex64)> = Vec::new();
    pairs.extend(ZZ_GROUP_A.iter().map(|l| (*l, la)));
    pairs.extend(ZZ_GROUP_C.iter().map(|l| (*l, lc)));
    pairs.push(("ZZ", c(lzz)));
    Ok((zz_t1_fidelities(dk), rates_from_pairs(2, &pairs)?))
}

/// Fourth-order expansions of `(lambda_IX, lambda_XZ, lambda_ZZ)` in `delta_kappa`.
pub fn zz_t1_series(dk: f64) -> (f64, f64, f64) {
    let d2 = dk * dk;
    let d4 = d2 * d2;
    let ix = PI * dk / 8.0 - d2 / 4.0 + d4 / 4.0;
    let xz = PI * dk / 8.0 + d2 / 4.0 - d4 / 4.0;
    let zz = -PI * PI * d2 / 16.0 + (96.0 + PI.powi(4)) * d4 / 384.0;
    (ix, xz, zz)
}

/// Numerical route: propagate `-iJ[ZZ, rho] + kappa D[sigma^-]` on both qubits to `Jt = pi/4`.
///
/// The closed-form groups hold with the error after the gate; with the error
/// before it, the `IX`-type and `XZ`-type groups trade places.
pub fn zz_t1_numeric(dk: f64) -> Result<SpectrumVector> {
    zz_t1_numeric_at(1.0, dk, ErrorPlacement::AfterGate)
}

/// Numerical route at coupling `j`, with `kappa = 4 j dk`.
pub fn zz_t1_numeric_at(j: f64, dk: f64, placement: ErrorPlacement) -> Result<SpectrumVector> {
    if !(dk >= 0.0) {
        return Err(Error::Parameter(format!("damping ratio {dk} must be non-negative")));
    }
    if !(j > 0.0) {
        return Err(Error::Parameter(format!("coupling {j} must be positive")));
    }
    let kappa = 4.0 * j * dk;
    let t = FRAC_PI_4 / j;
    let zero = c(0.0);
    let lower = DenseOperator::from_row_major(2, &[zero, c(1.0), zero, zero])?;
    let id = DenseOperator::identity(2);
    let zz = op("ZZ").scale(c(j));
    let jumps = [(kappa, lower.kron(&id)), (kappa, id.kron(&lower))];
    let generator = Superoperator::lindbladian(&zz, &jumps);
    let noisy = Superoperator::from_matrix(generator.matrix().scale(c(t))).exp();
    twirl_fidelities_at(&noisy, &expi(&zz, t), 2, placement)
}

// ---------------------------------------------------------------------------
// Scans

/// One gate at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum GateNoise {
    /// Hadamard over-rotation parameterized by `Omega dt`.
    Hadamard { omega_dt: f64 },
    XPi { dx: f64, dz: f64 },
    ZzT1 { dkappa: f64 },
}

impl GateNoise {
    pub fn variant_name(&self) -> &'static str {
        match self {
            GateNoise::Hadamard { .. } => "hadamard",
            GateNoise::XPi { .. } => "xpi",
            GateNoise::ZzT1 { .. } => "zz-t1",
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            GateNoise::ZzT1 { .. } => 2,
            _ => 1,
        }
    }

    /// Named parameters in a fixed order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            GateNoise::Hadamard { omega_dt } => vec![("omega_dt", omega_dt), ("p", hadamard_error_probability(omega_dt))],
            GateNoise::XPi { dx, dz } => vec![("dx", dx), ("dz", dz)],
            GateNoise::ZzT1 { dkappa } => vec![("dkappa", dkappa)],
        }
    }

    /// Closed-form fidelities and rates.
    pub fn closed_form(&self) -> Result<(SpectrumVector, PseudoLindblad)> {
        match *self {
            GateNoise::Hadamard { omega_dt } => {
                let (ch, g) = hadamard_channel(hadamard_error_probability(omega_dt))?;
                Ok((ch.fidelities(), g))
            }
            GateNoise::XPi { dx, dz } => xpi_channel(dx, dz),
            GateNoise::ZzT1 { dkappa } => zz_t1_channel(dkappa),
        }
    }

    /// Closed-form fidelities only; defined even where the rates are singular.
    pub fn closed_form_fidelities(&self) -> SpectrumVector {
        match *self {
            GateNoise::Hadamard { omega_dt } => {
                let p = hadamard_error_probability(omega_dt);
                SpectrumVector::from_real(1, &[1.0, 1.0 - 2.0 * p, 1.0 - 4.0 * p, 1.0 - 2.0 * p], SpectrumKind::Fidelities)
                    .expect("length 4")
            }
            GateNoise::XPi { dx, dz } => xpi_fidelities(dx, dz),
            GateNoise::ZzT1 { dkappa } => zz_t1_fidelities(dkappa),
        }
    }

    /// Evolve-extract-twirl fidelities.
    pub fn numeric_fidelities(&self) -> Result<SpectrumVector> {
        match *self {
            GateNoise::Hadamard { omega_dt } => hadamard_numeric(1.0, omega_dt),
            GateNoise::XPi { dx, dz } => xpi_numeric(dx, dz),
            GateNoise::ZzT1 { dkappa } => zz_t1_numeric(dkappa),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateScanRow {
    pub noise: GateNoise,
    pub fidelities: Vec<f64>,
    /// Dense non-identity rates in index order; `None` where a fidelity vanishes.
    pub rates: Option<Vec<Complex64>>,
    pub class: Option<MarkovClass>,
}

impl GateScanRow {
    pub fn csv_header(noise: &GateNoise) -> Vec<String> {
        let n = noise.num_qubits();
        let mut h = vec!["variant".to_string()];
        h.extend(noise.parameters().iter().map(|(k, _)| k.to_string()));
        for p in PauliOp::all(n) {
            h.push(format!("f_{p}"));
        }
        for p in PauliOp::all(n).skip(1) {
            h.push(format!("re_lambda_{p}"));
            h.push(format!("im_lambda_{p}"));
        }
        h.push("classification".into());
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        use crate::io::fmt_float as f;
        let mut r = vec![self.noise.variant_name().to_string()];
        r.extend(self.noise.parameters().iter().map(|(_, v)| f(*v)));
        r.extend(self.fidelities.iter().map(|v| f(*v)));
        let count = dimension(self.noise.num_qubits()) - 1;
        match &self.rates {
            Some(rates) => {
                for v in rates {
                    r.push(f(v.re));
                    r.push(f(v.im));
                }
            }
            None => r.extend(std::iter::repeat_n("NaN".to_string(), 2 * count)),
        }
        r.push(self.class.map_or("Singular".to_string(), |c| c.to_string()));
        r
    }
}

pub fn gate_row(noise: &GateNoise) -> GateScanRow {
    let fidelities = noise.closed_form_fidelities().real_parts();
    match noise.closed_form() {
        Ok((_, g)) => {
            let rates = g.dense_rates()[1..].to_vec();
            let class = g.classify(0.0).class;
            GateScanRow { noise: *noise, fidelities, rates: Some(rates), class: Some(class) }
        }
        Err(_) => GateScanRow { noise: *noise, fidelities, rates: None, class: None },
    }
}

/// Rows in input order; points are evaluated in parallel.
pub fn gate_scan(points: &[GateNoise]) -> Vec<GateScanRow> {
    points.par_iter().map(gate_row).collect()
}
