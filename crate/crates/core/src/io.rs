//! Versioned JSON formats and number formatting shared by every output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{PauliChannel, PseudoLindblad};
use crate::pauli::PauliOp;

pub const FORMAT: &str = "pauliblad/v1";

/// 17 significant digits, '.' decimal, so text outputs are byte-stable.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn check_format(found: &str) -> Result<()> {
    if found == FORMAT {
        Ok(())
    } else {
        Err(Error::Format(found.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub pauli: PauliOp,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub format: String,
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub format: String,
    pub n: usize,
    pub probs: Vec<f64>,
}

impl From<&PseudoLindblad> for GeneratorFile {
    fn from(g: &PseudoLindblad) -> Self {
        Self {
            format: FORMAT.to_string(),
            n: g.num_qubits(),
            terms: g.terms().map(|(p, v)| TermRecord { pauli: *p, re: v.re, im: v.im }).collect(),
        }
    }
}

impl TryFrom<GeneratorFile> for PseudoLindblad {
    type Error = Error;

    fn try_from(file: GeneratorFile) -> Result<Self> {
        check_format(&file.format)?;
        PseudoLindblad::from_terms(file.n, file.terms.into_iter().map(|t| (t.pauli, Complex64::new(t.re, t.im))))
    }
}

impl From<&PauliChannel> for ChannelFile {
    fn from(ch: &PauliChannel) -> Self {
        Self { format: FORMAT.to_string(), n: ch.num_qubits(), probs: ch.probs().to_vec() }
    }
}

impl TryFrom<ChannelFile> for PauliChannel {
    type Error = Error;

    fn try_from(file: ChannelFile) -> Result<Self> {
        check_format(&file.format)?;
        PauliChannel::new(file.n, file.probs)
    }
}

impl PseudoLindblad {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GeneratorFile::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<GeneratorFile>(s)?.try_into()
    }
}

impl PauliChannel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ChannelFile::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<ChannelFile>(s)?.try_into()
    }
}

/// Either model file, distinguished by its fields.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelFile {
    Channel(PauliChannel),
    Generator(PseudoLindblad),
}

impl ModelFile {
    pub fn parse(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        if value.get("probs").is_some() {
            Ok(ModelFile::Channel(serde_json::from_value::<ChannelFile>(value)?.try_into()?))
        } else if value.get("terms").is_some() {
            Ok(ModelFile::Generator(serde_json::from_value::<GeneratorFile>(value)?.try_into()?))
        } else {
            Err(Error::Format("neither a channel nor a generator file".into()))
        }
    }
}
