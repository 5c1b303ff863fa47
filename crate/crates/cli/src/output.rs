//! Output sinks and the run manifest.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes into `--out` when given, otherwise to stdout.
pub struct Output {
    dir: Option<PathBuf>,
    written: Vec<String>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self { dir, written: Vec::new() })
    }

    /// The primary result of a command.
    pub fn emit(&mut self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(_) => self.side_file(name, contents),
            None => {
                print!("{contents}");
                Ok(())
            }
        }
    }

    /// Written only when an output directory is set.
    pub fn side_file(&mut self, name: &str, contents: &str) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn finish(self, manifest: RunManifest) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let manifest = RunManifest { outputs: self.written, ..manifest };
        let path = dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub command: String,
    /// Full argument vector, program name excluded.
    pub args: Vec<String>,
    pub seed: u64,
    pub threads: usize,
    pub version: String,
    pub started: String,
    pub finished: String,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: RunManifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if m.format != pauliblad::io::FORMAT {
            anyhow::bail!("unsupported manifest format {:?}", m.format);
        }
        Ok(m)
    }
}

/// Drops `--name value` and `--name=value` pairs.
pub fn strip_flags(args: &[String], names: &[&str]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if names.contains(&a.as_str()) {
            it.next();
        } else if !names.iter().any(|n| a.starts_with(&format!("{n}="))) {
            out.push(a.clone());
        }
    }
    out
}

pub fn csv_text(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}
