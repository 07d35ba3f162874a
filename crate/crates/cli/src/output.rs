//! CSV emission with a `#` metadata block, and anchor bookkeeping.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::devices::LoadedDevice;

/// Provenance echoed at the top of every CSV.
#[derive(Debug, Clone)]
pub struct Metadata {
    pub devices: Vec<(String, String)>,
    pub seed: u64,
    pub command_line: String,
}

impl Metadata {
    pub fn new(devices: &[&LoadedDevice], seed: u64, command_line: &str) -> Metadata {
        Metadata {
            devices: devices.iter().map(|d| (d.source.clone(), d.sha256.clone())).collect(),
            seed,
            command_line: command_line.to_string(),
        }
    }

    pub fn header(&self) -> String {
        let mut out = format!("# zzsim {}\n", env!("CARGO_PKG_VERSION"));
        for (source, hash) in &self.devices {
            out.push_str(&format!("# device {source} sha256={hash}\n"));
        }
        out.push_str(&format!("# seed {}\n", self.seed));
        out.push_str(&format!("# command {}\n", self.command_line));
        out
    }
}

/// Shortest round-trip representation, in exponent form for very small or
/// large magnitudes; NaN for missing values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn render_csv(meta: &Metadata, columns: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(columns)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let body = String::from_utf8(writer.into_inner().context("flushing CSV")?)?;
    Ok(meta.header() + &body)
}

/// A computed value compared against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
    pub note: Option<String>,
}

impl Anchor {
    pub fn within(name: impl Into<String>, computed: f64, expected: f64, tol: f64, unit: &str) -> Anchor {
        Anchor {
            name: name.into(),
            expected: format!("{expected} ± {tol} {unit}").trim_end().to_string(),
            computed: format!("{computed:.6} {unit}").trim_end().to_string(),
            pass: (computed - expected).abs() <= tol,
            note: None,
        }
    }

    pub fn check(name: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>, pass: bool) -> Anchor {
        Anchor { name: name.into(), expected: expected.into(), computed: computed.into(), pass, note: None }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, err: &anyhow::Error) -> Anchor {
        Anchor {
            name: name.into(),
            expected: "evaluation".into(),
            computed: "error".into(),
            pass: false,
            note: Some(format!("{err:#}")),
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  {}: {} (expected {})", self.name, self.computed, self.expected)?;
        if let Some(note) = &self.note {
            write!(f, " [{note}]")?;
        }
        Ok(())
    }
}

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Report {
    /// Text for stdout.
    pub text: String,
    pub files: Vec<PathBuf>,
    pub anchors: Vec<Anchor>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.anchors.iter().all(|a| a.pass)
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    /// Write `content` under `out_dir`, or append it to stdout when no path is given.
    pub fn emit(&mut self, out_dir: &Path, path: Option<&Path>, content: &str) -> anyhow::Result<()> {
        match path {
            Some(p) => {
                let full = if p.is_absolute() { p.to_path_buf() } else { out_dir.join(p) };
                if let Some(parent) = full.parent() {
                    std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
                }
                std::fs::write(&full, content).with_context(|| format!("writing {}", full.display()))?;
                self.files.push(full);
            }
            None => self.text.push_str(content),
        }
        Ok(())
    }
}
