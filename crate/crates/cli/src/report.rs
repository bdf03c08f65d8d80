use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use qdt_core::{Bounds, Certificate};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

/// Output of one command: certificates sorted by name plus free-form details.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub command: String,
    pub subject: String,
    pub passed: bool,
    pub certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: impl Into<String>, subject: impl Into<String>) -> Self {
        Self {
            format_version: REPORT_VERSION,
            command: command.into(),
            subject: subject.into(),
            passed: true,
            certificates: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn detail(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.details.insert(key.into(), value.into());
    }

    pub fn finish(mut self) -> Self {
        self.certificates.sort_by(|a, b| a.check.cmp(&b.check));
        self.passed = self.certificates.iter().all(Certificate::passed);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Human => self.human(),
        }
    }

    fn human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.subject);
        for c in &self.certificates {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            let _ = write!(out, "  {status}  {}", c.check);
            let b = bounds(&c.bounds);
            if !b.is_empty() {
                let _ = write!(out, "  [{b}]");
            }
            if let Some(ms) = c.elapsed_ms {
                let _ = write!(out, "  {ms} ms");
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "        witness: {w}");
            }
        }
        for (k, v) in &self.details {
            let _ = writeln!(out, "  {k}: {v}");
        }
        let failed = self.certificates.iter().filter(|c| !c.passed()).count();
        let _ = writeln!(out, "{} of {} checks passed", self.certificates.len() - failed, self.certificates.len());
        out
    }
}

fn bounds(b: &Bounds) -> String {
    let mut parts = Vec::new();
    if let Some(n) = b.word_length {
        parts.push(format!("N={n}"));
    }
    if let Some(k) = b.hbar_cutoff {
        parts.push(format!("K={k}"));
    }
    if let Some(m) = b.nilpotency {
        parts.push(format!("M={m}"));
    }
    parts.join(" ")
}
