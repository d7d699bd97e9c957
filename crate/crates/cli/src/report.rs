//! Reports, in a machine form (JSON) and a text form carrying the same groups.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use coloc_core::specpage::{AbutmentReport, Grading};
use coloc_core::FGAbGroup;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub at: Vec<i64>,
    pub group: FGAbGroup,
}

/// Every spot of the window is listed, zero groups included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub axes: Vec<String>,
    pub entries: Vec<Entry>,
}

impl Table {
    pub fn new(name: &str, axes: &[&str]) -> Self {
        Table {
            name: name.into(),
            axes: axes.iter().map(|a| a.to_string()).collect(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, at: Vec<i64>, group: FGAbGroup) {
        self.entries.push(Entry { at, group });
    }

    pub fn get(&self, at: &[i64]) -> Option<&FGAbGroup> {
        self.entries.iter().find(|e| e.at == at).map(|e| &e.group)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.group.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub entries: usize,
    /// Entries backed by a regular-sequence or grading-bound argument rather
    /// than only by stable transition maps.
    pub proved: usize,
    pub stable_steps: u32,
    pub highest_power: u32,
    pub regular_sequence: bool,
    pub grading_bound: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseSummary {
    pub grading: Grading,
    pub collapsed: bool,
    pub obstructions: Vec<(u32, i32, i64)>,
    pub nonzero_columns: Vec<i32>,
    pub rational_columns: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub job: serde_json::Value,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certification: Option<Certification>,
    /// Named verifications performed during the run.
    pub checks: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse: Option<CollapseSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abutment: Option<AbutmentReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

impl Report {
    pub fn new(command: &str, job: serde_json::Value) -> Self {
        Report {
            command: command.into(),
            job,
            tables: Vec::new(),
            certification: None,
            checks: BTreeMap::new(),
            collapse: None,
            abutment: None,
            notes: Vec::new(),
            exit_code: 0,
            seconds: None,
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, ok)| !**ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Exit status 1 when a check failed and nothing more specific was set.
    pub fn settle(&mut self) {
        if self.exit_code == 0 && !self.failed_checks().is_empty() {
            self.exit_code = 1;
        }
    }

    pub fn from_machine(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::Validation(format!("report: {e}")))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    /// Coefficient field of the run, if any; groups are then printed as vector spaces.
    fn field(&self) -> Option<String> {
        if self.command == "equivariant" {
            return Some("Q".into());
        }
        let s = self.job.get("ring")?.get("scalars")?.as_str()?;
        (s != "Z").then(|| s.to_string())
    }

    fn to_text(&self) -> String {
        let field = self.field();
        let show = |g: &FGAbGroup| match &field {
            None => g.to_string(),
            Some(_) if g.is_zero() => "0".to_string(),
            Some(k) if g.free_rank() == 1 => k.clone(),
            Some(k) => format!("{k}^{}", g.free_rank()),
        };
        let mut out = String::new();
        let name = match (self.job.get("name"), self.job.get("builder")) {
            (Some(n), _) => n.as_str().unwrap_or_default().to_string(),
            (None, Some(b)) => format!("{} n={}", b.as_str().unwrap_or_default(), self.job["n"]),
            (None, None) => "(unnamed)".to_string(),
        };
        let _ = writeln!(out, "coloc {}: {}", self.command, name);
        if let Some(w) = self.job.get("window") {
            let _ = writeln!(out, "window [{}, {}]", w["min"], w["max"]);
        }
        for t in &self.tables {
            let _ = writeln!(out);
            let _ = writeln!(out, "{}  ({})", t.name, t.axes.join(", "));
            let mut zeros = 0;
            for e in &t.entries {
                if e.group.is_zero() {
                    zeros += 1;
                    continue;
                }
                let at: Vec<String> = e.at.iter().map(|x| format!("{x:>4}")).collect();
                let _ = writeln!(out, "  {}  {}", at.join(" "), show(&e.group));
            }
            let _ = writeln!(out, "  zero at the other {zeros} spots");
        }
        if let Some(c) = &self.certification {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "stabilized: {} entries over {} steps, highest Koszul power {}",
                c.entries, c.stable_steps, c.highest_power
            );
            let _ = writeln!(
                out,
                "proved outright: {} of {} (regular sequence: {}, grading bound: {})",
                c.proved,
                c.entries,
                yes_no(c.regular_sequence),
                c.grading_bound
                    .map_or_else(|| "none".to_string(), |b| b.to_string())
            );
            if c.proved < c.entries {
                let _ = writeln!(
                    out,
                    "warning: {} entries rest on stabilization alone",
                    c.entries - c.proved
                );
            }
        }
        if let Some(c) = &self.collapse {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "collapse by position: {}  ({:?} grading)",
                yes_no(c.collapsed),
                c.grading
            );
            let _ = writeln!(out, "nonzero columns: {:?}", c.nonzero_columns);
            let _ = writeln!(out, "nonzero columns over Q: {:?}", c.rational_columns);
            for (r, p, q) in &c.obstructions {
                let _ = writeln!(out, "  possible d{r} out of ({p}, {q})");
            }
        }
        if let Some(a) = &self.abutment {
            let _ = writeln!(out);
            let _ = writeln!(out, "abutment by total degree:");
            for (s, t) in &a.degrees {
                if t.associated_graded.is_zero() && t.target.as_ref().is_none_or(|g| g.is_zero()) {
                    continue;
                }
                let target = t.target.as_ref().map_or_else(|| "-".to_string(), show);
                let _ = writeln!(
                    out,
                    "  {:>4}  graded {}  target {}  {:?}",
                    s,
                    show(&t.associated_graded),
                    target,
                    t.verdict
                );
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out);
            for (k, ok) in &self.checks {
                let _ = writeln!(out, "{} {}", if *ok { "ok  " } else { "FAIL" }, k);
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(s) = self.seconds {
            let _ = writeln!(out, "time {s:.3} s");
        }
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
