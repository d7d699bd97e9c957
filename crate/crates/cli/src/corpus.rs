//! The bundled example jobs and their golden reports.

use std::time::Instant;

use crate::commands::{cmd_equivariant, cmd_lc, cmd_page, cmd_triangle};
use crate::error::CliError;
use crate::job::{BuilderSpec, JobSpec};
use crate::report::{Format, Report};
use crate::suite::{module_suites, snf_suite, Outcome, SuiteConfig};

pub const STIEFEL: &str = include_str!("../corpus/stiefel.json");
pub const QV: &str = include_str!("../corpus/qv.json");
pub const F2UY: &str = include_str!("../corpus/f2uy.json");
pub const RP2N: &str = include_str!("../corpus/rp2n.json");
pub const SUITE: &str = include_str!("../corpus/suite.json");

#[derive(Clone, Copy, Debug)]
pub struct GoldenCase {
    pub name: &'static str,
    pub command: &'static str,
    pub input: &'static str,
    pub golden: &'static str,
}

pub const GOLDEN: &[GoldenCase] = &[
    GoldenCase {
        name: "stiefel.lc",
        command: "lc",
        input: STIEFEL,
        golden: include_str!("../corpus/golden/stiefel.lc.json"),
    },
    GoldenCase {
        name: "qv.lc",
        command: "lc",
        input: QV,
        golden: include_str!("../corpus/golden/qv.lc.json"),
    },
    GoldenCase {
        name: "f2uy.lc",
        command: "lc",
        input: F2UY,
        golden: include_str!("../corpus/golden/f2uy.lc.json"),
    },
    GoldenCase {
        name: "stiefel.page",
        command: "page",
        input: STIEFEL,
        golden: include_str!("../corpus/golden/stiefel.page.json"),
    },
    GoldenCase {
        name: "qv.triangle",
        command: "triangle",
        input: QV,
        golden: include_str!("../corpus/golden/qv.triangle.json"),
    },
    GoldenCase {
        name: "rp2n.equivariant",
        command: "equivariant",
        input: RP2N,
        golden: include_str!("../corpus/golden/rp2n.equivariant.json"),
    },
];

impl GoldenCase {
    /// The report without timing, so it can be compared byte for byte.
    pub fn run(&self) -> Result<Report, CliError> {
        match self.command {
            "equivariant" => cmd_equivariant(&BuilderSpec::from_json(self.input)?),
            cmd => {
                let spec = JobSpec::from_json(self.input)?;
                match cmd {
                    "lc" => cmd_lc(&spec),
                    "page" => cmd_page(&spec, None),
                    "triangle" => cmd_triangle(&spec),
                    other => Err(CliError::Validation(format!("unknown command {other}"))),
                }
            }
        }
    }

    pub fn matches(&self) -> Result<bool, CliError> {
        Ok(self.run()?.render(Format::Machine) == self.golden)
    }
}

pub fn suite_config() -> SuiteConfig {
    SuiteConfig::from_json(SUITE).expect("bundled suite config parses")
}

/// The suites grouped by property: (a) Smith form, (b) radical and Čech,
/// (c) vanishing, (d) exactness, (e) grading bound.
pub fn suites_by_property(cfg: &SuiteConfig) -> Vec<(&'static str, Vec<Outcome>)> {
    let m = module_suites(cfg);
    vec![
        ("a", vec![snf_suite(cfg)]),
        ("b", vec![m.radical, m.cech]),
        ("c", vec![m.vanishing]),
        ("d", vec![m.exactness]),
        ("e", vec![m.grading_bound]),
    ]
}

pub fn all_suites(cfg: &SuiteConfig) -> Vec<Outcome> {
    suites_by_property(cfg)
        .into_iter()
        .flat_map(|(_, o)| o)
        .collect()
}

pub fn cmd_check(cfg: &SuiteConfig) -> Report {
    let start = Instant::now();
    let mut report = Report::new(
        "check",
        serde_json::to_value(cfg).expect("config serializes"),
    );
    for case in GOLDEN {
        let ok = match case.matches() {
            Ok(ok) => ok,
            Err(e) => {
                report.notes.push(format!("{}: {e}", case.name));
                false
            }
        };
        report.checks.insert(format!("golden {}", case.name), ok);
    }
    for o in all_suites(cfg) {
        report.notes.push(format!(
            "{}: {} inputs, {} comparisons, {} failures, {:.1} s",
            o.name,
            o.cases,
            o.checks,
            o.failures.len(),
            o.seconds
        ));
        for f in o.failures.iter().take(5) {
            report.notes.push(format!("  {f}"));
        }
        report
            .checks
            .insert(format!("suite {}", o.name), o.passed());
    }
    report.seconds = Some(start.elapsed().as_secs_f64());
    report.settle();
    report
}
