use std::collections::BTreeMap;
use std::time::Instant;

use coloc_core::colocal::{
    colocalization_triangle, grading_bound_check, local_cohomology, LocalCohomologyResult,
};
use coloc_core::equivariant::{fiber_page, idempotents, rp2n};
use coloc_core::specpage::{
    abutment, cohomology_by_total_degree, collapse_by_position, e2_page, uct_target, BigradedPage,
    Verdict,
};
use coloc_core::FGAbGroup;

use crate::error::CliError;
use crate::job::{BuilderSpec, Job, JobSpec, TargetSpec};
use crate::report::{Certification, CollapseSummary, Report, Table};

pub const LC_TABLE: &str = "H^i_I(M)<j>";
pub const CELL_TABLE: &str = "cell";
pub const MODULE_TABLE: &str = "module";
pub const NULL_TABLE: &str = "null";
pub const PAGE_TABLE: &str = "E2";

fn echo<T: serde::Serialize>(spec: &T) -> serde_json::Value {
    serde_json::to_value(spec).expect("job specs serialize")
}

fn lc_table(lc: &LocalCohomologyResult) -> Table {
    let mut t = Table::new(LC_TABLE, &["i", "j"]);
    for i in 0..=lc.ideal_size {
        for j in lc.window.degrees() {
            t.push(vec![i as i64, j], lc.group(i, j));
        }
    }
    t
}

fn certification(lc: &LocalCohomologyResult) -> Certification {
    Certification {
        entries: lc.entries.len(),
        proved: lc.entries.values().filter(|e| e.certified()).count(),
        stable_steps: lc.policy.stable_steps,
        highest_power: lc.final_power.values().copied().max().unwrap_or(0),
        regular_sequence: lc.regular_sequence,
        grading_bound: lc.grading_bound,
    }
}

fn lc_checks(report: &mut Report, lc: &LocalCohomologyResult) {
    report.checks.insert(
        "vanishing above the number of generators".into(),
        lc.vanishes_above_generators(),
    );
    if let Some(b) = lc.grading_bound {
        report
            .checks
            .insert("grading bound preserved".into(), grading_bound_check(lc, b));
    }
}

fn run_lc(job: &Job) -> Result<LocalCohomologyResult, CliError> {
    Ok(local_cohomology(
        &job.module,
        &job.ideal,
        job.spec.window,
        job.spec.policy,
    )?)
}

pub fn cmd_lc(spec: &JobSpec) -> Result<Report, CliError> {
    let job = spec.build()?;
    let lc = run_lc(&job)?;
    let mut report = Report::new("lc", echo(spec));
    report.tables.push(lc_table(&lc));
    report.certification = Some(certification(&lc));
    lc_checks(&mut report, &lc);
    report.settle();
    Ok(report)
}

pub fn cmd_triangle(spec: &JobSpec) -> Result<Report, CliError> {
    let job = spec.build()?;
    let tri = colocalization_triangle(&job.module, &job.ideal, spec.window, spec.policy)?;
    let mut report = Report::new("triangle", echo(spec));
    let m = job.ideal.len() as i64;
    let mut cell = Table::new(CELL_TABLE, &["p", "j"]);
    let mut module = Table::new(MODULE_TABLE, &["p", "j"]);
    let mut null = Table::new(NULL_TABLE, &["p", "j"]);
    let get = |t: &BTreeMap<(i32, i64), FGAbGroup>, p: i64, j: i64| {
        t.get(&(p as i32, j))
            .cloned()
            .unwrap_or_else(FGAbGroup::zero)
    };
    for p in -m..=0 {
        for j in spec.window.degrees() {
            cell.push(vec![p, j], get(&tri.cell, p, j));
            null.push(vec![p, j], get(&tri.null, p, j));
        }
    }
    for j in spec.window.degrees() {
        module.push(vec![0, j], get(&tri.module, 0, j));
    }
    report.tables.extend([cell, module, null]);
    report.certification = Some(certification(&tri.local));
    report
        .checks
        .insert("long exact sequence exact".into(), tri.les_verified);
    report
        .checks
        .insert("cell classes are torsion".into(), tri.cell_torsion_verified);
    lc_checks(&mut report, &tri.local);
    report.settle();
    Ok(report)
}

fn page_table(page: &BigradedPage) -> Table {
    let mut t = Table::new(PAGE_TABLE, &["p", "q"]);
    for p in page.p_range.0..=page.p_range.1 {
        for q in page.q_range.0..=page.q_range.1 {
            t.push(vec![p as i64, q], page.get(p, q));
        }
    }
    t
}

fn collapse_summary(page: &BigradedPage) -> CollapseSummary {
    let c = collapse_by_position(page);
    CollapseSummary {
        grading: page.grading,
        collapsed: c.collapsed,
        obstructions: c.obstructions,
        nonzero_columns: page.nonzero_columns(),
        rational_columns: page.rationalize().nonzero_columns(),
    }
}

/// Resolves a target description against the job it belongs to.
pub fn target_groups(job: &Job, target: &TargetSpec) -> BTreeMap<i64, FGAbGroup> {
    match target {
        TargetSpec::Table { degrees } => degrees.clone(),
        TargetSpec::RingHomology { shift } => {
            // Cohomological degree m lands at total degree -shift - m; cover
            // the window's lowest diagonal plus the page width.
            let reach = -shift - job.spec.window.min + job.ideal.len() as i64 + 1;
            let homology: BTreeMap<i64, FGAbGroup> = (0..=reach.max(0))
                .map(|d| (d, job.ring.degree_basis(d).group.clone()))
                .collect();
            cohomology_by_total_degree(&uct_target(&homology), *shift)
        }
    }
}

/// Attaches the collapse verdict and, when the page collapses, the abutment.
/// A `complete` target is zero wherever it has no entry.
fn finish_page(
    report: &mut Report,
    page: &BigradedPage,
    target: &BTreeMap<i64, FGAbGroup>,
    complete: bool,
    over_field: bool,
) {
    let summary = collapse_summary(page);
    let collapsed = summary.collapsed;
    report.collapse = Some(summary);
    if !collapsed {
        report.exit_code = 4;
        report
            .notes
            .push("page does not collapse by position; abutment withheld".into());
        return;
    }
    let mut ab = abutment(page, target, over_field).expect("collapsed pages have an abutment");
    if complete {
        let mut filled = target.clone();
        for s in ab.degrees.keys() {
            filled.entry(*s).or_insert_with(FGAbGroup::zero);
        }
        ab = abutment(page, &filled, over_field).expect("collapsed pages have an abutment");
    }
    if !target.is_empty() {
        let consistent = ab
            .degrees
            .values()
            .all(|t| t.verdict != Verdict::Inconsistent);
        report
            .checks
            .insert("abutment consistent with target".into(), consistent);
        let unchecked = ab
            .degrees
            .values()
            .filter(|t| t.verdict == Verdict::Unchecked)
            .count();
        if unchecked > 0 {
            report
                .notes
                .push(format!("{unchecked} total degrees have no target value"));
        }
    }
    report.abutment = Some(ab);
}

pub fn cmd_page(spec: &JobSpec, target: Option<&TargetSpec>) -> Result<Report, CliError> {
    let job = spec.build()?;
    let lc = run_lc(&job)?;
    let page = e2_page(&lc);
    let mut report = Report::new("page", echo(spec));
    report.tables.push(page_table(&page));
    report.certification = Some(certification(&lc));
    lc_checks(&mut report, &lc);
    report.checks.insert(
        "page respects grading bound".into(),
        page.respects_grading_bound(),
    );
    let chosen = target.or(spec.options.target.as_ref());
    let goal = chosen.map(|t| target_groups(&job, t)).unwrap_or_default();
    let complete = matches!(chosen, Some(TargetSpec::RingHomology { .. }));
    finish_page(
        &mut report,
        &page,
        &goal,
        complete,
        job.ring.scalars().is_field(),
    );
    report.settle();
    Ok(report)
}

pub const OMEGA_A_OMEGA: &str = "omega A omega";
pub const OMEGA_A: &str = "omega A";
pub const GROUP_OMEGA: &str = "Q[G] omega";

pub fn cmd_equivariant(spec: &BuilderSpec) -> Result<Report, CliError> {
    spec.validate()?;
    let (q_lo, q_hi) = (spec.window.min, spec.window.max);
    let odd = 2 * spec.n as i64 - 1;
    let top = (q_hi - q_lo).max(q_hi.abs()).max(q_lo.abs()) + 2 * odd;
    let ex = rp2n(spec.n, top)?;
    let fp = fiber_page(&ex.algebra, &ex.corner, &ex.fiber_homology, q_lo, q_hi)?;
    let mut report = Report::new("equivariant", echo(spec));
    report.tables.push(page_table(&fp.page));

    let group_corner = idempotents(&ex.group_algebra)?;
    let mut oao = Table::new(OMEGA_A_OMEGA, &["degree"]);
    let mut oa = Table::new(OMEGA_A, &["degree"]);
    let mut go = Table::new(GROUP_OMEGA, &["degree"]);
    for d in -q_hi..=-q_lo {
        let k = ex.corner.dims(d);
        oao.push(vec![d], FGAbGroup::free(k.omega_omega));
        oa.push(vec![d], FGAbGroup::free(k.omega_left));
        go.push(vec![d], FGAbGroup::free(group_corner.dims(d).omega_right));
    }
    report.tables.extend([oao, oa, go]);

    report.checks.insert(
        "corner identities".into(),
        ex.corner.identities_hold(&ex.algebra),
    );
    report.checks.insert(
        "column zero is the invariants".into(),
        fp.column_zero_is_invariants,
    );
    finish_page(&mut report, &fp.page, &ex.target, true, true);
    report.settle();
    Ok(report)
}

/// Runs `f` and stamps the wall time onto its report.
pub fn timed(f: impl FnOnce() -> Result<Report, CliError>) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut r = f()?;
    r.seconds = Some(start.elapsed().as_secs_f64());
    Ok(r)
}
