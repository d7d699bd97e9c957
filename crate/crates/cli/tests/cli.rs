use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coloc_cli::commands::{cmd_lc, LC_TABLE, PAGE_TABLE};
use coloc_cli::corpus::GOLDEN;
use coloc_cli::report::{Entry, Table};
use coloc_cli::{Format, JobSpec, Report};
use coloc_core::specpage::Verdict;
use coloc_core::FGAbGroup;
use proptest::prelude::*;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

fn coloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn machine(args: &[&str]) -> (Report, i32) {
    let mut full = vec!["--format", "machine", "--no-timing"];
    full.extend_from_slice(args);
    let out = coloc(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    (
        Report::from_machine(&text).expect("machine report parses"),
        out.status.code().unwrap(),
    )
}

fn path(name: &str) -> String {
    corpus(name).display().to_string()
}

/// Pairs `(a, b) ≥ 0` with `p·a + q·b = n`.
fn solutions(p: i64, q: i64, n: i64) -> usize {
    if n < 0 {
        return 0;
    }
    (0..=n / q).filter(|b| (n - q * b) % p == 0).count()
}

fn z2(n: usize) -> FGAbGroup {
    FGAbGroup::new(0, vec![2.into(); n])
}

fn golden_report(name: &str) -> Report {
    let case = GOLDEN.iter().find(|c| c.name == name).unwrap();
    Report::from_machine(case.golden).unwrap()
}

#[test]
fn stiefel_lc_matches_golden_bytes() {
    let out = coloc(&[
        "--format",
        "machine",
        "--no-timing",
        "lc",
        &path("stiefel.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(corpus("golden/stiefel.lc.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn every_golden_is_reproduced() {
    for case in GOLDEN {
        assert!(case.matches().unwrap(), "{}", case.name);
    }
}

#[test]
fn golden_stiefel_table_has_the_closed_form() {
    let r = golden_report("stiefel.lc");
    let t = r.table(LC_TABLE).unwrap();
    for j in -40..=0 {
        assert_eq!(t.get(&[0, j]), Some(&FGAbGroup::zero()));
        let h1 = if j < 0 && j % 6 == 0 && j >= -36 {
            FGAbGroup::free(1)
        } else {
            FGAbGroup::zero()
        };
        assert_eq!(t.get(&[1, j]), Some(&h1), "H1 at {j}");
        assert_eq!(
            t.get(&[2, j]),
            Some(&z2(solutions(2, 6, -8 - j))),
            "H2 at {j}"
        );
    }
    assert_eq!(t.entries.len(), 3 * 41);
}

#[test]
fn golden_field_tables_have_the_closed_form() {
    let r = golden_report("qv.lc");
    let t = r.table(LC_TABLE).unwrap();
    for j in -30..=0 {
        let expect = usize::from(j < 0 && j % 6 == 0);
        assert_eq!(t.get(&[1, j]), Some(&FGAbGroup::free(expect)));
        assert_eq!(t.get(&[0, j]), Some(&FGAbGroup::zero()));
    }
    let r = golden_report("f2uy.lc");
    let t = r.table(LC_TABLE).unwrap();
    for j in -30..=0 {
        assert_eq!(
            t.get(&[2, j]),
            Some(&FGAbGroup::free(solutions(2, 3, -5 - j)))
        );
        for i in 0..2 {
            assert_eq!(t.get(&[i, j]), Some(&FGAbGroup::zero()));
        }
    }
}

#[test]
fn positive_window_of_a_connective_ring_is_zero() {
    let (r, code) = machine(&["lc", &path("stiefel.json"), "--window", "5:10"]);
    assert_eq!(code, 0);
    let t = r.table(LC_TABLE).unwrap();
    assert_eq!(t.entries.len(), 18);
    assert!(t.entries.iter().all(|e| e.group.is_zero()));
}

#[test]
fn tiny_power_budget_exits_3() {
    let out = coloc(&["page", &path("stiefel.json"), "--max-power", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not stabilize"));
}

#[test]
fn validation_failures_exit_2() {
    let dir = std::env::temp_dir().join(format!("coloc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = [
        ("garbage.json", "{ not json"),
        (
            "inhomogeneous.json",
            r#"{"ring":{"scalars":"Z","variables":[{"name":"u","degree":2}]},
                "ideal":["u+1"],"window":{"min":0,"max":1}}"#,
        ),
        (
            "unknown_field.json",
            r#"{"ring":{"scalars":"Z","variables":[{"name":"u","degree":2}]},
                "window":{"min":0,"max":1},"colour":1}"#,
        ),
        (
            "bad_scalars.json",
            r#"{"ring":{"scalars":"F4","variables":[{"name":"u","degree":2}]},
                "window":{"min":0,"max":1}}"#,
        ),
    ];
    for (name, body) in bad {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        let out = coloc(&["lc", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    let out = coloc(&["lc", &path("stiefel.json"), "--window", "3:1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = coloc(&["lc", &path("missing.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = coloc(&["equivariant", "--builder", "rp2n", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn uncollapsed_page_exits_4() {
    // F2[u,y] plus a copy of the residue field in degree -6: H0<-6> and
    // H2<-5> are both nonzero, so d2 could connect them.
    let job = r#"{
        "name": "uncollapsed",
        "ring": {"scalars": "F2", "variables": [{"name": "u", "degree": 2}, {"name": "y", "degree": 3}]},
        "module": {
            "generators": [{"name": "e", "degree": 0}, {"name": "k", "degree": -6}],
            "relations": [["0", "u"], ["0", "y"]]
        },
        "window": {"min": -12, "max": 0}
    }"#;
    let p = std::env::temp_dir().join(format!("coloc-uncollapsed-{}.json", std::process::id()));
    std::fs::write(&p, job).unwrap();
    let (r, code) = machine(&["page", p.to_str().unwrap()]);
    assert_eq!(code, 4);
    let c = r.collapse.unwrap();
    assert!(!c.collapsed);
    assert!(c.obstructions.contains(&(2, 0, -6)));
    assert!(r.abutment.is_none());
}

#[test]
fn machine_report_round_trips() {
    for case in GOLDEN {
        let r = case.run().unwrap();
        let back = Report::from_machine(&r.render(Format::Machine)).unwrap();
        assert_eq!(back.tables, r.tables, "{}", case.name);
        assert_eq!(back, r, "{}", case.name);
    }
}

#[test]
fn text_report_carries_the_same_groups() {
    let spec =
        JobSpec::from_json(&std::fs::read_to_string(corpus("stiefel.json")).unwrap()).unwrap();
    let r = cmd_lc(&spec).unwrap();
    let text = r.render(Format::Text);
    let t = r.table(LC_TABLE).unwrap();
    let mut listed = 0;
    for e in t.nonzero() {
        let line = format!("  {:>4} {:>4}  {}", e.at[0], e.at[1], e.group);
        assert!(text.lines().any(|l| l == line), "missing `{line}`");
        listed += 1;
    }
    let zeros = t.entries.len() - listed;
    assert!(text.contains(&format!("zero at the other {zeros} spots")));
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_coloc"))
            .env("COLOC_THREADS", threads)
            .args([
                "--format",
                "machine",
                "--no-timing",
                "page",
                &path("stiefel.json"),
            ])
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn explicit_target_file() {
    let dir = std::env::temp_dir().join(format!("coloc-target-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    let bad = dir.join("bad.json");
    // The classes sit at (p, q) = (-1, -6k), total degree -1 - 6k.
    let mut degrees = BTreeMap::new();
    for s in -31..=-1 {
        let g = FGAbGroup::free(usize::from((s + 1) % 6 == 0 && s < -1));
        degrees.insert(s, g);
    }
    let spec = serde_json::json!({ "kind": "table", "degrees": degrees });
    std::fs::write(&good, spec.to_string()).unwrap();
    degrees.insert(-13, FGAbGroup::free(2));
    let spec = serde_json::json!({ "kind": "table", "degrees": degrees });
    std::fs::write(&bad, spec.to_string()).unwrap();

    let (r, code) = machine(&["page", &path("qv.json"), "--target", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    let ab = r.abutment.unwrap();
    assert!(ab.degrees.values().all(|t| t.verdict == Verdict::Equal));

    let (r, code) = machine(&["page", &path("qv.json"), "--target", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(
        r.abutment.unwrap().degrees[&-13].verdict,
        Verdict::Inconsistent
    );
}

#[test]
fn equivariant_flags_and_params_agree() {
    let (a, code) = machine(&["equivariant", &path("rp2n.json")]);
    assert_eq!(code, 0);
    let (b, _) = machine(&["equivariant", "--builder", "rp2n", "--n", "2"]);
    assert_eq!(a.tables, b.tables);
    let page = a.table(PAGE_TABLE).unwrap();
    let nonzero: Vec<Vec<i64>> = page.nonzero().map(|e| e.at.clone()).collect();
    assert_eq!(nonzero, vec![vec![-1, 3], vec![0, 0]]);
}

#[test]
fn triangle_report_is_exact() {
    let (r, code) = machine(&["triangle", &path("stiefel.json"), "--window", "-14:2"]);
    assert_eq!(code, 0);
    assert!(r.checks["long exact sequence exact"]);
    assert!(r.checks["cell classes are torsion"]);
    // Away from local cohomology the null part is the ring; below degree
    // zero it is H^1 shifted down.
    let null = r.table("null").unwrap();
    assert_eq!(null.get(&[0, 2]), Some(&z2(1)));
    assert_eq!(null.get(&[0, -6]), Some(&FGAbGroup::free(1)));
}

fn group_strategy() -> impl Strategy<Value = FGAbGroup> {
    (0usize..3, prop::collection::vec(0i64..30, 0..4))
        .prop_map(|(r, t)| FGAbGroup::new(r, t.into_iter().map(Into::into).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_tables_round_trip(groups in prop::collection::vec(group_strategy(), 0..20), lo in -50i64..50) {
        let mut r = Report::new("lc", serde_json::json!({"name": "synthetic"}));
        let mut t = Table::new(LC_TABLE, &["i", "j"]);
        for (k, g) in groups.into_iter().enumerate() {
            t.entries.push(Entry { at: vec![(k % 3) as i64, lo + k as i64], group: g });
        }
        r.tables.push(t);
        let back = Report::from_machine(&r.render(Format::Machine)).unwrap();
        prop_assert_eq!(back.tables, r.tables);
    }
}
