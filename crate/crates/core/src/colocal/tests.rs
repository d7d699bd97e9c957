use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::linalg::Scalars;
use crate::module::{torsion_radical, Generator, RadicalOptions};
use crate::ring::{GradedRing, Poly, Variable};

fn var(name: &str, degree: i64) -> Variable {
    Variable {
        name: name.into(),
        degree,
    }
}

fn stiefel() -> Arc<GradedRing> {
    Arc::new(
        GradedRing::parse(Scalars::Integers, vec![var("u", 2), var("v", 6)], &["2*u"]).unwrap(),
    )
}

fn qv() -> Arc<GradedRing> {
    Arc::new(GradedRing::parse(Scalars::Rationals, vec![var("v", 6)], &[]).unwrap())
}

fn f2uy() -> Arc<GradedRing> {
    Arc::new(
        GradedRing::parse(
            Scalars::prime_field(2).unwrap(),
            vec![var("u", 2), var("y", 3)],
            &[],
        )
        .unwrap(),
    )
}

/// Pairs `(a, b) ≥ 0` with `p·a + q·b = n`, by brute force.
fn count_solutions(p: i64, q: i64, n: i64) -> usize {
    if n < 0 {
        return 0;
    }
    (0..=n / p).filter(|a| (n - p * a) % q == 0).count()
}

#[test]
fn stiefel_local_cohomology() {
    let r = stiefel();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let res = local_cohomology(
        &m,
        &ideal,
        Window::new(-20, 0).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    for j in -20..=0 {
        assert!(res.group(0, j).is_zero(), "H0 at {j}");
        let h1 = if j <= -6 && j % 6 == 0 {
            FGAbGroup::free(1)
        } else {
            FGAbGroup::zero()
        };
        assert_eq!(res.group(1, j), h1, "H1 at {j}");
        let n = count_solutions(2, 6, -8 - j);
        let h2 = FGAbGroup::new(0, vec![2.into(); n]);
        assert_eq!(res.group(2, j), h2, "H2 at {j}");
    }
    assert!(res.vanishes_above_generators());
    assert_eq!(res.rational_degrees(), vec![1]);
    assert!(!res.regular_sequence);
    assert_eq!(res.grading_bound, None);
}

#[test]
fn polynomial_line() {
    let r = qv();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let res = local_cohomology(
        &m,
        &ideal,
        Window::new(-30, 0).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    for j in -30..=0 {
        assert!(res.group(0, j).is_zero());
        let expect = usize::from(j <= -6 && j % 6 == 0);
        assert_eq!(res.group(1, j), FGAbGroup::free(expect), "H1 at {j}");
    }
    assert!(res.regular_sequence);
    assert!(res.entries[&(0, -6)].certified());
    assert!(!res.entries[&(1, -6)].certified());
}

#[test]
fn mod_two_plane() {
    let r = f2uy();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let res = local_cohomology(
        &m,
        &ideal,
        Window::new(-20, 0).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    for j in -20..=0 {
        assert!(res.group(0, j).is_zero());
        assert!(res.group(1, j).is_zero());
        let n = count_solutions(2, 3, -5 - j);
        assert_eq!(res.group(2, j), FGAbGroup::free(n), "H2 at {j}");
    }
    for j in [-5, -7, -8] {
        assert_eq!(res.group(2, j), FGAbGroup::free(1));
    }
    assert!(res.regular_sequence);
}

#[test]
fn torsion_module_is_its_own_cell() {
    let r = stiefel();
    let u = r.parse_element("u").unwrap();
    let v = r.parse_element("v").unwrap();
    let m = GradedModule::cyclic_quotient(r.clone(), &[u, v]).unwrap();
    let ideal = IdealSpec::maximal(&r);
    let tri = colocalization_triangle(
        &m,
        &ideal,
        Window::new(-8, 8).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    assert!(tri.les_verified);
    assert!(tri.cell_torsion_verified);
    for (&(p, j), g) in &tri.cell {
        let expect = if p == 0 && j == 0 {
            FGAbGroup::free(1)
        } else {
            FGAbGroup::zero()
        };
        assert_eq!(g, &expect, "cell at ({p}, {j})");
    }
    assert!(tri.null.values().all(FGAbGroup::is_zero));
    assert_eq!(tri.local.grading_bound, Some(0));
    assert!(tri
        .local
        .entries
        .values()
        .all(LocalCohomologyEntry::certified));
}

#[test]
fn null_of_polynomial_line_is_laurent() {
    let r = qv();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let tri = colocalization_triangle(
        &m,
        &ideal,
        Window::new(-24, 12).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    assert!(tri.les_verified);
    assert!(tri.cell_torsion_verified);
    for j in -24..=12 {
        let laurent = FGAbGroup::free(usize::from(j % 6 == 0));
        assert_eq!(tri.null[&(0, j)], laurent, "null at {j}");
        assert_eq!(
            tri.module[&(0, j)],
            FGAbGroup::free(usize::from(j >= 0 && j % 6 == 0))
        );
    }
    assert_eq!(tri.cell[&(-1, -12)], FGAbGroup::free(1));
}

#[test]
fn stiefel_triangle_is_exact() {
    let r = stiefel();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let tri = colocalization_triangle(
        &m,
        &ideal,
        Window::new(-16, 0).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    assert!(tri.les_verified);
    assert!(tri.cell_torsion_verified);
}

#[test]
fn cellularity() {
    let r = qv();
    let ideal = IdealSpec::maximal(&r);
    let m = GradedModule::ring_itself(r.clone());
    let free = crate::complex::GradedComplex::single(m.clone(), 0);
    let verdict = is_cellular(
        &free,
        &ideal,
        Window::new(-6, 12).unwrap(),
        RadicalOptions::default(),
    )
    .unwrap();
    assert!(!verdict.cellular);
    assert!(verdict.failures.contains(&(0, 0)));
    assert_eq!(
        verdict.certificate,
        crate::module::RadicalCertificate::WithinWindow { n_max: 16 }
    );

    let strict = RadicalOptions {
        require_certified: true,
        ..RadicalOptions::default()
    };
    assert!(matches!(
        is_cellular(&free, &ideal, Window::new(0, 6).unwrap(), strict),
        Err(Error::WindowTooSmall(_))
    ));

    let zero = crate::complex::GradedComplex::zero(r.clone());
    assert!(
        is_cellular(&zero, &ideal, Window::new(-6, 6).unwrap(), strict)
            .unwrap()
            .cellular
    );

    let v2 = r.parse_element("v^2").unwrap();
    let trunc = GradedModule::cyclic_quotient(r.clone(), &[v2]).unwrap();
    let c = crate::complex::GradedComplex::single(trunc, 0);
    let verdict = is_cellular(&c, &ideal, Window::new(-6, 18).unwrap(), strict).unwrap();
    assert!(verdict.cellular);
    assert_eq!(
        verdict.certificate,
        crate::module::RadicalCertificate::Certified { bound: 6 }
    );
}

#[test]
fn cell_complex_of_a_run_is_cellular() {
    let r = qv();
    let ideal = IdealSpec::maximal(&r);
    let m = GradedModule::ring_itself(r.clone());
    // K(v^t; M) shifted so its cohomology is the local cohomology at the stable power.
    let k = crate::complex::koszul(&m, &ideal, 4);
    let top = k.term(1).clone();
    let v4 = r.parse_element("v^4").unwrap();
    let torsion_part = top.quotient(vec![vec![v4]]).unwrap();
    let c = crate::complex::GradedComplex::single(torsion_part, 1);
    let verdict = is_cellular(
        &c,
        &ideal,
        Window::new(-24, 0).unwrap(),
        RadicalOptions::default(),
    )
    .unwrap();
    assert!(verdict.cellular);
}

#[test]
fn grading_bound_checks() {
    let r = stiefel();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let res = local_cohomology(
        &m,
        &ideal,
        Window::new(-12, 6).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    assert!(grading_bound_check(&res, 0));

    let q = qv();
    let v2 = q.parse_element("v^2").unwrap();
    let trunc = GradedModule::cyclic_quotient(q.clone(), &[v2])
        .unwrap()
        .shift(4);
    let qi = IdealSpec::maximal(&q);
    let res = local_cohomology(
        &trunc,
        &qi,
        Window::new(-4, 16).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    assert_eq!(res.grading_bound, Some(10));
    assert!(grading_bound_check(&res, 10));
    assert!(!grading_bound_check(&res, 9));

    let free = GradedModule::ring_itself(q.clone());
    let res = local_cohomology(
        &free,
        &qi,
        Window::new(-18, 6).unwrap(),
        StabilizationPolicy::default(),
    )
    .unwrap();
    assert!(grading_bound_check(&res, -6));
    assert!(!grading_bound_check(&res, -7));
}

#[test]
fn tiny_power_budget_fails_loudly() {
    let r = stiefel();
    let m = GradedModule::ring_itself(r.clone());
    let ideal = IdealSpec::maximal(&r);
    let policy = StabilizationPolicy {
        max_power: 3,
        stable_steps: 2,
    };
    assert!(matches!(
        local_cohomology(&m, &ideal, Window::new(-20, -18).unwrap(), policy),
        Err(Error::StabilizationNotReached { .. })
    ));
}

#[test]
fn cech_matches_koszul_on_examples() {
    let policy = StabilizationPolicy::default();
    for r in [stiefel(), qv(), f2uy()] {
        let m = GradedModule::ring_itself(r.clone());
        let ideal = IdealSpec::maximal(&r);
        let res = local_cohomology(&m, &ideal, Window::new(-14, 0).unwrap(), policy).unwrap();
        for j in -14..=0 {
            for i in 0..=ideal.len() {
                assert_eq!(
                    cech_local_cohomology(&m, &ideal, i, j, policy).unwrap(),
                    res.group(i, j),
                    "H{i} at {j}"
                );
            }
        }
    }
}

fn random_module(ring: &Arc<GradedRing>, gens: &[i64], rels: &[(usize, Vec<i64>)]) -> GradedModule {
    let generators: Vec<_> = gens
        .iter()
        .enumerate()
        .map(|(k, &d)| Generator::new(format!("e{k}"), d))
        .collect();
    let top = gens.iter().copied().max().unwrap_or(0) + 2 * ring.max_variable_degree();
    let mut relations = Vec::new();
    for (target_deg_pick, coeffs) in rels {
        let target = gens[0] + (*target_deg_pick as i64 % 3) * ring.min_variable_degree();
        if target > top {
            continue;
        }
        let mut rel = Vec::new();
        let mut ci = 0;
        for &g in gens {
            let basis = ring.monomials(target - g);
            let mut p = Poly::zero();
            for mono in &basis.monomials {
                let c = coeffs[ci % coeffs.len()];
                ci += 1;
                p = p.add(&Poly::term(mono.clone(), c));
            }
            rel.push(ring.normalize(&p));
        }
        relations.push(rel);
    }
    GradedModule::new(ring.clone(), generators, relations).unwrap()
}

fn zv() -> Arc<GradedRing> {
    Arc::new(GradedRing::parse(Scalars::Integers, vec![var("v", 2)], &[]).unwrap())
}

fn f3uv() -> Arc<GradedRing> {
    Arc::new(
        GradedRing::parse(
            Scalars::prime_field(3).unwrap(),
            vec![var("u", 2), var("v", 2)],
            &[],
        )
        .unwrap(),
    )
}

fn module_strategy() -> impl Strategy<Value = (Vec<i64>, Vec<(usize, Vec<i64>)>)> {
    (
        prop::collection::vec(0i64..3, 1..3),
        prop::collection::vec((0usize..3, prop::collection::vec(-3i64..4, 1..6)), 0..3),
    )
        .prop_map(|(g, r)| (g.into_iter().map(|x| 2 * x).collect(), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn h0_is_the_torsion_radical((gens, rels) in module_strategy(), pick in 0usize..2) {
        let ring = if pick == 0 { zv() } else { f3uv() };
        let m = random_module(&ring, &gens, &rels);
        let ideal = IdealSpec::maximal(&ring);
        let res = local_cohomology(&m, &ideal, Window::new(-6, 8).unwrap(), StabilizationPolicy::default()).unwrap();
        prop_assert!(res.vanishes_above_generators());
        let rad = torsion_radical(&m, &ideal, -6, 8, RadicalOptions::default()).unwrap();
        for j in -6..=8 {
            prop_assert_eq!(Some(&res.group(0, j)), rad.group(j), "degree {}", j);
        }
    }

    #[test]
    fn cech_agrees_on_random_modules((gens, rels) in module_strategy()) {
        let ring = if gens.len() % 2 == 0 { zv() } else { f3uv() };
        let m = random_module(&ring, &gens, &rels);
        let ideal = IdealSpec::maximal(&ring);
        let policy = StabilizationPolicy::default();
        let res = local_cohomology(&m, &ideal, Window::new(-6, 4).unwrap(), policy).unwrap();
        for j in -6..=4 {
            for i in 0..=ideal.len() {
                prop_assert_eq!(cech_local_cohomology(&m, &ideal, i, j, policy).unwrap(), res.group(i, j));
            }
        }
    }

    #[test]
    fn triangles_are_exact((gens, rels) in module_strategy()) {
        let ring = f3uv();
        let m = random_module(&ring, &gens, &rels);
        let ideal = IdealSpec::maximal(&ring);
        let tri = colocalization_triangle(&m, &ideal, Window::new(-6, 6).unwrap(), StabilizationPolicy::default()).unwrap();
        prop_assert!(tri.les_verified);
        prop_assert!(tri.cell_torsion_verified);
    }
}
