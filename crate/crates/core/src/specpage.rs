//! E²-pages built from local cohomology tables, collapse detection by
//! position, and comparison of the abutment with an independent target.
//!
//! Differentials are never computed. A page is either collapsed for degree
//! reasons or the abutment is refused.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::colocal::LocalCohomologyResult;
use crate::error::Error;
use crate::linalg::FGAbGroup;

/// How `q` is read. Lower: total degree `p + q`, `d^r: (p, q) → (p − r, q + r − 1)`.
/// Upper: `q` is cohomological, total degree `p − q`, `d^r: (p, q) → (p − r, q − r + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedPage {
    pub grading: Grading,
    /// Only nonzero entries are stored.
    pub entries: BTreeMap<(i32, i64), FGAbGroup>,
    pub p_range: (i32, i32),
    pub q_range: (i64, i64),
    /// Internal degrees above this are known to vanish.
    pub grading_bound: Option<i64>,
    pub note: String,
}

impl BigradedPage {
    pub fn new(
        grading: Grading,
        entries: impl IntoIterator<Item = ((i32, i64), FGAbGroup)>,
        p_range: (i32, i32),
        q_range: (i64, i64),
        note: impl Into<String>,
    ) -> Self {
        BigradedPage {
            grading,
            entries: entries.into_iter().filter(|(_, g)| !g.is_zero()).collect(),
            p_range,
            q_range,
            grading_bound: None,
            note: note.into(),
        }
    }

    pub fn get(&self, p: i32, q: i64) -> FGAbGroup {
        self.entries
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(FGAbGroup::zero)
    }

    pub fn in_window(&self, p: i32, q: i64) -> bool {
        (self.p_range.0..=self.p_range.1).contains(&p)
            && (self.q_range.0..=self.q_range.1).contains(&q)
    }

    pub fn total_degree(&self, p: i32, q: i64) -> i64 {
        match self.grading {
            Grading::Lower => p as i64 + q,
            Grading::Upper => p as i64 - q,
        }
    }

    /// Where `d^r` out of `(p, q)` lands.
    pub fn differential_target(&self, r: u32, p: i32, q: i64) -> (i32, i64) {
        let r = r as i64;
        match self.grading {
            Grading::Lower => (p - r as i32, q + r - 1),
            Grading::Upper => (p - r as i32, q - r + 1),
        }
    }

    pub fn nonzero_columns(&self) -> Vec<i32> {
        let mut cols: Vec<i32> = self.entries.keys().map(|&(p, _)| p).collect();
        cols.dedup();
        cols
    }

    /// Entries tensored with ℚ.
    pub fn rationalize(&self) -> BigradedPage {
        BigradedPage {
            entries: self
                .entries
                .iter()
                .filter(|(_, g)| g.rational_rank() > 0)
                .map(|(&k, g)| (k, FGAbGroup::free(g.rational_rank())))
                .collect(),
            note: format!("{} (rationalized)", self.note),
            ..self.clone()
        }
    }

    /// No entry sits above the grading bound, when one is known.
    pub fn respects_grading_bound(&self) -> bool {
        self.grading_bound
            .is_none_or(|b| self.entries.keys().all(|&(_, q)| q <= b))
    }
}

/// The local cohomology table as a page: `E²_{−i, j} = H^i⟨j⟩`.
pub fn e2_page(lc: &LocalCohomologyResult) -> BigradedPage {
    let mut page = BigradedPage::new(
        Grading::Lower,
        lc.entries
            .iter()
            .map(|(&(i, j), e)| ((-(i as i32), j), e.group.clone())),
        (-(lc.ideal_size as i32), 0),
        (lc.window.min, lc.window.max),
        "E2 from local cohomology, p = -i, q = internal degree",
    );
    page.grading_bound = lc.grading_bound;
    page
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collapse {
    pub collapsed: bool,
    /// `(r, p, q)` for each `d^r` out of `(p, q)` that could be nonzero.
    pub obstructions: Vec<(u32, i32, i64)>,
}

/// Every `d^r` with `r ≥ 2` has a zero source or zero target inside the window.
pub fn collapse_by_position(page: &BigradedPage) -> Collapse {
    let max_r = (page.p_range.1 - page.p_range.0).max(0) as u32;
    let mut obstructions = Vec::new();
    for &(p, q) in page.entries.keys() {
        for r in 2..=max_r {
            let (tp, tq) = page.differential_target(r, p, q);
            if page.in_window(tp, tq) && page.entries.contains_key(&(tp, tq)) {
                obstructions.push((r, p, q));
            }
        }
    }
    Collapse {
        collapsed: obstructions.is_empty(),
        obstructions,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The associated graded is the target itself and no extension can intervene.
    Equal,
    /// Orders and ranks agree; extensions are left open.
    Consistent,
    Inconsistent,
    /// No target value at this total degree.
    Unchecked,
}

impl Verdict {
    pub fn is_consistent(self) -> bool {
        matches!(self, Verdict::Equal | Verdict::Consistent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalDegree {
    pub contributions: Vec<((i32, i64), FGAbGroup)>,
    pub associated_graded: FGAbGroup,
    pub target: Option<FGAbGroup>,
    pub verdict: Verdict,
    /// More than one integral contribution, so the true group may be a nontrivial extension.
    pub extension_ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbutmentReport {
    pub degrees: BTreeMap<i64, TotalDegree>,
}

impl AbutmentReport {
    pub fn consistent_on(&self, lo: i64, hi: i64) -> bool {
        (lo..=hi).all(|s| {
            self.degrees
                .get(&s)
                .is_some_and(|t| t.verdict.is_consistent())
        })
    }

    /// Total degrees carrying something.
    pub fn support(&self) -> Vec<i64> {
        self.degrees
            .iter()
            .filter(|(_, t)| !t.associated_graded.is_zero())
            .map(|(&s, _)| s)
            .collect()
    }
}

/// Total degrees fully determined by the window: every `(p, q)` on the
/// diagonal with `p` in range has `q` in range.
fn covered_total_degrees(page: &BigradedPage) -> Vec<i64> {
    let (p0, p1) = page.p_range;
    let (q0, q1) = page.q_range;
    let ends = [
        page.total_degree(p0, q0),
        page.total_degree(p0, q1),
        page.total_degree(p1, q0),
        page.total_degree(p1, q1),
    ];
    let lo = *ends.iter().min().unwrap();
    let hi = *ends.iter().max().unwrap();
    (lo..=hi)
        .filter(|&s| (p0..=p1).all(|p| page.in_window(p, q_on_diagonal(page, p, s))))
        .collect()
}

fn q_on_diagonal(page: &BigradedPage, p: i32, s: i64) -> i64 {
    match page.grading {
        Grading::Lower => s - p as i64,
        Grading::Upper => p as i64 - s,
    }
}

/// Associated graded per total degree, compared with `target`. Refuses pages
/// that do not collapse by position.
pub fn abutment(
    page: &BigradedPage,
    target: &BTreeMap<i64, FGAbGroup>,
    over_field: bool,
) -> Result<AbutmentReport, Error> {
    let collapse = collapse_by_position(page);
    if !collapse.collapsed {
        return Err(Error::NotCollapsed(collapse.obstructions.len()));
    }
    let mut degrees = BTreeMap::new();
    for s in covered_total_degrees(page) {
        let contributions: Vec<((i32, i64), FGAbGroup)> = (page.p_range.0..=page.p_range.1)
            .map(|p| (p, q_on_diagonal(page, p, s)))
            .filter_map(|(p, q)| page.entries.get(&(p, q)).map(|g| ((p, q), g.clone())))
            .collect();
        let graded = contributions
            .iter()
            .fold(FGAbGroup::zero(), |acc, (_, g)| acc.direct_sum(g));
        let ambiguous = !over_field && contributions.len() > 1;
        let goal = target.get(&s).cloned();
        let verdict = match &goal {
            None => Verdict::Unchecked,
            Some(t) if !ambiguous => {
                if *t == graded {
                    Verdict::Equal
                } else {
                    Verdict::Inconsistent
                }
            }
            Some(t) if t.same_order_and_rank(&graded) => Verdict::Consistent,
            Some(_) => Verdict::Inconsistent,
        };
        degrees.insert(
            s,
            TotalDegree {
                contributions,
                associated_graded: graded,
                target: goal,
                verdict,
                extension_ambiguous: ambiguous,
            },
        );
    }
    Ok(AbutmentReport { degrees })
}

/// Integral cohomology from integral homology: `H^m = Hom(H_m, ℤ) ⊕ Ext(H_{m−1}, ℤ)`.
/// Degrees missing from the table count as zero.
pub fn uct_target(homology: &BTreeMap<i64, FGAbGroup>) -> BTreeMap<i64, FGAbGroup> {
    let Some((&lo, _)) = homology.first_key_value() else {
        return BTreeMap::new();
    };
    let hi = *homology.last_key_value().unwrap().0 + 1;
    let zero = FGAbGroup::zero();
    (lo..=hi)
        .map(|m| {
            let hom = homology.get(&m).unwrap_or(&zero).hom_to_integers();
            let ext = homology.get(&(m - 1)).unwrap_or(&zero).ext_to_integers();
            (m, hom.direct_sum(&ext))
        })
        .collect()
}

/// Places `H^m` at total degree `s = −a − m`.
pub fn cohomology_by_total_degree(
    cohomology: &BTreeMap<i64, FGAbGroup>,
    a: i64,
) -> BTreeMap<i64, FGAbGroup> {
    cohomology
        .iter()
        .map(|(&m, g)| (-a - m, g.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::colocal::{local_cohomology, StabilizationPolicy, Window};
    use crate::linalg::Scalars;
    use crate::module::{GradedModule, IdealSpec};
    use crate::ring::{GradedRing, Variable};

    fn stiefel() -> Arc<GradedRing> {
        Arc::new(
            GradedRing::parse(
                Scalars::Integers,
                vec![
                    Variable {
                        name: "u".into(),
                        degree: 2,
                    },
                    Variable {
                        name: "v".into(),
                        degree: 6,
                    },
                ],
                &["2*u"],
            )
            .unwrap(),
        )
    }

    fn stiefel_page(lo: i64) -> (BigradedPage, Arc<GradedRing>) {
        let r = stiefel();
        let m = GradedModule::ring_itself(r.clone());
        let lc = local_cohomology(
            &m,
            &IdealSpec::maximal(&r),
            Window::new(lo, 0).unwrap(),
            StabilizationPolicy::default(),
        )
        .unwrap();
        (e2_page(&lc), r)
    }

    fn z(n: usize) -> FGAbGroup {
        FGAbGroup::free(n)
    }

    fn z2(n: usize) -> FGAbGroup {
        FGAbGroup::new(0, vec![2.into(); n])
    }

    #[test]
    fn stiefel_page_columns_and_abutment() {
        let (page, r) = stiefel_page(-24);
        assert_eq!(page.nonzero_columns(), vec![-2, -1]);
        assert!(collapse_by_position(&page).collapsed);
        assert_eq!(page.rationalize().nonzero_columns(), vec![-1]);

        let homology: BTreeMap<i64, FGAbGroup> = (0..=20)
            .map(|d| (d, r.degree_basis(d).group.clone()))
            .collect();
        let target = cohomology_by_total_degree(&uct_target(&homology), 7);
        let report = abutment(&page, &target, false).unwrap();
        assert_eq!(report.degrees[&-7].associated_graded, z(1));
        assert_eq!(report.degrees[&-10].associated_graded, z2(1));
        assert_eq!(report.degrees[&-20].associated_graded, z2(2));
        assert!(report.consistent_on(-24, -7));
    }

    #[test]
    fn torsion_module_sits_in_column_zero() {
        let r = stiefel();
        let q = GradedModule::cyclic_quotient(r.clone(), &[r.parse_element("v").unwrap()]).unwrap();
        let q = q
            .quotient(vec![vec![r.parse_element("u^3").unwrap()]])
            .unwrap();
        let lc = local_cohomology(
            &q,
            &IdealSpec::maximal(&r),
            Window::new(-4, 8).unwrap(),
            StabilizationPolicy::default(),
        )
        .unwrap();
        let page = e2_page(&lc);
        assert_eq!(page.nonzero_columns(), vec![0]);
        for j in -4..=8 {
            assert_eq!(page.get(0, j), q.realize_degree(j));
        }
        assert!(page.respects_grading_bound());
    }

    #[test]
    fn synthetic_obstruction() {
        let page = BigradedPage::new(
            Grading::Lower,
            [((0, 0), z(1)), ((-2, 1), z(1))],
            (-2, 0),
            (-4, 4),
            "synthetic",
        );
        let c = collapse_by_position(&page);
        assert!(!c.collapsed);
        assert_eq!(c.obstructions, vec![(2, 0, 0)]);
        assert_eq!(
            abutment(&page, &BTreeMap::new(), true),
            Err(Error::NotCollapsed(1))
        );

        let single = BigradedPage::new(
            Grading::Lower,
            [((-1, 0), z(1)), ((-1, -6), z(1))],
            (-1, 0),
            (-8, 0),
            "",
        );
        assert!(collapse_by_position(&single).collapsed);
    }

    #[test]
    fn upper_grading_total_degree() {
        let page = BigradedPage::new(
            Grading::Upper,
            [((0, 0), z(1)), ((-1, 3), z(1))],
            (-1, 0),
            (-20, 10),
            "",
        );
        assert!(collapse_by_position(&page).collapsed);
        let report = abutment(&page, &BTreeMap::new(), true).unwrap();
        assert_eq!(report.support(), vec![-4, 0]);
        assert_eq!(report.degrees[&0].verdict, Verdict::Unchecked);
    }

    #[test]
    fn universal_coefficients() {
        let hom = BTreeMap::from([(2, z2(1)), (3, FGAbGroup::zero())]);
        let t = uct_target(&hom);
        assert_eq!(t[&3], z2(1));
        assert_eq!(t[&2], FGAbGroup::zero());

        let hom = BTreeMap::from([(12, z(1).direct_sum(&z2(2)))]);
        let t = uct_target(&hom);
        assert_eq!(t[&12], z(1));
        assert_eq!(t[&13], z2(2));
    }

    #[test]
    fn extension_ambiguity_is_reported() {
        let page = BigradedPage::new(
            Grading::Lower,
            [((0, 0), z2(1)), ((-1, 1), z2(1))],
            (-1, 0),
            (-2, 2),
            "",
        );
        let target = BTreeMap::from([(0, FGAbGroup::cyclic(4))]);
        let report = abutment(&page, &target, false).unwrap();
        let t = &report.degrees[&0];
        assert!(t.extension_ambiguous);
        assert_eq!(t.verdict, Verdict::Consistent);
        let wrong = BTreeMap::from([(0, FGAbGroup::cyclic(8))]);
        assert_eq!(
            abutment(&page, &wrong, false).unwrap().degrees[&0].verdict,
            Verdict::Inconsistent
        );
    }
}
