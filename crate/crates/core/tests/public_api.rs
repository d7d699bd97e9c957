use std::sync::Arc;

use coloc_core::colocal::{local_cohomology, StabilizationPolicy, Window};
use coloc_core::equivariant::{fiber_page, rp2n};
use coloc_core::linalg::smith_normal_form;
use coloc_core::module::{GradedModule, IdealSpec};
use coloc_core::ring::{GradedRing, Variable};
use coloc_core::specpage::{abutment, collapse_by_position, e2_page, Verdict};
use coloc_core::{ExactMatrix, FGAbGroup, Scalars};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn polynomials(scalars: Scalars, degrees: &[i64]) -> Arc<GradedRing> {
    let vars = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| Variable {
            name: format!("x{i}"),
            degree: d,
        })
        .collect();
    Arc::new(GradedRing::parse(scalars, vars, &[]).unwrap())
}

/// Rank over the rationals by fraction-free elimination on i128.
fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let (a, b) = (m[rank][c], m[r][c]);
            let pivot = m[rank].clone();
            for (x, y) in m[r].iter_mut().zip(&pivot) {
                *x = a * *x - b * y;
            }
            let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                m[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

proptest! {
    #[test]
    fn smith_rank_matches_rational_rank(rows in matrix()) {
        let a = ExactMatrix::from_rows(Scalars::Integers, &rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.rank(), rational_rank(&rows));
    }

    #[test]
    fn smith_diagonal_of_square_matrix_multiplies_to_determinant(rows in matrix()) {
        let n = rows.len().min(rows[0].len());
        let square: Vec<Vec<i64>> = rows[..n].iter().map(|r| r[..n].to_vec()).collect();
        let a = ExactMatrix::from_rows(Scalars::Integers, &square);
        let diag = smith_normal_form(&a).diagonal();
        let product = (0..n)
            .map(|i| diag.get(i).cloned().unwrap_or_else(BigInt::zero))
            .fold(BigInt::from(1), |p, x| p * x);
        prop_assert_eq!(product, a.determinant().abs());
    }

    /// `H^1_{(x)}(k[x])` is one copy of `k` in each degree `-|x|·k`, `k ≥ 1`.
    #[test]
    fn one_variable_top_cohomology(half in 1i64..=3, lo in -30i64..=-5) {
        let degree = 2 * half;
        let ring = polynomials(Scalars::Rationals, &[degree]);
        let m = GradedModule::ring_itself(ring.clone());
        let ideal = IdealSpec::maximal(&ring);
        let w = Window::new(lo, 4).unwrap();
        let res = local_cohomology(&m, &ideal, w, StabilizationPolicy::default()).unwrap();
        for j in w.degrees() {
            prop_assert!(res.group(0, j).is_zero());
            let expected = usize::from(j < 0 && j % degree == 0);
            prop_assert_eq!(res.group(1, j).free_rank(), expected, "degree {}", j);
        }
    }

    /// Shifting the module shifts every group by the same amount.
    #[test]
    fn shift_moves_the_table(n in -6i64..=6) {
        let ring = polynomials(Scalars::prime_field(3).unwrap(), &[2, 2]);
        let m = GradedModule::ring_itself(ring.clone());
        let ideal = IdealSpec::maximal(&ring);
        let policy = StabilizationPolicy::default();
        let base = local_cohomology(&m, &ideal, Window::new(-20, 0).unwrap(), policy).unwrap();
        let moved = local_cohomology(
            &m.shift(n),
            &ideal,
            Window::new(-20 + n, n).unwrap(),
            policy,
        )
        .unwrap();
        for i in 0..=2 {
            for j in -20..=0 {
                prop_assert_eq!(base.group(i, j), moved.group(i, j + n));
            }
        }
    }
}

/// `H^2` of `k[x,y]` with `|x| = |y| = 2`: dimension `#{a, b ≥ 1 : 2a + 2b = -j}`.
#[test]
fn plane_has_one_nonzero_column_that_collapses() {
    let ring = polynomials(Scalars::Rationals, &[2, 2]);
    let m = GradedModule::ring_itself(ring.clone());
    let ideal = IdealSpec::maximal(&ring);
    let w = Window::new(-16, 0).unwrap();
    let res = local_cohomology(&m, &ideal, w, StabilizationPolicy::default()).unwrap();
    for j in w.degrees() {
        let expected = if j <= -4 && j % 2 == 0 {
            (-j / 2 - 1) as usize
        } else {
            0
        };
        assert_eq!(res.group(2, j).free_rank(), expected, "degree {j}");
        assert!(res.group(0, j).is_zero() && res.group(1, j).is_zero());
    }
    let page = e2_page(&res);
    assert_eq!(page.nonzero_columns(), vec![-2]);
    assert!(collapse_by_position(&page).collapsed);
}

#[test]
fn rp2n_page_for_small_n() {
    for n in 1..=3u32 {
        let x = 2 * n as i64 - 1;
        let ex = rp2n(n, 40).unwrap();
        for d in 0..=30 {
            let expected = usize::from(d % (2 * x) == 0);
            assert_eq!(
                ex.corner.dims(d).omega_omega,
                expected,
                "n = {n}, degree {d}"
            );
        }
        let fp = fiber_page(&ex.algebra, &ex.corner, &ex.fiber_homology, -10, 20).unwrap();
        let nonzero: Vec<(i32, i64)> = fp
            .page
            .entries
            .iter()
            .filter(|(_, g)| !g.is_zero())
            .map(|(&k, _)| k)
            .collect();
        assert_eq!(nonzero, vec![(-1, x), (0, 0)], "n = {n}");
        let report = abutment(&fp.page, &ex.target, true).unwrap();
        let support: Vec<i64> = report.support();
        assert_eq!(support, vec![-2 * n as i64, 0], "n = {n}");
        let mut target = ex.target.clone();
        target.insert(1, FGAbGroup::free(1));
        let wrong = abutment(&fp.page, &target, true).unwrap();
        assert!(wrong
            .degrees
            .values()
            .any(|t| t.verdict == Verdict::Inconsistent));
    }
}
