use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{abs_cmp, ExactMatrix, Scalars};

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
    rank: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Smith normal form over ℤ. Entries are read as integers whatever the
/// matrix's scalar tag; the returned matrices are tagged [`Scalars::Integers`].
pub fn smith_normal_form(a: &ExactMatrix) -> SmithForm {
    let work = Reduction::run(a, true, true);
    let (m, n) = (a.rows(), a.cols());
    let d = ExactMatrix::from_big_rows(Scalars::Integers, work.d, n);
    let u = ExactMatrix::from_big_rows(Scalars::Integers, work.u.expect("tracked"), m);
    let v = ExactMatrix::from_big_rows(Scalars::Integers, work.v.expect("tracked"), n);
    SmithForm {
        u,
        d,
        v,
        rank: work.rank,
    }
}

/// Row transform and diagonal only; enough for solving against a lattice basis.
pub(crate) fn smith_left(a: &ExactMatrix) -> (ExactMatrix, Vec<BigInt>, ExactMatrix) {
    let work = Reduction::run(a, true, true);
    let m = a.rows();
    let n = a.cols();
    let diag = (0..work.rank).map(|i| work.d[i][i].clone()).collect();
    (
        ExactMatrix::from_big_rows(Scalars::Integers, work.u.expect("tracked"), m),
        diag,
        ExactMatrix::from_big_rows(Scalars::Integers, work.v.expect("tracked"), n),
    )
}

pub(crate) fn smith_diagonal(a: &ExactMatrix) -> Vec<BigInt> {
    let work = Reduction::run(a, false, false);
    (0..work.rank).map(|i| work.d[i][i].clone()).collect()
}

pub(crate) fn kernel_basis(a: &ExactMatrix) -> Vec<Vec<BigInt>> {
    let work = Reduction::run(a, false, true);
    let v = work.v.expect("tracked");
    let n = a.cols();
    (work.rank..n)
        .map(|c| (0..n).map(|r| v[r][c].clone()).collect())
        .collect()
}

struct Reduction {
    d: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    rank: usize,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(1);
            r
        })
        .collect()
}

impl Reduction {
    fn run(a: &ExactMatrix, track_u: bool, track_v: bool) -> Reduction {
        let (m, n) = (a.rows(), a.cols());
        let mut red = Reduction {
            d: a.to_rows(),
            u: track_u.then(|| identity_rows(m)),
            v: track_v.then(|| identity_rows(n)),
            rank: 0,
        };
        red.reduce(m, n);
        red
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.d.swap(i, j);
            if let Some(u) = &mut self.u {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.d {
                row.swap(i, j);
            }
            if let Some(v) = &mut self.v {
                for row in v {
                    row.swap(i, j);
                }
            }
        }
    }

    /// row_i -= q · row_k
    fn row_axpy(&mut self, i: usize, k: usize, q: &BigInt) {
        let (src, dst) = pair_mut(&mut self.d, k, i);
        for (x, y) in dst.iter_mut().zip(src.iter()) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
        if let Some(u) = &mut self.u {
            let (src, dst) = pair_mut(u, k, i);
            for (x, y) in dst.iter_mut().zip(src.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
    }

    /// col_j -= q · col_k
    fn col_axpy(&mut self, j: usize, k: usize, q: &BigInt) {
        for row in &mut self.d {
            if !row[k].is_zero() {
                let t = q * &row[k];
                row[j] -= t;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v {
                if !row[k].is_zero() {
                    let t = q * &row[k];
                    row[j] -= t;
                }
            }
        }
    }

    fn negate_row(&mut self, k: usize) {
        for x in &mut self.d[k] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[k] {
                *x = -std::mem::take(x);
            }
        }
    }

    fn min_pivot(&self, k: usize, m: usize, n: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                let x = &self.d[i][j];
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => abs_cmp(x, &self.d[bi][bj]).is_lt(),
                };
                if better {
                    best = Some((i, j));
                    if x.abs() == BigInt::from(1) {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn reduce(&mut self, m: usize, n: usize) {
        let mut k = 0;
        while k < m.min(n) {
            let Some((pi, pj)) = self.min_pivot(k, m, n) else {
                break;
            };
            self.swap_rows(k, pi);
            self.swap_cols(k, pj);
            loop {
                let mut clean = true;
                for i in k + 1..m {
                    if !self.d[i][k].is_zero() {
                        let q = &self.d[i][k] / &self.d[k][k];
                        if !q.is_zero() {
                            self.row_axpy(i, k, &q);
                        }
                        if !self.d[i][k].is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in k + 1..n {
                    if !self.d[k][j].is_zero() {
                        let q = &self.d[k][j] / &self.d[k][k];
                        if !q.is_zero() {
                            self.col_axpy(j, k, &q);
                        }
                        if !self.d[k][j].is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    // bring the smallest remainder of row k / column k into the pivot
                    let mut best = (k, k);
                    for i in k + 1..m {
                        let x = &self.d[i][k];
                        if !x.is_zero() && abs_cmp(x, &self.d[best.0][best.1]).is_lt() {
                            best = (i, k);
                        }
                    }
                    for j in k + 1..n {
                        let x = &self.d[k][j];
                        if !x.is_zero() && abs_cmp(x, &self.d[best.0][best.1]).is_lt() {
                            best = (k, j);
                        }
                    }
                    self.swap_rows(k, best.0);
                    self.swap_cols(k, best.1);
                    continue;
                }
                let pivot = self.d[k][k].clone();
                let offender =
                    (k + 1..m).find(|&i| (k + 1..n).any(|j| !(&self.d[i][j] % &pivot).is_zero()));
                match offender {
                    Some(i) => self.row_axpy(k, i, &BigInt::from(-1)),
                    None => break,
                }
            }
            if self.d[k][k].is_negative() {
                self.negate_row(k);
            }
            k += 1;
        }
        self.rank = k;
    }
}

fn pair_mut<T>(v: &mut [T], src: usize, dst: usize) -> (&T, &mut T) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = v.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}
