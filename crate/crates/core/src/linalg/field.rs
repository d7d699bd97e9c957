use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ExactMatrix;

/// Minimal field interface used by Gaussian elimination.
pub(crate) trait Field: Clone {
    type E: Clone + Debug + PartialEq;
    fn lift(&self, x: &BigInt) -> Self::E;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, x: &Self::E) -> bool;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `a - b·c`
    fn sub_mul(&self, a: &Self::E, b: &Self::E, c: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Scale a vector to integers (clearing denominators where needed).
    fn to_integer_vector(&self, v: &[Self::E]) -> Vec<BigInt>;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Rationals;
#[derive(Clone, Copy, Debug)]
pub(crate) struct PrimeField(pub u64);

impl Field for Rationals {
    type E = BigRational;

    fn lift(&self, x: &BigInt) -> BigRational {
        BigRational::from_integer(x.clone())
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, x: &BigRational) -> bool {
        x.is_zero()
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn sub_mul(&self, a: &BigRational, b: &BigRational, c: &BigRational) -> BigRational {
        a - b * c
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn to_integer_vector(&self, v: &[BigRational]) -> Vec<BigInt> {
        let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.into_iter().map(|x| x / &g).collect()
        }
    }
}

impl Field for PrimeField {
    type E = u64;

    fn lift(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.0))
            .to_u64()
            .expect("reduced residue")
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn sub_mul(&self, a: &u64, b: &u64, c: &u64) -> u64 {
        let p = self.0 as u128;
        let bc = (*b as u128 * *c as u128) % p;
        ((*a as u128 + p - bc) % p) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        // Fermat
        let p = self.0;
        let mut base = *a % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - *a % self.0) % self.0
    }
    fn to_integer_vector(&self, v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }
}

/// Incremental row echelon form: each stored row has a unit pivot and zeros at
/// the pivots of all earlier rows.
#[derive(Clone, Debug)]
pub(crate) struct Echelon<F: Field> {
    field: F,
    rows: Vec<(usize, Vec<F::E>)>,
}

impl<F: Field> Echelon<F> {
    pub(crate) fn new(field: F) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn reduce(&self, mut v: Vec<F::E>) -> Vec<F::E> {
        for (pivot, row) in &self.rows {
            if self.field.is_zero(&v[*pivot]) {
                continue;
            }
            let c = v[*pivot].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !self.field.is_zero(y) {
                    *x = self.field.sub_mul(x, &c, y);
                }
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub(crate) fn insert(&mut self, v: Vec<F::E>) -> bool {
        let v = self.reduce(v);
        let Some(pivot) = v.iter().position(|x| !self.field.is_zero(x)) else {
            return false;
        };
        let inv = self.field.inv(&v[pivot]);
        let v: Vec<F::E> = v.iter().map(|x| self.field.mul(x, &inv)).collect();
        self.rows.push((pivot, v));
        true
    }

    pub(crate) fn contains(&self, v: Vec<F::E>) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }
}

pub(crate) fn convert<F: Field>(field: &F, v: &[BigInt]) -> Vec<F::E> {
    v.iter().map(|x| field.lift(x)).collect()
}

pub(crate) fn rank<F: Field>(field: &F, a: &ExactMatrix) -> usize {
    let mut ech = Echelon::new(field.clone());
    // eliminate along the shorter side
    if a.rows() <= a.cols() {
        for r in 0..a.rows() {
            ech.insert(convert(field, a.row(r)));
        }
    } else {
        for c in 0..a.cols() {
            ech.insert(convert(field, &a.column(c)));
        }
    }
    ech.rank()
}

/// Reduced row echelon form of `rows` (each of length `ncols`), returning pivots.
pub(crate) fn rref<F: Field>(
    field: &F,
    mut rows: Vec<Vec<F::E>>,
    ncols: usize,
) -> (Vec<Vec<F::E>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(&rows[r][c]);
        for x in &mut rows[r] {
            *x = field.mul(x, &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !field.is_zero(&row[c]) {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !field.is_zero(y) {
                        *x = field.sub_mul(x, &f, y);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub(crate) fn kernel_of_rows<F: Field>(
    field: &F,
    rows: Vec<Vec<F::E>>,
    ncols: usize,
) -> Vec<Vec<F::E>> {
    let (reduced, pivots) = rref(field, rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![field.zero(); ncols];
            x[f] = field.one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                x[p] = field.neg(&row[f]);
            }
            x
        })
        .collect()
}

pub(crate) fn kernel<F: Field>(field: &F, a: &ExactMatrix) -> Vec<Vec<BigInt>> {
    let rows = (0..a.rows()).map(|r| convert(field, a.row(r))).collect();
    kernel_of_rows(field, rows, a.cols())
        .iter()
        .map(|v| field.to_integer_vector(v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Scalars;

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField(7);
        for a in 1..7u64 {
            assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }
    }

    #[test]
    fn rational_kernel_is_integral_and_primitive() {
        let a = ExactMatrix::from_rows(Scalars::Rationals, &[vec![2, 3, 0], vec![0, 0, 1]]);
        let k = kernel(&Rationals, &a);
        assert_eq!(k.len(), 1);
        assert_eq!(
            k[0],
            vec![BigInt::from(-3), BigInt::from(2), BigInt::from(0)]
        );
    }

    #[test]
    fn echelon_membership() {
        let f = PrimeField(5);
        let mut e = Echelon::new(f);
        assert!(e.insert(vec![1, 2, 0]));
        assert!(e.insert(vec![0, 1, 1]));
        assert!(!e.insert(vec![2, 0, 1]));
        assert!(e.contains(vec![1, 3, 1]));
        assert!(!e.contains(vec![0, 0, 1]));
    }
}
