//! Exact linear algebra over ℤ, ℚ and 𝔽_p.
//!
//! All matrices carry integer entries. Over ℚ an [`ExactMatrix`] holds an
//! integral representative (every presentation matrix produced by the engine
//! has integer coefficients); genuinely fractional data lives in
//! [`RationalMatrix`]. Over 𝔽_p entries are kept reduced into `[0, p)`.

mod field;
mod group;
mod rational;
mod snf;
mod span;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use group::FGAbGroup;
pub use rational::RationalMatrix;
pub use snf::{smith_normal_form, SmithForm};
pub use span::{
    cokernel, homology_at, induced_map_is_iso, induced_map_is_surjective, is_exact_at,
    subquotient_homology, Span, Subquotient,
};

pub(crate) use field::{PrimeField, Rationals};

/// Coefficient ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scalars {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl Scalars {
    pub fn prime_field(p: u64) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(Scalars::PrimeField(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Scalars::Integers | Scalars::Rationals => 0,
            Scalars::PrimeField(p) => p,
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Scalars::Integers)
    }

    /// Canonical representative of an integer in these scalars.
    pub fn normalize(self, x: BigInt) -> BigInt {
        match self {
            Scalars::PrimeField(p) => x.mod_floor(&BigInt::from(p)),
            _ => x,
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for Scalars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalars::Integers => write!(f, "Z"),
            Scalars::Rationals => write!(f, "Q"),
            Scalars::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Scalars {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "Z" | "ZZ" => Ok(Scalars::Integers),
            "Q" | "QQ" => Ok(Scalars::Rationals),
            other => {
                let digits = other
                    .strip_prefix("GF")
                    .or_else(|| other.strip_prefix('F'))
                    .map(|d| d.trim_start_matches('(').trim_end_matches(')'));
                match digits.and_then(|d| d.parse::<u64>().ok()) {
                    Some(p) => Scalars::prime_field(p),
                    None => Err(Error::InvalidInput(format!("unknown scalars `{other}`"))),
                }
            }
        }
    }
}

impl TryFrom<String> for Scalars {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<Scalars> for String {
    fn from(s: Scalars) -> String {
        s.to_string()
    }
}

/// Dense row-major matrix with exact integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    scalars: Scalars,
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn zeros(scalars: Scalars, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            scalars,
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(scalars: Scalars, n: usize) -> Self {
        let mut m = Self::zeros(scalars, n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small integer rows. All rows must have equal length.
    pub fn from_rows(scalars: Scalars, rows: &[Vec<i64>]) -> Self {
        let big = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_big_rows(scalars, big, rows.first().map_or(0, Vec::len))
    }

    pub fn from_big_rows(scalars: Scalars, rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            entries.extend(r.into_iter().map(|x| scalars.normalize(x)));
        }
        ExactMatrix {
            scalars,
            rows: nrows,
            cols,
            entries,
        }
    }

    /// Builds a `rows × columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(scalars: Scalars, rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(scalars, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (r, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    m.set(r, c, x.clone());
                }
            }
        }
        m
    }

    pub fn scalars(&self) -> Scalars {
        self.scalars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: BigInt) {
        let x = self.scalars.normalize(x);
        self.entries[r * self.cols + c] = x;
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: &BigInt) {
        let idx = r * self.cols + c;
        let sum = &self.entries[idx] + x;
        self.entries[idx] = self.scalars.normalize(sum);
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.scalars, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.scalars, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        if let Scalars::PrimeField(_) = self.scalars {
            for e in &mut out.entries {
                *e = self.scalars.normalize(std::mem::take(e));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                self.scalars.normalize(acc)
            })
            .collect()
    }

    pub fn neg(&self) -> ExactMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            let x = -std::mem::take(e);
            *e = self.scalars.normalize(x);
        }
        out
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(self.scalars, self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[r * cols + c] = self.get(r, c).clone();
            }
            for c in 0..other.cols {
                out.entries[r * cols + self.cols + c] = other.get(r, c).clone();
            }
        }
        out
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        ExactMatrix {
            scalars: self.scalars,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> ExactMatrix {
        let cols: Vec<Vec<BigInt>> = idx.iter().map(|&c| self.column(c)).collect();
        Self::from_columns(self.scalars, self.rows, &cols)
    }

    pub fn rank(&self) -> usize {
        match self.scalars {
            Scalars::Integers => smith_normal_form(self).rank(),
            Scalars::Rationals => field::rank(&Rationals, self),
            Scalars::PrimeField(p) => field::rank(&PrimeField(p), self),
        }
    }

    /// Basis of the right kernel as integer column vectors.
    ///
    /// Over ℤ the result is a lattice basis of the (saturated) kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        match self.scalars {
            Scalars::Integers => snf::kernel_basis(self),
            Scalars::Rationals => field::kernel(&Rationals, self),
            Scalars::PrimeField(p) => field::kernel(&PrimeField(p), self),
        }
    }

    /// Determinant by fraction-free elimination (reduced mod p over 𝔽_p).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        self.scalars.normalize(sign * &a[n - 1][n - 1])
    }

    /// True when every entry of `self` lies in the span of the columns of `gens`
    /// (column-wise membership).
    pub fn columns_in_span_of(&self, gens: &ExactMatrix) -> bool {
        let span = Span::from_generators(gens);
        (0..self.cols).all(|c| span.contains_vector(&self.column(c)))
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn abs_cmp(a: &BigInt, b: &BigInt) -> std::cmp::Ordering {
    a.abs().cmp(&b.abs())
}

#[cfg(test)]
pub(crate) fn is_unit_integer(x: &BigInt) -> bool {
    x.is_one() || (-x).is_one()
}
