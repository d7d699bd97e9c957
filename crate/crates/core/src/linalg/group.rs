use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{snf, ExactMatrix, Scalars};

/// A finitely generated abelian group in invariant-factor form
/// `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d_i | d_{i+1}` and `d_i ≥ 2`.
///
/// Over a field the torsion list is empty and `free_rank` is the dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FGAbGroup {
    free_rank: usize,
    #[serde(with = "torsion_strings")]
    torsion: Vec<BigInt>,
}

mod torsion_strings {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(t.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect()
    }
}

impl FGAbGroup {
    pub fn zero() -> Self {
        FGAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FGAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::new(0, vec![BigInt::from(order)])
    }

    /// Normalizes arbitrary torsion coefficients into invariant factors.
    /// Zeros count as free summands, units are dropped.
    pub fn new(free_rank: usize, coefficients: Vec<BigInt>) -> Self {
        let mut free = free_rank;
        let mut coeffs = Vec::new();
        for c in coefficients {
            let c = c.abs();
            if c.is_zero() {
                free += 1;
            } else if !c.is_one() {
                coeffs.push(c);
            }
        }
        let torsion = if coeffs.len() <= 1 || is_chain(&coeffs) {
            coeffs
        } else {
            let n = coeffs.len();
            let mut diag = ExactMatrix::zeros(Scalars::Integers, n, n);
            for (i, c) in coeffs.into_iter().enumerate() {
                diag.set(i, i, c);
            }
            snf::smith_diagonal(&diag)
                .into_iter()
                .filter(|d| !d.is_one())
                .collect()
        };
        FGAbGroup {
            free_rank: free,
            torsion,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn direct_sum(&self, other: &FGAbGroup) -> FGAbGroup {
        let mut coeffs = self.torsion.clone();
        coeffs.extend(other.torsion.iter().cloned());
        FGAbGroup::new(self.free_rank + other.free_rank, coeffs)
    }

    /// `G ⊗ ℚ` as a rank.
    pub fn rational_rank(&self) -> usize {
        self.free_rank
    }

    /// `Hom(G, ℤ)`
    pub fn hom_to_integers(&self) -> FGAbGroup {
        FGAbGroup::free(self.free_rank)
    }

    /// `Ext(G, ℤ)`, the torsion subgroup.
    pub fn ext_to_integers(&self) -> FGAbGroup {
        FGAbGroup {
            free_rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    /// Same free rank and same torsion order.
    pub fn same_order_and_rank(&self, other: &FGAbGroup) -> bool {
        self.free_rank == other.free_rank && self.torsion_order() == other.torsion_order()
    }
}

fn is_chain(c: &[BigInt]) -> bool {
    c.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}

impl fmt::Display for FGAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|x| *x == d).count();
            if run == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{run}"));
            }
            i += run;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn invariant_factors_merge() {
        let g = FGAbGroup::new(0, big(&[2, 3]));
        assert_eq!(g.torsion(), &big(&[6])[..]);
        let g = FGAbGroup::new(1, big(&[4, 2, 1, 0]));
        assert_eq!(g.free_rank(), 2);
        assert_eq!(g.torsion(), &big(&[2, 4])[..]);
    }

    #[test]
    fn display_forms() {
        assert_eq!(FGAbGroup::zero().to_string(), "0");
        assert_eq!(FGAbGroup::new(1, big(&[2, 2])).to_string(), "Z + (Z/2)^2");
        assert_eq!(FGAbGroup::free(3).to_string(), "Z^3");
    }

    #[test]
    fn universal_coefficient_pieces() {
        let g = FGAbGroup::new(1, big(&[2, 2]));
        assert_eq!(g.hom_to_integers(), FGAbGroup::free(1));
        assert_eq!(g.ext_to_integers(), FGAbGroup::new(0, big(&[2, 2])));
    }
}
