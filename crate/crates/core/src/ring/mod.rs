//! Connective graded rings presented as `S[x₁,…,x_n] / (relations)`.

mod poly;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{cokernel, ExactMatrix, FGAbGroup, Scalars};

pub use poly::{monomial_degree, monomial_mul, Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub degree: i64,
}

/// Monomials of one internal degree, listed in descending lexicographic order
/// of exponent vectors (so `u⁶, u³v, v²` for `|u| = 2`, `|v| = 6`).
#[derive(Debug)]
pub struct DegreeData {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeData {
    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// A realized degree of the ring: monomial basis, relation multiples as
/// columns, and the resulting group.
#[derive(Clone, Debug)]
pub struct DegreeBasis {
    pub degree: i64,
    pub monomials: Vec<Monomial>,
    pub presentation: ExactMatrix,
    pub group: FGAbGroup,
}

#[derive(Debug)]
pub struct GradedRing {
    scalars: Scalars,
    variables: Vec<Variable>,
    names: Vec<String>,
    degrees: Vec<i64>,
    relations: Vec<Poly>,
    relation_degrees: Vec<i64>,
    monomial_cache: RwLock<HashMap<i64, Arc<DegreeData>>>,
    basis_cache: RwLock<HashMap<i64, Arc<DegreeBasis>>>,
}

impl GradedRing {
    /// Polynomial ring modulo homogeneous relations. Odd-degree variables are
    /// refused outside characteristic 2; see [`GradedRing::new_strict`].
    pub fn new(
        scalars: Scalars,
        variables: Vec<Variable>,
        relations: Vec<Poly>,
    ) -> Result<Self, Error> {
        if scalars.characteristic() != 2 {
            if let Some(v) = variables.iter().find(|v| v.degree % 2 != 0) {
                return Err(Error::InvalidInput(format!(
                    "variable `{}` has odd degree {}; graded and strict commutativity differ here",
                    v.name, v.degree
                )));
            }
        }
        Self::new_strict(scalars, variables, relations)
    }

    /// Like [`GradedRing::new`] but accepts odd-degree variables, treating the
    /// ring as strictly commutative.
    pub fn new_strict(
        scalars: Scalars,
        variables: Vec<Variable>,
        relations: Vec<Poly>,
    ) -> Result<Self, Error> {
        for (i, v) in variables.iter().enumerate() {
            if v.degree < 1 {
                return Err(Error::InvalidInput(format!(
                    "variable `{}` must have positive degree",
                    v.name
                )));
            }
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidInput(format!(
                    "duplicate variable `{}`",
                    v.name
                )));
            }
        }
        let names: Vec<String> = variables.iter().map(|v| v.name.clone()).collect();
        let degrees: Vec<i64> = variables.iter().map(|v| v.degree).collect();
        let mut rels = Vec::new();
        let mut rel_degrees = Vec::new();
        for r in relations {
            let r = r.map_coefficients(|c| scalars.normalize(c.clone()));
            match r.homogeneous_degree(&degrees) {
                Err(_) => return Err(Error::InhomogeneousElement(r.display(&names).to_string())),
                Ok(None) => {}
                Ok(Some(d)) => {
                    rels.push(r);
                    rel_degrees.push(d);
                }
            }
        }
        Ok(GradedRing {
            scalars,
            variables,
            names,
            degrees,
            relations: rels,
            relation_degrees: rel_degrees,
            monomial_cache: RwLock::new(HashMap::new()),
            basis_cache: RwLock::new(HashMap::new()),
        })
    }

    /// Parses relations written over the given variables.
    pub fn parse(
        scalars: Scalars,
        variables: Vec<Variable>,
        relations: &[&str],
    ) -> Result<Self, Error> {
        let names: Vec<String> = variables.iter().map(|v| v.name.clone()).collect();
        let rels = relations
            .iter()
            .map(|r| Poly::parse(r, &names))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(scalars, variables, rels)
    }

    pub fn scalars(&self) -> Scalars {
        self.scalars
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn relation_degrees(&self) -> &[i64] {
        &self.relation_degrees
    }

    pub fn var(&self, name: &str) -> Option<Poly> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(Poly::var(i, self.nvars()))
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.nvars())
    }

    pub fn parse_element(&self, src: &str) -> Result<Poly, Error> {
        Ok(self.normalize(&Poly::parse(src, &self.names)?))
    }

    pub fn normalize(&self, p: &Poly) -> Poly {
        let s = self.scalars;
        p.map_coefficients(|c| s.normalize(c.clone()))
    }

    pub fn display(&self, p: &Poly) -> String {
        p.display(&self.names).to_string()
    }

    /// Degree of a homogeneous element; `Ok(None)` for zero.
    pub fn degree_of(&self, p: &Poly) -> Result<Option<i64>, Error> {
        p.homogeneous_degree(&self.degrees)
            .map_err(|_| Error::InhomogeneousElement(self.display(p)))
    }

    pub fn min_variable_degree(&self) -> i64 {
        self.degrees.iter().copied().min().unwrap_or(1)
    }

    pub fn max_variable_degree(&self) -> i64 {
        self.degrees.iter().copied().max().unwrap_or(1)
    }

    /// Monomials of internal degree `d` (empty for `d < 0`).
    pub fn monomials(&self, d: i64) -> Arc<DegreeData> {
        if let Some(hit) = self.monomial_cache.read().expect("cache lock").get(&d) {
            return hit.clone();
        }
        let mut monomials = Vec::new();
        if d >= 0 {
            let mut current = vec![0u32; self.nvars()];
            enumerate(&self.degrees, 0, d, &mut current, &mut monomials);
        }
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let data = Arc::new(DegreeData { monomials, index });
        self.monomial_cache
            .write()
            .expect("cache lock")
            .entry(d)
            .or_insert(data)
            .clone()
    }

    /// Coordinates of a homogeneous polynomial of degree `d` in the monomial basis.
    pub fn coordinates(&self, p: &Poly, d: i64) -> Vec<BigInt> {
        let data = self.monomials(d);
        let mut v = vec![BigInt::from(0); data.len()];
        for (m, c) in p.terms() {
            let i = data
                .index_of(m)
                .expect("polynomial outside the requested degree");
            v[i] = self.scalars.normalize(c.clone());
        }
        v
    }

    /// Products `relation · monomial` landing in degree `d`.
    pub fn relation_multiples(&self, d: i64) -> Vec<Poly> {
        let mut out = Vec::new();
        for (r, &rd) in self.relations.iter().zip(&self.relation_degrees) {
            for m in &self.monomials(d - rd).monomials {
                out.push(r.mul(&Poly::term(m.clone(), 1)));
            }
        }
        out
    }

    pub fn degree_basis(&self, d: i64) -> Arc<DegreeBasis> {
        if let Some(hit) = self.basis_cache.read().expect("cache lock").get(&d) {
            return hit.clone();
        }
        let basis = Arc::new(self.compute_degree_basis(d));
        self.basis_cache
            .write()
            .expect("cache lock")
            .entry(d)
            .or_insert(basis)
            .clone()
    }

    fn compute_degree_basis(&self, d: i64) -> DegreeBasis {
        let data = self.monomials(d);
        let columns: Vec<Vec<BigInt>> = self
            .relation_multiples(d)
            .iter()
            .map(|p| self.coordinates(p, d))
            .collect();
        let presentation = ExactMatrix::from_columns(self.scalars, data.len(), &columns);
        let group = cokernel(&presentation);
        DegreeBasis {
            degree: d,
            monomials: data.monomials.clone(),
            presentation,
            group,
        }
    }

    /// Multiplication by a homogeneous `f` from degree `d` to degree `d + |f|`,
    /// on monomial bases.
    pub fn mult_matrix(&self, f: &Poly, d: i64) -> Result<ExactMatrix, Error> {
        match self.degree_of(f)? {
            Some(e) => Ok(self.mult_matrix_of_degree(f, e, d)),
            None => Err(Error::InhomogeneousElement(
                "the zero element has no degree; use mult_matrix_of_degree".into(),
            )),
        }
    }

    /// As [`GradedRing::mult_matrix`] with the degree of `f` supplied (needed for zero).
    pub fn mult_matrix_of_degree(&self, f: &Poly, e: i64, d: i64) -> ExactMatrix {
        let src = self.monomials(d);
        let dst = self.monomials(d + e);
        let mut m = ExactMatrix::zeros(self.scalars, dst.len(), src.len());
        for (c, mono) in src.monomials.iter().enumerate() {
            for (fm, fc) in f.terms() {
                let r = dst
                    .index_of(&monomial_mul(mono, fm))
                    .expect("degree bookkeeping");
                m.add_to(r, c, fc);
            }
        }
        m
    }
}

fn enumerate(
    degrees: &[i64],
    i: usize,
    remaining: i64,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if i == degrees.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    let max = remaining / degrees[i];
    for e in (0..=max).rev() {
        current[i] = e as u32;
        enumerate(degrees, i + 1, remaining - e * degrees[i], current, out);
    }
    current[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var(name: &str, degree: i64) -> Variable {
        Variable {
            name: name.into(),
            degree,
        }
    }

    fn stiefel() -> GradedRing {
        GradedRing::parse(Scalars::Integers, vec![var("u", 2), var("v", 6)], &["2*u"]).unwrap()
    }

    fn z2() -> FGAbGroup {
        FGAbGroup::cyclic(2)
    }

    #[test]
    fn degree_basis_examples() {
        let r = stiefel();
        assert_eq!(r.degree_basis(0).group, FGAbGroup::free(1));
        assert_eq!(r.degree_basis(2).group, z2());
        assert_eq!(
            r.degree_basis(12).group,
            FGAbGroup::free(1).direct_sum(&z2()).direct_sum(&z2())
        );
        assert_eq!(r.degree_basis(3).group, FGAbGroup::zero());
        assert_eq!(r.degree_basis(-4).group, FGAbGroup::zero());
        assert_eq!(
            r.degree_basis(12).monomials,
            vec![vec![6, 0], vec![3, 1], vec![0, 2]]
        );
    }

    #[test]
    fn mult_matrix_examples() {
        let q = GradedRing::parse(Scalars::Rationals, vec![var("v", 6)], &[]).unwrap();
        let v = q.var("v").unwrap();
        assert_eq!(
            q.mult_matrix(&v, 0).unwrap(),
            ExactMatrix::from_rows(Scalars::Rationals, &[vec![1]])
        );

        let r = stiefel();
        let u = r.var("u").unwrap();
        assert_eq!(
            r.mult_matrix(&u, 2).unwrap(),
            ExactMatrix::from_rows(Scalars::Integers, &[vec![1]])
        );
        // u ↦ uv inside degree 8, whose basis is u⁴, uv
        let v = r.var("v").unwrap();
        let m = r.mult_matrix(&v, 2).unwrap();
        assert_eq!(
            m,
            ExactMatrix::from_rows(Scalars::Integers, &[vec![0], vec![1]])
        );
        assert!(r.mult_matrix(&u.add(&v), 0).is_err());
    }

    #[test]
    fn odd_degrees_need_characteristic_two() {
        let vars = vec![var("u", 2), var("y", 3)];
        assert!(GradedRing::new(Scalars::Integers, vars.clone(), vec![]).is_err());
        assert!(GradedRing::new(Scalars::PrimeField(2), vars.clone(), vec![]).is_ok());
        assert!(GradedRing::new_strict(Scalars::Integers, vars, vec![]).is_ok());
        assert!(GradedRing::new(Scalars::Integers, vec![var("u", 0)], vec![]).is_err());
    }

    #[test]
    fn inhomogeneous_relation_rejected() {
        let err = GradedRing::parse(
            Scalars::Integers,
            vec![var("u", 2), var("v", 6)],
            &["u + v"],
        );
        assert!(matches!(err, Err(Error::InhomogeneousElement(_))));
    }

    #[test]
    fn cache_matches_recomputation() {
        let r = stiefel();
        for d in 0..30 {
            let cached = r.degree_basis(d);
            let again = r.degree_basis(d);
            let fresh = r.compute_degree_basis(d);
            assert!(Arc::ptr_eq(&cached, &again));
            assert_eq!(cached.group, fresh.group);
            assert_eq!(cached.presentation, fresh.presentation);
            assert_eq!(cached.monomials, fresh.monomials);
        }
    }

    proptest! {
        #[test]
        fn hilbert_function_of_free_ring(d in 0i64..120) {
            let r = GradedRing::parse(Scalars::Integers, vec![var("u", 2), var("v", 6)], &[]).unwrap();
            let count = (0..=d / 2).filter(|a| (d - 2 * a) % 6 == 0).count();
            prop_assert_eq!(r.monomials(d).len(), count);
        }

        #[test]
        fn multiplication_is_functorial(a in 0u32..4, b in 0u32..3, c in 0u32..4, e in 0u32..3, d in 0i64..24) {
            let r = stiefel();
            let f = Poly::term(vec![a, b], 1);
            let g = Poly::term(vec![c, e], 1);
            let gd = r.degree_of(&g).unwrap().unwrap();
            let lhs = r.mult_matrix(&f, d + gd).unwrap().mul(&r.mult_matrix(&g, d).unwrap());
            let rhs = r.mult_matrix(&f.mul(&g), d).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
