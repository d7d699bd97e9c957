//! Submodules of `R^n` (lattices over ℤ, subspaces over fields) and the
//! subquotients `Z/B` that homology groups of presented complexes are made of.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::field::{convert, Echelon};
use super::{snf, ExactMatrix, FGAbGroup, PrimeField, Rationals, Scalars};
use crate::error::Error;

#[derive(Clone, Debug)]
enum Solver {
    /// `u · basis` is diagonal with entries `diag` on top and zero below.
    Lattice {
        u: ExactMatrix,
        diag: Vec<BigInt>,
    },
    Rational(Echelon<Rationals>),
    Prime(Echelon<PrimeField>),
}

/// Span of finitely many vectors in `R^ambient`, with an independent basis.
#[derive(Clone, Debug)]
pub struct Span {
    scalars: Scalars,
    ambient: usize,
    basis: Vec<Vec<BigInt>>,
    solver: Solver,
}

impl Span {
    pub fn zero(scalars: Scalars, ambient: usize) -> Span {
        Span::from_vectors(scalars, ambient, &[])
    }

    pub fn full(scalars: Scalars, ambient: usize) -> Span {
        Span::from_generators(&ExactMatrix::identity(scalars, ambient))
    }

    /// Span of the columns of `gens`.
    pub fn from_generators(gens: &ExactMatrix) -> Span {
        Span::from_vectors(gens.scalars(), gens.rows(), &gens.columns())
    }

    pub fn from_vectors(scalars: Scalars, ambient: usize, vectors: &[Vec<BigInt>]) -> Span {
        let vectors: Vec<&Vec<BigInt>> = vectors
            .iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
        match scalars {
            Scalars::Integers => {
                if vectors.is_empty() {
                    return Span {
                        scalars,
                        ambient,
                        basis: Vec::new(),
                        solver: Solver::Lattice {
                            u: ExactMatrix::identity(Scalars::Integers, ambient),
                            diag: Vec::new(),
                        },
                    };
                }
                let owned: Vec<Vec<BigInt>> = vectors.into_iter().cloned().collect();
                let gens = ExactMatrix::from_columns(scalars, ambient, &owned);
                let (u, diag, v) = snf::smith_left(&gens);
                let reduced = gens.mul(&v);
                let basis = (0..diag.len()).map(|c| reduced.column(c)).collect();
                Span {
                    scalars,
                    ambient,
                    basis,
                    solver: Solver::Lattice { u, diag },
                }
            }
            Scalars::Rationals => {
                let mut ech = Echelon::new(Rationals);
                let basis = vectors
                    .into_iter()
                    .filter(|v| ech.insert(convert(&Rationals, v)))
                    .cloned()
                    .collect();
                Span {
                    scalars,
                    ambient,
                    basis,
                    solver: Solver::Rational(ech),
                }
            }
            Scalars::PrimeField(p) => {
                let field = PrimeField(p);
                let mut ech = Echelon::new(field);
                let basis = vectors
                    .into_iter()
                    .map(|v| {
                        v.iter()
                            .map(|x| scalars.normalize(x.clone()))
                            .collect::<Vec<_>>()
                    })
                    .filter(|v| ech.insert(convert(&field, v)))
                    .collect();
                Span {
                    scalars,
                    ambient,
                    basis,
                    solver: Solver::Prime(ech),
                }
            }
        }
    }

    pub fn scalars(&self) -> Scalars {
        self.scalars
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// `ambient × rank` matrix whose columns are the basis.
    pub fn basis_matrix(&self) -> ExactMatrix {
        ExactMatrix::from_columns(self.scalars, self.ambient, &self.basis)
    }

    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector outside the ambient space");
        match &self.solver {
            Solver::Lattice { u, diag } => {
                let w = u.mul_vec(v);
                w.iter().enumerate().all(|(i, x)| match diag.get(i) {
                    Some(d) => x.is_multiple_of(d),
                    None => x.is_zero(),
                })
            }
            Solver::Rational(ech) => ech.contains(convert(&Rationals, v)),
            Solver::Prime(ech) => {
                let p = match self.scalars {
                    Scalars::PrimeField(p) => p,
                    _ => unreachable!(),
                };
                ech.contains(convert(&PrimeField(p), v))
            }
        }
    }

    /// Coordinates in the basis. Only meaningful over ℤ, where they are unique
    /// integers; returns `None` for vectors outside the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let Solver::Lattice { u, diag } = &self.solver else {
            panic!("integral coordinates requested over a field");
        };
        let w = u.mul_vec(v);
        let mut c = Vec::with_capacity(diag.len());
        for (i, x) in w.iter().enumerate() {
            match diag.get(i) {
                Some(d) => {
                    let (q, r) = x.div_rem(d);
                    if !r.is_zero() {
                        return None;
                    }
                    c.push(q);
                }
                None if !x.is_zero() => return None,
                None => {}
            }
        }
        Some(c)
    }

    pub fn contains(&self, other: &Span) -> bool {
        other.basis.iter().all(|v| self.contains_vector(v))
    }

    pub fn equals(&self, other: &Span) -> bool {
        self.rank() == other.rank() && self.contains(other) && other.contains(self)
    }

    pub fn sum(&self, other: &Span) -> Span {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Span::from_vectors(self.scalars, self.ambient, &vs)
    }

    /// Image under `map` (which must have `ambient` columns).
    pub fn image(&self, map: &ExactMatrix) -> Span {
        let vs: Vec<Vec<BigInt>> = self.basis.iter().map(|b| map.mul_vec(b)).collect();
        Span::from_vectors(self.scalars, map.rows(), &vs)
    }

    /// `{ x : map · x ∈ target }`.
    pub fn preimage(map: &ExactMatrix, target: &Span) -> Span {
        assert_eq!(map.rows(), target.ambient, "preimage target mismatch");
        let n = map.cols();
        let stacked = map.hstack(&target.basis_matrix());
        let kernel = stacked.kernel_basis();
        let projected: Vec<Vec<BigInt>> = kernel
            .into_iter()
            .map(|mut v| {
                v.truncate(n);
                v
            })
            .collect();
        Span::from_vectors(map.scalars(), n, &projected)
    }

    /// Invariants of `self / sub`; `sub` must be contained in `self`.
    pub fn quotient_group(&self, sub: &Span) -> FGAbGroup {
        match self.scalars {
            Scalars::Integers => {
                let coords: Vec<Vec<BigInt>> = sub
                    .basis
                    .iter()
                    .map(|v| self.coordinates(v).expect("subspan not contained"))
                    .collect();
                let rel = ExactMatrix::from_columns(Scalars::Integers, self.rank(), &coords);
                cokernel(&rel)
            }
            _ => FGAbGroup::free(self.rank() - sub.rank()),
        }
    }
}

/// Invariant factors of the cokernel of `a` (rows = generators, columns = relations).
pub fn cokernel(a: &ExactMatrix) -> FGAbGroup {
    match a.scalars() {
        Scalars::Integers => {
            let diag = snf::smith_diagonal(a);
            FGAbGroup::new(a.rows() - diag.len(), diag)
        }
        _ => FGAbGroup::free(a.rows() - a.rank()),
    }
}

/// A homology group `Z/B` with its cycle and boundary spans kept around so that
/// maps between homology groups can be examined.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub cycles: Span,
    pub boundaries: Span,
    pub group: FGAbGroup,
}

impl Subquotient {
    /// A presented group `R^n / relations` seen as the homology of a one-term complex.
    pub fn presented(relations: &ExactMatrix) -> Subquotient {
        let cycles = Span::full(relations.scalars(), relations.rows());
        let boundaries = Span::from_generators(relations);
        let group = cycles.quotient_group(&boundaries);
        Subquotient {
            cycles,
            boundaries,
            group,
        }
    }
}

/// Homology at the middle of `A →d_in B →d_out C` where `B` and `C` are
/// presented as `R^n / relations`. The maps are given on free lifts.
pub fn subquotient_homology(
    d_in: &ExactMatrix,
    d_out: &ExactMatrix,
    relations: &ExactMatrix,
    target_relations: &ExactMatrix,
) -> Result<Subquotient, Error> {
    let target = Span::from_generators(target_relations);
    let cycles = Span::preimage(d_out, &target);
    let boundaries = Span::from_generators(&d_in.hstack(relations));
    if !cycles.contains(&boundaries) {
        return Err(Error::NotAComplex);
    }
    let group = cycles.quotient_group(&boundaries);
    Ok(Subquotient {
        cycles,
        boundaries,
        group,
    })
}

/// `ker(d_out) / im(d_in)` on free modules.
pub fn homology_at(d_in: &ExactMatrix, d_out: &ExactMatrix) -> Result<FGAbGroup, Error> {
    let s = d_in.scalars();
    if d_in.rows() != d_out.cols() {
        return Err(Error::InvalidInput("composable maps expected".into()));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::NotAComplex);
    }
    let none_mid = ExactMatrix::zeros(s, d_in.rows(), 0);
    let none_out = ExactMatrix::zeros(s, d_out.rows(), 0);
    Ok(subquotient_homology(d_in, d_out, &none_mid, &none_out)?.group)
}

/// Whether the map induced by the chain-level matrix `phi` is onto.
pub fn induced_map_is_surjective(phi: &ExactMatrix, from: &Subquotient, to: &Subquotient) -> bool {
    let image = from.cycles.image(phi).sum(&to.boundaries);
    image.contains(&to.cycles)
}

/// Isomorphism test: onto plus abstractly isomorphic (f.g. modules are Hopfian).
pub fn induced_map_is_iso(phi: &ExactMatrix, from: &Subquotient, to: &Subquotient) -> bool {
    from.group == to.group && induced_map_is_surjective(phi, from, to)
}

/// Exactness of `H_a →f H_b →g H_c` at `H_b`, with `f`, `g` given on free lifts.
pub fn is_exact_at(
    f: &ExactMatrix,
    a: &Subquotient,
    b: &Subquotient,
    g: &ExactMatrix,
    c: &Subquotient,
) -> bool {
    let image = a.cycles.image(f).sum(&b.boundaries);
    let zb = b.cycles.basis_matrix();
    let coords = Span::preimage(&g.mul(&zb), &c.boundaries);
    let kernel = coords.image(&zb).sum(&b.boundaries);
    image.equals(&kernel)
}
