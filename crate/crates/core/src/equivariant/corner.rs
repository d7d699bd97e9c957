use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{graded_dual, q, Element, Side, TableAlgebra, TableModule, Q};
use crate::error::Error;
use crate::linalg::{FGAbGroup, RationalMatrix};
use crate::specpage::{BigradedPage, Grading};

fn rank_of(cols: &[Vec<Q>], len: usize) -> usize {
    if cols.is_empty() || len == 0 {
        0
    } else {
        RationalMatrix::from_columns(len, cols).rank()
    }
}

/// Greedily extends `base` by the vectors of `candidates` that enlarge its span.
/// Returns the indices of the candidates taken.
fn extend_basis(base: &[Vec<Q>], candidates: &[Vec<Q>], len: usize) -> Vec<usize> {
    let mut span = base.to_vec();
    let mut r = rank_of(&span, len);
    let mut taken = Vec::new();
    for (k, v) in candidates.iter().enumerate() {
        span.push(v.clone());
        let next = rank_of(&span, len);
        if next > r {
            r = next;
            taken.push(k);
        } else {
            span.pop();
        }
    }
    taken
}

fn independent(cols: &[Vec<Q>], len: usize) -> Vec<Vec<Q>> {
    extend_basis(&[], cols, len)
        .into_iter()
        .map(|k| cols[k].clone())
        .collect()
}

fn coordinates(basis: &[Vec<Q>], len: usize, v: &[Q]) -> Vec<Q> {
    if basis.is_empty() {
        return Vec::new();
    }
    RationalMatrix::from_columns(len, basis)
        .solve(v)
        .expect("vector lies in the span")
}

fn columns(m: &RationalMatrix) -> Vec<Vec<Q>> {
    (0..m.cols()).map(|c| m.column(c)).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerDims {
    pub total: usize,
    pub eps_eps: usize,
    pub eps_omega: usize,
    pub omega_eps: usize,
    pub omega_omega: usize,
    /// `ωA`
    pub omega_left: usize,
    /// `Aω`
    pub omega_right: usize,
}

/// `ε = (1/|G|)Σg`, `ω = 1 − ε` and the pieces of `A` they cut out.
#[derive(Clone, Debug)]
pub struct CornerData {
    pub epsilon: Element,
    pub omega: Element,
    dims: BTreeMap<i64, CornerDims>,
    corner_basis: BTreeMap<i64, Vec<Vec<Q>>>,
}

pub fn idempotents(a: &TableAlgebra) -> Result<CornerData, Error> {
    let group = a.group_elements();
    if group.is_empty() {
        return Err(Error::InvalidInput(
            "the algebra carries no group elements".into(),
        ));
    }
    let inv = Q::new(One::one(), (group.len() as i64).into());
    let epsilon = group
        .iter()
        .fold(a.zero(0), |acc, g| acc.add(g))
        .scale(&inv);
    let omega = a.unit().add(&epsilon.scale(&q(-1)));
    let mut dims = BTreeMap::new();
    let mut corner_basis = BTreeMap::new();
    for d in 0..=a.top() {
        let n = a.dim(d);
        let sandwich = |x: &Element, y: &Element| a.left_matrix(x, d).mul(&a.right_matrix(y, d));
        let ww = sandwich(&omega, &omega);
        dims.insert(
            d,
            CornerDims {
                total: n,
                eps_eps: sandwich(&epsilon, &epsilon).rank(),
                eps_omega: sandwich(&epsilon, &omega).rank(),
                omega_eps: sandwich(&omega, &epsilon).rank(),
                omega_omega: ww.rank(),
                omega_left: a.left_matrix(&omega, d).rank(),
                omega_right: a.right_matrix(&omega, d).rank(),
            },
        );
        corner_basis.insert(d, independent(&columns(&ww), n));
    }
    Ok(CornerData {
        epsilon,
        omega,
        dims,
        corner_basis,
    })
}

impl CornerData {
    /// `ε + ω = 1`, both idempotent, mutually orthogonal.
    pub fn identities_hold(&self, a: &TableAlgebra) -> bool {
        let (e, w) = (&self.epsilon, &self.omega);
        let zero = a.zero(0);
        e.add(w) == a.unit()
            && a.mul(e, e).as_ref() == Some(e)
            && a.mul(w, w).as_ref() == Some(w)
            && a.mul(e, w) == Some(zero.clone())
            && a.mul(w, e) == Some(zero)
    }

    /// Zero outside the algebra's degrees.
    pub fn dims(&self, d: i64) -> CornerDims {
        self.dims.get(&d).copied().unwrap_or_default()
    }

    /// Basis of `ωAω` in degree `d`, in the algebra's coordinates.
    pub fn corner_basis(&self, d: i64) -> &[Vec<Q>] {
        self.corner_basis.get(&d).map_or(&[], Vec::as_slice)
    }
}

/// The corner algebra `S = ωAω`, when it is small enough to resolve over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CornerShape {
    Zero,
    Field,
    /// `ℚ[y]` with `y` of the given degree.
    Polynomial {
        degree: i64,
        generator: Element,
    },
}

fn corner_shape(a: &TableAlgebra, corner: &CornerData) -> Result<CornerShape, Error> {
    match corner.corner_basis(0).len() {
        0 => return Ok(CornerShape::Zero),
        1 => {}
        n => {
            return Err(Error::CornerNotResolvable(format!(
                "corner algebra has dimension {n} in degree 0"
            )))
        }
    }
    let Some(e) = (1..=a.top()).find(|&d| !corner.corner_basis(d).is_empty()) else {
        return Ok(CornerShape::Field);
    };
    if corner.corner_basis(e).len() != 1 {
        return Err(Error::CornerNotResolvable(format!(
            "lowest positive corner degree {e} is not one-dimensional"
        )));
    }
    let y = Element {
        degree: e,
        coords: corner.corner_basis(e)[0].clone(),
    };
    for d in 1..=a.top() {
        let expected = usize::from(d % e == 0);
        let got = corner.corner_basis(d).len();
        let spans = d % e != 0 || a.pow(&y, (d / e) as u32).is_some_and(|p| !p.is_zero());
        if got != expected || !spans {
            return Err(Error::CornerNotResolvable(format!(
                "corner algebra is not a one-variable polynomial algebra in degree {d}"
            )));
        }
    }
    Ok(CornerShape::Polynomial {
        degree: e,
        generator: y,
    })
}

/// Degree of a relation and its terms `(generator, power of y, coefficient)`.
pub type Relation = (i64, Vec<(usize, u32, Q)>);

type Blocks = Vec<Vec<Vec<Q>>>;

/// A free resolution `0 → F₁ → F₀ → Mω` over the corner algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerResolution {
    /// Degree of each generator of `F₀` and its image in the resolved module.
    pub generators: Vec<(i64, Vec<Q>)>,
    pub relations: Vec<Relation>,
}

struct Resolver<'a> {
    a: &'a TableAlgebra,
    omega: &'a Element,
    shape: &'a CornerShape,
    module: &'a TableModule,
}

impl Resolver<'_> {
    fn y_power(&self, m: u32) -> Element {
        match self.shape {
            CornerShape::Polynomial { generator, .. } if m > 0 => {
                self.a.pow(generator, m).expect("inside window")
            }
            _ => self.omega.clone(),
        }
    }

    fn step(&self) -> Option<i64> {
        match self.shape {
            CornerShape::Polynomial { degree, .. } => Some(*degree),
            _ => None,
        }
    }

    fn piece(&self, d: i64) -> Result<Vec<Vec<Q>>, Error> {
        let n = self.module.dim(d);
        Ok(independent(&columns(&self.module.act(self.omega, d)?), n))
    }

    fn resolve(&self) -> Result<CornerResolution, Error> {
        let (lo, hi) = self.module.range();
        let mut generators: Vec<(i64, Vec<Q>)> = Vec::new();
        let mut relations: Vec<Relation> = Vec::new();
        if *self.shape == CornerShape::Zero {
            return Ok(CornerResolution {
                generators,
                relations,
            });
        }
        let step = self.step();
        let top = match step {
            Some(e) if self.module.is_bounded() => hi + e,
            _ => hi,
        };
        if step.is_some() && top - lo > self.a.top() {
            return Err(Error::WindowTooSmall(format!(
                "the algebra window ends at {} but relations reach degree {top}",
                self.a.top()
            )));
        }
        let mut kernels: BTreeMap<i64, Vec<Vec<Q>>> = BTreeMap::new();
        for d in lo..=top {
            let n = self.module.dim(d);
            let piece = if d <= hi { self.piece(d)? } else { Vec::new() };
            let hit: Vec<Vec<Q>> = match step {
                Some(e) if d - e >= lo && d - e <= hi => {
                    let y = self.y_power(1);
                    let act = self.module.act(&y, d - e)?;
                    self.piece(d - e)?.iter().map(|v| act.mul_vec(v)).collect()
                }
                _ => Vec::new(),
            };
            for k in extend_basis(&hit, &piece, n) {
                generators.push((d, piece[k].clone()));
            }
            let Some(e) = step else { continue };
            // F₀ in degree d and its map onto the module.
            let basis = free_basis(generators.iter().map(|g| g.0), e, d);
            let images: Vec<Vec<Q>> = basis
                .iter()
                .map(|&(i, m)| {
                    let (a_i, p) = &generators[i];
                    self.module
                        .act(&self.y_power(m), *a_i)
                        .map(|x| x.mul_vec(p))
                })
                .collect::<Result<_, _>>()?;
            let kernel = if n == 0 {
                identity_columns(basis.len())
            } else {
                RationalMatrix::from_columns(n, &images).kernel()
            };
            let shifted: Vec<Vec<Q>> = kernels
                .get(&(d - e))
                .map(|prev| {
                    let prev_basis = free_basis(generators.iter().map(|g| g.0), e, d - e);
                    prev.iter()
                        .map(|v| {
                            let mut out = vec![q(0); basis.len()];
                            for (c, &(i, m)) in v.iter().zip(&prev_basis) {
                                let pos = basis
                                    .iter()
                                    .position(|&b| b == (i, m + 1))
                                    .expect("shifted basis");
                                out[pos] = c.clone();
                            }
                            out
                        })
                        .collect()
                })
                .unwrap_or_default();
            for k in extend_basis(&shifted, &kernel, basis.len()) {
                let terms = kernel[k]
                    .iter()
                    .zip(&basis)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, &(i, m))| (i, m, c.clone()))
                    .collect();
                relations.push((d, terms));
            }
            // The relations must map injectively into F₀.
            let f1 = free_basis(relations.iter().map(|r| r.0), e, d);
            let cols: Vec<Vec<Q>> = f1
                .iter()
                .map(|&(k, m)| {
                    let mut out = vec![q(0); basis.len()];
                    for (i, mi, c) in &relations[k].1 {
                        let pos = basis
                            .iter()
                            .position(|&b| b == (*i, mi + m))
                            .expect("relation term");
                        out[pos] += c;
                    }
                    out
                })
                .collect();
            if rank_of(&cols, basis.len()) != f1.len() {
                return Err(Error::CornerNotResolvable(format!(
                    "relations are not free in degree {d}"
                )));
            }
            kernels.insert(d, kernel);
        }
        Ok(CornerResolution {
            generators,
            relations,
        })
    }
}

fn identity_columns(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| {
            let mut v = vec![q(0); n];
            v[i] = q(1);
            v
        })
        .collect()
}

/// Basis `(generator, power)` of a free module over `ℚ[y]`, `|y| = e`, in degree `d`.
fn free_basis(degrees: impl Iterator<Item = i64>, e: i64, d: i64) -> Vec<(usize, u32)> {
    degrees
        .enumerate()
        .filter(|&(_, a)| a <= d && (d - a) % e == 0)
        .map(|(i, a)| (i, ((d - a) / e) as u32))
        .collect()
}

/// `Hom` out of the resolution into `A^√ω`, one internal degree at a time.
struct HomComplex<'a> {
    a: &'a TableAlgebra,
    omega: &'a Element,
    resolver: &'a Resolver<'a>,
    resolution: &'a CornerResolution,
}

impl HomComplex<'_> {
    /// Basis of `(A^√ω)⟨k⟩` as functionals on `A⟨−k⟩`.
    fn target(&self, k: i64) -> Result<Vec<Vec<Q>>, Error> {
        let d = -k;
        if d < 0 || self.a.dim(d) == 0 {
            return Ok(Vec::new());
        }
        if d > self.a.top() {
            return Err(Error::WindowTooSmall(format!(
                "needs the algebra in degree {d}, beyond its window {}",
                self.a.top()
            )));
        }
        let fixed = self.a.left_matrix(self.omega, d).transpose();
        Ok(independent(&columns(&fixed), self.a.dim(d)))
    }

    fn blocks(&self, degrees: &[i64], j: i64) -> Result<Blocks, Error> {
        degrees.iter().map(|&a| self.target(a + j)).collect()
    }

    /// The differential `Hom(F₀, N) → Hom(F₁, N)` in degree `j`, with the block bases.
    fn delta(&self, j: i64) -> Result<(RationalMatrix, Blocks, Blocks), Error> {
        let gens: Vec<i64> = self.resolution.generators.iter().map(|g| g.0).collect();
        let rels: Vec<i64> = self.resolution.relations.iter().map(|r| r.0).collect();
        let c0 = self.blocks(&gens, j)?;
        let c1 = self.blocks(&rels, j)?;
        let dim0: usize = c0.iter().map(Vec::len).sum();
        let dim1: usize = c1.iter().map(Vec::len).sum();
        let off1: Vec<usize> = c1
            .iter()
            .scan(0, |s, b| Some(std::mem::replace(s, *s + b.len())))
            .collect();
        let mut cols = Vec::with_capacity(dim0);
        for (i, block) in c0.iter().enumerate() {
            for f in block {
                let mut col = vec![q(0); dim1];
                for (k, (b_k, terms)) in self.resolution.relations.iter().enumerate() {
                    if c1[k].is_empty() {
                        continue;
                    }
                    let src_degree = -(b_k + j);
                    let mut row = vec![q(0); self.a.dim(src_degree)];
                    for (gi, m, c) in terms {
                        if *gi != i {
                            continue;
                        }
                        let s = self.resolver.y_power(*m);
                        let ls = self.a.left_matrix(&s, src_degree);
                        for (r, x) in row.iter_mut().enumerate() {
                            let v: Q = f.iter().zip(ls.column(r)).map(|(a, b)| a * b).sum();
                            *x += c * v;
                        }
                    }
                    let coords = coordinates(&c1[k], self.a.dim(src_degree), &row);
                    for (t, x) in coords.into_iter().enumerate() {
                        col[off1[k] + t] = x;
                    }
                }
                cols.push(col);
            }
        }
        Ok((RationalMatrix::from_columns(dim1, &cols), c0, c1))
    }
}

/// `Ext^p_S(Mω, A^√ω)⟨j⟩` with `M` the dual of a left module.
#[derive(Clone, Debug)]
pub struct CornerNull {
    pub shape: CornerShape,
    pub resolution: CornerResolution,
    /// `(p, j) → dimension`.
    pub ext: BTreeMap<(usize, i64), usize>,
}

impl CornerNull {
    pub fn ext(&self, p: usize, j: i64) -> usize {
        self.ext.get(&(p, j)).copied().unwrap_or(0)
    }
}

fn ext_tables(
    a: &TableAlgebra,
    corner: &CornerData,
    dual: &TableModule,
    lo: i64,
    hi: i64,
) -> Result<(CornerNull, BTreeMap<i64, RationalMatrix>), Error> {
    let shape = corner_shape(a, corner)?;
    let resolver = Resolver {
        a,
        omega: &corner.omega,
        shape: &shape,
        module: dual,
    };
    let resolution = resolver.resolve()?;
    let hom = HomComplex {
        a,
        omega: &corner.omega,
        resolver: &resolver,
        resolution: &resolution,
    };
    let mut ext = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    for j in lo..=hi {
        let (delta, c0, c1) = hom.delta(j)?;
        let dim0: usize = c0.iter().map(Vec::len).sum();
        let dim1: usize = c1.iter().map(Vec::len).sum();
        let r = if dim0 == 0 || dim1 == 0 {
            0
        } else {
            delta.rank()
        };
        ext.insert((0, j), dim0 - r);
        ext.insert((1, j), dim1 - r);
        deltas.insert(j, delta);
    }
    Ok((
        CornerNull {
            shape,
            resolution,
            ext,
        },
        deltas,
    ))
}

/// Nullification of a bounded left module through the corner algebra, as
/// `Ext` of its dual's corner piece into `A^√ω`, for internal degrees `lo..=hi`.
pub fn null_via_corner(
    a: &TableAlgebra,
    corner: &CornerData,
    m: &TableModule,
    lo: i64,
    hi: i64,
) -> Result<CornerNull, Error> {
    if m.side != Side::Left {
        return Err(Error::InvalidInput("expected a left module".into()));
    }
    ext_tables(a, corner, &graded_dual(m), lo, hi).map(|(n, _)| n)
}

#[derive(Clone, Debug)]
pub struct FiberPage {
    pub page: BigradedPage,
    pub null: CornerNull,
    /// Column zero agrees with the group invariants of the cohomology.
    pub column_zero_is_invariants: bool,
}

/// The E²-page for a fiber whose homology `hf` is a bounded right module over
/// `A = U ⋊ G`. `q` is cohomological; the page uses upper grading on `q_lo..=q_hi`.
pub fn fiber_page(
    a: &TableAlgebra,
    corner: &CornerData,
    hf: &TableModule,
    q_lo: i64,
    q_hi: i64,
) -> Result<FiberPage, Error> {
    if hf.side != Side::Right || !hf.is_bounded() {
        return Err(Error::InvalidInput(
            "fiber homology must be a bounded right module".into(),
        ));
    }
    let (null, deltas) = ext_tables(a, corner, hf, -q_hi, -q_lo)?;
    let shape = null.shape.clone();
    let resolver = Resolver {
        a,
        omega: &corner.omega,
        shape: &shape,
        module: hf,
    };
    let hom = HomComplex {
        a,
        omega: &corner.omega,
        resolver: &resolver,
        resolution: &null.resolution,
    };
    let mut entries = Vec::new();
    let mut invariants_ok = true;
    for qd in q_lo..=q_hi {
        let j = -qd;
        let n = hf.dim(-j);
        let c0 = hom.blocks(
            &null
                .resolution
                .generators
                .iter()
                .map(|g| g.0)
                .collect::<Vec<_>>(),
            j,
        )?;
        let dim0: usize = c0.iter().map(Vec::len).sum();
        // Cohomology class t ↦ (p_i ↦ (b ↦ t(p_i · b))).
        let mut cols = Vec::with_capacity(n);
        for t in 0..n {
            let mut col = Vec::with_capacity(dim0);
            for (i, (a_i, p)) in null.resolution.generators.iter().enumerate() {
                if c0[i].is_empty() {
                    continue;
                }
                let d = -(a_i + j);
                let row: Vec<Q> = (0..a.dim(d))
                    .map(|b| {
                        hf.act(&a.basis(d, b), *a_i)
                            .map(|x| x.mul_vec(p)[t].clone())
                    })
                    .collect::<Result<_, _>>()?;
                col.extend(coordinates(&c0[i], a.dim(d), &row));
            }
            cols.push(col);
        }
        let mu = RationalMatrix::from_columns(dim0, &cols);
        let rank = if n == 0 || dim0 == 0 { 0 } else { mu.rank() };
        debug_assert!(n == 0 || deltas[&j].rows() == 0 || deltas[&j].mul(&mu).is_zero());
        let kernel = if dim0 == 0 {
            identity_columns(n)
        } else {
            mu.kernel()
        };

        let mut fixed_rows = RationalMatrix::zeros(0, n);
        for g in a.group_elements() {
            let x = hf.act(g, -j)?.transpose().sub(&RationalMatrix::identity(n));
            fixed_rows = fixed_rows.vstack(&x);
        }
        let invariants = if n == 0 {
            Vec::new()
        } else {
            fixed_rows.kernel()
        };
        let together: Vec<Vec<Q>> = kernel.iter().chain(&invariants).cloned().collect();
        invariants_ok &= kernel.len() == invariants.len() && rank_of(&together, n) == kernel.len();

        entries.push(((0, qd), FGAbGroup::free(n - rank)));
        entries.push(((-1, qd), FGAbGroup::free(null.ext(0, j) - rank)));
        entries.push(((-2, qd), FGAbGroup::free(null.ext(1, j))));
    }
    let page = BigradedPage::new(
        Grading::Upper,
        entries,
        (-2, 0),
        (q_lo, q_hi),
        "E2 from the corner nullification, q cohomological",
    );
    Ok(FiberPage {
        page,
        null,
        column_zero_is_invariants: invariants_ok,
    })
}
