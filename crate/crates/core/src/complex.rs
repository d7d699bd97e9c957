//! Bounded cochain complexes of graded modules with degree-0 differentials.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Error;
use crate::linalg::{
    induced_map_is_iso, subquotient_homology, ExactMatrix, FGAbGroup, Subquotient,
};
use crate::module::{Generator, GradedModule, GradedMorphism, IdealSpec};
use crate::ring::{GradedRing, Poly};

#[derive(Clone, Debug)]
pub struct GradedComplex {
    ring: Arc<GradedRing>,
    terms: BTreeMap<i32, GradedModule>,
    /// `differentials[i] : terms[i] → terms[i+1]`
    differentials: BTreeMap<i32, GradedMorphism>,
}

fn zero_module(ring: &Arc<GradedRing>) -> GradedModule {
    GradedModule::free(ring.clone(), Vec::new())
}

impl GradedComplex {
    /// Missing terms are zero; a differential is required between any two
    /// consecutive nonzero terms unless it is zero.
    pub fn new(
        ring: Arc<GradedRing>,
        terms: BTreeMap<i32, GradedModule>,
        differentials: BTreeMap<i32, GradedMorphism>,
    ) -> Result<Self, Error> {
        for (i, d) in &differentials {
            let (Some(s), Some(t)) = (terms.get(i), terms.get(&(i + 1))) else {
                return Err(Error::InvalidInput(format!(
                    "differential {i} has a missing end"
                )));
            };
            if d.shift != 0 || d.source.ngens() != s.ngens() || d.target.ngens() != t.ngens() {
                return Err(Error::InvalidInput(format!(
                    "differential {i} does not match its terms"
                )));
            }
        }
        Ok(GradedComplex {
            ring,
            terms,
            differentials,
        })
    }

    pub fn zero(ring: Arc<GradedRing>) -> Self {
        GradedComplex {
            ring,
            terms: BTreeMap::new(),
            differentials: BTreeMap::new(),
        }
    }

    /// `M` placed in cohomological degree `i`.
    pub fn single(m: GradedModule, i: i32) -> Self {
        GradedComplex {
            ring: m.ring().clone(),
            terms: BTreeMap::from([(i, m)]),
            differentials: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn term(&self, i: i32) -> GradedModule {
        self.terms
            .get(&i)
            .cloned()
            .unwrap_or_else(|| zero_module(&self.ring))
    }

    pub fn terms(&self) -> &BTreeMap<i32, GradedModule> {
        &self.terms
    }

    pub fn differential(&self, i: i32) -> GradedMorphism {
        self.differentials
            .get(&i)
            .cloned()
            .unwrap_or_else(|| GradedMorphism::zero(self.term(i), self.term(i + 1)))
    }

    /// Cohomological degrees carrying terms.
    pub fn support(&self) -> Option<(i32, i32)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    pub fn realize_differential(&self, i: i32, d: i64) -> ExactMatrix {
        match self.differentials.get(&i) {
            Some(m) => m.realize(d),
            None => {
                let rows = self.term(i + 1).realize(d).dim();
                let cols = self.term(i).realize(d).dim();
                ExactMatrix::zeros(self.ring.scalars(), rows, cols)
            }
        }
    }

    /// `H^i(C)⟨d⟩` with its cycles and boundaries.
    pub fn homology_at(&self, i: i32, d: i64) -> Result<Subquotient, Error> {
        let d_in = self.realize_differential(i - 1, d);
        let d_out = self.realize_differential(i, d);
        let here = self.term(i).realize(d);
        let next = self.term(i + 1).realize(d);
        subquotient_homology(&d_in, &d_out, &here.relations, &next.relations)
    }

    /// All `H^i(C)⟨j⟩` for `j ∈ [lo, hi]`, over the support of the complex.
    pub fn homology(&self, lo: i64, hi: i64) -> Result<BTreeMap<(i32, i64), FGAbGroup>, Error> {
        let Some((a, b)) = self.support() else {
            return Ok(BTreeMap::new());
        };
        let cells: Vec<(i32, i64)> = (a..=b)
            .flat_map(|i| (lo..=hi).map(move |j| (i, j)))
            .collect();
        cells
            .into_par_iter()
            .map(|(i, j)| Ok(((i, j), self.homology_at(i, j)?.group)))
            .collect()
    }

    /// `d ∘ d = 0` in every internal degree of the window.
    pub fn verify(&self, lo: i64, hi: i64) -> Result<(), Error> {
        self.homology(lo, hi).map(|_| ())
    }
}

/// Degree-0 map of complexes, one component per cohomological degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: GradedComplex,
    pub target: GradedComplex,
    pub components: BTreeMap<i32, GradedMorphism>,
}

impl ChainMap {
    pub fn realize(&self, i: i32, d: i64) -> ExactMatrix {
        match self.components.get(&i) {
            Some(m) => m.realize(d),
            None => ExactMatrix::zeros(
                self.source.ring.scalars(),
                self.target.term(i).realize(d).dim(),
                self.source.term(i).realize(d).dim(),
            ),
        }
    }

    pub fn component(&self, i: i32) -> GradedMorphism {
        self.components
            .get(&i)
            .cloned()
            .unwrap_or_else(|| GradedMorphism::zero(self.source.term(i), self.target.term(i)))
    }

    /// Whether the induced map on `H^i⟨d⟩` is an isomorphism.
    pub fn induces_iso(&self, i: i32, d: i64) -> Result<bool, Error> {
        let from = self.source.homology_at(i, d)?;
        let to = self.target.homology_at(i, d)?;
        Ok(induced_map_is_iso(&self.realize(i, d), &from, &to))
    }

    pub fn identity(c: &GradedComplex) -> ChainMap {
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            components: c
                .terms
                .iter()
                .map(|(&i, m)| (i, GradedMorphism::identity(m.clone())))
                .collect(),
        }
    }
}

/// Subsets of `0..m` of size `k` as bitmasks, in lexicographic order of
/// their sorted element lists.
pub(crate) fn subsets_of_size(m: usize, k: usize) -> Vec<u32> {
    fn go(start: usize, m: usize, k: usize, acc: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for s in start..m {
            go(s + 1, m, k - 1, acc | (1 << s), out);
        }
    }
    let mut out = Vec::new();
    go(0, m, k, 0, &mut out);
    out
}

pub(crate) fn subset_degree(mask: u32, degrees: &[i64]) -> i64 {
    degrees
        .iter()
        .enumerate()
        .filter(|(s, _)| mask & (1 << s) != 0)
        .map(|(_, d)| d)
        .sum()
}

fn subset_label(mask: u32, m: usize) -> String {
    let parts: Vec<String> = (0..m)
        .filter(|s| mask & (1 << s) != 0)
        .map(|s| s.to_string())
        .collect();
    format!("e{{{}}}", parts.join(","))
}

/// `⊕_{S ∈ subsets} Σ^{−t|x_S|} M`, generators ordered by subset then by `M`'s generators.
fn koszul_term(m: &GradedModule, subsets: &[u32], ideal: &IdealSpec, t: u32) -> GradedModule {
    let k = ideal.len();
    let mut acc = GradedModule::free(m.ring().clone(), Vec::new());
    for &s in subsets {
        let shift = -(t as i64) * subset_degree(s, ideal.degrees());
        let piece = m.shift(shift);
        let renamed = GradedModule::new(
            m.ring().clone(),
            piece
                .generators()
                .iter()
                .map(|g| Generator::new(format!("{}*{}", subset_label(s, k), g.name), g.degree))
                .collect(),
            piece.relations().to_vec(),
        )
        .expect("relations of a shifted module stay homogeneous");
        acc = acc.direct_sum(&renamed);
    }
    acc
}

/// Sign of inserting generator `s` into the wedge `S`: one factor of −1 per
/// smaller element already present.
pub(crate) fn koszul_sign(mask: u32, s: usize) -> i64 {
    if (mask & ((1u32 << s) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `K(x₁^t, …, x_m^t; M)`, in cohomological degrees `0..=m`. The summand for
/// a subset `S` is `Σ^{−t|x_S|} M`, so differentials have internal degree 0.
pub fn koszul(m: &GradedModule, ideal: &IdealSpec, t: u32) -> GradedComplex {
    assert!(t >= 1, "Koszul power must be positive");
    let k = ideal.len();
    let n = m.ngens();
    let ring = m.ring().clone();
    let levels: Vec<Vec<u32>> = (0..=k).map(|i| subsets_of_size(k, i)).collect();
    let terms: Vec<GradedModule> = levels.iter().map(|l| koszul_term(m, l, ideal, t)).collect();
    let powers: Vec<Poly> = ideal.generators().iter().map(|x| x.pow(t)).collect();
    let mut differentials = BTreeMap::new();
    for i in 0..k {
        let targets = &levels[i + 1];
        let mut images = Vec::with_capacity(levels[i].len() * n);
        for &s in &levels[i] {
            for g in 0..n {
                let mut img = vec![Poly::zero(); targets.len() * n];
                for (x, power) in powers.iter().enumerate() {
                    if s & (1 << x) != 0 {
                        continue;
                    }
                    let pos = targets
                        .iter()
                        .position(|&u| u == s | (1 << x))
                        .expect("superset listed");
                    let sign = koszul_sign(s, x);
                    img[pos * n + g] = ring.normalize(&power.scale(&sign.into()));
                }
                images.push(img);
            }
        }
        let d = GradedMorphism {
            source: terms[i].clone(),
            target: terms[i + 1].clone(),
            shift: 0,
            images,
        };
        differentials.insert(i as i32, d);
    }
    GradedComplex {
        ring,
        terms: terms
            .into_iter()
            .enumerate()
            .map(|(i, t)| (i as i32, t))
            .collect(),
        differentials,
    }
}

/// The map `K(x^t; M) → K(x^{t+1}; M)` sending the `S` summand to itself
/// multiplied by `x_S`.
pub fn transition(m: &GradedModule, ideal: &IdealSpec, t: u32) -> ChainMap {
    let source = koszul(m, ideal, t);
    let target = koszul(m, ideal, t + 1);
    transition_between(m, ideal, source, target)
}

pub(crate) fn transition_between(
    m: &GradedModule,
    ideal: &IdealSpec,
    source: GradedComplex,
    target: GradedComplex,
) -> ChainMap {
    let k = ideal.len();
    let n = m.ngens();
    let ring = m.ring().clone();
    let mut components = BTreeMap::new();
    for i in 0..=k {
        let level = subsets_of_size(k, i);
        let mut images = Vec::with_capacity(level.len() * n);
        for (pos, &s) in level.iter().enumerate() {
            let mut x_s = ring.one();
            for (x, g) in ideal.generators().iter().enumerate() {
                if s & (1 << x) != 0 {
                    x_s = x_s.mul(g);
                }
            }
            let x_s = ring.normalize(&x_s);
            for g in 0..n {
                let mut img = vec![Poly::zero(); level.len() * n];
                img[pos * n + g] = x_s.clone();
                images.push(img);
            }
        }
        components.insert(
            i as i32,
            GradedMorphism {
                source: source.term(i as i32),
                target: target.term(i as i32),
                shift: 0,
                images,
            },
        );
    }
    ChainMap {
        source,
        target,
        components,
    }
}

/// Block matrix of polynomials from a list of `(row offset, col offset, block)`.
fn assemble(rows: usize, cols: usize, blocks: &[(usize, usize, &[Vec<Poly>])]) -> Vec<Vec<Poly>> {
    // images are indexed [source generator][target generator]
    let mut out = vec![vec![Poly::zero(); rows]; cols];
    for (r0, c0, block) in blocks {
        for (c, img) in block.iter().enumerate() {
            for (r, p) in img.iter().enumerate() {
                out[c0 + c][r0 + r] = p.clone();
            }
        }
    }
    out
}

fn negate_images(images: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    images
        .iter()
        .map(|img| img.iter().map(Poly::neg).collect())
        .collect()
}

/// Mapping cone: `cone^i = source^{i+1} ⊕ target^i`, `d(c, e) = (−dc, f c + d e)`.
pub fn cone(f: &ChainMap) -> GradedComplex {
    let src = &f.source;
    let tgt = &f.target;
    let ring = src.ring.clone();
    let mut degrees: Vec<i32> = src
        .terms
        .keys()
        .map(|i| i - 1)
        .chain(tgt.terms.keys().copied())
        .collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut terms = BTreeMap::new();
    for &i in &degrees {
        terms.insert(i, src.term(i + 1).direct_sum(&tgt.term(i)));
    }
    let mut differentials = BTreeMap::new();
    for &i in &degrees {
        if !terms.contains_key(&(i + 1)) {
            continue;
        }
        let (a, b) = (src.term(i + 1).ngens(), tgt.term(i).ngens());
        let (a2, b2) = (src.term(i + 2).ngens(), tgt.term(i + 1).ngens());
        let ds = negate_images(&src.differential(i + 1).images);
        let fc = f.component(i + 1).images;
        let dt = tgt.differential(i).images;
        let images = assemble(a2 + b2, a + b, &[(0, 0, &ds), (a2, 0, &fc), (a2, a, &dt)]);
        differentials.insert(
            i,
            GradedMorphism {
                source: terms[&i].clone(),
                target: terms[&(i + 1)].clone(),
                shift: 0,
                images,
            },
        );
    }
    GradedComplex {
        ring,
        terms,
        differentials,
    }
}

/// `M ⊗_R N`, generators `(g, h)` ordered by `g` then `h`.
pub fn tensor_modules(m: &GradedModule, n: &GradedModule) -> GradedModule {
    let ring = m.ring().clone();
    let (p, q) = (m.ngens(), n.ngens());
    let mut gens = Vec::with_capacity(p * q);
    for g in m.generators() {
        for h in n.generators() {
            gens.push(Generator::new(
                format!("{}(x){}", g.name, h.name),
                g.degree + h.degree,
            ));
        }
    }
    let mut rels = Vec::new();
    for r in m.relations() {
        for h in 0..q {
            let mut v = vec![Poly::zero(); p * q];
            for (g, c) in r.iter().enumerate() {
                v[g * q + h] = c.clone();
            }
            rels.push(v);
        }
    }
    for r in n.relations() {
        for g in 0..p {
            let mut v = vec![Poly::zero(); p * q];
            for (h, c) in r.iter().enumerate() {
                v[g * q + h] = c.clone();
            }
            rels.push(v);
        }
    }
    GradedModule::new(ring, gens, rels).expect("tensor of homogeneous presentations")
}

/// `f ⊗ 1` on generator pairs, for `f : M → M'`.
fn tensor_left(f_images: &[Vec<Poly>], q: usize) -> Vec<Vec<Poly>> {
    let p2 = f_images.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(f_images.len() * q);
    for img in f_images {
        for h in 0..q {
            let mut v = vec![Poly::zero(); p2 * q];
            for (g2, c) in img.iter().enumerate() {
                v[g2 * q + h] = c.clone();
            }
            out.push(v);
        }
    }
    out
}

/// `1 ⊗ f` on generator pairs, for `f : N → N'`.
fn tensor_right(p: usize, f_images: &[Vec<Poly>], q2: usize) -> Vec<Vec<Poly>> {
    let mut out = Vec::with_capacity(p * f_images.len());
    for g in 0..p {
        for img in f_images {
            let mut v = vec![Poly::zero(); p * q2];
            for (h2, c) in img.iter().enumerate() {
                v[g * q2 + h2] = c.clone();
            }
            out.push(v);
        }
    }
    out
}

/// Total complex of `C ⊗_R D` with `d(c ⊗ e) = dc ⊗ e + (−1)^{|c|} c ⊗ de`.
/// Term `k` lists the blocks `C^i ⊗ D^{k−i}` by increasing `i`.
pub fn tensor(c: &GradedComplex, d: &GradedComplex) -> GradedComplex {
    let ring = c.ring.clone();
    let (Some((ca, cb)), Some((da, db))) = (c.support(), d.support()) else {
        return GradedComplex::zero(ring);
    };
    let block_list =
        |k: i32| -> Vec<i32> { (ca..=cb).filter(|i| (da..=db).contains(&(k - i))).collect() };
    let mut terms = BTreeMap::new();
    for k in ca + da..=cb + db {
        let mut acc = zero_module(&ring);
        for i in block_list(k) {
            acc = acc.direct_sum(&tensor_modules(&c.term(i), &d.term(k - i)));
        }
        terms.insert(k, acc);
    }
    let mut differentials = BTreeMap::new();
    for k in ca + da..cb + db {
        let src_blocks = block_list(k);
        let dst_blocks = block_list(k + 1);
        let size = |i: i32, kk: i32| c.term(i).ngens() * d.term(kk - i).ngens();
        let offset = |blocks: &[i32], kk: i32, i: i32| -> usize {
            blocks
                .iter()
                .take_while(|&&b| b != i)
                .map(|&b| size(b, kk))
                .sum()
        };
        let rows: usize = dst_blocks.iter().map(|&i| size(i, k + 1)).sum();
        let cols: usize = src_blocks.iter().map(|&i| size(i, k)).sum();
        let mut pieces: Vec<(usize, usize, Vec<Vec<Poly>>)> = Vec::new();
        for &i in &src_blocks {
            let j = k - i;
            let col0 = offset(&src_blocks, k, i);
            let q = d.term(j).ngens();
            let p = c.term(i).ngens();
            if dst_blocks.contains(&(i + 1)) {
                let dc = tensor_left(&c.differential(i).images, q);
                if !dc.is_empty() {
                    pieces.push((offset(&dst_blocks, k + 1, i + 1), col0, dc));
                }
            }
            if dst_blocks.contains(&i) {
                let de = tensor_right(p, &d.differential(j).images, d.term(j + 1).ngens());
                let de = if i % 2 == 0 { de } else { negate_images(&de) };
                if !de.is_empty() {
                    pieces.push((offset(&dst_blocks, k + 1, i), col0, de));
                }
            }
        }
        let refs: Vec<(usize, usize, &[Vec<Poly>])> = pieces
            .iter()
            .map(|(r, c0, b)| (*r, *c0, b.as_slice()))
            .collect();
        let images = assemble(rows, cols, &refs);
        differentials.insert(
            k,
            GradedMorphism {
                source: terms[&k].clone(),
                target: terms[&(k + 1)].clone(),
                shift: 0,
                images,
            },
        );
    }
    GradedComplex {
        ring,
        terms,
        differentials,
    }
}
