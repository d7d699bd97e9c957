//! Finitely presented graded modules over a [`GradedRing`].

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{cokernel, ExactMatrix, FGAbGroup, Span, Subquotient};
use crate::ring::{monomial_mul, GradedRing, Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// One internal degree of a module: symbols `generator · monomial`, the
/// relation multiples landing there as columns, and (lazily) the group.
#[derive(Debug)]
pub struct Realization {
    pub degree: i64,
    pub symbols: Vec<(usize, Monomial)>,
    offsets: Vec<usize>,
    index: HashMap<(usize, Monomial), usize>,
    pub relations: ExactMatrix,
    group: OnceLock<FGAbGroup>,
}

impl Realization {
    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    pub fn offset(&self, generator: usize) -> usize {
        self.offsets[generator]
    }

    pub fn index_of(&self, generator: usize, m: &Monomial) -> Option<usize> {
        self.index.get(&(generator, m.clone())).copied()
    }

    pub fn group(&self) -> &FGAbGroup {
        self.group.get_or_init(|| cokernel(&self.relations))
    }

    /// The group seen as a trivial subquotient (all of the free lift modulo relations).
    pub fn subquotient(&self) -> Subquotient {
        Subquotient::presented(&self.relations)
    }

    /// Reads a coordinate vector back as one polynomial per generator.
    pub fn element(&self, v: &[BigInt], ngens: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); ngens];
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let (g, m) = &self.symbols[k];
                out[*g] = out[*g].add(&Poly::term(m.clone(), c.clone()));
            }
        }
        out
    }
}

type Cache = Arc<RwLock<HashMap<i64, Arc<Realization>>>>;

/// `R{generators} / relations`, each relation a list of ring elements (one
/// per generator) of a common total degree.
#[derive(Clone, Debug)]
pub struct GradedModule {
    ring: Arc<GradedRing>,
    generators: Vec<Generator>,
    relations: Vec<Vec<Poly>>,
    relation_degrees: Vec<i64>,
    cache: Cache,
}

impl GradedModule {
    pub fn free(ring: Arc<GradedRing>, generators: Vec<Generator>) -> Self {
        GradedModule {
            ring,
            generators,
            relations: Vec::new(),
            relation_degrees: Vec::new(),
            cache: Cache::default(),
        }
    }

    pub fn new(
        ring: Arc<GradedRing>,
        generators: Vec<Generator>,
        relations: Vec<Vec<Poly>>,
    ) -> Result<Self, Error> {
        let mut m = GradedModule::free(ring, generators);
        for r in relations {
            m.push_relation(r)?;
        }
        Ok(m)
    }

    /// The ring as a module over itself.
    pub fn ring_itself(ring: Arc<GradedRing>) -> Self {
        GradedModule::free(ring, vec![Generator::new("1", 0)])
    }

    /// `R / (f₁, …, f_k)` on one generator in degree 0.
    pub fn cyclic_quotient(ring: Arc<GradedRing>, elements: &[Poly]) -> Result<Self, Error> {
        let rels = elements.iter().map(|f| vec![f.clone()]).collect();
        GradedModule::new(ring, vec![Generator::new("1", 0)], rels)
    }

    fn push_relation(&mut self, r: Vec<Poly>) -> Result<(), Error> {
        if r.len() != self.generators.len() {
            return Err(Error::InvalidInput(format!(
                "relation has {} components, module has {} generators",
                r.len(),
                self.generators.len()
            )));
        }
        let r: Vec<Poly> = r.iter().map(|p| self.ring.normalize(p)).collect();
        let mut degree = None;
        for (p, g) in r.iter().zip(&self.generators) {
            if let Some(e) = self.ring.degree_of(p)? {
                let total = e + g.degree;
                match degree {
                    None => degree = Some(total),
                    Some(d) if d != total => {
                        return Err(Error::InhomogeneousElement(self.display_element(&r)));
                    }
                    _ => {}
                }
            }
        }
        if let Some(d) = degree {
            self.relations.push(r);
            self.relation_degrees.push(d);
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn relations(&self) -> &[Vec<Poly>] {
        &self.relations
    }

    pub fn relation_degrees(&self) -> &[i64] {
        &self.relation_degrees
    }

    pub fn display_element(&self, e: &[Poly]) -> String {
        let parts: Vec<String> = e
            .iter()
            .zip(&self.generators)
            .filter(|(p, _)| !p.is_zero())
            .map(|(p, g)| format!("({})*{}", self.ring.display(p), g.name))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Largest generator degree, or `None` for the zero module on no generators.
    pub fn max_generator_degree(&self) -> Option<i64> {
        self.generators.iter().map(|g| g.degree).max()
    }

    pub fn min_generator_degree(&self) -> Option<i64> {
        self.generators.iter().map(|g| g.degree).min()
    }

    /// A degree beyond which no generator or relation of the presentation lives,
    /// counting ring relations placed on the highest generator.
    pub fn presentation_degree(&self) -> i64 {
        let g = self.max_generator_degree().unwrap_or(0);
        let r = self.relation_degrees.iter().copied().max().unwrap_or(g);
        let ring_rel = self
            .ring
            .relation_degrees()
            .iter()
            .copied()
            .max()
            .unwrap_or(0);
        g.max(r).max(g + ring_rel)
    }

    /// `Σⁿ M`, with `(ΣⁿM)⟨d⟩ = M⟨d − n⟩`.
    pub fn shift(&self, n: i64) -> Self {
        GradedModule {
            ring: self.ring.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| Generator::new(g.name.clone(), g.degree + n))
                .collect(),
            relations: self.relations.clone(),
            relation_degrees: self.relation_degrees.iter().map(|d| d + n).collect(),
            cache: Cache::default(),
        }
    }

    pub fn direct_sum(&self, other: &GradedModule) -> Self {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring),
            "modules over different rings"
        );
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        let n = self.ngens();
        let m = other.ngens();
        let mut relations: Vec<Vec<Poly>> = self
            .relations
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.extend(std::iter::repeat_n(Poly::zero(), m));
                r
            })
            .collect();
        relations.extend(other.relations.iter().map(|r| {
            let mut full = vec![Poly::zero(); n];
            full.extend(r.iter().cloned());
            full
        }));
        let mut relation_degrees = self.relation_degrees.clone();
        relation_degrees.extend(other.relation_degrees.iter().copied());
        GradedModule {
            ring: self.ring.clone(),
            generators,
            relations,
            relation_degrees,
            cache: Cache::default(),
        }
    }

    /// Adds relations (homogeneous elements) to the presentation.
    pub fn quotient(&self, elements: Vec<Vec<Poly>>) -> Result<Self, Error> {
        let mut m = GradedModule {
            cache: Cache::default(),
            ..self.clone()
        };
        for e in elements {
            m.push_relation(e)?;
        }
        Ok(m)
    }

    pub fn realize(&self, d: i64) -> Arc<Realization> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(&d) {
            return hit.clone();
        }
        let r = Arc::new(self.compute_realization(d));
        self.cache
            .write()
            .expect("cache lock")
            .entry(d)
            .or_insert(r)
            .clone()
    }

    fn compute_realization(&self, d: i64) -> Realization {
        let mut symbols = Vec::new();
        let mut offsets = Vec::with_capacity(self.ngens());
        for (g, gen) in self.generators.iter().enumerate() {
            offsets.push(symbols.len());
            for m in &self.ring.monomials(d - gen.degree).monomials {
                symbols.push((g, m.clone()));
            }
        }
        let index: HashMap<(usize, Monomial), usize> = symbols
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let dim = symbols.len();
        let scalars = self.ring.scalars();
        let mut columns: Vec<Vec<BigInt>> = Vec::new();
        // module relations times monomials
        for (r, &rd) in self.relations.iter().zip(&self.relation_degrees) {
            for m in &self.ring.monomials(d - rd).monomials {
                let mut col = vec![BigInt::zero(); dim];
                for (g, p) in r.iter().enumerate() {
                    for (pm, c) in p.terms() {
                        let k = index[&(g, monomial_mul(pm, m))];
                        col[k] += c;
                    }
                }
                columns.push(col.into_iter().map(|x| scalars.normalize(x)).collect());
            }
        }
        // ring relations on each generator
        for (g, gen) in self.generators.iter().enumerate() {
            for p in self.ring.relation_multiples(d - gen.degree) {
                let mut col = vec![BigInt::zero(); dim];
                for (pm, c) in p.terms() {
                    col[index[&(g, pm.clone())]] = c.clone();
                }
                columns.push(col);
            }
        }
        Realization {
            degree: d,
            symbols,
            offsets,
            index,
            relations: ExactMatrix::from_columns(scalars, dim, &columns),
            group: OnceLock::new(),
        }
    }

    /// The group `M⟨d⟩`.
    pub fn realize_degree(&self, d: i64) -> FGAbGroup {
        self.realize(d).group().clone()
    }

    /// Coordinates of a homogeneous element of degree `d`.
    pub fn vector_of(&self, element: &[Poly], d: i64) -> Vec<BigInt> {
        let real = self.realize(d);
        let mut v = vec![BigInt::zero(); real.dim()];
        for (g, p) in element.iter().enumerate() {
            for (m, c) in p.terms() {
                let k = real
                    .index_of(g, m)
                    .expect("element component outside the requested degree");
                v[k] += c;
            }
        }
        v.into_iter()
            .map(|x| self.ring.scalars().normalize(x))
            .collect()
    }

    /// Multiplication by `f` (of degree `e`) from `M⟨d⟩` to `M⟨d+e⟩` on free lifts.
    pub fn action_matrix(&self, f: &Poly, e: i64, d: i64) -> ExactMatrix {
        let src = self.realize(d);
        let dst = self.realize(d + e);
        let mut a = ExactMatrix::zeros(self.ring.scalars(), dst.dim(), src.dim());
        for (c, (g, m)) in src.symbols.iter().enumerate() {
            for (fm, fc) in f.terms() {
                let r = dst
                    .index_of(*g, &monomial_mul(m, fm))
                    .expect("degree bookkeeping");
                a.add_to(r, c, fc);
            }
        }
        a
    }

    /// Looks for `B ≥` every generator degree with `M⟨d⟩ = 0` on
    /// `(B, B + max variable degree]`, which forces `M` to vanish above `B`.
    /// Candidates run up to `limit`.
    pub fn grading_bound(&self, limit: i64) -> Option<i64> {
        let Some(start) = self.max_generator_degree() else {
            return Some(i64::MIN);
        };
        let span = self.ring.max_variable_degree();
        let vanishes: Vec<i64> = (start + 1..=limit + span)
            .filter(|&d| self.realize_degree(d).is_zero())
            .collect();
        (start..=limit).find(|&b| (b + 1..=b + span).all(|d| vanishes.binary_search(&d).is_ok()))
    }
}

/// Homogeneous map `source → Σ^{shift} target`: generator `g` goes to an
/// element of degree `deg g + shift`.
#[derive(Clone, Debug)]
pub struct GradedMorphism {
    pub source: GradedModule,
    pub target: GradedModule,
    pub shift: i64,
    /// One target element (polynomial per target generator) per source generator.
    pub images: Vec<Vec<Poly>>,
}

impl GradedMorphism {
    pub fn new(
        source: GradedModule,
        target: GradedModule,
        shift: i64,
        images: Vec<Vec<Poly>>,
    ) -> Result<Self, Error> {
        if images.len() != source.ngens() || images.iter().any(|i| i.len() != target.ngens()) {
            return Err(Error::InvalidInput(
                "morphism images have the wrong shape".into(),
            ));
        }
        let ring = target.ring().clone();
        for (img, g) in images.iter().zip(source.generators()) {
            for (p, h) in img.iter().zip(target.generators()) {
                if let Some(e) = ring.degree_of(p)? {
                    if e + h.degree != g.degree + shift {
                        return Err(Error::InhomogeneousElement(target.display_element(img)));
                    }
                }
            }
        }
        Ok(GradedMorphism {
            source,
            target,
            shift,
            images,
        })
    }

    pub fn zero(source: GradedModule, target: GradedModule) -> Self {
        let images = vec![vec![Poly::zero(); target.ngens()]; source.ngens()];
        GradedMorphism {
            source,
            target,
            shift: 0,
            images,
        }
    }

    pub fn identity(m: GradedModule) -> Self {
        let n = m.ngens();
        let one = m.ring().one();
        let images = (0..n)
            .map(|i| {
                let mut v = vec![Poly::zero(); n];
                v[i] = one.clone();
                v
            })
            .collect();
        GradedMorphism {
            source: m.clone(),
            target: m,
            shift: 0,
            images,
        }
    }

    /// Matrix `source⟨d⟩ → target⟨d + shift⟩` on free lifts.
    pub fn realize(&self, d: i64) -> ExactMatrix {
        let src = self.source.realize(d);
        let dst = self.target.realize(d + self.shift);
        let scalars = self.target.ring().scalars();
        let mut a = ExactMatrix::zeros(scalars, dst.dim(), src.dim());
        for (c, (g, m)) in src.symbols.iter().enumerate() {
            for (h, p) in self.images[*g].iter().enumerate() {
                for (pm, pc) in p.terms() {
                    let r = dst
                        .index_of(h, &monomial_mul(m, pm))
                        .expect("degree bookkeeping");
                    a.add_to(r, c, pc);
                }
            }
        }
        a
    }

    /// `self ∘ first`.
    pub fn compose_after(&self, first: &GradedMorphism) -> GradedMorphism {
        let ring = self.target.ring();
        let images = first
            .images
            .iter()
            .map(|img| {
                let mut out = vec![Poly::zero(); self.target.ngens()];
                for (k, p) in img.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    for (h, q) in self.images[k].iter().enumerate() {
                        out[h] = ring.normalize(&out[h].add(&p.mul(q)));
                    }
                }
                out
            })
            .collect();
        GradedMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            shift: first.shift + self.shift,
            images,
        }
    }

    /// Source relations land in target relations in every degree of the window.
    pub fn verify(&self, lo: i64, hi: i64) -> Result<(), Error> {
        for d in lo..=hi {
            let phi = self.realize(d);
            let src = self.source.realize(d);
            let dst = Span::from_generators(&self.target.realize(d + self.shift).relations);
            let image = Span::from_generators(&src.relations).image(&phi);
            if !dst.contains(&image) {
                return Err(Error::InvalidInput(format!(
                    "morphism is not well defined in degree {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Homogeneous generators of an ideal, each with its degree (which the zero
/// element cannot supply on its own).
#[derive(Clone, Debug)]
pub struct IdealSpec {
    generators: Vec<Poly>,
    degrees: Vec<i64>,
}

impl IdealSpec {
    pub fn new(ring: &GradedRing, generators: Vec<Poly>) -> Result<Self, Error> {
        let mut degrees = Vec::new();
        for g in &generators {
            match ring.degree_of(g)? {
                Some(d) if d >= 1 => degrees.push(d),
                Some(_) => {
                    return Err(Error::InvalidInput(format!(
                        "ideal generator `{}` must have positive degree",
                        ring.display(g)
                    )))
                }
                None => {
                    return Err(Error::InvalidInput(
                        "zero ideal generator needs an explicit degree".into(),
                    ))
                }
            }
        }
        let generators = generators.iter().map(|g| ring.normalize(g)).collect();
        Ok(IdealSpec {
            generators,
            degrees,
        })
    }

    /// Generators paired with degrees, allowing the zero element.
    pub fn with_degrees(ring: &GradedRing, generators: Vec<(Poly, i64)>) -> Result<Self, Error> {
        for (g, d) in &generators {
            if *d < 1 {
                return Err(Error::InvalidInput(
                    "ideal generators need positive degree".into(),
                ));
            }
            if let Some(e) = ring.degree_of(g)? {
                if e != *d {
                    return Err(Error::InhomogeneousElement(ring.display(g)));
                }
            }
        }
        let (generators, degrees) = generators
            .into_iter()
            .map(|(g, d)| (ring.normalize(&g), d))
            .unzip();
        Ok(IdealSpec {
            generators,
            degrees,
        })
    }

    /// The ideal generated by all variables.
    pub fn maximal(ring: &GradedRing) -> Self {
        IdealSpec {
            generators: (0..ring.nvars())
                .map(|i| Poly::var(i, ring.nvars()))
                .collect(),
            degrees: ring.degrees().to_vec(),
        }
    }

    pub fn parse(ring: &GradedRing, generators: &[&str]) -> Result<Self, Error> {
        let polys = generators
            .iter()
            .map(|g| ring.parse_element(g))
            .collect::<Result<Vec<_>, _>>()?;
        IdealSpec::new(ring, polys)
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn min_degree(&self) -> i64 {
        self.degrees.iter().copied().min().unwrap_or(1)
    }

    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum()
    }
}

/// How far torsion membership was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadicalCertificate {
    /// The module vanishes above `bound`, so every tested power is conclusive.
    Certified { bound: i64 },
    /// Only powers up to `n_max` of each generator were tried.
    WithinWindow { n_max: u32 },
}

#[derive(Clone, Copy, Debug)]
pub struct RadicalOptions {
    pub n_max: u32,
    pub require_certified: bool,
}

impl Default for RadicalOptions {
    fn default() -> Self {
        RadicalOptions {
            n_max: 16,
            require_certified: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TorsionRadical {
    /// Per degree, `t(M)⟨d⟩` as a subgroup of the free lift of `M⟨d⟩`.
    pub degrees: BTreeMap<i64, Subquotient>,
    pub certificate: RadicalCertificate,
}

impl TorsionRadical {
    pub fn group(&self, d: i64) -> Option<&FGAbGroup> {
        self.degrees.get(&d).map(|s| &s.group)
    }

    /// The radical's elements as module elements, degree by degree.
    pub fn elements(&self, m: &GradedModule) -> Vec<Vec<Poly>> {
        let mut out = Vec::new();
        for (&d, sq) in &self.degrees {
            let real = m.realize(d);
            for v in sq.cycles.basis() {
                out.push(real.element(v, m.ngens()));
            }
        }
        out
    }
}

/// Elements of `M⟨d⟩` killed by `x^e` for every ideal generator `x`, as a
/// subgroup of the free lift. `powers[s]` is the exponent for generator `s`.
pub(crate) fn annihilated_by_powers(
    m: &GradedModule,
    ideal: &IdealSpec,
    powers: &[u32],
    d: i64,
) -> Subquotient {
    let real = m.realize(d);
    let scalars = m.ring().scalars();
    let mut stacked = ExactMatrix::zeros(scalars, 0, real.dim());
    let mut targets: Vec<ExactMatrix> = Vec::new();
    for ((x, &deg), &e) in ideal.generators().iter().zip(ideal.degrees()).zip(powers) {
        let f = x.pow(e);
        let shift = deg * e as i64;
        stacked = stacked.vstack(&m.action_matrix(&f, shift, d));
        targets.push(m.realize(d + shift).relations.clone());
    }
    let rows: usize = targets.iter().map(|t| t.rows()).sum();
    let cols: usize = targets.iter().map(|t| t.cols()).sum();
    let mut block = ExactMatrix::zeros(scalars, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for t in &targets {
        for r in 0..t.rows() {
            for c in 0..t.cols() {
                block.set(r0 + r, c0 + c, t.get(r, c).clone());
            }
        }
        r0 += t.rows();
        c0 += t.cols();
    }
    let cycles = Span::preimage(&stacked, &Span::from_generators(&block));
    let boundaries = Span::from_generators(&real.relations);
    let group = cycles.quotient_group(&boundaries);
    Subquotient {
        cycles,
        boundaries,
        group,
    }
}

/// `t(M)`: elements killed by a power of `I`, degree by degree in `[lo, hi]`.
///
/// An element is `I`-power torsion exactly when each generator acts
/// nilpotently on it, so membership is tested generator by generator.
pub fn torsion_radical(
    m: &GradedModule,
    ideal: &IdealSpec,
    lo: i64,
    hi: i64,
    options: RadicalOptions,
) -> Result<TorsionRadical, Error> {
    if lo > hi {
        return Err(Error::InvalidInput("empty window".into()));
    }
    let bound = m.grading_bound(hi);
    if options.require_certified && bound.is_none() {
        return Err(Error::WindowTooSmall(format!(
            "no grading bound found up to degree {hi}"
        )));
    }
    let certificate = match bound {
        Some(b) => RadicalCertificate::Certified { bound: b },
        None => RadicalCertificate::WithinWindow {
            n_max: options.n_max,
        },
    };
    let mut degrees = BTreeMap::new();
    for d in lo..=hi {
        let powers: Vec<u32> = ideal
            .degrees()
            .iter()
            .map(|&x| match bound {
                Some(b) if b >= d => ((b - d) / x + 1) as u32,
                Some(_) => 1,
                None => options.n_max,
            })
            .collect();
        degrees.insert(d, annihilated_by_powers(m, ideal, &powers, d));
    }
    Ok(TorsionRadical {
        degrees,
        certificate,
    })
}
