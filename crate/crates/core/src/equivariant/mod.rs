//! Finite-type graded ℚ-algebras given by structure constants, finite group
//! actions on them, semidirect products and the idempotent corner used to
//! compute nullifications.

mod corner;
mod rp2n;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::linalg::RationalMatrix;

pub use corner::{
    fiber_page, idempotents, null_via_corner, CornerData, CornerDims, CornerNull, CornerResolution,
    CornerShape, FiberPage, Relation,
};
pub use rp2n::{rp2n, Rp2nExample};

pub(crate) type Q = BigRational;

pub(crate) fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// A homogeneous element: its degree and coordinates in that degree's basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: i64,
    pub coords: Vec<Q>,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(
            self.degree, other.degree,
            "adding elements of different degrees"
        );
        Element {
            degree: self.degree,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> Element {
        Element {
            degree: self.degree,
            coords: self.coords.iter().map(|a| a * k).collect(),
        }
    }
}

/// Graded algebra over ℚ concentrated in degrees `0..=top`, stored by its
/// multiplication tensors. Products landing above `top` are outside the window.
#[derive(Clone, Debug)]
pub struct TableAlgebra {
    top: i64,
    names: Vec<Vec<String>>,
    products: HashMap<(i64, i64), Vec<Vec<Q>>>,
    unit: Vec<Q>,
    group_elements: Vec<Element>,
}

impl TableAlgebra {
    /// `product(d1, i, d2, j)` gives the coordinates of `b_i · b_j` in degree `d1 + d2`.
    pub fn new(
        names: Vec<Vec<String>>,
        unit: Vec<Q>,
        product: impl Fn(i64, usize, i64, usize) -> Vec<Q>,
    ) -> Result<Self, Error> {
        if names.is_empty() {
            return Err(Error::InvalidInput(
                "algebra needs a degree-zero part".into(),
            ));
        }
        let top = names.len() as i64 - 1;
        if unit.len() != names[0].len() {
            return Err(Error::InvalidInput("unit has the wrong length".into()));
        }
        let mut products = HashMap::new();
        for d1 in 0..=top {
            for d2 in 0..=top - d1 {
                let n1 = names[d1 as usize].len();
                let n2 = names[d2 as usize].len();
                let target = names[(d1 + d2) as usize].len();
                let mut table = Vec::with_capacity(n1 * n2);
                for i in 0..n1 {
                    for j in 0..n2 {
                        let v = product(d1, i, d2, j);
                        if v.len() != target {
                            return Err(Error::InvalidInput(format!(
                                "product in degrees ({d1}, {d2}) has length {} not {target}",
                                v.len()
                            )));
                        }
                        table.push(v);
                    }
                }
                products.insert((d1, d2), table);
            }
        }
        let a = TableAlgebra {
            top,
            names,
            products,
            unit,
            group_elements: Vec::new(),
        };
        a.verify()?;
        Ok(a)
    }

    /// The free associative algebra on one generator of positive degree.
    pub fn tensor_algebra(name: &str, degree: i64, top: i64) -> Result<Self, Error> {
        if degree <= 0 {
            return Err(Error::InvalidInput(
                "generator degree must be positive".into(),
            ));
        }
        let names: Vec<Vec<String>> = (0..=top)
            .map(|d| match d % degree {
                0 if d == 0 => vec!["1".to_string()],
                0 if d == degree => vec![name.to_string()],
                0 => vec![format!("{name}^{}", d / degree)],
                _ => Vec::new(),
            })
            .collect();
        TableAlgebra::new(names, vec![q(1)], |_, _, _, _| vec![q(1)])
    }

    /// `ℚ[G]` in degree zero.
    pub fn group_algebra(group: &FiniteGroup) -> Self {
        let n = group.order();
        let names = vec![group.names.clone()];
        let mut unit = vec![q(0); n];
        unit[group.identity] = q(1);
        let a = TableAlgebra::new(names, unit, |_, g, _, h| {
            let mut v = vec![q(0); n];
            v[group.mul(g, h)] = q(1);
            v
        })
        .expect("group tables are associative");
        let group_elements = (0..n).map(|g| a.basis(0, g)).collect();
        TableAlgebra {
            group_elements,
            ..a
        }
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn dim(&self, d: i64) -> usize {
        if (0..=self.top).contains(&d) {
            self.names[d as usize].len()
        } else {
            0
        }
    }

    pub fn names(&self, d: i64) -> &[String] {
        if (0..=self.top).contains(&d) {
            &self.names[d as usize]
        } else {
            &[]
        }
    }

    pub fn basis(&self, d: i64, i: usize) -> Element {
        let mut coords = vec![q(0); self.dim(d)];
        coords[i] = q(1);
        Element { degree: d, coords }
    }

    pub fn zero(&self, d: i64) -> Element {
        Element {
            degree: d,
            coords: vec![q(0); self.dim(d)],
        }
    }

    pub fn unit(&self) -> Element {
        Element {
            degree: 0,
            coords: self.unit.clone(),
        }
    }

    /// Images of the group elements, when the algebra came with a group.
    pub fn group_elements(&self) -> &[Element] {
        &self.group_elements
    }

    fn basis_product(&self, d1: i64, i: usize, d2: i64, j: usize) -> &[Q] {
        &self.products[&(d1, d2)][i * self.dim(d2) + j]
    }

    /// `None` when the product lies above the window.
    pub fn mul(&self, a: &Element, b: &Element) -> Option<Element> {
        let d = a.degree + b.degree;
        if d > self.top || a.degree < 0 || b.degree < 0 {
            return None;
        }
        let mut out = vec![q(0); self.dim(d)];
        for (i, x) in a.coords.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coords.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let xy = x * y;
                for (o, c) in out
                    .iter_mut()
                    .zip(self.basis_product(a.degree, i, b.degree, j))
                {
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        Some(Element {
            degree: d,
            coords: out,
        })
    }

    pub fn pow(&self, a: &Element, k: u32) -> Option<Element> {
        let mut out = self.unit();
        for _ in 0..k {
            out = self.mul(&out, a)?;
        }
        Some(out)
    }

    /// Matrix of `x ↦ a·x` from degree `d` to `d + |a|`.
    pub fn left_matrix(&self, a: &Element, d: i64) -> RationalMatrix {
        let cols: Vec<Vec<Q>> = (0..self.dim(d))
            .map(|i| {
                self.mul(a, &self.basis(d, i))
                    .expect("inside window")
                    .coords
            })
            .collect();
        RationalMatrix::from_columns(self.dim(d + a.degree), &cols)
    }

    /// Matrix of `x ↦ x·a` from degree `d` to `d + |a|`.
    pub fn right_matrix(&self, a: &Element, d: i64) -> RationalMatrix {
        let cols: Vec<Vec<Q>> = (0..self.dim(d))
            .map(|i| {
                self.mul(&self.basis(d, i), a)
                    .expect("inside window")
                    .coords
            })
            .collect();
        RationalMatrix::from_columns(self.dim(d + a.degree), &cols)
    }

    /// Associativity on every basis triple and both unit laws inside the window.
    pub fn verify(&self) -> Result<(), Error> {
        let unit = self.unit();
        for d in 0..=self.top {
            for i in 0..self.dim(d) {
                let b = self.basis(d, i);
                if self.mul(&unit, &b).as_ref() != Some(&b)
                    || self.mul(&b, &unit).as_ref() != Some(&b)
                {
                    return Err(Error::InvalidInput(format!(
                        "unit law fails on {}",
                        self.names(d)[i]
                    )));
                }
            }
        }
        for d1 in 0..=self.top {
            for d2 in 0..=self.top - d1 {
                for d3 in 0..=self.top - d1 - d2 {
                    for i in 0..self.dim(d1) {
                        for j in 0..self.dim(d2) {
                            let a = self.basis(d1, i);
                            let b = self.basis(d2, j);
                            let ab = self.mul(&a, &b).unwrap();
                            for k in 0..self.dim(d3) {
                                let c = self.basis(d3, k);
                                let left = self.mul(&ab, &c);
                                let right = self.mul(&a, &self.mul(&b, &c).unwrap());
                                if left != right {
                                    return Err(Error::InvalidInput(format!(
                                        "associativity fails on ({}, {}, {})",
                                        self.names(d1)[i],
                                        self.names(d2)[j],
                                        self.names(d3)[k]
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Same basis, multiplication reversed.
    pub fn opposite(&self) -> TableAlgebra {
        let mut products = HashMap::new();
        for &(d1, d2) in self.products.keys() {
            let mut table = Vec::new();
            for i in 0..self.dim(d1) {
                for j in 0..self.dim(d2) {
                    table.push(self.basis_product(d2, j, d1, i).to_vec());
                }
            }
            products.insert((d1, d2), table);
        }
        TableAlgebra {
            products,
            ..self.clone()
        }
    }

    pub fn dimensions(&self) -> BTreeMap<i64, usize> {
        (0..=self.top).map(|d| (d, self.dim(d))).collect()
    }
}

/// A finite group by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl FiniteGroup {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, Error> {
        let n = names.len();
        let bad = |msg: &str| Err(Error::InvalidAction(msg.into()));
        if n == 0
            || table.len() != n
            || table
                .iter()
                .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return bad("multiplication table is not square over the elements");
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        else {
            return bad("no identity element");
        };
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == identity) {
                return bad("an element has no inverse");
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("multiplication is not associative");
                    }
                }
            }
        }
        Ok(FiniteGroup {
            names,
            table,
            identity,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            })
            .collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::new(names, table).expect("cyclic table")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.table[a][b] == self.identity)
            .expect("validated")
    }
}

/// Degree-preserving action of a finite group on a table algebra.
#[derive(Clone, Debug)]
pub struct GroupAction {
    pub group: FiniteGroup,
    /// `matrices[g][d]` acts on degree `d`.
    matrices: Vec<Vec<RationalMatrix>>,
}

impl GroupAction {
    pub fn new(
        group: FiniteGroup,
        algebra: &TableAlgebra,
        f: impl Fn(usize, i64) -> RationalMatrix,
    ) -> Self {
        let matrices = (0..group.order())
            .map(|g| (0..=algebra.top()).map(|d| f(g, d)).collect())
            .collect();
        GroupAction { group, matrices }
    }

    pub fn matrix(&self, g: usize, d: i64) -> &RationalMatrix {
        &self.matrices[g][d as usize]
    }

    pub fn apply(&self, g: usize, a: &Element) -> Element {
        Element {
            degree: a.degree,
            coords: self.matrix(g, a.degree).mul_vec(&a.coords),
        }
    }

    /// A representation by algebra automorphisms, checked on basis products.
    pub fn verify(&self, algebra: &TableAlgebra) -> Result<(), Error> {
        let g_count = self.group.order();
        for d in 0..=algebra.top() {
            let n = algebra.dim(d);
            for g in 0..g_count {
                let m = self.matrix(g, d);
                if m.rows() != n || m.cols() != n {
                    return Err(Error::InvalidAction(format!(
                        "matrix for {} in degree {d} has the wrong shape",
                        self.group.names[g]
                    )));
                }
                for h in 0..g_count {
                    if m.mul(self.matrix(h, d)) != *self.matrix(self.group.mul(g, h), d) {
                        return Err(Error::InvalidAction(format!(
                            "not a representation in degree {d}"
                        )));
                    }
                }
            }
            if *self.matrix(self.group.identity, d) != RationalMatrix::identity(n) {
                return Err(Error::InvalidAction(format!(
                    "identity acts nontrivially in degree {d}"
                )));
            }
        }
        for g in 0..g_count {
            if self.apply(g, &algebra.unit()) != algebra.unit() {
                return Err(Error::InvalidAction("the unit is not fixed".into()));
            }
            for d1 in 0..=algebra.top() {
                for d2 in 0..=algebra.top() - d1 {
                    for i in 0..algebra.dim(d1) {
                        for j in 0..algebra.dim(d2) {
                            let a = algebra.basis(d1, i);
                            let b = algebra.basis(d2, j);
                            let lhs = self.apply(g, &algebra.mul(&a, &b).unwrap());
                            let rhs = algebra.mul(&self.apply(g, &a), &self.apply(g, &b)).unwrap();
                            if lhs != rhs {
                                return Err(Error::InvalidAction(format!(
                                    "{} is not multiplicative on ({}, {})",
                                    self.group.names[g],
                                    algebra.names(d1)[i],
                                    algebra.names(d2)[j]
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `U ⋊ G` with basis `u ⊗ g` at index `u·|G| + g` and
/// `(u ⊗ g)(u' ⊗ g') = u·g(u') ⊗ gg'`.
pub fn semidirect(u: &TableAlgebra, action: &GroupAction) -> Result<TableAlgebra, Error> {
    action.verify(u)?;
    let group = &action.group;
    let n = group.order();
    let names: Vec<Vec<String>> = (0..=u.top())
        .map(|d| {
            let mut out = Vec::new();
            for un in u.names(d) {
                for gn in group.names() {
                    out.push(match (un.as_str(), gn.as_str()) {
                        (_, "1") => un.clone(),
                        ("1", _) => gn.clone(),
                        _ => format!("{un}·{gn}"),
                    });
                }
            }
            out
        })
        .collect();
    let mut unit = vec![q(0); u.dim(0) * n];
    for (k, c) in u.unit().coords.iter().enumerate() {
        unit[k * n + group.identity()] = c.clone();
    }
    let product = |d1: i64, i: usize, d2: i64, j: usize| {
        let (ua, ga) = (i / n, i % n);
        let (ub, gb) = (j / n, j % n);
        let moved = action.apply(ga, &u.basis(d2, ub));
        let prod = u.mul(&u.basis(d1, ua), &moved).expect("inside window");
        let g = group.mul(ga, gb);
        let mut v = vec![q(0); u.dim(d1 + d2) * n];
        for (k, c) in prod.coords.into_iter().enumerate() {
            v[k * n + g] = c;
        }
        v
    };
    let a = TableAlgebra::new(names, unit, product)?;
    let group_elements = (0..n)
        .map(|g| {
            let mut coords = vec![q(0); a.dim(0)];
            for (k, c) in u.unit().coords.iter().enumerate() {
                coords[k * n + g] = c.clone();
            }
            Element { degree: 0, coords }
        })
        .collect();
    Ok(TableAlgebra {
        group_elements,
        ..a
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A graded module over a table algebra realized in degrees `lo..=hi`. When
/// `bounded`, it vanishes outside that range; otherwise it is a truncation.
#[derive(Clone, Debug)]
pub struct TableModule {
    pub side: Side,
    lo: i64,
    hi: i64,
    dims: BTreeMap<i64, usize>,
    bounded: bool,
    /// `(d, e, b)`: action of basis element `b` of `A_e`, from degree `d` to `d + e`.
    actions: HashMap<(i64, i64, usize), RationalMatrix>,
}

impl TableModule {
    pub fn new(
        algebra: &TableAlgebra,
        side: Side,
        dims: BTreeMap<i64, usize>,
        bounded: bool,
        f: impl Fn(i64, i64, usize) -> RationalMatrix,
    ) -> Result<Self, Error> {
        let lo = dims.keys().next().copied().unwrap_or(0);
        let hi = dims.keys().next_back().copied().unwrap_or(-1);
        let mut actions = HashMap::new();
        for d in lo..=hi {
            for e in 0..=algebra.top() {
                if d + e > hi {
                    break;
                }
                for b in 0..algebra.dim(e) {
                    let m = f(d, e, b);
                    let rows = dims.get(&(d + e)).copied().unwrap_or(0);
                    let cols = dims.get(&d).copied().unwrap_or(0);
                    if m.rows() != rows || m.cols() != cols {
                        return Err(Error::InvalidInput(format!(
                            "action matrix ({d}, {e}, {b}) has the wrong shape"
                        )));
                    }
                    actions.insert((d, e, b), m);
                }
            }
        }
        let m = TableModule {
            side,
            lo,
            hi,
            dims,
            bounded,
            actions,
        };
        m.verify(algebra)?;
        Ok(m)
    }

    /// The algebra acting on itself, truncated at the algebra's window.
    pub fn regular(algebra: &TableAlgebra, side: Side) -> Self {
        let dims = algebra.dimensions();
        TableModule::new(algebra, side, dims, false, |d, e, b| {
            let a = algebra.basis(e, b);
            match side {
                Side::Left => algebra.left_matrix(&a, d),
                Side::Right => algebra.right_matrix(&a, d),
            }
        })
        .expect("regular module")
    }

    /// A module living in one degree; only `A_0` acts, through `f(b)`.
    pub fn concentrated(
        algebra: &TableAlgebra,
        side: Side,
        degree: i64,
        dim: usize,
        f: impl Fn(usize) -> RationalMatrix,
    ) -> Result<Self, Error> {
        TableModule::new(
            algebra,
            side,
            BTreeMap::from([(degree, dim)]),
            true,
            |_, _, b| f(b),
        )
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn dim(&self, d: i64) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    pub fn dimensions(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    /// Action of a homogeneous element from degree `d`.
    pub fn act(&self, a: &Element, d: i64) -> Result<RationalMatrix, Error> {
        let target = d + a.degree;
        let mut out = RationalMatrix::zeros(self.dim(target), self.dim(d));
        if self.dim(d) == 0 || self.dim(target) == 0 {
            if !self.bounded && (d < self.lo || target > self.hi) && self.dim(d) > 0 {
                return Err(Error::WindowTooSmall(format!(
                    "module truncated below degree {target}"
                )));
            }
            return Ok(out);
        }
        for (b, c) in a.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            out = out.add(&self.actions[&(d, a.degree, b)].scale(c));
        }
        Ok(out)
    }

    fn verify(&self, algebra: &TableAlgebra) -> Result<(), Error> {
        let unit = algebra.unit();
        for d in self.lo..=self.hi {
            if self.act(&unit, d)? != RationalMatrix::identity(self.dim(d)) {
                return Err(Error::InvalidInput(format!(
                    "unit does not act as the identity in degree {d}"
                )));
            }
            for e1 in 0..=algebra.top() {
                for e2 in 0..=algebra.top() - e1 {
                    if d + e1 + e2 > self.hi {
                        continue;
                    }
                    for i in 0..algebra.dim(e1) {
                        for j in 0..algebra.dim(e2) {
                            let a = algebra.basis(e1, i);
                            let b = algebra.basis(e2, j);
                            let ab = algebra.mul(&a, &b).unwrap();
                            // left: a(b m) = (ab) m; right: (m a) b = m (ab)
                            let (first, second) = match self.side {
                                Side::Left => (&b, &a),
                                Side::Right => (&a, &b),
                            };
                            let lhs = self
                                .act(second, d + first.degree)?
                                .mul(&self.act(first, d)?);
                            if lhs != self.act(&ab, d)? {
                                return Err(Error::InvalidInput(format!(
                                    "module action is not associative on ({}, {}) in degree {d}",
                                    algebra.names(e1)[i],
                                    algebra.names(e2)[j]
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `M^√⟨j⟩ = Hom(M⟨−j⟩, ℚ)` with the action moved to the other side.
pub fn graded_dual(m: &TableModule) -> TableModule {
    let dims: BTreeMap<i64, usize> = m.dims.iter().map(|(&d, &n)| (-d, n)).collect();
    let actions = m
        .actions
        .iter()
        .map(|(&(d, e, b), x)| ((-d - e, e, b), x.transpose()))
        .collect();
    TableModule {
        side: match m.side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        },
        lo: -m.hi,
        hi: -m.lo,
        dims,
        bounded: m.bounded,
        actions,
    }
}
